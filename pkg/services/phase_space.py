"""Weyl-Heisenberg operators, discrete Wigner function and mana for odd qudits.

Phases are taken from the exact residue k mod n before exponentiating, so
products of Weyl matrices never accumulate angle drift.
"""
import math
from typing import List

import numpy as np

from models.phase_space import DensityMatrix, WeylIndex, WignerMap
from services.state_validator import StateValidator


def _check_dimension(n: int):
    if int(n) != n or n < 3 or n % 2 == 0:
        raise ValueError(f"phase space is defined only for odd n >= 3, got {n}")


def _omega_power(k: int, n: int) -> complex:
    angle = 2.0 * math.pi * (k % n) / n
    return complex(math.cos(angle), math.sin(angle))


def _weyl_phase_exponent(n: int, a: int, a_prime: int) -> int:
    return (-((n + 1) // 2) * a * a_prime) % n


def clock(n: int) -> np.ndarray:
    _check_dimension(n)
    return np.diag([_omega_power(k, n) for k in range(n)])


def shift(n: int) -> np.ndarray:
    _check_dimension(n)
    x = np.zeros((n, n), dtype=complex)
    for k in range(n):
        x[(k + 1) % n, k] = 1.0
    return x


def weyl(n: int, idx: WeylIndex) -> np.ndarray:
    """T_(a,a') = omega^(-(n+1)/2 a a') Z^a X^a'."""
    _check_dimension(n)
    idx = idx.reduced(n)
    # Z^a and X^a' built directly from residues
    z_power = np.diag([_omega_power(idx.a * k, n) for k in range(n)])
    x_power = np.zeros((n, n), dtype=complex)
    for k in range(n):
        x_power[(k + idx.a_prime) % n, k] = 1.0
    phase = _omega_power(_weyl_phase_exponent(n, idx.a, idx.a_prime), n)
    return phase * (z_power @ x_power)


def phase_point_operators(n: int) -> np.ndarray:
    """All A_(a,a') stacked as an (n, n, n, n) array indexed [a, a', i, j]."""
    _check_dimension(n)
    weyls = [[weyl(n, WeylIndex(a, b)) for b in range(n)] for a in range(n)]
    a_zero = sum(t for row in weyls for t in row) / n
    stack = np.empty((n, n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            t = weyls[a][b]
            stack[a, b] = t @ a_zero @ t.conj().T
    return stack


def phase_point_operator(n: int, idx: WeylIndex) -> np.ndarray:
    _check_dimension(n)
    idx = idx.reduced(n)
    a_zero = sum(
        weyl(n, WeylIndex(a, b)) for a in range(n) for b in range(n)
    ) / n
    t = weyl(n, idx)
    return t @ a_zero @ t.conj().T


def wigner(rho: DensityMatrix) -> WignerMap:
    """W_a = Tr(A_a rho) / n; rejects non-Hermitian input."""
    StateValidator(psd_tolerance=None, check_trace=False).validate_or_raise(rho)
    n = rho.dim
    operators = phase_point_operators(n)
    values = np.einsum("abij,ji->ab", operators, rho.entries) / n
    return WignerMap(dim=n, values=values.real)


def mana(rho: DensityMatrix) -> float:
    """Mana ln sum_a |W_a| of a qudit state.

    Args:
        rho: Hermitian matrix of odd dimension; positivity is not checked here

    Returns:
        Non-negative mana, log1p of sum_a |W_a| - 1
    """
    w = wigner(rho).values.ravel()
    total = math.fsum(w)
    negative = math.fsum(-v for v in w if v < 0)
    value = math.log1p((total - 1.0) + 2.0 * negative)
    return max(value, 0.0)


def reconstruct(w: WignerMap) -> DensityMatrix:
    """rho = sum_a W_a A_a."""
    operators = phase_point_operators(w.dim)
    entries = np.einsum("ab,abij->ij", w.values, operators)
    return DensityMatrix(dim=w.dim, entries=entries)


def displace(rho: DensityMatrix, idx: WeylIndex) -> DensityMatrix:
    t = weyl(rho.dim, idx)
    return DensityMatrix(dim=rho.dim, entries=t @ rho.entries @ t.conj().T)


def stabilizer_states(n: int = 3) -> List[DensityMatrix]:
    """Computational basis states plus the quadratic-phase states.

    For n = 3 these are the twelve single-qutrit stabilizer states.
    """
    _check_dimension(n)
    states = [DensityMatrix.pure(np.eye(n)[k]) for k in range(n)]
    for r in range(n):
        for s in range(n):
            vector = np.array([_omega_power(r * k * k + s * k, n) for k in range(n)])
            states.append(DensityMatrix.pure(vector))
    return states


def strange_state() -> DensityMatrix:
    """(|1> - |2>)/sqrt(2), the qutrit state with mana ln(5/3)."""
    return DensityMatrix.pure(np.array([0.0, 1.0, -1.0]))
