"""Tests for the three-level detector and its family states."""
import math

import numpy as np
import pytest

from models.detector_state import DetectorFamilyState
from models.phase_space import DensityMatrix
from services import detector, phase_space
from services.detector import FamilyStateError
from services.state_validator import StateValidationError
from services.verification import random_family_state


@pytest.mark.unit
class TestDetectorOperators:
    """Test suite for the free Hamiltonian and the monopole moment."""

    def test_free_hamiltonian_levels(self):
        h = detector.free_hamiltonian(1.0, 2.5)
        assert np.allclose(np.diag(h), [0.0, 1.0, 3.5])

    def test_monopole_is_hermitian_with_ladder_pattern(self):
        mu = detector.monopole(0.3, 1.0, 1.0)
        assert np.allclose(mu, mu.conj().T)
        assert mu[2, 0] == 0 and mu[0, 2] == 0
        assert abs(mu[1, 0]) == pytest.approx(1.0 / math.sqrt(2.0))
        assert abs(mu[2, 1]) == pytest.approx(1.0 / math.sqrt(2.0))

    def test_monopole_at_zero_time(self):
        mu = detector.monopole(0.0, 1.0, 2.0)
        expected = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]) / math.sqrt(2.0)
        assert np.allclose(mu, expected)

    @pytest.mark.parametrize("gaps", [(0.0, 1.0), (1.0, -1.0)])
    def test_rejects_non_positive_gaps(self, gaps):
        with pytest.raises(ValueError):
            detector.free_hamiltonian(*gaps)
        with pytest.raises(ValueError):
            detector.monopole(0.0, *gaps)


@pytest.mark.unit
class TestParitySupport:
    """Test suite for the selection rule on monopole products."""

    def test_single_monopole_reaches_first_level(self):
        assert detector.parity_support(1, [0.4], 1.0, 1.0) == frozenset({1})

    def test_two_monopoles_reach_even_levels(self):
        support = detector.parity_support(2, [0.1, -0.7], 1.0, 1.0)
        assert support == frozenset({0, 2})

    def test_random_products_respect_parity(self, rng):
        for _ in range(50):
            m = int(rng.integers(1, 7))
            taus = rng.uniform(-4.0, 4.0, size=m).tolist()
            support = detector.parity_support(m, taus, 1.0, 1.3)
            assert support <= ({1} if m % 2 else {0, 2})

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            detector.parity_support(3, [0.0, 1.0], 1.0, 1.0)


@pytest.mark.unit
class TestFamilyStates:
    """Test suite for assembling and reading back family states."""

    def test_assemble_places_entries(self):
        fam = DetectorFamilyState(p=0.6, q=0.3, beta=0.05 + 0.02j)
        rho = detector.assemble_state(fam)
        assert rho.entries[0, 0] == pytest.approx(0.6)
        assert rho.entries[1, 1] == pytest.approx(0.3)
        assert rho.entries[2, 2] == pytest.approx(0.1)
        assert rho.entries[2, 0] == pytest.approx(0.05 + 0.02j)
        assert rho.entries[0, 2] == pytest.approx(0.05 - 0.02j)
        assert rho.entries[0, 1] == 0 and rho.entries[1, 2] == 0

    def test_extract_inverts_assemble(self):
        fam = DetectorFamilyState(p=0.5, q=0.25, beta=-0.1 + 0.05j)
        back = detector.extract_family(detector.assemble_state(fam))
        assert back.p == pytest.approx(fam.p)
        assert back.q == pytest.approx(fam.q)
        assert back.beta == pytest.approx(fam.beta)

    def test_extract_rejects_coherence_with_first_level(self):
        rho = DensityMatrix.from_matrix(np.full((3, 3), 1.0 / 3.0))
        with pytest.raises(FamilyStateError):
            detector.extract_family(rho)

    def test_negative_population_rejected(self):
        with pytest.raises(FamilyStateError) as excinfo:
            detector.assemble_state(DetectorFamilyState(p=-0.1, q=0.5))
        assert any("p must be non-negative" in e for e in excinfo.value.errors)

    def test_populations_above_one_rejected(self):
        with pytest.raises(FamilyStateError):
            detector.assemble_state(DetectorFamilyState(p=0.8, q=0.4))

    def test_coherence_too_large_is_not_positive(self):
        fam = DetectorFamilyState(p=0.5, q=0.0, beta=0.6)
        with pytest.raises(StateValidationError) as excinfo:
            detector.assemble_state(fam)
        assert "positivity" in excinfo.value.invariants

    def test_relaxed_tolerance_accepts_small_deficit(self):
        fam = DetectorFamilyState(p=0.99, q=0.01, beta=-0.002)
        rho = detector.assemble_state(fam, psd_tolerance=1e-3)
        assert rho.entries[2, 2] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.unit
class TestFamilyMana:
    """Test suite for the closed-form family mana."""

    def test_ground_state_has_zero_mana(self):
        assert detector.family_mana(0.0, 0j) == pytest.approx(0.0, abs=1e-15)

    def test_independent_of_p(self):
        q, beta = 0.1, 0.02 - 0.01j
        values = [
            phase_space.mana(detector.assemble_state(DetectorFamilyState(p=p, q=q, beta=beta)))
            for p in (0.3, 0.5, 0.8)
        ]
        assert max(values) - min(values) < 1e-12

    def test_conjugate_coherence_gives_identical_mana(self, rng):
        for _ in range(500):
            fam = random_family_state(rng)
            assert detector.family_mana(fam.q, fam.beta) == detector.family_mana(fam.q, fam.beta.conjugate())

    def test_matches_general_mana_on_random_states(self, rng):
        for _ in range(200):
            fam = random_family_state(rng)
            general = phase_space.mana(detector.assemble_state(fam))
            assert detector.family_mana(fam.q, fam.beta) == pytest.approx(general, abs=1e-12)

    def test_zero_when_bracket_terms_are_non_negative(self):
        # q >= 2|beta| keeps every second-column entry non-negative
        assert detector.family_mana(0.2, 0.05 + 0.02j) == pytest.approx(0.0, abs=1e-15)

    def test_real_negative_beta(self):
        q, beta = 0.01, -0.02
        expected = math.log1p(-q + (abs(q + 2 * beta) + 2 * abs(q - beta)) / 3.0)
        assert detector.family_mana(q, beta) == pytest.approx(expected, rel=1e-14)
        assert expected > 0
