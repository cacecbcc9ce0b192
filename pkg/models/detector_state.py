from dataclasses import dataclass


@dataclass(frozen=True)
class DetectorFamilyState:
    """Populations and ground/second-excited coherence of the detector.

    p and q are the populations of |0> and |1>; beta is the (2, 0)
    matrix element. The |2> population is whatever remains.
    """
    p: float
    q: float
    beta: complex = 0j

    @property
    def r(self) -> float:
        return 1.0 - self.p - self.q

    def to_dict(self):
        return {
            "p": self.p,
            "q": self.q,
            "beta": [self.beta.real, self.beta.imag],
        }
