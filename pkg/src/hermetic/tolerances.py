"""Shared numerical tolerances."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Single record of every tolerance used by the predicates.

    Attributes
    ----------
    norm : float
        Normalization and trace checks.
    herm : float
        Max-abs deviation from Hermiticity.
    psd : float
        Smallest admissible eigenvalue is ``-psd``; also the rank cutoff.
    classify : float
        Collinearity, orthonormality and factorization verdicts.
    max_dim : int
        Largest total Hilbert-space dimension accepted by dense routines.
    """

    norm: float = 1e-10
    herm: float = 1e-10
    psd: float = 1e-9
    classify: float = 1e-8
    max_dim: int = 4096

    def with_(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            "norm": self.norm,
            "herm": self.herm,
            "psd": self.psd,
            "classify": self.classify,
            "max_dim": self.max_dim,
        }


DEFAULT = Tolerances()
