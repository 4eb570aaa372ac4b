"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10
    reconstruction: float = 1e-9
    unitarity: float = 1e-9
    trace: float = 1e-10
    # eigenvalues in [-negative_eigenvalue, 0) are clipped to zero
    negative_eigenvalue: float = 1e-10
    probability_clip: float = 1e-12
    distribution_sum: float = 1e-9
    support: float = 1e-12
    degeneracy: float = 1e-9
    # two complementary factors closer than this count as a tie
    order_tie: float = 1e-12


TOL = Tolerances()
