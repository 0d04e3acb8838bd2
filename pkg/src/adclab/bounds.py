"""Sphere-packing converse for the binary symmetric channel at finite blocklength.

For an (n, M) code on a BSC with crossover probability delta, pick L and
lambda so that (1 - lambda) beta_L + lambda beta_{L+1} = 1/M; then every code
fails with probability at least 1 - (1 - lambda) alpha_L - lambda alpha_{L+1},
where beta and alpha are partial binomial sums at p = 1/2 and p = delta.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import OutOfRange

MAX_N = 64


@dataclass(frozen=True)
class SpherePackingResult:
    n: int
    num_messages: int
    delta: float
    big_l: int
    lam: float
    epsilon_lower: float


def _check_n_ell(n: int, ell: int) -> None:
    if not 0 <= n <= MAX_N:
        raise OutOfRange(f"blocklength must lie in [0, {MAX_N}], got {n}")
    if not 0 <= ell <= n:
        raise OutOfRange(f"ell must lie in [0, {n}], got {ell}")


def beta_exact(n: int, ell: int) -> Fraction:
    _check_n_ell(n, ell)
    return Fraction(sum(comb(n, k) for k in range(ell + 1)), 2**n)


def beta(n: int, ell: int) -> float:
    """Probability that a fair-coin string of length n has at most ell ones."""
    return float(beta_exact(n, ell))


def alpha_exact(n: int, ell: int, delta) -> Fraction:
    _check_n_ell(n, ell)
    d = Fraction(delta)
    if not 0 <= d <= 1:
        raise OutOfRange(f"crossover probability must lie in [0, 1], got {delta}")
    return sum((comb(n, k) * (1 - d) ** (n - k) * d**k for k in range(ell + 1)), Fraction(0))


def alpha(n: int, ell: int, delta: float) -> float:
    """Probability that a BSC(delta) flips at most ell of n bits."""
    return float(alpha_exact(n, ell, delta))


def sphere_packing(n: int, num_messages: int, delta: float) -> SpherePackingResult:
    """Lower bound on the failure probability of any (n, num_messages) code."""
    if not 1 <= n <= MAX_N:
        raise OutOfRange(f"blocklength must lie in [1, {MAX_N}], got {n}")
    if not 2 <= num_messages <= 2**n:
        raise OutOfRange(f"number of messages must lie in [2, 2^n], got {num_messages}")
    if not 0.0 <= delta <= 0.5:
        raise OutOfRange(f"crossover probability must lie in [0, 1/2], got {delta}")
    target = Fraction(1, num_messages)
    # smallest L with beta_L <= 1/M <= beta_{L+1}; ties at beta_{L+1} take lambda = 1
    big_l = 0
    while beta_exact(n, big_l + 1) < target:
        big_l += 1
    b_lo, b_hi = beta_exact(n, big_l), beta_exact(n, big_l + 1)
    lam = (target - b_lo) / (b_hi - b_lo)
    # exact rational arithmetic on the binary value of delta
    eps = 1 - (1 - lam) * alpha_exact(n, big_l, delta) - lam * alpha_exact(n, big_l + 1, delta)
    return SpherePackingResult(n, num_messages, float(delta), big_l, float(lam), float(eps))


def repetition_code_failure(n: int, delta: float) -> float:
    """Failure of the two-codeword {00, 11} code with random tie-breaking."""
    if n != 2:
        raise OutOfRange("the diagonal-codeword construction is defined for n = 2 only")
    if not 0.0 <= delta <= 1.0:
        raise OutOfRange(f"crossover probability must lie in [0, 1], got {delta}")
    d = Fraction(delta)
    return float(1 - (1 - d) ** 2 - 2 * Fraction(1, 2) * d * (1 - d))
