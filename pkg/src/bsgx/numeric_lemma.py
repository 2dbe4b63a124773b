"""Select a prefix of the largest weights whose sum is provably big.

Input is a vector of weights x_i in [0, 1], each of the form c_i * sqrt(rho)
with rational c_i >= 0 and one shared rational rho > 0.  Writing S for the
sum of the x_i and T for the sum of the x_i^2, the selection returns an index
set I (a prefix of the weights sorted descending) whose sum W satisfies

    W >= alpha * T                                   (mass branch)
    W >= ((1-alpha)^5 |I|^4 T^4 / (2^10 S^2))^(1/6)  (size branch)

for the given alpha in (0, 1).  Every comparison is done on cleared rational
forms: the mass branch squares once to remove sqrt(rho), the cutoff test for
the scan window divides out sqrt(rho), and in the size branch the rho powers
cancel identically, so the whole selection is exact.

Coefficients may be plain ints (the only caller passes representation
counts); that case skips per-element Fraction boxing and sorts with numpy,
which matters when the weight vector has millions of entries.  Both paths
compute identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Tuple, Union

import numpy as np

from .errors import InvariantViolation

Coeff = Union[int, Fraction]

_INT64_SAFE = 1 << 31


@dataclass(frozen=True)
class ScaledReal:
    """The nonnegative real coeff * sqrt(rho) with rational coeff and rho."""

    coeff: Fraction
    rho: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.coeff < 0:
            raise ValueError(f"coefficient must be >= 0, got {self.coeff}")
        if self.rho <= 0:
            raise ValueError(f"radicand must be > 0, got {self.rho}")

    def square(self) -> Fraction:
        return self.coeff * self.coeff * self.rho

    def __add__(self, other: "ScaledReal") -> "ScaledReal":
        self._check_same_rho(other)
        return ScaledReal(self.coeff + other.coeff, self.rho)

    def __le__(self, other: "ScaledReal") -> bool:
        self._check_same_rho(other)
        return self.coeff <= other.coeff

    def __lt__(self, other: "ScaledReal") -> bool:
        self._check_same_rho(other)
        return self.coeff < other.coeff

    def ge_rational(self, q: Fraction) -> bool:
        """Exact test coeff * sqrt(rho) >= q."""
        if q <= 0:
            return True
        return self.square() >= q * q

    def le_rational(self, q: Fraction) -> bool:
        """Exact test coeff * sqrt(rho) <= q."""
        if q < 0:
            return False
        return self.square() <= q * q

    def __float__(self) -> float:
        return float(self.coeff) * float(self.rho) ** 0.5

    def _check_same_rho(self, other: "ScaledReal") -> None:
        if self.rho != other.rho:
            raise ValueError(
                f"mixed radicands {self.rho} and {other.rho} are not comparable"
            )


@dataclass(frozen=True)
class WeightVector:
    """Weights x_i = coeff_i * sqrt(rho), each in [0, 1], not all zero."""

    rho: Fraction
    coeffs: Tuple[Coeff, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", Fraction(self.rho))
        coeffs = tuple(
            c if type(c) is int else Fraction(c) for c in self.coeffs
        )
        object.__setattr__(self, "coeffs", coeffs)
        if self.rho <= 0:
            raise ValueError(f"radicand must be > 0, got {self.rho}")
        if not coeffs:
            raise ValueError("weight vector must be nonempty")
        top = max(coeffs)
        low = min(coeffs)
        if low < 0:
            raise ValueError(f"weights must be >= 0, got coefficient {low}")
        if top == 0:
            raise ValueError("weights must not all be zero")
        if top * top * self.rho > 1:
            raise ValueError(f"weight {top}*sqrt({self.rho}) exceeds 1")

    def __len__(self) -> int:
        return len(self.coeffs)

    def value(self, i: int) -> ScaledReal:
        return ScaledReal(Fraction(self.coeffs[i]), self.rho)

    def sum_s(self) -> ScaledReal:
        """S, the sum of all weights."""
        return ScaledReal(Fraction(sum(self.coeffs)), self.rho)

    def sum_t(self) -> Fraction:
        """T, the sum of all squared weights (a plain rational)."""
        return sum((c * c for c in self.coeffs), Fraction(0)) * self.rho


@dataclass(frozen=True)
class PrefixSelection:
    """A chosen prefix of the stable descending order, with its certified sum.

    order is the full permutation (0-based original indices) sorting weights
    descending with ties kept in original order; index_set lists the first
    chosen_i of those indices, sorted ascending; window_lo and window_hi are
    the bounds of the prefix lengths the scan was allowed to consider.
    """

    order: Tuple[int, ...]
    chosen_i: int
    index_set: Tuple[int, ...]
    certified_sum: ScaledReal
    window_lo: int
    window_hi: int


def _sort_descending(coeffs: Tuple[Coeff, ...]) -> list:
    """Stable descending order as a list of original indices."""
    n = len(coeffs)
    if all(type(c) is int for c in coeffs) and all(
        c < _INT64_SAFE for c in coeffs
    ):
        arr = np.fromiter(coeffs, dtype=np.int64, count=n)
        return np.argsort(-arr, kind="stable").tolist()
    return sorted(range(n), key=lambda i: coeffs[i], reverse=True)


def select_index_set(xs: WeightVector, alpha: Fraction) -> PrefixSelection:
    """Pick the shortest certified prefix of the descending weight order.

    The scan window is [k, l] where k is the smallest prefix length whose
    sum reaches alpha * T and l is the largest index whose weight is at
    least (1 - alpha) * T / (2 * S); the first prefix length in the window
    satisfying the size branch is returned.  A valid length always exists,
    so running out of window means the implementation is wrong, not the
    input.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")

    n = len(xs)
    rho = xs.rho
    order = _sort_descending(xs.coeffs)
    c_desc = [xs.coeffs[i] for i in order]
    c1 = sum(c_desc)
    c2 = sum(c * c for c in c_desc)

    # T <= S, i.e. c2^2 * rho <= c1^2, is forced by every weight being <= 1
    if c2 * c2 * rho > c1 * c1:
        raise InvariantViolation("sum of squares exceeds sum of weights")

    # largest index whose weight clears (1 - alpha) * T / (2 * S); the top
    # weight always does, because 2 * c1 * c_max >= 2 * c2 > (1 - alpha) * c2
    cut = (1 - alpha) * c2
    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if 2 * c1 * c_desc[mid - 1] >= cut:
            lo = mid
        else:
            hi = mid - 1
    ell = lo

    prefix = list(accumulate(c_desc[:ell]))

    # smallest prefix length whose sum reaches alpha * T
    k_thresh = alpha * alpha * c2 * c2 * rho
    if prefix[ell - 1] ** 2 < k_thresh:
        raise InvariantViolation(f"no prefix of length <= {ell} reaches the mass floor")
    lo, hi = 1, ell
    while lo < hi:
        mid = (lo + hi) // 2
        if prefix[mid - 1] ** 2 >= k_thresh:
            hi = mid
        else:
            lo = mid + 1
    k = lo

    size_factor = (1 - alpha) ** 5 * c2**4
    for i in range(k, ell + 1):
        p = prefix[i - 1]
        if 1024 * p**6 * c1 * c1 >= size_factor * i**4:
            return PrefixSelection(
                order=tuple(order),
                chosen_i=i,
                index_set=tuple(sorted(order[:i])),
                certified_sum=ScaledReal(Fraction(p), rho),
                window_lo=k,
                window_hi=ell,
            )
    raise InvariantViolation("no prefix in the scan window was certified")
