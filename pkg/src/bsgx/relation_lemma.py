"""Extract, from a dense relation on a set, a subset rich in 3-step paths.

Given a relation R on A x A of density delta = |R| / |A|^2 and a slack
parameter xi in (0, 1], this picks an element x* whose neighborhood
A* = N(x*) = {a : (a, x*) in R} is both large and has few "thin" pairs, then
filters A* down to A'.  The guarantee is that every ordered pair (a1, a2) of
A' is joined by at least 2^-7 * delta^4 * xi^4 * |A|^2 * |A'| triples
(x, b, y) with (a1, x), (b, x), (b, y), (a2, y) all in R.

A pair (a, a') is thin when the number of common right-neighbors
|{x : (a, x) in R and (a', x) in R}| is at most delta^2 * xi^2 * |A| / 8;
the set of thin pairs over A^2 is called Omega below.  All thresholds are
exact rational comparisons on integer counts.

The relation is stored as a boolean matrix indexed by the (sorted) elements
of A.  Counting passes run as row-chunked float64 matrix products; every
intermediate value is an integer below 2^53, so the results are exact and
independent of chunking and thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Tuple

import numpy as np

from ._codec import build_codec
from ._parallel import chunked_map
from .errors import InvariantViolation
from .groups import AdditiveSet, Element, sub

_ROW_BUDGET = 4_000_000


class Relation:
    """A binary relation on A x A, stored as a boolean index matrix."""

    def __init__(self, base: AdditiveSet, matrix: np.ndarray) -> None:
        n = len(base)
        if matrix.shape != (n, n) or matrix.dtype != np.bool_:
            raise ValueError("relation matrix must be boolean of shape (|A|, |A|)")
        self.base = base
        self.matrix = matrix

    @classmethod
    def from_index_pairs(
        cls, base: AdditiveSet, pairs: Iterable[Tuple[int, int]]
    ) -> "Relation":
        n = len(base)
        matrix = np.zeros((n, n), dtype=np.bool_)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"index pair ({i}, {j}) out of range for |A|={n}")
            matrix[i, j] = True
        return cls(base, matrix)

    @classmethod
    def from_element_pairs(
        cls, base: AdditiveSet, pairs: Iterable[Tuple[Element, Element]]
    ) -> "Relation":
        index = {a: i for i, a in enumerate(base.elements)}
        return cls.from_index_pairs(
            base, ((index[a], index[b]) for a, b in pairs)
        )

    @classmethod
    def from_difference_set(
        cls, base: AdditiveSet, members: Iterable[Element]
    ) -> "Relation":
        """The relation {(a, b) : a - b in members}."""
        spec = base.spec
        member_set = {spec.reduce(m) for m in members}
        n = len(base)
        codec = build_codec(base)
        if codec is None:
            matrix = np.zeros((n, n), dtype=np.bool_)
            for i, a in enumerate(base.elements):
                for j, b in enumerate(base.elements):
                    if sub(spec, a, b) in member_set:
                        matrix[i, j] = True
            return cls(base, matrix)
        in_range = [
            m
            for m in member_set
            if all(
                lo <= c < lo + radix
                for c, lo, radix in zip(m, codec.lows, codec.radices)
            )
        ]
        if in_range:
            member_codes = np.sort(
                codec.encode(np.array(in_range, dtype=np.int64))
            )
        else:
            member_codes = np.empty(0, dtype=np.int64)
        matrix = np.empty((n, n), dtype=np.bool_)
        rows = max(1, _ROW_BUDGET // max(n, 1))
        for lo in range(0, n, rows):
            hi = min(lo + rows, n)
            block = codec.diff_codes(codec.coords[lo:hi], codec.coords)
            pos = np.searchsorted(member_codes, block)
            pos[pos == len(member_codes)] = 0
            found = member_codes[pos] == block if len(member_codes) else np.zeros_like(block, dtype=bool)
            matrix[lo:hi] = found
        return cls(base, matrix)

    @cached_property
    def size(self) -> int:
        return int(self.matrix.sum(dtype=np.int64))

    @property
    def delta(self) -> Fraction:
        n = len(self.base)
        return Fraction(self.size, n * n)

    @cached_property
    def pairs(self) -> FrozenSet[Tuple[int, int]]:
        ii, jj = np.nonzero(self.matrix)
        return frozenset(zip(ii.tolist(), jj.tolist()))


def neighborhoods(relation: Relation) -> Dict[Element, frozenset]:
    """N(x) = {a : (a, x) in R} for every x in the base set."""
    base = relation.base
    out = {}
    for j, x in enumerate(base.elements):
        rows = np.flatnonzero(relation.matrix[:, j])
        out[x] = frozenset(base.elements[i] for i in rows)
    return out


def common_counts(relation: Relation) -> Dict[Tuple[Element, Element], int]:
    """|{x : a in N(x) and a' in N(x)}| for every ordered pair (a, a')."""
    m = relation.matrix.astype(np.float64)
    counts = m @ m.T
    base = relation.base
    out = {}
    for i, a in enumerate(base.elements):
        row = counts[i]
        for j, b in enumerate(base.elements):
            out[(a, b)] = int(row[j])
    return out


@dataclass(frozen=True)
class TvWitness:
    """The chosen center, its neighborhood, and the filtered subset."""

    x_star: Element
    a_star: AdditiveSet
    a_prime: AdditiveSet
    omega_card_in_astar: int
    triple_lower_bound: Fraction
    delta: Fraction
    xi: Fraction


def extract_tv(relation: Relation, xi: Fraction, threads: int = 1) -> TvWitness:
    """Pick x*, form A* = N(x*), filter to A'; all guarantees asserted.

    x* maximizes |N(x)|^2 - 8 * xi^-1 * |N(x)^2 intersect Omega| with ties
    going to the lexicographically smallest element.  A' keeps the a in A*
    with at most |A*| / 4 thin partners inside A*.
    """
    xi = Fraction(xi)
    if not 0 < xi <= 1:
        raise ValueError(f"xi must be in (0, 1], got {xi}")
    base = relation.base
    n = len(base)
    r_size = relation.size
    if r_size == 0:
        raise ValueError("relation must be nonempty")
    delta = Fraction(r_size, n * n)

    matrix_f = relation.matrix.astype(np.float64)
    deg = relation.matrix.sum(axis=0, dtype=np.int64)

    if int(np.dot(deg, deg)) * n < r_size * r_size:
        raise InvariantViolation("neighborhood second moment below its floor")

    # thin-pair threshold: common count <= delta^2 * xi^2 * n / 8
    thresh = delta * delta * xi * xi * n / 8
    t_floor = thresh.numerator // thresh.denominator

    rows = max(1, _ROW_BUDGET // max(n, 1))
    chunks = [(lo, min(lo + rows, n)) for lo in range(0, n, rows)]

    def scan(chunk: Tuple[int, int]) -> np.ndarray:
        lo, hi = chunk
        common_block = matrix_f[lo:hi] @ matrix_f.T
        omega_block = common_block <= t_floor
        partner_block = omega_block.astype(np.float64) @ matrix_f
        return (matrix_f[lo:hi] * partner_block).sum(axis=0)

    omega_weight = np.zeros(n, dtype=np.float64)
    for part in chunked_map(scan, chunks, threads):
        omega_weight += part
    omega_weight_int = omega_weight.astype(np.int64)

    best_j = 0
    best_score = None
    for j in range(n):
        score = xi * int(deg[j]) ** 2 - 8 * int(omega_weight_int[j])
        if best_score is None or score > best_score:
            best_score = score
            best_j = j
    # selection guarantee: deg^2 - 8 * xi^-1 * omega >= delta^2 * (1 - xi) * n^2
    if best_score / xi < delta * delta * (1 - xi) * n * n:
        raise InvariantViolation("no center reaches the averaged score floor")

    star_idx = np.flatnonzero(relation.matrix[:, best_j])
    n_star = len(star_idx)
    star_f = matrix_f[star_idx]
    common_star = star_f @ star_f.T
    omega_star = common_star <= t_floor
    omega_card = int(omega_star.sum(dtype=np.int64))
    thin_partners = omega_star.sum(axis=1, dtype=np.int64)
    keep = 4 * thin_partners <= n_star
    prime_idx = star_idx[keep]
    if len(prime_idx) == 0:
        raise InvariantViolation("every neighborhood element was filtered out")
    if Fraction(len(prime_idx)) < delta * (1 - xi) * n:
        raise InvariantViolation("filtered subset below its guaranteed size")

    a_star = AdditiveSet(base.spec, tuple(base.elements[i] for i in star_idx))
    a_prime = AdditiveSet(base.spec, tuple(base.elements[i] for i in prime_idx))
    bound = delta**4 * xi**4 * n * n * len(prime_idx) / 128
    return TvWitness(
        x_star=base.elements[best_j],
        a_star=a_star,
        a_prime=a_prime,
        omega_card_in_astar=omega_card,
        triple_lower_bound=bound,
        delta=delta,
        xi=xi,
    )
