"""End-to-end extraction of a subset with small difference set.

Given a finite subset A of an abelian group, write E for its additive energy
and K = |A|^3 / E for its doubling parameter.  This module splits the
differences of A into popular ones (r(d)^2 * |A| >= E) and the rest, uses
the mass of each part to choose one of two branches, and extracts a subset
A' of A with

    |A'|        >= (1 - eps) * sqrt(E / |A|)      (= (1-eps) * K^(-1/2) * |A|)
    |A' - A'|   <= 2^33 * eps^-9 * K^4 * |A'|

for any rational eps in (0, 1/2).  The popular branch additionally achieves
|A' - A'| <= 2^10 * eps^-4 * K^3 * |A'|.  Every threshold the analysis
writes with a square root is compared after squaring, so the whole pipeline
is exact integer and rational arithmetic; floating point appears only inside
matrix products whose entries are integers below 2^53.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from ._parallel import chunked_map
from .additive_stats import RepTable, rep_table
from .errors import InvariantViolation
from .groups import AdditiveSet, Element, serialize_set, sub
from .numeric_lemma import PrefixSelection, WeightVector, select_index_set
from .relation_lemma import Relation, TvWitness, extract_tv

TOOL_VERSION = "0.1.0"

_ROW_BUDGET = 2_000_000
_DECODE_CHUNK = 1 << 16


@dataclass(frozen=True)
class Params:
    """Extraction parameters: rational eps in (0, 1/2), optional dual run."""

    eps: Fraction
    run_both: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", Fraction(self.eps))
        if not 0 < self.eps < Fraction(1, 2):
            raise ValueError(f"eps must be in (0, 1/2), got {self.eps}")


class PartitionPQ:
    """Differences of A split by popularity, with the mass of each side.

    A difference d is popular when r(d)^2 * |A| >= E; the popular side is
    always small (at most |A| entries) and is materialized, while the
    unpopular side may be huge and is exposed as a lazy iterator.
    """

    def __init__(
        self,
        a_set: AdditiveSet,
        rep: RepTable,
        p_items: Tuple[Tuple[Element, int], ...],
        p_mass: int,
        q_mass: int,
        q_size: int,
        q_codes,
        q_counts,
        q_entries: Optional[List[Tuple[Element, int]]],
    ) -> None:
        self.a_set = a_set
        self.rep = rep
        self.p_items = p_items
        self.p_mass = p_mass
        self.q_mass = q_mass
        self.q_size = q_size
        self._q_codes = q_codes
        self._q_counts = q_counts
        self._q_entries = q_entries

    @property
    def set_size(self) -> int:
        return len(self.a_set)

    @property
    def energy(self) -> int:
        return self.p_mass + self.q_mass

    def q_items(self) -> Iterator[Tuple[Element, int]]:
        """(difference, count) over the unpopular side, lexicographic."""
        if self._q_entries is not None:
            yield from self._q_entries
            return
        for start in range(0, self.q_size, _DECODE_CHUNK):
            block = slice(start, start + _DECODE_CHUNK)
            decoded = self.rep.codec.decode(self._q_codes[block])
            for d, c in zip(decoded, self._q_counts[block]):
                yield d, int(c)

    def q_counts(self) -> List[int]:
        """Just the counts of the unpopular side, in q_items order."""
        if self._q_entries is not None:
            return [c for _, c in self._q_entries]
        return self._q_counts.tolist()

    def q_elements_at(self, indices) -> Tuple[Element, ...]:
        """Unpopular differences at the given ascending q_items positions."""
        if self._q_entries is not None:
            return tuple(self._q_entries[i][0] for i in indices)
        codes = self._q_codes[np.asarray(indices, dtype=np.int64)]
        return tuple(self.rep.codec.decode(codes))

    def p_elements(self) -> Tuple[Element, ...]:
        return tuple(d for d, _ in self.p_items)


def partition_pq(a_set: AdditiveSet, rep: Optional[RepTable] = None, threads: int = 1) -> PartitionPQ:
    """Split A - A by the exact popularity test r(d)^2 * |A| >= E."""
    if rep is None:
        rep = rep_table(a_set, threads=threads)
    n = len(a_set)
    e_val = rep.energy_sum()
    if rep.entries is not None:
        p_items: List[Tuple[Element, int]] = []
        q_entries: List[Tuple[Element, int]] = []
        p_mass = 0
        for d in sorted(rep.entries):
            r = rep.entries[d]
            if r * r * n >= e_val:
                p_items.append((d, r))
                p_mass += r * r
            else:
                q_entries.append((d, r))
        pq = PartitionPQ(
            a_set, rep, tuple(p_items), p_mass, e_val - p_mass,
            len(q_entries), None, None, q_entries,
        )
    else:
        counts = rep.counts
        popular = counts * counts * n >= e_val
        p_codes = rep.codes[popular]
        p_counts = counts[popular]
        p_mass = int(np.dot(p_counts, p_counts))
        p_items = tuple(
            (d, int(c))
            for d, c in zip(rep.codec.decode(p_codes), p_counts)
        )
        q_codes = rep.codes[~popular]
        q_counts = counts[~popular]
        pq = PartitionPQ(
            a_set, rep, p_items, p_mass, e_val - p_mass,
            len(q_codes), q_codes, q_counts, None,
        )
    zero = a_set.spec.zero()
    if all(d != zero for d, _ in pq.p_items):
        raise InvariantViolation("zero difference missing from the popular side")
    return pq


def case_select(pq: PartitionPQ, eps: Fraction) -> str:
    """"P" when the popular mass reaches eps * E / 4, else "Q"."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError(f"eps must be in (0, 1/2), got {eps}")
    if 4 * pq.p_mass >= eps * pq.energy:
        return "P"
    if Fraction(pq.q_mass) < (1 - eps / 4) * pq.energy:
        raise InvariantViolation("neither branch hypothesis holds")
    return "Q"


@dataclass(frozen=True)
class PWitness:
    """Popular-branch witness: the chosen difference and its filter data."""

    d_star: Element
    a_star: AdditiveSet
    thin_threshold: int
    thin_pairs_in_a_star: int


@dataclass(frozen=True)
class QWitness:
    """Unpopular-branch witness: the weight selection and the path filter."""

    selection: PrefixSelection
    q_prime: AdditiveSet
    delta: Fraction
    tv: TvWitness


@dataclass(frozen=True)
class ExtractionReport:
    """Everything the extraction produced, with its certified bounds.

    size_bound_sq is the square of the size floor (1 - eps) * sqrt(E / n),
    kept squared so it stays rational; a_prime_size^2 * n >= size_bound_sq * n^2
    is the exact comparison recorded in the checks.
    """

    set_size: int
    energy: int
    K: Fraction
    eps: Fraction
    run_both: bool
    case: str
    witness: Union[PWitness, QWitness]
    a_prime: AdditiveSet
    size_bound_sq: Fraction
    diff_bound: Fraction
    diff_bound_p: Optional[Fraction]
    a_prime_size: int
    diff_size: int
    checks: Tuple[Tuple[str, bool], ...]

    def to_json_dict(self) -> dict:
        if isinstance(self.witness, PWitness):
            witness = {
                "d_star": list(self.witness.d_star),
                "a_star_size": len(self.witness.a_star),
                "thin_threshold": self.witness.thin_threshold,
                "thin_pairs_in_a_star": self.witness.thin_pairs_in_a_star,
            }
        else:
            witness = {
                "q_size": len(self.witness.selection.order),
                "selected_count": self.witness.selection.chosen_i,
                "q_prime_size": len(self.witness.q_prime),
                "q_prime": serialize_set(self.witness.q_prime).decode("utf-8"),
                "delta": _frac_str(self.witness.delta),
                "x_star": list(self.witness.tv.x_star),
                "a_star_size": len(self.witness.tv.a_star),
                "thin_pairs_in_a_star": self.witness.tv.omega_card_in_astar,
            }
        bounds = {
            "size_bound_sq": _frac_str(self.size_bound_sq),
            "diff_bound": _frac_str(self.diff_bound),
        }
        if self.diff_bound_p is not None:
            bounds["diff_bound_p"] = _frac_str(self.diff_bound_p)
        return {
            "version": TOOL_VERSION,
            "params": {"eps": _frac_str(self.eps), "run_both": self.run_both},
            "input": {
                "n": self.set_size,
                "energy": self.energy,
                "K": _frac_str(self.K),
            },
            "case": self.case,
            "witness": witness,
            "a_prime": serialize_set(self.a_prime).decode("utf-8"),
            "bounds": bounds,
            "achieved": {
                "a_prime_size": self.a_prime_size,
                "diff_size": self.diff_size,
            },
            "checks": [
                {"name": name, "pass": ok} for name, ok in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def _frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _finish_report(
    a_set: AdditiveSet,
    pq: PartitionPQ,
    eps: Fraction,
    run_both: bool,
    case: str,
    witness: Union[PWitness, QWitness],
    a_prime: AdditiveSet,
    threads: int,
) -> ExtractionReport:
    n = pq.set_size
    e_val = pq.energy
    k_val = Fraction(n**3, e_val)
    size_bound_sq = (1 - eps) ** 2 * Fraction(e_val, n)
    diff_bound = 2**33 * eps**-9 * k_val**4 * len(a_prime)
    diff_bound_p = (
        2**10 * eps**-4 * k_val**3 * len(a_prime) if case == "P" else None
    )
    diff_size = len(rep_table(a_prime, threads=threads))
    m = len(a_prime)

    size_ok = m * m * n >= (1 - eps) ** 2 * e_val
    size_ok_cleared = m * m * e_val >= (1 - eps) ** 2 * n**3
    diff_ok = diff_size <= diff_bound
    diff_ok_p = diff_size <= diff_bound_p if diff_bound_p is not None else None
    subset_ok = a_prime.as_set <= a_set.as_set

    checks = [
        ("size_lower_bound", bool(size_ok)),
        ("size_lower_bound_cleared", bool(size_ok_cleared)),
        ("diff_upper_bound", bool(diff_ok)),
    ]
    if diff_ok_p is not None:
        checks.append(("diff_upper_bound_popular", bool(diff_ok_p)))
    checks.append(("subset_of_input", bool(subset_ok)))
    for name, ok in checks:
        if not ok:
            raise InvariantViolation(f"certified inequality failed: {name}")
    return ExtractionReport(
        set_size=n,
        energy=e_val,
        K=k_val,
        eps=eps,
        run_both=run_both,
        case=case,
        witness=witness,
        a_prime=a_prime,
        size_bound_sq=size_bound_sq,
        diff_bound=diff_bound,
        diff_bound_p=diff_bound_p,
        a_prime_size=m,
        diff_size=diff_size,
        checks=tuple(checks),
    )


def _membership_matrices(
    pq: PartitionPQ, thin_floor: int, threads: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Build X[i, j] = (r(a_i - a_j) <= thin_floor) and M[t, i] = (a_i in A_d_t)."""
    a_set = pq.a_set
    rep = pq.rep
    n = len(a_set)
    p_elems = pq.p_elements()
    if rep.entries is not None:
        spec = a_set.spec
        x_mat = np.empty((n, n), dtype=np.bool_)
        for i, a in enumerate(a_set.elements):
            for j, b in enumerate(a_set.elements):
                x_mat[i, j] = rep.entries[sub(spec, a, b)] <= thin_floor
        m_mat = np.empty((len(p_elems), n), dtype=np.bool_)
        for t, d in enumerate(p_elems):
            for i, a in enumerate(a_set.elements):
                m_mat[t, i] = sub(spec, a, d) in a_set.as_set
        return x_mat, m_mat

    codec = rep.codec
    elem_codes = codec.encode(codec.coords)
    p_coords = np.array(p_elems, dtype=np.int64)
    rows = max(1, _ROW_BUDGET // max(n, 1))

    x_mat = np.empty((n, n), dtype=np.bool_)

    def fill_x(chunk: Tuple[int, int]) -> None:
        lo, hi = chunk
        block = codec.diff_codes(codec.coords[lo:hi], codec.coords)
        idx = np.searchsorted(rep.codes, block)
        x_mat[lo:hi] = rep.counts[idx] <= thin_floor

    chunked_map(fill_x, [(lo, min(lo + rows, n)) for lo in range(0, n, rows)], threads)

    m_mat = np.empty((len(p_elems), n), dtype=np.bool_)

    def fill_m(chunk: Tuple[int, int]) -> None:
        lo, hi = chunk
        # a_j - d_t for t in the chunk: diff_codes gives column-major layout
        block = codec.diff_codes(codec.coords, p_coords[lo:hi])
        pos = np.searchsorted(elem_codes, block)
        pos[pos == n] = 0
        m_mat[lo:hi] = (elem_codes[pos] == block).T

    p_rows = max(1, _ROW_BUDGET // max(n, 1))
    chunked_map(
        fill_m,
        [(lo, min(lo + p_rows, len(p_elems))) for lo in range(0, len(p_elems), p_rows)],
        threads,
    )
    return x_mat, m_mat


def extract_p(
    a_set: AdditiveSet, pq: PartitionPQ, eps: Fraction, threads: int = 1,
    run_both: bool = False,
) -> ExtractionReport:
    """Popular branch: pick the difference whose slice has few thin pairs.

    A pair (x, y) of A^2 is thin when r(x - y) <= eps^2 * E / (16 * n^2).
    For each popular d the slice A_d = A intersect (A + d) has exactly r(d)
    elements; d* maximizes eps * |A_d|^2 - 4 * (thin pairs inside A_d^2),
    with ties broken by larger |A_d| and then lexicographically smaller d.
    A' keeps the elements of A* = A_d* with at most |A*| / 4 thin partners.
    """
    eps = Fraction(eps)
    n = len(a_set)
    e_val = pq.energy
    if 4 * pq.p_mass < eps * e_val:
        raise ValueError("popular branch requires p_mass >= eps * E / 4")

    thin = eps * eps * e_val / (16 * n * n)
    thin_floor = thin.numerator // thin.denominator
    x_mat, m_mat = _membership_matrices(pq, thin_floor, threads)

    slice_sizes = m_mat.sum(axis=1, dtype=np.int64)
    expected = np.array([c for _, c in pq.p_items], dtype=np.int64)
    if not np.array_equal(slice_sizes, expected):
        raise InvariantViolation("slice size disagrees with its difference count")

    x_f = x_mat.astype(np.float64)
    m_f = m_mat.astype(np.float64)
    rows = max(1, _ROW_BUDGET // max(n, 1))
    chunks = [
        (lo, min(lo + rows, len(pq.p_items)))
        for lo in range(0, len(pq.p_items), rows)
    ]

    def thin_pairs(chunk: Tuple[int, int]) -> np.ndarray:
        lo, hi = chunk
        inner = m_f[lo:hi] @ x_f
        return (inner * m_f[lo:hi]).sum(axis=1)

    thin_counts = np.concatenate(chunked_map(thin_pairs, chunks, threads)).astype(np.int64)

    p_num, p_den = eps.numerator, eps.denominator
    best_t = None
    best_score = None
    best_m = -1
    for t in range(len(pq.p_items)):
        m_t = int(slice_sizes[t])
        score = p_num * m_t * m_t - 4 * p_den * int(thin_counts[t])
        if best_score is None or score > best_score or (
            score == best_score and m_t > best_m
        ):
            best_t = t
            best_score = score
            best_m = m_t
    d_star, r_star = pq.p_items[best_t]
    s_star = int(thin_counts[best_t])
    m_star = int(slice_sizes[best_t])

    if 4 * p_den * s_star > p_num * m_star * m_star:
        raise InvariantViolation("chosen slice has too many thin pairs")
    if m_star * m_star * n < e_val:
        raise InvariantViolation("chosen difference is not popular")

    star_rows = np.flatnonzero(m_mat[best_t])
    x_star_mat = x_mat[np.ix_(star_rows, star_rows)]
    thin_partners = x_star_mat.sum(axis=1, dtype=np.int64)
    keep = 4 * thin_partners <= m_star
    prime_rows = star_rows[keep]
    if Fraction(len(prime_rows)) < (1 - eps) * m_star:
        raise InvariantViolation("filtered slice below its guaranteed size")

    a_star = AdditiveSet(
        a_set.spec, tuple(a_set.elements[i] for i in star_rows)
    )
    a_prime = AdditiveSet(
        a_set.spec, tuple(a_set.elements[i] for i in prime_rows)
    )
    witness = PWitness(
        d_star=d_star,
        a_star=a_star,
        thin_threshold=thin_floor,
        thin_pairs_in_a_star=s_star,
    )
    return _finish_report(a_set, pq, eps, run_both, "P", witness, a_prime, threads)


def extract_q(
    a_set: AdditiveSet, pq: PartitionPQ, eps: Fraction, threads: int = 1,
    run_both: bool = False,
) -> ExtractionReport:
    """Unpopular branch: weight selection, then the 3-step path filter.

    The unpopular differences d_1 < d_2 < ... carry weights
    x_i = r(d_i) * sqrt(n / E), each below 1 by unpopularity.  A prefix
    selection with alpha = 1 - eps / 4 picks Q'; the relation
    {(a, b) : a - b in Q'} has density delta >= (1 - eps/2) * K^(-1/2),
    and the path filter with xi = eps / 2 yields A'.
    """
    eps = Fraction(eps)
    n = len(a_set)
    e_val = pq.energy
    k_val = Fraction(n**3, e_val)
    if Fraction(pq.q_mass) < (1 - eps / 4) * e_val:
        raise ValueError("unpopular branch requires q_mass >= (1 - eps/4) * E")

    q_counts = pq.q_counts()
    if not q_counts:
        raise ValueError("unpopular side is empty")
    weights = WeightVector(rho=Fraction(n, e_val), coeffs=tuple(q_counts))
    selection = select_index_set(weights, 1 - eps / 4)
    q_prime_elems = pq.q_elements_at(selection.index_set)
    q_prime = AdditiveSet(a_set.spec, q_prime_elems)

    relation = Relation.from_difference_set(a_set, q_prime_elems)
    selected_mass = sum(q_counts[i] for i in selection.index_set)
    if relation.size != selected_mass:
        raise InvariantViolation("relation size disagrees with selected counts")
    delta = relation.delta

    if delta * delta < (1 - eps / 2) ** 2 * Fraction(e_val, n**3):
        raise InvariantViolation("relation density below its guaranteed floor")
    chosen = selection.chosen_i
    if Fraction(chosen**4) > 2**21 * eps**-5 * k_val**4 * delta**6 * n**4:
        raise InvariantViolation("selected prefix too long for the path bound")

    tv = extract_tv(relation, eps / 2, threads=threads)
    witness = QWitness(selection=selection, q_prime=q_prime, delta=delta, tv=tv)
    return _finish_report(
        a_set, pq, eps, run_both, "Q", witness, tv.a_prime, threads
    )


def extract(a_set: AdditiveSet, params: Params, threads: int = 1) -> ExtractionReport:
    """Full pipeline: partition, choose a branch, extract, certify."""
    pq = partition_pq(a_set, threads=threads)
    eps = params.eps
    e_val = pq.energy
    p_holds = 4 * pq.p_mass >= eps * e_val
    q_holds = Fraction(pq.q_mass) >= (1 - eps / 4) * e_val
    if params.run_both and p_holds and q_holds:
        report_p = extract_p(a_set, pq, eps, threads, run_both=True)
        report_q = extract_q(a_set, pq, eps, threads, run_both=True)
        ratio_p = Fraction(report_p.diff_size, report_p.a_prime_size)
        ratio_q = Fraction(report_q.diff_size, report_q.a_prime_size)
        if ratio_p != ratio_q:
            return report_p if ratio_p < ratio_q else report_q
        if report_p.a_prime_size != report_q.a_prime_size:
            return (
                report_p
                if report_p.a_prime_size > report_q.a_prime_size
                else report_q
            )
        return report_p
    if p_holds:
        return extract_p(a_set, pq, eps, threads, run_both=params.run_both)
    return extract_q(a_set, pq, eps, threads, run_both=params.run_both)
