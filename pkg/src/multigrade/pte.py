"""Prouhet-Tarry-Escott pair generation and exact certification.

A pair of disjoint equal-size integer sets (U, V) has degree n when the
power sums ``sum u**s`` and ``sum v**s`` agree for s = 0..n-1 and differ at
s = n.  Three generators produce such pairs from sign sequences:

* ``method_shift``     - read U/V off the signs of sequence n along the
                         arithmetic progression p*i + l,
* ``method_convolution`` - read U/V off the <1,0,1>-convolved sequence at
                         positions i + 1,
* ``method_difference``  - difference of consecutive odd/even index sets,
                         giving degree 2m + 1 pairs.

Every generator re-certifies its output by exact power sums before
returning; a failed certification is a bug, reported as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CertificationError, DomainError
from .pseq import DEFAULT_MAX_INDEX, index_sets, p_sequence, q_sequence


@dataclass(frozen=True)
class PowerSumRow:
    s: int
    sum_u: int
    sum_v: int

    @property
    def equal(self) -> bool:
        return self.sum_u == self.sum_v


@dataclass(frozen=True)
class VerificationReport:
    """Exact power sums for s = 0..s_max and the certified degree.

    ``certified_degree`` is the first exponent where the sums differ; None
    means no inequality was found, i.e. the degree is at least s_max + 1.
    """

    rows: tuple[PowerSumRow, ...]
    certified_degree: int | None

    @property
    def s_max(self) -> int:
        return self.rows[-1].s if self.rows else -1


@dataclass(frozen=True)
class PtePair:
    """A certified pair: power sums agree below ``degree``, differ at it."""

    u: tuple[int, ...]
    v: tuple[int, ...]
    degree: int
    method: str
    params: Mapping[str, int] = field(default_factory=dict)
    degree_raised: bool = False  # merged pairs only: cancellation pushed the degree up

    @property
    def size(self) -> int:
        return len(self.u)


def _as_sorted_set(values: Iterable[int], label: str) -> tuple[int, ...]:
    items = tuple(sorted(int(v) for v in values))
    if len(items) != len(set(items)):
        raise DomainError(f"{label} contains repeated elements")
    return items


def verify_pair(
    u: Iterable[int], v: Iterable[int], s_max: int
) -> VerificationReport:
    """Exact power sums of two candidate sets for s = 0..s_max."""
    us = _as_sorted_set(u, "U")
    vs = _as_sorted_set(v, "V")
    if not us or not vs:
        raise DomainError("both sets must be nonempty")
    if len(us) != len(vs):
        raise DomainError("sets must have equal cardinality")
    if set(us) & set(vs):
        raise DomainError("sets must be disjoint")
    if s_max < 0:
        raise DomainError("s_max must be nonnegative")
    rows = []
    certified: int | None = None
    for s in range(s_max + 1):
        row = PowerSumRow(s, sum(x**s for x in us), sum(x**s for x in vs))
        rows.append(row)
        if certified is None and not row.equal:
            certified = s
    return VerificationReport(tuple(rows), certified)


def _certified(
    u: Iterable[int],
    v: Iterable[int],
    degree: int,
    method: str,
    params: Mapping[str, int],
) -> PtePair:
    us = _as_sorted_set(u, "U")
    vs = _as_sorted_set(v, "V")
    report = verify_pair(us, vs, degree)
    if report.certified_degree != degree:
        raise CertificationError(
            f"{method} pair claimed degree {degree} but certified "
            f"{report.certified_degree}; generator bug"
        )
    return PtePair(us, vs, degree, method, dict(params))


def certified_pair(u: Iterable[int], v: Iterable[int]) -> PtePair:
    """Certify arbitrary candidate sets, measuring their degree exactly.

    The search is bounded by |U| + |V| exponents: two distinct disjoint
    point sets cannot share that many moments.
    """
    us = _as_sorted_set(u, "U")
    vs = _as_sorted_set(v, "V")
    report = verify_pair(us, vs, len(us) + len(vs))
    if report.certified_degree is None:
        raise CertificationError("moment bound violated; arithmetic bug")
    return PtePair(us, vs, report.certified_degree, "custom", {})


def method_shift(
    n: int, p: int, l: int, max_index: int = DEFAULT_MAX_INDEX
) -> PtePair:
    """Degree-n pair along p*i + l: U from the -1 signs, V from the +1 signs."""
    if n < 2:
        raise DomainError("shift pairs need sequence index n >= 2")
    if p == 0:
        raise DomainError("step p must be nonzero")
    seq = p_sequence(n, max_index)
    u = (p * i + l for i in seq.positions(-1))
    v = (p * i + l for i in seq.positions(1))
    return _certified(u, v, n, "shift", {"n": n, "p": p, "l": l})


def method_convolution(n: int, max_index: int = DEFAULT_MAX_INDEX) -> PtePair:
    """Degree-n pair from the convolved sequence: U at the +1s, V at the -1s,
    both shifted by one."""
    q = q_sequence(n, max_index)
    u = (i + 1 for i in q.positions(1))
    v = (i + 1 for i in q.positions(-1))
    return _certified(u, v, n, "convolution", {"n": n})


def method_difference(m: int, max_index: int = DEFAULT_MAX_INDEX) -> PtePair:
    """Degree 2m+1 pair from index-set differences of sequences 2m+1, 2m+2."""
    if m < 1:
        raise DomainError("difference pairs need m >= 1")
    small = index_sets(2 * m + 1, max_index)
    large = index_sets(2 * m + 2, max_index)
    if not (small.x <= large.x and small.y <= large.y):
        raise CertificationError("index sets of consecutive sequences failed to nest")
    return _certified(
        large.x - small.x, large.y - small.y, 2 * m + 1, "difference", {"m": m}
    )


def merge_pairs(pairs: Sequence[PtePair]) -> PtePair:
    """Union of same-degree pairs over pairwise disjoint supports.

    The union keeps the shared degree unless the leading power sums cancel;
    in that rare case the certified degree is raised and flagged.
    """
    if not pairs:
        raise DomainError("nothing to merge")
    if len(pairs) == 1:
        return pairs[0]
    degree = pairs[0].degree
    if any(pair.degree != degree for pair in pairs):
        raise DomainError("merge requires pairs of one common degree")
    all_members: list[int] = []
    for pair in pairs:
        all_members.extend(pair.u)
        all_members.extend(pair.v)
    if len(set(all_members)) != len(all_members):
        raise DomainError("merge requires pairwise disjoint supports")
    u = tuple(sorted(x for pair in pairs for x in pair.u))
    v = tuple(sorted(x for pair in pairs for x in pair.v))
    report = verify_pair(u, v, degree)
    if report.certified_degree == degree:
        return PtePair(u, v, degree, "merged", {"count": len(pairs), "n": degree})
    # cancellation at the top exponent; measure the true degree
    deep = verify_pair(u, v, len(u) + len(v))
    if deep.certified_degree is None:
        raise CertificationError("moment bound violated in merge; arithmetic bug")
    return PtePair(
        u,
        v,
        deep.certified_degree,
        "merged",
        {"count": len(pairs), "n": degree},
        degree_raised=True,
    )


def pair_record(pair: PtePair, s_max: int | None = None) -> dict:
    """JSON-ready record; power sums carried as decimal strings."""
    bound = pair.degree + 1 if s_max is None else s_max
    report = verify_pair(pair.u, pair.v, bound)
    return {
        "method": pair.method,
        "params": dict(pair.params),
        "U": list(pair.u),
        "V": list(pair.v),
        "certified_degree": report.certified_degree,
        "degree_raised": pair.degree_raised,
        "power_sums": [
            {"s": row.s, "sumU": str(row.sum_u), "sumV": str(row.sum_v)}
            for row in report.rows
        ],
    }


def affine_image(pair: PtePair, p: int, l: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Apply x -> p*x + l to both sets (p != 0 keeps elements distinct)."""
    if p == 0:
        raise DomainError("affine map must be invertible (p != 0)")
    return (
        tuple(sorted(p * x + l for x in pair.u)),
        tuple(sorted(p * x + l for x in pair.v)),
    )
