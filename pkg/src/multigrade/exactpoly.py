"""Exact polynomial expansion of signed shifted-power sums.

For the n-th sign sequence ``<a_0, ..., a_k>`` and an exponent s >= 0 the
sum ``sum_i a_i (i + x)**s`` is a polynomial in x with integer coefficients.
It vanishes identically for s < n, and for s >= n has degree exactly s - n;
at s == n it is a nonzero constant whose sign is (-1)**n.  Everything here
is integer arithmetic with the convention 0**0 == 1; there are no
tolerances anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, ResourceLimitError
from .pseq import DEFAULT_MAX_INDEX, PSequence, p_sequence

#: Resource guard for the exponent in polynomial expansions.
DEFAULT_MAX_EXPONENT = 200


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial; ``coeffs[j]`` multiplies x**j.

    Trailing zeros are trimmed; the zero polynomial is the empty tuple and
    reports ``degree is None`` rather than a numeric sentinel.
    """

    coeffs: tuple[int, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "IntPolynomial":
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def constant_value(self) -> int:
        """Value of a constant (degree <= 0) polynomial."""
        if self.is_zero:
            return 0
        if len(self.coeffs) > 1:
            raise DomainError("polynomial is not constant")
        return self.coeffs[0]

    def evaluate(self, x) -> int | Fraction:
        """Exact Horner evaluation at an integer or Fraction point."""
        acc: int | Fraction = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial.from_coeffs(
            j * c for j, c in enumerate(self.coeffs) if j >= 1
        )

    def __call__(self, x):
        return self.evaluate(x)


def _int_pow(base: int, exp: int) -> int:
    # 0**0 == 1 is Python's native behaviour, kept deliberately
    return base**exp


def _power_sums(entries: Sequence[int], e_max: int) -> list[int]:
    """t[e] = sum_i a_i * i**e for e = 0..e_max (with 0**0 == 1)."""
    sums = [0] * (e_max + 1)
    for i, a in enumerate(entries):
        if a == 0:
            continue
        pw = 1
        for e in range(e_max + 1):
            sums[e] += a * pw
            pw *= i
    return sums


def f_polynomial(
    n: int,
    s: int,
    max_index: int = DEFAULT_MAX_INDEX,
    max_exponent: int = DEFAULT_MAX_EXPONENT,
) -> IntPolynomial:
    """Expand ``sum_i a_i (i + x)**s`` over sequence n into coefficients.

    The binomial theorem gives coefficient ``C(s, j) * sum_i a_i i**(s-j)``
    for x**j, all computed exactly.
    """
    if s < 0:
        raise DomainError("exponent must be nonnegative")
    if s > max_exponent:
        raise ResourceLimitError(f"exponent {s} exceeds the configured bound {max_exponent}")
    entries = p_sequence(n, max_index).entries
    sums = _power_sums(entries, s)
    return IntPolynomial.from_coeffs(
        math.comb(s, j) * sums[s - j] for j in range(s + 1)
    )


def power_sum(seq: PSequence | Sequence[int], s: int, p: int, l: int) -> int:
    """Exact value of ``sum_i a_i (p*i + l)**s`` (0**0 == 1, p != 0)."""
    if s < 0:
        raise DomainError("exponent must be nonnegative")
    if p == 0:
        raise DomainError("step p must be nonzero")
    entries = seq.entries if isinstance(seq, PSequence) else seq
    return sum(a * _int_pow(p * i + l, s) for i, a in enumerate(entries) if a)


@dataclass(frozen=True)
class VanishingReport:
    """Zero-polynomial checks for exponents 0..n-1 of sequence n."""

    n: int
    checks: tuple[tuple[int, bool], ...]  # (s, is_zero)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


@dataclass(frozen=True)
class DegreeRow:
    s: int
    expected_degree: int
    actual_degree: int | None

    @property
    def ok(self) -> bool:
        return self.actual_degree == self.expected_degree


@dataclass(frozen=True)
class DegreeReport:
    """Degree law and sign law checks for sequence n, exponents n..s_max."""

    n: int
    rows: tuple[DegreeRow, ...]
    constant_at_n: int  # value of the (constant) polynomial at s == n
    top_sum: int  # sum_i a_i i**n
    sign_ok: bool  # sgn(top_sum) == (-1)**n

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows) and self.constant_at_n != 0 and self.sign_ok


@dataclass(frozen=True)
class VerificationSuite:
    """Mergeable bundle of vanishing and degree reports."""

    vanishing: tuple[VanishingReport, ...] = ()
    degrees: tuple[DegreeReport, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.vanishing) and all(r.passed for r in self.degrees)

    def merge(self, other: "VerificationSuite") -> "VerificationSuite":
        return VerificationSuite(
            self.vanishing + other.vanishing, self.degrees + other.degrees
        )


def verify_vanishing(n: int, max_index: int = DEFAULT_MAX_INDEX) -> VanishingReport:
    """Check that the expansion is the zero polynomial for s = 0..n-1."""
    checks = tuple((s, f_polynomial(n, s, max_index).is_zero) for s in range(n))
    return VanishingReport(n, checks)


def verify_degree(
    n: int, s_max: int, max_index: int = DEFAULT_MAX_INDEX
) -> DegreeReport:
    """Check degree == s - n for s = n..s_max, plus the constant and sign laws."""
    if s_max < n:
        raise DomainError("s_max must be at least n")
    rows = tuple(
        DegreeRow(s, s - n, f_polynomial(n, s, max_index).degree)
        for s in range(n, s_max + 1)
    )
    constant = f_polynomial(n, n, max_index).constant_value
    top = power_sum(p_sequence(n, max_index), n, 1, 0)
    sign_ok = top != 0 and (top > 0) == (n % 2 == 0)
    return DegreeReport(n, rows, constant, top, sign_ok)


def verify_range(
    n_max: int, s_extra: int = 3, max_index: int = DEFAULT_MAX_INDEX
) -> VerificationSuite:
    """Run both verifications for n = 1..n_max; degree rows go up to n + s_extra."""
    suite = VerificationSuite()
    for n in range(1, n_max + 1):
        suite = suite.merge(
            VerificationSuite(
                (verify_vanishing(n, max_index),),
                (verify_degree(n, n + s_extra, max_index),),
            )
        )
    return suite
