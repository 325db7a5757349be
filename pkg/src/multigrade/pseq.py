"""Ternary sign sequences built by two reflection rules.

The family starts from ``<1, -1>`` and grows by whichever rule matches the
endpoints of the current sequence ``<a_0, ..., a_k>``:

* if ``a_0 == -a_k`` the sequence is followed by its own reversal
  (length doubles),
* if ``a_0 == a_k`` the last entry is replaced by ``0`` followed by the
  negated reversal of ``<a_0, ..., a_{k-1}>`` (length 2L - 1).

Exactly one rule ever applies because both endpoints stay in {+1, -1};
the generator asserts this instead of assuming a tie-break.  Lengths run
2, 4, 7, 14, 27, 54, 107, ...  The n-th sequence has equally many +1 and
-1 entries and its signed power sums vanish through exponent n - 1, which
is what the rest of the package exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import CertificationError, DomainError

#: Default cap on the sequence index; the length at 24 is about 1.4e7 trits.
DEFAULT_MAX_INDEX = 24


@dataclass(frozen=True)
class PSequence:
    """The n-th sign sequence; ``entries`` are trits in {-1, 0, +1}."""

    n: int
    entries: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def last_position(self) -> int:
        """Position of the final entry (the k in ``<a_0, ..., a_k>``)."""
        return len(self.entries) - 1

    def positions(self, sign: int, start: int = 0) -> tuple[int, ...]:
        """Indices i >= start with entries[i] == sign."""
        return tuple(i for i in range(start, len(self.entries)) if self.entries[i] == sign)


@dataclass(frozen=True)
class QSequence:
    """``<1, 0, 1>`` convolution of the n-th sign sequence (length k + 3)."""

    n: int
    entries: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def positions(self, sign: int, start: int = 0) -> tuple[int, ...]:
        return tuple(i for i in range(start, len(self.entries)) if self.entries[i] == sign)


@dataclass(frozen=True)
class IndexSets:
    """Positive positions of -1 entries (x) and +1 entries (y) in sequence n.

    Position 0 is excluded, so ``len(x) == len(y) + 1``.
    """

    n: int
    x: frozenset[int]
    y: frozenset[int]


@lru_cache(maxsize=None)
def _entries(n: int) -> tuple[int, ...]:
    if n == 1:
        return (1, -1)
    prev = _entries(n - 1)
    head, tail = prev[0], prev[-1]
    if head not in (1, -1) or tail not in (1, -1):
        raise CertificationError("sequence endpoints left {+1,-1}; generator bug")
    if head == -tail:
        return prev + prev[::-1]
    return prev[:-1] + (0,) + tuple(-a for a in prev[-2::-1])


def _check_index(n: int, max_index: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"sequence index must be a positive integer, got {n!r}")
    if n > max_index:
        raise DomainError(f"sequence index {n} exceeds the configured maximum {max_index}")


def p_sequence(n: int, max_index: int = DEFAULT_MAX_INDEX) -> PSequence:
    """The n-th sign sequence under the length ordering (n >= 1)."""
    _check_index(n, max_index)
    return PSequence(n, _entries(n))


def q_sequence(n: int, max_index: int = DEFAULT_MAX_INDEX) -> QSequence:
    """Convolve sequence n with ``<1, 0, 1>``: b_i = a_i + a_{i-2}.

    Out-of-range terms count as zero, so the result has length k + 3.
    Every entry stays a trit and the +1/-1 counts stay balanced for n >= 2.
    """
    _check_index(n, max_index)
    if n < 2:
        raise DomainError("the convolution sequence is defined for n >= 2")
    a = _entries(n)
    k = len(a) - 1
    b = tuple(
        (a[i] if i <= k else 0) + (a[i - 2] if i >= 2 else 0) for i in range(k + 3)
    )
    if any(v not in (-1, 0, 1) for v in b):
        raise CertificationError("convolution produced a non-trit entry")
    if b.count(1) != b.count(-1):
        raise CertificationError("convolution unbalanced the sign counts")
    return QSequence(n, b)


def index_sets(n: int, max_index: int = DEFAULT_MAX_INDEX) -> IndexSets:
    """Positive positions of the -1 and +1 entries of sequence n."""
    _check_index(n, max_index)
    a = _entries(n)
    x = frozenset(i for i in range(1, len(a)) if a[i] == -1)
    y = frozenset(i for i in range(1, len(a)) if a[i] == 1)
    return IndexSets(n, x, y)
