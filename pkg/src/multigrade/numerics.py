"""Shared numeric substrate.

Exact integers and rationals come straight from the language (``int`` is
arbitrary precision, :class:`fractions.Fraction` keeps denominators positive
and reduced), so this module only adds the pieces the rest of the package
actually needs:

* a growable prime stream backed by a segmented Eratosthenes sieve,
* selectable-precision real evaluation (``ln``, real powers, products)
  accurate to within 2 units in the last place of the requested precision,
* the working-precision rule that turns a tolerance and an operation count
  into a bit width (round-off budget: one tenth of the tolerance).
"""

from __future__ import annotations

import math
import threading
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import DomainError, ResourceLimitError

#: Soft cap for the shared sieve; extending past it raises ResourceLimitError.
DEFAULT_SIEVE_LIMIT = 256_000_000

_GUARD_BITS = 10


# ---------------------------------------------------------------------------
# prime stream
# ---------------------------------------------------------------------------

def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


class PrimeStream:
    """Memoized ascending primes, gap-free over ``[2, high_water]``.

    Reads are lock-free (the prime array is replaced atomically); extension
    is serialized.  ``soft_limit`` bounds how far the sieve may ever grow.
    """

    _SEGMENT = 1 << 23

    def __init__(self, soft_limit: int = DEFAULT_SIEVE_LIMIT):
        self.soft_limit = int(soft_limit)
        self._lock = threading.RLock()
        self._primes = _simple_sieve(1 << 16)
        self._high_water = 1 << 16

    @property
    def high_water(self) -> int:
        return self._high_water

    def __len__(self) -> int:
        return len(self._primes)

    def extend_to(self, limit: int) -> None:
        """Grow the sieve so every prime <= limit is cached."""
        limit = int(limit)
        if limit <= self._high_water:
            return
        if limit > self.soft_limit:
            raise ResourceLimitError(
                f"sieve limit {limit} exceeds the configured cap {self.soft_limit}"
            )
        with self._lock:
            if limit <= self._high_water:
                return
            # initial sieve reaches 2**16, enough base primes for any limit
            # below the (2**32) square of that; the soft cap is far smaller.
            root = math.isqrt(limit)
            base = self._primes[self._primes <= root]
            chunks = [self._primes]
            lo = self._high_water + 1
            while lo <= limit:
                hi = min(lo + self._SEGMENT - 1, limit)
                flags = np.ones(hi - lo + 1, dtype=bool)
                for p in base:
                    p = int(p)
                    start = max(p * p, ((lo + p - 1) // p) * p)
                    if start <= hi:
                        flags[start - lo :: p] = False
                chunks.append((lo + np.flatnonzero(flags)).astype(np.int64))
                lo = hi + 1
            self._primes = np.concatenate(chunks)
            self._high_water = limit

    def ensure_count(self, n: int) -> None:
        """Make sure at least ``n`` primes are cached."""
        if n <= len(self._primes):
            return
        # p_n < n (ln n + ln ln n) for n >= 6
        bound = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 1
        self.extend_to(bound)
        while len(self._primes) < n:
            self.extend_to(min(self.soft_limit, self._high_water * 2))
            if self._high_water >= self.soft_limit and len(self._primes) < n:
                raise ResourceLimitError(f"cannot cache {n} primes under the sieve cap")

    def nth(self, n: int) -> int:
        """1-based: nth(1) == 2."""
        if n < 1:
            raise DomainError("prime index must be >= 1")
        self.ensure_count(n)
        return int(self._primes[n - 1])

    def slice(self, i: int, j: int) -> np.ndarray:
        """Primes with 1-based indices in [i, j], as an int64 array."""
        self.ensure_count(j)
        return self._primes[i - 1 : j]

    def upto(self, x: int) -> np.ndarray:
        self.extend_to(x)
        return self._primes[: int(np.searchsorted(self._primes, x, side="right"))]

    def first_index_of_prime_ge(self, x: float) -> int:
        """1-based index of the smallest prime >= x (Bertrand guarantees one)."""
        x = max(2, math.ceil(x))
        if x > self._high_water:
            self.extend_to(min(self.soft_limit, max(2 * x, self._high_water)))
            if x > self._high_water:
                raise ResourceLimitError(f"no sieved prime >= {x} under the cap")
        return int(np.searchsorted(self._primes, x, side="left")) + 1


#: Shared stream used throughout the package.
PRIMES = PrimeStream()


def nth_prime(n: int) -> int:
    """The n-th prime, 1-based (``nth_prime(1) == 2``)."""
    return PRIMES.nth(n)


# ---------------------------------------------------------------------------
# selectable-precision reals
# ---------------------------------------------------------------------------

def _round_to(value: mpmath.mpf, bits: int) -> mpmath.mpf:
    with mpmath.workprec(bits):
        return +value


def hp_ln(x, bits: int = 53) -> mpmath.mpf:
    """ln(x) at ``bits`` of precision, correct to within 2 ulp."""
    if x <= 0:
        raise DomainError("ln requires a positive argument")
    with mpmath.workprec(bits + _GUARD_BITS):
        y = mpmath.ln(mpmath.mpf(x))
    return _round_to(y, bits)


def hp_power(x, exponent, bits: int = 53) -> mpmath.mpf:
    """x**exponent at ``bits`` of precision, correct to within 2 ulp."""
    if x < 0 and not float(exponent).is_integer():
        raise DomainError("fractional power requires a nonnegative base")
    with mpmath.workprec(bits + _GUARD_BITS):
        y = mpmath.power(mpmath.mpf(x), exponent)
    return _round_to(y, bits)


def hp_product(factors: Iterable, bits: int = 53) -> mpmath.mpf:
    """Product of ``factors`` at ``bits`` of precision, within 2 ulp."""
    with mpmath.workprec(bits + _GUARD_BITS):
        y = mpmath.fprod(mpmath.mpf(f) for f in factors)
    return _round_to(y, bits)


def hp_eval(kind: str, args: Sequence, bits: int = 53) -> mpmath.mpf:
    """Dispatching front end: kind in {'ln', 'power', 'product'}."""
    if kind == "ln":
        (x,) = args
        return hp_ln(x, bits)
    if kind == "power":
        x, exponent = args
        return hp_power(x, exponent, bits)
    if kind == "product":
        return hp_product(args, bits)
    raise DomainError(f"unknown expression kind {kind!r}")


def ulp_distance(a, b, bits: int) -> float:
    """|a - b| measured in units of the last place of ``a`` at ``bits``."""
    a = mpmath.mpf(a)
    if a == 0:
        return 0.0 if b == 0 else math.inf
    exp = mpmath.mag(a) - bits
    return float(abs(mpmath.mpf(b) - a) / mpmath.ldexp(1, exp))


def working_bits(eps: float, ops: int = 1, scale: float = 1.0) -> int:
    """Bit width keeping cumulative round-off below eps/10.

    Sized for ``ops`` additions of magnitude ``scale``; 53 or less means
    ordinary float arithmetic already satisfies the budget.
    """
    if eps <= 0:
        raise DomainError("tolerance must be positive")
    need = 10.0 * max(ops, 1) * max(scale, 1.0) / eps
    return max(24, math.ceil(math.log2(need)) + 4)


# ---------------------------------------------------------------------------
# exact helpers
# ---------------------------------------------------------------------------

def balanced_product(values: Sequence[int]) -> int:
    """Product of integers by pairwise halving (fast for many big factors)."""
    items = [int(v) for v in values]
    if not items:
        return 1
    while len(items) > 1:
        nxt = [a * b for a, b in zip(items[::2], items[1::2])]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]
