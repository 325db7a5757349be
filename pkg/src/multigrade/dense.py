"""Constructive density algorithms over positive real sequences.

Any positive sequence E with lim E = 0 and divergent sum admits subset sums
reaching every nonnegative target (greedy construction), and r + E admits
finite signed sums dense in the reals (shift-cancelling construction).
Block versions expand those selections into signed sums of ln k, of k**delta
and of p**delta over distinct integers/primes.

All real arithmetic honors a stated error budget: algorithms stop at 90% of
the requested tolerance, leaving 10% for round-off, and the working bit
width is chosen so the cumulative rounding stays inside that slice (plain
floats already satisfy the budget at desk scale; tighter tolerances switch
the loops to mpmath).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError, ResourceLimitError
from .numerics import PRIMES, balanced_product, working_bits
from .pseq import DEFAULT_MAX_INDEX, p_sequence

# fraction of the tolerance granted to the algorithm; the rest absorbs rounding
_ALGO_SHARE = 0.9
_DEFAULT_SCAN_CAP = 10_000_000


# ---------------------------------------------------------------------------
# selections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """One selected value: ``sign * value`` enters the running sum."""

    index: int
    sign: int
    value: float | mpmath.mpf


@dataclass(frozen=True)
class Selection:
    """A finite signed selection witnessing an approximation.

    ``achieved`` is the recomputed signed sum of the terms and ``residual``
    is ``target - achieved`` (signed).
    """

    sequence: str
    params: Mapping
    target: float
    eps: float
    terms: tuple[Term, ...]
    achieved: float | mpmath.mpf
    residual: float | mpmath.mpf

    def indices(self) -> tuple[int, ...]:
        return tuple(t.index for t in self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def _finish(sequence, params, target, eps, terms, use_mp) -> Selection:
    signed = [t.sign * t.value for t in terms]
    achieved = mpmath.fsum(signed) if use_mp else math.fsum(signed)
    return Selection(sequence, params, target, eps, tuple(terms), achieved, target - achieved)


# ---------------------------------------------------------------------------
# sequence specs
# ---------------------------------------------------------------------------

class SequenceSpec:
    """A positive real sequence E(n) for n >= first_index.

    ``value`` is the 53-bit evaluation used for scan decisions; ``value_hp``
    evaluates under the caller's mpmath precision.  ``first_at_most`` finds
    the earliest index at or after ``lo`` whose value does not exceed
    ``bound`` (monotone subclasses answer analytically, everything else
    scans forward under a cap).
    """

    name = "sequence"
    first_index = 0
    monotone = False

    def params(self) -> dict:
        return {}

    def value(self, n: int) -> float:
        raise NotImplementedError

    def value_hp(self, n: int) -> mpmath.mpf:
        return mpmath.mpf(self.value(n))

    def _jump_estimate(self, bound: float) -> int | None:
        return None

    def first_at_most(
        self, bound: float, lo: int, scan_cap: int = _DEFAULT_SCAN_CAP
    ) -> tuple[int, float] | None:
        if bound <= 0:
            return None
        n = max(lo, self.first_index)
        v = self.value(n)
        if v <= bound:
            return n, v
        if self.monotone:
            est = self._jump_estimate(bound)
            if est is not None and est > n:
                n = est
        for _ in range(scan_cap):
            v = self.value(n)
            if v <= bound:
                return n, v
            n += 1
        return None


class Harmonic(SequenceSpec):
    """E(n) = 1 / (n + 1), n >= 0."""

    name = "harmonic"
    first_index = 0
    monotone = True

    def value(self, n: int) -> float:
        return 1.0 / (n + 1)

    def value_hp(self, n: int) -> mpmath.mpf:
        return mpmath.mpf(1) / (n + 1)

    def _jump_estimate(self, bound: float) -> int:
        return max(self.first_index, math.ceil(1.0 / bound) - 1)


class LnBlock(SequenceSpec):
    """E(n) = ln(1 + 1/(2n)), n >= 1; the two-term splitting of ln."""

    name = "ln-block"
    first_index = 1
    monotone = True

    def value(self, n: int) -> float:
        return math.log1p(1.0 / (2 * n))

    def value_hp(self, n: int) -> mpmath.mpf:
        return mpmath.log(mpmath.mpf(2 * n + 1) / (2 * n))

    def _jump_estimate(self, bound: float) -> int:
        grow = math.expm1(bound)
        if grow <= 0:
            return self.first_index
        return max(self.first_index, math.ceil(0.5 / grow))


class PowerDelta(SequenceSpec):
    """Telescoped power differences: E(n) = sum_i a_i (n - i)**delta.

    The signs a_i come from sequence number ceil(delta), so the first
    ceil(delta) terms of the binomial expansion cancel and E(n) behaves like
    C * n**(delta - m) with C = binom(delta, m) * |sum a_i i**m| > 0.
    Requires delta > 0 and non-integer; defined for n > k, positive for all
    n past an empirically located threshold.
    """

    name = "power-delta"

    def __init__(self, delta: float, max_index: int = DEFAULT_MAX_INDEX):
        delta = float(delta)
        if delta <= 0 or delta.is_integer():
            raise DomainError("telescoped powers need a positive non-integer exponent")
        self.delta = delta
        self.m = math.ceil(delta)
        self.entries = p_sequence(self.m, max_index).entries
        self.k = len(self.entries) - 1
        self.first_index = self.k + 1
        top = sum(a * i**self.m for i, a in enumerate(self.entries))
        self.lead = _real_binom(delta, self.m) * abs(top)

    def params(self) -> dict:
        return {"delta": self.delta}

    def leading_term(self, n: int) -> float:
        return self.lead * float(n) ** (self.delta - self.m)

    def value(self, n: int) -> float:
        self._check(n)
        return math.fsum(a * float(n - i) ** self.delta for i, a in enumerate(self.entries) if a)

    def value_hp(self, n: int) -> mpmath.mpf:
        self._check(n)
        return mpmath.fsum(
            a * mpmath.power(n - i, self.delta) for i, a in enumerate(self.entries) if a
        )

    def _check(self, n: int) -> None:
        if n <= self.k:
            raise DomainError(f"telescoped value needs n > {self.k}")

    def _jump_estimate(self, bound: float) -> int:
        if bound >= self.lead:
            return self.first_index
        est = (bound / self.lead) ** (1.0 / (self.delta - self.m))
        return max(self.first_index, math.ceil(est))


class TotientLog(SequenceSpec):
    """E(n) = -ln(1 - 1/p_n) over the ascending primes, n >= 1."""

    name = "totient-log"
    first_index = 1
    monotone = True

    def value(self, n: int) -> float:
        return -math.log1p(-1.0 / PRIMES.nth(n))

    def value_hp(self, n: int) -> mpmath.mpf:
        p = PRIMES.nth(n)
        return mpmath.log(mpmath.mpf(p) / (p - 1))

    def prefix_sum(self, count: int) -> float:
        """Float sum of the first ``count`` values (used for feasibility)."""
        PRIMES.ensure_count(count)
        arr = PRIMES.slice(1, count).astype(np.float64)
        return float(-np.log1p(-1.0 / arr).sum())

    def first_at_most(self, bound, lo, scan_cap=_DEFAULT_SCAN_CAP):
        if bound <= 0:
            return None
        lo = max(lo, self.first_index)
        if self.value(lo) <= bound:
            return lo, self.value(lo)
        # -ln(1 - 1/p) <= b  iff  p >= 1 / (1 - e^-b)
        threshold = 1.0 / -math.expm1(-bound)
        try:
            idx = max(lo, PRIMES.first_index_of_prime_ge(threshold))
        except ResourceLimitError:
            return None
        for _ in range(64):
            v = self.value(idx)
            if v <= bound:
                return idx, v
            idx += 1
        return None


class PrimePower(SequenceSpec):
    """E(n) = p_{n+1}**delta - p_n**delta for delta in (0, 1/2], n >= 1."""

    name = "prime-power"
    first_index = 1

    def __init__(self, delta: float):
        delta = float(delta)
        if not 0 < delta <= 0.5:
            raise DomainError("prime power differences need delta in (0, 1/2]")
        self.delta = delta

    def params(self) -> dict:
        return {"delta": self.delta}

    def value(self, n: int) -> float:
        p, q = PRIMES.nth(n), PRIMES.nth(n + 1)
        return float(q) ** self.delta - float(p) ** self.delta

    def value_hp(self, n: int) -> mpmath.mpf:
        p, q = PRIMES.nth(n), PRIMES.nth(n + 1)
        return mpmath.power(q, self.delta) - mpmath.power(p, self.delta)


class ShiftedConstant(SequenceSpec):
    """E'(n) = r + E(n) over a base sequence (the shifted family)."""

    name = "shifted"

    def __init__(self, r: float, base: SequenceSpec):
        if r < 0:
            raise DomainError("shift must be nonnegative")
        self.r = float(r)
        self.base = base
        self.first_index = base.first_index
        self.monotone = base.monotone

    def params(self) -> dict:
        return {"r": self.r, "base": self.base.name, "base_params": self.base.params()}

    def value(self, n: int) -> float:
        return self.r + self.base.value(n)

    def value_hp(self, n: int) -> mpmath.mpf:
        return self.r + self.base.value_hp(n)


def _real_binom(x: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= (x - i) / (i + 1)
    return out


def eval_sequence(spec: SequenceSpec, n: int, bits: int = 53):
    """E(n) for the given spec; mpmath result when bits > 53."""
    if n < spec.first_index:
        raise DomainError(
            f"{spec.name} starts at index {spec.first_index}, got {n}"
        )
    if bits <= 53:
        return spec.value(n)
    with mpmath.workprec(bits):
        return spec.value_hp(n)


# ---------------------------------------------------------------------------
# recomputation registry (independent of the values stored in a Selection)
# ---------------------------------------------------------------------------

def spec_from_name(name: str, params: Mapping | None = None) -> SequenceSpec:
    params = params or {}
    if name == "harmonic":
        return Harmonic()
    if name == "ln-block":
        return LnBlock()
    if name == "totient-log":
        return TotientLog()
    if name == "power-delta":
        return PowerDelta(params["delta"])
    if name == "prime-power":
        return PrimePower(params["delta"])
    if name == "shifted":
        base = spec_from_name(params["base"], params.get("base_params"))
        return ShiftedConstant(params["r"], base)
    raise DomainError(f"unknown sequence {name!r}")


def _term_value_hp(sequence: str, params: Mapping, index: int) -> mpmath.mpf:
    if sequence == "ln":
        return mpmath.ln(index)
    if sequence == "power":
        return mpmath.power(index, params["delta"])
    if sequence == "prime-power":
        return mpmath.power(index, params["delta"])
    return spec_from_name(sequence, params).value_hp(index)


def recompute_achieved(selection: Selection, bits: int) -> mpmath.mpf:
    """Re-derive the signed sum from term indices alone, at ``bits``."""
    with mpmath.workprec(bits):
        return mpmath.fsum(
            t.sign * _term_value_hp(selection.sequence, selection.params, t.index)
            for t in selection.terms
        )


def recomputed_residual(selection: Selection, bits: int = 120) -> float:
    """|target - achieved| recomputed independently at high precision."""
    with mpmath.workprec(bits):
        return float(abs(mpmath.mpf(selection.target) - recompute_achieved(selection, bits)))


# ---------------------------------------------------------------------------
# unsigned greedy subset sums
# ---------------------------------------------------------------------------

def greedy_subset(
    spec: SequenceSpec,
    c: float,
    eps: float,
    max_terms: int = 10**6,
    *,
    bits: int | None = None,
    scan_cap: int = _DEFAULT_SCAN_CAP,
) -> Selection:
    """Scan upward, taking E(n) whenever it fits under the target.

    Requires lim E = 0 and a divergent sum (the caller's responsibility;
    each spec documents whether it qualifies).  The running sum never
    exceeds ``c`` beyond a few ulps, and the search stops once the residual
    drops below the tolerance.  Monotone specs answer the "next index that
    fits" question analytically, which keeps deep scans cheap without
    changing which terms the upward scan would have selected.
    """
    c = float(c)
    if c < 0:
        raise DomainError("greedy subset sums need a nonnegative target")
    if eps <= 0:
        raise DomainError("tolerance must be positive")
    if max_terms < 1:
        raise DomainError("term budget must be positive")
    if bits is None:
        bits = working_bits(eps, max_terms, max(c, 1.0))
    use_mp = bits > 53
    eta = min(eps / 20.0, max(c, 1.0) * 2.0**-47)
    stop = _ALGO_SHARE * eps
    params = spec.params()

    def run():
        total = mpmath.mpf(0) if use_mp else 0.0
        terms: list[Term] = []
        n = spec.first_index
        while True:
            rho = c - total
            if rho < stop:
                break
            if len(terms) >= max_terms:
                raise ConvergenceError(
                    f"term budget {max_terms} exhausted with residual {float(rho):.3g}",
                    _finish(spec.name, params, c, eps, terms, use_mp),
                )
            found = spec.first_at_most(float(rho) + eta, n, scan_cap)
            if found is None:
                raise ConvergenceError(
                    f"no reachable term fits under residual {float(rho):.3g}",
                    _finish(spec.name, params, c, eps, terms, use_mp),
                )
            idx, v = found
            value = spec.value_hp(idx) if use_mp else v
            terms.append(Term(idx, 1, value))
            total = total + value
            n = idx + 1
        return _finish(spec.name, params, c, eps, terms, use_mp)

    if use_mp:
        with mpmath.workprec(bits):
            return run()
    return run()


# ---------------------------------------------------------------------------
# signed approximation of r + E (shift-cancelling construction)
# ---------------------------------------------------------------------------

def signed_approx(
    spec: SequenceSpec,
    r: float,
    c: float,
    eps: float,
    max_terms: int = 10**5,
    *,
    bits: int | None = None,
    scan_cap: int = _DEFAULT_SCAN_CAP,
) -> Selection:
    """Signed selection over r + E within eps of the target.

    Needs lim E = 0 and a divergent sum for the base sequence E; r >= 0.
    Construction: find a start n with E < eps/2, extend a positive run
    n..m+1 until its E-sum first exceeds |c| (overshoot q <= E(m+1) < eps/2),
    then cancel the l = m - n + 2 shift contributions with l negative terms
    taken from a tail where E < q / (2l).  The result lands in
    (|c|, |c| + q), and signs are flipped when c < 0.  Note the constant
    sequence (zero base) fails the preconditions: its signed sums are the
    integers, which is why the shift alone cannot reach fractional targets.
    """
    r = float(r)
    c = float(c)
    if r < 0:
        raise DomainError("shift must be nonnegative")
    if eps <= 0:
        raise DomainError("tolerance must be positive")
    name = "shifted"
    params = {"r": r, "base": spec.name, "base_params": spec.params()}
    if c == 0:
        return Selection(name, params, c, eps, (), 0.0, 0.0)
    if bits is None:
        bits = working_bits(eps, max_terms, max(abs(c), r, 1.0))
    use_mp = bits > 53
    c0 = abs(c)
    half = eps / 2.0

    def run():
        ev = (lambda i: spec.value_hp(i)) if use_mp else spec.value
        found = spec.first_at_most(half, spec.first_index, scan_cap)
        if found is None:
            raise ConvergenceError("could not reach the small-term regime", None)
        start = found[0]
        for _restart in range(1000):
            run_indices: list[int] = []
            run_values = []
            total = mpmath.mpf(0) if use_mp else 0.0
            i = start
            restart_at = None
            while total <= c0:
                v = ev(i)
                if float(v) >= half:
                    restart_at = i + 1  # non-monotone tail; relocate the run
                    break
                run_indices.append(i)
                run_values.append(v)
                total = total + v
                if 2 * len(run_indices) > max_terms:
                    raise ConvergenceError(
                        f"positive run would exceed the {max_terms}-term budget",
                        _partial(run_indices, run_values),
                    )
                i += 1
            if restart_at is None:
                break
            found = spec.first_at_most(half, restart_at, scan_cap)
            if found is None:
                raise ConvergenceError("could not reach the small-term regime", None)
            start = found[0]
        else:
            raise ConvergenceError("sequence never settled below eps/2", None)

        length = len(run_indices)
        overshoot = total - c0  # in (0, eps/2): bounded by the last value taken
        bound = float(overshoot) / (2.0 * length)
        tail_indices: list[int] = []
        tail_values = []
        j = run_indices[-1] + 1
        while len(tail_indices) < length:
            found = spec.first_at_most(bound * (1.0 - 1e-12), j, scan_cap)
            if found is None:
                raise ConvergenceError(
                    "tail terms below the cancellation bound are out of reach",
                    _partial(run_indices, run_values),
                )
            idx, v = found
            tail_indices.append(idx)
            tail_values.append(spec.value_hp(idx) if use_mp else v)
            j = idx + 1

        sign = -1 if c < 0 else 1
        terms = [Term(i, sign, r + v) for i, v in zip(run_indices, run_values)]
        terms += [Term(i, -sign, r + v) for i, v in zip(tail_indices, tail_values)]
        return _finish(name, params, c, eps, terms, use_mp)

    def _partial(idx, vals):
        terms = [Term(i, 1, r + v) for i, v in zip(idx, vals)]
        return _finish(name, params, c, eps, terms, use_mp)

    if use_mp:
        with mpmath.workprec(bits):
            return run()
    return run()


# ---------------------------------------------------------------------------
# signed greedy over positive blocks (take whatever fits the residual)
# ---------------------------------------------------------------------------

class _BlockSeq:
    """Minimal protocol: first_index, first_at_most(bound, lo) -> (t, v)."""

    first_index = 1

    def first_at_most(self, bound: float, lo: int):
        raise NotImplementedError


def _take_greedy(blocks, c, eps, max_terms, finisher):
    """Forward greedy: take block values that fit under |residual|.

    Residuals never change sign (a taken value never exceeds the residual,
    up to a tie slack), so for positive targets the block signs are all +1;
    the mixing of signs happens inside each block's expansion.
    """
    takes: list[tuple[int, int]] = []
    values = []
    rho = c
    t = blocks.first_index
    stop = _ALGO_SHARE * eps
    eta = min(eps / 20.0, max(abs(c), 1.0) * 2.0**-45)
    while abs(rho) >= stop:
        if len(takes) >= max_terms:
            raise ConvergenceError(
                f"block budget {max_terms} exhausted with residual {float(rho):.3g}",
                finisher(takes, values),
            )
        found = blocks.first_at_most(abs(float(rho)) + eta, t)
        if found is None:
            raise ConvergenceError(
                f"no block value fits under residual {float(rho):.3g}",
                finisher(takes, values),
            )
        t, v = found
        sign = 1 if rho > 0 else -1
        takes.append((t, sign))
        values.append(v)
        rho = rho - sign * v
        t += 1
    return takes, values


class _DirectPowers(_BlockSeq):
    """n**delta for delta in [-1, 0): values are their own 'blocks'."""

    def __init__(self, delta: float):
        self.delta = delta

    def value(self, n: int) -> float:
        return float(n) ** self.delta

    def first_at_most(self, bound: float, lo: int):
        if bound <= 0:
            return None
        n = max(lo, 1)
        if self.value(n) <= bound:
            return n, self.value(n)
        n = max(n, math.ceil(bound ** (1.0 / self.delta)))
        for _ in range(64):
            v = self.value(n)
            if v <= bound:
                return n, v
            n += 1
        return None


class _PowerBlocks(_BlockSeq):
    """Groups of k+1 consecutive integers carrying the telescoping signs.

    Anchors step by k+1 so the groups are pairwise disjoint.  Values are
    evaluated in mpmath with enough bits to survive the cancellation of
    terms of size anchor**delta down to roughly C * anchor**(delta - m).
    """

    def __init__(self, delta: float, eps: float, max_index: int = DEFAULT_MAX_INDEX):
        self.spec = PowerDelta(delta, max_index)
        self.delta = delta
        self.stride = self.spec.k + 1
        self.eps_bits = max(0, math.ceil(-math.log2(eps)))
        self.first_index = self._positivity_start()

    def _bits_for(self, anchor: int) -> int:
        growth = max(0.0, self.delta * math.log2(max(anchor, 2)))
        return 40 + math.ceil(growth) + self.eps_bits

    def value(self, t: int) -> mpmath.mpf:
        anchor = self.stride * t
        with mpmath.workprec(self._bits_for(anchor)):
            return self.spec.value_hp(anchor)

    def expand(self, t: int, sign: int) -> list[Term]:
        anchor = self.stride * t
        bits = self._bits_for(anchor)
        out = []
        for i, a in enumerate(self.spec.entries):
            if a:
                j = anchor - i
                with mpmath.workprec(bits):
                    out.append(Term(j, sign * a, mpmath.power(j, self.delta)))
        return out

    def _positivity_start(self) -> int:
        # scan until the closed-form leading term dominates the remainder
        streak = 0
        for t in range(1, 100_000):
            v = float(self.value(t))
            lead = self.spec.leading_term(self.stride * t)
            if abs(v - lead) < 0.5 * lead:
                streak += 1
                if streak == 5:
                    return t - 4
            else:
                streak = 0
        raise ResourceLimitError("no ultimately-positive regime found; exponent bug")

    def first_at_most(self, bound: float, lo: int):
        if bound <= 0:
            return None
        t = max(lo, self.first_index)
        est = self.spec._jump_estimate(bound)
        if est is not None:
            t = max(t, -(-est // self.stride))
        for _ in range(100_000):
            v = self.value(t)
            if 0 < v <= bound:
                return t, v
            t += 1
        return None


class _PrimePairBlocks(_BlockSeq):
    """Disjoint consecutive-prime pairs: block t spans primes 2t-1 and 2t."""

    _CHUNK = 1 << 15

    def __init__(self, delta: float):
        self.delta = delta

    def value(self, t: int) -> float:
        lo, hi = PRIMES.nth(2 * t - 1), PRIMES.nth(2 * t)
        return float(hi) ** self.delta - float(lo) ** self.delta

    def expand(self, t: int, sign: int) -> list[Term]:
        lo, hi = PRIMES.nth(2 * t - 1), PRIMES.nth(2 * t)
        return [
            Term(hi, sign, float(hi) ** self.delta),
            Term(lo, -sign, float(lo) ** self.delta),
        ]

    def first_at_most(self, bound: float, lo: int, scan_cap: int = _DEFAULT_SCAN_CAP):
        if bound <= 0:
            return None
        t = max(lo, 1)
        scanned = 0
        while scanned < scan_cap:
            try:
                PRIMES.ensure_count(2 * (t + self._CHUNK))
            except ResourceLimitError:
                return None
            arr = PRIMES.slice(2 * t - 1, 2 * (t + self._CHUNK)).astype(np.float64)
            vals = arr[1::2] ** self.delta - arr[0::2] ** self.delta
            hits = np.flatnonzero(vals <= bound)
            if hits.size:
                j = int(hits[0])
                return t + j, float(vals[j])
            t += self._CHUNK
            scanned += self._CHUNK
        return None


# ---------------------------------------------------------------------------
# public expansions
# ---------------------------------------------------------------------------

def ln_expand(c: float, eps: float, max_terms: int = 10**5, *, bits: int | None = None) -> Selection:
    """Signed sum of logarithms of distinct integers >= 2 within eps of c.

    Each selected block value ln(1 + 1/(2n)) splits exactly into
    +ln(2n+1) - ln(2n); the blocks {2n, 2n+1} are pairwise disjoint.
    """
    c = float(c)
    params: dict = {}
    if c == 0:
        return Selection("ln", params, c, eps, (), 0.0, 0.0)
    base = signed_approx(LnBlock(), 0.0, c, eps, max_terms, bits=bits)
    terms = []
    for t in base.terms:
        n = t.index
        terms.append(Term(2 * n + 1, t.sign, math.log(2 * n + 1)))
        terms.append(Term(2 * n, -t.sign, math.log(2 * n)))
    return _finish("ln", params, c, eps, terms, use_mp=False)


def expand_power_delta(
    delta: float,
    c: float,
    eps: float,
    max_terms: int = 10**5,
    *,
    bits: int | None = None,
) -> Selection:
    """Signed sum of j**delta over distinct positive integers within eps of c.

    Valid exactly when delta == -1 or delta > -1 and not an integer; for a
    nonnegative integer the signed sums stay inside the integers and for
    delta < -1 they stay bounded, so density fails and a domain error is
    raised.  Negative exponents run a direct signed greedy; positive ones
    work through disjoint telescoping blocks whose internal signs come from
    the ceil(delta)-th sign sequence.
    """
    delta = float(delta)
    if not (delta == -1.0 or (delta > -1.0 and not delta.is_integer())):
        raise DomainError(
            "signed sums of n**delta are dense exactly for delta = -1 or "
            f"non-integer delta > -1; got delta = {delta}"
        )
    if eps <= 0:
        raise DomainError("tolerance must be positive")
    c = float(c)
    params = {"delta": delta}
    if c == 0:
        return Selection("power", params, c, eps, (), 0.0, 0.0)

    if delta < 0:
        seq = _DirectPowers(delta)

        def finisher(takes, values):
            terms = [Term(t, s, v) for (t, s), v in zip(takes, values)]
            return _finish("power", params, c, eps, terms, use_mp=False)

        takes, values = _take_greedy(seq, c, eps, max_terms, finisher)
        return finisher(takes, values)

    blocks = _PowerBlocks(delta, eps)

    def finisher(takes, values):
        terms = [t for (tb, s) in takes for t in blocks.expand(tb, s)]
        return _finish("power", params, c, eps, terms, use_mp=True)

    if bits is None:
        bits = working_bits(eps, max_terms, max(abs(c), 1.0))
    with mpmath.workprec(max(bits, 64)):
        takes, values = _take_greedy(blocks, mpmath.mpf(c), eps, max_terms, finisher)
        return finisher(takes, values)


def prime_power_expand(
    delta: float,
    c: float,
    eps: float,
    max_terms: int = 10**5,
) -> Selection:
    """Signed sum of p**delta over distinct primes within eps of c.

    delta must lie in (0, 1/2].  Terms come from disjoint consecutive-prime
    pairs p_{2t-1} < p_{2t} contributing p_{2t}**delta - p_{2t-1}**delta;
    such differences are observed to shrink toward zero at desk scale, and
    the budget mechanism reports failure rather than assuming they always
    do.
    """
    delta = float(delta)
    if not 0 < delta <= 0.5:
        raise DomainError("prime power expansion needs delta in (0, 1/2]")
    if eps <= 0:
        raise DomainError("tolerance must be positive")
    c = float(c)
    params = {"delta": delta}
    if c == 0:
        return Selection("prime-power", params, c, eps, (), 0.0, 0.0)
    blocks = _PrimePairBlocks(delta)

    def finisher(takes, values):
        terms = [t for (tb, s) in takes for t in blocks.expand(tb, s)]
        return _finish("prime-power", params, c, eps, terms, use_mp=False)

    takes, values = _take_greedy(blocks, c, eps, max_terms, finisher)
    return finisher(takes, values)


# ---------------------------------------------------------------------------
# totient ratios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TotientResult:
    """A squarefree product of distinct primes approximating a totient ratio."""

    primes: tuple[int, ...]
    ratio: Fraction
    n: int | None  # product of the primes, withheld when above the bit cap
    selection: Selection

    @property
    def ratio_float(self) -> float:
        return self.ratio.numerator / self.ratio.denominator


def totient_approx(
    t: float | Fraction,
    eps: float,
    max_primes: int = 10**6,
    *,
    composite_bit_cap: int = 65536,
) -> TotientResult:
    """Distinct primes S with prod(1 - 1/p) within eps of t, 0 < t <= 1.

    Runs the greedy subset construction on -ln(1 - 1/p_n) against the
    target -ln t, then certifies the product exactly in rational
    arithmetic.  A target below the floor reachable with ``max_primes``
    primes fails fast with a convergence error.
    """
    target = Fraction(t)
    if not 0 < target <= 1:
        raise DomainError("totient ratio targets live in (0, 1]")
    if eps <= 0:
        raise DomainError("tolerance must be positive")
    empty = Selection("totient-log", {}, 0.0, eps, (), 0.0, 0.0)
    if target == 1:
        return TotientResult((), Fraction(1), 1, empty)
    tf = float(target)
    c = -math.log(tf)
    eps_log = math.log1p(eps / tf)

    spec = TotientLog()
    budget = min(max_primes, len(PRIMES) + 4_000_000)
    reachable = spec.prefix_sum(budget)
    if c - reachable >= _ALGO_SHARE * eps_log:
        floor = math.exp(-reachable)
        raise ConvergenceError(
            f"target ratio {tf:.6g} is below the floor {floor:.6g} reachable "
            f"with {budget} primes",
            None,
        )

    sel = greedy_subset(spec, c, eps_log, max_primes)
    primes = tuple(PRIMES.nth(term.index) for term in sel.terms)
    numer = balanced_product([p - 1 for p in primes])
    denom = balanced_product(primes)
    # exact comparison |numer/denom - target| < eps without building huge gcds
    eps_frac = Fraction(eps)
    lhs = abs(numer * target.denominator - target.numerator * denom) * eps_frac.denominator
    rhs = eps_frac.numerator * denom * target.denominator
    if lhs >= rhs:
        raise ConvergenceError(
            "greedy selection missed the exact-ratio tolerance", sel
        )
    ratio = Fraction(numer, denom)
    composite = denom if denom.bit_length() <= composite_bit_cap else None
    return TotientResult(primes, ratio, composite, sel)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _real_str(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return mpmath.nstr(x, 30)


def selection_record(selection: Selection, precision_bits: int = 53) -> dict:
    """JSON-ready record with reals carried as decimal strings."""
    return {
        "sequence": selection.sequence,
        "params": dict(selection.params),
        "target": repr(selection.target),
        "eps": repr(selection.eps),
        "precision_bits": precision_bits,
        "terms": [
            {"index": t.index, "sign": t.sign, "value": _real_str(t.value)}
            for t in selection.terms
        ],
        "achieved": _real_str(selection.achieved),
        "residual": _real_str(selection.residual),
    }
