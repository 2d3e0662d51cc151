"""Interval arithmetic with outward rounding on MPFR endpoints.

Every operation returns a two-endpoint enclosure [lo, hi] guaranteed to
contain the exact mathematical image of its input enclosures.  Endpoints
are gmpy2.mpfr values; lo is computed rounding toward -inf and hi toward
+inf, so the containment contract reduces to the correct rounding that
MPFR guarantees for +, -, *, /, sqrt, exp, log, cos, sin and atan.

Values are immutable and safe to share between processes (pickling uses
gmpy2's exact binary serialization).  The working precision is carried by
the endpoints themselves; binary operations compute at the larger operand
precision unless an explicit `prec` is given.  Domain violations raise
IntervalDomainError -- no operation silently produces NaN or an unbounded
enclosure.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import IntervalDomainError

DEFAULT_PRECISION = 256

_CTX: dict[tuple[int, object], gmpy2.context] = {}


def _dn(prec: int) -> gmpy2.context:
    key = (prec, "d")
    ctx = _CTX.get(key)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
        _CTX[key] = ctx
    return ctx


def _up(prec: int) -> gmpy2.context:
    key = (prec, "u")
    ctx = _CTX.get(key)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
        _CTX[key] = ctx
    return ctx


def _neg(x: mpfr) -> mpfr:
    """Exact negation (bare `-x` would round to the 53-bit thread context)."""
    return _dn(x.precision).minus(x)


def _absx(x: mpfr) -> mpfr:
    """Exact absolute value at the operand's own precision."""
    return _dn(x.precision).abs(x)


def _coerce_scalar(v):
    """Map a python scalar to something gmpy2 contexts accept exactly."""
    if isinstance(v, Fraction):
        return gmpy2.mpq(v)
    return v


class Interval:
    """A closed interval [lo, hi] of finite reals, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: mpfr, hi: mpfr):
        if not (gmpy2.is_finite(lo) and gmpy2.is_finite(hi)):
            raise IntervalDomainError(f"non-finite endpoint: [{lo}, {hi}]")
        if lo > hi:
            raise IntervalDomainError(f"inverted endpoints: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, *a):
        raise AttributeError("Interval is immutable")

    # -- introspection -----------------------------------------------------

    @property
    def precision(self) -> int:
        return max(self.lo.precision, self.hi.precision)

    def width(self) -> mpfr:
        return _up(self.precision).sub(self.hi, self.lo)

    def mid_float(self) -> float:
        return float(self.lo + (self.hi - self.lo) / 2)

    def mid_mpfr(self, prec: int | None = None) -> mpfr:
        p = prec or self.precision
        ctx = gmpy2.context(precision=p)
        return ctx.add(self.lo, ctx.div(ctx.sub(self.hi, self.lo), 2))

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, v) -> bool:
        """Whether the scalar v (int, Fraction, mpfr, float) lies in [lo, hi]."""
        v = _coerce_scalar(v)
        return self.lo <= v <= self.hi

    def is_subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def cache_key(self) -> bytes:
        return gmpy2.to_binary(self.lo) + b"|" + gmpy2.to_binary(self.hi)

    # -- python protocol ---------------------------------------------------

    def __reduce__(self):
        return (_interval_from_binary,
                (bytes(gmpy2.to_binary(self.lo)), bytes(gmpy2.to_binary(self.hi))))

    def __repr__(self):
        return f"[{self.lo!s}, {self.hi!s}]"

    def __eq__(self, other):
        return (isinstance(other, Interval)
                and self.lo == other.lo and self.hi == other.hi)

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __add__(self, other):
        return iv_add(self, to_interval(other))

    def __radd__(self, other):
        return iv_add(to_interval(other), self)

    def __sub__(self, other):
        return iv_sub(self, to_interval(other))

    def __rsub__(self, other):
        return iv_sub(to_interval(other), self)

    def __mul__(self, other):
        return iv_mul(self, to_interval(other))

    def __rmul__(self, other):
        return iv_mul(to_interval(other), self)

    def __truediv__(self, other):
        return iv_div(self, to_interval(other))

    def __rtruediv__(self, other):
        return iv_div(to_interval(other), self)

    def __neg__(self):
        return iv_neg(self)

    def __abs__(self):
        return iv_abs(self)


def _interval_from_binary(lo_blob: bytes, hi_blob: bytes) -> Interval:
    return Interval(gmpy2.from_binary(lo_blob), gmpy2.from_binary(hi_blob))


# -- construction ----------------------------------------------------------

def interval(value, prec: int | None = None) -> Interval:
    """Enclosure of a single value.

    Decimal strings and Fractions are outward-rounded at `prec` (default
    DEFAULT_PRECISION); ints and floats are exact binary values and are
    outward-rounded only if they do not fit.
    """
    if isinstance(value, Interval):
        return value if prec is None else round_to(value, prec)
    p = prec or DEFAULT_PRECISION
    v = _coerce_scalar(value)
    if isinstance(v, str):
        with _dn(p):
            lo = mpfr(v)
        with _up(p):
            hi = mpfr(v)
        return Interval(lo, hi)
    return Interval(_dn(p).add(v, mpfr(0)), _up(p).add(v, mpfr(0)))


def to_interval(value, prec: int | None = None) -> Interval:
    if isinstance(value, Interval):
        return value
    return interval(value, prec)


def from_endpoints(lo, hi, prec: int | None = None) -> Interval:
    """Enclosure [lo, hi] with each endpoint outward-rounded at `prec`."""
    p = prec or DEFAULT_PRECISION
    lo = _coerce_scalar(lo)
    hi = _coerce_scalar(hi)
    if isinstance(lo, str):
        with _dn(p):
            lo = mpfr(lo)
    if isinstance(hi, str):
        with _up(p):
            hi = mpfr(hi)
    return Interval(_dn(p).add(lo, mpfr(0)), _up(p).add(hi, mpfr(0)))


def round_to(x: Interval, prec: int) -> Interval:
    """Outward requantization of x at `prec` bits."""
    return Interval(_dn(prec).add(x.lo, mpfr(0)), _up(prec).add(x.hi, mpfr(0)))


ZERO = Interval(mpfr(0), mpfr(0))
ONE = Interval(mpfr(1), mpfr(1))
HALF = Interval(mpfr("0.5"), mpfr("0.5"))


def _result_prec(prec, *ops: Interval) -> int:
    if prec is not None:
        return prec
    return max(op.precision for op in ops)


# -- ring operations -------------------------------------------------------

def iv_add(a: Interval, b: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, a, b)
    return Interval(_dn(p).add(a.lo, b.lo), _up(p).add(a.hi, b.hi))


def iv_sub(a: Interval, b: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, a, b)
    return Interval(_dn(p).sub(a.lo, b.hi), _up(p).sub(a.hi, b.lo))


def iv_neg(a: Interval) -> Interval:
    return Interval(_neg(a.hi), _neg(a.lo))


def iv_abs(a: Interval) -> Interval:
    if a.lo >= 0:
        return a
    if a.hi <= 0:
        return iv_neg(a)
    return Interval(mpfr(0), max(_neg(a.lo), a.hi))


def iv_mul(a: Interval, b: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, a, b)
    dn, up = _dn(p), _up(p)
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if al >= 0:
        if bl >= 0:
            return Interval(dn.mul(al, bl), up.mul(ah, bh))
        if bh <= 0:
            return Interval(dn.mul(ah, bl), up.mul(al, bh))
        return Interval(dn.mul(ah, bl), up.mul(ah, bh))
    if ah <= 0:
        if bl >= 0:
            return Interval(dn.mul(al, bh), up.mul(ah, bl))
        if bh <= 0:
            return Interval(dn.mul(ah, bh), up.mul(al, bl))
        return Interval(dn.mul(al, bh), up.mul(al, bl))
    if bl >= 0:
        return Interval(dn.mul(al, bh), up.mul(ah, bh))
    if bh <= 0:
        return Interval(dn.mul(ah, bl), up.mul(al, bl))
    return Interval(min(dn.mul(al, bh), dn.mul(ah, bl)),
                    max(up.mul(al, bl), up.mul(ah, bh)))


def iv_sqr(a: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, a)
    dn, up = _dn(p), _up(p)
    if a.lo >= 0:
        return Interval(dn.mul(a.lo, a.lo), up.mul(a.hi, a.hi))
    if a.hi <= 0:
        return Interval(dn.mul(a.hi, a.hi), up.mul(a.lo, a.lo))
    m = max(_neg(a.lo), a.hi)
    return Interval(mpfr(0), up.mul(m, m))


def iv_div(a: Interval, b: Interval, prec: int | None = None) -> Interval:
    if b.lo <= 0 <= b.hi:
        raise IntervalDomainError(f"division by interval containing 0: {b}")
    p = _result_prec(prec, a, b)
    dn, up = _dn(p), _up(p)
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if bl > 0:
        if al >= 0:
            return Interval(dn.div(al, bh), up.div(ah, bl))
        if ah <= 0:
            return Interval(dn.div(al, bl), up.div(ah, bh))
        return Interval(dn.div(al, bl), up.div(ah, bl))
    if al >= 0:
        return Interval(dn.div(ah, bh), up.div(al, bl))
    if ah <= 0:
        return Interval(dn.div(ah, bl), up.div(al, bh))
    return Interval(dn.div(ah, bh), up.div(al, bh))


def iv_ring(a: Interval, b: Interval, op: str, prec: int | None = None) -> Interval:
    """Dispatch form of the four ring operations: op in {add, sub, mul, div}."""
    try:
        f = _RING_OPS[op]
    except KeyError:
        raise ValueError(f"unknown ring op {op!r}") from None
    return f(a, b, prec)


_RING_OPS = {"add": iv_add, "sub": iv_sub, "mul": iv_mul, "div": iv_div}


# -- elementary functions --------------------------------------------------

def iv_exp(x: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, x)
    return Interval(_dn(p).exp(x.lo), _up(p).exp(x.hi))


def iv_log(x: Interval, prec: int | None = None) -> Interval:
    if x.lo <= 0:
        raise IntervalDomainError(f"log of interval reaching 0: {x}")
    p = _result_prec(prec, x)
    return Interval(_dn(p).log(x.lo), _up(p).log(x.hi))


def iv_sqrt(x: Interval, prec: int | None = None) -> Interval:
    if x.lo < 0:
        raise IntervalDomainError(f"sqrt of interval below 0: {x}")
    p = _result_prec(prec, x)
    return Interval(_dn(p).sqrt(x.lo), _up(p).sqrt(x.hi))


def iv_atan(x: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, x)
    return Interval(_dn(p).atan(x.lo), _up(p).atan(x.hi))


_PI_CACHE: dict[int, Interval] = {}


def pi_interval(prec: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of pi, widened one ulp beyond the directed constants."""
    out = _PI_CACHE.get(prec)
    if out is None:
        out = Interval(gmpy2.next_below(_dn(prec).const_pi()),
                       gmpy2.next_above(_up(prec).const_pi()))
        _PI_CACHE[prec] = out
    return out


def two_pi_interval(prec: int = DEFAULT_PRECISION) -> Interval:
    pi = pi_interval(prec)
    return Interval(_dn(prec).mul(pi.lo, 2), _up(prec).mul(pi.hi, 2))


def half_pi_interval(prec: int = DEFAULT_PRECISION) -> Interval:
    pi = pi_interval(prec)
    return Interval(_dn(prec).div(pi.lo, 2), _up(prec).div(pi.hi, 2))


def _trig_multiples(x: Interval, p: int, offset: Fraction):
    """Integers n such that (n + offset) * pi possibly lies inside x,
    or None when the range is too wide to enumerate.

    Candidates come from a float estimate widened by 2 on each side; each
    one is then tested against the certified pi enclosure, and candidates
    that merely *might* fall inside are reported (the callers only use
    them to widen trig ranges, so over-reporting is sound).
    """
    flo, fhi = float(x.lo), float(x.hi)
    # the float guess locates candidates only for moderate arguments;
    # otherwise fall back to the full range (sound: [-1, 1] clamp)
    if (not (_isfinite(flo) and _isfinite(fhi)) or fhi - flo >= 25.0
            or max(abs(flo), abs(fhi)) > 1e9):
        return None
    off = float(offset)
    inv_pi = 0.3183098861837907
    # the float bracket overshoots the true integer range by at most the
    # edge entries (error ~1e-7 against the 1e-5 slack at |x| <= 1e9)
    n_min = math.floor(flo * inv_pi - off - 1e-5)
    n_max = math.floor(fhi * inv_pi - off + 1e-5)
    if n_min > n_max:
        return (1, 0)  # empty range
    pq = max(p, 64)
    pi = pi_interval(pq)
    dn, up = _dn(pq), _up(pq)

    def possibly_inside(n: int) -> bool:
        q = 2 * n + (1 if offset else 0)
        if q >= 0:
            m_lo = dn.div(dn.mul(pi.lo, q), 2)
            m_hi = up.div(up.mul(pi.hi, q), 2)
        else:
            m_lo = dn.div(dn.mul(pi.hi, q), 2)
            m_hi = up.div(up.mul(pi.lo, q), 2)
        return m_hi >= x.lo and m_lo <= x.hi

    # shrink spurious edges (certified); middle candidates are genuine
    if not possibly_inside(n_min):
        n_min += 1
    if n_max >= n_min and not possibly_inside(n_max):
        n_max -= 1
    return (n_min, n_max)


def _isfinite(v: float) -> bool:
    return v == v and v not in (float("inf"), float("-inf"))


def iv_cos(x: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, x)
    rng = _trig_multiples(x, p, Fraction(0))
    if rng is None:
        return Interval(mpfr(-1), mpfr(1))
    dn, up = _dn(p), _up(p)
    if x.lo == x.hi:
        lo, hi = dn.cos(x.lo), up.cos(x.lo)
    else:
        lo = min(dn.cos(x.lo), dn.cos(x.hi))
        hi = max(up.cos(x.lo), up.cos(x.hi))
    for n in range(rng[0], rng[1] + 1):
        if n % 2 == 0:
            hi = mpfr(1)
        else:
            lo = mpfr(-1)
    return Interval(max(lo, mpfr(-1)), min(hi, mpfr(1)))


def iv_sin(x: Interval, prec: int | None = None) -> Interval:
    p = _result_prec(prec, x)
    rng = _trig_multiples(x, p, Fraction(1, 2))
    if rng is None:
        return Interval(mpfr(-1), mpfr(1))
    dn, up = _dn(p), _up(p)
    if x.lo == x.hi:
        lo, hi = dn.sin(x.lo), up.sin(x.lo)
    else:
        lo = min(dn.sin(x.lo), dn.sin(x.hi))
        hi = max(up.sin(x.lo), up.sin(x.hi))
    for n in range(rng[0], rng[1] + 1):
        if n % 2 == 0:
            hi = mpfr(1)
        else:
            lo = mpfr(-1)
    return Interval(max(lo, mpfr(-1)), min(hi, mpfr(1)))


def iv_elementary(x: Interval, fn: str, prec: int | None = None) -> Interval:
    """Dispatch form: fn in {exp, log, cos, sin, sqrt, abs, neg, atan}."""
    try:
        f = _ELEMENTARY[fn]
    except KeyError:
        raise ValueError(f"unknown elementary fn {fn!r}") from None
    if fn in ("abs", "neg"):
        return f(x)
    return f(x, prec)


_ELEMENTARY = {
    "exp": iv_exp, "log": iv_log, "cos": iv_cos, "sin": iv_sin,
    "sqrt": iv_sqrt, "abs": iv_abs, "neg": iv_neg, "atan": iv_atan,
}


# -- distance to the nearest integer ---------------------------------------

def _nearest_int(t: mpfr) -> int:
    return int(gmpy2.context(precision=max(t.precision, 64)).rint(t))


def _fold_point(t: mpfr, p: int):
    """Enclosure endpoints of |t - nearest_int(t)| for a point t."""
    n = _nearest_int(t)
    lo = _dn(p).sub(t, n)
    hi = _up(p).sub(t, n)
    if lo <= 0 <= hi:
        return mpfr(0), max(_absx(lo), _absx(hi))
    return min(_absx(lo), _absx(hi)), max(_absx(lo), _absx(hi))


def nearest_int_distance(x: Interval, prec: int | None = None) -> Interval:
    """Enclosure of { dist(t, Z) : t in x }, a subset of [0, 1/2]."""
    p = _result_prec(prec, x)
    half = mpfr("0.5")
    if _up(p).sub(x.hi, x.lo) >= 1:
        return Interval(mpfr(0), half)
    k = _nearest_int(x.lo)
    ylo = _dn(p).sub(x.lo, k)
    yhi = _up(p).sub(x.hi, k)
    # y is within about [-1.5, 1.5]; check which integers / half-integers it covers
    has_int = any(ylo <= n <= yhi for n in (-1, 0, 1, 2))
    has_half = any(ylo <= h <= yhi
                   for h in (mpfr("-1.5"), mpfr("-0.5"), mpfr("0.5"), mpfr("1.5")))
    vlo_a, vhi_a = _fold_point(ylo, p)
    vlo_b, vhi_b = _fold_point(yhi, p)
    lo = mpfr(0) if has_int else min(vlo_a, vlo_b)
    hi = half if has_half else max(vhi_a, vhi_b)
    return Interval(max(lo, mpfr(0)), min(hi, half))


# -- certified comparisons -------------------------------------------------

def certainly(a: Interval, rel: str, b: Interval) -> bool:
    """True only if `a rel b` holds for every pair of points in a x b.

    False means "not certified", not "false".
    """
    if rel == "lt":
        return a.hi < b.lo
    if rel == "le":
        return a.hi <= b.lo
    if rel == "gt":
        return a.lo > b.hi
    if rel == "ge":
        return a.lo >= b.hi
    raise ValueError(f"unknown relation {rel!r}")


# -- lattice helpers -------------------------------------------------------

def iv_min(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), min(a.hi, b.hi))


def iv_max(a: Interval, b: Interval) -> Interval:
    return Interval(max(a.lo, b.lo), max(a.hi, b.hi))


def iv_hull(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def iv_sum(items, prec: int) -> Interval:
    dn, up = _dn(prec), _up(prec)
    lo = mpfr(0)
    hi = mpfr(0)
    for it in items:
        lo = dn.add(lo, it.lo)
        hi = up.add(hi, it.hi)
    return Interval(lo, hi)


# -- exact serialization ---------------------------------------------------

def mpfr_to_exact_decimal(x: mpfr) -> str:
    """Exact decimal rendering of a (dyadic) mpfr value."""
    q = gmpy2.mpq(x)
    num, den = int(q.numerator), int(q.denominator)
    if den == 1:
        return str(num)
    k = den.bit_length() - 1
    assert den == 1 << k
    digits = num * 5 ** k
    sign = "-" if digits < 0 else ""
    s = str(abs(digits)).rjust(k + 1, "0")
    return f"{sign}{s[:-k]}.{s[-k:]}"


def interval_to_json(x: Interval) -> dict:
    return {
        "lo": mpfr_to_exact_decimal(x.lo),
        "hi": mpfr_to_exact_decimal(x.hi),
        "prec": x.precision,
    }


def interval_from_json(obj: dict) -> Interval:
    p = int(obj["prec"])
    return from_endpoints(str(obj["lo"]), str(obj["hi"]), p)


def _sci(x: mpfr, digits: int) -> str:
    if x == 0:
        return "0"
    m, e, _ = x.digits(10, digits)
    sign = "-" if m.startswith("-") else ""
    m = m.lstrip("-")
    return f"{sign}{m[0]}.{m[1:]}e{e - 1:+d}"


def fmt(x: Interval, digits: int = 25) -> str:
    """Two-endpoint rendering for reports (display only, round-to-nearest)."""
    return f"[{_sci(x.lo, digits)}, {_sci(x.hi, digits)}]"
