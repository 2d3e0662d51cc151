"""Unit tests for the outward-rounded interval layer.

The heavy randomized containment sweep lives in test_acceptance; here we
pin the documented examples and the algebraic corner cases.
"""

import pickle
import random
from fractions import Fraction

import gmpy2
import mpmath
import pytest

from kappazero.errors import IntervalDomainError
from kappazero.interval import (
    Interval, certainly, from_endpoints, interval, interval_from_json,
    interval_to_json, iv_abs, iv_add, iv_cos, iv_div, iv_elementary, iv_exp,
    iv_hull, iv_log, iv_max, iv_min, iv_mul, iv_neg, iv_ring, iv_sin, iv_sqr,
    iv_sqrt, iv_sub, mpfr_to_exact_decimal, nearest_int_distance, pi_interval,
    round_to, iv_atan,
)


def iv(lo, hi=None, prec=None):
    return from_endpoints(str(lo), str(hi if hi is not None else lo), prec)


def test_ring_examples():
    assert iv_ring(iv(1), iv(2), "add") == iv(3)
    r = iv_ring(iv(-1, 2), iv(3), "mul")
    assert r.lo == -3 and r.hi == 6
    with pytest.raises(IntervalDomainError):
        iv_ring(iv(1, 2), iv(0, 1), "div")


def test_ring_against_exact_rationals():
    rng = random.Random(7)
    for _ in range(2000):
        vals = []
        for _ in range(4):
            m = rng.randint(-1 << 40, 1 << 40)
            e = rng.randint(-45, 6)
            vals.append(Fraction(m, 1 << -e) if e < 0 else Fraction(m << e))
        a = from_endpoints(min(vals[0], vals[1]), max(vals[0], vals[1]), 64)
        b = from_endpoints(min(vals[2], vals[3]), max(vals[2], vals[3]), 64)
        qa = [Fraction(gmpy2.mpq(a.lo)), Fraction(gmpy2.mpq(a.hi))]
        qb = [Fraction(gmpy2.mpq(b.lo)), Fraction(gmpy2.mpq(b.hi))]
        for op, f in (("add", lambda x, y: x + y), ("sub", lambda x, y: x - y),
                      ("mul", lambda x, y: x * y)):
            r = iv_ring(a, b, op)
            rlo, rhi = Fraction(gmpy2.mpq(r.lo)), Fraction(gmpy2.mpq(r.hi))
            for x in qa:
                for y in qb:
                    assert rlo <= f(x, y) <= rhi
        if qb[0] > 0 or qb[1] < 0:
            r = iv_ring(a, b, "div")
            rlo, rhi = Fraction(gmpy2.mpq(r.lo)), Fraction(gmpy2.mpq(r.hi))
            for x in qa:
                for y in qb:
                    assert rlo <= x / y <= rhi


def test_elementary_examples():
    e = iv_exp(interval(0))
    assert e.contains(1) and float(e.width()) <= 2e-77
    pi = pi_interval()
    c = iv_cos(Interval(interval(0).lo, pi.hi))
    assert c.lo <= -1 and c.hi >= 1 or (c.lo == -1 and c.hi == 1)
    ln2 = iv_log(interval(2))
    mpmath.mp.dps = 130
    oracle = mpmath.log(2)
    assert ln2.contains(Fraction(mpmath.nstr(oracle, 120)))
    with pytest.raises(IntervalDomainError):
        iv_log(iv(0, 1))
    with pytest.raises(IntervalDomainError):
        iv_sqrt(iv(-1, 1))
    with pytest.raises(ValueError):
        iv_elementary(iv(1), "tan")


def test_trig_extremes():
    pi = pi_interval()
    # interval straddling pi: cos minimum is exactly -1
    x = from_endpoints(3, "3.2")
    c = iv_cos(x)
    assert c.lo == -1
    s = iv_sin(from_endpoints(1, 2))
    assert s.hi == 1
    wide = iv_cos(from_endpoints(0, 1000))
    assert wide.lo == -1 and wide.hi == 1
    # sin on [0, pi] is nonnegative up to rounding
    s2 = iv_sin(Interval(interval(0).lo, pi.lo))
    assert float(s2.lo) > -1e-70


def test_nearest_int_distance_examples():
    assert nearest_int_distance(iv("0.25")) == iv("0.25")
    assert nearest_int_distance(iv("-0.5")) == iv("0.5")
    r = nearest_int_distance(iv("0.4", "0.6"))
    assert float(r.lo) == pytest.approx(0.4, abs=1e-15) and r.hi == gmpy2.mpfr("0.5")
    assert nearest_int_distance(iv(-3, 55)) == from_endpoints(0, "0.5")
    big = nearest_int_distance(iv("1e20"))
    assert float(big.lo) == 0.0


def test_nearest_int_distance_folds_correctly():
    rng = random.Random(11)
    for _ in range(500):
        a = Fraction(rng.randint(-10000, 10000), 64)
        b = a + Fraction(rng.randint(0, 120), 64)
        x = from_endpoints(a, b, 128)
        r = nearest_int_distance(x)
        for t in (a, b, (a + b) / 2, a + (b - a) / 3):
            d = abs(t - round(t))
            assert Fraction(gmpy2.mpq(r.lo)) <= d <= Fraction(gmpy2.mpq(r.hi))


def test_certainly():
    assert certainly(iv(1, 2), "lt", iv(3, 4))
    assert not certainly(iv(1, 3), "lt", iv(2, 4))
    assert certainly(iv(0), "le", iv(0))
    assert certainly(iv(5, 6), "gt", iv(1, 2))
    assert certainly(iv(2), "ge", iv(2))
    assert not certainly(iv(2), "gt", iv(2))
    with pytest.raises(ValueError):
        certainly(iv(1), "ne", iv(2))


def test_monotone_widening():
    rng = random.Random(3)
    for _ in range(300):
        lo = rng.uniform(-4, 4)
        hi = lo + rng.uniform(0, 2)
        pad = rng.uniform(0, 1)
        inner = from_endpoints(repr(lo), repr(hi))
        outer = from_endpoints(repr(lo - pad), repr(hi + pad))
        for f in (iv_exp, iv_cos, iv_sin, iv_neg, iv_abs, iv_sqr,
                  nearest_int_distance, iv_atan):
            assert f(inner).is_subset(f(outer))
        assert iv_add(inner, inner).is_subset(iv_add(outer, outer))
        assert iv_mul(inner, inner).is_subset(iv_mul(outer, outer))


def test_determinism():
    a = from_endpoints("0.123", "4.56", 192)
    b = from_endpoints("-2.5", "0.25", 192)
    r1 = [iv_mul(a, b), iv_exp(b), iv_cos(a), nearest_int_distance(a)]
    r2 = [iv_mul(a, b), iv_exp(b), iv_cos(a), nearest_int_distance(a)]
    assert all(x == y for x, y in zip(r1, r2))


def test_precision_plumbing():
    hp = from_endpoints("0.1", "0.1", 1024)
    lp = round_to(hp, 64)
    assert hp.is_subset(lp)
    assert lp.precision == 64
    assert iv_add(hp, interval(1, 64)).precision == 1024
    assert iv_add(hp, interval(1), prec=128).precision == 128


def test_min_max_hull():
    a, b = iv(1, 3), iv(2, 5)
    assert iv_min(a, b) == iv(1, 3)
    assert iv_max(a, b) == iv(2, 5)
    assert iv_hull(a, b) == iv(1, 5)


def test_serialization_roundtrip():
    x = from_endpoints("0.1", "0.7", 160)
    assert pickle.loads(pickle.dumps(x)) == x
    assert interval_from_json(interval_to_json(x)) == x
    assert mpfr_to_exact_decimal(interval("0.5").lo) == "0.5"
    assert mpfr_to_exact_decimal(interval(-3).lo) == "-3"


def test_constructor_validation():
    with pytest.raises(IntervalDomainError):
        Interval(gmpy2.mpfr(2), gmpy2.mpfr(1))
    with pytest.raises(IntervalDomainError):
        Interval(gmpy2.mpfr("inf"), gmpy2.mpfr("inf"))
    with pytest.raises(AttributeError):
        interval(1).lo = gmpy2.mpfr(0)


def test_negation_preserves_high_precision():
    # bare gmpy2 `-x` rounds to the 53-bit thread context; iv_neg must not
    pi = pi_interval(256)
    n = iv_neg(pi)
    assert n.lo.precision == 256
    back = iv_neg(n)
    assert back == pi
    a = iv_abs(from_endpoints("-3.14159265358979323846264338327950288419716939937",
                              "-1", 256))
    assert a.hi.precision == 256
    assert str(a.hi)[:30] == "3.1415926535897932384626433832"
