import pickle
from fractions import Fraction

import pytest

from kappazero.errors import ZeroTableError
from kappazero.interval import certainly, from_endpoints, interval, iv_div, iv_mul
from kappazero.zeros import ZeroTable, derive_weights, load_zero_table

GOOD = b"""# comment
14.134725141734693790
21.022039638771554993
25.010857580145688763
30.424876125859513210
"""


def test_load_and_widen():
    t = load_zero_table(GOOD, declared_ulp="1e-9")
    assert t.count == 4
    g0 = t.gamma(0)
    assert g0.contains(Fraction("14.134725141734693790"))
    assert g0.contains(Fraction("14.1347251410"))
    assert not g0.contains(Fraction("14.13472513"))
    # default ulp: one unit in the last printed place
    t2 = load_zero_table(GOOD)
    w = float(t2.gamma(0).width())
    assert 1.9e-18 < w < 2.1e-18


def test_load_validations():
    with pytest.raises(ZeroTableError):
        load_zero_table(b"15.0\n14.0\n")
    with pytest.raises(ZeroTableError):
        load_zero_table(b"")
    with pytest.raises(ZeroTableError):
        load_zero_table(b"14.2\n21.0\n")  # first zero off by > 1e-4
    with pytest.raises(ZeroTableError) as err:
        load_zero_table(b"14.134725\nnot-a-number\n")
    assert "line 2" in str(err.value)
    with pytest.raises(ZeroTableError):
        # equal consecutive entries are never certainly increasing
        load_zero_table(b"14.134725\n14.134725\n")


def test_roundtrip_identical():
    t = load_zero_table(GOOD, declared_ulp="1e-12")
    t2 = pickle.loads(pickle.dumps(t))
    assert t2.ordinates == t.ordinates


def test_derive_weights_oracle_values():
    t = load_zero_table(GOOD, declared_ulp="1e-15")
    ws = derive_weights(t, 2)
    # frozen from published ordinates: 21.022039638... - 14.134725141...
    assert ws.omega(1).contains(Fraction("6.887314497036861202"))
    assert ws.amp(1).contains(Fraction("0.672606808835298332"))
    assert ws.rho0_abs.contains(Fraction("14.143565845725994267"))
    # n = 0 entry excluded: count is table count, omega indices start at 1
    assert ws.count == 4
    with pytest.raises(IndexError):
        ws.omega(4)


def test_derive_weights_range_check():
    t = load_zero_table(GOOD)
    with pytest.raises(ValueError):
        derive_weights(t, 4)
    with pytest.raises(ValueError):
        derive_weights(t, 0)
    ws = derive_weights(t, 2, limit=3)
    assert ws.count == 3


def test_amp_inverse_consistency():
    t = load_zero_table(GOOD)
    ws = derive_weights(t, 3)
    one = interval(1)
    for n in range(1, ws.count):
        prod = iv_mul(ws.amp(n), iv_div(one, ws.amp(n)))
        assert prod.contains(1)


def test_weight_monotonicity():
    t = load_zero_table(GOOD)
    ws = derive_weights(t, 3)
    zero, one = interval(0), interval(1)
    for n in range(1, ws.count):
        assert certainly(zero, "lt", ws.omega(n))
        assert certainly(zero, "lt", ws.amp(n))
        assert certainly(ws.amp(n), "lt", one)
    for n in range(2, ws.count):
        assert certainly(ws.omega(n - 1), "lt", ws.omega(n))
        assert certainly(ws.amp(n), "lt", ws.amp(n - 1))


def test_eta_range():
    # eta_n = pi - arg(rho0/rho_n) lies in (pi, 3pi/2) for gamma_n > gamma_0
    t = load_zero_table(GOOD)
    ws = derive_weights(t, 2)
    for n in range(1, ws.count):
        e = ws.eta(n)
        assert 3.14 < float(e.lo) and float(e.hi) < 4.72


def test_precision_control():
    t = load_zero_table(GOOD, declared_ulp="1e-18")
    lo = derive_weights(t, 2, prec=128)
    assert lo.omega(1).precision == 128
    hp = derive_weights(t, 2)
    assert hp.omega(1).precision >= 256
