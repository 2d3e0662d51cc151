import random
from fractions import Fraction

import pytest

from kappazero.contour import build_mesh
from kappazero.interval import (
    certainly, from_endpoints, half_pi_interval, interval, iv_add, iv_div,
    iv_mul, iv_sub, pi_interval, two_pi_interval,
)
from kappazero.penalty import (
    PenaltyEntry, PenaltyFamily, PsiPoint, envelope_constants, prune_entries,
    v_penalty, w_eval,
)


@pytest.fixture(scope="module")
def family(weights200_n8, tailcfg200_n8, paper_contour_small):
    mesh = build_mesh(paper_contour_small, weights200_n8, tailcfg200_n8)
    return envelope_constants(mesh, weights200_n8)


@pytest.fixture(scope="module")
def family_unpruned(weights200_n8, tailcfg200_n8, paper_contour_small):
    mesh = build_mesh(paper_contour_small, weights200_n8, tailcfg200_n8)
    return envelope_constants(mesh, weights200_n8, prune=False)


def test_v_examples():
    pi = pi_interval(256)
    two_pi = two_pi_interval(256)
    v = v_penalty(interval(0), pi)
    assert v.contains(2) and float(v.width()) < 1e-70
    for phi in ("0", "1", "2", "3"):
        v = v_penalty(interval(phi), interval(0))
        assert v.contains(0) and float(v.hi) < 1e-70
    third = iv_div(two_pi, interval(3))
    v = v_penalty(third, third)
    assert v.contains(Fraction(1, 2))
    with pytest.raises(ValueError):
        v_penalty(interval(4), interval(1))
    with pytest.raises(ValueError):
        v_penalty(interval(1), interval(-1))


def test_v_branch_continuity():
    # phi + psi straddling pi: hull of both branches still encloses truth
    phi = from_endpoints("1.5707", "1.5709")
    psi = from_endpoints("1.5707", "1.5709")
    v = v_penalty(phi, psi)
    # truth at midpointish values: cos(phi) - cos(phi+psi) ~ cos(1.5708)+1
    assert v.lo <= 1.0001 and v.hi >= 0.999


def test_v_monotone_in_psi():
    rng = random.Random(31)
    for _ in range(200):
        phi = interval(repr(rng.uniform(0, 3.14159)))
        a = rng.uniform(0, 3.14159)
        b = rng.uniform(0, 3.14159)
        lo, hi = sorted((a, b))
        v1 = v_penalty(phi, interval(repr(lo)))
        v2 = v_penalty(phi, interval(repr(hi)))
        assert float(v1.lo) <= float(v2.hi) + 1e-25


def test_envelope_case_factors(family):
    # every entry's constant must be positive (or the inert aggregate zero),
    # with phases inside [0, pi]
    pi_hi = pi_interval(256).hi
    for n in range(1, family.N + 1):
        entries = family.entries[n - 1]
        agg = entries[0]
        assert agg.phi_b is None
        assert agg.phi_a == half_pi_interval(256)
        for e in entries:
            assert e.c.lo >= 0
            assert 0 <= e.phi_a.lo and e.phi_a.hi <= pi_hi
            if e.phi_b is not None:
                assert e.phi_b.hi <= pi_hi


def test_case_factor_values():
    from kappazero.penalty import _case_factor
    # degenerate band at 0.3 <= pi/2: factor 1/cos(0) = 1
    a, b, f, crossing = _case_factor(interval("0.3"), interval("0.3"), 256)
    assert not crossing and b is not None
    assert abs(f.mid_float() - 1) < 1e-60
    # band above pi/2: factor 1
    a, b, f, crossing = _case_factor(interval("2.0"), interval("2.5"), 256)
    assert not crossing and b is None
    assert f.contains(1)
    # crossing band [1.0, 2.0]: factor 1/cos((pi/2 - 1)/2) = 1.0421555787...
    a, b, f, crossing = _case_factor(interval("1.0"), interval("2.0"), 256)
    assert crossing
    assert abs(f.mid_float() - 1.0421555787748579) < 1e-12


def test_w_eval_basics(family):
    # w_n(0) = 0 since v(phi, 0) = 0
    w0 = w_eval(family, 1, interval(0))
    assert float(w0.hi) < 1e-60
    # monotone in x (upper endpoints)
    w2 = w_eval(family, 1, interval("0.2"))
    w3 = w_eval(family, 1, interval("0.3"))
    assert float(w2.hi) <= float(w3.hi) + 1e-25
    # bounded by 2 max c
    cmax = max(float(e.c.hi) for e in family.entries[0])
    whalf = w_eval(family, 1, interval("0.5"))
    assert float(whalf.hi) <= 2 * cmax + 1e-20
    with pytest.raises(ValueError):
        w_eval(family, 1, interval("0.7"))


def test_w_eval_toy_family_oracle():
    # two-entry family {(0, c=1), (pi/2, c=1/2)} at x = 1/4:
    # max(v(0, pi/2), v(pi/2, pi/2)/2) = max(1, 1/2) = 1
    pi2 = half_pi_interval(256)
    fam = PenaltyFamily(1, 256, [[
        PenaltyEntry(interval(0), None, interval(1)),
        PenaltyEntry(pi2, None, interval(Fraction(1, 2))),
    ]], [2])
    w = w_eval(fam, 1, interval(Fraction(1, 4)))
    assert w.contains(1)
    assert float(w.width()) < 1e-60


def test_pruning_preserves_w(family, family_unpruned):
    rng = random.Random(17)
    kept = sum(len(e) for e in family.entries)
    raw = sum(len(e) for e in family_unpruned.entries)
    assert kept < raw  # pruning must achieve something at m=64
    for _ in range(40):
        n = rng.randrange(1, family.N + 1)
        x = interval(repr(rng.uniform(0, 0.5)))
        wp = w_eval(family, n, x)
        wu = w_eval(family_unpruned, n, x)
        # pruned set is a subset: upper endpoint cannot exceed the full max,
        # and certified domination means it cannot undercut the true max
        assert float(wp.hi) <= float(wu.hi) + 1e-25
        assert float(wp.hi) >= float(wu.lo) - 1e-25


def test_lemma_case_bound_sampling():
    # case bounds dominate v(phi, psi) for phi' <= phi <= phi''
    rng = random.Random(23)
    pi2 = half_pi_interval(256)
    for _ in range(300):
        psi = interval(repr(rng.uniform(0, 3.141)))
        case = rng.choice(("i", "ii", "iii"))
        if case == "i":
            lo, mid, hi = sorted(rng.uniform(0, 1.5707) for _ in range(3))
            plo, pmid, phi_hi = (interval(repr(v)) for v in (lo, mid, hi))
            gap = iv_mul(iv_sub(phi_hi, plo), interval("0.5"))
            from kappazero.interval import iv_cos
            factor = iv_div(interval(1), iv_cos(gap))
            bound = iv_mul(factor, max(
                v_penalty(plo, psi), v_penalty(phi_hi, psi),
                key=lambda t: float(t.hi)))
        elif case == "ii":
            lo, mid = sorted(rng.uniform(1.5709, 3.1415) for _ in range(2))
            plo, pmid = interval(repr(lo)), interval(repr(mid))
            bound = v_penalty(plo, psi)
        else:
            lo = rng.uniform(0, 1.5707)
            mid = rng.uniform(lo, 3.1415)
            plo, pmid = interval(repr(lo)), interval(repr(mid))
            gap = iv_mul(iv_sub(pi2, plo), interval("0.5"))
            from kappazero.interval import iv_cos
            factor = iv_div(interval(1), iv_cos(gap))
            bound = iv_mul(factor, max(
                v_penalty(plo, psi), v_penalty(pi2, psi),
                key=lambda t: float(t.hi)))
        v = v_penalty(pmid, psi)
        assert float(bound.hi) >= float(v.lo) - 1e-20, (case, pmid, psi)


def test_weight_assumption_sampling(family, weights200_n8, tailcfg200_n8,
                                    paper_contour_small):
    # amp_n u_j^-1 e^{-omega_n y_j} v(2pi||phi_n(t)/2pi||, 2pi x) <= w_n(x)
    from kappazero.contour import z1_point
    from kappazero.interval import nearest_int_distance
    mesh = build_mesh(paper_contour_small, weights200_n8, tailcfg200_n8)
    rng = random.Random(41)
    m = paper_contour_small.m
    pi = pi_interval(256)
    two_pi = two_pi_interval(256)
    from kappazero.contour import SumEvaluator
    ev = SumEvaluator(weights200_n8, 256)
    for _ in range(40):
        j = rng.randrange(1, m + 1)
        seg = mesh.segments[j - 1]
        t = Fraction(j - 1, m) + Fraction(rng.randrange(0, 65), 64) * Fraction(1, m)
        xre, yim = z1_point(t, paper_contour_small)
        n = rng.randrange(1, 9)
        x = interval(repr(rng.uniform(0, 0.49)))
        phi_t = iv_sub(iv_add(pi, iv_mul(weights200_n8.omega(n), xre)), seg.alpha)
        folded = iv_mul(two_pi, nearest_int_distance(iv_div(phi_t, two_pi)))
        lhs = iv_mul(iv_div(iv_mul(weights200_n8.amp(n), ev.exps(yim)[n - 1]),
                            seg.u),
                     v_penalty(folded, iv_mul(two_pi, x)))
        rhs = w_eval(family, n, x)
        assert float(lhs.lo) <= float(rhs.hi) + 1e-18


def test_prune_small_family_noop():
    entries = [PenaltyEntry(interval("0.4"), interval("0.5"), interval(2))]
    assert prune_entries(entries, 256) == entries
