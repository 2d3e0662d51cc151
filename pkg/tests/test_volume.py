import random
from fractions import Fraction

import pytest

from kappazero.contour import build_mesh
from kappazero.interval import certainly, interval, iv_div, iv_mul
from kappazero.penalty import envelope_constants, w_eval
from kappazero.volume import (
    GridFamily, Q_BITS, brute_force_volume, convolve_volume,
    convolve_volume_rational, final_bound, invert_monotone, invert_w,
)


@pytest.fixture(scope="module")
def family(weights200_n8, tailcfg200_n8, paper_contour_small):
    mesh = build_mesh(paper_contour_small, weights200_n8, tailcfg200_n8)
    return envelope_constants(mesh, weights200_n8)


def test_dp_matches_brute_force_exactly():
    rng = random.Random(101)
    for _ in range(60):
        N = rng.randrange(1, 5)
        ell = rng.randrange(1, 7)
        xs = []
        for _ in range(N):
            vals = sorted(Fraction(rng.randrange(0, 50), 100) for _ in range(ell))
            xs.append([Fraction(0)] + vals)
        assert convolve_volume_rational(xs, ell) == brute_force_volume(xs, ell)


def test_dp_toy_example():
    # N=2, ell=3: only (1,1) and (1,2)/(2,1) tuples fit; hand enumeration
    xs = [[Fraction(0), Fraction(1, 10), Fraction(2, 10), Fraction(3, 10)],
          [Fraction(0), Fraction(1, 20), Fraction(1, 20), Fraction(1, 10)]]
    got = convolve_volume_rational(xs, 3)
    assert got == brute_force_volume(xs, 3)
    assert got == Fraction(1, 100)


def test_dp_telescoping_n1():
    xs = [[Fraction(0), Fraction(1, 8), Fraction(1, 4), Fraction(2, 5)]]
    assert convolve_volume_rational(xs, 3) == Fraction(2, 5)


def test_dp_zero_row_annihilates():
    xs = [[Fraction(0)] * 4,
          [Fraction(0), Fraction(1, 10), Fraction(2, 10), Fraction(3, 10)]]
    assert convolve_volume_rational(xs, 3) == 0


def test_integer_dp_agrees_with_rational():
    rng = random.Random(7)
    for _ in range(20):
        N = rng.randrange(1, 4)
        ell = rng.randrange(2, 8)
        rows = []
        for _ in range(N):
            ks = sorted(rng.randrange(0, 1 << 20) << 10 for _ in range(ell))
            rows.append(tuple([0] + ks))
        grid = GridFamily(ell, interval("0.001"), tuple(rows))
        got = convolve_volume(grid)
        xs = [[Fraction(k, 1 << Q_BITS) for k in row] for row in rows]
        want = convolve_volume_rational(xs, ell)
        assert got.contains(want)
        assert float(got.width()) <= 1e-70


def test_convolve_parallel_identical():
    rng = random.Random(3)
    rows = []
    for _ in range(3):
        ks = sorted(rng.randrange(0, 1 << 30) for _ in range(300))
        rows.append(tuple([0] + ks))
    grid = GridFamily(300, interval("0.001"), tuple(rows))
    assert convolve_volume(grid) == convolve_volume(grid, workers=2)


def test_invert_monotone_linear_oracle():
    # w(x) = 2x exactly: largest x with 2(eps + x) <= i/4 at eps ~ 0
    eps = interval(Fraction(1, 1 << 40))
    two = interval(2)

    def w_fn(arg):
        return iv_mul(two, arg)

    ks = invert_monotone(w_fn, 4, eps, 256)
    for i in range(1, 5):
        want = Fraction(i, 8) - Fraction(1, 1 << 40)
        got = Fraction(ks[i], 1 << Q_BITS)
        assert abs(got - want) <= Fraction(2, 1 << Q_BITS)
        assert got <= want
    # monotone and capped at 1/2 - eps
    assert all(ks[i] <= ks[i + 1] for i in range(4))
    assert Fraction(ks[4], 1 << Q_BITS) <= Fraction(1, 2)


def test_invert_w_certifies_and_is_monotone(family):
    eps = interval("0.0001")
    grid = invert_w(family, 24, eps)
    assert grid.N == family.N
    half_minus = Fraction(1, 2) - Fraction("0.0001")
    for n in range(1, grid.N + 1):
        row = grid.rows[n - 1]
        assert row[0] == 0
        assert all(row[i] <= row[i + 1] for i in range(grid.ell))
        assert Fraction(row[-1], 1 << Q_BITS) <= half_minus
        for i in (1, 7, 24):
            if row[i] > 0:
                w = w_eval(family, n, iv_mul(interval(1),
                           interval(Fraction(row[i], 1 << Q_BITS)) + eps))
                import gmpy2
                assert w.hi <= gmpy2.mpq(i, 24)


def test_invert_w_predictor_matches_reference(family):
    # the float-guided inversion must agree with plain bisection up to the
    # acceptance granularity
    from kappazero.volume import _RowInverter
    eps = interval("0.0001")
    n = 2
    fast = _RowInverter(family, n, 12, eps, 256).invert()
    ref = invert_monotone(lambda arg: w_eval(family, n, arg), 12, eps, 256)
    for i in range(13):
        assert abs(fast[i] - ref[i]) <= _RowInverter.PROBE


def test_invert_w_heavy_weight_row_zero():
    # a family whose weight exceeds 1 everywhere gives an all-zero row
    from kappazero.penalty import PenaltyEntry, PenaltyFamily
    from kappazero.interval import half_pi_interval
    fam = PenaltyFamily(1, 256, [[
        PenaltyEntry(half_pi_interval(256), None, interval(1000)),
    ]], [1])
    grid = invert_w(fam, 8, interval("0.01"))
    assert grid.rows[0] == tuple([0] * 9)
    assert float(convolve_volume(grid).hi) == 0.0


def test_invert_w_eps_validation(family):
    with pytest.raises(ValueError):
        invert_w(family, 8, interval(0))
    with pytest.raises(ValueError):
        invert_w(family, 8, interval("0.6"))


def test_final_bound_threshold_algebra():
    # the 1/60 flag is equivalent to sum_r >= delta/(120 * 2^N)
    delta = interval("0.132737")
    g0 = interval("14.134725141734694")
    N = 4
    threshold = iv_div(delta, interval(120 * (1 << N)))
    over = iv_mul(threshold, interval(2))
    under = iv_mul(threshold, interval(Fraction(1, 2)))
    assert final_bound(over, delta, N, g0).sixty_certified
    assert not final_bound(under, delta, N, g0).sixty_certified


def test_final_bound_degenerate():
    delta = interval("0.132737")
    g0 = interval("14.134725141734694")
    r = final_bound(interval(0), delta, 3, g0)
    assert r.kappa_increment.contains(0)
    from kappazero.interval import pi_interval
    want = iv_div(g0, pi_interval(256))
    assert r.kappa0_lower.lo <= want.hi and want.lo <= r.kappa0_lower.hi
    assert not r.sixty_certified


def test_final_bound_positive_increment(family):
    eps = interval("0.0001")
    grid = invert_w(family, 32, eps)
    sum_r = convolve_volume(grid)
    res = final_bound(sum_r, interval("0.132737"), family.N,
                      interval("14.134725141734693790"))
    assert float(res.kappa_increment.lo) > 0
    assert float(res.kappa0_lower.lo) > 4.49


def test_hyperrectangle_containment_sampling(family):
    # random boxes of the grid, shifted by |delta_n| <= eps, stay inside
    # the solution set: sum_n w_n(|v_n + delta_n|) <= 1 (certified sampling)
    rng = random.Random(57)
    eps = interval("0.0001")
    ell = 16
    grid = invert_w(family, ell, eps)
    N = grid.N
    for _ in range(15):
        ks = [rng.randrange(1, ell + 1) for _ in range(N)]
        if sum(ks) > ell:
            continue
        total_hi = 0.0
        for n in range(1, N + 1):
            a = grid.x(n, ks[n - 1] - 1)
            b = grid.x(n, ks[n - 1])
            v = a + Fraction(rng.randrange(0, 1001), 1000) * (b - a)
            shift = Fraction(rng.randrange(-1000, 1001), 1000) * Fraction("0.0001")
            arg = abs(v + shift)
            w = w_eval(family, n, interval(arg))
            total_hi += float(w.hi)
        assert total_hi <= 1.0 + 1e-12, total_hi


def test_monotone_refinement_soundness():
    # shrinking any grid point never increases the certified volume
    rng = random.Random(77)
    for _ in range(10):
        ell = 5
        rows = []
        for _ in range(2):
            ks = sorted(rng.randrange(0, 1 << 30) for _ in range(ell))
            rows.append([0] + ks)
        base = GridFamily(ell, interval("0.001"),
                          tuple(tuple(r) for r in rows))
        v_base = convolve_volume(base)
        n = rng.randrange(2)
        i = rng.randrange(1, ell + 1)
        shrunk = [list(r) for r in rows]
        shrunk[n][i] = min(shrunk[n][i], shrunk[n][i - 1] +
                           (shrunk[n][i] - shrunk[n][i - 1]) // 2)
        for k in range(i + 1, ell + 1):  # keep monotonicity
            shrunk[n][k] = max(shrunk[n][k], shrunk[n][i])
        v_shrunk = convolve_volume(GridFamily(
            ell, interval("0.001"), tuple(tuple(r) for r in shrunk)))
        assert float(v_shrunk.lo) <= float(v_base.lo) + 1e-30


def test_symmetry_factor_once_n1():
    # N = 1 telescoping: increment = (2/delta) * 2 * x_{1,ell}
    from kappazero.interval import certainly, iv_div, iv_sub
    ell = 7
    ks = tuple([0] + sorted(random.Random(3).randrange(0, 1 << 40)
                            for _ in range(ell)))
    grid = GridFamily(ell, interval("0.001"), (ks,))
    sum_r = convolve_volume(grid)
    assert sum_r.contains(Fraction(ks[-1], 1 << Q_BITS))
    delta = interval("0.132737")
    res = final_bound(sum_r, delta, 1, interval("14.134725141734694"))
    want = iv_mul(iv_div(interval(4), delta),
                  interval(Fraction(ks[-1], 1 << Q_BITS)))
    diff = iv_sub(res.kappa_increment, want)
    assert diff.contains(0) or abs(float(diff.lo)) < 1e-60


def test_invert_w_parallel_identical(family):
    eps = interval("0.0001")
    g1 = invert_w(family, 12, eps, workers=1)
    g2 = invert_w(family, 12, eps, workers=2)
    assert g1.rows == g2.rows
