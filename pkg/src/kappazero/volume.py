"""Certified volume lower bound via grid inversion and truncated convolution.

For each frequency the weight w_n is inverted into a nondecreasing grid
0 = x_{n,0} <= ... <= x_{n,ell} <= 1/2 - eps with the certified property
w_n(eps + x_{n,i}) <= i/ell.  Grid points are exact dyadic rationals
(multiples of 2^-48), found by bisection guided by a float predictor;
every accepted point is certified by an interval evaluation of w_n, the
predictor only narrows the search.  When even x = 0 cannot be certified
the level is left at 0: a zero-length cell contributes no volume, so the
bound stays valid.

The volume contribution before the 2^N symmetry factor is

    sum_{i<=ell} r_i,   r_i = sum_{k_1+...+k_N=i, 1<=k_n<=ell}
                             prod_n (x_{n,k_n} - x_{n,k_n-1}),

computed by the dynamic program g_0 = delta_0,
g_n[i] = sum_k g_{n-1}[i-k] (x_{n,k} - x_{n,k-1}), truncated at ell.
Because the grid is exact dyadic, the program runs in exact integer
arithmetic (a degenerate interval), and chunked parallel evaluation is
bit-identical by construction.  The final assembly is

    kappa_increment = (2/delta) 2^N sum r_i,
    kappa0_lower    = gamma0/pi + kappa_increment,

with a certified flag for kappa_increment >= 1/60.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .interval import (
    DEFAULT_PRECISION, Interval, _dn, certainly, interval, iv_add, iv_div,
    iv_mul, pi_interval,
)
from .penalty import PenaltyFamily, PsiPoint, w_eval_at_psi

Q_BITS = 48  # grid points are integer multiples of 2^-48

ZERO_IV = interval(0)
HALF_IV = interval("0.5")


@dataclass(frozen=True)
class GridFamily:
    """Exact dyadic inversion grids, rows indexed n = 1..N."""

    ell: int
    eps: Interval
    rows: tuple[tuple[int, ...], ...]  # scaled by 2^Q_BITS; row[0] == 0

    @property
    def N(self) -> int:
        return len(self.rows)

    def x(self, n: int, i: int) -> Fraction:
        return Fraction(self.rows[n - 1][i], 1 << Q_BITS)

    def x_interval(self, n: int, i: int, prec: int = DEFAULT_PRECISION) -> Interval:
        return interval(self.x(n, i), prec)


def _float_entry_inverse(c: float, phi: float, level: float) -> float:
    """Largest psi with c*v(phi, psi) <= level (float guess, not certified)."""
    if c <= 0 or not math.isfinite(c):
        return math.pi
    t = level / c
    if math.cos(phi) + 1 <= t:
        return math.pi
    u = math.cos(phi) - t
    if u < -1:
        return math.pi
    return max(math.acos(max(min(u, 1.0), -1.0)) - phi, 0.0)


def _float_level_inverse(model, level: float) -> float:
    """Largest psi with max over entries <= level."""
    best = math.pi
    for c, pa, pb in model:
        best = min(best, _float_entry_inverse(c, pa, level))
        if not math.isnan(pb):
            best = min(best, _float_entry_inverse(c, pb, level))
    return best


class _RowInverter:
    """Certified per-level inversion of one weight function."""

    PROBE = 1 << (Q_BITS - 42)  # acceptance granularity: 2^-42

    def __init__(self, family: PenaltyFamily, n: int, ell: int, eps: Interval,
                 prec: int):
        self.family = family
        self.n = n
        self.ell = ell
        self.eps = eps
        self.prec = prec
        self.model = family.float_model(n)
        self.eps_f = float(eps.hi)
        cap = _dn(prec).sub(HALF_IV.lo, eps.hi)
        self.k_cap = max(int(_dn(prec).floor(
            _dn(prec).mul(cap, mpfr(1 << Q_BITS)))), 0)

    def _w_hi(self, k: int) -> mpfr:
        x = interval(Fraction(k, 1 << Q_BITS), self.prec)
        arg = iv_add(self.eps, x, self.prec)
        return w_eval_at_psi(self.family, self.n,
                             PsiPoint(arg, self.prec), self.prec).hi

    def _passes(self, k: int, level: Fraction) -> bool:
        if k > self.k_cap:
            return False
        return self._w_hi(k) <= gmpy2.mpq(level.numerator, level.denominator)

    def invert(self) -> tuple[int, ...]:
        ell = self.ell
        ks = [0] * (ell + 1)
        w_at_zero = self._w_hi(0)
        k_prev = 0
        started = False
        for i in range(1, ell + 1):
            level = Fraction(i, ell)
            if not started:
                if w_at_zero > gmpy2.mpq(i, ell):
                    continue  # even x = 0 fails this level: leave it at 0
                started = True
            if k_prev == self.k_cap:
                ks[i] = self.k_cap
                continue
            guess = _float_level_inverse(self.model, i / ell) / (2 * math.pi) \
                - self.eps_f
            kd = int(guess * (1 << Q_BITS)) if math.isfinite(guess) else k_prev
            kd = max(min(kd, self.k_cap), k_prev)
            k = self._refine(kd, k_prev, level)
            ks[i] = k
            k_prev = k
        return tuple(ks)

    def _refine(self, kd: int, k_lo: int, level: Fraction) -> int:
        """Largest passing k within PROBE granularity, starting near kd."""
        step = self.PROBE
        if self._passes(kd, level):
            lo = kd
            hi = min(kd + step, self.k_cap)
            while self._passes(hi, level):
                lo = hi
                if hi == self.k_cap:
                    return self.k_cap
                step *= 16
                hi = min(hi + step, self.k_cap)
        else:
            hi = kd
            lo = max(kd - step, k_lo)
            while not self._passes(lo, level):
                hi = lo
                if lo == k_lo:
                    return k_lo
                step *= 16
                lo = max(lo - step, k_lo)
        # bisect [lo pass, hi fail) down to PROBE granularity
        while hi - lo > self.PROBE:
            mid = (lo + hi) // 2
            if self._passes(mid, level):
                lo = mid
            else:
                hi = mid
        return lo


def invert_w(family: PenaltyFamily, ell: int, eps: Interval,
             prec: int | None = None, workers: int = 1) -> GridFamily:
    """Build the certified inversion grid for all frequencies."""
    p = prec or family.prec
    if not (certainly(ZERO_IV, "lt", eps) and certainly(eps, "lt", HALF_IV)):
        raise ValueError(f"eps must be certainly inside (0, 1/2): {eps}")
    ns = list(range(1, family.N + 1))
    if workers > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_invert_row_task,
                                 [(family, n, ell, eps, p) for n in ns]))
    else:
        rows = [_invert_row_task((family, n, ell, eps, p)) for n in ns]
    return GridFamily(ell, eps, tuple(rows))


def _invert_row_task(args) -> tuple[int, ...]:
    family, n, ell, eps, prec = args
    return _RowInverter(family, n, ell, eps, prec).invert()


def invert_monotone(w_fn, ell: int, eps: Interval, prec: int,
                    quantum_bits: int = Q_BITS) -> tuple[int, ...]:
    """Reference inversion of an arbitrary certified nondecreasing bound:
    plain bisection on the dyadic grid, no predictor.  Used by tests."""
    cap = _dn(prec).sub(HALF_IV.lo, eps.hi)
    k_cap = max(int(_dn(prec).floor(_dn(prec).mul(cap, mpfr(1 << quantum_bits)))), 0)

    def passes(k: int, level: Fraction) -> bool:
        x = interval(Fraction(k, 1 << quantum_bits), prec)
        w = w_fn(iv_add(eps, x, prec))
        return w.hi <= gmpy2.mpq(level.numerator, level.denominator)

    ks = [0] * (ell + 1)
    k_prev = 0
    started = False
    for i in range(1, ell + 1):
        level = Fraction(i, ell)
        if not started:
            if not passes(0, level):
                continue
            started = True
        if passes(k_cap, level):
            ks[i] = k_prev = k_cap
            continue
        lo, hi = k_prev, k_cap
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if passes(mid, level):
                lo = mid
            else:
                hi = mid
        ks[i] = k_prev = lo
    return tuple(ks)


# -- truncated convolution ---------------------------------------------------


def _dp_stage(prev: list[int], diffs: list[int], lo: int, hi: int,
              ell: int) -> list[int]:
    """One stage of the exact integer DP for output indices [lo, hi)."""
    out = []
    for i in range(lo, hi):
        acc = 0
        for k in range(1, min(i, ell) + 1):
            d = diffs[k]
            if d:
                acc += prev[i - k] * d
        out.append(acc)
    return out


def _dp_stage_task(args):
    return _dp_stage(*args)


def convolve_volume(grid: GridFamily, prec: int = DEFAULT_PRECISION,
                    workers: int = 1) -> Interval:
    """Enclosure of sum_{i<=ell} r_i; exact up to the final rounding."""
    ell = grid.ell
    g = [0] * (ell + 1)
    g[0] = 1
    for row in grid.rows:
        diffs = [0] * (ell + 1)
        for k in range(1, ell + 1):
            d = row[k] - row[k - 1]
            if d < 0:
                raise ValueError("grid row not nondecreasing")
            diffs[k] = d
        if workers > 1 and ell >= 256:
            import concurrent.futures as cf
            chunk = (ell + 1 + workers - 1) // workers
            tasks = [(g, diffs, lo, min(lo + chunk, ell + 1), ell)
                     for lo in range(0, ell + 1, chunk)]
            with cf.ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_dp_stage_task, tasks))
            g = [v for part in parts for v in part]
        else:
            g = _dp_stage(g, diffs, 0, ell + 1, ell)
    total = sum(g)
    # exact value: total / 2^(Q_BITS * N)
    return interval(Fraction(total, 1 << (Q_BITS * grid.N)), prec)


def convolve_volume_rational(xs: list[list[Fraction]], ell: int) -> Fraction:
    """The same dynamic program in exact rational arithmetic.

    xs[n][0..ell] are the grid points of row n (xs[n][0] must be 0).
    """
    g = [Fraction(0)] * (ell + 1)
    g[0] = Fraction(1)
    for row in xs:
        if row[0] != 0:
            raise ValueError("row must start at 0")
        nxt = [Fraction(0)] * (ell + 1)
        for i in range(ell + 1):
            acc = Fraction(0)
            for k in range(1, min(i, ell) + 1):
                d = row[k] - row[k - 1]
                if d:
                    acc += g[i - k] * d
            nxt[i] = acc
        g = nxt
    return sum(g, Fraction(0))


def brute_force_volume(xs: list[list[Fraction]], ell: int) -> Fraction:
    """Direct enumeration of r_i over all index tuples; oracle for tests."""
    import itertools
    N = len(xs)
    total = Fraction(0)
    for ks in itertools.product(range(1, ell + 1), repeat=N):
        if sum(ks) <= ell:
            prod = Fraction(1)
            for n, k in enumerate(ks):
                prod *= xs[n][k] - xs[n][k - 1]
            total += prod
    return total


# -- final assembly ----------------------------------------------------------


@dataclass(frozen=True)
class VolumeResult:
    sum_r: Interval
    kappa_increment: Interval
    kappa0_lower: Interval
    sixty_certified: bool


def final_bound(sum_r: Interval, delta: Interval, N: int, gamma0: Interval,
                prec: int = DEFAULT_PRECISION) -> VolumeResult:
    """kappa_increment = (2/delta) 2^N sum_r; kappa0 >= gamma0/pi + increment."""
    if sum_r.lo < 0:
        sum_r = Interval(mpfr(0), sum_r.hi)
    two = interval(2, prec)
    factor = iv_mul(iv_div(two, delta, prec), interval(1 << N, prec), prec)
    inc = iv_mul(factor, sum_r, prec)
    k0 = iv_add(iv_div(gamma0, pi_interval(prec), prec), inc, prec)
    sixty = certainly(inc, "ge", interval(Fraction(1, 60), prec))
    return VolumeResult(sum_r, inc, k0, sixty)
