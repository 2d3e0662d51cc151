"""Rectangular contour, rotation schedule, and certified mesh quantities.

The contour z1(t), 0 <= t <= 1, is a rectangle traversed counterclockwise:
bottom edge at height Y0 (split so that t=0 starts at its midpoint), right
side at delta/2, top at Y1, left side at -delta/2.  It is discretized at
t_j = j/m; mesh points are exact rationals, only values are intervals.

alpha(s) is a piecewise-linear rotation profile on [0, 1/2] with
alpha(0) = 0 and alpha(1/2) = pi; the per-segment rotations are

    alpha_j = -pi + alpha((j - 1/2)/m)          for 1 <= j <= m/2,
    alpha_j =  pi - alpha((m + 1/2 - j)/m)      for m/2 < j <= m,

with the wraparound entries alpha_{m+1} = 2 pi + alpha_1 and
alpha_0 = alpha_m - 2 pi.

For the partial sum F(z) = 1 - sum_n amp_n e^{i omega_n z} and its
derivative f, each segment j gets

    b_j  = |z1(t_{j-1}) - z1(t_j)| / 2,
    x'_j, x''_j = min/max of the endpoint real parts,
    y_j  = min of the endpoint imaginary parts,
    M_j  = sum_n amp_n omega_n^2 e^{-omega_n y_j}   (a bound for |f'|),
    u_j  = min over the two endpoint expressions of
           Re(F e^{-i alpha_j}) + min(0, +-Re(b_j f e^{-i alpha_j}))
           - b_j^2 M_j / 2 - Rtilde(y_j),

and the mesh certifies |alpha_j - alpha_{j-1}| < pi together with
|z1(t_j) - z1(t_{j-1})| < pi/omega_N (claim 1) and u_j > 0 (claim 2).
Claim 3 (per-frequency band widths below pi) is certified by band_angles.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import CertificationError, IntervalDomainError
from .interval import (
    DEFAULT_PRECISION, Interval, _dn, _neg, _up, certainly, interval, iv_abs,
    iv_add, iv_div, iv_min, iv_max, iv_mul, iv_neg, iv_sqr, iv_sqrt, iv_sub,
    nearest_int_distance, pi_interval, two_pi_interval, iv_cos, iv_sin,
)
from .tail import TailBoundConfig, TailEvaluator
from .zeros import WeightSet

ZERO_IV = interval(0)


@dataclass(frozen=True)
class ContourConfig:
    delta: Interval
    Y0: Interval
    Y1: Interval
    m: int
    alpha_breakpoints: tuple[tuple[Fraction, Interval], ...]
    prec: int = DEFAULT_PRECISION


def make_contour_config(delta, y0, y1, m: int, breakpoints,
                        prec: int = DEFAULT_PRECISION) -> ContourConfig:
    """Validate and build a ContourConfig; decimal strings accepted."""
    delta = interval(delta, prec)
    y0 = interval(y0, prec)
    y1 = interval(y1, prec)
    if not certainly(ZERO_IV, "lt", y0):
        raise ValueError(f"Y0 must be certainly positive: {y0}")
    if not certainly(y0, "lt", y1):
        raise ValueError(f"need Y0 < Y1 certainly: {y0}, {y1}")
    if not certainly(ZERO_IV, "lt", delta):
        raise ValueError(f"delta must be certainly positive: {delta}")
    if m < 2 or m % 2:
        raise ValueError(f"m must be even and >= 2: {m}")
    pts = []
    for absc, val in breakpoints:
        absc = Fraction(absc)
        if isinstance(val, str):
            val = pi_interval(prec) if val.strip() == "pi" else interval(val, prec)
        pts.append((absc, val))
    if pts[0][0] != 0 or not pts[0][1].is_point() or pts[0][1].lo != 0:
        raise ValueError("alpha breakpoints must start at (0, 0)")
    if pts[-1][0] != Fraction(1, 2):
        raise ValueError("alpha breakpoints must end at abscissa 1/2")
    if not pi_interval(prec).is_subset(pts[-1][1]):
        raise ValueError("final alpha breakpoint must enclose pi")
    for (a, _), (b, _) in zip(pts, pts[1:]):
        if not a < b:
            raise ValueError("alpha breakpoint abscissas must strictly increase")
    return ContourConfig(delta, y0, y1, m, tuple(pts), prec)


def z1_point(t: Fraction, cfg: ContourConfig) -> tuple[Interval, Interval]:
    """(Re, Im) of the contour at exact rational parameter t."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"t={t} outside [0, 1]")
    p = cfg.prec
    d, y0, y1 = cfg.delta, cfg.Y0, cfg.Y1

    def times(q: Fraction, x: Interval) -> Interval:
        return iv_mul(interval(q, p), x, p)

    if t <= Fraction(1, 8):
        return times(4 * t, d), y0
    if t <= Fraction(3, 8):
        return times(Fraction(1, 2), d), iv_add(y0, times(4 * t - Fraction(1, 2),
                                                          iv_sub(y1, y0, p)), p)
    if t <= Fraction(5, 8):
        return times(-4 * (t - Fraction(1, 2)), d), y1
    if t <= Fraction(7, 8):
        return times(Fraction(-1, 2), d), iv_add(y1, times(4 * t - Fraction(5, 2),
                                                           iv_sub(y0, y1, p)), p)
    return times(4 * (t - 1), d), y0


def alpha_at(s: Fraction, cfg: ContourConfig) -> Interval:
    """Exact piecewise-linear interpolation of the rotation profile."""
    s = Fraction(s)
    pts = cfg.alpha_breakpoints
    if not 0 <= s <= pts[-1][0]:
        raise ValueError(f"alpha abscissa {s} outside [0, 1/2]")
    for (a, va), (b, vb) in zip(pts, pts[1:]):
        if s <= b:
            lam = (s - a) / (b - a)
            if lam == 0:
                return va
            if lam == 1:
                return vb
            return iv_add(va, iv_mul(interval(lam, cfg.prec),
                                     iv_sub(vb, va, cfg.prec), cfg.prec), cfg.prec)
    raise AssertionError("unreachable")


def alpha_schedule(cfg: ContourConfig) -> list[Interval]:
    """alpha_0 .. alpha_{m+1} as intervals."""
    m = cfg.m
    pi = pi_interval(cfg.prec)
    two_pi = two_pi_interval(cfg.prec)
    sched: list[Interval | None] = [None] * (m + 2)
    for j in range(1, m // 2 + 1):
        sched[j] = iv_add(iv_neg(pi), alpha_at(Fraction(2 * j - 1, 2 * m), cfg))
    for j in range(m // 2 + 1, m + 1):
        sched[j] = iv_sub(pi, alpha_at(Fraction(2 * (m - j) + 1, 2 * m), cfg))
    sched[m + 1] = iv_add(two_pi, sched[1])
    sched[0] = iv_sub(sched[m], two_pi)
    return sched


class SumEvaluator:
    """Shared-point evaluation of F, f and M with exp/trig caches."""

    def __init__(self, weights: WeightSet, prec: int):
        self.w = weights
        self.N = weights.N
        self.prec = prec
        self._exp: dict[bytes, list] = {}
        self._trig: dict[bytes, list] = {}

    def exps(self, y: Interval) -> list[Interval]:
        key = y.cache_key()
        out = self._exp.get(key)
        if out is None:
            dn, up = _dn(self.prec), _up(self.prec)
            out = []
            for n in range(1, self.N + 1):
                om = self.w.omega(n)
                out.append(Interval(dn.exp(_neg(up.mul(om.hi, y.hi))),
                                    up.exp(_neg(dn.mul(om.lo, y.lo)))))
            self._exp[key] = out
        return out

    def trigs(self, x: Interval) -> list[tuple[Interval, Interval]]:
        key = x.cache_key()
        out = self._trig.get(key)
        if out is None:
            out = []
            for n in range(1, self.N + 1):
                arg = iv_mul(self.w.omega(n), x, self.prec)
                out.append((iv_cos(arg, self.prec), iv_sin(arg, self.prec)))
            self._trig[key] = out
        return out

    def F(self, x: Interval, y: Interval) -> tuple[Interval, Interval]:
        dn, up = _dn(self.prec), _up(self.prec)
        es, ts = self.exps(y), self.trigs(x)
        re_lo, re_hi = mpfr(1), mpfr(1)
        im_lo, im_hi = mpfr(0), mpfr(0)
        for n in range(1, self.N + 1):
            a = iv_mul(self.w.amp(n), es[n - 1], self.prec)
            c = iv_mul(a, ts[n - 1][0], self.prec)
            s = iv_mul(a, ts[n - 1][1], self.prec)
            re_lo = dn.sub(re_lo, c.hi)
            re_hi = up.sub(re_hi, c.lo)
            im_lo = dn.sub(im_lo, s.hi)
            im_hi = up.sub(im_hi, s.lo)
        return Interval(re_lo, re_hi), Interval(im_lo, im_hi)

    def f(self, x: Interval, y: Interval) -> tuple[Interval, Interval]:
        dn, up = _dn(self.prec), _up(self.prec)
        es, ts = self.exps(y), self.trigs(x)
        re_lo, re_hi = mpfr(0), mpfr(0)
        im_lo, im_hi = mpfr(0), mpfr(0)
        for n in range(1, self.N + 1):
            om = self.w.omega(n)
            a = iv_mul(iv_mul(om, self.w.amp(n), self.prec), es[n - 1], self.prec)
            s = iv_mul(a, ts[n - 1][1], self.prec)
            c = iv_mul(a, ts[n - 1][0], self.prec)
            re_lo = dn.add(re_lo, s.lo)
            re_hi = up.add(re_hi, s.hi)
            im_lo = dn.sub(im_lo, c.hi)
            im_hi = up.sub(im_hi, c.lo)
        return Interval(re_lo, re_hi), Interval(im_lo, im_hi)

    def slope_bound(self, y: Interval) -> Interval:
        dn, up = _dn(self.prec), _up(self.prec)
        es = self.exps(y)
        lo, hi = mpfr(0), mpfr(0)
        for n in range(1, self.N + 1):
            om2 = iv_sqr(self.w.omega(n), self.prec)
            t = iv_mul(iv_mul(self.w.amp(n), om2, self.prec), es[n - 1], self.prec)
            lo = dn.add(lo, t.lo)
            hi = up.add(hi, t.hi)
        return Interval(lo, hi)


def eval_FNeta(z: tuple[Interval, Interval], weights: WeightSet,
               prec: int = DEFAULT_PRECISION) -> tuple[Interval, Interval]:
    """F(z) = 1 - sum amp_n e^{i omega_n z} at z = (Re, Im), Im > 0."""
    x, y = z
    if not certainly(ZERO_IV, "lt", y):
        raise IntervalDomainError(f"Im z must be certainly positive: {y}")
    return SumEvaluator(weights, prec).F(x, y)


def eval_deriv(z: tuple[Interval, Interval], weights: WeightSet,
               prec: int = DEFAULT_PRECISION) -> tuple[Interval, Interval]:
    """f(z) = -i sum omega_n amp_n e^{i omega_n z}, the derivative of F."""
    x, y = z
    if not certainly(ZERO_IV, "lt", y):
        raise IntervalDomainError(f"Im z must be certainly positive: {y}")
    return SumEvaluator(weights, prec).f(x, y)


def deriv_slope_bound(y: Interval, weights: WeightSet,
                      prec: int = DEFAULT_PRECISION) -> Interval:
    """M = sum amp_n omega_n^2 e^{-omega_n y}, bounding |f'| at height >= y."""
    return SumEvaluator(weights, prec).slope_bound(y)


def _re_rotated(re: Interval, im: Interval, cos_a: Interval, sin_a: Interval,
                prec: int) -> Interval:
    """Re((re + i im) e^{-i alpha}) = re cos(alpha) + im sin(alpha)."""
    return iv_add(iv_mul(re, cos_a, prec), iv_mul(im, sin_a, prec), prec)


@dataclass(frozen=True, slots=True)
class Segment:
    j: int
    alpha: Interval
    b: Interval
    x_lo: Interval
    x_hi: Interval
    y: Interval
    M: Interval
    u: Interval


@dataclass(frozen=True)
class ContourMesh:
    cfg: ContourConfig
    weights_N: int
    alphas: list[Interval]
    segments: list[Segment]
    claim1_margin: Interval
    claim2_margin: Interval

    @property
    def m(self) -> int:
        return self.cfg.m


def build_mesh(cfg: ContourConfig, weights: WeightSet, tail_cfg: TailBoundConfig,
               tail_eval: TailEvaluator | None = None) -> ContourMesh:
    """Construct and certify the mesh (claims 1 and 2)."""
    p = cfg.prec
    m = cfg.m
    N = weights.N
    if tail_eval is None:
        tail_eval = TailEvaluator(weights, tail_cfg, p)
    ev = SumEvaluator(weights, p)
    alphas = alpha_schedule(cfg)
    pi = pi_interval(p)
    step_cap = iv_div(pi, weights.omega(N), p)

    pts = [z1_point(Fraction(j, m), cfg) for j in range(m + 1)]
    fvals = [ev.F(x, y) for x, y in pts]
    dvals = [ev.f(x, y) for x, y in pts]

    segments: list[Segment] = []
    worst1: Interval | None = None  # min over j of the claim-1 margins
    worst2: Interval | None = None  # min over j of u_j
    half = interval(Fraction(1, 2), p)
    for j in range(1, m + 1):
        (x0, y0), (x1, y1) = pts[j - 1], pts[j]
        dx = iv_sub(x1, x0, p)
        dy = iv_sub(y1, y0, p)
        seg_len = iv_sqrt(iv_add(iv_sqr(dx, p), iv_sqr(dy, p), p), p)
        b = iv_mul(half, seg_len, p)
        da = iv_abs(iv_sub(alphas[j], alphas[j - 1], p))
        m1 = iv_min(iv_sub(pi, da, p), iv_sub(step_cap, seg_len, p))
        if not (certainly(da, "lt", pi) and certainly(seg_len, "lt", step_cap)):
            raise CertificationError(
                "mesh", "claim 1 failed", j=j, dalpha=da, step=seg_len,
                cap=step_cap, claim="claim1")
        worst1 = m1 if worst1 is None else iv_min(worst1, m1)

        x_lo = iv_min(x0, x1)
        x_hi = iv_max(x0, x1)
        y_j = iv_min(y0, y1)
        Mj = ev.slope_bound(y_j)
        alpha = alphas[j]
        cos_a = iv_cos(alpha, p)
        sin_a = iv_sin(alpha, p)
        rtail = tail_eval.bound(y_j, fast=True)

        (re0, im0), (re1, im1) = fvals[j - 1], fvals[j]
        (dre0, dim0), (dre1, dim1) = dvals[j - 1], dvals[j]
        w0 = iv_mul(b, _re_rotated(dre0, dim0, cos_a, sin_a, p), p)
        w1 = iv_mul(b, _re_rotated(dre1, dim1, cos_a, sin_a, p), p)
        expr0 = iv_add(_re_rotated(re0, im0, cos_a, sin_a, p),
                       iv_min(ZERO_IV, w0), p)
        expr1 = iv_add(_re_rotated(re1, im1, cos_a, sin_a, p),
                       iv_min(ZERO_IV, iv_neg(w1)), p)
        curv = iv_mul(half, iv_mul(iv_sqr(b, p), Mj, p), p)
        u = iv_sub(iv_min(expr0, expr1), iv_add(curv, rtail, p), p)
        if not certainly(ZERO_IV, "lt", u):
            raise CertificationError(
                "mesh", "claim 2 failed: u_j not certainly positive",
                j=j, u=u, tail=rtail, curvature=curv, claim="claim2")
        worst2 = u if worst2 is None else iv_min(worst2, u)
        segments.append(Segment(j, alpha, b, x_lo, x_hi, y_j, Mj, u))

    return ContourMesh(cfg, N, alphas, segments, worst1, worst2)


@dataclass(frozen=True, slots=True)
class Band:
    """Certified phase band of frequency n on segment j."""
    n: int
    j: int
    beta_lo: Interval
    beta_hi: Interval
    phi_lo: Interval
    phi_hi: Interval
    case: str  # "even" | "odd" | "none" | "ambiguous"


def _double(x: mpfr) -> mpfr:
    # scaling by 2 at the operand's own precision is exact
    return _up(x.precision).mul(x, mpfr(2))


def _iceil(x: mpfr) -> int:
    return int(_up(x.precision).ceil(x))


def _ifloor(x: mpfr) -> int:
    return int(_dn(x.precision).floor(x))


def _straddle_case(s_lo: Interval, s_hi: Interval) -> str:
    """Certified classification of multiples of pi inside [beta', beta'']
    given the enclosures of s = beta/(2 pi).

    Working with 2s, even integers K = 2s mark even multiples of pi and odd
    K mark odd multiples.  A multiple is certainly inside when
    s_lo.hi <= K/2 <= s_hi.lo; absence is certain when the outer hull
    [s_lo.lo, s_hi.hi] contains no element of Z/2.
    """
    k0 = _iceil(_double(s_lo.hi))
    k1 = _ifloor(_double(s_hi.lo))
    if k0 <= k1:
        has_even = k0 % 2 == 0 or k1 > k0
        has_odd = k0 % 2 != 0 or k1 > k0
        if has_even and not has_odd:
            return "even"
        if has_odd and not has_even:
            return "odd"
        return "ambiguous"
    if _iceil(_double(s_lo.lo)) > _ifloor(_double(s_hi.hi)):
        return "none"
    return "ambiguous"


def band_angles(mesh: ContourMesh, weights: WeightSet,
                js: list[int] | None = None) -> list[list[Band]]:
    """Bands for the requested segments (default: all), certifying claim 3."""
    p = mesh.cfg.prec
    out = []
    for j in js or range(1, mesh.m + 1):
        seg = mesh.segments[j - 1]
        out.append(bands_for_segment(seg, weights, p))
    return out


def classify_band(beta_lo: Interval, beta_hi: Interval, prec: int,
                  n: int = 0, j: int = 0) -> Band:
    """Certified (phi', phi'') assignment for one band [beta', beta'']."""
    p = prec
    pi = pi_interval(p)
    two_pi = two_pi_interval(p)
    width = iv_sub(beta_hi, beta_lo, p)
    if not certainly(width, "lt", pi):
        raise CertificationError(
            "bands", "claim 3 failed: band width not certainly below pi",
            n=n, j=j, width=width, claim="claim3")
    s_lo = iv_div(beta_lo, two_pi, p)
    s_hi = iv_div(beta_hi, two_pi, p)
    case = _straddle_case(s_lo, s_hi)
    norm_lo = iv_mul(two_pi, nearest_int_distance(s_lo, p), p)
    norm_hi = iv_mul(two_pi, nearest_int_distance(s_hi, p), p)
    if case == "even":
        phi_lo, phi_hi = ZERO_IV, iv_max(norm_lo, norm_hi)
    elif case == "odd":
        phi_lo, phi_hi = iv_min(norm_lo, norm_hi), pi
    elif case == "none":
        phi_lo, phi_hi = iv_min(norm_lo, norm_hi), iv_max(norm_lo, norm_hi)
    else:
        phi_lo, phi_hi = ZERO_IV, pi
    return Band(n, j, beta_lo, beta_hi, phi_lo, phi_hi, case)


def bands_for_segment(seg: Segment, weights: WeightSet, prec: int) -> list[Band]:
    pi = pi_interval(prec)
    bands = []
    for n in range(1, weights.N + 1):
        om = weights.omega(n)
        beta_lo = iv_sub(iv_add(pi, iv_mul(om, seg.x_lo, prec), prec), seg.alpha, prec)
        beta_hi = iv_sub(iv_add(pi, iv_mul(om, seg.x_hi, prec), prec), seg.alpha, prec)
        bands.append(classify_band(beta_lo, beta_hi, prec, n, seg.j))
    return bands
