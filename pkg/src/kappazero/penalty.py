"""Penalty calculus: the kernel v, envelope constants, and the weights w_n.

For phases phi, psi in [0, pi] the kernel is

    v(phi, psi) = cos(phi) - cos(phi + psi)   if phi + psi <= pi,
                  cos(phi) + 1                otherwise,

continuous, nonnegative, at most 2, and non-decreasing in psi.  Each mesh
segment j and frequency n contributes an envelope constant

    c_{n,j} = amp_n e^{-omega_n y_j} / u_j * F(phi'_{n,j}, phi''_{n,j})

where the factor F depends on how the certified phase band sits relative
to pi/2: bands below pi/2 get 1/cos((phi''-phi')/2), bands above get 1,
and bands crossing pi/2 get 1/cos((pi/2 - phi')/2) together with a
contribution to the synthetic j=0 aggregate entry at phi = pi/2.  The
weight functions are then

    w_n(x) = max_j  c_{n,j} * max(v(phi'_{n,j}, 2 pi x), v(phi''_{n,j}, 2 pi x)).

Band endpoints are widened to representable points before case selection,
which keeps every case hypothesis certified; widening a band only raises
w_n, which is the sound direction (the weights must dominate, and larger
weights shrink the final volume).

Entry lists are pruned with two certified, pointwise-sound tests:

  * order test: for p* <= p with p + p* >= pi, v(p, psi) <= v(p*, psi)
    for every psi, so among entries with a single phase >= pi/2 only the
    Pareto frontier of (phase, constant) survives;
  * bucket test: an entry whose certified upper profile on a partition of
    [0, pi] lies below the kept entries' certified lower envelope on every
    bucket can never attain the max.

Pruning never changes the mathematical max; it only removes terms that
are dominated everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .contour import ContourMesh, SumEvaluator, bands_for_segment
from .errors import CertificationError
from .interval import (
    Interval, _dn, _up, certainly, half_pi_interval, interval, iv_add,
    iv_cos, iv_div, iv_hull, iv_max, iv_min, iv_mul, iv_sin, iv_sub,
    pi_interval, two_pi_interval,
)
from .zeros import WeightSet

ZERO_IV = interval(0)
TWO_IV = interval(2)


def _clamp(x: Interval, lo: mpfr, hi: mpfr) -> Interval:
    return Interval(max(x.lo, lo), min(x.hi, hi))


def v_penalty(phi: Interval, psi: Interval, prec: int | None = None) -> Interval:
    """Enclosure of v(phi, psi); inputs must lie in [0, pi] up to rounding."""
    p = prec or max(phi.precision, psi.precision)
    pi = pi_interval(p)
    for arg, name in ((phi, "phi"), (psi, "psi")):
        if arg.lo < 0 or arg.hi > pi.hi:
            raise ValueError(f"{name}={arg} outside [0, pi]")
    s = iv_add(phi, psi, p)
    cos_phi = iv_cos(phi, p)
    if certainly(s, "le", pi):
        out = iv_sub(cos_phi, iv_cos(s, p), p)
    elif certainly(s, "ge", pi):
        out = iv_add(cos_phi, interval(1, p), p)
    else:
        out = iv_hull(iv_sub(cos_phi, iv_cos(s, p), p),
                      iv_add(cos_phi, interval(1, p), p))
    return _clamp(out, mpfr(0), mpfr(2))


@dataclass(frozen=True, slots=True)
class PenaltyEntry:
    """One term of w_n: c * max(v(phi_a, .), v(phi_b, .)); phi_b None
    means the single-phase term c * v(phi_a, .)."""
    phi_a: Interval
    phi_b: Interval | None
    c: Interval


class _PreppedPhi:
    """Cached trig data for a (thin) phase value."""

    __slots__ = ("phi", "cos", "sin")

    def __init__(self, phi: Interval, prec: int):
        self.phi = phi
        self.cos = iv_cos(phi, prec)
        self.sin = iv_sin(phi, prec)


class PsiPoint:
    """psi = 2 pi x together with its trig enclosures."""

    __slots__ = ("psi", "cos", "sin")

    def __init__(self, x: Interval, prec: int):
        pi = pi_interval(prec)
        psi = iv_mul(two_pi_interval(prec), x, prec)
        if psi.lo < 0:
            raise ValueError(f"x={x} below 0")
        self.psi = _clamp(psi, mpfr(0), pi.hi)
        self.cos = iv_cos(self.psi, prec)
        self.sin = iv_sin(self.psi, prec)


def _v_fast(ph: _PreppedPhi, psi: PsiPoint, pi: Interval, prec: int) -> Interval:
    s_hi = _up(prec).add(ph.phi.hi, psi.psi.hi)
    s_lo = _dn(prec).add(ph.phi.lo, psi.psi.lo)
    # cos(phi + psi) by the addition formula, reusing cached trig values
    if s_hi <= pi.lo:
        cos_sum = iv_sub(iv_mul(ph.cos, psi.cos, prec),
                         iv_mul(ph.sin, psi.sin, prec), prec)
        out = iv_sub(ph.cos, cos_sum, prec)
    elif s_lo >= pi.hi:
        out = iv_add(ph.cos, interval(1, prec), prec)
    else:
        cos_sum = iv_sub(iv_mul(ph.cos, psi.cos, prec),
                         iv_mul(ph.sin, psi.sin, prec), prec)
        out = iv_hull(iv_sub(ph.cos, cos_sum, prec),
                      iv_add(ph.cos, interval(1, prec), prec))
    return _clamp(out, mpfr(0), mpfr(2))


class _PreppedEntry:
    __slots__ = ("a", "b", "c")

    def __init__(self, e: PenaltyEntry, prec: int):
        self.a = _PreppedPhi(e.phi_a, prec)
        self.b = _PreppedPhi(e.phi_b, prec) if e.phi_b is not None else None
        self.c = e.c

    def term(self, psi: PsiPoint, pi: Interval, prec: int) -> Interval:
        v = _v_fast(self.a, psi, pi, prec)
        if self.b is not None:
            v = iv_max(v, _v_fast(self.b, psi, pi, prec))
        return iv_mul(self.c, v, prec)


@dataclass(eq=False)
class PenaltyFamily:
    """Per-frequency envelope data defining the weights w_n.

    entries[n-1][0] is the synthetic aggregate at phi = pi/2; the rest are
    the surviving per-segment terms."""

    N: int
    prec: int
    entries: list[list[PenaltyEntry]]      # pruned, used for evaluation
    raw_counts: list[int]                  # entry counts before pruning
    claim3_margin: Interval | None = None  # min over (n, j) of pi - band width

    def __post_init__(self):
        self._prepped: list[list[_PreppedEntry] | None] = [None] * self.N

    def prepped(self, n: int) -> list[_PreppedEntry]:
        out = self._prepped[n - 1]
        if out is None:
            out = [_PreppedEntry(e, self.prec) for e in self.entries[n - 1]]
            self._prepped[n - 1] = out
        return out

    def float_model(self, n: int) -> list[tuple[float, float, float]]:
        """(c_hi, phi_a, phi_b) floats for predictor use; phi_b = nan if absent."""
        out = []
        for e in self.entries[n - 1]:
            out.append((float(e.c.hi), e.phi_a.mid_float(),
                        e.phi_b.mid_float() if e.phi_b is not None else math.nan))
        return out


def w_eval(family: PenaltyFamily, n: int, x: Interval,
           prec: int | None = None) -> Interval:
    """Enclosure of w_n(x) for x in [0, 1/2]; the upper endpoint is the
    certified bound used by the grid inversion."""
    p = prec or family.prec
    if x.lo < 0 or x.hi > mpfr("0.5"):
        raise ValueError(f"x={x} outside [0, 1/2]")
    psi = PsiPoint(x, p)
    return w_eval_at_psi(family, n, psi, p)


def w_eval_at_psi(family: PenaltyFamily, n: int, psi: PsiPoint,
                  prec: int) -> Interval:
    pi = pi_interval(prec)
    lo = mpfr(0)
    hi = mpfr(0)
    for pe in family.prepped(n):
        t = pe.term(psi, pi, prec)
        if t.lo > lo:
            lo = t.lo
        if t.hi > hi:
            hi = t.hi
    return Interval(lo, hi)


# -- envelope construction ---------------------------------------------------


def _case_factor(phi_lo: Interval, phi_hi: Interval, prec: int):
    """Widen the band to certified representable endpoints and pick the
    envelope case.  Returns (phi_a, phi_b, factor, is_crossing)."""
    pi2 = half_pi_interval(prec)
    half = interval("0.5", prec)
    p_rep = max(phi_lo.lo, mpfr(0))
    q_rep = phi_hi.hi
    if q_rep <= pi2.lo:
        # band certainly below pi/2
        gap = iv_mul(iv_sub(Interval(q_rep, q_rep), Interval(p_rep, p_rep), prec),
                     half, prec)
        factor = iv_div(interval(1, prec), iv_cos(gap, prec), prec)
        return Interval(p_rep, p_rep), Interval(q_rep, q_rep), factor, False
    if p_rep >= pi2.hi:
        # band certainly above pi/2: single-phase entry, factor 1
        return Interval(p_rep, p_rep), None, interval(1, prec), False
    # crossing (or unresolvable): widen so that phi_a <= pi/2 <= phi_b holds
    pa = min(p_rep, pi2.lo)
    gap = iv_mul(iv_sub(pi2, Interval(pa, pa), prec), half, prec)
    factor = iv_div(interval(1, prec), iv_cos(gap, prec), prec)
    return Interval(pa, pa), pi2, factor, True


def envelope_constants(mesh: ContourMesh, weights: WeightSet,
                       prune: bool = True, buckets: int = 96) -> PenaltyFamily:
    """Build the per-frequency entry lists from a certified mesh."""
    p = mesh.cfg.prec
    N = weights.N
    ev = SumEvaluator(weights, p)
    pi = pi_interval(p)
    pi2 = half_pi_interval(p)
    per_n: list[list[PenaltyEntry]] = [[] for _ in range(N)]
    agg: list[Interval] = [ZERO_IV] * N
    margin3: Interval | None = None

    for seg in mesh.segments:
        if not certainly(ZERO_IV, "lt", seg.u):
            raise CertificationError("penalty", "segment with uncertified u",
                                     j=seg.j, u=seg.u)
        exps = ev.exps(seg.y)
        bands = bands_for_segment(seg, weights, p)
        for n in range(1, N + 1):
            band = bands[n - 1]
            gap = iv_sub(pi, iv_sub(band.beta_hi, band.beta_lo, p), p)
            margin3 = gap if margin3 is None else iv_min(margin3, gap)
            base = iv_div(iv_mul(weights.amp(n), exps[n - 1], p), seg.u, p)
            phi_a, phi_b, factor, crossing = _case_factor(band.phi_lo,
                                                          band.phi_hi, p)
            c = iv_mul(base, factor, p)
            per_n[n - 1].append(PenaltyEntry(phi_a, phi_b, c))
            if crossing:
                agg[n - 1] = iv_max(agg[n - 1], c)

    raw_counts = [len(es) + 1 for es in per_n]
    out: list[list[PenaltyEntry]] = []
    for n in range(1, N + 1):
        aggregate = PenaltyEntry(pi2, None, agg[n - 1])
        body = per_n[n - 1]
        if prune:
            body = prune_entries(body, p, buckets, protected=[aggregate])
        out.append([aggregate] + body)
    return PenaltyFamily(N, p, out, raw_counts, margin3)


# -- pruning -----------------------------------------------------------------


def _frontier_filter(entries: list[PenaltyEntry], prec: int):
    """Order-test pruning among single-phase entries with phase >= pi/2."""
    pi2 = half_pi_interval(prec)
    high: list[tuple[int, PenaltyEntry]] = []
    rest: list[PenaltyEntry] = []
    for i, e in enumerate(entries):
        if e.phi_b is None and e.phi_a.lo >= pi2.hi:
            high.append((i, e))
        else:
            rest.append(e)
    # sort by phase; an entry is dominated if an earlier (smaller) phase
    # carries a certainly-larger constant
    high.sort(key=lambda t: t[1].phi_a.lo)
    kept: list[PenaltyEntry] = []
    best_c_lo = None
    for _, e in high:
        if best_c_lo is not None and e.c.hi <= best_c_lo:
            continue
        kept.append(e)
        if best_c_lo is None or e.c.lo > best_c_lo:
            best_c_lo = e.c.lo
    return rest, kept


def _bucket_edges(buckets: int, prec: int) -> list[PsiPoint]:
    # x = k/(2*buckets) spans psi = k pi / buckets over [0, pi]
    from fractions import Fraction
    return [PsiPoint(interval(Fraction(k, 2 * buckets), prec), prec)
            for k in range(buckets + 1)]


def _phase_slope_bounds(phi: Interval, half_step: Interval, prec: int,
                        pi: Interval):
    """Certified bounds for the psi -> 0 factorization on the first bucket.

    On (0, psi_1]:  v(phi, psi) <= 2 sin(psi/2) * UB  and, when the branch
    cannot switch on the bucket, >= 2 sin(psi/2) * LB, with

        UB = max( sup sin([phi, phi + psi_1/2]), cos(phi/2) ),
        LB = min( sin(phi), sin(phi + psi_1/2) )          (branch-1 only).

    The cos(phi/2) term covers the constant branch, where
    v = 2 cos^2(phi/2) <= 2 sin(psi/2) cos(phi/2) because
    sin(psi/2) >= cos(phi/2) whenever phi + psi >= pi.
    """
    stretched = Interval(phi.lo, _up(prec).add(phi.hi, half_step.hi))
    ub = max(iv_sin(stretched, prec).hi,
             iv_cos(iv_mul(phi, interval("0.5", prec), prec), prec).hi)
    branch1_certain = _up(prec).add(stretched.hi, half_step.hi) <= pi.lo
    if branch1_certain:
        lb = min(iv_sin(phi, prec).lo,
                 iv_sin(Interval(stretched.hi, stretched.hi), prec).lo)
        lb = max(lb, mpfr(0))
    else:
        lb = mpfr(0)
    return lb, ub


def _entry_slope_bounds(e: PenaltyEntry, half_step: Interval, prec: int,
                        pi: Interval):
    lb, ub = _phase_slope_bounds(e.phi_a, half_step, prec, pi)
    if e.phi_b is not None:
        lb2, ub2 = _phase_slope_bounds(e.phi_b, half_step, prec, pi)
        lb, ub = max(lb, lb2), max(ub, ub2)
    dn, up = _dn(prec), _up(prec)
    return dn.mul(e.c.lo, lb), up.mul(e.c.hi, ub)


def prune_entries(entries: list[PenaltyEntry], prec: int, buckets: int = 96,
                  protected: list[PenaltyEntry] | None = None
                  ) -> list[PenaltyEntry]:
    """Certified removal of entries that can never attain the max.

    `protected` entries are never dropped but contribute to the envelope.
    Buckets k >= 1 compare entry values at bucket edges (v is non-decreasing
    in psi); bucket 0, where all terms vanish at psi = 0, is compared on the
    factored scale v / (2 sin(psi/2)).
    """
    if len(entries) <= 8:
        return entries
    rest, frontier = _frontier_filter(entries, prec)
    cands = rest + frontier
    pi = pi_interval(prec)
    edges = _bucket_edges(buckets, prec)
    half_step = iv_mul(edges[1].psi, interval("0.5", prec), prec)

    def profiles(e: PenaltyEntry):
        pe = _PreppedEntry(e, prec)
        s_lo, s_hi = _entry_slope_bounds(e, half_step, prec, pi)
        lo = [s_lo] + [pe.term(edges[k], pi, prec).lo for k in range(1, buckets)]
        hi = [s_hi] + [pe.term(edges[k + 1], pi, prec).hi
                       for k in range(1, buckets)]
        return lo, hi

    cands.sort(key=lambda e: e.c.hi, reverse=True)
    env = [mpfr(0)] * buckets
    kept: list[PenaltyEntry] = []
    kept_lo: list[list[mpfr]] = []
    kept_hi: list[list[mpfr]] = []
    for e in protected or []:
        lo, _ = profiles(e)
        for k in range(buckets):
            if lo[k] > env[k]:
                env[k] = lo[k]
    for e in cands:
        lo, hi = profiles(e)
        if all(hi[k] <= env[k] for k in range(buckets)):
            continue
        kept.append(e)
        kept_lo.append(lo)
        kept_hi.append(hi)
        for k in range(buckets):
            if lo[k] > env[k]:
                env[k] = lo[k]
    # second pass: drop survivors dominated by the other survivors plus
    # the protected entries
    base = [mpfr(0)] * buckets
    for e in protected or []:
        lo, _ = profiles(e)
        for k in range(buckets):
            if lo[k] > base[k]:
                base[k] = lo[k]
    final: list[PenaltyEntry] = []
    for i, e in enumerate(kept):
        others = base[:]
        for j2 in range(len(kept)):
            if j2 == i:
                continue
            lj = kept_lo[j2]
            for k in range(buckets):
                if lj[k] > others[k]:
                    others[k] = lj[k]
        if all(kept_hi[i][k] <= others[k] for k in range(buckets)):
            continue
        final.append(e)
    return final
