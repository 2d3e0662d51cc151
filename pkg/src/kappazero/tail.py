"""Certified upper bound for the truncation error of the zero expansion.

R*_N(y) = sum_{n>N} |rho_0/rho_n| e^{-omega_n y} is bounded above by the
computable quantity

    Rtilde_N(y) = sum_{n=N+1}^{N'} amp_n e^{-omega_n y}  +  tail(T_1, y)

where T_1 = (gamma_{N'} + gamma_{N'+1})/2 separates the last summed zero
from the rest, and tail(T_1, y) is the closed form

    |rho_0| e^{gamma_0 y} / (T_1 e^{T_1 y}) *
        ( log(T_1) / (2 pi y) + 4 log(T_1) + 2 / (T_1 y) ).

When T_1 y <= 1 is certified, a second closed form (with log^2 y and
|log y| terms) is also evaluated and the interval minimum of the two is
used; both bound the same positive series, so the minimum is sound.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import CertificationError, IntervalDomainError
from .interval import (
    DEFAULT_PRECISION, Interval, _dn, _neg, _up, certainly, interval, iv_abs,
    iv_add, iv_div, iv_exp, iv_log, iv_min, iv_mul, iv_sqr, iv_sub,
    two_pi_interval,
)
from .zeros import WeightSet, ZeroTable


@dataclass(frozen=True)
class TailBoundConfig:
    N: int
    Nprime: int
    T1: Interval


def make_tail_config(table: ZeroTable, N: int, Nprime: int,
                     prec: int = DEFAULT_PRECISION) -> TailBoundConfig:
    """T_1 = (gamma_{N'} + gamma_{N'+1})/2, with its separation certified."""
    if Nprime <= N:
        raise ValueError(f"Nprime={Nprime} must exceed N={N}")
    if Nprime + 1 >= table.count:
        raise ValueError(f"Nprime={Nprime} needs {Nprime + 2} zeros, "
                         f"table has {table.count}")
    a, b = table.gamma(Nprime), table.gamma(Nprime + 1)
    t1 = iv_div(iv_add(a, b, prec), interval(2, prec), prec)
    if not (certainly(a, "lt", t1) and certainly(t1, "lt", b)):
        raise CertificationError(
            "tail", "T1 not certainly strictly between gamma_N' and gamma_N'+1",
            T1=t1, lo=a, hi=b)
    return TailBoundConfig(N, Nprime, t1)


def lemma5_tail_detailed(y: Interval, T1: Interval, rho0_abs: Interval,
                         gamma0: Interval, prec: int | None = None):
    """Closed-form bound for the series beyond T1; returns (bound, branch)."""
    if not certainly(interval(0), "lt", y):
        raise IntervalDomainError(f"y must be certainly positive: {y}")
    if not certainly(interval(0), "lt", T1):
        raise IntervalDomainError(f"T1 must be certainly positive: {T1}")
    p = prec or max(y.precision, T1.precision, rho0_abs.precision)
    two_pi = two_pi_interval(p)
    four = interval(4, p)
    two = interval(2, p)
    one = interval(1, p)

    e_g0y = iv_exp(iv_mul(gamma0, y, p), p)
    e_t1y = iv_exp(iv_mul(T1, y, p), p)
    log_t1 = iv_log(T1, p)
    t1y = iv_mul(T1, y, p)

    inner1 = iv_add(iv_add(iv_div(log_t1, iv_mul(two_pi, y, p), p),
                           iv_mul(four, log_t1, p), p),
                    iv_div(two, t1y, p), p)
    b1 = iv_div(iv_mul(iv_mul(rho0_abs, e_g0y, p), inner1, p),
                iv_mul(T1, e_t1y, p), p)

    branch = "first"
    bound = b1
    if certainly(t1y, "le", one):
        log_y = iv_log(y, p)
        four_pi = iv_mul(two_pi, two, p)
        inner2 = iv_add(iv_add(iv_div(iv_sqr(log_y, p), four_pi, p),
                               iv_div(iv_mul(four, log_t1, p), T1, p), p),
                        iv_div(two, T1, p), p)
        head = iv_mul(iv_div(iv_mul(rho0_abs, e_g0y, p), e_t1y, p), inner2, p)
        corr = iv_div(iv_mul(iv_mul(rho0_abs,
                                    iv_exp(iv_sub(iv_mul(gamma0, y, p), one, p), p), p),
                             iv_abs(log_y), p),
                      two_pi, p)
        b2 = iv_add(head, corr, p)
        if b2.hi < b1.hi:
            branch = "second"
        bound = iv_min(b1, b2)
    return Interval(max(bound.lo, mpfr(0)), bound.hi), branch


def lemma5_tail(y: Interval, T1: Interval, rho0_abs: Interval,
                gamma0: Interval, prec: int | None = None) -> Interval:
    return lemma5_tail_detailed(y, T1, rho0_abs, gamma0, prec)[0]


def _term_endpoints(amp: Interval, om: Interval, y: Interval, dn, up):
    """Endpoints of amp * exp(-omega y) for positive amp, omega, y."""
    lo = dn.mul(amp.lo, dn.exp(_neg(up.mul(om.hi, y.hi))))
    hi = up.mul(amp.hi, up.exp(_neg(dn.mul(om.lo, y.lo))))
    return lo, hi


class TailEvaluator:
    """Evaluates Rtilde_N(y) with per-y memoization.

    fast=True replaces the far part of the truncated sum (terms below
    2^-80 of the running total) with certified per-group bounds built from
    precomputed amplitude block sums; the result is a wider but still
    correct enclosure of the same quantity, much cheaper at mesh scale.
    """

    GROUP = 32
    FAST_REL_BITS = 80

    def __init__(self, weights: WeightSet, cfg: TailBoundConfig,
                 prec: int = DEFAULT_PRECISION):
        if cfg.Nprime >= weights.count:
            raise ValueError("weights table shorter than Nprime + 1")
        self.weights = weights
        self.cfg = cfg
        self.prec = prec
        self._memo: dict[bytes, Interval] = {}
        self._groups: list[tuple[int, int, Interval]] | None = None

    def _group_table(self):
        if self._groups is None:
            dn, up = _dn(self.prec), _up(self.prec)
            groups = []
            n = self.cfg.N + 1
            while n <= self.cfg.Nprime:
                stop = min(n + self.GROUP - 1, self.cfg.Nprime)
                slo, shi = mpfr(0), mpfr(0)
                for k in range(n, stop + 1):
                    a = self.weights.amp(k)
                    slo = dn.add(slo, a.lo)
                    shi = up.add(shi, a.hi)
                groups.append((n, stop, Interval(slo, shi)))
                n = stop + 1
            self._groups = groups
        return self._groups

    def truncated_sum(self, y: Interval, fast: bool = False) -> Interval:
        """Enclosure of sum_{n=N+1}^{N'} amp_n e^{-omega_n y}."""
        p = self.prec
        dn, up = _dn(p), _up(p)
        w = self.weights
        if not fast:
            lo, hi = mpfr(0), mpfr(0)
            for n in range(self.cfg.N + 1, self.cfg.Nprime + 1):
                tl, th = _term_endpoints(w.amp(n), w.omega(n), y, dn, up)
                lo = dn.add(lo, tl)
                hi = up.add(hi, th)
            return Interval(lo, hi)
        lo, hi = mpfr(0), mpfr(0)
        grouping = False
        for first, last, amp_sum in self._group_table():
            if not grouping:
                lead_hi = up.mul(w.amp(first).hi,
                                 up.exp(_neg(dn.mul(w.omega(first).lo, y.lo))))
                if hi > 0 and lead_hi < hi * mpfr(2) ** -self.FAST_REL_BITS:
                    grouping = True
            if grouping:
                glo = dn.mul(amp_sum.lo, dn.exp(_neg(up.mul(w.omega(last).hi, y.hi))))
                ghi = up.mul(amp_sum.hi, up.exp(_neg(dn.mul(w.omega(first).lo, y.lo))))
                lo = dn.add(lo, glo)
                hi = up.add(hi, ghi)
            else:
                for n in range(first, last + 1):
                    tl, th = _term_endpoints(w.amp(n), w.omega(n), y, dn, up)
                    lo = dn.add(lo, tl)
                    hi = up.add(hi, th)
        return Interval(lo, hi)

    def bound(self, y: Interval, fast: bool = True) -> Interval:
        key = (b"f" if fast else b"e") + y.cache_key()
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if not certainly(interval(0), "lt", y):
            raise IntervalDomainError(f"y must be certainly positive: {y}")
        s = self.truncated_sum(y, fast=fast)
        t = lemma5_tail(y, self.cfg.T1, self.weights.rho0_abs,
                        self.weights.gamma0, self.prec)
        out = iv_add(s, t, self.prec)
        self._memo[key] = out
        return out


def tail_bound(y: Interval, weights: WeightSet, cfg: TailBoundConfig,
               prec: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of Rtilde_N(y), an upper bound for R*_N(y)."""
    return TailEvaluator(weights, cfg, prec).bound(y, fast=False)
