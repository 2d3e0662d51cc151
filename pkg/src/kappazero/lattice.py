"""Small integer combinations of near-dependent vectors, rigorously certified.

The input vectors are the projections u_j = e_j - mu_j theta of the unit
basis onto the orthogonal complement of theta (theta_n = omega_n / 2 pi).
They span an (N-1)-dimensional space, so integer combinations can be made
arbitrarily small; a bounded LLL-style reduction (Lovasz parameter 1/4,
reduction aborted once any coefficient would exceed the bound M) finds a
full row basis of such combinations while tracking the integer coefficient
matrix C.  The reduction itself runs on round-to-nearest point values (the
"shadow") and carries no rigor; it is a heuristic search.

The certificate is rigorous: the quantities

    S_n = sum_k | sum_j C[k][j] u_{j,n} |,    n = 1..N,

are re-evaluated in interval arithmetic straight from the zero-table
enclosures, S_n < d is certified per coordinate, and det(C) != 0 is
established in exact integer arithmetic.  With the box D = prod (-d, d),
the componentwise bound implies that every vertex sum_k ±(C u)_k lies
inside the open box, which is what the tiling argument needs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import CertificationError, HeuristicFailure
from .interval import (
    Interval, _dn, _up, certainly, interval, interval_from_json,
    interval_to_json, iv_abs, iv_add, iv_div, iv_mul, iv_sub,
    two_pi_interval,
)
from .zeros import WeightSet


def _digits_to_bits(digits: int) -> int:
    return int(digits * 3.3219280948873626) + 8


@dataclass(frozen=True)
class ProjectionSet:
    thetas: tuple[Interval, ...]
    mus: tuple[Interval, ...]
    u_rows: tuple[tuple[Interval, ...], ...]   # u_rows[j][n], 0-based
    shadow_prec: int
    shadow_u: tuple[tuple[mpfr, ...], ...]

    @property
    def N(self) -> int:
        return len(self.thetas)


def make_projections_from_thetas(thetas: list[Interval],
                                 precision_digits: int) -> ProjectionSet:
    n = len(thetas)
    if n < 2:
        raise ValueError("need at least 2 frequencies")
    p = max(t.precision for t in thetas)
    dot = interval(0, p)
    for t in thetas:
        dot = iv_add(dot, iv_mul(t, t, p), p)
    mus = tuple(iv_div(t, dot, p) for t in thetas)
    rows = []
    for j in range(n):
        row = []
        for i in range(n):
            e = interval(1 if i == j else 0, p)
            row.append(iv_sub(e, iv_mul(mus[j], thetas[i], p), p))
        rows.append(tuple(row))
    _check_orthogonality(rows, thetas, p)

    sp = _digits_to_bits(precision_digits)
    ctx = gmpy2.context(precision=sp)
    sth = [t.mid_mpfr(sp) for t in thetas]
    sdot = mpfr(0)
    for t in sth:
        sdot = ctx.add(sdot, ctx.mul(t, t))
    srows = []
    for j in range(n):
        smu = ctx.div(sth[j], sdot)
        srows.append(tuple(
            ctx.sub(mpfr(1 if i == j else 0), ctx.mul(smu, sth[i]))
            for i in range(n)))
    return ProjectionSet(tuple(thetas), mus, tuple(rows), sp, tuple(srows))


def _check_orthogonality(rows, thetas, p):
    for j, row in enumerate(rows):
        dot = interval(0, p)
        for i, t in enumerate(thetas):
            dot = iv_add(dot, iv_mul(row[i], t, p), p)
        slack = max(float(dot.width()) * 10, 1e-30)
        if not (dot.lo <= 0 <= dot.hi or abs(float(dot.lo)) < slack):
            raise CertificationError(
                "projections", "u_j not orthogonal to theta", j=j, dot=dot)


def make_projections(weights: WeightSet, precision_digits: int) -> ProjectionSet:
    """theta_n = omega_n / 2 pi for n = 1..N, plus the heuristic shadow."""
    p = max(weights.omega(n).precision for n in range(1, weights.N + 1))
    two_pi = two_pi_interval(p)
    thetas = [iv_div(weights.omega(n), two_pi, p)
              for n in range(1, weights.N + 1)]
    return make_projections_from_thetas(thetas, precision_digits)


@dataclass(frozen=True)
class LLLResult:
    C: tuple[tuple[int, ...], ...]
    early_return: bool
    op_log: tuple[tuple, ...]
    sweeps: int
    elapsed: float


def lll_bounded(proj: ProjectionSet, M: int,
                lll_delta: Fraction = Fraction(1, 4),
                log_ops: bool = False) -> LLLResult:
    """Bounded LLL reduction on the point-value shadow.

    Follows the reduction loop with Lovasz parameter `lll_delta` (1/4 by
    default), integer coefficient tracking, reduced vectors recomputed from
    the coefficients, and an early return as soon as a reduction step would
    push any coefficient past M.  Heuristic only: no success guarantee.
    """
    t0 = time.time()
    N = proj.N
    u = proj.shadow_u
    ctx = gmpy2.context(precision=proj.shadow_prec)
    delta = ctx.div(mpfr(lll_delta.numerator), mpfr(lll_delta.denominator))

    c = [[1 if i == j else 0 for i in range(N)] for j in range(N)]
    v = [list(row) for row in u]
    vstar = [[mpfr(0)] * N for _ in range(N)]
    B = [mpfr(0)] * N
    mu = [[mpfr(0)] * N for _ in range(N)]
    ops: list[tuple] = []

    def dot(a, b):
        s = mpfr(0)
        for x, y in zip(a, b):
            s = ctx.add(s, ctx.mul(x, y))
        return s

    def update(lo: int, hi: int):
        # paper indices are 1-based; lo/hi are too
        for a in range(1, lo):
            if B[a - 1] == 0:
                raise HeuristicFailure(f"zero Gram-Schmidt norm at row {a}")
            for b in range(lo, hi + 1):
                mu[b - 1][a - 1] = ctx.div(dot(v[b - 1], vstar[a - 1]), B[a - 1])
        for a in range(lo, N + 1):
            w = list(v[a - 1])
            for b in range(1, a):
                f = mu[a - 1][b - 1]
                vb = vstar[b - 1]
                for i in range(N):
                    w[i] = ctx.sub(w[i], ctx.mul(f, vb[i]))
            vstar[a - 1] = w
            B[a - 1] = dot(w, w)
            if B[a - 1] == 0 and a < N:
                # a division by B[a] is imminent for the rows below
                raise HeuristicFailure(f"zero Gram-Schmidt norm at row {a}")
            for b in range(a + 1, N + 1):
                mu[b - 1][a - 1] = ctx.div(dot(v[b - 1], vstar[a - 1]), B[a - 1])

    def recompute_v(k: int):
        row = [mpfr(0)] * N
        ck = c[k - 1]
        for i in range(N):
            ci = ck[i]
            if ci:
                ui = u[i]
                for t in range(N):
                    row[t] = ctx.add(row[t], ctx.mul(ci, ui[t]))
        v[k - 1] = row
        if all(x == 0 for x in row):
            raise HeuristicFailure(f"row {k} reduced to the exact zero vector")

    update(1, N)
    k = 2
    sweeps = 0
    while k != N + 1:
        sweeps += 1
        for j in range(k - 1, 0, -1):
            q = _round_int(mu[k - 1][j - 1])
            if max(abs(c[k - 1][i] - q * c[j - 1][i]) for i in range(N)) > M:
                return LLLResult(tuple(tuple(r) for r in c), True,
                                 tuple(ops), sweeps, time.time() - t0)
            for i in range(N):
                c[k - 1][i] -= q * c[j - 1][i]
            if log_ops:
                ops.append(("sub", k, j, q))
            recompute_v(k)
            update(k, k)
        if B[k - 1] >= ctx.mul(ctx.sub(delta, ctx.mul(mu[k - 1][k - 2],
                                                      mu[k - 1][k - 2])),
                               B[k - 2]):
            k += 1
        else:
            c[k - 2], c[k - 1] = c[k - 1], c[k - 2]
            v[k - 2], v[k - 1] = v[k - 1], v[k - 2]
            if log_ops:
                ops.append(("swap", k))
            update(k - 1, k)
            k = max(2, k - 1)
    return LLLResult(tuple(tuple(r) for r in c), False, tuple(ops), sweeps,
                     time.time() - t0)


def _round_int(x: mpfr) -> int:
    return int(gmpy2.context(precision=max(x.precision, 64)).rint(x))


def replay_ops(op_log, N: int) -> list[list[int]]:
    """Apply a recorded operation log to the identity matrix."""
    c = [[1 if i == j else 0 for i in range(N)] for j in range(N)]
    for op in op_log:
        if op[0] == "sub":
            _, k, j, q = op
            for i in range(N):
                c[k - 1][i] -= q * c[j - 1][i]
        elif op[0] == "swap":
            k = op[1]
            c[k - 2], c[k - 1] = c[k - 1], c[k - 2]
        else:
            raise ValueError(f"unknown op {op!r}")
    return c


def int_det(rows) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in r] for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i]:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for col in range(i + 1, n):
                a[r][col] = (a[r][col] * a[i][i] - a[r][i] * a[i][col]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class TilingCertificate:
    C: tuple[tuple[int, ...], ...]
    d: Interval
    det: int
    sums: tuple[Interval, ...]

    def to_json(self) -> dict:
        return {
            "format": "tiling-certificate/1",
            "N": len(self.C),
            "C": [[str(x) for x in row] for row in self.C],
            "d": interval_to_json(self.d),
            "det": str(self.det),
            "sums": [interval_to_json(s) for s in self.sums],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TilingCertificate":
        return cls(tuple(tuple(int(x) for x in row) for row in obj["C"]),
                   interval_from_json(obj["d"]), int(obj["det"]),
                   tuple(interval_from_json(s) for s in obj["sums"]))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "TilingCertificate":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _scale_int(x: Interval, k: int, dn, up) -> tuple[mpfr, mpfr]:
    if k >= 0:
        return dn.mul(x.lo, k), up.mul(x.hi, k)
    return dn.mul(x.hi, k), up.mul(x.lo, k)


def certify(C, proj: ProjectionSet, d_target: Interval | None,
            prec: int | None = None) -> TilingCertificate:
    """Rigorous re-evaluation of the per-coordinate sums from the interval
    projections, independent of the heuristic's shadow values.

    With d_target None, d is set to twice the largest certified sum (the
    reduced-scale policy); otherwise every S_n < d_target is certified.
    """
    if hasattr(C, "C"):
        C = C.C
    N = proj.N
    if len(C) != N or any(len(r) != N for r in C):
        raise ValueError("coefficient matrix shape mismatch")
    p = prec or (max(t.precision for t in proj.thetas) + 64)
    dn, up = _dn(p), _up(p)
    sums = []
    for n in range(N):
        s_lo = mpfr(0)
        s_hi = mpfr(0)
        for k in range(N):
            w_lo = mpfr(0)
            w_hi = mpfr(0)
            for j in range(N):
                ckj = C[k][j]
                if ckj:
                    tlo, thi = _scale_int(proj.u_rows[j][n], ckj, dn, up)
                    w_lo = dn.add(w_lo, tlo)
                    w_hi = up.add(w_hi, thi)
            a = iv_abs(Interval(w_lo, w_hi))
            s_lo = dn.add(s_lo, a.lo)
            s_hi = up.add(s_hi, a.hi)
        sums.append(Interval(s_lo, s_hi))

    det = int_det(C)
    if det == 0:
        raise CertificationError("lattice", "coefficient matrix is singular", claim="claim4")
    if d_target is None:
        worst = max(s.hi for s in sums)
        d = Interval(up.mul(worst, 2), up.mul(worst, 2))
        if worst == 0:
            raise CertificationError("lattice", "all sums are zero")
    else:
        d = d_target
    bad = [n for n, s in enumerate(sums)
           if not certainly(s, "lt", d)]
    if bad:
        n0 = max(bad, key=lambda n: sums[n].hi)
        raise CertificationError(
            "lattice", "coordinate sum not certainly below d",
            n=n0 + 1, sum=sums[n0], d=d, claim="claim4")
    return TilingCertificate(tuple(tuple(int(x) for x in r) for r in C),
                             d, det, tuple(sums))
