"""The contour mesh and its certified claims, on a coarse mesh.

The rectangle's bottom edge sits below the highest zero of the phase-
aligned partial sum, the top edge above it; walking the boundary, the
rotated real part Re(F e^{-i alpha_j}) must certifiably clear zero on
every segment after subtracting the linearization error and the series
tail.  That clearance (u_j > 0) is what forces a zero inside every
appropriately shifted copy of the contour.
"""

from fractions import Fraction

from kappazero.config import PAPER_BREAKPOINTS
from kappazero.contour import (
    alpha_schedule, build_mesh, eval_FNeta, make_contour_config, z1_point,
)
from kappazero.interval import fmt, interval
from kappazero.tail import make_tail_config
from kappazero.zeros import bundled_zeros_path, derive_weights, load_zero_table

table = load_zero_table(bundled_zeros_path())
weights = derive_weights(table, 8, prec=256)
tail_cfg = make_tail_config(table, 8, 2000)

m = 128
cfg = make_contour_config("0.132737", "0.0468918", "0.14", m, PAPER_BREAKPOINTS)

print("contour corners:")
for t in (Fraction(0), Fraction(1, 8), Fraction(3, 8), Fraction(5, 8),
          Fraction(7, 8)):
    x, y = z1_point(t, cfg)
    print(f"  t = {str(t):>4}: ({fmt(x, 6)}, {fmt(y, 6)})")

# F at the bottom center is negative (the sum exceeds 1 below the zero),
# at the top center positive; the zero of the phase-aligned sum lies
# between the two heights.
for ys in ("0.0468918", "0.14"):
    re, im = eval_FNeta((interval(0), interval(ys)), weights)
    print(f"F at i*{ys:>10}: Re {fmt(re, 8)}")

sched = alpha_schedule(cfg)
print(f"\nrotation schedule: alpha_1 {fmt(sched[1], 6)} ... "
      f"alpha_m {fmt(sched[m], 6)}")

mesh = build_mesh(cfg, weights, tail_cfg)
print(f"\nmesh with m = {m} certified:")
print(f"  claim 1 margin (rotations/steps): {fmt(mesh.claim1_margin, 8)}")
print(f"  claim 2 margin (min u_j)        : {fmt(mesh.claim2_margin, 8)}")
worst = min(mesh.segments, key=lambda s: float(s.u.lo))
print(f"  tightest segment: j = {worst.j} at height {fmt(worst.y, 6)}")
