"""From envelope constants to the certified volume, at toy scale.

Each frequency gets a weight w_n(x): the certified price, in units of the
clearance u_j, of shifting that frequency's phase by 2 pi x.  Shifts tau
whose penalty sum stays below 1 put a zero inside the shifted contour;
the set of good residue vectors therefore contains a box grid whose
volume the truncated convolution bounds from below.
"""

from fractions import Fraction

from kappazero.config import PAPER_BREAKPOINTS
from kappazero.contour import build_mesh, make_contour_config
from kappazero.interval import fmt, interval
from kappazero.penalty import envelope_constants, w_eval
from kappazero.tail import make_tail_config
from kappazero.volume import convolve_volume, final_bound, invert_w
from kappazero.zeros import bundled_zeros_path, derive_weights, load_zero_table

table = load_zero_table(bundled_zeros_path())
weights = derive_weights(table, 8, prec=256)
tail_cfg = make_tail_config(table, 8, 2000)
cfg = make_contour_config("0.132737", "0.0468918", "0.14", 128,
                          PAPER_BREAKPOINTS)
mesh = build_mesh(cfg, weights, tail_cfg)
family = envelope_constants(mesh, weights)

print("pruning: per-frequency envelope entries kept / raw")
for n in range(1, 9):
    print(f"  n={n}: {len(family.entries[n - 1]):>3} / {family.raw_counts[n - 1]}")

print("\nweights are 0 at x = 0 and grow toward x = 1/2:")
for xs in ("0", "0.05", "0.25", "0.5"):
    w = w_eval(family, 1, interval(xs))
    print(f"  w_1({xs:>4}) <= {float(w.hi):.6f}")

# invert the weights into a grid, then convolve
ell = 64
eps = interval("0.0001")
grid = invert_w(family, ell, eps)
row = grid.rows[0]
print(f"\ninversion grid for n = 1 (ell = {ell}): "
      f"x_1 = {float(Fraction(row[1], 1 << 48)):.6f} ... "
      f"x_{ell} = {float(Fraction(row[-1], 1 << 48)):.6f}")

sum_r = convolve_volume(grid)
res = final_bound(sum_r, interval("0.132737"), 8, weights.gamma0)
print(f"\nsum of r_i        : {fmt(res.sum_r, 10)}")
print(f"kappa increment   : {fmt(res.kappa_increment, 10)}")
print(f"kappa_0 lower bnd : {fmt(res.kappa0_lower, 10)}")
print("\n(The documented reduced and paper configurations push ell to 400 "
      "and 16000; run `kappazero run --config reduced`.)")
