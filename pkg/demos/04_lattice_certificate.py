"""Small integer combinations and the tiling certificate.

theta = (1, sqrt 2) is the classic warm-up: the reduction discovers the
continued-fraction convergents of sqrt 2.  The real pipeline feeds the
first N zeta frequencies at a thousand decimal digits and pushes the
coefficient bound to 1e300; the heuristic needs no rigor because the
certificate re-checks every sum in interval arithmetic afterwards.
"""

from kappazero.interval import fmt, interval, iv_sqrt
from kappazero.lattice import (
    certify, lll_bounded, make_projections, make_projections_from_thetas,
)
from kappazero.zeros import bundled_zeros_path, derive_weights, load_zero_table

thetas = [interval(1, 256), iv_sqrt(interval(2, 256))]
proj = make_projections_from_thetas(thetas, 60)
res = lll_bounded(proj, M=10 ** 6)
print("theta = (1, sqrt2), M = 1e6")
print(f"  C = {res.C}  (rows ~ numerator/denominator pairs of sqrt2)")
cert = certify(res.C, proj, None)
print(f"  certified d = {fmt(cert.d, 8)}, det(C) = {cert.det}")

# now the genuine frequencies: N = 8, coefficients up to 1e40
table = load_zero_table(bundled_zeros_path())
weights = derive_weights(table, 8, limit=9)  # natural (high) precision
proj = make_projections(weights, 200)
res = lll_bounded(proj, M=10 ** 40)
print(f"\nzeta frequencies, N = 8, M = 1e40: {res.sweeps} sweeps, "
      f"early_return = {res.early_return}")
height = max(abs(x) for row in res.C for x in row)
print(f"  coefficient height ~ 1e{len(str(height)) - 1}")
cert = certify(res.C, proj, None)
print(f"  certified d = {fmt(cert.d, 8)} (about H^(-1/(N-1)) per row)")
for n, s in enumerate(cert.sums, 1):
    print(f"    coordinate {n}: sum = {fmt(s, 6)}")
