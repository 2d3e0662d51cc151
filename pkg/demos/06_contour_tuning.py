"""Float-only exploration of contour parameters.

Nothing here is rigorous; this is the kind of search that produces the
delta / Y0 / Y1 / alpha-breakpoint values a config file then pins down.
The certified pipeline re-checks whatever this exploration suggests, so
a bad choice can never corrupt a certificate, it can only fail one.

Requires numpy (not a package dependency).
"""

import numpy as np

from kappazero.zeros import bundled_zeros_path, load_zero_table

table = load_zero_table(bundled_zeros_path())
zeros = np.array([g.mid_float() for g in table.ordinates[:2002]])
g0 = zeros[0]
om = zeros[1:] - g0
amp = np.sqrt(0.25 + g0 ** 2) / np.sqrt(0.25 + zeros[1:] ** 2)

N = 8
BP = [(0, 0.0), (1 / 32, 0.489819), (1 / 8, 1.85802), (3 / 16, 2.04829),
      (3 / 8, 2.90189), (1 / 2, np.pi)]


def z1(t, d, y0, y1):
    x = np.where(t <= 1/8, 4*t*d,
        np.where(t <= 3/8, d/2,
        np.where(t <= 5/8, -4*(t-1/2)*d,
        np.where(t <= 7/8, -d/2, 4*(t-1)*d))))
    y = np.where(t <= 1/8, y0,
        np.where(t <= 3/8, y0 + 4*(t-1/8)*(y1-y0),
        np.where(t <= 5/8, y1,
        np.where(t <= 7/8, y1 + 4*(t-5/8)*(y0-y1), y0))))
    return x, y


def min_clearance(d, y0, y1, m=800, Np=2000):
    t = np.arange(m + 1) / m
    x, y = z1(t, d, y0, y1)
    E = np.exp(-np.outer(y, om[:N]))
    F = (1 - (amp[:N]*E*np.cos(np.outer(x, om[:N]))).sum(1)) \
        - 1j*(amp[:N]*E*np.sin(np.outer(x, om[:N]))).sum(1)
    f = (om[:N]*amp[:N]*E*np.sin(np.outer(x, om[:N]))).sum(1) \
        - 1j*(om[:N]*amp[:N]*E*np.cos(np.outer(x, om[:N]))).sum(1)
    j = np.arange(1, m + 1)
    xs = np.array([p[0] for p in BP]); vs = np.array([p[1] for p in BP])
    al = np.where(j <= m//2, -np.pi + np.interp((2*j-1)/(2*m), xs, vs),
                  np.pi - np.interp((2*(m-j)+1)/(2*m), xs, vs))
    rot = np.exp(-1j*al)
    b = 0.5*np.abs(np.diff(x + 1j*y))
    yj = np.minimum(y[:-1], y[1:])
    M = (amp[:N]*om[:N]**2*np.exp(-np.outer(yj, om[:N]))).sum(1)
    T1 = 0.5*(zeros[Np] + zeros[Np+1])
    tail = (amp[N:Np]*np.exp(-np.outer(yj, om[N:Np]))).sum(1)
    rho0 = np.sqrt(0.25 + g0**2)
    tail += rho0*np.exp(g0*yj)/(T1*np.exp(T1*yj)) * (
        np.log(T1)/(2*np.pi*yj) + 4*np.log(T1) + 2/(T1*yj))
    e0 = (F[:-1]*rot).real + np.minimum(0, (b*f[:-1]*rot).real)
    e1 = (F[1:]*rot).real + np.minimum(0, (-b*f[1:]*rot).real)
    return (np.minimum(e0, e1) - b*b*M/2 - tail).min()


# the zero of the phase-aligned sum sits where sum amp e^{-w y} = 1
ys = np.linspace(0.01, 0.2, 2000)
S = (amp[:N] * np.exp(-np.outer(ys, om[:N]))).sum(1)
ystar = ys[np.argmin(np.abs(S - 1))]
print(f"highest zero of the aligned partial sum (N={N}): y* ~ {ystar:.4f}")

print("\nclearance landscape (float estimate of min_j u_j):")
for d, y0, y1 in [(0.132737, 0.0468918, 0.14), (0.10, 0.05, 0.13),
                  (0.16, 0.055, 0.12), (0.132737, 0.06, 0.11)]:
    print(f"  delta={d:<9} Y0={y0:<10} Y1={y1:<5}: min u ~ "
          f"{min_clearance(d, y0, y1):+.4f}")

print("\nPositive values survive interval slack comfortably when the "
      "margin is a few percent; the bundled configs use the first row.")
