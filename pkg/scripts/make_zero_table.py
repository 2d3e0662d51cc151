"""Generate the bundled table of Riemann zeta zero ordinates.

Writes one ordinate per line as a fixed-point decimal.  The first HP_COUNT
entries are printed with HP_PLACES decimal places (the lattice certificate
recheck needs them at very high precision); the remaining entries are printed
with LOW_PLACES places, which is plenty for the contour and tail stages.

The printed value is the correctly rounded decimal of mpmath's zetazero()
computed with guard digits, so each line is within one unit in the last
printed place of the true ordinate.  Run once; the output is committed as
package data.
"""

import argparse
import concurrent.futures as cf
import os
import sys
import time

from mpmath import mp, zetazero

HP_COUNT = 25
HP_PLACES = 1000
HP_DPS = 1040
LOW_PLACES = 26
LOW_DPS = 44


def _fixed_decimal(x, places: int) -> str:
    """Render mpf x > 0 as a fixed-point decimal with exactly `places` places."""
    scaled = mp.nint(x * mp.mpf(10) ** places)
    digits = str(int(scaled))
    if len(digits) <= places:
        digits = "0" * (places - len(digits) + 1) + digits
    return digits[:-places] + "." + digits[-places:]


def _compute_range(args):
    start, stop, dps, places = args
    mp.dps = dps
    out = []
    for k in range(start, stop):
        out.append((k, _fixed_decimal(zetazero(k).imag, places)))
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10020)
    ap.add_argument("--out", default="src/kappazero/data/zeros.txt")
    ap.add_argument("--workers", type=int, default=max(1, os.cpu_count() or 1))
    ap.add_argument("--chunk", type=int, default=50)
    opts = ap.parse_args()

    t0 = time.time()
    lines: dict[int, str] = {}

    mp.dps = HP_DPS
    for k in range(1, HP_COUNT + 1):
        lines[k] = _fixed_decimal(zetazero(k).imag, HP_PLACES)
        print(f"hp zero {k}/{HP_COUNT}", file=sys.stderr)

    jobs = []
    for start in range(HP_COUNT + 1, opts.count + 1, opts.chunk):
        stop = min(start + opts.chunk, opts.count + 1)
        jobs.append((start, stop, LOW_DPS, LOW_PLACES))
    done = 0
    with cf.ProcessPoolExecutor(max_workers=opts.workers) as pool:
        for chunk in pool.map(_compute_range, jobs):
            for k, s in chunk:
                lines[k] = s
            done += len(chunk)
            print(f"low zeros {done}/{opts.count - HP_COUNT} "
                  f"({time.time() - t0:.0f}s)", file=sys.stderr)

    os.makedirs(os.path.dirname(opts.out), exist_ok=True)
    with open(opts.out, "w", encoding="utf-8") as fh:
        fh.write("# Ordinates of the non-trivial zeros of the Riemann zeta"
                 " function\n")
        fh.write("# on the critical line, ascending, one per line.\n")
        fh.write(f"# Entries 1..{HP_COUNT} carry {HP_PLACES} decimal places;"
                 f" the rest carry {LOW_PLACES}.\n")
        for k in range(1, opts.count + 1):
            fh.write(lines[k] + "\n")
    print(f"wrote {opts.count} ordinates to {opts.out} "
          f"in {time.time() - t0:.0f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
