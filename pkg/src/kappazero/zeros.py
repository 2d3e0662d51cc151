"""Ingestion of zeta-zero ordinate tables and derived weights.

A table file is plain UTF-8 text, one ordinate per line as a decimal
literal, `#` comment lines and blank lines ignored.  Each parsed decimal d
becomes the enclosure [d - ulp, d + ulp]; the ulp is either supplied
explicitly or defaults, per line, to one unit in the last printed decimal
place.  Ordinates must be strictly increasing, certainly positive, and the
first one must match the lowest zero 14.134725... within 1e-4.

From a validated table, derive_weights builds the frequencies
omega_n = gamma_n - gamma_0 and the amplitudes
|rho_0/rho_n| = sqrt(1/4 + gamma_0^2) / sqrt(1/4 + gamma_n^2)
(the zeros are taken on the half-line), plus the phase offsets
eta_n = pi - arg(rho_0/rho_n) retained for reporting.
"""

from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ZeroTableError
from .interval import (
    DEFAULT_PRECISION, Interval, certainly, from_endpoints, interval, iv_add,
    iv_atan, iv_div, iv_mul, iv_sqrt, iv_sub, pi_interval, round_to,
)

_DEC_RE = re.compile(r"^[+]?(\d+)(?:\.(\d+))?$")

#: location of the bundled fixture table
DATA_DIR_ENV = "KAPPAZERO_ZEROS_DIR"


def bundled_zeros_path(name: str = "zeros.txt") -> str:
    base = os.environ.get(DATA_DIR_ENV)
    if base is None:
        base = os.path.join(os.path.dirname(__file__), "data")
    return os.path.join(base, name)


@dataclass(frozen=True)
class ZeroTable:
    """Validated enclosures of zero ordinates, 0-based like gamma_n."""

    ordinates: tuple[Interval, ...]
    declared_ulp: str | None

    @property
    def count(self) -> int:
        return len(self.ordinates)

    def gamma(self, n: int) -> Interval:
        return self.ordinates[n]


def _line_interval(text: str, ulp: Fraction | None, lineno: int) -> Interval:
    m = _DEC_RE.match(text)
    if not m:
        raise ZeroTableError(f"not a decimal literal: {text!r}", lineno)
    frac_digits = len(m.group(2) or "")
    if ulp is None:
        ulp = Fraction(1, 10 ** frac_digits) if frac_digits else Fraction(1)
    d = Fraction(text)
    # keep enough precision for every printed digit plus the ulp padding
    digits = len(m.group(1)) + frac_digits
    prec = max(DEFAULT_PRECISION, int(digits * 3.33) + 16)
    return from_endpoints(d - ulp, d + ulp, prec)


def load_zero_table(source, declared_ulp: str | float | None = None) -> ZeroTable:
    """Parse and validate a zero table.

    `source` may be a path, bytes, or a text/byte stream.  `declared_ulp`
    is the half-width added around every printed decimal; None means one
    unit in the last printed place of each line.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode()
    ulp = None
    if declared_ulp is not None:
        ulp = Fraction(str(declared_ulp))
        if ulp <= 0:
            raise ZeroTableError(f"declared_ulp must be positive: {declared_ulp}")

    ordinates: list[Interval] = []
    for lineno, raw in enumerate(io.BytesIO(data).read().decode("utf-8").splitlines(), 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        ordinates.append(_line_interval(text, ulp, lineno))

    if not ordinates:
        raise ZeroTableError("empty zero table")
    first_window = from_endpoints("14.134625", "14.134825")
    if not ordinates[0].is_subset(first_window):
        raise ZeroTableError(
            f"first ordinate {ordinates[0]} does not match 14.134725 +- 1e-4")
    zero = interval(0)
    for n, g in enumerate(ordinates):
        if not certainly(zero, "lt", g):
            raise ZeroTableError(f"ordinate {n} not certainly positive")
        if n and not certainly(ordinates[n - 1], "lt", g):
            raise ZeroTableError(
                f"ordinates {n - 1}, {n} not certainly increasing: "
                f"{ordinates[n - 1]} !< {g}")
    return ZeroTable(tuple(ordinates),
                     None if declared_ulp is None else str(declared_ulp))


@dataclass(frozen=True)
class WeightSet:
    """Frequencies, amplitudes and phases derived from a ZeroTable.

    Entries are indexed n = 1 .. count-1 (index 0 is the reference zero);
    use the accessor methods, which take the 1-based n.
    """

    N: int
    gamma0: Interval
    rho0_abs: Interval
    _omegas: tuple[Interval, ...]
    _amps: tuple[Interval, ...]
    _etas: tuple[Interval, ...]

    @property
    def count(self) -> int:
        return len(self._omegas) + 1

    def omega(self, n: int) -> Interval:
        return self._omegas[n - 1]

    def amp(self, n: int) -> Interval:
        return self._amps[n - 1]

    def eta(self, n: int) -> Interval:
        return self._etas[n - 1]


def derive_weights(table: ZeroTable, N: int, prec: int | None = None,
                   limit: int | None = None) -> WeightSet:
    """Build the WeightSet for partial sums of length N.

    With prec=None every entry keeps the natural precision of its table
    enclosure (needed by the lattice stage); otherwise entries are
    outward-rounded to `prec` bits.  `limit` restricts how many table
    entries are derived (default: all of them).
    """
    if limit is None:
        limit = table.count
    limit = min(limit, table.count)
    if not 0 < N < limit:
        raise ValueError(f"N={N} out of range for table of {limit} zeros")
    g0 = table.gamma(0)
    if prec is not None:
        g0 = round_to(g0, prec)
    quarter = interval(Fraction(1, 4), g0.precision)
    rho0 = iv_sqrt(iv_add(quarter, iv_mul(g0, g0)))
    # phases are reporting-only; cap their precision
    ep = min(g0.precision, DEFAULT_PRECISION)
    pi = pi_interval(ep)
    atan_g0 = iv_atan(iv_mul(round_to(g0, ep), interval(2, ep)), ep)

    omegas, amps, etas = [], [], []
    for n in range(1, limit):
        gn = table.gamma(n)
        if prec is not None:
            gn = round_to(gn, prec)
        p = max(g0.precision, gn.precision)
        om = iv_sub(gn, g0, p)
        q = interval(Fraction(1, 4), p)
        rhon = iv_sqrt(iv_add(q, iv_mul(gn, gn, p), p), p)
        amp = iv_div(rho0, rhon, p)
        # arg(rho0/rho_n) = atan(2 gamma_0) - atan(2 gamma_n)
        eta = iv_sub(pi, iv_sub(atan_g0,
                                iv_atan(iv_mul(round_to(gn, ep), interval(2, ep), ep), ep),
                                ep), ep)
        omegas.append(om)
        amps.append(amp)
        etas.append(eta)

    ws = WeightSet(N, g0, rho0, tuple(omegas), tuple(amps), tuple(etas))
    _validate_weights(ws)
    return ws


def _validate_weights(ws: WeightSet) -> None:
    zero = interval(0)
    one = interval(1)
    for n in range(1, ws.count):
        if not certainly(zero, "lt", ws.omega(n)):
            raise ZeroTableError(f"omega_{n} not certainly positive")
        if not (certainly(zero, "lt", ws.amp(n)) and certainly(ws.amp(n), "lt", one)):
            raise ZeroTableError(f"amp_{n} not certainly inside (0,1)")
        if n > 1:
            if not certainly(ws.omega(n - 1), "lt", ws.omega(n)):
                raise ZeroTableError(f"omega_{n} not certainly above omega_{n - 1}")
            if not certainly(ws.amp(n), "lt", ws.amp(n - 1)):
                raise ZeroTableError(f"amp_{n} not certainly below amp_{n - 1}")
