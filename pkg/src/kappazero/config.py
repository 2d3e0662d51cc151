"""Run configuration: flat key = value text files plus programmatic defaults.

Decimal-valued parameters are carried as strings and only turned into
outward-rounded intervals at the point of use, so config constants like
0.132737 never pass through binary floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

PAPER_BREAKPOINTS: tuple[tuple[str, str], ...] = (
    ("0", "0"), ("1/32", "0.489819"), ("1/8", "1.85802"),
    ("3/16", "2.04829"), ("3/8", "2.90189"), ("1/2", "pi"),
)


@dataclass(frozen=True)
class RunConfig:
    zeros_path: str = "bundled"
    declared_ulp: str | None = None
    N: int = 21
    Nprime: int = 9998
    delta: str = "0.132737"
    Y0: str = "0.0468918"
    Y1: str = "0.14"
    m: int = 12000
    alpha_breakpoints: tuple[tuple[str, str], ...] = PAPER_BREAKPOINTS
    lll_precision_digits: int = 1000
    lll_delta: str = "1/4"
    coeff_bound: int = 10 ** 300
    d_target: str | None = "1.66e-13"   # None or "auto": twice the worst sum
    ell: int = 16000
    working_precision_bits: int = 256
    parallelism: int = 1

    @classmethod
    def paper(cls) -> "RunConfig":
        return cls()

    @classmethod
    def reduced(cls) -> "RunConfig":
        return cls(N=8, Nprime=2000, m=1500, ell=400,
                   lll_precision_digits=200, coeff_bound=10 ** 40,
                   d_target=None)

    def override(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    def to_text(self) -> str:
        bp = ", ".join(f"{a}:{v}" for a, v in self.alpha_breakpoints)
        lines = [
            f"zeros_path = {self.zeros_path}",
            f"declared_ulp = {self.declared_ulp or 'auto'}",
            f"N = {self.N}",
            f"Nprime = {self.Nprime}",
            f"delta = {self.delta}",
            f"Y0 = {self.Y0}",
            f"Y1 = {self.Y1}",
            f"m = {self.m}",
            f"alpha_breakpoints = {bp}",
            f"lll_precision_digits = {self.lll_precision_digits}",
            f"lll_delta = {self.lll_delta}",
            f"coeff_bound = {_int_to_text(self.coeff_bound)}",
            f"d_target = {self.d_target or 'auto'}",
            f"ell = {self.ell}",
            f"working_precision_bits = {self.working_precision_bits}",
            f"parallelism = {self.parallelism}",
        ]
        return "\n".join(lines) + "\n"

    def echo(self) -> dict:
        return {
            "zeros_path": self.zeros_path,
            "declared_ulp": self.declared_ulp,
            "N": self.N, "Nprime": self.Nprime,
            "delta": self.delta, "Y0": self.Y0, "Y1": self.Y1,
            "m": self.m,
            "alpha_breakpoints": [f"{a}:{v}" for a, v in self.alpha_breakpoints],
            "lll_precision_digits": self.lll_precision_digits,
            "lll_delta": self.lll_delta,
            "coeff_bound": _int_to_text(self.coeff_bound),
            "d_target": self.d_target,
            "ell": self.ell,
            "working_precision_bits": self.working_precision_bits,
            "parallelism": self.parallelism,
        }


def _int_to_text(v: int) -> str:
    s = str(v)
    if len(s) > 6 and set(s[1:]) == {"0"}:
        return f"{s[0]}e{len(s) - 1}"
    return s


def _parse_big_int(s: str) -> int:
    s = s.strip().lower().replace("^", "e").replace("10e", "1e")
    if "e" in s:
        base, exp = s.split("e", 1)
        base = int(base or "1")
        return base * 10 ** int(exp)
    return int(s)


_INT_KEYS = {"N", "Nprime", "m", "ell", "lll_precision_digits",
             "working_precision_bits", "parallelism"}
_STR_KEYS = {"zeros_path", "delta", "Y0", "Y1", "lll_delta"}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse `key = value` lines (# comments allowed) over a base config."""
    cfg = base or RunConfig.paper()
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in _INT_KEYS:
            kw[key] = int(val)
        elif key in _STR_KEYS:
            kw[key] = val
        elif key == "declared_ulp":
            kw[key] = None if val.lower() in ("auto", "none", "") else val
        elif key == "d_target":
            kw[key] = None if val.lower() in ("auto", "none", "") else val
        elif key == "coeff_bound":
            kw[key] = _parse_big_int(val)
        elif key == "alpha_breakpoints":
            pts = []
            for part in val.split(","):
                a, _, v = part.strip().partition(":")
                Fraction(a)  # validates the abscissa
                pts.append((a.strip(), v.strip()))
            kw[key] = tuple(pts)
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return cfg.override(**kw)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base)
