"""End-to-end certification pipeline and its report format.

Stage order: zero table -> weights -> contour mesh (claims 1-2) -> penalty
family (claim 3) -> lattice reduction and tiling certificate (claim 4) ->
grid inversion with eps = 2d -> truncated convolution -> final bound
(claim 5: certified positive increment; the 1/60 threshold is flagged
separately).  The pipeline short-circuits on the first certification
failure and the report carries the failing stage with its diagnostics.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

from .config import RunConfig
from .contour import build_mesh, make_contour_config
from .errors import CertificationError, KappaZeroError
from .interval import (
    Interval, fmt, interval, interval_from_json, interval_to_json, iv_mul,
)
from .lattice import TilingCertificate, certify, lll_bounded, make_projections
from .penalty import envelope_constants
from .tail import make_tail_config
from .volume import convolve_volume, final_bound, invert_w
from .zeros import bundled_zeros_path, derive_weights, load_zero_table

RH_FALSE_NOTE = (
    "This certificate addresses the case in which the Riemann hypothesis "
    "holds.  If it fails, all zeros off the critical line have ordinate "
    "beyond 3e12 (Platt and Trudgian, 2021), and the resulting sign-change "
    "density bound, 3e12/pi, is far stronger than anything certified here; "
    "that branch needs no computation.")

CLAIM_TITLES = {
    "claim1": "rotation steps below pi and segments below pi/omega_N",
    "claim2": "contour clearance u_j > 0 on every segment",
    "claim3": "phase band widths below pi",
    "claim4": "lattice sums below d with non-singular C",
    "claim5": "certified positive volume increment",
}


@dataclass
class ClaimStatus:
    status: str                 # "certified" | "failed" | "skipped"
    margin: Interval | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"status": self.status,
                "margin": interval_to_json(self.margin) if self.margin else None,
                "detail": self.detail}

    @classmethod
    def from_json(cls, obj) -> "ClaimStatus":
        m = obj.get("margin")
        return cls(obj["status"], interval_from_json(m) if m else None,
                   obj.get("detail", ""))


@dataclass
class CertificateReport:
    config: dict
    claims: dict[str, ClaimStatus]
    lattice: dict | None
    volume: dict | None
    timings: dict[str, float]
    note: str = RH_FALSE_NOTE
    error: str | None = None

    @property
    def overall(self) -> str:
        if self.error or any(c.status == "failed" for c in self.claims.values()):
            return "FAILED"
        if all(c.status == "certified" for c in self.claims.values()):
            return "PASS"
        return "PARTIAL"

    def to_json(self) -> dict:
        return {
            "format": "kappazero-report/1",
            "status": self.overall,
            "config": self.config,
            "claims": {k: v.to_json() for k, v in self.claims.items()},
            "lattice": self.lattice,
            "volume": self.volume,
            "timings": self.timings,
            "note": self.note,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CertificateReport":
        return cls(obj["config"],
                   {k: ClaimStatus.from_json(v) for k, v in obj["claims"].items()},
                   obj.get("lattice"), obj.get("volume"),
                   obj.get("timings", {}), obj.get("note", ""),
                   obj.get("error"))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"certification status: {self.overall}", ""]
        cfgbits = ", ".join(f"{k}={self.config[k]}" for k in
                            ("N", "Nprime", "m", "ell", "delta", "Y0", "Y1"))
        lines.append(f"configuration: {cfgbits}")
        lines.append("")
        for key in sorted(self.claims):
            c = self.claims[key]
            title = CLAIM_TITLES.get(key, key)
            entry = f"{key} ({title}): {c.status}"
            if c.margin is not None:
                entry += f"  margin {fmt(c.margin, 8)}"
            if c.detail:
                entry += f"  [{c.detail}]"
            lines.append(entry)
        if self.lattice:
            lines.append("")
            lines.append(f"lattice: d = {self.lattice['d_text']}, "
                         f"det(C) = {self.lattice['det']}, "
                         f"worst coordinate sum = {self.lattice['worst_sum']}")
        if self.volume:
            lines.append("")
            lines.append(f"sum of r_i              : {self.volume['sum_r']}")
            lines.append(f"kappa increment         : {self.volume['kappa_increment']}")
            lines.append(f"kappa_0 lower bound     : {self.volume['kappa0_lower']}")
            lines.append(f"increment >= 1/60       : "
                         f"{'certified' if self.volume['sixty'] else 'not certified'}")
        if self.error:
            lines.append("")
            lines.append(f"error: {self.error}")
        lines.append("")
        lines.append(self.note)
        if self.timings:
            lines.append("")
            stamps = ", ".join(f"{k} {v:.1f}s" for k, v in self.timings.items())
            lines.append(f"timings: {stamps}")
        return "\n".join(lines) + "\n"


def _resolve_zeros(cfg: RunConfig) -> str:
    if cfg.zeros_path in ("bundled", ""):
        return bundled_zeros_path()
    return cfg.zeros_path


class PipelineRunner:
    """Caches the stage products so subcommands can run prefixes."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.claims: dict[str, ClaimStatus] = {}
        self.timings: dict[str, float] = {}
        self.lattice_info: dict | None = None
        self.volume_info: dict | None = None
        self.certificate: TilingCertificate | None = None
        self.table = None
        self.weights = None
        self.tail_cfg = None
        self.mesh = None
        self.family = None

    def _timed(self, name, fn):
        t0 = time.time()
        out = fn()
        self.timings[name] = round(time.time() - t0, 3)
        return out

    def load(self):
        cfg = self.cfg
        path = _resolve_zeros(cfg)
        try:
            self.table = self._timed("load", lambda: load_zero_table(
                path, cfg.declared_ulp))
        except OSError as exc:
            raise CertificationError("load", f"cannot read zero table: {exc}")
        return self.table

    def build_weights(self):
        cfg = self.cfg
        if self.table is None:
            self.load()
        self.weights = self._timed("weights", lambda: derive_weights(
            self.table, cfg.N, prec=cfg.working_precision_bits))
        self.tail_cfg = make_tail_config(self.table, cfg.N, cfg.Nprime,
                                         cfg.working_precision_bits)
        return self.weights

    def build_mesh(self):
        cfg = self.cfg
        if self.weights is None:
            self.build_weights()
        ccfg = make_contour_config(cfg.delta, cfg.Y0, cfg.Y1, cfg.m,
                                   cfg.alpha_breakpoints,
                                   cfg.working_precision_bits)
        self.mesh = self._timed("mesh", lambda: build_mesh(
            ccfg, self.weights, self.tail_cfg))
        self.claims["claim1"] = ClaimStatus("certified", self.mesh.claim1_margin)
        self.claims["claim2"] = ClaimStatus("certified", self.mesh.claim2_margin,
                                            "minimum u_j lower endpoint")
        return self.mesh

    def build_family(self):
        if self.mesh is None:
            self.build_mesh()
        self.family = self._timed("penalty", lambda: envelope_constants(
            self.mesh, self.weights))
        self.claims["claim3"] = ClaimStatus("certified",
                                            self.family.claim3_margin)
        return self.family

    def build_certificate(self):
        cfg = self.cfg
        if self.table is None:
            self.load()
        hp = self._timed("hp_weights", lambda: derive_weights(
            self.table, cfg.N, limit=cfg.N + 1))
        proj = make_projections(hp, cfg.lll_precision_digits)
        res = self._timed("lll", lambda: lll_bounded(
            proj, cfg.coeff_bound, Fraction(cfg.lll_delta)))
        d_target = None if cfg.d_target is None else interval(
            cfg.d_target, cfg.working_precision_bits)
        self.certificate = self._timed("certify", lambda: certify(
            res.C, proj, d_target))
        cert = self.certificate
        worst = max(cert.sums, key=lambda s: s.hi)
        margin = cert.d - worst
        self.claims["claim4"] = ClaimStatus("certified", margin,
                                            f"early_return={res.early_return}, "
                                            f"sweeps={res.sweeps}")
        self.lattice_info = {
            "d_text": fmt(cert.d, 8),
            "det": cert.det,
            "worst_sum": fmt(worst, 8),
            "certificate": cert.to_json(),
        }
        return cert

    def run_volume(self):
        cfg = self.cfg
        if self.family is None:
            self.build_family()
        if self.certificate is None:
            self.build_certificate()
        eps = iv_mul(interval(2, cfg.working_precision_bits), self.certificate.d)
        grid = self._timed("invert", lambda: invert_w(
            self.family, cfg.ell, eps, workers=cfg.parallelism))
        sum_r = self._timed("volume", lambda: convolve_volume(
            grid, workers=cfg.parallelism))
        res = final_bound(sum_r, interval(cfg.delta), cfg.N,
                          self.weights.gamma0)
        if float(res.kappa_increment.lo) > 0:
            self.claims["claim5"] = ClaimStatus(
                "certified", res.kappa_increment, "kappa increment")
        else:
            self.claims["claim5"] = ClaimStatus(
                "failed", res.kappa_increment,
                "volume increment not certainly positive")
        self.volume_info = {
            "eps": fmt(eps, 8),
            "sum_r": fmt(res.sum_r, 12),
            "kappa_increment": fmt(res.kappa_increment, 12),
            "kappa0_lower": fmt(res.kappa0_lower, 12),
            "sixty": res.sixty_certified,
            "sum_r_exact": interval_to_json(res.sum_r),
            "kappa_increment_exact": interval_to_json(res.kappa_increment),
            "kappa0_lower_exact": interval_to_json(res.kappa0_lower),
        }
        return res

    def report(self, error: str | None = None) -> CertificateReport:
        return CertificateReport(self.cfg.echo(), dict(self.claims),
                                 self.lattice_info, self.volume_info,
                                 dict(self.timings), error=error)


def run_pipeline(cfg: RunConfig) -> CertificateReport:
    """Execute every stage; certification failures yield a FAILED report."""
    runner = PipelineRunner(cfg)
    try:
        runner.run_volume()
    except CertificationError as exc:
        key = exc.details.get("claim")
        if key:
            runner.claims[key] = ClaimStatus("failed", detail=str(exc))
        return runner.report(error=str(exc))
    except KappaZeroError as exc:
        return runner.report(error=str(exc))
    return runner.report()
