"""Command line interface.

Subcommands:
  check-zeros   ingest and validate a zero table
  mesh          certify claims 1-3 only
  lll           run the lattice heuristic and emit a tiling certificate
  volume        grid inversion + convolution, from a stored certificate
  run           the full pipeline
  report        render a stored report or certificate to text

Exit status: 0 full certification, 1 certification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import RunConfig, load_config, parse_config
from .errors import KappaZeroError
from .interval import fmt
from .pipeline import (
    CertificateReport, ClaimStatus, PipelineRunner, run_pipeline,
)
from .lattice import TilingCertificate


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="config file (key = value lines), or the "
                                    "name 'paper' or 'reduced'")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a single config key")
    p.add_argument("--zeros", help="zero table path (overrides config)")
    p.add_argument("--n", type=int, help="number of leading frequencies N")
    p.add_argument("--nprime", type=int, help="truncation index N'")
    p.add_argument("--m", type=int, help="mesh count")
    p.add_argument("--ell", type=int, help="inversion grid count")
    p.add_argument("--d-target", help="lattice bound d (decimal or 'auto')")
    p.add_argument("--coeff-bound", help="coefficient bound M")
    p.add_argument("--parallelism", type=int, help="worker count")


def build_cfg(args) -> RunConfig:
    cfg = RunConfig.paper()
    if args.config:
        if args.config == "paper":
            cfg = RunConfig.paper()
        elif args.config == "reduced":
            cfg = RunConfig.reduced()
        else:
            cfg = load_config(args.config, cfg)
    overrides = "\n".join(args.set)
    if overrides:
        cfg = parse_config(overrides, cfg)
    direct = {}
    if args.zeros:
        direct["zeros_path"] = args.zeros
    if args.n is not None:
        direct["N"] = args.n
    if args.nprime is not None:
        direct["Nprime"] = args.nprime
    if args.m is not None:
        direct["m"] = args.m
    if args.ell is not None:
        direct["ell"] = args.ell
    if args.d_target is not None:
        direct["d_target"] = None if args.d_target == "auto" else args.d_target
    if args.coeff_bound is not None:
        from .config import _parse_big_int
        direct["coeff_bound"] = _parse_big_int(args.coeff_bound)
    if args.parallelism is not None:
        direct["parallelism"] = args.parallelism
    return cfg.override(**direct) if direct else cfg


def cmd_check_zeros(args) -> int:
    cfg = build_cfg(args)
    runner = PipelineRunner(cfg)
    table = runner.load()
    g0 = table.gamma(0)
    print(f"zero table: {table.count} ordinates, validated")
    print(f"gamma_0 enclosure: {fmt(g0, 20)}")
    print(f"widest enclosure: {max(float(g.width()) for g in table.ordinates):.3e}")
    return 0


def cmd_mesh(args) -> int:
    cfg = build_cfg(args)
    runner = PipelineRunner(cfg)
    runner.build_family()
    rep = runner.report()
    sys.stdout.write(rep.to_text())
    return 0 if all(c.status == "certified"
                    for c in rep.claims.values()) else 1


def cmd_lll(args) -> int:
    cfg = build_cfg(args)
    runner = PipelineRunner(cfg)
    cert = runner.build_certificate()
    cert.save(args.out)
    print(f"tiling certificate written to {args.out}")
    print(f"d = {fmt(cert.d, 10)}, det(C) = {cert.det}")
    for n, s in enumerate(cert.sums, 1):
        print(f"  sum_{n} = {fmt(s, 8)}")
    return 0


def cmd_volume(args) -> int:
    cfg = build_cfg(args)
    cert = TilingCertificate.load(args.certificate)
    runner = PipelineRunner(cfg)
    runner.build_family()
    runner.certificate = cert
    runner.claims["claim4"] = ClaimStatus(
        "certified", detail=f"from {args.certificate}")
    runner.run_volume()
    rep = runner.report()
    sys.stdout.write(rep.to_text())
    if args.out:
        rep.save(args.out)
    return 0 if rep.overall == "PASS" else 1


def cmd_run(args) -> int:
    cfg = build_cfg(args)
    rep = run_pipeline(cfg)
    sys.stdout.write(rep.to_text())
    if args.out:
        rep.save(args.out)
        print(f"report written to {args.out}")
    return 0 if rep.overall == "PASS" else 1


def cmd_report(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("format") == "tiling-certificate/1":
        cert = TilingCertificate.from_json(obj)
        print(f"tiling certificate: N = {len(cert.C)}, det(C) = {cert.det}")
        print(f"d = {fmt(cert.d, 10)}")
        for n, s in enumerate(cert.sums, 1):
            print(f"  sum_{n} = {fmt(s, 8)}")
        height = max(abs(x) for row in cert.C for x in row)
        print(f"coefficient height: about 1e{len(str(height)) - 1}")
        return 0
    rep = CertificateReport.from_json(obj)
    sys.stdout.write(rep.to_text())
    return 0 if rep.overall == "PASS" else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="kappazero", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-zeros", help="ingest and validate a zero table")
    _add_common(p)
    p.set_defaults(fn=cmd_check_zeros)

    p = sub.add_parser("mesh", help="certify claims 1-3 only")
    _add_common(p)
    p.set_defaults(fn=cmd_mesh)

    p = sub.add_parser("lll", help="lattice heuristic + tiling certificate")
    _add_common(p)
    p.add_argument("--out", default="certificate.json")
    p.set_defaults(fn=cmd_lll)

    p = sub.add_parser("volume", help="volume bound from a stored certificate")
    _add_common(p)
    p.add_argument("--certificate", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_volume)

    p = sub.add_parser("run", help="full pipeline")
    _add_common(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("report", help="render a stored report/certificate")
    p.add_argument("file")
    p.set_defaults(fn=cmd_report)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except KappaZeroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
