"""Batch driver: ``hardy-rellich verify|extremal|oracle --config PATH``.

Exit codes: 0 all checks pass, 1 a residual or statistical check failed,
2 configuration error, 3 quadrature did not converge or Monte Carlo sampling
was degenerate.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import extremal as ex
from .config import RunConfig, load_config, parse_config, default_config_dict
from .errors import ConfigError, DegenerateSampling, NoConvergence, OverflowGuard
from .reporting import trace_to_csv, write_reports
from .sweep import expand, run_items

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("hardy_rellich")


def _load(args) -> RunConfig:
    if args.config is None:
        cfg = parse_config(default_config_dict())
    else:
        cfg = load_config(args.config)
    if args.tolerance is not None:
        if not args.tolerance > 0:
            raise ConfigError("--tolerance must be positive")
        cfg.identity_tol = args.tolerance
    if args.out is not None:
        cfg.output = args.out
    return cfg


def _summary(result, extra=None):
    failed = [r for r in result.reports if not r.passed]
    summary = {
        "reports": len(result.reports),
        "passed": len(result.reports) - len(failed),
        "failed": len(failed),
        "skipped_excluded": result.skipped,
        "numerical_errors": result.errors,
        "max_rel_residual": {},
    }
    for rep in result.reports:
        if rep.kind == "equality":
            cur = summary["max_rel_residual"].get(rep.name, 0.0)
            summary["max_rel_residual"][rep.name] = max(cur, rep.rel_residual)
    summary["max_rel_residual"] = dict(sorted(summary["max_rel_residual"].items()))
    if extra:
        summary.update(extra)
    return summary


def _finish(result, out_dir: Path, extra=None) -> int:
    write_reports(out_dir, result.reports, _summary(result, extra))
    for rep in result.reports:
        if not rep.passed:
            print(f"FAIL {rep.name} {rep.params} {rep.fn_label}: rel_residual={rep.rel_residual:.3e}", file=sys.stderr)
    for msg in result.errors:
        print(f"ERROR {msg}", file=sys.stderr)
    n_fail = sum(not r.passed for r in result.reports)
    print(f"{len(result.reports)} reports, {n_fail} failed, {len(result.errors)} numerical errors -> {out_dir}")
    if result.errors:
        return EXIT_NUMERIC
    return EXIT_FAIL if n_fail else EXIT_OK


def cmd_verify(cfg: RunConfig, jobs: int) -> int:
    items = expand(cfg)
    result = run_items(cfg, items, jobs)
    return _finish(result, Path(cfg.output))


def cmd_oracle(cfg: RunConfig, jobs: int) -> int:
    cfg.checks = ["dimensional"]
    items = expand(cfg)
    result = run_items(cfg, items, jobs)
    return _finish(result, Path(cfg.output), {"samples": cfg.mc.samples, "seed": cfg.mc.seed})


def _slug(t) -> str:
    if t.target == "hardy":
        return f"hardy_b{t.beta:g}"
    return f"rellich_a{t.alpha:g}_b{t.beta:g}"


def cmd_extremal(cfg: RunConfig, jobs: int) -> int:
    out = Path(cfg.output) / "traces"
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    lines = []
    for t in cfg.extremal.targets:
        slug = _slug(t)
        family = ex.family_trace(t.target, t.alpha, t.beta, cfg.extremal.m_list, cfg.quad)
        res = ex.minimize_ratio(t.target, t.alpha, t.beta, cfg.extremal.init, cfg.extremal.max_iters, cfg.quad)
        (out / f"{slug}_family.csv").write_text(trace_to_csv(family))
        (out / f"{slug}_simplex.csv").write_text(trace_to_csv(res.trace))
        floor = res.target - 1e-8 * max(1.0, res.target)
        respected = res.lower_bound_respected() and all(p.ratio >= floor for p in family)
        ok &= respected
        lines.append(
            f"{slug}: target={res.target:.10g} family_last={family[-1].ratio:.10g} "
            f"simplex_best={res.best_ratio:.10g} lower_bound={'ok' if respected else 'VIOLATED'}"
        )
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "extremal": cmd_extremal, "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardy-rellich", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run config (default: built-in config)")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
        p.add_argument("--out", help="output directory (overrides config 'output')")
        p.add_argument("--tolerance", type=float, help="identity pass threshold (default 1e-8)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load(args)
        return COMMANDS[args.command](cfg, max(1, args.jobs))
    except (ConfigError, OverflowGuard) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoConvergence, DegenerateSampling) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
