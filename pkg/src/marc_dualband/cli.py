"""Command-line entry point ``marc``.

Every subcommand builds one or more :class:`ResultTable` objects and writes
them as CSV (default) or JSON to stdout or ``--output``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .allocator import (
    MmWaveGains,
    allocate,
    regime_of,
    sweep_2d_topology,
    threshold_powers,
)
from .channel import MicrowaveSummary, microwave_summary
from .config import ConfigError, RunConfig, load_config, resolve_seed
from .figures import FIG7_CONFIG, FIGURES, p2_table, path_tables, topology_tables
from .regions import (
    NoCrossingError,
    drmarc_region,
    jointly_near_check,
    rmarc_achievable_region,
    sum_rates,
    threshold_distance,
)
from .tables import ResultTable, write_tables
from .verification import run_agreement_suite

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


# -- shared argument handling -------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", type=Path, help="file (or directory for several CSV tables)")


def _add_config(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--config", "-c", type=Path, required=required, help="YAML or JSON run config")
    p.add_argument("--seed", type=int, help="QMC seed; overrides MARC_SEED")


def _add_gains(p: argparse.ArgumentParser) -> None:
    _add_config(p)
    for name in ("r1", "r2", "d1", "d2"):
        p.add_argument(f"--{name}", type=float, help=f"mm-wave gain {name}")
    p.add_argument("--gamma", type=float, help="microwave imbalance gamma")
    p.add_argument("--alpha", type=float, help="bandwidth mismatch factor (default 1)")


def _run_config(args) -> Optional[RunConfig]:
    if not getattr(args, "config", None):
        return None
    rc = load_config(args.config)
    # The config's output path applies when --output is absent.
    if args.output is None and rc.output is not None:
        args.output = rc.output
    return rc


def _require_config(args) -> RunConfig:
    cfg = _run_config(args)
    if cfg is None:
        raise UsageError("--config is required")
    return cfg


def _gains(args) -> tuple[MmWaveGains, MicrowaveSummary, float]:
    """Gains, microwave summary and alpha from a config and/or flags.

    Flags override the config. With an explicit ``--gamma`` the summary is
    the normalised one.
    """
    rc = _run_config(args)
    vals = dict.fromkeys(("r1", "r2", "d1", "d2", "gamma"))
    alpha = 1.0
    summary = None
    if rc is not None:
        cfg = rc.to_dual_band()
        alpha = cfg.alpha
        vals.update(
            r1=cfg.gain_bar("1R"), r2=cfg.gain_bar("2R"), d1=cfg.gain_bar("1D"), d2=cfg.gain_bar("2D")
        )
        summary = microwave_summary(cfg, seed=resolve_seed(args.seed, rc), samples=rc.qmc_samples)
        vals["gamma"] = summary.gamma
    for k in vals:
        v = getattr(args, k)
        if v is not None:
            vals[k] = v
    if args.alpha is not None:
        alpha = args.alpha
    missing = [k for k, v in vals.items() if v is None]
    if missing:
        raise UsageError("missing " + ", ".join(f"--{k}" for k in missing) + " (or --config)")
    try:
        g = MmWaveGains(vals["r1"], vals["r2"], vals["d1"], vals["d2"], vals["gamma"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if alpha < 0:
        raise UsageError("--alpha must be non-negative")
    if summary is None or args.gamma is not None or args.alpha is not None:
        summary = MicrowaveSummary.from_gamma(g.gamma, alpha or 1.0)
    return g, summary, alpha


def _budgets(values: Sequence[float]) -> list[float]:
    if any(not (v >= 0 and math.isfinite(v)) for v in values):
        raise UsageError("budgets must be finite and non-negative")
    return list(values)


# -- subcommands ----------------------------------------------------------------


def cmd_allocate(args) -> dict[str, ResultTable]:
    g, summary, alpha = _gains(args)
    rows = []
    for P in _budgets(args.budget):
        a, lgr = allocate(g, P)
        s = sum_rates(summary, g, a, alpha)
        rows.append((P, a.p1, a.q1, a.p2, a.q2, lgr, s.sigma_big_R, s.sigma_big_D, s.rate))
    cols = ("P", "p1", "q1", "p2", "q2", "lgr", "Sigma_R", "Sigma_D", "rate")
    return {"allocation": ResultTable(cols, tuple(rows))}


def cmd_path(args) -> dict[str, ResultTable]:
    g, _, _ = _gains(args)
    budgets = None
    if args.samples:
        if not args.p_max > 0:
            raise UsageError("--p-max must be positive")
        budgets = np.linspace(0.0, args.p_max, args.samples)
    return path_tables(g, budgets)


def cmd_thresholds(args) -> dict[str, ResultTable]:
    g, _, _ = _gains(args)
    if not g.gamma > 1:
        raise UsageError("thresholds are defined for gamma > 1")
    t = threshold_powers(g)
    rows = tuple(
        (name, value, name in t.multiple_roots, name in t.degenerate)
        for name, value in t.as_dict().items()
    )
    return {
        "thresholds": ResultTable(("name", "value", "multiple_roots", "degenerate"), rows),
        "regime": ResultTable(("regime", "gamma"), ((regime_of(g), g.gamma),)),
    }


def cmd_summary(args) -> dict[str, ResultTable]:
    rc = _require_config(args)
    cfg = rc.to_dual_band()
    s = microwave_summary(cfg, seed=resolve_seed(args.seed, rc), samples=rc.qmc_samples)
    cols = ("sigma_R", "sigma_D", "gamma", "alpha", "r1", "r2", "d1", "d2", "g_RD")
    row = (s.sigma_R, s.sigma_D, s.gamma, cfg.alpha) + tuple(
        cfg.gain_bar(k) for k in ("1R", "2R", "1D", "2D", "RD")
    )
    return {"summary": ResultTable(cols, (row,))}


def cmd_region(args) -> dict[str, ResultTable]:
    rc = _require_config(args)
    cfg = rc.to_dual_band()
    kw = dict(seed=resolve_seed(args.seed, rc), samples=rc.qmc_samples)
    regions = {"rmarc": rmarc_achievable_region(cfg, **kw)}
    regions["drmarc"] = drmarc_region(regions["rmarc"], cfg, **kw)
    cons, verts = [], []
    for name, reg in regions.items():
        cons += [(name, c.name, c.coeff_R1, c.coeff_R2, c.bound) for c in reg.constraints]
        verts += [(name, i, R1, R2) for i, (R1, R2) in enumerate(reg.vertices())]
    return {
        "constraints": ResultTable(("region", "name", "coeff_R1", "coeff_R2", "bound"), tuple(cons)),
        "vertices": ResultTable(("region", "index", "R1", "R2"), tuple(verts)),
    }


def cmd_check_near(args) -> dict[str, ResultTable]:
    rc = _require_config(args)
    cfg = rc.to_dual_band()
    rep = jointly_near_check(cfg, seed=resolve_seed(args.seed, rc), samples=rc.qmc_samples)
    rows = tuple(
        (name, c.margin, c.holds)
        for name, c in (("R1", rep.cond_r1), ("R2", rep.cond_r2), ("sum", rep.cond_sum))
    )
    out = {"conditions": ResultTable(("condition", "margin", "holds"), rows)}
    if args.d_rd is not None or args.phi is not None:
        if args.d_rd is None or args.phi is None:
            raise UsageError("--d-rd and --phi go together")
        try:
            star = threshold_distance(cfg, args.d_rd, args.phi, which=args.which)
        except NoCrossingError as exc:
            raise UsageError(str(exc)) from exc
        out["threshold"] = ResultTable(
            ("condition", "d_RD", "phi", "alpha", "d_SR_star"),
            ((args.which, args.d_rd, args.phi, cfg.alpha, star),),
        )
    return out


def cmd_sweep2d(args) -> dict[str, ResultTable]:
    rc = _require_config(args)
    if args.n_phi < 1 or args.n_dsr < 1 or not args.dsr_max > 0:
        raise UsageError("grid sizes and --dsr-max must be positive")
    phis = (np.arange(args.n_phi) + 0.5) * math.pi / args.n_phi
    dsrs = (np.arange(args.n_dsr) + 0.5) * args.dsr_max / args.n_dsr
    grid = sweep_2d_topology(rc.to_dual_band(), phis, dsrs, _budgets([args.budget])[0], args.d_rd)
    return topology_tables(grid)


def cmd_verify(args) -> dict[str, ResultTable]:
    seed = resolve_seed(args.seed)
    rep = run_agreement_suite(
        args.trials, seed, rate_tol=args.rate_tol, component_tol=args.component_tol,
        kkt_tol=args.kkt_tol,
    )
    for line in rep.lines():
        print(line)
    args._exit = 0 if rep.passed else 1
    rows = (
        ("max_rate_gap", rep.max_rate_gap, rep.rate_tol),
        ("max_component_gap", rep.max_component_gap, rep.component_tol),
        ("max_kkt_residual", rep.max_kkt_residual, rep.kkt_tol),
        ("unclassified", rep.unclassified, 0),
        ("oracle_failures", rep.oracle_failures, 0),
        ("strict_tuples", rep.strict_tuples, None),
        ("ties", rep.ties, None),
    )
    args._print_tables = args.output is not None
    return {"verify": ResultTable(("metric", "value", "tol"), rows)}


def cmd_p2(args) -> dict[str, ResultTable]:
    rc = _run_config(args) or load_config(FIG7_CONFIG)
    if args.budget:
        budgets = _budgets(args.budget)
    else:
        lo, hi, n = args.range
        budgets = _budgets(np.linspace(lo, hi, int(n)).tolist())
    try:
        table = p2_table(rc.to_dual_band(), budgets, iterations=args.iterations, step=args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    bad = [P for P, c in zip(table.column("P"), table.column("converged")) if not c]
    if bad:
        print(f"error: joint-budget solver did not converge for P = {bad}", file=sys.stderr)
        args._exit = 1
    return {"p2": table}


def cmd_fig(args) -> dict[str, ResultTable]:
    return FIGURES[args.id]()


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marc", description="Dual-band relay power allocation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="optimal mm-wave allocation at given budgets")
    _add_gains(p)
    p.add_argument("--budget", "-P", type=float, nargs="+", required=True)
    _add_output(p)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("path", help="regime path over the budget axis")
    _add_gains(p)
    p.add_argument("--samples", type=int, default=0, help="number of sampled budgets")
    p.add_argument("--p-max", type=float, default=2.0)
    _add_output(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("thresholds", help="threshold powers of a gain tuple")
    _add_gains(p)
    _add_output(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("summary", help="microwave sum rates and gamma")
    _add_config(p, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("region", help="relay-only and full dual-band rate regions")
    _add_config(p, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("check-near", help="capacity conditions and threshold distance")
    _add_config(p, required=True)
    p.add_argument("--d-rd", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--which", choices=("sum", "all"), default="sum")
    _add_output(p)
    p.set_defaults(func=cmd_check_near)

    p = sub.add_parser("sweep2d", help="regime map over symmetric source placements")
    _add_config(p, required=True)
    p.add_argument("--budget", "-P", type=float, required=True)
    p.add_argument("--d-rd", type=float, default=1.0)
    p.add_argument("--n-phi", type=int, default=60)
    p.add_argument("--n-dsr", type=int, default=80)
    p.add_argument("--dsr-max", type=float, default=4.0)
    _add_output(p)
    p.set_defaults(func=cmd_sweep2d)

    p = sub.add_parser(
        "verify", help="randomised allocator/oracle agreement suite; table only with --output"
    )
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, help="suite seed; overrides MARC_SEED")
    p.add_argument("--rate-tol", type=float, default=1e-5)
    p.add_argument("--component-tol", type=float, default=1e-3)
    p.add_argument("--kkt-tol", type=float, default=1e-6)
    _add_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("p2", help="joint budget over microwave and mm-wave links")
    _add_config(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--budget", "-P", type=float, nargs="+")
    g.add_argument("--range", type=float, nargs=3, metavar=("LO", "HI", "N"), default=(0.0, 5.0, 51))
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--step", type=float, default=0.01)
    _add_output(p)
    p.set_defaults(func=cmd_p2)

    p = sub.add_parser("fig", help="data grid behind a figure preset")
    p.add_argument("--id", required=True, choices=sorted(FIGURES))
    _add_output(p)
    p.set_defaults(func=cmd_fig)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._exit = 0
    args._print_tables = True
    try:
        tables = args.func(args)
    except (UsageError, ConfigError) as exc:
        parser.error(str(exc))
    if args._print_tables:
        for path in write_tables(tables, args.format, args.output, sys.stdout):
            print(f"wrote {path}", file=sys.stderr)
    return args._exit


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
