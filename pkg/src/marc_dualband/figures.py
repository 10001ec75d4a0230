"""Preset configurations and data grids behind the published figures.

Each ``fig_*`` function returns named :class:`ResultTable` objects; nothing
here draws anything.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .allocator import MmWaveGains, allocate, lgr_path, saturation_info, symmetric_lgr, sweep_2d_topology
from .channel import DualBandConfig, Geometry, microwave_summary
from .config import RunConfig, load_config
from .oracle import P2_VARIABLES, solve_p2_batch
from .regions import rmarc_achievable_region, threshold_distance
from .tables import ResultTable

__all__ = [
    "FIG2_CONFIG",
    "FIG5_CONFIG",
    "FIG7_CONFIG",
    "FIG6A_GAINS",
    "FIG6B_GAINS",
    "FIGURES",
    "path_tables",
    "topology_tables",
    "p2_table",
    "fig_2a",
    "fig_5",
    "fig_6a",
    "fig_6b",
    "fig_7a",
    "fig_7b",
]

#: Capacity-condition study: all powers 10, both bands phase faded.
FIG2_CONFIG = {
    "microwave": {"pathloss_exp": 2, "powers": {"P1": 10, "P2": 10, "PR": 10}},
    "mmwave": {"pathloss_exp": 4, "powers": {"Phat1": 10, "Phat2": 10, "PbarR": 10}},
    "alpha": 2,
    "geometry": {"d_RD": 1.0, "d_SR": 1.0, "phi": math.pi / 4},
}

#: Regime map over source placements at budget ``FIG5_BUDGET``.
FIG5_CONFIG = {
    "microwave": {"pathloss_exp": 2, "powers": {"P1": 10, "P2": 10, "PR": 10}},
    "mmwave": {"pathloss_exp": 4, "powers": {"PbarR": 1}},
    "alpha": 2,
}
FIG5_BUDGET = 10.0

#: Symmetric gains with unit microwave links, used for both budget problems.
FIG7_CONFIG = {
    "microwave": {"pathloss_exp": 2, "powers": {"P1": 1, "P2": 1, "PR": 1}},
    "mmwave": {"pathloss_exp": 4, "powers": {"PbarR": 1}},
    "alpha": 2,
    "gains": {"1R": 1, "2R": 1, "1D": 1, "2D": 1, "RD": 1},
    "gains_bar": {"1R": 1, "2R": 1, "1D": 1.5, "2D": 1.5, "RD": 1},
}

FIG6A_GAINS = MmWaveGains(1.0, 2.9, 1.3, 1.3, 3.0)
FIG6B_GAINS = MmWaveGains(1.0, 4.0, 1.52, 1.52, 3.0)


def _cfg(preset: dict) -> DualBandConfig:
    return load_config(preset).to_dual_band()


def path_tables(g: MmWaveGains, budgets=None) -> dict[str, ResultTable]:
    """Segment table, saturation summary and optional sampled allocations."""
    path = lgr_path(g)
    out = {
        "segments": ResultTable(
            ("label", "regime", "lgr", "P_lo", "P_hi"),
            tuple(
                (path.label, path.regime, s.lgr, s.P_lo, s.P_hi) for s in path.segments
            ),
        )
    }
    if g.gamma > 1:
        s = saturation_info(g)
        out["saturation"] = ResultTable(
            ("P_sat", "P_fin", "saturation_lgr", "final_lgr", "q_bar_1", "q_bar_2"),
            ((s.P_sat, s.P_fin, s.saturation_lgr, s.final_lgr, s.q_bar_1, s.q_bar_2),),
        )
    if budgets is not None:
        rows = []
        for P in budgets:
            a, lgr = allocate(g, float(P))
            rows.append((float(P), lgr, a.p1, a.q1, a.p2, a.q2))
        out["samples"] = ResultTable(("P", "lgr", "p1", "q1", "p2", "q2"), tuple(rows))
    return out


def p2_table(cfg: DualBandConfig, budgets, **kw) -> ResultTable:
    budgets = np.asarray(budgets, dtype=float)
    x, rate, conv = solve_p2_batch(cfg, budgets, **kw)
    rows = tuple(
        (float(P), *map(float, xi), float(r), bool(c)) for P, xi, r, c in zip(budgets, x, rate, conv)
    )
    return ResultTable(("P",) + P2_VARIABLES + ("rate", "converged"), rows)


def fig_2a(n: int = 100) -> dict[str, ResultTable]:
    """Achievable sum rate and sum-rate outer bound against ``d_SR`` for
    ``d_RD`` in ``{1, 0.5}``, with the threshold distance of each."""
    base = _cfg(FIG2_CONFIG)
    phi = FIG2_CONFIG["geometry"]["phi"]
    dsr = np.linspace(2.5 / n, 2.5, n)
    curve, star = [], []
    for d_rd in (1.0, 0.5):
        for d in dsr:
            region = rmarc_achievable_region(base.with_geometry(Geometry.symmetric(d_rd, d, phi)))
            ob = region.bound("dest_sum")
            curve.append((d_rd, float(d), min(region.bound("relay_sum"), ob), ob))
        star.append((d_rd, phi, base.alpha, threshold_distance(base, d_rd, phi)))
    return {
        "curve": ResultTable(("d_RD", "d_SR", "ASR", "OB"), tuple(curve)),
        "threshold": ResultTable(("d_RD", "phi", "alpha", "d_SR_star"), tuple(star)),
    }


def fig_5(n_phi: int = 60, n_dsr: int = 80, d_max: float = 4.0) -> dict[str, ResultTable]:
    """Optimal regime over source placements; grid points are cell centres."""
    phis = (np.arange(n_phi) + 0.5) * math.pi / n_phi
    dsrs = (np.arange(n_dsr) + 0.5) * d_max / n_dsr
    grid = sweep_2d_topology(_cfg(FIG5_CONFIG), phis, dsrs, FIG5_BUDGET)
    return topology_tables(grid)


def topology_tables(grid) -> dict[str, ResultTable]:
    rows = []
    for i, phi in enumerate(grid.phi):
        for j, d in enumerate(grid.d_SR):
            rows.append((float(phi), float(d), grid.gamma[i, j], grid.r[i, j], grid.d[i, j], grid.labels[i, j]))
    counts = Counter(lab.value for lab in grid.labels.ravel())
    return {
        "grid": ResultTable(("phi", "d_SR", "gamma", "r", "d", "lgr"), tuple(rows)),
        "counts": ResultTable(("lgr", "cells"), tuple(sorted(counts.items()))),
    }


def fig_6a(n: int = 201, P_max: float = 2.0) -> dict[str, ResultTable]:
    return path_tables(FIG6A_GAINS, np.linspace(0.0, P_max, n))


def fig_6b(n: int = 201, P_max: float = 2.0) -> dict[str, ResultTable]:
    return path_tables(FIG6B_GAINS, np.linspace(0.0, P_max, n))


def fig_7a(n: int = 101, P_max: float = 5.0) -> dict[str, ResultTable]:
    """Per-source budget problem: symmetric allocation against ``P``."""
    cfg = _cfg(FIG7_CONFIG)
    gamma = microwave_summary(cfg).gamma
    r, d = cfg.gain_bar("1R"), cfg.gain_bar("1D")
    rows = []
    for P in np.linspace(0.0, P_max, n):
        a, lgr = symmetric_lgr(r, d, gamma, float(P))
        rows.append((float(P), lgr, a.p1, a.q1, a.p2, a.q2))
    sg = math.sqrt(gamma)
    P_sat = (2 * sg - 1) / r - 1 / d if r <= d * sg else (sg - 1) / r
    return {
        "samples": ResultTable(("P", "lgr", "p1", "q1", "p2", "q2"), tuple(rows)),
        "saturation": ResultTable(
            ("gamma", "r", "d", "q_sat", "P_sat"), ((gamma, r, d, (sg - 1) / r, P_sat),)
        ),
    }


def fig_7b(budgets=None, **kw) -> dict[str, ResultTable]:
    """Joint budget problem: every link power against ``P``."""
    if budgets is None:
        budgets = np.linspace(0.0, 5.0, 51)
    return {"samples": p2_table(_cfg(FIG7_CONFIG), budgets, **kw)}


FIGURES = {"2a": fig_2a, "5": fig_5, "6a": fig_6a, "6b": fig_6b, "7a": fig_7a, "7b": fig_7b}
