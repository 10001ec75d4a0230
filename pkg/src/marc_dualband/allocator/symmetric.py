"""Closed forms for symmetric gains and the two-dimensional topology sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..channel import DualBandConfig, Geometry, microwave_summary
from .model import Allocation, LgrId

__all__ = ["symmetric_allocate", "symmetric_lgr", "TopologyGrid", "sweep_2d_topology"]


def symmetric_lgr(r: float, d: float, gamma: float, P: float) -> tuple[Allocation, LgrId]:
    """Optimal allocation and regime when ``r1 = r2 = r`` and ``d1 = d2 = d``.

    Both sources get the same split ``(p, q)``. Three cases arise for
    ``gamma > 1``: direct links stronger (``d >= r``), relay links mildly
    stronger (``d < r <= d sqrt(gamma)``) and relay links much stronger.
    A budget exactly on a boundary is assigned to the lower-budget regime.
    """
    if not (r > 0 and d > 0 and gamma > 0):
        raise ValueError("gains and gamma must be positive")
    if P < 0:
        raise ValueError("budget must be non-negative")
    if gamma <= 1:
        return Allocation(P, 0.0, P, 0.0), LgrId.L1
    sg = math.sqrt(gamma)
    q_sat = (sg - 1) / r
    if r > d * sg:
        if P <= q_sat:
            q, lgr = P, LgrId.A_rr
        else:
            q, lgr = q_sat, LgrId.S_rdrd
    else:
        if d >= r and P <= 1 / r - 1 / d:
            q, lgr = 0.0, LgrId.A_dd
        elif d < r and P <= 1 / d - 1 / r:
            q, lgr = P, LgrId.A_rr
        elif P <= (2 * sg - 1) / r - 1 / d:
            q, lgr = 0.5 * (P - 1 / r + 1 / d), LgrId.A_rdrd
        else:
            q, lgr = q_sat, LgrId.S_rdrd
    return Allocation(P - q, q, P - q, q), lgr


def symmetric_allocate(r: float, d: float, gamma: float, P: float) -> Allocation:
    """Symmetric-gain allocation; see :func:`symmetric_lgr`."""
    return symmetric_lgr(r, d, gamma, P)[0]


@dataclass(frozen=True)
class TopologyGrid:
    """Optimal regime per source placement.

    ``labels[i, j]`` and ``gamma[i, j]`` belong to ``phi[i]`` and ``d_SR[j]``.
    """

    phi: np.ndarray
    d_SR: np.ndarray
    labels: np.ndarray
    gamma: np.ndarray
    r: np.ndarray
    d: np.ndarray


def sweep_2d_topology(
    cfg: DualBandConfig,
    phi_grid: Sequence[float],
    dsr_grid: Sequence[float],
    P: float,
    d_RD: float = 1.0,
) -> TopologyGrid:
    """Regime map over symmetric source placements.

    For each angle ``phi`` and source-relay distance ``d_SR`` the geometry
    of ``cfg`` is replaced by the mirrored two-source layout, ``gamma`` is
    recomputed from the microwave band and the mm-wave gains follow from
    path loss. Explicit gain overrides in ``cfg`` are ignored.
    """
    base = DualBandConfig(cfg.microwave, cfg.mmwave, cfg.alpha)
    phis = np.asarray(phi_grid, dtype=float)
    dsrs = np.asarray(dsr_grid, dtype=float)
    shape = (phis.size, dsrs.size)
    labels = np.empty(shape, dtype=object)
    gam, rr, dd = np.empty(shape), np.empty(shape), np.empty(shape)
    for i, phi in enumerate(phis):
        for j, dsr in enumerate(dsrs):
            c = base.with_geometry(Geometry.symmetric(d_RD, dsr, phi))
            gam[i, j] = microwave_summary(c).gamma
            rr[i, j], dd[i, j] = c.gain_bar("1R"), c.gain_bar("1D")
            labels[i, j] = symmetric_lgr(rr[i, j], dd[i, j], gam[i, j], P)[1]
    return TopologyGrid(phis, dsrs, labels, gam, rr, dd)
