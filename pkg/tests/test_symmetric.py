import math

import numpy as np
import pytest

from marc_dualband.allocator import (
    LgrId,
    MmWaveGains,
    allocate,
    sweep_2d_topology,
    symmetric_allocate,
    symmetric_lgr,
)
from marc_dualband.channel import Geometry, microwave_summary
from marc_dualband.config import load_config
from marc_dualband.figures import FIG5_BUDGET, FIG5_CONFIG


def test_fig7a_saturated_relay_power():
    a, lgr = symmetric_lgr(1.0, 1.5, 2.309, 3.0)
    assert lgr is LgrId.S_rdrd
    assert a.q1 == a.q2 == pytest.approx(math.sqrt(2.309) - 1, abs=1e-15)
    assert a.q1 == pytest.approx(0.52, abs=0.01)


def test_direct_links_only_below_first_threshold():
    a, lgr = symmetric_lgr(1.0, 2.0, 3.0, 0.4)
    assert lgr is LgrId.A_dd
    assert a.as_array().tolist() == [0.4, 0.0, 0.4, 0.0]


def test_relay_links_only_when_relay_dominates():
    r, d, gamma = 4.0, 1.0, 2.0
    P = 0.5 * (math.sqrt(gamma) - 1) / r
    a, lgr = symmetric_lgr(r, d, gamma, P)
    assert lgr is LgrId.A_rr
    assert a.as_array().tolist() == [0.0, P, 0.0, P]


def test_gamma_at_most_one():
    assert symmetric_allocate(1.0, 1.0, 1.0, 2.0).as_array().tolist() == [2.0, 0.0, 2.0, 0.0]


@pytest.mark.parametrize("r, d, gamma", [(1.0, 1.5, 2.309), (2.0, 1.0, 3.0), (5.0, 1.0, 2.0), (1.0, 1.0, 4.0)])
def test_matches_general_allocator(r, d, gamma):
    g = MmWaveGains(r, r, d, d, gamma)
    for P in np.linspace(0.0, 6.0, 61):
        a = symmetric_allocate(r, d, gamma, P).as_array()
        b = allocate(g, P)[0].as_array()
        assert np.max(np.abs(a - b)) <= 1e-10


def test_invalid_inputs():
    with pytest.raises(ValueError):
        symmetric_lgr(0.0, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        symmetric_lgr(1.0, 1.0, 2.0, -1.0)


@pytest.fixture(scope="module")
def fig5_grid():
    cfg = load_config(FIG5_CONFIG).to_dual_band()
    phis = (np.arange(12) + 0.5) * math.pi / 12
    dsrs = (np.arange(16) + 0.5) * 4.0 / 16
    return cfg, sweep_2d_topology(cfg, phis, dsrs, FIG5_BUDGET)


def test_sweep_regimes_present(fig5_grid):
    _, grid = fig5_grid
    labels = {lab for lab in grid.labels.ravel()}
    assert {LgrId.L1, LgrId.A_rr, LgrId.A_dd, LgrId.A_rdrd, LgrId.S_rdrd} == labels


def test_sweep_nearest_relay_is_direct_only(fig5_grid):
    cfg = fig5_grid[0]
    grid = sweep_2d_topology(cfg, [math.pi / 2], [0.05], FIG5_BUDGET)
    assert grid.labels[0, 0] is LgrId.L1
    assert grid.gamma[0, 0] <= 1


def test_sweep_cells_match_thresholds(fig5_grid):
    cfg, grid = fig5_grid
    P = FIG5_BUDGET
    for i, phi in enumerate(grid.phi):
        for j, dsr in enumerate(grid.d_SR):
            gam, r, d = grid.gamma[i, j], grid.r[i, j], grid.d[i, j]
            c = cfg.with_geometry(Geometry.symmetric(1.0, dsr, phi))
            assert gam == pytest.approx(microwave_summary(c).gamma)
            if gam <= 1:
                assert grid.labels[i, j] is LgrId.L1
                continue
            if P >= (2 * math.sqrt(gam) - 1) / r - 1 / d and r <= d * math.sqrt(gam):
                assert grid.labels[i, j] is LgrId.S_rdrd
            # Relay-only use up to 1/d - 1/r presumes r <= d sqrt(gamma); beyond
            # that the relay links saturate first.
            if 0 < P <= 1 / d - 1 / r and r <= d * math.sqrt(gam):
                assert grid.labels[i, j] is LgrId.A_rr
