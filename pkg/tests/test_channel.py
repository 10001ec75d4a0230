import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import exp1

from marc_dualband.channel import (
    BandConfig,
    DualBandConfig,
    FadingModel,
    Geometry,
    MicrowaveSummary,
    ergodic_rate,
    microwave_summary,
    pathloss_gain,
    source_destination_distance,
)
from marc_dualband.figures import FIG7_CONFIG
from marc_dualband.config import load_config


def rayleigh_closed_form(snr):
    return math.exp(1 / snr) * exp1(1 / snr) / math.log(2)


@pytest.mark.parametrize("dist, beta, expected", [(1.0, 4, 1.0), (1.3, 4, 0.35013), (0.5, 2, 4.0)])
def test_pathloss_gain(dist, beta, expected):
    assert pathloss_gain(dist, beta) == pytest.approx(expected, abs=5e-6)


@pytest.mark.parametrize("dist, beta", [(0.0, 2), (-1.0, 2), (1.0, 0.0)])
def test_pathloss_gain_rejects(dist, beta):
    with pytest.raises(ValueError):
        pathloss_gain(dist, beta)


def test_source_destination_distance():
    assert source_destination_distance(1.0, 1.0, math.pi / 2) == pytest.approx(math.sqrt(2))
    assert source_destination_distance(1.0, 2.0, 0.0) == pytest.approx(3.0)
    assert source_destination_distance(1.0, 0.5, math.pi) == pytest.approx(0.5)


def test_geometry_requires_all_links():
    with pytest.raises(ValueError):
        Geometry({"1R": 1.0})


def test_phase_rates():
    assert ergodic_rate("phase", [1.0], [1.0]) == 1.0
    assert ergodic_rate("phase", [1, 1, 1], [0, 0, 0]) == 0.0
    assert ergodic_rate("phase", [2.0, 1.0], [1.0, 1.0]) == pytest.approx(2.0)


def test_rayleigh_single_matches_exponential_integral():
    assert ergodic_rate("rayleigh", [1.0], [10.0]) == pytest.approx(
        rayleigh_closed_form(10.0), abs=1e-10
    )


def test_rayleigh_closed_form_against_direct_integration():
    # Independent check of the oracle itself.
    for snr in (0.01, 1.0, 100.0):
        val, _ = quad(lambda t: math.exp(-t) * math.log2(1 + snr * t), 0, np.inf, limit=200)
        assert rayleigh_closed_form(snr) == pytest.approx(val, rel=1e-9)


def test_rayleigh_two_terms_matches_hypoexponential_integral():
    # Sum of two exponentials with means a != b has density (e^{-x/a}-e^{-x/b})/(a-b).
    a, b = 2.0, 0.5
    dens = lambda x: (math.exp(-x / a) - math.exp(-x / b)) / (a - b)
    ref, _ = quad(lambda x: dens(x) * math.log2(1 + x), 0, np.inf, limit=200)
    assert ergodic_rate("rayleigh", [a, b], [1.0, 1.0], seed=3) == pytest.approx(ref, abs=2e-4)


def test_rayleigh_qmc_is_seeded():
    x = ergodic_rate("rayleigh", [1.0, 2.0], [1.0, 1.0], seed=11)
    y = ergodic_rate("rayleigh", [1.0, 2.0], [1.0, 1.0], seed=11)
    assert x == y


def test_ergodic_rate_validation():
    with pytest.raises(ValueError):
        ergodic_rate("phase", [1.0], [-1.0])
    with pytest.raises(ValueError):
        ergodic_rate("phase", [1.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        ergodic_rate("nakagami", [1.0], [1.0])


def test_microwave_summary_unit_gains():
    s = microwave_summary(load_config(FIG7_CONFIG).to_dual_band())
    assert s.sigma_R == pytest.approx(math.log2(3))
    assert s.sigma_D == pytest.approx(4.0)
    assert s.gamma == pytest.approx(2.3094010767585, abs=1e-12)
    assert math.sqrt(s.gamma) - 1 == pytest.approx(0.52, abs=0.01)


def test_microwave_summary_balanced_gives_unit_gamma():
    # sigma_R = sigma_D: relay links as strong as destination plus relay hop.
    mw = BandConfig(2.0, powers={"P1": 1, "P2": 1, "PR": 0})
    mm = BandConfig(4.0, powers={"PbarR": 0})
    cfg = DualBandConfig(
        mw, mm, 2.0, gains={k: 1.0 for k in ("1R", "2R", "1D", "2D", "RD")},
        gains_bar={k: 1.0 for k in ("1R", "2R", "1D", "2D", "RD")},
    )
    assert microwave_summary(cfg).gamma == pytest.approx(1.0)


def test_explicit_gamma_bypasses_microwave_model():
    cfg = DualBandConfig(BandConfig(2.0), BandConfig(4.0), 2.0, gamma=3.0)
    s = microwave_summary(cfg)
    assert s.gamma == 3.0
    assert s == MicrowaveSummary.from_gamma(3.0, 2.0)
    assert 2 ** ((s.sigma_D - s.sigma_R) / 2.0) == pytest.approx(3.0)


def test_config_validation():
    with pytest.raises(ValueError):
        BandConfig(0.0)
    with pytest.raises(ValueError):
        BandConfig(2.0, powers={"P1": -1})
    with pytest.raises(ValueError):
        DualBandConfig(BandConfig(2.0), BandConfig(4.0), -1.0)
    with pytest.raises(ValueError):
        DualBandConfig(BandConfig(2.0), BandConfig(4.0), 1.0, gains={"XY": 1.0})
    cfg = DualBandConfig(BandConfig(2.0), BandConfig(4.0), 1.0)
    with pytest.raises(ValueError):
        cfg.gain("1R")
    assert BandConfig(2.0, "rayleigh").fading is FadingModel.RAYLEIGH


def test_gains_follow_geometry():
    cfg = DualBandConfig(BandConfig(2.0), BandConfig(4.0), 1.0).with_geometry(
        Geometry.symmetric(1.0, 2.0, math.pi / 2)
    )
    assert cfg.gain("1R") == pytest.approx(0.25)
    assert cfg.gain_bar("1R") == pytest.approx(1 / 16)
    assert cfg.gain("1D") == pytest.approx(1 / 5)
