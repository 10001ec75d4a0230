"""Dual-band channel model: geometry, fading statistics and ergodic rates.

All rates are in bits per channel use (base-2 logarithms). The microwave
band is summarised by the pair ``(sigma_R, sigma_D)`` and the imbalance
``gamma = 2 ** ((sigma_D - sigma_R) / alpha)`` that drives the mm-wave
power allocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import qmc

__all__ = [
    "LINKS",
    "FadingModel",
    "Geometry",
    "BandConfig",
    "DualBandConfig",
    "MicrowaveSummary",
    "pathloss_gain",
    "ergodic_rate",
    "microwave_summary",
    "DEFAULT_QMC_SAMPLES",
]

#: Link names, transmitter first: sources 1 and 2, relay R, destination D.
LINKS = ("1R", "2R", "1D", "2D", "RD")

DEFAULT_QMC_SAMPLES = 2**16

_LN2 = math.log(2.0)


class FadingModel(str, Enum):
    PHASE = "phase"
    RAYLEIGH = "rayleigh"


def pathloss_gain(dist: float, beta: float) -> float:
    """Mean link gain ``1 / dist**beta``.

    For phase fading this is the deterministic gain, for Rayleigh fading the
    mean of the exponentially distributed power gain.
    """
    if not dist > 0:
        raise ValueError(f"distance must be positive, got {dist!r}")
    if not beta > 0:
        raise ValueError(f"path-loss exponent must be positive, got {beta!r}")
    return float(dist) ** (-float(beta))


@dataclass(frozen=True)
class Geometry:
    """Per-link distances.

    Build the two-dimensional layout (relay at the origin, destination on the
    x-axis, sources mirrored about it) with :meth:`symmetric`.
    """

    distances: Mapping[str, float]

    def __post_init__(self):
        missing = set(LINKS) - set(self.distances)
        if missing:
            raise ValueError(f"missing link distances: {sorted(missing)}")
        for link, dist in self.distances.items():
            if link not in LINKS:
                raise ValueError(f"unknown link {link!r}")
            if not dist > 0:
                raise ValueError(f"distance for link {link} must be positive")

    @classmethod
    def symmetric(cls, d_RD: float, d_SR: float, phi: float) -> "Geometry":
        d_SD = source_destination_distance(d_RD, d_SR, phi)
        return cls({"1R": d_SR, "2R": d_SR, "1D": d_SD, "2D": d_SD, "RD": d_RD})


def source_destination_distance(d_RD: float, d_SR: float, phi: float) -> float:
    return math.sqrt(d_SR**2 + d_RD**2 + 2.0 * d_SR * d_RD * math.cos(phi))


@dataclass(frozen=True)
class BandConfig:
    """One band: path-loss exponent, fading law and fixed transmit powers.

    Power keys used by the model: microwave ``P1``, ``P2``, ``PR``; mm-wave
    ``Phat1``, ``Phat2`` (relay links), ``Pbar1``, ``Pbar2`` (direct links)
    and ``PbarR`` (relay to destination).
    """

    pathloss_exp: float
    fading: FadingModel = FadingModel.PHASE
    powers: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.pathloss_exp > 0:
            raise ValueError("pathloss_exp must be positive")
        object.__setattr__(self, "fading", FadingModel(self.fading))
        for name, value in self.powers.items():
            if value < 0:
                raise ValueError(f"power {name} must be non-negative")

    def power(self, name: str) -> float:
        return float(self.powers.get(name, 0.0))


@dataclass(frozen=True)
class DualBandConfig:
    """Full description of the dual-band multiple-access relay channel.

    Mean gains come from ``geometry`` unless overridden per link in
    ``gains`` (microwave) or ``gains_bar`` (mm-wave). ``gamma``, when set,
    bypasses the microwave model entirely.
    """

    microwave: BandConfig
    mmwave: BandConfig
    alpha: float
    geometry: Optional[Geometry] = None
    gains: Mapping[str, float] = field(default_factory=dict)
    gains_bar: Mapping[str, float] = field(default_factory=dict)
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        for table in (self.gains, self.gains_bar):
            for link, g in table.items():
                if link not in LINKS:
                    raise ValueError(f"unknown link {link!r}")
                if not g > 0:
                    raise ValueError(f"gain for link {link} must be positive")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def gain(self, link: str) -> float:
        """Mean microwave gain of ``link``."""
        return self._gain(link, self.gains, self.microwave.pathloss_exp)

    def gain_bar(self, link: str) -> float:
        """Mean mm-wave gain of ``link``."""
        return self._gain(link, self.gains_bar, self.mmwave.pathloss_exp)

    def _gain(self, link, table, beta):
        if link in table:
            return float(table[link])
        if self.geometry is None:
            raise ValueError(f"no geometry or explicit gain for link {link}")
        return pathloss_gain(self.geometry.distances[link], beta)

    def with_geometry(self, geometry: Geometry) -> "DualBandConfig":
        return replace(self, geometry=geometry)


@dataclass(frozen=True)
class MicrowaveSummary:
    sigma_R: float
    sigma_D: float
    gamma: float

    @classmethod
    def from_gamma(cls, gamma: float, alpha: float = 1.0) -> "MicrowaveSummary":
        """Normalised summary with ``sigma_R = 0`` reproducing ``gamma``."""
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        return cls(0.0, alpha * math.log2(gamma), float(gamma))


# -- ergodic rates -----------------------------------------------------------


@lru_cache(maxsize=None)
def _split_rule(nodes: int = 64):
    # Gauss-Legendre on [0, 1] and shifted Gauss-Laguerre on [1, inf): a
    # single Laguerre rule loses accuracy once the log singularity at
    # t = -1/(mean*power) approaches the origin.
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    head_t = 0.5 * (xg + 1.0)
    head_w = 0.5 * wg * np.exp(-head_t)
    xl, wl = np.polynomial.laguerre.laggauss(nodes)
    tail_t = 1.0 + xl
    tail_w = math.exp(-1.0) * wl
    return np.concatenate([head_t, tail_t]), np.concatenate([head_w, tail_w])


def _rayleigh_single(snr: float) -> float:
    if snr == 0.0:
        return 0.0
    t, w = _split_rule()
    return float(np.dot(w, np.log1p(snr * t)) / _LN2)


def _rayleigh_qmc(snrs: np.ndarray, seed: int, samples: int) -> float:
    sampler = qmc.Sobol(d=len(snrs), scramble=True, seed=seed)
    m = max(int(math.ceil(math.log2(samples))), 1)
    u = sampler.random_base2(m)
    g = -np.log1p(-u)  # unit-mean exponentials
    return float(np.mean(np.log1p(g @ snrs)) / _LN2)


def ergodic_rate(
    fading: FadingModel | str,
    mean_gains: Sequence[float],
    powers: Sequence[float],
    *,
    seed: int = 0,
    samples: int = DEFAULT_QMC_SAMPLES,
) -> float:
    """``E[log2(1 + sum_i G_i P_i)]`` over independent link gains.

    Phase fading is deterministic. Rayleigh fading uses a fixed quadrature
    rule for a single active term and scrambled Sobol sampling (seeded by
    ``seed``) when several terms are active.
    """
    fading = FadingModel(fading)
    g = np.asarray(mean_gains, dtype=float)
    p = np.asarray(powers, dtype=float)
    if g.ndim != 1 or g.size == 0 or g.shape != p.shape:
        raise ValueError("mean_gains and powers must be equal-length, non-empty")
    if np.any(p < 0):
        raise ValueError("powers must be non-negative")
    if np.any(g <= 0):
        raise ValueError("mean gains must be positive")
    snrs = g * p
    if fading is FadingModel.PHASE:
        return math.log2(1.0 + float(snrs.sum()))
    snrs = snrs[snrs > 0]
    if snrs.size == 0:
        return 0.0
    if snrs.size == 1:
        return _rayleigh_single(float(snrs[0]))
    return _rayleigh_qmc(snrs, seed, samples)


def microwave_summary(
    cfg: DualBandConfig, *, seed: int = 0, samples: int = DEFAULT_QMC_SAMPLES
) -> MicrowaveSummary:
    """``sigma_R``, ``sigma_D`` and ``gamma`` for a configuration.

    An explicit ``cfg.gamma`` takes precedence and yields the normalised
    summary of :meth:`MicrowaveSummary.from_gamma`.
    """
    if cfg.gamma is not None:
        return MicrowaveSummary.from_gamma(cfg.gamma, cfg.alpha or 1.0)
    if cfg.alpha <= 0:
        raise ValueError("gamma is undefined for alpha = 0")
    mw, mm = cfg.microwave, cfg.mmwave
    kw = dict(seed=seed, samples=samples)
    sigma_R = ergodic_rate(
        mw.fading,
        [cfg.gain("1R"), cfg.gain("2R")],
        [mw.power("P1"), mw.power("P2")],
        **kw,
    )
    sigma_D = ergodic_rate(
        mw.fading,
        [cfg.gain("1D"), cfg.gain("2D"), cfg.gain("RD")],
        [mw.power("P1"), mw.power("P2"), mw.power("PR")],
        **kw,
    ) + cfg.alpha * ergodic_rate(mm.fading, [cfg.gain_bar("RD")], [mm.power("PbarR")], **kw)
    gamma = 2.0 ** ((sigma_D - sigma_R) / cfg.alpha)
    return MicrowaveSummary(sigma_R, sigma_D, gamma)
