"""Achievable rate regions, capacity conditions and the sum-rate functionals.

Regions are kept as lists of linear constraints ``a1 R1 + a2 R2 <= b`` with
``a_k`` in ``{0, 1}``; vertices are only computed for presentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import bisect

from .allocator.model import Allocation, MmWaveGains
from .channel import (
    DEFAULT_QMC_SAMPLES,
    DualBandConfig,
    Geometry,
    MicrowaveSummary,
    ergodic_rate,
)

__all__ = [
    "Constraint",
    "RateRegion",
    "ConditionMargin",
    "NearnessReport",
    "SumRates",
    "NoCrossingError",
    "rmarc_achievable_region",
    "drmarc_region",
    "jointly_near_check",
    "sum_condition_margin",
    "threshold_distance",
    "sum_rates",
]


@dataclass(frozen=True)
class Constraint:
    """``coeff_R1 * R1 + coeff_R2 * R2 <= bound``."""

    coeff_R1: int
    coeff_R2: int
    bound: float
    name: str = ""

    def __post_init__(self):
        if self.coeff_R1 not in (0, 1) or self.coeff_R2 not in (0, 1):
            raise ValueError("coefficients must be 0 or 1")
        if self.coeff_R1 == self.coeff_R2 == 0:
            raise ValueError("constraint must involve at least one rate")
        if not self.bound >= 0:
            raise ValueError("bounds must be non-negative")


@dataclass(frozen=True)
class RateRegion:
    """Polytope in the non-negative quadrant cut out by ``constraints``."""

    constraints: tuple[Constraint, ...]

    def bound(self, name: str) -> float:
        return next(c.bound for c in self.constraints if c.name == name)

    def max_R1(self) -> float:
        return min(c.bound for c in self.constraints if c.coeff_R1)

    def max_R2(self) -> float:
        return min(c.bound for c in self.constraints if c.coeff_R2)

    def max_sum_rate(self) -> float:
        both = [c.bound for c in self.constraints if c.coeff_R1 and c.coeff_R2]
        return min(both + [self.max_R1() + self.max_R2()])

    def contains(self, R1: float, R2: float, tol: float = 0.0) -> bool:
        if R1 < -tol or R2 < -tol:
            return False
        return all(c.coeff_R1 * R1 + c.coeff_R2 * R2 <= c.bound + tol for c in self.constraints)

    def vertices(self) -> list[tuple[float, float]]:
        """Corner points in counter-clockwise order starting at the origin."""
        a, b, s = self.max_R1(), self.max_R2(), self.max_sum_rate()
        pts = [(0.0, 0.0), (a, 0.0), (a, max(s - a, 0.0)), (max(s - b, 0.0), b), (0.0, b)]
        out: list[tuple[float, float]] = []
        for p in pts:
            if not out or not np.allclose(out[-1], p, rtol=0, atol=1e-15):
                out.append(p)
        if len(out) > 1 and np.allclose(out[-1], out[0], rtol=0, atol=1e-15):
            out.pop()
        return out


@dataclass(frozen=True)
class ConditionMargin:
    holds: bool
    margin: float


@dataclass(frozen=True)
class NearnessReport:
    """Per-user and sum capacity conditions; ``margin = RHS - LHS``."""

    cond_r1: ConditionMargin
    cond_r2: ConditionMargin
    cond_sum: ConditionMargin

    @property
    def capacity_achieving(self) -> bool:
        return self.cond_r1.holds and self.cond_r2.holds and self.cond_sum.holds


@dataclass(frozen=True)
class SumRates:
    sigma_big_R: float
    sigma_big_D: float
    rate: float


def _mm_power(cfg: DualBandConfig, override: Optional[Mapping[str, float]], name: str) -> float:
    if override is not None and name in override:
        value = float(override[name])
        if value < 0:
            raise ValueError(f"power {name} must be non-negative")
        return value
    return cfg.mmwave.power(name)


def _bounds(cfg: DualBandConfig, mm_powers, seed: int, samples: int) -> dict[str, float]:
    mw, mm, alpha = cfg.microwave, cfg.mmwave, cfg.alpha
    kw = dict(seed=seed, samples=samples)
    P1, P2, PR = mw.power("P1"), mw.power("P2"), mw.power("PR")
    Ph1 = _mm_power(cfg, mm_powers, "Phat1")
    Ph2 = _mm_power(cfg, mm_powers, "Phat2")
    PbR = _mm_power(cfg, mm_powers, "PbarR")
    G = cfg.gain

    def mwr(gains, powers):
        return ergodic_rate(mw.fading, gains, powers, **kw)

    def mmr(link, power):
        return alpha * ergodic_rate(mm.fading, [cfg.gain_bar(link)], [power], **kw)

    relay1, relay2 = mmr("1R", Ph1), mmr("2R", Ph2)
    dest = mmr("RD", PbR)
    return {
        "relay_R1": mwr([G("1R")], [P1]) + relay1,
        "relay_R2": mwr([G("2R")], [P2]) + relay2,
        "relay_sum": mwr([G("1R"), G("2R")], [P1, P2]) + relay1 + relay2,
        "dest_R1": mwr([G("1D"), G("RD")], [P1, PR]) + dest,
        "dest_R2": mwr([G("2D"), G("RD")], [P2, PR]) + dest,
        "dest_sum": mwr([G("1D"), G("2D"), G("RD")], [P1, P2, PR]) + dest,
    }


_SHAPES = {"R1": (1, 0), "R2": (0, 1), "sum": (1, 1)}


def rmarc_achievable_region(
    cfg: DualBandConfig,
    mm_powers: Optional[Mapping[str, float]] = None,
    *,
    seed: int = 0,
    samples: int = DEFAULT_QMC_SAMPLES,
) -> RateRegion:
    """Achievable region with mm-wave links to the relay only.

    Six constraints: three decoding conditions at the relay (``relay_R1``,
    ``relay_R2``, ``relay_sum``) and three at the destination
    (``dest_R1``, ``dest_R2``, ``dest_sum``).

    Parameters
    ----------
    cfg : DualBandConfig
    mm_powers : mapping, optional
        Overrides for the mm-wave powers ``Phat1``, ``Phat2`` (sources to
        relay) and ``PbarR`` (relay to destination); missing keys fall back
        to ``cfg.mmwave.powers``.
    seed, samples :
        Quasi-Monte-Carlo controls for multi-term Rayleigh expectations.
    """
    b = _bounds(cfg, mm_powers, seed, samples)
    cons = []
    for name, value in b.items():
        a1, a2 = _SHAPES[name.split("_")[1]]
        cons.append(Constraint(a1, a2, value, name))
    return RateRegion(tuple(cons))


def drmarc_region(
    rmarc: RateRegion,
    cfg: DualBandConfig,
    direct_powers: Optional[Mapping[str, float]] = None,
    *,
    seed: int = 0,
    samples: int = DEFAULT_QMC_SAMPLES,
) -> RateRegion:
    """Add the mm-wave direct links ``Pbar1``, ``Pbar2`` to a relay-only region.

    Each per-user bound grows by that user's direct-link rate and every sum
    bound by both.
    """
    kw = dict(seed=seed, samples=samples)
    inc = []
    for k in (1, 2):
        power = _mm_power(cfg, direct_powers, f"Pbar{k}")
        if power == 0.0:
            inc.append(0.0)
        else:
            inc.append(
                cfg.alpha * ergodic_rate(cfg.mmwave.fading, [cfg.gain_bar(f"{k}D")], [power], **kw)
            )
    cons = tuple(
        replace(c, bound=c.bound + c.coeff_R1 * inc[0] + c.coeff_R2 * inc[1])
        for c in rmarc.constraints
    )
    return RateRegion(cons)


def jointly_near_check(
    cfg: DualBandConfig,
    mm_relay_powers: Optional[Mapping[str, float]] = None,
    *,
    seed: int = 0,
    samples: int = DEFAULT_QMC_SAMPLES,
) -> NearnessReport:
    """Conditions under which the relay never limits the destination bounds."""
    b = _bounds(cfg, mm_relay_powers, seed, samples)

    def cond(key):
        margin = b[f"relay_{key}"] - b[f"dest_{key}"]
        return ConditionMargin(margin >= 0, margin)

    return NearnessReport(cond("R1"), cond("R2"), cond("sum"))


def sum_condition_margin(
    cfg: DualBandConfig, d_RD: float, d_SR: float, phi: float, *, which: str = "sum"
) -> float:
    """Margin of the capacity condition for the symmetric layout.

    ``which`` is ``"sum"`` for the sum condition alone or ``"all"`` for the
    smallest of the three margins.
    """
    report = jointly_near_check(cfg.with_geometry(Geometry.symmetric(d_RD, d_SR, phi)))
    if which == "sum":
        return report.cond_sum.margin
    if which == "all":
        return min(report.cond_r1.margin, report.cond_r2.margin, report.cond_sum.margin)
    raise ValueError(f"unknown condition selector {which!r}")


class NoCrossingError(ValueError):
    """The condition margin does not change sign over the search bracket."""

    def __init__(self, always_holds: bool, lo: float, hi: float):
        state = "always holds" if always_holds else "never holds"
        super().__init__(f"condition {state} for d_SR in [{lo}, {hi}]")
        self.always_holds = always_holds


def threshold_distance(
    cfg: DualBandConfig,
    d_RD: float,
    phi: float,
    alpha: Optional[float] = None,
    tol: float = 1e-9,
    *,
    bracket: tuple[float, float] = (1e-3, 10.0),
    steps: int = 60,
    which: str = "sum",
) -> float:
    """Largest source-relay distance for which the capacity condition holds.

    The condition margin is positive close to the relay and negative far
    from it; the crossing is located by bisection over ``bracket``.
    ``alpha`` overrides ``cfg.alpha`` when given.

    Raises
    ------
    NoCrossingError
        If the margin has the same sign at both ends of the bracket.
    """
    if alpha is not None:
        cfg = replace(cfg, alpha=alpha)
    lo, hi = bracket

    def margin(d):
        return sum_condition_margin(cfg, d_RD, d, phi, which=which)

    m_lo, m_hi = margin(lo), margin(hi)
    if m_lo * m_hi > 0:
        raise NoCrossingError(m_lo > 0, lo, hi)
    xtol = max((hi - lo) * 2.0**-steps, 4 * np.finfo(float).eps * hi)
    root = bisect(margin, lo, hi, xtol=xtol, maxiter=steps)
    if abs(margin(root)) > tol:
        # Steep margin: report the bracket end with the smaller residual.
        width = (hi - lo) * 2.0**-steps
        cands = [root - width, root, root + width]
        root = min(cands, key=lambda d: abs(margin(d)))
    return float(root)


def sum_rates(
    summary: MicrowaveSummary, gains: MmWaveGains, alloc: Allocation, alpha: float
) -> SumRates:
    """Sum rates decodable at the relay and at the destination.

    ``sigma_big_R`` adds the mm-wave relay and direct link rates to the
    microwave relay rate, ``sigma_big_D`` adds only the direct links; the
    achievable rate is their minimum.
    """
    x = alloc.as_array()
    if np.any(x < 0):
        raise ValueError("allocation must be non-negative")
    direct = math.log2(1 + gains.d1 * alloc.p1) + math.log2(1 + gains.d2 * alloc.p2)
    relay = math.log2(1 + gains.r1 * alloc.q1) + math.log2(1 + gains.r2 * alloc.q2)
    s_r = summary.sigma_R + alpha * (relay + direct)
    s_d = summary.sigma_D + alpha * direct
    return SumRates(s_r, s_d, min(s_r, s_d))
