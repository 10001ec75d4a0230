"""Threshold powers that partition the budget axis into link-gain regimes."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .model import MmWaveGains, RelayRegime
from .roots import positive_roots

__all__ = ["ThresholdPowers", "threshold_powers", "relay_regime", "regime_of", "threshold_polynomials"]


@dataclass(frozen=True)
class ThresholdPowers:
    """Threshold powers of a gain tuple.

    Names follow the regime they bound: ``P_rdd`` is the budget at which
    source 1 saturates while on both links and source 2 is on its direct
    link. Primed entries are sign-flipped copies, ``hat`` entries refer to
    source 2, and ``bar`` entries are the saturated-regime limits. Values
    may be negative; a vacuous root condition is ``+inf`` (no sign change)
    or ``-inf`` (already satisfied at zero budget with no real crossing).

    Attributes
    ----------
    multiple_roots : tuple of str
        Names of root-defined thresholds whose polynomial showed more than
        one positive root. Expected to be empty.
    degenerate : tuple of str
        Ratio thresholds whose denominator vanished and were set to ``+inf``.
    """

    P_dd: float
    P_dd_prime: float
    P_dd_hat: float
    P_dd_hat_prime: float
    P_rd: float
    P_dr: float
    P_rr: float
    P_rdd: float
    P_drd: float
    P_rrd: float
    P_rdr: float
    P_rdrd: float
    Pbar_rrd: float
    Pbar_rdr: float
    Pbar_rdd: float
    Pbar_drd: float
    multiple_roots: tuple = ()
    degenerate: tuple = ()

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.type == "float"}

    def finite_positive(self) -> list[float]:
        """Sorted distinct thresholds that are finite and positive."""
        vals = {v for v in self.as_dict().values() if math.isfinite(v) and v > 0}
        return sorted(vals)


def relay_regime(
    r1: float,
    r2: float,
    gamma: float,
    d1: Optional[float] = None,
    d2: Optional[float] = None,
) -> RelayRegime:
    """Relay-gain regime for ``gamma > 1``.

    Without direct gains the boundaries ``r1 = gamma r2`` and
    ``r2 = gamma r1`` go to the outer regimes. With ``d1`` and ``d2`` a
    boundary tuple goes to the inner regime when the weaker source still
    keeps positive relay power as the budget grows, i.e. when the
    numerator of ``Pbar_rdd`` (or ``Pbar_drd``) is positive. ``r1 = r2``
    goes to ``R1``.
    """
    if not gamma > 1:
        raise ValueError("relay regimes are defined for gamma > 1")
    direct = d1 is not None and d2 is not None
    if r1 >= gamma * r2:
        if not (direct and r1 == gamma * r2 and _bar_numerators(r1, r2, d1, d2, gamma)[0] > 0):
            return RelayRegime.RS1
    elif r2 >= gamma * r1:
        if not (direct and r2 == gamma * r1 and _bar_numerators(r1, r2, d1, d2, gamma)[1] > 0):
            return RelayRegime.RS2
    return RelayRegime.R1 if r1 >= r2 else RelayRegime.R2


def regime_of(g: MmWaveGains) -> RelayRegime:
    """:func:`relay_regime` of ``g`` with the direct-gain boundary rule."""
    return relay_regime(g.r1, g.r2, g.gamma, g.d1, g.d2)


def _bar_numerators(r1, r2, d1, d2, gam) -> tuple[float, float]:
    return gam - 1 + gam * r2 / d2 - r1 / d1, gam - 1 + gam * r1 / d1 - r2 / d2


def threshold_polynomials(g: MmWaveGains) -> dict[str, list[float]]:
    """Coefficients (highest degree first) of the root-defined thresholds.

    With ``u_k = 1 + x r_k`` and ``v_k = a_k + x r_k``, ``a_k = 1 + r_k/d_k``:
    ``P_rr: u1 u2 - gamma``, ``P_rrd: v2 u1 - 2 gamma``, ``P_rdr: v1 u2 - 2 gamma``,
    ``P_rdrd: v1 v2 - 4 gamma``, ``Pbar_rrd: v2 u1^2 - gamma v1`` and
    ``Pbar_rdr: v1 u2^2 - gamma v2``.
    """
    r1, r2, gam = g.r1, g.r2, g.gamma
    a1, a2 = 1.0 + r1 / g.d1, 1.0 + r2 / g.d2
    rr = r1 * r2
    return {
        "P_rr": [rr, r1 + r2, 1.0 - gam],
        "P_rrd": [rr, r2 + a2 * r1, a2 - 2 * gam],
        "P_rdr": [rr, r1 + a1 * r2, a1 - 2 * gam],
        "P_rdrd": [rr, r1 * a2 + a1 * r2, a1 * a2 - 4 * gam],
        "Pbar_rrd": [r2 * r1 * r1, 2 * rr + a2 * r1 * r1, r2 + 2 * a2 * r1 - gam * r1, a2 - gam * a1],
        "Pbar_rdr": [r1 * r2 * r2, 2 * rr + a1 * r2 * r2, r1 + 2 * a1 * r2 - gam * r2, a1 - gam * a2],
    }


def _rho(coeffs: list[float]) -> tuple[float, bool]:
    # Returns (threshold, several_positive_roots).
    roots = positive_roots(coeffs)
    if coeffs[-1] < 0:
        if not roots:
            return math.inf, False
        return roots[0], len(roots) > 1
    if roots:
        # f dips below zero and recovers: the last crossing is where f
        # becomes positive for good.
        return roots[-1], True
    real = [z.real for z in np.roots(coeffs) if abs(z.imag) <= 1e-12 * (1 + abs(z)) and z.real <= 0]
    return (max(real) if real else -math.inf), False


def _ratio(num: float, den: float) -> tuple[float, bool]:
    # A zero denominator only occurs on a relay-regime boundary, which
    # regime_of assigns so that the threshold is irrelevant: -inf, or 0 when
    # the numerator vanishes too.
    if den == 0.0:
        return (0.0 if num == 0.0 else -math.inf), True
    return num / den, False


def threshold_powers(g: MmWaveGains) -> ThresholdPowers:
    """All threshold powers of ``g`` (requires ``gamma > 1``)."""
    if not g.gamma > 1:
        raise ValueError("threshold powers are defined for gamma > 1")
    r1, r2, d1, d2, gam = g.r1, g.r2, g.d1, g.d2, g.gamma
    vals = {
        "P_dd": 1 / r1 - 1 / d1,
        "P_dd_hat": 1 / r2 - 1 / d2,
        "P_rd": (gam - 1) / r1,
        "P_dr": (gam - 1) / r2,
        "P_rdd": (2 * gam - 1) / r1 - 1 / d1,
        "P_drd": (2 * gam - 1) / r2 - 1 / d2,
    }
    vals["P_dd_prime"] = -vals["P_dd"]
    vals["P_dd_hat_prime"] = -vals["P_dd_hat"]
    multiple, degenerate = [], []
    for name, poly in threshold_polynomials(g).items():
        vals[name], several = _rho(poly)
        if several:
            multiple.append(name)
    num_rdd, num_drd = _bar_numerators(r1, r2, d1, d2, gam)
    for name, num, den in (
        ("Pbar_rdd", num_rdd, r1 - gam * r2),
        ("Pbar_drd", num_drd, r2 - gam * r1),
    ):
        vals[name], flag = _ratio(num, den)
        if flag:
            degenerate.append(name)
    vals = {k: float(v) for k, v in vals.items()}
    return ThresholdPowers(**vals, multiple_roots=tuple(multiple), degenerate=tuple(degenerate))
