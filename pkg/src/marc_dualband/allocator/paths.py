"""Regime paths traced as the budget grows, and saturation thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .lgr import classify
from .model import LgrId, MmWaveGains, RelayRegime
from .thresholds import ThresholdPowers, regime_of, threshold_powers

__all__ = ["Segment", "LgrPath", "SaturationInfo", "lgr_path", "saturation_info", "PATH_TABLE"]

L = LgrId

#: Named regime sequences for relay gains with source 2 the stronger relay
#: link and equal direct gains. Sources-swapped variants are obtained by
#: mirroring every regime.
PATH_TABLE: dict[str, tuple[LgrId, ...]] = {
    "S1": (L.A_rr, L.A_rdr, L.A_rdrd, L.S_rdrd),
    "S2": (L.A_rr, L.A_rdr, L.S_rdr, L.S_rdrd),
    "S3": (L.A_rr, L.S_rdr, L.S_rdrd),
    "S4": (L.A_dd, L.A_drd, L.A_rdrd, L.S_rdrd),
    "S5": (L.A_dr, L.A_rdr, L.A_rdrd, L.S_rdrd),
    "S6": (L.A_dr, L.A_rdr, L.S_rdr, L.S_rdrd),
    "S7": (L.A_dr, L.A_drd, L.A_rdrd, L.S_rdrd),
    "T3": (L.A_rr, L.S_rdr, L.S_rdrd, L.S_drd),
    "T4": (L.A_dd, L.A_drd, L.A_rdrd, L.S_rdrd, L.S_drd),
    "T5": (L.A_dr, L.A_rdr, L.A_rdrd, L.S_rdrd, L.S_drd),
    "T6": (L.A_dr, L.A_rdr, L.S_rdr, L.S_rdrd, L.S_drd),
    "T7": (L.A_dr, L.A_drd, L.A_rdrd, L.S_rdrd, L.S_drd),
    "N1": (L.A_rr, L.S_rdr, L.S_drd),
    "N2": (L.A_dd, L.A_drd, L.S_drd),
    "N3": (L.A_dr, L.A_rdr, L.S_rdr, L.S_drd),
    "N4": (L.A_dr, L.A_drd, L.S_drd),
    "N5": (L.A_dr, L.S_drd),
}
_R2_LABELS = ("S1", "S2", "S3", "S4", "S5", "S6", "S7")
_RS2_LABELS = ("T3", "T4", "T5", "T6", "T7", "N1", "N2", "N3", "N4", "N5")


@dataclass(frozen=True)
class Segment:
    lgr: LgrId
    P_lo: float
    P_hi: float


@dataclass(frozen=True)
class LgrPath:
    """Active regimes over ``[0, inf)`` in budget order.

    ``label`` is the tabulated path name (``"S5"``, ``"T5"``, ...) when the
    direct gains are equal and the regime sequence is a tabulated one; for
    tuples where source 1 has the stronger relay link the name refers to
    the source-swapped tuple.
    """

    segments: tuple[Segment, ...]
    label: Optional[str] = None
    regime: Optional[RelayRegime] = None

    @property
    def lgrs(self) -> tuple[LgrId, ...]:
        return tuple(s.lgr for s in self.segments)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(s.P_lo for s in self.segments[1:])

    def lgr_at(self, P: float) -> LgrId:
        for seg in self.segments:
            if seg.P_lo <= P < seg.P_hi:
                return seg.lgr
        return self.segments[-1].lgr


@dataclass(frozen=True)
class SaturationInfo:
    """Budgets where saturation starts and where the final regime takes over.

    ``q_bar_1`` and ``q_bar_2`` are the limiting relay powers as the budget
    grows; they are set only when the final regime is ``S_rdrd``.
    """

    P_sat: float
    P_fin: float
    saturation_lgr: LgrId
    final_lgr: LgrId
    q_bar_1: Optional[float] = None
    q_bar_2: Optional[float] = None


def _segments(g: MmWaveGains, t: ThresholdPowers) -> list[Segment]:
    cuts = [0.0] + t.finite_positive()
    probes = [0.5 * (a + b) for a, b in zip(cuts[:-1], cuts[1:])] + [2.0 * cuts[-1] + 1.0]
    segs: list[Segment] = []
    for lo, hi, probe in zip(cuts, cuts[1:] + [math.inf], probes):
        lgr = classify(g, probe, t)
        if segs and segs[-1].lgr is lgr:
            segs[-1] = Segment(lgr, segs[-1].P_lo, hi)
        else:
            segs.append(Segment(lgr, lo, hi))
    return segs


def _label(lgrs: tuple[LgrId, ...], regime: RelayRegime) -> Optional[str]:
    if regime in (RelayRegime.R1, RelayRegime.RS1):
        lgrs = tuple(x.mirrored() for x in lgrs)
    names = _R2_LABELS if regime in (RelayRegime.R1, RelayRegime.R2) else _RS2_LABELS
    for name in names:
        if PATH_TABLE[name] == lgrs:
            return name
    return None


def lgr_path(g: MmWaveGains, P_max: Optional[float] = None) -> LgrPath:
    """Regime path of ``g``.

    Between consecutive positive thresholds the active regime is constant,
    so one classification per interval recovers the exact path.

    Parameters
    ----------
    g : MmWaveGains
    P_max : float, optional
        Truncate the path at this budget; the last segment then ends at
        ``P_max`` instead of infinity.
    """
    if g.gamma <= 1:
        segs = [Segment(LgrId.L1, 0.0, math.inf)]
        regime, label = None, None
    else:
        t = threshold_powers(g)
        segs = _segments(g, t)
        regime = regime_of(g)
        label = _label(tuple(s.lgr for s in segs), regime) if g.symmetric_direct else None
    if P_max is not None:
        segs = [s for s in segs if s.P_lo < P_max or s.P_lo == 0.0]
        last = segs[-1]
        segs[-1] = Segment(last.lgr, last.P_lo, max(min(last.P_hi, P_max), last.P_lo))
    return LgrPath(tuple(segs), label, regime)


def saturation_info(g: MmWaveGains) -> SaturationInfo:
    """Saturation and final-regime thresholds of ``g`` (requires ``gamma > 1``)."""
    if not g.gamma > 1:
        raise ValueError("saturation is defined for gamma > 1")
    t = threshold_powers(g)
    segs = _segments(g, t)
    first = next(s for s in segs if s.lgr.saturated)
    final = segs[-1]
    regime = regime_of(g)
    if regime is RelayRegime.RS1:
        final_lgr = LgrId.S_rdd
        P_fin = max(t.P_rd, t.P_rdd, t.Pbar_rdd)
    elif regime is RelayRegime.RS2:
        final_lgr = LgrId.S_drd
        P_fin = max(t.P_dr, t.P_drd, t.Pbar_drd)
    else:
        final_lgr = LgrId.S_rdrd
        P_fin = max(t.Pbar_rdd, t.Pbar_drd, t.Pbar_rdr, t.Pbar_rrd, t.P_rdrd)
    if final.lgr is not final_lgr:  # pragma: no cover - guarded by tests
        raise RuntimeError(f"path ends in {final.lgr}, expected {final_lgr}")
    # The closed-form maximum can undershoot when the final regime is also the
    # saturation regime and its lower bound comes from another row.
    P_fin = max(P_fin, final.P_lo)
    q_bar = (None, None)
    if final_lgr is LgrId.S_rdrd:
        q_bar = (
            math.sqrt(g.gamma / (g.r1 * g.r2)) - 1 / g.r1,
            math.sqrt(g.gamma / (g.r1 * g.r2)) - 1 / g.r2,
        )
    return SaturationInfo(first.P_lo, P_fin, first.lgr, final_lgr, *q_bar)
