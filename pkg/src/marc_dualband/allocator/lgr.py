"""Regime classification and closed-form optimal allocation."""

from __future__ import annotations

import math

from .model import Allocation, LgrId, MmWaveGains, RelayRegime
from .thresholds import ThresholdPowers, regime_of, threshold_powers

__all__ = ["ClassificationError", "classify", "allocate", "closed_form", "CLASSIFY_ORDER"]

#: Order in which regime conditions are tested; the first match wins.
CLASSIFY_ORDER = (
    LgrId.A_dd, LgrId.A_dr, LgrId.A_rd, LgrId.A_rr,
    LgrId.A_rdd, LgrId.A_drd, LgrId.A_rrd, LgrId.A_rdr, LgrId.A_rdrd,
    LgrId.S_rrd, LgrId.S_rdr, LgrId.S_rdd, LgrId.S_drd, LgrId.S_rdrd,
)

_CLAMP = 1e-12


class ClassificationError(RuntimeError):
    """No regime condition matched; indicates an internal inconsistency."""


def _bounds(t: ThresholdPowers, regime: RelayRegime) -> dict[LgrId, tuple[tuple, tuple]]:
    # (lower thresholds, upper thresholds) per regime; empty lower means 0.
    dd, ddp, ddh, ddhp = t.P_dd, t.P_dd_prime, t.P_dd_hat, t.P_dd_hat_prime
    inf = math.inf
    b = {
        LgrId.A_dd: ((), (dd, ddh)),
        LgrId.A_dr: ((), (ddhp, dd, t.P_dr)),
        LgrId.A_rd: ((), (ddp, ddh, t.P_rd)),
        LgrId.A_rr: ((), (ddp, ddhp, t.P_rr)),
        LgrId.A_rdd: ((dd, ddp), (ddh, t.P_rdd)),
        LgrId.A_drd: ((ddh, ddhp), (dd, t.P_drd)),
        LgrId.A_rrd: ((ddh, ddhp), (ddp, t.P_rrd)),
        LgrId.A_rdr: ((dd, ddp), (ddhp, t.P_rdr)),
        LgrId.A_rdrd: ((dd, ddh, ddp, ddhp), (t.P_rdrd,)),
        LgrId.S_rrd: ((t.P_rr, t.P_rrd), (t.Pbar_rrd, t.P_rd)),
        LgrId.S_rdr: ((t.P_rr, t.P_rdr), (t.Pbar_rdr, t.P_dr)),
    }
    if regime is RelayRegime.RS1:
        b[LgrId.S_rdd] = ((t.P_rd, t.P_rdd, t.Pbar_rdd), (inf,))
    else:
        b[LgrId.S_rdd] = ((t.P_rd, t.P_rdd), (t.Pbar_rdd,))
    if regime is RelayRegime.RS2:
        b[LgrId.S_drd] = ((t.P_dr, t.P_drd, t.Pbar_drd), (inf,))
    else:
        b[LgrId.S_drd] = ((t.P_dr, t.P_drd), (t.Pbar_drd,))
    bars = (t.Pbar_rdd, t.Pbar_drd, t.Pbar_rdr, t.Pbar_rrd, t.P_rdrd)
    if regime is RelayRegime.RS1:
        b[LgrId.S_rdrd] = (bars[1:], (t.Pbar_rdd,))
    elif regime is RelayRegime.RS2:
        b[LgrId.S_rdrd] = (bars[:1] + bars[2:], (t.Pbar_drd,))
    else:
        b[LgrId.S_rdrd] = (bars, (inf,))
    return b


def classify(
    g: MmWaveGains,
    P: float,
    thresholds: ThresholdPowers | None = None,
    *,
    eps: float | None = None,
) -> LgrId:
    """Regime containing budget ``P``.

    Conditions are tested with non-strict comparisons in
    :data:`CLASSIFY_ORDER`; at a shared boundary the earlier regime wins.
    Only if no condition holds exactly are they retried with tolerance
    ``eps`` (default ``1e-9 * max(1, P)``). Adjacent closed forms agree on
    boundaries, so the choice only affects the label.
    """
    if P < 0:
        raise ValueError("budget must be non-negative")
    if g.gamma <= 1:
        return LgrId.L1
    t = thresholds if thresholds is not None else threshold_powers(g)
    if eps is None:
        eps = 1e-9 * max(1.0, P)
    bounds = _bounds(t, regime_of(g))
    # Exact comparisons first, so the tolerance only absorbs rounding gaps
    # between adjacent regimes and never moves an interior budget.
    for tol in (0.0, eps):
        for lgr in CLASSIFY_ORDER:
            lower, upper = bounds[lgr]
            lo = max(lower, default=-math.inf)
            if lo - tol <= P <= min(upper) + tol:
                return lgr
    raise ClassificationError(f"no regime matched {g} at P={P!r}")


def _half(P: float, r: float, d: float) -> tuple[float, float]:
    # Equalises d/(1+dp) and r/(1+rq) subject to p + q = P.
    return 0.5 * (P + 1 / r - 1 / d), 0.5 * (P - 1 / r + 1 / d)


def closed_form(g: MmWaveGains, P: float, lgr: LgrId) -> Allocation:
    """Allocation formula of regime ``lgr`` evaluated at budget ``P``.

    The result is clamped and renormalised so that ``p_k + q_k = P``.
    """
    r1, r2, d1, d2, gam = g.r1, g.r2, g.d1, g.d2, g.gamma
    if lgr in (LgrId.L1, LgrId.A_dd):
        q1 = q2 = 0.0
    elif lgr is LgrId.A_dr:
        q1, q2 = 0.0, P
    elif lgr is LgrId.A_rd:
        q1, q2 = P, 0.0
    elif lgr is LgrId.A_rr:
        q1 = q2 = P
    elif lgr is LgrId.A_rdd:
        q1, q2 = _half(P, r1, d1)[1], 0.0
    elif lgr is LgrId.A_drd:
        q1, q2 = 0.0, _half(P, r2, d2)[1]
    elif lgr is LgrId.A_rrd:
        q1, q2 = P, _half(P, r2, d2)[1]
    elif lgr is LgrId.A_rdr:
        q1, q2 = _half(P, r1, d1)[1], P
    elif lgr is LgrId.A_rdrd:
        q1, q2 = _half(P, r1, d1)[1], _half(P, r2, d2)[1]
    elif lgr is LgrId.S_rrd:
        q1, q2 = P, (gam / (1 + P * r1) - 1) / r2
    elif lgr is LgrId.S_rdr:
        q1, q2 = (gam / (1 + P * r2) - 1) / r1, P
    elif lgr is LgrId.S_rdd:
        q1, q2 = (gam - 1) / r1, 0.0
    elif lgr is LgrId.S_drd:
        q1, q2 = 0.0, (gam - 1) / r2
    elif lgr is LgrId.S_rdrd:
        w1 = P * r1 + r1 / d1 + 1
        w2 = P * r2 + r2 / d2 + 1
        q1 = (math.sqrt(gam * w1 / w2) - 1) / r1
        q2 = (math.sqrt(gam * w2 / w1) - 1) / r2
    else:  # pragma: no cover
        raise ValueError(lgr)
    return _finalise(P, q1, q2)


def _finalise(P: float, q1: float, q2: float) -> Allocation:
    def clip(q):
        if -_CLAMP <= q < 0:
            return 0.0
        if P < q <= P + _CLAMP:
            return P
        return q

    q1, q2 = clip(q1), clip(q2)
    return Allocation(P - q1, q1, P - q2, q2)


def allocate(
    g: MmWaveGains, P: float, thresholds: ThresholdPowers | None = None
) -> tuple[Allocation, LgrId]:
    """Sum-rate optimal mm-wave allocation at budget ``P``.

    Parameters
    ----------
    g : MmWaveGains
        Link gains and microwave imbalance.
    P : float
        Per-source budget, ``p_k + q_k = P``.
    thresholds : ThresholdPowers, optional
        Precomputed thresholds of ``g``, reused across budgets.

    Returns
    -------
    allocation : Allocation
    lgr : LgrId
        Regime that produced the allocation.

    Raises
    ------
    ClassificationError
        If no regime condition holds.
    """
    lgr = classify(g, P, thresholds)
    return closed_form(g, P, lgr), lgr
