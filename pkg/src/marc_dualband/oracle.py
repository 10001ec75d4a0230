"""Numeric reference solvers and a KKT residual checker.

These deliberately share no code with the closed-form allocator beyond
the value types, so that agreement between the two is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .allocator.model import Allocation, MmWaveGains
from .channel import DualBandConfig, FadingModel

__all__ = [
    "OracleResult",
    "KktReport",
    "solve_p1",
    "solve_p1_batch",
    "solve_p2",
    "solve_p2_batch",
    "project_simplex",
    "P2_VARIABLES",
    "kkt_residuals",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleResult:
    """Numeric optimum of the mm-wave allocation problem.

    For the mm-wave-only problem ``rate`` is in bits per use with the
    microwave part normalised (``sigma_R = 0``, ``sigma_D = log2 gamma``,
    ``alpha = 1``). For the joint problem ``rate`` is the true sum rate and
    ``microwave`` holds ``P1``, ``P2``, ``PR`` and ``PbarR``.
    """

    allocation: Allocation
    rate: float
    iterations: int
    converged: bool
    microwave: Optional[dict] = None


def _normalised_rates(r1, r2, d1, d2, gamma, q1, q2, P):
    p1, p2 = P - q1, P - q2
    direct = np.log2(1 + d1 * p1) + np.log2(1 + d2 * p2)
    relay = np.log2(1 + r1 * q1) + np.log2(1 + r2 * q2)
    return relay + direct, np.log2(gamma) + direct


def _rate(r1, r2, d1, d2, gamma, q1, q2, P):
    s_r, s_d = _normalised_rates(r1, r2, d1, d2, gamma, q1, q2, P)
    return np.minimum(s_r, s_d)


def _golden_max(f, lo, hi, iters):
    # Vectorised golden-section search; f maps an array of abscissae to
    # objective values. Endpoints are compared at the end so boundary
    # optima are returned exactly.
    a, b = lo.copy(), hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        probe = np.where(left, c_next, d_next)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_next, d_next
    mid = 0.5 * (a + b)
    cands = np.stack([mid, lo, hi])
    vals = np.stack([f(x) for x in cands])
    best = np.argmax(vals, axis=0)
    idx = np.arange(lo.size)
    return cands[best, idx], vals[best, idx], b - a


def solve_p1_batch(r1, r2, d1, d2, gamma, P, tol: float = 1e-10):
    """Vectorised :func:`solve_p1` over equal-length arrays.

    Returns
    -------
    q1, q2, rate : ndarray
        Maximisers and the normalised optimal rate.
    converged : ndarray of bool
    iterations : int
        Golden-section steps per search level.
    """
    arrs = [np.atleast_1d(np.asarray(x, dtype=float)) for x in (r1, r2, d1, d2, gamma, P)]
    r1, r2, d1, d2, gamma, P = np.broadcast_arrays(*arrs)
    pmax = float(np.max(P)) if P.size else 0.0
    iters = max(1, int(math.ceil(math.log(max(pmax, tol) / tol) / -math.log(_INVPHI))))
    zero = np.zeros_like(P)

    def inner(q1):
        q2, val, width = _golden_max(
            lambda q2: _rate(r1, r2, d1, d2, gamma, q1, q2, P), zero, P, iters
        )
        return q2, val, width

    q1, _, w1 = _golden_max(lambda q1: inner(q1)[1], zero, P, iters)
    q2, rate, w2 = inner(q1)
    converged = (w1 <= 2 * tol) & (w2 <= 2 * tol)
    return q1, q2, rate, converged, iters


def solve_p1(g: MmWaveGains, P: float, tol: float = 1e-10) -> OracleResult:
    """Maximise the normalised sum rate over ``(q1, q2) in [0, P]^2``.

    The budget constraint is tight at the optimum because both sum rates
    increase with the direct-link powers, so ``p_k = P - q_k`` and the
    problem reduces to a concave program in two variables, solved by
    nested golden-section search (outer over ``q1``, inner over ``q2``).
    """
    if P < 0:
        raise ValueError("budget must be non-negative")
    if not tol > 0:
        raise ValueError("tol must be positive")
    q1, q2, rate, conv, iters = solve_p1_batch(g.r1, g.r2, g.d1, g.d2, g.gamma, P, tol)
    q1, q2 = float(q1[0]), float(q2[0])
    return OracleResult(Allocation(P - q1, q1, P - q2, q2), float(rate[0]), iters, bool(conv[0]))


# -- joint microwave and mm-wave budget ----------------------------------------

#: Order of the decision variables of the joint problem.
P2_VARIABLES = ("p1", "q1", "p2", "q2", "PbarR", "P1", "P2", "PR")


def project_simplex(v: np.ndarray, total: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto ``{x >= 0, sum x = total}``."""
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - total[:, None]
    k = np.arange(1, n + 1)
    active = u - css / k > 0
    last = n - 1 - np.argmax(active[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), last] / (last + 1)
    return np.maximum(v - theta[:, None], 0.0)


@dataclass(frozen=True)
class _P2Gains:
    G1R: float
    G2R: float
    G1D: float
    G2D: float
    GRD: float
    r1: float
    r2: float
    d1: float
    d2: float
    GbRD: float
    alpha: float

    @classmethod
    def from_config(cls, cfg: DualBandConfig) -> "_P2Gains":
        if cfg.microwave.fading is not FadingModel.PHASE or cfg.mmwave.fading is not FadingModel.PHASE:
            raise ValueError("the joint problem is solved for phase fading only")
        g, gb = cfg.gain, cfg.gain_bar
        return cls(
            g("1R"), g("2R"), g("1D"), g("2D"), g("RD"),
            gb("1R"), gb("2R"), gb("1D"), gb("2D"), gb("RD"), cfg.alpha,
        )

    def rates(self, x):
        # Sum rates in nats.
        p1, q1, p2, q2, Pb, P1, P2, PR = x.T
        a = self.alpha
        direct = np.log1p(self.d1 * p1) + np.log1p(self.d2 * p2)
        s_r = np.log1p(self.G1R * P1 + self.G2R * P2) + a * (
            np.log1p(self.r1 * q1) + np.log1p(self.r2 * q2) + direct
        )
        s_d = (
            np.log1p(self.G1D * P1 + self.G2D * P2 + self.GRD * PR)
            + a * np.log1p(self.GbRD * Pb)
            + a * direct
        )
        return s_r, s_d

    def gradients(self, x):
        p1, q1, p2, q2, Pb, P1, P2, PR = x.T
        a = self.alpha
        z = np.zeros_like(p1)
        gd1 = a * self.d1 / (1 + self.d1 * p1)
        gd2 = a * self.d2 / (1 + self.d2 * p2)
        inv_r = 1 / (1 + self.G1R * P1 + self.G2R * P2)
        inv_d = 1 / (1 + self.G1D * P1 + self.G2D * P2 + self.GRD * PR)
        g_r = np.stack(
            [gd1, a * self.r1 / (1 + self.r1 * q1), gd2, a * self.r2 / (1 + self.r2 * q2),
             z, self.G1R * inv_r, self.G2R * inv_r, z], axis=1,
        )
        g_d = np.stack(
            [gd1, z, gd2, z, a * self.GbRD / (1 + self.GbRD * Pb),
             self.G1D * inv_d, self.G2D * inv_d, self.GRD * inv_d], axis=1,
        )
        return g_r, g_d


def solve_p2_batch(
    cfg: DualBandConfig,
    budgets,
    *,
    iterations: int = 100_000,
    step: float = 0.01,
    tol: float = 1e-6,
    init: Optional[np.ndarray] = None,
):
    """Vectorised :func:`solve_p2` over an array of budgets.

    Returns
    -------
    x : ndarray, shape (n, 8)
        Best iterate per budget, columns ordered as :data:`P2_VARIABLES`.
    rate : ndarray
        Sum rate in bits per use at ``x``.
    converged : ndarray of bool
    """
    gains = _P2Gains.from_config(cfg)
    P = np.atleast_1d(np.asarray(budgets, dtype=float))
    if np.any(P < 0):
        raise ValueError("budgets must be non-negative")
    if init is None:
        x = np.zeros((P.size, 8))
        x[:, 0] = x[:, 2] = 0.5 * P
    else:
        x = project_simplex(np.broadcast_to(np.asarray(init, float), (P.size, 8)).copy(), P)
    best = x.copy()
    best_val = np.full(P.size, -np.inf)
    checkpoint = best_val.copy()
    tail = max(1, iterations // 10)
    for t in range(1, iterations + 1):
        s_r, s_d = gains.rates(x)
        val = np.minimum(s_r, s_d)
        better = val > best_val
        best[better], best_val[better] = x[better], val[better]
        if t == iterations - tail:
            checkpoint = best_val.copy()
        g_r, g_d = gains.gradients(x)
        diff = (s_r - s_d)[:, None]
        g = np.where(diff < -1e-10, g_r, np.where(diff > 1e-10, g_d, 0.5 * (g_r + g_d)))
        norm = np.linalg.norm(g, axis=1, keepdims=True)
        norm[norm == 0] = 1.0
        x = project_simplex(x + (step * P / math.sqrt(t))[:, None] * g / norm, P)
    rate = best_val / math.log(2)
    gain = (best_val - checkpoint) / math.log(2)
    converged = (P == 0) | (gain <= tol * np.maximum(1.0, rate))
    return best, rate, converged


def solve_p2(
    cfg: DualBandConfig,
    P: float,
    tol: float = 1e-6,
    *,
    iterations: int = 100_000,
    step: float = 0.01,
) -> OracleResult:
    """Maximise the sum rate when one budget ``P`` covers every link.

    Projected supergradient ascent on ``min(Sigma_R, Sigma_D)`` over the
    simplex of the eight link powers, with step ``step * P / sqrt(t)``
    along the normalised supergradient. The supergradient is that of the
    smaller sum rate, or the average of both when they agree to 1e-10.
    Iterates start from the direct-only split and stay symmetric for
    symmetric gains. The best iterate is returned; ``converged`` means the
    best value improved by less than ``tol`` (relative) over the final 10%
    of iterations.
    """
    x, rate, conv = solve_p2_batch(cfg, [P], iterations=iterations, step=step, tol=tol)
    v = dict(zip(P2_VARIABLES, map(float, x[0])))
    alloc = Allocation(v["p1"], v["q1"], v["p2"], v["q2"])
    mw = {k: v[k] for k in ("P1", "P2", "PR", "PbarR")}
    return OracleResult(alloc, float(rate[0]), iterations, bool(conv[0]), mw)


# -- KKT residuals ---------------------------------------------------------------


@dataclass(frozen=True)
class KktReport:
    """Recovered multipliers and KKT violations of an allocation.

    Multipliers are on the natural-log scale with the common bandwidth
    factor dropped; ``lambda1`` weights the relay sum-rate constraint.
    """

    lambda1: float
    lambda2: float
    mu1: float
    mu2: float
    rho1: float
    rho2: float
    rho3: float
    rho4: float
    stationarity_residual: float
    complementarity_residual: float
    feasibility_residual: float

    @property
    def max_residual(self) -> float:
        return max(
            self.stationarity_residual, self.complementarity_residual, self.feasibility_residual
        )


def _kkt_terms(lam, a, b, x):
    # Returns (mu1, mu2, rho1..rho4, complementarity) for a given lambda1.
    mu = np.maximum(a, lam * b)
    rho = np.array([mu[0] - a[0], mu[0] - lam * b[0], mu[1] - a[1], mu[1] - lam * b[1]])
    comp = float(np.max(np.abs(rho * x)))
    return mu, rho, comp


def kkt_residuals(
    g: MmWaveGains, P: float, alloc: Allocation, *, active_tol: float = 1e-9
) -> KktReport:
    """KKT violations of ``alloc`` for the mm-wave allocation problem.

    The sum-rate multipliers follow from which sum rate binds: only the
    relay one (``lambda1 = 1``), only the destination one
    (``lambda1 = 0``), or both, in which case ``lambda1`` is chosen to
    minimise the complementary-slackness violation. The budget
    multipliers ``mu_k`` are the larger of the two marginal gains of
    source ``k``, which makes the sign multipliers ``rho`` non-negative by
    construction.
    """
    x = np.array([alloc.p1, alloc.q1, alloc.p2, alloc.q2])
    feas = max(abs(alloc.p1 + alloc.q1 - P), abs(alloc.p2 + alloc.q2 - P), float(np.max(-x, initial=0.0)))
    xp = np.maximum(x, 0.0)
    a = np.array([g.d1 / (1 + g.d1 * xp[0]), g.d2 / (1 + g.d2 * xp[2])])
    b = np.array([g.r1 / (1 + g.r1 * xp[1]), g.r2 / (1 + g.r2 * xp[3])])
    gap = math.log2((1 + g.r1 * xp[1]) * (1 + g.r2 * xp[3])) - math.log2(g.gamma)  # Sigma_R - Sigma_D
    if gap < -active_tol:
        lam = 1.0
    elif gap > active_tol:
        lam = 0.0
    else:
        f = lambda l: _kkt_terms(l, a, b, x)[2]
        cands = [0.0, 1.0] + [float(np.clip(a[k] / b[k], 0.0, 1.0)) for k in (0, 1)]
        lam = min(cands, key=f)
        if f(lam) > 0.0:
            res = minimize_scalar(f, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-13})
            lam = min((lam, float(res.x)), key=f)
    mu, rho, comp = _kkt_terms(lam, a, b, x)
    # Slackness of the sum-rate constraints at R = min(Sigma_R, Sigma_D).
    slack = lam * max(gap, 0.0) + (1 - lam) * max(-gap, 0.0)
    return KktReport(
        lambda1=lam,
        lambda2=1.0 - lam,
        mu1=float(mu[0]),
        mu2=float(mu[1]),
        rho1=float(rho[0]),
        rho2=float(rho[1]),
        rho3=float(rho[2]),
        rho4=float(rho[3]),
        stationarity_residual=0.0,
        complementarity_residual=max(comp, slack),
        feasibility_residual=feas,
    )
