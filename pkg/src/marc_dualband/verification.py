"""Randomised agreement suite: closed-form allocator against the numeric oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .allocator import ClassificationError, MmWaveGains, allocate
from .oracle import kkt_residuals, solve_p1_batch

__all__ = ["SuiteReport", "random_tuples", "run_agreement_suite", "strictly_complementary"]

GAIN_RANGE = (0.05, 20.0)
GAMMA_MAX = 30.0
BUDGET_MAX = 100.0


def random_tuples(rng: np.random.Generator, n: int) -> dict[str, np.ndarray]:
    """Gains log-uniform on ``GAIN_RANGE``, ``gamma`` uniform on ``(1, 30]``,
    budgets uniform on ``[0, 100]``."""
    lo, hi = np.log(GAIN_RANGE)
    gains = np.exp(rng.uniform(lo, hi, size=(4, n)))
    gamma = GAMMA_MAX - rng.uniform(0.0, GAMMA_MAX - 1.0, size=n)
    P = rng.uniform(0.0, BUDGET_MAX, size=n)
    return dict(r1=gains[0], r2=gains[1], d1=gains[2], d2=gains[3], gamma=gamma, P=P)


def strictly_complementary(report, alloc, gap: float, margin: float = 1e-6) -> bool:
    """Whether the KKT point is non-degenerate, so the optimiser is unique.

    Every power must be clearly positive or have a clearly positive sign
    multiplier, and when both sum rates bind the weight between them must
    lie strictly inside ``(0, 1)``.
    """
    x = alloc.as_array()
    rho = (report.rho1, report.rho2, report.rho3, report.rho4)
    if any(xi <= margin and r <= margin for xi, r in zip(x, rho)):
        return False
    if abs(gap) <= 1e-9 and not margin < report.lambda1 < 1 - margin:
        return False
    return True


@dataclass(frozen=True)
class SuiteReport:
    trials: int
    seed: int
    max_rate_gap: float
    max_component_gap: float
    strict_tuples: int
    unclassified: int
    max_kkt_residual: float
    oracle_failures: int
    rate_tol: float
    component_tol: float
    kkt_tol: float

    @property
    def ties(self) -> int:
        return self.trials - self.unclassified - self.strict_tuples

    @property
    def passed(self) -> bool:
        return (
            self.unclassified == 0
            and self.oracle_failures == 0
            and self.max_rate_gap <= self.rate_tol
            and self.max_component_gap <= self.component_tol
            and self.max_kkt_residual <= self.kkt_tol
        )

    def lines(self) -> list[str]:
        def ok(v, tol):
            return "ok" if v <= tol else "FAIL"

        return [
            f"trials: {self.trials} (seed {self.seed})",
            f"max rate gap: {self.max_rate_gap:.3e} <= {self.rate_tol:g}: "
            f"{ok(self.max_rate_gap, self.rate_tol)}",
            f"max component gap over {self.strict_tuples} strictly complementary tuples: "
            f"{self.max_component_gap:.3e} <= {self.component_tol:g}: "
            f"{ok(self.max_component_gap, self.component_tol)}",
            f"ties (component check skipped): {self.ties}",
            f"unclassified: {self.unclassified}",
            f"oracle non-convergence: {self.oracle_failures}",
            f"max kkt residual: {self.max_kkt_residual:.3e} <= {self.kkt_tol:g}: "
            f"{ok(self.max_kkt_residual, self.kkt_tol)}",
            "PASS" if self.passed else "FAIL",
        ]


def run_agreement_suite(
    trials: int,
    seed: int = 0,
    *,
    rate_tol: float = 1e-5,
    component_tol: float = 1e-3,
    kkt_tol: float = 1e-6,
) -> SuiteReport:
    """Compare :func:`allocate` with the oracle on ``trials`` random tuples.

    Tuples are processed in generation order, so the report depends only on
    ``trials`` and ``seed``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    t = random_tuples(np.random.default_rng(seed), trials)
    q1o, q2o, rate_o, conv, _ = solve_p1_batch(t["r1"], t["r2"], t["d1"], t["d2"], t["gamma"], t["P"])
    max_rate = max_comp = max_kkt = 0.0
    strict = unclassified = 0
    for i in range(trials):
        g = MmWaveGains(t["r1"][i], t["r2"][i], t["d1"][i], t["d2"][i], t["gamma"][i])
        P = float(t["P"][i])
        try:
            alloc, _ = allocate(g, P)
        except ClassificationError:
            unclassified += 1
            continue
        relay = math.log2((1 + g.r1 * alloc.q1) * (1 + g.r2 * alloc.q2))
        direct = math.log2((1 + g.d1 * alloc.p1) * (1 + g.d2 * alloc.p2))
        rate = min(relay, math.log2(g.gamma)) + direct
        max_rate = max(max_rate, abs(rate - rate_o[i]))
        report = kkt_residuals(g, P, alloc)
        max_kkt = max(max_kkt, report.max_residual)
        if strictly_complementary(report, alloc, relay - math.log2(g.gamma)):
            strict += 1
            oracle = np.array([P - q1o[i], q1o[i], P - q2o[i], q2o[i]])
            max_comp = max(max_comp, float(np.max(np.abs(alloc.as_array() - oracle))))
    return SuiteReport(
        trials, seed, max_rate, max_comp, strict, unclassified, max_kkt,
        int(np.count_nonzero(~conv)), rate_tol, component_tol, kkt_tol,
    )
