"""Value types shared by the allocator, the oracle and the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True)
class MmWaveGains:
    """mm-wave relay-link gains ``r1, r2``, direct-link gains ``d1, d2`` and
    the microwave imbalance ``gamma``."""

    r1: float
    r2: float
    d1: float
    d2: float
    gamma: float

    def __post_init__(self):
        for name in ("r1", "r2", "d1", "d2", "gamma"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and strictly positive, got {value!r}")

    def swapped(self) -> "MmWaveGains":
        return MmWaveGains(self.r2, self.r1, self.d2, self.d1, self.gamma)

    @property
    def symmetric_direct(self) -> bool:
        return abs(self.d1 - self.d2) <= 1e-12 * max(self.d1, self.d2)


@dataclass(frozen=True)
class Allocation:
    """Direct-link powers ``p1, p2`` and relay-link powers ``q1, q2``."""

    p1: float
    q1: float
    p2: float
    q2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.q1, self.p2, self.q2])

    def swapped(self) -> "Allocation":
        return Allocation(self.p2, self.q2, self.p1, self.q1)

    @classmethod
    def zero(cls) -> "Allocation":
        return cls(0.0, 0.0, 0.0, 0.0)


class LgrId(str, Enum):
    """Link-gain regimes. ``A_*`` follow water-filling, ``S_*`` are saturated.

    The suffix names the links used by source 1 then source 2: ``d`` direct
    only, ``r`` relay only, ``rd`` both; e.g. ``S_rrd`` means source 1 on its
    relay link and source 2 on both links.
    """

    L1 = "L1"
    A_dd = "A_dd"
    A_dr = "A_dr"
    A_rd = "A_rd"
    A_rr = "A_rr"
    A_rdd = "A_rdd"
    A_drd = "A_drd"
    A_rrd = "A_rrd"
    A_rdr = "A_rdr"
    A_rdrd = "A_rdrd"
    S_rrd = "S_rrd"
    S_rdr = "S_rdr"
    S_rdd = "S_rdd"
    S_drd = "S_drd"
    S_rdrd = "S_rdrd"

    @property
    def saturated(self) -> bool:
        return self.value.startswith("S_")

    def mirrored(self) -> "LgrId":
        """Regime obtained by exchanging the two sources."""
        return _MIRROR[self]


# Per-source link usage, used to mirror labels.
_USAGE = {
    LgrId.A_dd: ("d", "d"), LgrId.A_dr: ("d", "r"), LgrId.A_rd: ("r", "d"),
    LgrId.A_rr: ("r", "r"), LgrId.A_rdd: ("rd", "d"), LgrId.A_drd: ("d", "rd"),
    LgrId.A_rrd: ("r", "rd"), LgrId.A_rdr: ("rd", "r"), LgrId.A_rdrd: ("rd", "rd"),
    LgrId.S_rrd: ("r", "rd"), LgrId.S_rdr: ("rd", "r"), LgrId.S_rdd: ("rd", "d"),
    LgrId.S_drd: ("d", "rd"), LgrId.S_rdrd: ("rd", "rd"),
}
_MIRROR = {LgrId.L1: LgrId.L1}
for _lgr, (_u1, _u2) in _USAGE.items():
    _MIRROR[_lgr] = next(
        other for other, usage in _USAGE.items()
        if usage == (_u2, _u1) and other.saturated == _lgr.saturated
    )


class RelayRegime(str, Enum):
    RS1 = "RS1"
    R1 = "R1"
    R2 = "R2"
    RS2 = "RS2"
