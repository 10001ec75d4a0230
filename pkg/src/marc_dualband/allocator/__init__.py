"""Closed-form optimal mm-wave power allocation."""

from .lgr import CLASSIFY_ORDER, ClassificationError, allocate, classify, closed_form
from .model import Allocation, LgrId, MmWaveGains, RelayRegime
from .roots import NoRootError, positive_root, positive_roots
from .thresholds import ThresholdPowers, regime_of, relay_regime, threshold_powers

__all__ = [
    "Allocation", "LgrId", "MmWaveGains", "RelayRegime", "ThresholdPowers",
    "NoRootError", "ClassificationError", "CLASSIFY_ORDER",
    "positive_root", "positive_roots", "threshold_powers", "relay_regime", "regime_of",
    "classify", "allocate", "closed_form",
]

from .paths import PATH_TABLE, LgrPath, SaturationInfo, Segment, lgr_path, saturation_info
from .symmetric import TopologyGrid, sweep_2d_topology, symmetric_allocate, symmetric_lgr

__all__ += [
    "PATH_TABLE", "LgrPath", "SaturationInfo", "Segment", "lgr_path", "saturation_info",
    "TopologyGrid", "sweep_2d_topology", "symmetric_allocate", "symmetric_lgr",
]
