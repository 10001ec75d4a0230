"""Run configuration documents (YAML or JSON) and seed resolution."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from .channel import DEFAULT_QMC_SAMPLES, BandConfig, DualBandConfig, FadingModel, Geometry

__all__ = ["ConfigError", "RunConfig", "load_config", "resolve_seed", "SEED_ENV"]

SEED_ENV = "MARC_SEED"

Link = Literal["1R", "2R", "1D", "2D", "RD"]
_MICROWAVE_POWERS = {"P1", "P2", "PR"}
_MMWAVE_POWERS = {"Phat1", "Phat2", "Pbar1", "Pbar2", "PbarR"}


class ConfigError(ValueError):
    """Configuration document failed to parse or validate."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BandModel(_Strict):
    pathloss_exp: PositiveFloat
    fading: FadingModel = FadingModel.PHASE
    powers: dict[str, NonNegativeFloat] = {}


class GeometryModel(_Strict):
    """Either explicit per-link ``distances`` or the mirrored layout
    ``(d_RD, d_SR, phi)``."""

    distances: Optional[dict[Link, PositiveFloat]] = None
    d_RD: Optional[PositiveFloat] = None
    d_SR: Optional[PositiveFloat] = None
    phi: Optional[float] = None

    @model_validator(mode="after")
    def _one_form(self):
        layout = (self.d_RD, self.d_SR, self.phi)
        if self.distances is not None:
            if any(v is not None for v in layout):
                raise ValueError("give either distances or d_RD/d_SR/phi, not both")
        elif any(v is None for v in layout):
            raise ValueError("symmetric layout needs d_RD, d_SR and phi")
        return self

    def build(self) -> Geometry:
        if self.distances is not None:
            return Geometry(dict(self.distances))
        return Geometry.symmetric(self.d_RD, self.d_SR, self.phi)


class RunConfig(_Strict):
    """Channel description plus run controls; unknown keys are rejected."""

    microwave: BandModel
    mmwave: BandModel
    alpha: NonNegativeFloat
    geometry: Optional[GeometryModel] = None
    gains: dict[Link, PositiveFloat] = {}
    gains_bar: dict[Link, PositiveFloat] = {}
    gamma: Optional[PositiveFloat] = None
    seed: Optional[NonNegativeInt] = None
    qmc_samples: PositiveInt = DEFAULT_QMC_SAMPLES
    tol: PositiveFloat = 1e-9
    output: Optional[Path] = None

    @model_validator(mode="after")
    def _power_names(self):
        for band, allowed in ((self.microwave, _MICROWAVE_POWERS), (self.mmwave, _MMWAVE_POWERS)):
            unknown = set(band.powers) - allowed
            if unknown:
                raise ValueError(f"unknown power names {sorted(unknown)}")
        return self

    def to_dual_band(self) -> DualBandConfig:
        def band(b: BandModel) -> BandConfig:
            return BandConfig(b.pathloss_exp, b.fading, dict(b.powers))

        return DualBandConfig(
            band(self.microwave),
            band(self.mmwave),
            self.alpha,
            self.geometry.build() if self.geometry is not None else None,
            dict(self.gains),
            dict(self.gains_bar),
            self.gamma,
        )


def load_config(source) -> RunConfig:
    """Parse and validate a config file (``.json``, ``.yaml``/``.yml``) or mapping."""
    if isinstance(source, dict):
        data = source
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        try:
            data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
        except (json.JSONDecodeError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_seed(flag: Optional[int], cfg: Optional[RunConfig] = None) -> int:
    """``--seed`` beats ``MARC_SEED``, which beats the config value; default 0."""
    if flag is not None:
        return int(flag)
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        try:
            seed = int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
        if seed < 0:
            raise ConfigError(f"{SEED_ENV} must be non-negative")
        return seed
    if cfg is not None and cfg.seed is not None:
        return cfg.seed
    return 0
