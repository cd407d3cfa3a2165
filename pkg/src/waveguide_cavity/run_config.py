"""
Run configuration: one YAML/JSON document per run, overridden by CLI flags.

Cavity parameters can be given directly (``n_atoms`` + ``delay_tau``), as
physical inputs (``gamma_hz``, ``d_m``, ``vg_over_c``) or as a ``preset``
label with an optional ``n_atoms``.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from .constants import DEFAULT_POINTS, DEFAULT_POLE_COUNT
from .errors import ConfigurationError
from .laplace_series import PRECISIONS
from .model import CavityParams, preset
from .utils.seeding import resolve_seed

logger = logging.getLogger(__name__)

METHODS = ("auto", "dde", "series", "spectral", "main", "approx", "detuned", "markov")
FORMATS = ("csv", "json")


def _load_yaml_config(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}")
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Cannot parse config file: {path}", reason=str(e)) from e
    if not isinstance(data, dict):
        raise ConfigurationError("Config document must be a mapping", path=str(path))
    return data


@dataclass(frozen=True)
class RunConfig:
    """
    Everything needed to reproduce one run.

    ``seed`` is resolved from ``WAVEGUIDE_CAVITY_SEED`` when left unset.
    """

    n_atoms: int | None = None
    delay_tau: float | None = None
    phase_offset: float = 0.0
    env_rate: float | None = None
    preset: str | None = None
    gamma_ratio: float | None = None
    gamma_hz: float | None = None
    d_m: float | None = None
    vg_over_c: float | None = None
    method: str = "auto"
    t_max: float = 3.0
    n_points: int = DEFAULT_POINTS
    dt: float | None = None
    precision: str = "auto"
    pole_count: int = DEFAULT_POLE_COUNT
    seed: int | None = None
    reproducible: bool = False
    out: str | None = None
    fmt: str = "csv"
    svg: str | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigurationError(f"Unknown method: {self.method}", known=list(METHODS))
        if self.fmt not in FORMATS:
            raise ConfigurationError(f"Unknown format: {self.fmt}", known=list(FORMATS))
        if self.precision not in PRECISIONS:
            raise ConfigurationError(f"Unknown precision: {self.precision}", known=list(PRECISIONS))
        if self.t_max <= 0:
            raise ConfigurationError("t_max must be > 0", t_max=self.t_max)
        if self.n_points < 2:
            raise ConfigurationError("n_points must be >= 2", n_points=self.n_points)
        if self.pole_count < 2:
            raise ConfigurationError("pole_count must be >= 2", pole_count=self.pole_count)
        object.__setattr__(self, "seed", resolve_seed(self.seed))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> RunConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError("Unknown config keys", keys=unknown)
        try:
            return cls(**dict(data))
        except TypeError as e:
            raise ConfigurationError("Malformed config document", reason=str(e)) from e

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        return cls.from_mapping(_load_yaml_config(Path(path)))

    def merged(self, **overrides: Any) -> RunConfig:
        """Copy with every non-None override applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if not changes:
            return self
        return RunConfig.from_mapping({**self.to_dict(), **changes})

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def params(self) -> CavityParams:
        """Build the cavity parameters from whichever input style the document used."""
        if self.preset is not None:
            _, params = preset(self.preset, n_atoms=self.n_atoms, gamma_ratio=self.gamma_ratio)
            changes: dict[str, Any] = {"phase_offset": self.phase_offset}
            if self.env_rate is not None:
                changes["env_rate"] = self.env_rate
            if self.delay_tau is not None:
                changes["delay_tau"] = self.delay_tau
            return params.replace(**changes)
        if self.n_atoms is None:
            raise ConfigurationError("n_atoms is required unless a preset is given")
        env = 0.0 if self.env_rate is None else self.env_rate
        physical = (self.gamma_hz, self.d_m, self.vg_over_c)
        if any(v is not None for v in physical):
            if self.delay_tau is not None:
                raise ConfigurationError("give delay_tau or (gamma_hz, d_m, vg_over_c), not both")
            if any(v is None for v in physical):
                raise ConfigurationError("gamma_hz, d_m and vg_over_c must be given together")
            return CavityParams.from_physical(
                self.gamma_hz, self.d_m, self.vg_over_c, self.n_atoms, self.phase_offset, env
            )
        if self.delay_tau is None:
            raise ConfigurationError("delay_tau is required")
        return CavityParams(self.n_atoms, self.delay_tau, self.phase_offset, env)


def load_run_config(path: str | Path | None = None, **overrides: Any) -> RunConfig:
    base = RunConfig.from_file(path) if path is not None else None
    if base is None:
        changes = {k: v for k, v in overrides.items() if v is not None}
        return RunConfig.from_mapping(changes)
    return base.merged(**overrides)


__all__ = ["RunConfig", "METHODS", "FORMATS", "load_run_config"]
