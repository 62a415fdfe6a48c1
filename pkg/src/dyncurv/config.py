"""Experiment configuration: one JSON file, dotted-key overrides."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

PRESET_NAMES = ["clumping", "dispersal", "streaming", "milling", "drift"]


@dataclass
class GridConfig:
    time_stride: int = 5        # recorded frames per Dyn time step
    T: int = 20
    S: int = 20
    delta_weight: Union[float, str] = "auto"   # "auto": delta_max lands on the top scale
    delta_max: Optional[float] = None          # None: torus diameter


@dataclass
class ExperimentConfig:
    presets: List[str] = field(default_factory=lambda: list(PRESET_NAMES))
    flocks_per_preset: int = 3
    n_boids: int = 40
    torus_size: float = 100.0
    dt: float = 1.0
    steps: int = 200
    record_every: int = 2
    k_list: List[int] = field(default_factory=lambda: [0, 1])
    subsets_per_flock: int = 300
    kcenter_target: int = 60
    grid: GridConfig = field(default_factory=GridConfig)
    master_seed: int = 20240607
    trials: int = 10_000
    output_dir: str = "out/desk"
    thread_count: int = 1

    def validate(self) -> "ExperimentConfig":
        unknown = [p for p in self.presets if p not in PRESET_NAMES]
        if unknown:
            raise ValueError(f"unknown presets {unknown}; choose from {PRESET_NAMES}")
        for name in ("flocks_per_preset", "n_boids", "steps", "record_every", "subsets_per_flock",
                     "kcenter_target", "trials", "thread_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.k_list:
            raise ValueError("k_list must be nonempty")
        if any(k < 0 for k in self.k_list):
            raise ValueError("degrees must be nonnegative")
        if self.kcenter_target > self.subsets_per_flock:
            raise ValueError("kcenter_target cannot exceed subsets_per_flock")
        g = self.grid
        if g.time_stride < 1 or g.T < 1 or g.S < 1:
            raise ValueError("grid sizes must be positive")
        frames = self.steps // self.record_every + 1
        if (g.T - 1) * g.time_stride >= frames:
            raise ValueError(f"T={g.T} at stride {g.time_stride} needs more than the {frames} recorded frames")
        if g.delta_max is not None and not g.delta_max > 0:
            raise ValueError("delta_max must be positive")
        if g.delta_weight != "auto" and not float(g.delta_weight) > 0:
            raise ValueError("delta_weight must be positive or 'auto'")
        for k in self.k_list:
            if 2 * k + 2 > self.n_boids:
                raise ValueError(f"degree {k} needs at least {2 * k + 2} boids")
        return self

    @property
    def time_step(self) -> float:
        """Dyn grid spacing h in simulation time units."""
        return self.dt * self.record_every * self.grid.time_stride

    def resolved_delta_weight(self) -> float:
        if self.grid.delta_weight == "auto":
            top = self.grid.delta_max
            if top is None:
                top = self.torus_size * math.sqrt(2) / 2
            return (self.grid.S - 1) * self.time_step / top
        return float(self.grid.delta_weight)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _build(cls, data: Dict[str, Any]):
    known = {f.name: f for f in fields(cls)}
    extra = set(data) - set(known)
    if extra:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(extra)}")
    kw = {}
    for name, value in data.items():
        default = known[name].default_factory() if callable(known[name].default_factory) else None
        if is_dataclass(default) and isinstance(value, dict):
            value = _build(type(default), value)
        kw[name] = value
    return cls(**kw)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    """Apply ``key=value`` or ``grid.key=value`` overrides; values parsed as JSON when possible."""
    for item in overrides or []:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        node = data
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = _parse_value(value)
    return data


def load_config(path=None, overrides: List[str] = ()) -> ExperimentConfig:
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config not found: {path}")
        data = json.loads(path.read_text())
    data = apply_overrides(data, list(overrides))
    return _build(ExperimentConfig, data).validate()
