"""Seeded boids on the flat torus [0, L)^2.

Each step, boid i sees neighbors j with 0 < |d_ij| < neighbor_radius, where
d_ij is the shortest toroidal displacement from i to j, and accelerates by

    cohesion    w_c * mean_j d_ij
    separation  w_s * sum_{|d_ij| < separation_radius} -d_ij / |d_ij|^2
    alignment   w_a * (mean_j v_j - v_i)

then v <- clamp(v + dt * a, max_speed) and x <- (x + dt * v) mod L.
Initial positions are uniform on the torus and initial velocities have a
uniform heading and a speed uniform in [max_speed / 2, max_speed], all drawn
from SplitMix64 in the order x, y, heading, speed per boid.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import List, Tuple

import numpy as np

from .dms import DynamicMetricSpace, TimeGrid
from .rng import SplitMix64


@dataclass(frozen=True)
class BoidsParams:
    n_boids: int = 40
    torus_size: float = 100.0
    neighbor_radius: float = 20.0
    cohesion_weight: float = 0.0
    separation_weight: float = 0.0
    separation_radius: float = 5.0
    alignment_weight: float = 0.0
    max_speed: float = 2.0
    dt: float = 1.0
    steps: int = 200
    record_every: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_boids < 1:
            raise ValueError("n_boids must be positive")
        if not self.torus_size > 0:
            raise ValueError("torus_size must be positive")
        for name in ("neighbor_radius", "cohesion_weight", "separation_weight",
                     "separation_radius", "alignment_weight", "max_speed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.steps < 1 or self.record_every < 1:
            raise ValueError("steps and record_every must be positive")

    def with_seed(self, seed: int) -> "BoidsParams":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BehaviorPreset:
    name: str
    params: BoidsParams


def presets(**overrides) -> List[BehaviorPreset]:
    """Five hand-picked regimes; ``overrides`` apply shared fields (n_boids, steps, ...)."""
    base = BoidsParams(**overrides)
    table = [
        ("clumping", dict(cohesion_weight=0.04, separation_weight=0.5, separation_radius=2.0,
                          alignment_weight=0.0, neighbor_radius=30.0)),
        ("dispersal", dict(cohesion_weight=0.0, separation_weight=30.0, separation_radius=15.0,
                           alignment_weight=0.0, neighbor_radius=15.0)),
        ("streaming", dict(cohesion_weight=0.002, separation_weight=1.0, separation_radius=3.0,
                           alignment_weight=0.3, neighbor_radius=25.0)),
        ("milling", dict(cohesion_weight=0.02, separation_weight=3.0, separation_radius=4.0,
                         alignment_weight=0.05, neighbor_radius=20.0)),
        ("drift", dict(cohesion_weight=0.0, separation_weight=0.0, alignment_weight=0.0)),
    ]
    return [BehaviorPreset(name, replace(base, **kw)) for name, kw in table]


def torus_displacement(pos: np.ndarray, L: float) -> np.ndarray:
    """d[i, j] = shortest vector from boid i to boid j, components in [-L/2, L/2)."""
    d = pos[None, :, :] - pos[:, None, :]
    return (d + L / 2) % L - L / 2


def torus_distance(p, q, L: float) -> float:
    dx = abs(p[0] - q[0])
    dy = abs(p[1] - q[1])
    dx = min(dx, L - dx)
    dy = min(dy, L - dy)
    return math.sqrt(dx * dx + dy * dy)


def initial_state(params: BoidsParams) -> Tuple[np.ndarray, np.ndarray]:
    rng = SplitMix64(params.seed)
    pos = np.empty((params.n_boids, 2))
    vel = np.empty((params.n_boids, 2))
    L = params.torus_size
    for b in range(params.n_boids):
        pos[b] = rng.uniform(0, L), rng.uniform(0, L)
        heading = rng.uniform(0, 2 * math.pi)
        speed = rng.uniform(0.5 * params.max_speed, params.max_speed)
        vel[b] = speed * math.cos(heading), speed * math.sin(heading)
    return _wrap(pos, L), vel


def _wrap(pos: np.ndarray, L: float) -> np.ndarray:
    pos = np.mod(pos, L)
    # mod of a tiny negative number can round up to L
    return np.where(pos >= L, 0.0, pos)


def steering(pos: np.ndarray, vel: np.ndarray, p: BoidsParams) -> np.ndarray:
    disp = torus_displacement(pos, p.torus_size)
    dist = np.sqrt(np.sum(disp * disp, axis=-1))
    nbr = (dist > 0) & (dist < p.neighbor_radius)
    count = nbr.sum(axis=1, keepdims=True)
    safe = np.maximum(count, 1)
    acc = np.zeros_like(pos)
    if p.cohesion_weight:
        acc += p.cohesion_weight * np.where(count > 0, (disp * nbr[..., None]).sum(axis=1) / safe, 0.0)
    if p.alignment_weight:
        mean_v = (nbr.astype(float) @ vel) / safe
        acc += p.alignment_weight * np.where(count > 0, mean_v - vel, 0.0)
    if p.separation_weight:
        close = (dist > 0) & (dist < p.separation_radius)
        inv = np.where(close, 1.0 / np.where(close, dist, 1.0) ** 2, 0.0)
        acc -= p.separation_weight * (disp * inv[..., None]).sum(axis=1)
    return acc


def step(pos: np.ndarray, vel: np.ndarray, p: BoidsParams) -> Tuple[np.ndarray, np.ndarray]:
    """One integration step; returns new (positions, velocities)."""
    vel = vel + p.dt * steering(pos, vel, p)
    speed = np.sqrt(np.sum(vel * vel, axis=1, keepdims=True))
    too_fast = speed > p.max_speed
    vel = np.where(too_fast, vel * (p.max_speed / np.where(too_fast, speed, 1.0)), vel)
    return _wrap(pos + p.dt * vel, p.torus_size), vel


def trajectory(params: BoidsParams) -> np.ndarray:
    """Recorded frames (frame 0 is the initial state), shape (F, n_boids, 2)."""
    pos, vel = initial_state(params)
    frames = [pos]
    for s in range(1, params.steps + 1):
        pos, vel = step(pos, vel, params)
        if s % params.record_every == 0:
            frames.append(pos)
    return np.stack(frames)


def simulate(params: BoidsParams) -> DynamicMetricSpace:
    frames = trajectory(params)
    grid = TimeGrid(0.0, params.dt * params.record_every, len(frames))
    labels = [f"b{i}" for i in range(params.n_boids)]
    return DynamicMetricSpace(labels, grid, positions=frames, torus_size=params.torus_size)
