"""Dynamic metric spaces sampled on a uniform time grid."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"time step must be positive, got {self.step}")
        if self.count < 1:
            raise ValueError(f"time grid needs at least one sample, got {self.count}")

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class TimeIntervalIndex:
    """Closed interval [t_i, t_j] given by grid indices."""

    i: int
    j: int

    def check(self, grid: TimeGrid) -> None:
        if not (0 <= self.i <= self.j < grid.count):
            raise ValueError(
                f"interval ({self.i}, {self.j}) invalid for a grid of {grid.count} samples"
            )


def pairwise_torus_distances(positions: np.ndarray, torus_size: float) -> np.ndarray:
    """Geodesic distances on the flat torus [0, L)^2, batched over leading axes."""
    diff = np.abs(positions[..., :, None, :] - positions[..., None, :, :])
    diff = np.minimum(diff, torus_size - diff)
    return np.sqrt(np.sum(diff * diff, axis=-1))


class DynamicMetricSpace:
    """Finite point set with one pseudo-metric per sample time.

    Either ``distances`` (T x N x N) or ``positions`` (T x N x 2, on a torus of
    side ``torus_size``) must be given. Position-backed spaces compute their
    distance tensor on first access.
    """

    def __init__(
        self,
        labels: Sequence,
        time_grid: TimeGrid,
        distances: Optional[np.ndarray] = None,
        positions: Optional[np.ndarray] = None,
        torus_size: Optional[float] = None,
        validate: bool = True,
    ):
        if (distances is None) == (positions is None):
            raise ValueError("give exactly one of distances or positions")
        self.labels = [str(x) for x in labels]
        self.time_grid = time_grid
        n = len(self.labels)
        T = time_grid.count
        if positions is not None:
            if torus_size is None or not torus_size > 0:
                raise ValueError("positions2d spaces need a positive torus_size")
            positions = np.array(positions, dtype=np.float64)
            if positions.shape != (T, n, 2):
                raise ValueError(f"positions must have shape {(T, n, 2)}, got {positions.shape}")
            if validate and positions.size and (positions.min() < 0 or positions.max() >= torus_size):
                raise ValueError("positions must lie in [0, torus_size)")
            positions.setflags(write=False)
            self.kind = "positions2d"
        else:
            distances = np.array(distances, dtype=np.float64)
            if distances.shape != (T, n, n):
                raise ValueError(f"distances must have shape {(T, n, n)}, got {distances.shape}")
            if validate:
                check_semimetric(distances)
            distances.setflags(write=False)
            self.__dict__["distances"] = distances
            self.kind = "distances"
        self.positions = positions
        self.torus_size = None if torus_size is None else float(torus_size)

    @cached_property
    def distances(self) -> np.ndarray:
        d = pairwise_torus_distances(self.positions, self.torus_size)
        d.setflags(write=False)
        return d

    @property
    def n_points(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DynamicMetricSpace):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.time_grid == other.time_grid
            and np.array_equal(self.distances, other.distances)
        )

    def __repr__(self) -> str:
        return f"DynamicMetricSpace(N={self.n_points}, T={self.time_grid.count}, kind={self.kind})"


def check_semimetric(d: np.ndarray, atol: float = 0.0) -> None:
    """Raise ValueError unless every slice of ``d`` is a semimetric matrix."""
    d = np.asarray(d)
    if np.isnan(d).any():
        raise ValueError("distance matrix contains NaN")
    if (d < 0).any():
        raise ValueError("distances must be nonnegative")
    if np.abs(d - np.swapaxes(d, -1, -2)).max(initial=0.0) > atol:
        raise ValueError("distance matrix is not symmetric")
    if np.abs(np.diagonal(d, axis1=-2, axis2=-1)).max(initial=0.0) > atol:
        raise ValueError("distance matrix has a nonzero diagonal")


def _as_interval(I) -> TimeIntervalIndex:
    if isinstance(I, TimeIntervalIndex):
        return I
    i, j = I
    return TimeIntervalIndex(int(i), int(j))


def aggregate_semimetric(dms: DynamicMetricSpace, I) -> np.ndarray:
    """Entrywise minimum of the distance matrices sampled in [t_i, t_j]."""
    I = _as_interval(I)
    I.check(dms.time_grid)
    return dms.distances[I.i : I.j + 1].min(axis=0)


def aggregate_incremental(dms: DynamicMetricSpace, i: int) -> Iterator[np.ndarray]:
    """Yield ``aggregate_semimetric(dms, (i, j))`` for j = i, ..., T-1 by running min."""
    TimeIntervalIndex(i, i).check(dms.time_grid)
    d = dms.distances
    current = d[i].copy()
    yield current.copy()
    for j in range(i + 1, dms.time_grid.count):
        np.minimum(current, d[j], out=current)
        yield current.copy()


def restrict(dms: DynamicMetricSpace, subset: Sequence[int]) -> DynamicMetricSpace:
    idx = [int(s) for s in subset]
    if len(set(idx)) != len(idx):
        raise ValueError(f"subset has duplicate indices: {idx}")
    if any(not 0 <= s < dms.n_points for s in idx):
        raise ValueError(f"subset index out of range for {dms.n_points} points: {idx}")
    labels = [dms.labels[s] for s in idx]
    if dms.kind == "positions2d":
        return DynamicMetricSpace(
            labels, dms.time_grid, positions=dms.positions[:, idx], torus_size=dms.torus_size,
            validate=False,
        )
    sub = dms.distances[:, idx][:, :, idx]
    return DynamicMetricSpace(labels, dms.time_grid, distances=sub, validate=False)


def perturb(dms: DynamicMetricSpace, magnitude: float, seed: int) -> DynamicMetricSpace:
    """Shift every off-diagonal distance by a uniform amount in [-magnitude, magnitude].

    Symmetry is kept by drawing one offset per unordered pair; results are
    clamped at zero.
    """
    if magnitude < 0:
        raise ValueError(f"magnitude must be nonnegative, got {magnitude}")
    d = np.array(dms.distances)
    if magnitude == 0:
        return DynamicMetricSpace(dms.labels, dms.time_grid, distances=d, validate=False)
    T, n, _ = d.shape
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    noise = rng.uniform(-magnitude, magnitude, size=(T, len(iu[0])))
    upper = np.maximum(d[:, iu[0], iu[1]] + noise, 0.0)
    d[:, iu[0], iu[1]] = upper
    d[:, iu[1], iu[0]] = upper
    return DynamicMetricSpace(dms.labels, dms.time_grid, distances=d, validate=False)


def subsample_times(dms: DynamicMetricSpace, stride: int, count: Optional[int] = None) -> DynamicMetricSpace:
    """Keep every ``stride``-th sample (optionally only the first ``count`` of them)."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    idx = np.arange(0, dms.time_grid.count, stride)
    if count is not None:
        if count > len(idx):
            raise ValueError(f"only {len(idx)} samples available at stride {stride}, asked for {count}")
        idx = idx[:count]
    grid = TimeGrid(dms.time_grid.t_start, dms.time_grid.step * stride, len(idx))
    if dms.kind == "positions2d":
        return DynamicMetricSpace(dms.labels, grid, positions=dms.positions[idx],
                                  torus_size=dms.torus_size, validate=False)
    return DynamicMetricSpace(dms.labels, grid, distances=dms.distances[idx], validate=False)


# -- file format -----------------------------------------------------------------------------
#
# A JSON descriptor
#   {labels, t_start, step, count, payload: "inline"|"binary", kind: "distances"|"positions2d",
#    torus_size?, data? (inline), sidecar? (binary)}
# with binary payloads stored next to it as little-endian float64, row-major T x N x N or T x N x 2.


def save_dms(dms: DynamicMetricSpace, path, payload: str = "binary") -> Path:
    path = Path(path)
    if payload not in ("inline", "binary"):
        raise ValueError(f"unknown payload kind {payload!r}")
    arr = dms.positions if dms.kind == "positions2d" else dms.distances
    desc = {
        "labels": dms.labels,
        "t_start": dms.time_grid.t_start,
        "step": dms.time_grid.step,
        "count": dms.time_grid.count,
        "payload": payload,
        "kind": dms.kind,
    }
    if dms.torus_size is not None:
        desc["torus_size"] = dms.torus_size
    path.parent.mkdir(parents=True, exist_ok=True)
    if payload == "inline":
        desc["data"] = arr.tolist()
    else:
        sidecar = path.with_suffix(".bin")
        desc["sidecar"] = sidecar.name
        sidecar.write_bytes(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    path.write_text(json.dumps(desc, indent=1) + "\n")
    return path


def load_dms(path) -> DynamicMetricSpace:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"DMS descriptor not found: {path}")
    desc = json.loads(path.read_text())
    n = len(desc["labels"])
    T = int(desc["count"])
    kind = desc["kind"]
    shape = (T, n, n) if kind == "distances" else (T, n, 2)
    if desc["payload"] == "inline":
        arr = np.asarray(desc["data"], dtype=np.float64).reshape(shape)
    else:
        sidecar = path.parent / desc.get("sidecar", path.with_suffix(".bin").name)
        if not sidecar.exists():
            raise FileNotFoundError(f"DMS sidecar not found: {sidecar}")
        arr = np.frombuffer(sidecar.read_bytes(), dtype="<f8").astype(np.float64).reshape(shape)
    grid = TimeGrid(float(desc["t_start"]), float(desc["step"]), T)
    if kind == "distances":
        return DynamicMetricSpace(desc["labels"], grid, distances=arr)
    if kind == "positions2d":
        return DynamicMetricSpace(desc["labels"], grid, positions=arr, torus_size=desc["torus_size"])
    raise ValueError(f"unknown DMS kind {kind!r} in {path}")
