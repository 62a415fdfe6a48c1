"""Thin spatiotemporal persistence modules over a discretized Dyn poset.

Grid points are triples (i, j, m): the time interval [t_i, t_j] (i <= j)
and the scale m * h. The order is

    (i, j, m) <= (i', j', m')  iff  i' <= i, j <= j', m <= m',

i.e. interval containment times the usual order on scales. Mapping
(i, j, m) -> (T-1-i, j, m) turns it into the product order on [T]x[T]x[S].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dms import DynamicMetricSpace, TimeGrid, aggregate_incremental
from .erosion.grid import GridModule
from .rips import rips_diagram_small


@dataclass(frozen=True)
class DynGrid:
    """T x T x S lattice; the scale axis shares the time step h.

    ``delta_weight`` rescales scales before gridding: scale delta sits at
    grid height delta_weight * delta / h.
    """

    time_grid: TimeGrid
    delta_count: int
    delta_weight: float = 1.0

    def __post_init__(self):
        if self.delta_count < 1:
            raise ValueError(f"delta_count must be positive, got {self.delta_count}")
        if not self.delta_weight > 0:
            raise ValueError(f"delta_weight must be positive, got {self.delta_weight}")

    @property
    def T(self) -> int:
        return self.time_grid.count

    @property
    def S(self) -> int:
        return self.delta_count

    @property
    def step(self) -> float:
        return self.time_grid.step

    @property
    def delta_step(self) -> float:
        return self.time_grid.step

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.T, self.T, self.S)

    def to_json(self) -> dict:
        return {"t_start": self.time_grid.t_start, "step": self.step, "T": self.T,
                "S": self.S, "delta_weight": self.delta_weight}

    @classmethod
    def from_json(cls, obj: dict) -> "DynGrid":
        return cls(TimeGrid(float(obj["t_start"]), float(obj["step"]), int(obj["T"])),
                   int(obj["S"]), float(obj.get("delta_weight", 1.0)))


def dyn_leq(p, q) -> bool:
    (i, j, m), (i2, j2, m2) = p, q
    return i2 <= i and j <= j2 and m <= m2


def dyn_point_to_poset(p, T: int) -> Tuple[int, int, int]:
    i, j, m = p
    return (T - 1 - i, j, m)


def poset_point_to_dyn(x, T: int) -> Tuple[int, int, int]:
    a, j, m = x
    return (T - 1 - a, j, m)


def scale_range(birth: np.ndarray, death: np.ndarray, step: float, weight: float, S: int):
    """Grid heights m with weight*birth <= m*step < weight*death, clipped to [0, S).

    Returns (lo, hi) with lo > hi marking an empty range. The ceil estimate is
    corrected against the exact inequality to avoid off-by-one rounding.
    """
    b = weight * np.asarray(birth, dtype=np.float64)
    d = weight * np.asarray(death, dtype=np.float64)
    lo = np.ceil(b / step)
    lo = np.where((lo - 1) * step >= b, lo - 1, lo)
    lo = np.where(lo * step < b, lo + 1, lo)
    # largest m with m*step < d
    hi = np.ceil(d / step) - 1
    hi = np.where((hi + 1) * step < d, hi + 1, hi)
    hi = np.where(hi * step >= d, hi - 1, hi)
    lo = np.maximum(lo, 0)
    hi = np.minimum(hi, S - 1)
    valid = np.isfinite(b) & np.isfinite(d) & (lo <= hi)
    return np.where(valid, lo, 0).astype(np.int64), np.where(valid, hi, -1).astype(np.int64)


class ThinDynModule:
    """Support of H_k along the Dyn grid, stored as one scale interval per time interval.

    ``births``/``deaths`` are T x T arrays, NaN where the diagram is empty
    (and below the diagonal).
    """

    def __init__(self, grid: DynGrid, births: np.ndarray, deaths: np.ndarray, k: Optional[int] = None):
        T = grid.T
        births = np.array(births, dtype=np.float64)
        deaths = np.array(deaths, dtype=np.float64)
        if births.shape != (T, T) or deaths.shape != (T, T):
            raise ValueError(f"entry arrays must be {T}x{T}")
        present = np.isfinite(births)
        if not np.array_equal(present, np.isfinite(deaths)):
            raise ValueError("births and deaths must be present together")
        if np.any(np.tril(present, -1)):
            raise ValueError("entries below the diagonal (i > j)")
        if np.any(births[present] >= deaths[present]) or np.any(births[present] < 0):
            raise ValueError("entries must satisfy 0 <= birth < death")
        births.setflags(write=False)
        deaths.setflags(write=False)
        self.grid = grid
        self.births = births
        self.deaths = deaths
        self.k = k

    @classmethod
    def empty(cls, grid: DynGrid, k: Optional[int] = None) -> "ThinDynModule":
        nan = np.full((grid.T, grid.T), np.nan)
        return cls(grid, nan, nan.copy(), k)

    def entry(self, i: int, j: int) -> Optional[Tuple[float, float]]:
        if not 0 <= i <= j < self.grid.T or not np.isfinite(self.births[i, j]):
            return None
        return float(self.births[i, j]), float(self.deaths[i, j])

    def entries(self) -> List[Tuple[int, int, float, float]]:
        ii, jj = np.nonzero(np.isfinite(self.births))
        return [(int(i), int(j), float(self.births[i, j]), float(self.deaths[i, j])) for i, j in zip(ii, jj)]

    @cached_property
    def scale_columns(self) -> Tuple[np.ndarray, np.ndarray]:
        """(lo, hi) grid-height ranges indexed by Dyn (i, j)."""
        g = self.grid
        return scale_range(self.births, self.deaths, g.step, g.delta_weight, g.S)

    def __contains__(self, p) -> bool:
        i, j, m = (int(v) for v in p)
        if not (0 <= i <= j < self.grid.T and 0 <= m < self.grid.S):
            return False
        lo, hi = self.scale_columns
        return bool(lo[i, j] <= m <= hi[i, j])

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean support indexed by Dyn (i, j, m)."""
        lo, hi = self.scale_columns
        m = np.arange(self.grid.S)
        out = (m >= lo[..., None]) & (m <= hi[..., None])
        out.setflags(write=False)
        return out

    def support_points(self) -> np.ndarray:
        return np.argwhere(self.mask)

    def is_empty(self) -> bool:
        lo, hi = self.scale_columns
        return not np.any(lo <= hi)

    def to_grid_module(self) -> GridModule:
        return dyn_to_poset_coords(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThinDynModule):
            return NotImplemented
        return (self.grid == other.grid
                and np.array_equal(self.births, other.births, equal_nan=True)
                and np.array_equal(self.deaths, other.deaths, equal_nan=True))

    def to_json(self) -> dict:
        out = {"grid": self.grid.to_json(), "entries": [list(e) for e in self.entries()]}
        if self.k is not None:
            out["k"] = self.k
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ThinDynModule":
        grid = DynGrid.from_json(obj["grid"])
        b = np.full((grid.T, grid.T), np.nan)
        d = b.copy()
        for i, j, birth, death in obj["entries"]:
            b[int(i), int(j)] = birth
            d[int(i), int(j)] = death
        return cls(grid, b, d, obj.get("k"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")

    @classmethod
    def load(cls, path) -> "ThinDynModule":
        return cls.from_json(json.loads(Path(path).read_text()))


def dyn_to_poset_coords(m: ThinDynModule) -> GridModule:
    """Same support on [T]x[T]x[S] under (i, j, m) -> (T-1-i, j, m)."""
    cached = m.__dict__.get("_grid_module")
    if cached is not None:
        return cached
    lo, hi = m.scale_columns
    out = GridModule(m.grid.dims, lo[::-1], hi[::-1], m.grid.step)
    m.__dict__["_grid_module"] = out
    return out


def _check_grid(dms: DynamicMetricSpace, grid: DynGrid) -> None:
    a, b = dms.time_grid, grid.time_grid
    if a.count != b.count or not math.isclose(a.step, b.step) or not math.isclose(a.t_start, b.t_start):
        raise ValueError(f"time grid of the space {a} does not match the Dyn grid {b}")


def build_dyn_module(dms: DynamicMetricSpace, k: int, grid: DynGrid,
                     cache: Optional[Dict[bytes, Optional[Tuple[float, float]]]] = None) -> ThinDynModule:
    """Degree-k persistence of the aggregated Rips filtration at every time interval.

    ``cache`` memoizes diagrams by aggregated matrix; consecutive intervals
    often share their running minimum.
    """
    if dms.n_points != 2 * k + 2:
        raise ValueError(f"degree {k} needs {2 * k + 2} points, got {dms.n_points}")
    _check_grid(dms, grid)
    T = grid.T
    births = np.full((T, T), np.nan)
    deaths = np.full((T, T), np.nan)
    if cache is None:
        cache = {}
    for i in range(T):
        for j, agg in enumerate(aggregate_incremental(dms, i), start=i):
            key = agg.tobytes()
            if key not in cache:
                cache[key] = rips_diagram_small(agg, k).point
            pt = cache[key]
            if pt is not None:
                births[i, j], deaths[i, j] = pt
    return ThinDynModule(grid, births, deaths, k)


# -- decomposition ----------------------------------------------------------------------------


@dataclass
class IntervalDecomposition:
    """Order-connected components of a support, each an (n, 3) array of Dyn points."""

    components: List[np.ndarray]
    T: Optional[int] = None

    def __len__(self) -> int:
        return len(self.components)

    def labels(self, shape) -> np.ndarray:
        out = np.zeros(shape, np.int64)
        for c, pts in enumerate(self.components, start=1):
            out[tuple(pts.T)] = c
        return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                ra, rb = rb, ra
            self.parent[ra] = rb


def decompose_mask(mask: np.ndarray) -> List[np.ndarray]:
    """Components of a Dyn-indexed support joined along cover steps.

    Cover steps are i -> i-1, j -> j+1 and m -> m+1. Components come out
    ordered by their first point in (i, j, m) lexicographic order.
    """
    pts = np.argwhere(mask)
    if len(pts) == 0:
        return []
    index = -np.ones(mask.shape, np.int64)
    index[tuple(pts.T)] = np.arange(len(pts))
    uf = _UnionFind(len(pts))
    for step in ((-1, 0, 0), (0, 1, 0), (0, 0, 1)):
        nb = pts + np.array(step)
        ok = np.all((nb >= 0) & (nb < np.array(mask.shape)), axis=1)
        src = np.nonzero(ok)[0]
        dst = index[tuple(nb[ok].T)]
        for a, b in zip(src[dst >= 0], dst[dst >= 0]):
            uf.union(int(a), int(b))
    roots = np.array([uf.find(a) for a in range(len(pts))])
    comps = {}
    for a, r in enumerate(roots):
        comps.setdefault(r, []).append(a)
    return [pts[idx] for _, idx in sorted(comps.items(), key=lambda kv: kv[1][0])]


def decompose(m: ThinDynModule) -> IntervalDecomposition:
    return IntervalDecomposition(decompose_mask(m.mask), m.grid.T)


def _comparable_any(A: np.ndarray, B: np.ndarray, chunk: int = 512) -> bool:
    # Dyn order on point arrays: flip the first coordinate to get the product order
    a = A * np.array([-1, 1, 1])
    b = B * np.array([-1, 1, 1])
    for s in range(0, len(a), chunk):
        blk = a[s:s + chunk, None, :]
        if np.any(np.all(blk <= b[None], axis=2)) or np.any(np.all(blk >= b[None], axis=2)):
            return True
    return False


def verify_acd(d: IntervalDecomposition) -> bool:
    """True iff no point of one component is comparable to a point of another."""
    comps = d.components
    for x in range(len(comps)):
        for y in range(x + 1, len(comps)):
            if _comparable_any(comps[x], comps[y]):
                return False
    return True
