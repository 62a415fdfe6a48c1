"""Persistence sets of (2k+2)-point subspaces and Hausdorff distances between them."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dms import DynamicMetricSpace, restrict
from .dynmodule import DynGrid, ThinDynModule, build_dyn_module
from .erosion import erosion_matrix
from .parallel import ordered_map


@dataclass
class PersistenceSet:
    k: int
    grid: DynGrid
    modules: List[ThinDynModule]
    provenance: List[Tuple[int, ...]]

    def __post_init__(self):
        if len(self.modules) != len(self.provenance):
            raise ValueError("modules and provenance must have equal length")
        for s in self.provenance:
            if len(s) != 2 * self.k + 2 or len(set(s)) != len(s):
                raise ValueError(f"subset {s} is not {2 * self.k + 2} distinct indices")

    def __len__(self) -> int:
        return len(self.modules)

    def subset(self, idx: Sequence[int]) -> "PersistenceSet":
        return PersistenceSet(self.k, self.grid, [self.modules[i] for i in idx],
                              [self.provenance[i] for i in idx])


def _build_all(dms, k, grid, subsets) -> List[ThinDynModule]:
    cache = {}
    return [build_dyn_module(restrict(dms, s), k, grid, cache=cache) for s in subsets]


def sample_subsets(n: int, size: int, count: int, seed, max_retries: Optional[int] = None) -> List[Tuple[int, ...]]:
    """``count`` sorted index subsets, distinct while the retry budget lasts."""
    if size > n:
        raise ValueError(f"cannot draw {size}-point subsets from {n} points")
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    max_retries = 20 * count if max_retries is None else max_retries
    seen, out, retries = set(), [], 0
    while len(out) < count:
        s = tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
        if s in seen and retries < max_retries:
            retries += 1
            continue
        seen.add(s)
        out.append(s)
    return out


def sample_persistence_set(dms: DynamicMetricSpace, k: int, count: int, grid: DynGrid, seed) -> PersistenceSet:
    subsets = sample_subsets(dms.n_points, 2 * k + 2, count, seed)
    return PersistenceSet(k, grid, _build_all(dms, k, grid, subsets), subsets)


def exhaustive_persistence_set(dms: DynamicMetricSpace, k: int, grid: DynGrid) -> PersistenceSet:
    """Modules of every (2k+2)-point subspace."""
    if dms.n_points < 2 * k + 2:
        raise ValueError(f"need at least {2 * k + 2} points, got {dms.n_points}")
    subsets = list(combinations(range(dms.n_points), 2 * k + 2))
    return PersistenceSet(k, grid, _build_all(dms, k, grid, subsets), subsets)


def _grid_modules(ps: PersistenceSet):
    return [m.to_grid_module() for m in ps.modules]


def kcenter_reduce(ps: PersistenceSet, target: int, seed) -> PersistenceSet:
    """Greedy farthest-point selection under the erosion distance.

    Starts from a seeded-random element; ties go to the lowest index.
    Elements are returned in selection order.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    if target > len(ps):
        raise ValueError(f"target {target} exceeds set size {len(ps)}")
    mods = _grid_modules(ps)
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(len(mods)))]
    gap = erosion_matrix([mods[chosen[0]]], mods)[0]
    while len(chosen) < target:
        gap[chosen] = -1.0
        nxt = int(np.argmax(gap))
        chosen.append(nxt)
        gap = np.minimum(gap, erosion_matrix([mods[nxt]], mods)[0])
    return ps.subset(chosen)


def _check_compatible(A: PersistenceSet, B: PersistenceSet) -> None:
    if A.k != B.k:
        raise ValueError(f"degree mismatch: {A.k} vs {B.k}")
    if A.grid != B.grid:
        raise ValueError("persistence sets live on different Dyn grids")
    if len(A) == 0 or len(B) == 0:
        raise ValueError("Hausdorff distance of an empty persistence set is undefined")


def _rows_job(args):
    rows, cols = args
    return erosion_matrix(rows, cols)


def pairwise_erosion(A: PersistenceSet, B: PersistenceSet, workers: int = 1) -> np.ndarray:
    """|A| x |B| matrix of erosion distances, rows split across workers."""
    _check_compatible(A, B)
    ga, gb = _grid_modules(A), _grid_modules(B)
    if workers <= 1:
        return erosion_matrix(ga, gb)
    bounds = np.linspace(0, len(ga), min(workers, len(ga)) + 1).astype(int)
    jobs = [(ga[s:e], gb) for s, e in zip(bounds[:-1], bounds[1:])]
    return np.vstack(ordered_map(_rows_job, jobs, workers))


def hausdorff_from_matrix(D: np.ndarray) -> float:
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def hausdorff_erosion(A: PersistenceSet, B: PersistenceSet, workers: int = 1) -> float:
    """Hausdorff distance between persistence sets with the erosion distance as ground metric."""
    return hausdorff_from_matrix(pairwise_erosion(A, B, workers))


# -- distance matrices ------------------------------------------------------------------------


@dataclass
class DistanceMatrix:
    labels: List[str]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.labels = [str(x) for x in self.labels]
        v = np.array(self.values, dtype=np.float64)
        n = len(self.labels)
        if v.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {v.shape}")
        if np.isnan(v).any() or (v < 0).any():
            raise ValueError("distances must be nonnegative numbers")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix is not symmetric")
        if np.any(np.diag(v) != 0):
            raise ValueError("distance matrix has a nonzero diagonal")
        self.values = v

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + self.labels)
        for lab, row in zip(self.labels, self.values):
            w.writerow([lab] + [f"{x:.12g}" for x in row])
        return buf.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or len(rows[0]) < 1:
            raise ValueError("empty distance matrix file")
        labels = rows[0][1:]
        body = rows[1:]
        if len(body) != len(labels) or any(len(r) != len(labels) + 1 for r in body):
            raise ValueError("distance matrix CSV is not square")
        if [r[0] for r in body] != labels:
            raise ValueError("row labels do not match column labels")
        try:
            vals = [[float(x) for x in r[1:]] for r in body]
        except ValueError as e:
            raise ValueError(f"non-numeric entry in distance matrix: {e}") from None
        return cls(labels, np.array(vals).reshape(len(labels), len(labels)))

    @classmethod
    def load(cls, path) -> "DistanceMatrix":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"distance matrix not found: {path}")
        return cls.from_csv(path.read_text())


def combine_max(matrices: Sequence[DistanceMatrix]) -> DistanceMatrix:
    if not matrices:
        raise ValueError("nothing to combine")
    labels = matrices[0].labels
    for m in matrices[1:]:
        if m.labels != labels:
            raise ValueError("label mismatch between distance matrices")
    return DistanceMatrix(labels, np.maximum.reduce([m.values for m in matrices]))
