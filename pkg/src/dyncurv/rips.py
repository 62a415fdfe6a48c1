"""Degree-k Rips persistence of (2k+2)-point semimetric spaces.

For such spaces the degree-k diagram is empty or a single point, and whenever
H_k is nonzero the Rips complex is the boundary of the (k+1)-dimensional
cross-polytope. The diagram is computed here by plain Z/2 column reduction;
complexes on at most six vertices are small enough that this is exact and fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class SmallDiagram:
    point: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.point is not None:
            b, d = self.point
            if not (0 <= b < d):
                raise ValueError(f"diagram point must satisfy 0 <= birth < death, got {self.point}")

    @property
    def empty(self) -> bool:
        return self.point is None

    def __len__(self) -> int:
        return 0 if self.point is None else 1


@dataclass(frozen=True)
class FiltrationSimplex:
    vertices: Tuple[int, ...]
    diameter: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


@lru_cache(maxsize=None)
def _simplex_table(n: int, max_dim: int):
    """Simplices on n vertices up to ``max_dim``, their edge lists and facet indices."""
    simplices = [s for size in range(1, max_dim + 2) for s in combinations(range(n), size)]
    index = {s: i for i, s in enumerate(simplices)}
    edges = [tuple(combinations(s, 2)) for s in simplices]
    facets = [
        tuple(index[f] for f in combinations(s, len(s) - 1)) if len(s) > 1 else ()
        for s in simplices
    ]
    dims = [len(s) - 1 for s in simplices]
    return simplices, edges, facets, dims


def rips_filtration(dist: np.ndarray, max_dim: int) -> List[FiltrationSimplex]:
    """All simplices of dimension <= max_dim, sorted by (diameter, dimension, vertices)."""
    n = len(dist)
    simplices, edges, _, _ = _simplex_table(n, max_dim)
    out = []
    for s, es in zip(simplices, edges):
        diam = max((float(dist[a][b]) for a, b in es), default=0.0)
        out.append(FiltrationSimplex(s, diam))
    out.sort(key=lambda f: (f.diameter, f.dim, f.vertices))
    return out


def persistence_pairs(dist: np.ndarray, max_dim: int):
    """Z/2 standard reduction of the Rips boundary matrix.

    Returns ``(pairs, essential)`` where ``pairs`` holds (dim, birth, death)
    for every birth/death pair (including zero-length ones) and ``essential``
    holds (dim, birth) of unpaired simplices.
    """
    n = len(dist)
    simplices, edges, facets, dims = _simplex_table(n, max_dim)
    diam = [max((dist[a][b] for a, b in es), default=0.0) for es in edges]
    order = sorted(range(len(simplices)), key=lambda s: (diam[s], dims[s], simplices[s]))
    pos = [0] * len(order)
    for p, s in enumerate(order):
        pos[s] = p
    # columns as bitmasks over filtration positions
    low_owner = {}
    paired = set()
    pairs = []
    for p, s in enumerate(order):
        col = 0
        for f in facets[s]:
            col ^= 1 << pos[f]
        while col:
            low = col.bit_length() - 1
            other = low_owner.get(low)
            if other is None:
                break
            col ^= other
        if col:
            low = col.bit_length() - 1
            low_owner[low] = col
            birth_simplex = order[low]
            paired.add(low)
            paired.add(p)
            pairs.append((dims[birth_simplex], float(diam[birth_simplex]), float(diam[s])))
    essential = [
        (dims[order[p]], float(diam[order[p]])) for p in range(len(order)) if p not in paired
    ]
    return pairs, essential


def _check_input(dist, k: int) -> np.ndarray:
    dist = np.asarray(dist, dtype=np.float64)
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    if dist.shape != (2 * k + 2, 2 * k + 2):
        raise ValueError(f"degree {k} needs a {2 * k + 2}x{2 * k + 2} matrix, got {dist.shape}")
    if np.isnan(dist).any():
        raise ValueError("distance matrix contains NaN")
    return dist


def rips_diagram_small(dist, k: int) -> SmallDiagram:
    """Degree-k Rips diagram of a (2k+2)-point semimetric space.

    Degree 0 uses reduced homology: the essential component is dropped.
    """
    dist = _check_input(dist, k)
    pairs, essential = persistence_pairs(dist.tolist(), k + 2)
    points = [(b, d) for dim, b, d in pairs if dim == k and b < d]
    if k > 0 and any(dim == k for dim, _ in essential):
        raise AssertionError("essential degree-k class in a full simplex skeleton")
    if len(points) > 1:
        # cannot happen for 2k+2 points; surfaced rather than silently truncated
        raise AssertionError(f"more than one diagram point: {points}")
    return SmallDiagram(points[0] if points else None)


def is_cross_polytope(dist, k: int, delta: float) -> bool:
    """True iff the Rips complex at scale ``delta`` is the cross-polytope boundary.

    Rips complexes are flag complexes, so this holds exactly when the pairs
    farther apart than ``delta`` form a perfect matching.
    """
    dist = _check_input(dist, k)
    n = len(dist)
    far = dist > delta
    np.fill_diagonal(far, False)
    degrees = far.sum(axis=1)
    return bool(np.all(degrees == 1))
