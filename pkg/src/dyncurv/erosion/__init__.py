"""Erosion distance between thin convex modules and rank-maximal modules on a lattice."""

from __future__ import annotations

import numpy as np

from .generators import (acd_module_from_generators, dilated_acd_modules, grid_box, random_acd_module,
                         random_rank_maximal_module)
from .grid import GridModule, RankMaximalGridModule, ValidationError, is_convex
from .oracle import ResourceBudgetError, erosion_distance_oracle
from .sweep import FiberSlice, erosion1d, iter_fiber_slices, sweep_matrix, sweep_numba, sweep_python

BACKENDS = ("numba", "python")


def _check_pair(V, W) -> None:
    if tuple(V.dims) != tuple(W.dims):
        raise ValueError(f"lattice mismatch: {V.dims} vs {W.dims}")
    if V.unit != W.unit:
        raise ValueError(f"unit mismatch: {V.unit} vs {W.unit}")


def erosion_steps(V: GridModule, W: GridModule, backend: str = "numba", validate: bool = True,
                  scan: bool = False) -> int:
    """Erosion distance in lattice steps."""
    _check_pair(V, W)
    if validate:
        V.validate()
        W.validate()
    if scan or backend == "python":
        return sweep_python(V, W, scan=scan)
    if backend != "numba":
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    return sweep_numba(V, W)


def erosion_distance(V: GridModule, W: GridModule, backend: str = "numba", validate: bool = True,
                     scan: bool = False) -> float:
    """Erosion distance between two thin convex modules sharing a lattice.

    ``validate`` runs the O(n^d) convexity check on both supports; the sweep
    itself touches only the n^{d-1} stored columns.
    """
    return V.unit * erosion_steps(V, W, backend=backend, validate=validate, scan=scan)


def erosion_distance_rank_maximal(V: RankMaximalGridModule, W: RankMaximalGridModule,
                                  backend: str = "numba", validate: bool = True) -> float:
    """Largest erosion distance between corresponding superlevel supports."""
    _check_pair(V, W)
    if validate:
        V.validate()
        W.validate()
    M = max(V.max_dim, W.max_dim)
    best = 0
    for level in range(1, M + 1):
        best = max(best, erosion_steps(V.superlevel(level), W.superlevel(level),
                                       backend=backend, validate=False))
    return V.unit * best


def erosion_matrix(A, B=None, validate: bool = False) -> np.ndarray:
    """Pairwise erosion distances between two lists of modules on one lattice.

    With ``B`` omitted the result is the symmetric matrix of ``A`` against itself.
    """
    symmetric = B is None
    B = A if symmetric else B
    if not A or not B:
        return np.zeros((len(A), len(B)))
    ref = A[0]
    for M in list(A) + list(B):
        _check_pair(ref, M)
        if validate:
            M.validate()
    lo_a = np.stack([M.lo.reshape(-1) for M in A])
    hi_a = np.stack([M.hi.reshape(-1) for M in A])
    lo_b = np.stack([M.lo.reshape(-1) for M in B])
    hi_b = np.stack([M.hi.reshape(-1) for M in B])
    steps = sweep_matrix(ref.dims, lo_a, hi_a, lo_b, hi_b, symmetric=symmetric)
    return ref.unit * steps.astype(np.float64)


def erosion_distance_dyn(V, W, backend: str = "numba", validate: bool = False) -> float:
    """Erosion distance between two thin Dyn modules on the same Dyn grid."""
    if V.grid != W.grid:
        raise ValueError("Dyn grid mismatch")
    return erosion_distance(V.to_grid_module(), W.to_grid_module(), backend=backend, validate=validate)


__all__ = [
    "BACKENDS", "FiberSlice", "GridModule", "RankMaximalGridModule", "ResourceBudgetError",
    "ValidationError", "acd_module_from_generators", "erosion1d", "erosion_distance",
    "erosion_distance_dyn", "erosion_distance_oracle", "erosion_distance_rank_maximal",
    "erosion_matrix", "erosion_steps", "grid_box", "is_convex", "iter_fiber_slices",
    "random_acd_module", "random_rank_maximal_module", "dilated_acd_modules",
]
