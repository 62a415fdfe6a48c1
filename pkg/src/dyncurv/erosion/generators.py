"""Random convex supports and rank-maximal modules for testing."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .grid import GridModule, RankMaximalGridModule


def _upset_floor(dims, gens) -> np.ndarray:
    # per column: least last coordinate of the up-set generated by gens (n_last if none)
    F = np.full(dims[:-1], dims[-1], np.int64)
    for g in gens:
        g = tuple(int(v) for v in g)
        F[g[:-1]] = min(F[g[:-1]], g[-1])
    for ax in range(F.ndim):
        F = np.minimum.accumulate(F, axis=ax)
    return F


def _downset_ceiling(dims, gens) -> np.ndarray:
    G = np.full(dims[:-1], -1, np.int64)
    for g in gens:
        g = tuple(int(v) for v in g)
        G[g[:-1]] = max(G[g[:-1]], g[-1])
    for ax in range(G.ndim):
        G = np.flip(np.maximum.accumulate(np.flip(G, axis=ax), axis=ax), axis=ax)
    return G


def acd_module_from_generators(dims: Sequence[int], up_gens, down_gens, unit: float = 1.0) -> GridModule:
    """Support = (up-set of ``up_gens``) intersected with (down-set of ``down_gens``).

    Any such intersection is convex, and every convex set arises this way.
    """
    dims = tuple(int(n) for n in dims)
    return GridModule(dims, _upset_floor(dims, up_gens), _downset_ceiling(dims, down_gens), unit)


def random_acd_module(dims: Sequence[int], seed, max_gens: int = 4, unit: float = 1.0) -> GridModule:
    """Random convex support built from a few up- and down-set generators.

    Most down-set generators are placed above an up-set generator so that
    the support is usually nonempty.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dims = tuple(int(n) for n in dims)
    hi = np.array(dims)
    ups = rng.integers(0, hi, size=(rng.integers(1, max_gens + 1), len(dims)))
    downs = []
    for _ in range(rng.integers(1, max_gens + 1)):
        if rng.random() < 0.8:
            base = ups[rng.integers(len(ups))]
            downs.append(np.minimum(base + rng.integers(0, hi), hi - 1))
        else:
            downs.append(rng.integers(0, hi))
    return acd_module_from_generators(dims, ups, downs, unit)


def dilated_acd_modules(sizes: Sequence[int], d: int, seed, max_gens: int = 4,
                        unit: float = 1.0) -> dict:
    """One random convex shape drawn in the unit cube, rasterised on [n]^d for each n in ``sizes``.

    Useful for scaling measurements: only the resolution changes between sizes.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    ups = rng.random((rng.integers(1, max_gens + 1), d))
    downs = [np.minimum(ups[rng.integers(len(ups))] + rng.random(d), 1.0) if rng.random() < 0.8
             else rng.random(d) for _ in range(rng.integers(1, max_gens + 1))]
    out = {}
    for n in sizes:
        n = int(n)
        out[n] = acd_module_from_generators((n,) * d, np.minimum((ups * n).astype(np.int64), n - 1),
                                            np.minimum((np.array(downs) * n).astype(np.int64), n - 1), unit)
    return out


def random_rank_maximal_module(dims: Sequence[int], seed, max_dim: int = 3,
                               unit: float = 1.0) -> RankMaximalGridModule:
    """Dimension function whose superlevel sets are nested convex sets.

    Level k is the intersection of level k-1 with a fresh random up-set and
    down-set, which keeps it convex.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dims = tuple(int(n) for n in dims)
    M = int(rng.integers(0, max_dim + 1))
    dimfun = np.zeros(dims, np.int64)
    level = random_acd_module(dims, rng).mask
    for _ in range(M):
        dimfun += level
        # intersections of convex sets stay convex
        level = level & random_acd_module(dims, rng, max_gens=6).mask
    return RankMaximalGridModule(dims, dimfun, unit)


def grid_module_from_points(dims: Sequence[int], points, unit: float = 1.0) -> GridModule:
    mask = np.zeros(tuple(dims), bool)
    for p in points:
        mask[tuple(p)] = True
    return GridModule.from_mask(mask, unit)


def grid_box(dims: Sequence[int], lower: Sequence[int], upper: Sequence[int], unit: float = 1.0) -> GridModule:
    """Support [lower, upper] (inclusive box)."""
    return acd_module_from_generators(dims, [lower], [upper], unit)
