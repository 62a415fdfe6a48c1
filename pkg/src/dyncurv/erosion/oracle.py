"""Brute-force erosion distance over all segments p <= q of a small lattice.

For each segment the threshold is the least integer eps >= 0 such that, at
thickening eps + 1,

    rank_V(p - (eps+1), q + (eps+1)) <= rank_W(p, q)   and symmetrically,

where a thickened segment leaving the lattice has rank 0. The distance is
``unit`` times the largest threshold. Rank functions are evaluated directly
from the supports, independently of the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import GridModule, RankMaximalGridModule


class ResourceBudgetError(RuntimeError):
    """The brute-force computation would exceed its segment budget."""


DEFAULT_BUDGET = 2_000_000

Module = Union[GridModule, RankMaximalGridModule]


@dataclass
class SegmentDetails:
    p: np.ndarray          # (m, d) lower endpoints
    q: np.ndarray          # (m, d) upper endpoints
    rank_v: np.ndarray     # (m,)
    rank_w: np.ndarray
    threshold: np.ndarray  # (m,) lattice steps


def segment_count(dims) -> int:
    out = 1
    for n in dims:
        out *= n * (n + 1) // 2
    return out


def _segments(dims):
    per_axis = [np.array(np.triu_indices(n)) for n in dims]  # (2, n(n+1)/2) each
    grids = np.meshgrid(*[np.arange(a.shape[1]) for a in per_axis], indexing="ij")
    p = np.stack([per_axis[k][0][g.reshape(-1)] for k, g in enumerate(grids)], axis=1)
    q = np.stack([per_axis[k][1][g.reshape(-1)] for k, g in enumerate(grids)], axis=1)
    return p.astype(np.int64), q.astype(np.int64)


def _pointwise(M: Module) -> np.ndarray:
    if isinstance(M, RankMaximalGridModule):
        return M.dimfun
    return M.mask.astype(np.int64)


def _rank(M: Module, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    dims = np.array(M.dims)
    inside = np.all((p >= 0) & (q < dims), axis=1)
    vals = _pointwise(M)
    pc = np.clip(p, 0, dims - 1)
    qc = np.clip(q, 0, dims - 1)
    vp = vals[tuple(pc.T)]
    vq = vals[tuple(qc.T)]
    if isinstance(M, RankMaximalGridModule):
        r = np.minimum(vp, vq)
    else:
        # thin convex support: the segment map is the identity iff both ends are present
        r = vp & vq
    return np.where(inside, r, 0)


def erosion_distance_oracle(V: Module, W: Module, budget: int = DEFAULT_BUDGET,
                            return_details: bool = False):
    if V.dims != W.dims:
        raise ValueError(f"lattice mismatch: {V.dims} vs {W.dims}")
    if V.unit != W.unit:
        raise ValueError(f"unit mismatch: {V.unit} vs {W.unit}")
    m = segment_count(V.dims)
    if m > budget:
        raise ResourceBudgetError(f"{m} segments exceed the budget of {budget}")
    p, q = _segments(V.dims)
    rv = _rank(V, p, q)
    rw = _rank(W, p, q)
    thr = np.full(len(p), -1, np.int64)
    # past max(dims) every thickened segment leaves the lattice, so all resolve by then
    for eps in range(0, max(V.dims) + 1):
        open_ = thr < 0
        if not open_.any():
            break
        pe, qe = p[open_] - (eps + 1), q[open_] + (eps + 1)
        ok = (_rank(V, pe, qe) <= rw[open_]) & (_rank(W, pe, qe) <= rv[open_])
        idx = np.nonzero(open_)[0][ok]
        thr[idx] = eps
    assert (thr >= 0).all()
    dist = V.unit * float(thr.max(initial=0))
    if return_details:
        return dist, SegmentDetails(p, q, rv, rw, thr)
    return dist
