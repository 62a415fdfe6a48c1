"""Sweep-line erosion distance between thin convex modules on a lattice.

Fibers are the lattice lines in direction (1, ..., 1). The diagonal
projection

    pi(x, t) = (t - x_1, ..., t - x_{d-1})

sends every point of a fiber to the same base point v. Along each line of the
base space parallel to (1, ..., 1), a column x (with support interval
[lo_x, hi_x]) meets the fiber v exactly for v between pi(x, lo_x) and
pi(x, hi_x). The columns met by one fiber form a chain, so the fiber's slice
of the support is recovered from the smallest and largest active column:
t = v_1 + x_1.

Per fiber with V-slice [a, b] and W-slice [c, d], the contribution is the
largest tent value min(s - a, b - s) over lattice points s of [a, b] outside
[c, d] (and symmetrically). The distance is ``unit`` times the maximum.

Two implementations share these semantics: ``sweep_python`` mirrors the
plain event-list formulation with a sorted container as the active set, and
``_sweep_nb`` is a numba kernel whose active set is a segment tree over chain
positions (an ordered set on a bounded universe). Support intervals are
treated as half-open [lo, hi + 1) when scheduling removals.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Tuple

import numba
import numpy as np
from sortedcontainers import SortedList

from .grid import GridModule


# -- one-dimensional erosion ------------------------------------------------------------------


@numba.njit(cache=True)
def _tent_peak(a, b, l, r):
    # max of min(s - a, b - s) over integers s in [l, r], with [l, r] inside [a, b]
    best = -1
    for s in ((a + b) // 2, (a + b + 1) // 2):
        if s < l:
            s = l
        elif s > r:
            s = r
        v = min(s - a, b - s)
        if v > best:
            best = v
    return best


@numba.njit(cache=True)
def _erosion1d(a, b, c, d):
    """Largest tent value on [a, b] minus [c, d]; empty intervals have a > b or c > d."""
    if a > b:
        return 0
    if c > d or d < a or c > b:
        return _tent_peak(a, b, a, b)
    best = 0
    if c > a:
        best = max(best, _tent_peak(a, b, a, c - 1))
    if d < b:
        best = max(best, _tent_peak(a, b, d + 1, b))
    return best


def _erosion1d_scan(a, b, c, d):
    best = 0
    for s in range(a, b + 1):
        if c <= s <= d:
            continue
        best = max(best, min(s - a, b - s))
    return best


def erosion1d(a=None, b=None, c=None, d=None, scan: bool = False) -> int:
    """Maximum erosion, in lattice steps, of the 1-d support [a, b] minus [c, d].

    ``None`` marks an absent interval. ``scan=True`` evaluates every point
    instead of the O(1) closed form.
    """
    if a is None or b is None:
        a, b = 0, -1
    if c is None or d is None:
        c, d = 0, -1
    if scan:
        return _erosion1d_scan(int(a), int(b), int(c), int(d))
    return int(_erosion1d(int(a), int(b), int(c), int(d)))


@dataclass(frozen=True)
class FiberSlice:
    """Slices of two supports along one fiber, as last-coordinate intervals."""

    a: Optional[int] = None
    b: Optional[int] = None
    c: Optional[int] = None
    d: Optional[int] = None

    def erosion(self, scan: bool = False) -> int:
        return max(erosion1d(self.a, self.b, self.c, self.d, scan=scan),
                   erosion1d(self.c, self.d, self.a, self.b, scan=scan))


# -- reference implementation -----------------------------------------------------------------


def _pi(x: Tuple[int, ...], t: int) -> Tuple[int, ...]:
    return tuple(t - xi for xi in x)


def init_projected_sweep_list(M: GridModule):
    """Event lists keyed by base point: columns start at pi(x, lo), end at pi(x, hi + 1)."""
    start, end = defaultdict(list), defaultdict(list)
    for x, (lo, hi) in M.columns().items():
        start[_pi(x, lo)].append(x)
        end[_pi(x, hi + 1)].append(x)
    return start, end


def _update(active: SortedList, events, v) -> None:
    start, end = events
    for x in end.get(v, ()):
        active.remove(x)
    for x in start.get(v, ()):
        active.add(x)


def _reconstruct(active: SortedList, v) -> Tuple[Optional[int], Optional[int]]:
    if not active:
        return None, None
    return v[0] + active[0][0], v[0] + active[-1][0]


def iter_fiber_slices(V: GridModule, W: GridModule) -> Iterator[Tuple[Tuple[int, ...], FiberSlice]]:
    """Yield (base point, slices) for every fiber meeting either support, in sweep order."""
    if V.ndim == 1:
        yield (), FiberSlice(*(V.column(()) or (None, None)), *(W.column(()) or (None, None)))
        return
    ev_v = init_projected_sweep_list(V)
    ev_w = init_projected_sweep_list(W)
    # lines of the base space parallel to (1,...,1), keyed by v - v_1 * (1,...,1)
    first, last = {}, {}
    for starts, ends in (ev_v, ev_w):
        for key in starts:
            shape = tuple(k - key[0] for k in key)
            first[shape] = min(first.get(shape, key[0]), key[0])
        for key in ends:
            shape = tuple(k - key[0] for k in key)
            last[shape] = max(last.get(shape, key[0]), key[0])
    for shape in sorted(first):
        S_v, S_w = SortedList(), SortedList()
        # every column has ended by the last end event, so stop just before it
        for v1 in range(first[shape], last[shape]):
            v = tuple(v1 + s for s in shape)
            _update(S_v, ev_v, v)
            _update(S_w, ev_w, v)
            if not S_v and not S_w:
                continue
            a, b = _reconstruct(S_v, v)
            c, d = _reconstruct(S_w, v)
            yield v, FiberSlice(a, b, c, d)


def sweep_python(V: GridModule, W: GridModule, scan: bool = False) -> int:
    """Erosion distance in lattice steps, reference sweep."""
    ans = 0
    for _, fs in iter_fiber_slices(V, W):
        ans = max(ans, fs.erosion(scan=scan))
    return ans


# -- numba implementation ---------------------------------------------------------------------


@lru_cache(maxsize=64)
def fiber_geometry(dims: Tuple[int, ...]):
    """Chain decomposition of the column index space [n_1] x ... x [n_{d-1}].

    Columns x and y lie on a common fiber line iff they differ by a multiple
    of (1, ..., 1). Returns (class_ptr, class_cols, class_len, pos) where the
    columns of class c are class_cols[class_ptr[c]:class_ptr[c+1]], ordered by
    chain position pos = min_i x_i.
    """
    base = dims[:-1]
    if len(base) == 0:
        idx = np.zeros((1, 0), np.int64)
    else:
        idx = np.indices(base).reshape(len(base), -1).T.astype(np.int64)
    pos = idx.min(axis=1) if idx.shape[1] else np.zeros(len(idx), np.int64)
    origin = idx - pos[:, None]
    _, cls = np.unique(origin, axis=0, return_inverse=True)
    cls = np.asarray(cls).reshape(-1)
    order = np.lexsort((pos, cls))
    counts = np.bincount(cls)
    class_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    class_len = counts.astype(np.int64)
    for arr in (class_ptr, order, class_len, pos):
        arr.setflags(write=False)
    return class_ptr, order.astype(np.int64), class_len, pos.astype(np.int64)


@numba.njit(cache=True)
def _tree_set(tree, size, i, val):
    k = size + i
    tree[k] = val
    k //= 2
    while k >= 1:
        tree[k] = tree[2 * k] + tree[2 * k + 1]
        k //= 2


@numba.njit(cache=True)
def _tree_min(tree, size):
    k = 1
    while k < size:
        k = 2 * k if tree[2 * k] > 0 else 2 * k + 1
    return k - size


@numba.njit(cache=True)
def _tree_max(tree, size):
    k = 1
    while k < size:
        k = 2 * k + 1 if tree[2 * k + 1] > 0 else 2 * k
    return k - size


@numba.njit(cache=True)
def _sweep_nb(one_dim, n_last, class_ptr, class_cols, class_len, pos, loV, hiV, loW, hiW):
    if one_dim:
        # a single fiber: the whole line
        return max(_erosion1d(loV[0], hiV[0], loW[0], hiW[0]), _erosion1d(loW[0], hiW[0], loV[0], hiV[0]))
    ans = 0
    max_len = 1
    for c in range(len(class_len)):
        if class_len[c] > max_len:
            max_len = class_len[c]
    size = 1
    while size < max_len:
        size *= 2
    tree_v = np.zeros(2 * size, np.int64)
    tree_w = np.zeros(2 * size, np.int64)
    for c in range(len(class_len)):
        p0 = class_ptr[c]
        p1 = class_ptr[c + 1]
        L = p1 - p0
        # u = t - pos indexes fibers met by this chain: u in [-(L-1), n_last - 1]
        u_lo = -(L - 1)
        n_u = L - 1 + n_last + 1
        # bucket starts and ends by u (ends at hi + 1, half-open)
        head_sv = -np.ones(n_u + 1, np.int64)
        head_ev = -np.ones(n_u + 1, np.int64)
        head_sw = -np.ones(n_u + 1, np.int64)
        head_ew = -np.ones(n_u + 1, np.int64)
        nxt_sv = np.empty(L, np.int64)
        nxt_ev = np.empty(L, np.int64)
        nxt_sw = np.empty(L, np.int64)
        nxt_ew = np.empty(L, np.int64)
        first = n_u + 1
        last = -1
        for q in range(L):
            col = class_cols[p0 + q]
            p = pos[col]
            if loV[col] <= hiV[col]:
                s = loV[col] - p - u_lo
                e = hiV[col] + 1 - p - u_lo
                nxt_sv[q] = head_sv[s]
                head_sv[s] = q
                nxt_ev[q] = head_ev[e]
                head_ev[e] = q
                first = min(first, s)
                last = max(last, e)
            if loW[col] <= hiW[col]:
                s = loW[col] - p - u_lo
                e = hiW[col] + 1 - p - u_lo
                nxt_sw[q] = head_sw[s]
                head_sw[s] = q
                nxt_ew[q] = head_ew[e]
                head_ew[e] = q
                first = min(first, s)
                last = max(last, e)
        nv = 0
        nw = 0
        for k in range(first, last + 1):
            q = head_ev[k]
            while q >= 0:
                _tree_set(tree_v, size, q, 0)
                nv -= 1
                q = nxt_ev[q]
            q = head_ew[k]
            while q >= 0:
                _tree_set(tree_w, size, q, 0)
                nw -= 1
                q = nxt_ew[q]
            q = head_sv[k]
            while q >= 0:
                _tree_set(tree_v, size, q, 1)
                nv += 1
                q = nxt_sv[q]
            q = head_sw[k]
            while q >= 0:
                _tree_set(tree_w, size, q, 1)
                nw += 1
                q = nxt_sw[q]
            if nv == 0 and nw == 0:
                continue
            u = k + u_lo
            a, b, cc, dd = 0, -1, 0, -1
            if nv > 0:
                a = u + pos[class_cols[p0 + _tree_min(tree_v, size)]]
                b = u + pos[class_cols[p0 + _tree_max(tree_v, size)]]
            if nw > 0:
                cc = u + pos[class_cols[p0 + _tree_min(tree_w, size)]]
                dd = u + pos[class_cols[p0 + _tree_max(tree_w, size)]]
            x = max(_erosion1d(a, b, cc, dd), _erosion1d(cc, dd, a, b))
            if x > ans:
                ans = x
    return ans


@numba.njit(cache=True)
def _sweep_matrix_nb(one_dim, n_last, class_ptr, class_cols, class_len, pos, loA, hiA, loB, hiB, symmetric):
    out = np.zeros((loA.shape[0], loB.shape[0]), np.int64)
    for i in range(loA.shape[0]):
        j0 = i + 1 if symmetric else 0
        for j in range(j0, loB.shape[0]):
            out[i, j] = _sweep_nb(one_dim, n_last, class_ptr, class_cols, class_len, pos,
                                  loA[i], hiA[i], loB[j], hiB[j])
            if symmetric:
                out[j, i] = out[i, j]
    return out


def sweep_numba(V: GridModule, W: GridModule) -> int:
    class_ptr, class_cols, class_len, pos = fiber_geometry(V.dims)
    return int(_sweep_nb(V.ndim == 1, V.dims[-1], class_ptr, class_cols, class_len, pos,
                         V.lo.reshape(-1), V.hi.reshape(-1), W.lo.reshape(-1), W.hi.reshape(-1)))


def sweep_matrix(dims, loA, hiA, loB, hiB, symmetric: bool = False) -> np.ndarray:
    """All-pairs sweep distances (lattice steps) between stacked column arrays.

    ``loA``/``hiA`` have shape (m, C) with C the number of columns of ``dims``.
    """
    class_ptr, class_cols, class_len, pos = fiber_geometry(tuple(dims))
    return _sweep_matrix_nb(len(dims) == 1, int(dims[-1]), class_ptr, class_cols, class_len, pos,
                            np.ascontiguousarray(loA, np.int64), np.ascontiguousarray(hiA, np.int64),
                            np.ascontiguousarray(loB, np.int64), np.ascontiguousarray(hiB, np.int64),
                            symmetric)
