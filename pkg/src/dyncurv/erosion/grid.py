"""Column-stored supports of convex modules over the lattice [n_1] x ... x [n_d]."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np


class ValidationError(ValueError):
    """A module violates a structural precondition (convexity, superlevel intervals)."""


def up_closure(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    for ax in range(mask.ndim):
        out = np.logical_or.accumulate(out, axis=ax)
    return out


def down_closure(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    for ax in range(mask.ndim):
        out = np.flip(np.logical_or.accumulate(np.flip(out, axis=ax), axis=ax), axis=ax)
    return out


def is_convex(mask: np.ndarray) -> bool:
    """Product-order convexity of a boolean lattice subset.

    A point lies between two members iff it is in both the up- and the
    down-closure, so the set is convex iff it equals their intersection.
    """
    mask = np.asarray(mask, dtype=bool)
    return bool(np.array_equal(up_closure(mask) & down_closure(mask), mask))


def columns_from_mask(mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-column (lo, hi) along the last axis; empty columns get lo=0, hi=-1.

    Raises ValidationError if some column is not contiguous.
    """
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[-1]
    present = mask.any(axis=-1)
    lo = np.where(present, mask.argmax(axis=-1), 0)
    hi = np.where(present, n - 1 - np.flip(mask, axis=-1).argmax(axis=-1), -1)
    counts = mask.sum(axis=-1)
    if np.any(counts != np.where(present, hi - lo + 1, 0)):
        raise ValidationError("support is not an interval in some column")
    return lo.astype(np.int64), hi.astype(np.int64)


@dataclass(frozen=True, eq=False)
class GridModule:
    """Support of a thin convex module over a finite product lattice.

    ``lo`` and ``hi`` have shape ``dims[:-1]``; column x holds the points
    (x, t) with lo[x] <= t <= hi[x] and is empty when lo[x] > hi[x].
    ``unit`` is the physical length of one lattice step.
    """

    dims: Tuple[int, ...]
    lo: np.ndarray
    hi: np.ndarray
    unit: float = 1.0

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1 or any(n < 1 for n in dims):
            raise ValueError(f"dims must be positive, got {dims}")
        lo = np.array(self.lo, dtype=np.int64).reshape(dims[:-1])
        hi = np.array(self.hi, dtype=np.int64).reshape(dims[:-1])
        present = lo <= hi
        lo = np.where(present, lo, 0)
        hi = np.where(present, hi, -1)
        if np.any(present & ((lo < 0) | (hi >= dims[-1]))):
            raise ValueError("column interval outside the lattice")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def empty(cls, dims: Sequence[int], unit: float = 1.0) -> "GridModule":
        shape = tuple(dims[:-1])
        return cls(tuple(dims), np.zeros(shape, np.int64), -np.ones(shape, np.int64), unit)

    @classmethod
    def from_mask(cls, mask: np.ndarray, unit: float = 1.0, validate: bool = True) -> "GridModule":
        mask = np.asarray(mask, dtype=bool)
        if validate and not is_convex(mask):
            raise ValidationError("support is not convex")
        lo, hi = columns_from_mask(mask)
        return cls(mask.shape, lo, hi, unit)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def present(self) -> np.ndarray:
        return self.lo <= self.hi

    def column(self, x) -> Optional[Tuple[int, int]]:
        x = tuple(x)
        if self.lo[x] > self.hi[x]:
            return None
        return int(self.lo[x]), int(self.hi[x])

    def columns(self) -> Dict[Tuple[int, ...], Tuple[int, int]]:
        # ndindex also covers the 0-d base of a 1-d lattice
        return {x: (int(self.lo[x]), int(self.hi[x]))
                for x in np.ndindex(self.lo.shape) if self.lo[x] <= self.hi[x]}

    @cached_property
    def mask(self) -> np.ndarray:
        t = np.arange(self.dims[-1])
        m = (t >= self.lo[..., None]) & (t <= self.hi[..., None])
        m.setflags(write=False)
        return m

    def __contains__(self, p) -> bool:
        p = tuple(int(v) for v in p)
        if any(not 0 <= v < n for v, n in zip(p, self.dims)):
            return False
        return bool(self.lo[p[:-1]] <= p[-1] <= self.hi[p[:-1]])

    def is_empty(self) -> bool:
        return not self.present.any()

    def validate(self) -> "GridModule":
        if not is_convex(self.mask):
            raise ValidationError("support is not convex")
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridModule):
            return NotImplemented
        return (self.dims == other.dims and self.unit == other.unit
                and np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi))

    def to_json(self) -> dict:
        cols = [list(x) + [lo, hi] for x, (lo, hi) in sorted(self.columns().items())]
        return {"dims": list(self.dims), "unit": self.unit, "columns": cols}

    @classmethod
    def from_json(cls, obj: dict) -> "GridModule":
        dims = tuple(int(n) for n in obj["dims"])
        lo = np.zeros(dims[:-1], np.int64)
        hi = np.full(dims[:-1], -1, np.int64)
        for row in obj["columns"]:
            x = tuple(int(v) for v in row[:-2])
            lo[x], hi[x] = int(row[-2]), int(row[-1])
        return cls(dims, lo, hi, float(obj.get("unit", 1.0)))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")


@dataclass(frozen=True, eq=False)
class RankMaximalGridModule:
    """Pointwise dimension function of a rank-maximal module on a lattice.

    Rank-maximality (rank(p <= q) = min(dim p, dim q)) is an input contract;
    what can be checked is that every superlevel set is convex, which is
    what the distance computation relies on.
    """

    dims: Tuple[int, ...]
    dimfun: np.ndarray
    unit: float = 1.0

    def __post_init__(self):
        dimfun = np.array(self.dimfun, dtype=np.int64)
        object.__setattr__(self, "dims", tuple(int(n) for n in dimfun.shape))
        if (dimfun < 0).any():
            raise ValidationError("dimensions must be nonnegative")
        dimfun.setflags(write=False)
        object.__setattr__(self, "dimfun", dimfun)

    @property
    def max_dim(self) -> int:
        return int(self.dimfun.max(initial=0))

    @cached_property
    def level_columns(self) -> Tuple[np.ndarray, np.ndarray]:
        """(lo, hi) arrays of shape (M, *dims[:-1]) for levels 1..M.

        Raises ValidationError if a superlevel column is not an interval.
        """
        M = self.max_dim
        shape = (M,) + self.dims[:-1]
        lo = np.zeros(shape, np.int64)
        hi = -np.ones(shape, np.int64)
        for level in range(1, M + 1):
            lo[level - 1], hi[level - 1] = columns_from_mask(self.dimfun >= level)
        return lo, hi

    def superlevel(self, level: int) -> GridModule:
        lo, hi = self.level_columns
        if level > self.max_dim:
            return GridModule.empty(self.dims, self.unit)
        return GridModule(self.dims, lo[level - 1], hi[level - 1], self.unit)

    def validate(self) -> "RankMaximalGridModule":
        self.level_columns
        for level in range(1, self.max_dim + 1):
            if not is_convex(self.dimfun >= level):
                raise ValidationError(f"superlevel {level} is not convex")
        return self


def iter_points(mask: np.ndarray) -> Iterator[Tuple[int, ...]]:
    for p in zip(*np.nonzero(mask)):
        yield tuple(int(v) for v in p)
