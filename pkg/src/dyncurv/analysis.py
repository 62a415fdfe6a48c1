"""Single-linkage clustering, classical MDS and the repeated 1-NN protocol."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .persistence_set import DistanceMatrix


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, DistanceMatrix) else np.asarray(m, dtype=np.float64)


# -- single linkage ---------------------------------------------------------------------------


@dataclass
class Dendrogram:
    """Merges in order; cluster ids < N are leaves, merge i creates id N + i."""

    labels: List[str]
    merges: List[Tuple[int, int, float, int]]  # (cluster_a, cluster_b, height, size)

    @property
    def heights(self) -> np.ndarray:
        return np.array([h for _, _, h, _ in self.merges])

    def linkage_matrix(self) -> np.ndarray:
        return np.array([[a, b, h, s] for a, b, h, s in self.merges], dtype=np.float64).reshape(-1, 4)

    def to_json(self) -> dict:
        return {"labels": self.labels,
                "merges": [{"a": a, "b": b, "height": h, "size": s} for a, b, h, s in self.merges]}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")


def minimum_spanning_tree(D: np.ndarray) -> List[Tuple[float, int, int]]:
    """Prim's algorithm on a dense matrix; edges (weight, u, v) in insertion order."""
    n = len(D)
    if n == 0:
        return []
    in_tree = np.zeros(n, bool)
    in_tree[0] = True
    best = D[0].astype(np.float64).copy()
    parent = np.zeros(n, np.int64)
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        edges.append((float(best[v]), int(parent[v]), v))
        in_tree[v] = True
        closer = D[v] < best
        parent = np.where(closer & ~in_tree, v, parent)
        best = np.where(closer & ~in_tree, D[v], best)
    return edges


def single_linkage(m) -> Dendrogram:
    D = _values(m)
    n = len(D)
    labels = m.labels if isinstance(m, DistanceMatrix) else [str(i) for i in range(n)]
    edges = sorted(minimum_spanning_tree(D), key=lambda e: (e[0], min(e[1], e[2]), max(e[1], e[2])))
    parent = list(range(n))
    cluster_id = list(range(n))
    size = [1] * n

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    merges = []
    for h, u, v in edges:
        ru, rv = find(u), find(v)
        a, b = sorted((cluster_id[ru], cluster_id[rv]))
        parent[rv] = ru
        size[ru] += size[rv]
        cluster_id[ru] = n + len(merges)
        merges.append((a, b, h, size[ru]))
    return Dendrogram(list(labels), merges)


# -- classical MDS ----------------------------------------------------------------------------


def jacobi_eigh(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors as columns, sweeps used). Stops when
    the off-diagonal Frobenius norm falls below ``tol`` times the matrix norm.
    """
    A = np.array(A, dtype=np.float64)
    n = len(A)
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1e-300)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta != 0 else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V, sweeps


@dataclass
class MdsEmbedding:
    labels: List[str]
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    clipped_negative: bool = False
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["label,x,y"] if self.coordinates.shape[1] == 2 else \
            ["label," + ",".join(f"x{i}" for i in range(self.coordinates.shape[1]))]
        for lab, row in zip(self.labels, self.coordinates):
            lines.append(",".join([lab] + [f"{v:.12g}" for v in row]))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv())


def classical_mds(m, dim: int = 2) -> MdsEmbedding:
    D = _values(m)
    n = len(D)
    labels = m.labels if isinstance(m, DistanceMatrix) else [str(i) for i in range(n)]
    J = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * J @ (D * D) @ J
    B = (B + B.T) / 2
    w, V, sweeps = jacobi_eigh(B)
    order = np.argsort(-w, kind="stable")[:dim]
    w, V = w[order], V[:, order]
    # deterministic sign: largest-magnitude component positive
    for c in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, c])))
        if V[i, c] < 0:
            V[:, c] = -V[:, c]
    clipped = bool(np.any(w < 0))
    coords = V * np.sqrt(np.maximum(w, 0.0))
    if coords.shape[1] < dim:
        coords = np.hstack([coords, np.zeros((n, dim - coords.shape[1]))])
        w = np.concatenate([w, np.zeros(dim - len(w))])
    return MdsEmbedding(list(labels), coords, w, clipped, {"jacobi_sweeps": sweeps})


# -- 1-NN protocol ----------------------------------------------------------------------------


def one_nn_protocol(m, labels: Sequence, trials: int, seed) -> float:
    """Mean 1-NN accuracy with one random representative per class per trial.

    Non-representatives take the class of their nearest representative;
    ties go to the representative with the lowest row index.
    """
    D = _values(m)
    y = np.asarray([str(v) for v in labels])
    if len(y) != len(D):
        raise ValueError("one label per row required")
    classes, y_idx, counts = np.unique(y, return_inverse=True, return_counts=True)
    if np.any(counts < 2):
        raise ValueError(f"every class needs at least 2 members: {dict(zip(classes, counts))}")
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    members = [np.nonzero(y_idx == c)[0] for c in range(len(classes))]
    reps = np.stack([mem[rng.integers(len(mem), size=trials)] for mem in members], axis=1)
    reps.sort(axis=1)  # lowest row index first, so argmin breaks ties toward it
    n = len(D)
    d_to_reps = D[:, reps]                         # (n, trials, C)
    nearest = reps[np.arange(trials)[None, :], np.argmin(d_to_reps, axis=2)]  # (n, trials)
    wrong = y_idx[nearest] != y_idx[:, None]
    is_rep = np.zeros((n, trials), bool)
    is_rep[reps.T, np.arange(trials)[None, :]] = True
    err = (wrong & ~is_rep).sum(axis=0) / (~is_rep).sum(axis=0)
    return float(1.0 - err.mean())
