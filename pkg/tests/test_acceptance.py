"""Acceptance checks, one per criterion, each recording a PASS/FAIL line.

Run with pytest (lines appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import itertools
import json
import math
import sys
import time
import timeit
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import SQRT2, random_dms, rhombus_matrix, square_matrix  # noqa: E402
from dyncurv import pipeline  # noqa: E402
from dyncurv.config import load_config  # noqa: E402
from dyncurv.dms import DynamicMetricSpace, TimeGrid, perturb  # noqa: E402
from dyncurv.dynmodule import DynGrid, build_dyn_module, decompose, dyn_leq, verify_acd  # noqa: E402
from dyncurv.erosion import (GridModule, dilated_acd_modules, erosion_distance, erosion_distance_oracle,  # noqa: E402
                             erosion_distance_rank_maximal, random_acd_module, random_rank_maximal_module)
from dyncurv.persistence_set import DistanceMatrix, exhaustive_persistence_set, hausdorff_erosion  # noqa: E402
from dyncurv.rips import is_cross_polytope, rips_diagram_small  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
RESULTS = {}


def record(n, ok, detail):
    RESULTS[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    return ok


# 1 -------------------------------------------------------------------------------------------

def test_criterion_01_sweep_equals_oracle():
    t0 = time.perf_counter()
    mismatches = 0
    counts = {}
    for dims, n_pairs, seed in (((12, 12), 1000, 101), ((8, 8, 8), 300, 202)):
        rng = np.random.default_rng(seed)
        for _ in range(n_pairs):
            V, W = random_acd_module(dims, rng), random_acd_module(dims, rng)
            mismatches += erosion_distance(V, W) != erosion_distance_oracle(V, W)
        counts["x".join(map(str, dims))] = n_pairs
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 300
    assert record(1, ok, f"pairs {counts}, mismatches {mismatches}, {elapsed:.1f}s (limit 300s)")


# 2 -------------------------------------------------------------------------------------------

def test_criterion_02_square_and_rhombus():
    sq = rips_diagram_small(square_matrix(), 1)
    rh = rips_diagram_small(rhombus_matrix(), 1)
    ok = (not sq.empty and abs(sq.point[0] - 1) <= 1e-12 and abs(sq.point[1] - SQRT2) <= 1e-12
          and rh.empty)
    assert record(2, ok, f"square {sq.point}, rhombus {'empty' if rh.empty else rh.point}")


# 3 -------------------------------------------------------------------------------------------

def _random_semimetric(rng, n):
    d = rng.uniform(0, 1, size=(n, n))
    if rng.random() < 0.5:
        d = np.round(d, 1)  # ties
    d = np.triu(d, 1)
    return d + d.T


def test_criterion_03_single_point_diagrams():
    rng = np.random.default_rng(303)
    bad, nonempty = 0, {}
    for k in (0, 1, 2):
        nonempty[k] = 0
        for _ in range(10_000):
            d = _random_semimetric(rng, 2 * k + 2)
            dgm = rips_diagram_small(d, k)  # asserts internally on >1 point
            if len(dgm) > 1:
                bad += 1
            if dgm.empty:
                continue
            nonempty[k] += 1
            b, dd = dgm.point
            scales = [b, (b + dd) / 2] + [s for s in np.unique(d) if b <= s < dd]
            bad += sum(not is_cross_polytope(d, k, s) for s in scales)
    assert record(3, bad == 0, f"3 x 10^4 spaces, nonempty per k {nonempty}, violations {bad}")


# 4 -------------------------------------------------------------------------------------------

def _dyn_points(T, S):
    return np.array([(i, j, m) for i in range(T) for j in range(i, T) for m in range(S)])


def _triple_convex(M):
    """Every Dyn grid point between two support points is in the support (Dyn order, no embedding)."""
    G = _dyn_points(M.grid.T, M.grid.S)
    P = M.support_points()
    if len(P) == 0:
        return True
    # leq[a, b]: a <= b in Dyn
    def leq(A, B):
        return ((B[None, :, 0] <= A[:, None, 0]) & (A[:, None, 1] <= B[None, :, 1])
                & (A[:, None, 2] <= B[None, :, 2]))
    above = leq(P, G).any(axis=0)   # some support point below q
    below = leq(G, P).any(axis=1)   # some support point above q
    between = G[above & below]
    return bool(M.mask[tuple(between.T)].all())


def test_criterion_04_convexity_and_acd():
    rng = np.random.default_rng(404)
    failures = 0
    for n in range(500):
        k = n % 2
        T = int(rng.integers(3, 7))
        D = random_dms(rng, 2 * k + 2, T, step=1.0, scale=8.0)
        M = build_dyn_module(D, k, DynGrid(D.time_grid, 9))
        failures += not (_triple_convex(M) and verify_acd(decompose(M)))
    assert record(4, failures == 0, f"500 modules, failures {failures}")


# 5 -------------------------------------------------------------------------------------------

def sine_pair(step=math.pi / 8, t_end=4 * math.pi):
    t = np.arange(0.0, t_end + 1e-9, step)
    x = np.stack([np.full_like(t, -2.0), np.sin(t), np.full_like(t, 2.0)], axis=1)
    y = np.stack([np.full_like(t, -2.0), np.abs(np.sin(t)), np.full_like(t, 2.0)], axis=1)
    grid = TimeGrid(0.0, step, len(t))

    def line_dms(coords):
        return DynamicMetricSpace(["p1", "p2", "p3"], grid,
                                  distances=np.abs(coords[:, :, None] - coords[:, None, :]))

    return line_dms(x), line_dms(y)


def test_criterion_05_pointwise_isometric_but_distinguished():
    X, Y = sine_pair()
    iu = np.triu_indices(3, 1)
    mx = np.sort(X.distances[:, iu[0], iu[1]], axis=1)
    my = np.sort(Y.distances[:, iu[0], iu[1]], axis=1)
    iso_err = float(np.abs(mx - my).max())
    grid = DynGrid(X.time_grid, 12)
    A = exhaustive_persistence_set(X, 0, grid)
    B = exhaustive_persistence_set(Y, 0, grid)
    d = hausdorff_erosion(A, B)
    ok = iso_err <= 1e-12 and d > 0
    assert record(5, ok, f"multiset mismatch {iso_err:.1e}, d_H = {d:.6g} (grid step {grid.step:.4g})")


# 6 -------------------------------------------------------------------------------------------

def test_criterion_06_stability_under_perturbation():
    rng = np.random.default_rng(606)
    h = 1.0
    worst, violations = 0.0, 0
    for n in range(50):
        D = random_dms(rng, int(rng.integers(4, 7)), int(rng.integers(4, 8)), step=h, scale=10.0)
        grid = DynGrid(D.time_grid, 12)
        for frac in (0.1, 0.5, 1.0):
            delta = frac * h
            P = perturb(D, delta, seed=n * 10 + int(frac * 10))
            for k in (0, 1):
                if D.n_points < 2 * k + 2:
                    continue
                d = hausdorff_erosion(exhaustive_persistence_set(D, k, grid),
                                      exhaustive_persistence_set(P, k, grid))
                worst = max(worst, d - delta)
                violations += d > delta + h
    assert record(6, violations == 0, f"50 spaces x 3 magnitudes x k in {{0,1}}, violations {violations}, "
                                      f"max(d_H - delta) = {worst:.3g} <= h = {h}")


# 7 -------------------------------------------------------------------------------------------

def _superlevel_oracle(V, W):
    M = max(V.max_dim, W.max_dim)
    best = 0.0
    for level in range(1, M + 1):
        a = GridModule.from_mask(V.dimfun >= level)
        b = GridModule.from_mask(W.dimfun >= level)
        best = max(best, erosion_distance_oracle(a, b))
    return best


def test_criterion_07_rank_maximal():
    rng = np.random.default_rng(707)
    mismatches, levels = 0, []
    for _ in range(200):
        V = random_rank_maximal_module((10, 10), rng, max_dim=4)
        W = random_rank_maximal_module((10, 10), rng, max_dim=4)
        levels.append(max(V.max_dim, W.max_dim))
        mismatches += erosion_distance_rank_maximal(V, W) != _superlevel_oracle(V, W)
    assert record(7, mismatches == 0, f"200 instances, levels used up to {max(levels)}, mismatches {mismatches}")


# 8 -------------------------------------------------------------------------------------------

def _time(fn, number, repeat=7):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _scaling(sizes, timer, shapes=6, seed=808):
    """Total time over fixed shapes dilated to each size, so only the resolution varies."""
    rng = np.random.default_rng(seed)
    fam = [(dilated_acd_modules(sizes, 2, rng, max_gens=8), dilated_acd_modules(sizes, 2, rng, max_gens=8))
           for _ in range(shapes)]
    totals = [sum(timer(A[n], B[n]) for A, B in fam) for n in sizes]
    return [b / a for a, b in zip(totals, totals[1:])]


def test_criterion_08_sweep_scaling():
    def sweep(V, W):
        erosion_distance(V, W, validate=False)
        return _time(lambda: erosion_distance(V, W, validate=False), number=20)

    ratios = _scaling((256, 512, 1024, 2048), sweep)
    o_ratios = _scaling((8, 16, 32), lambda V, W: _time(lambda: erosion_distance_oracle(V, W, budget=10**7),
                                                        number=1, repeat=3))
    ok = max(ratios) <= 3.0 and min(o_ratios) >= 3.5
    assert record(8, ok, "sweep n=256..2048 ratios " + ", ".join(f"{r:.2f}" for r in ratios)
                  + "; oracle n=8..32 ratios " + ", ".join(f"{r:.1f}" for r in o_ratios))


# 9 and 10 ------------------------------------------------------------------------------------

CHANCE = 0.2


def desk_sigma(cfg):
    # one trial classifies every non-representative flock; binomial spread at chance level
    n_test = len(cfg.presets) * (cfg.flocks_per_preset - 1)
    return math.sqrt(CHANCE * (1 - CHANCE) / n_test)


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("desk")
    runs = {}
    for threads in (1, 4, 8):
        out = base / f"threads{threads}"
        cfg = load_config(ROOT / "configs" / "desk.json",
                          [f"output_dir={json.dumps(str(out))}", f"thread_count={threads}"])
        t0 = time.perf_counter()
        pipeline.run_all(cfg)
        runs[threads] = (cfg, out, time.perf_counter() - t0)
    return runs


def test_criterion_09_desk_experiment(desk_runs):
    cfg, out, elapsed = desk_runs[1]
    report = json.loads((out / "analysis" / "nn_report.json").read_text())
    acc = report["accuracy"]
    sigma = desk_sigma(cfg)
    se = math.sqrt(acc * (1 - acc) / (report["trials"] * len(cfg.presets) * (cfg.flocks_per_preset - 1)))
    ok = elapsed < 1800 and acc > CHANCE + 3 * sigma
    assert record(9, ok, f"accuracy {acc:.4f} vs threshold {CHANCE + 3 * sigma:.4f} "
                         f"(chance 0.2 + 3 x {sigma:.4f}); naive trial s.e. {se:.4f}; runtime {elapsed:.0f}s")


def test_criterion_10_determinism_across_threads(desk_runs):
    rels = ["matrices/distances_k0.csv", "matrices/distances_k1.csv", "matrices/distances.csv",
            "analysis/nn_report.json", "analysis/dendrogram.json", "analysis/mds.csv"]
    base = desk_runs[1][1]
    diffs = [f"{t}:{r}" for t in (4, 8) for r in rels
             if (desk_runs[t][1] / r).read_bytes() != (base / r).read_bytes()]
    m = DistanceMatrix.load(base / "matrices" / "distances.csv")
    assert record(10, not diffs, f"threads 1/4/8 byte-identical over {len(rels)} artifacts, "
                                 f"differences {diffs or 'none'}; {len(m.labels)} flocks")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
