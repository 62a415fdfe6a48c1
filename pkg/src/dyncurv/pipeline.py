"""simulate -> sample -> build -> reduce -> distance matrices -> analysis.

Every random choice draws from a seed derived from the master seed and a
key path (``derive_seed(master, stage, flock label, k)``), and every parallel
stage uses an order-preserving map, so artifacts do not depend on the
worker count.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .analysis import classical_mds, one_nn_protocol, single_linkage
from .boids import presets, simulate
from .config import ExperimentConfig
from .dms import load_dms, save_dms, subsample_times
from .dynmodule import DynGrid
from .parallel import ordered_map
from .persistence_set import (DistanceMatrix, PersistenceSet, combine_max, hausdorff_erosion,
                              kcenter_reduce, sample_persistence_set)
from .rng import derive_seed


def flock_labels(cfg: ExperimentConfig) -> List[Tuple[str, str, int]]:
    """(label, preset, flock index) in output order."""
    return [(f"{p}_{f}", p, f) for p in cfg.presets for f in range(cfg.flocks_per_preset)]


def _paths(cfg: ExperimentConfig) -> Dict[str, Path]:
    out = Path(cfg.output_dir)
    return {"root": out, "flocks": out / "flocks", "matrices": out / "matrices", "analysis": out / "analysis"}


def _simulate_job(args):
    label, params, path = args
    save_dms(simulate(params), path)
    return label


def cmd_simulate(cfg: ExperimentConfig) -> List[Path]:
    paths = _paths(cfg)
    table = {p.name: p.params for p in presets(n_boids=cfg.n_boids, torus_size=cfg.torus_size, dt=cfg.dt,
                                               steps=cfg.steps, record_every=cfg.record_every)}
    jobs = []
    for label, preset, f in flock_labels(cfg):
        params = table[preset].with_seed(derive_seed(cfg.master_seed, "flock", preset, f))
        jobs.append((label, params, paths["flocks"] / f"{label}.json"))
    paths["flocks"].mkdir(parents=True, exist_ok=True)
    ordered_map(_simulate_job, jobs, cfg.thread_count)
    return [j[2] for j in jobs]


def dyn_grid(cfg: ExperimentConfig) -> DynGrid:
    from .dms import TimeGrid
    return DynGrid(TimeGrid(0.0, cfg.time_step, cfg.grid.T), cfg.grid.S, cfg.resolved_delta_weight())


def _persistence_job(args) -> PersistenceSet:
    path, label, k, cfg = args
    dms = subsample_times(load_dms(path), cfg.grid.time_stride, cfg.grid.T)
    grid = dyn_grid(cfg)
    ps = sample_persistence_set(dms, k, cfg.subsets_per_flock, grid,
                                derive_seed(cfg.master_seed, "subsets", label, k))
    return kcenter_reduce(ps, cfg.kcenter_target, derive_seed(cfg.master_seed, "kcenter", label, k))


def _hausdorff_job(args) -> float:
    A, B = args
    return hausdorff_erosion(A, B)


def cmd_distances(cfg: ExperimentConfig) -> Dict[str, Path]:
    paths = _paths(cfg)
    labels = flock_labels(cfg)
    files = [paths["flocks"] / f"{label}.json" for label, _, _ in labels]
    for f in files:
        if not f.exists():
            raise FileNotFoundError(f"flock file missing: {f} (run simulate first)")
    paths["matrices"].mkdir(parents=True, exist_ok=True)
    timing = {}
    names = [lab for lab, _, _ in labels]
    matrices, written = [], {}
    for k in cfg.k_list:
        t0 = time.perf_counter()
        sets = ordered_map(_persistence_job, [(f, lab, k, cfg) for f, lab in zip(files, names)],
                           cfg.thread_count)
        t1 = time.perf_counter()
        pairs = list(combinations(range(len(sets)), 2))
        vals = ordered_map(_hausdorff_job, [(sets[i], sets[j]) for i, j in pairs], cfg.thread_count,
                           chunksize=max(1, len(pairs) // (4 * cfg.thread_count)))
        D = np.zeros((len(sets), len(sets)))
        for (i, j), v in zip(pairs, vals):
            D[i, j] = D[j, i] = v
        dm = DistanceMatrix(names, D)
        out = paths["matrices"] / f"distances_k{k}.csv"
        dm.save(out)
        matrices.append(dm)
        written[f"k{k}"] = out
        timing[f"k{k}"] = {"persistence_sets_s": t1 - t0, "hausdorff_s": time.perf_counter() - t1}
    out = paths["matrices"] / "distances.csv"
    combine_max(matrices).save(out)
    written["combined"] = out
    # wall-clock timings live apart from the deterministic artifacts
    (paths["root"] / "timing_distances.json").write_text(json.dumps(timing, indent=1) + "\n")
    return written


def class_of(label: str) -> str:
    return label.rsplit("_", 1)[0]


def cmd_analyze(cfg: ExperimentConfig) -> Dict[str, Path]:
    paths = _paths(cfg)
    dm = DistanceMatrix.load(paths["matrices"] / "distances.csv")
    paths["analysis"].mkdir(parents=True, exist_ok=True)
    out = {k: paths["analysis"] / name for k, name in
           (("dendrogram", "dendrogram.json"), ("mds", "mds.csv"), ("report", "nn_report.json"))}
    single_linkage(dm).save(out["dendrogram"])
    classical_mds(dm).save(out["mds"])
    seed = derive_seed(cfg.master_seed, "one_nn")
    acc = one_nn_protocol(dm, [class_of(l) for l in dm.labels], cfg.trials, seed)
    out["report"].write_text(json.dumps({"accuracy": acc, "trials": cfg.trials, "seed": seed}, indent=1) + "\n")
    return out


def run_all(cfg: ExperimentConfig) -> Dict[str, Path]:
    cmd_simulate(cfg)
    written = cmd_distances(cfg)
    written.update(cmd_analyze(cfg))
    return written
