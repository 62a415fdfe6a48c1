"""Run the desk experiment end to end and print accuracy and timings.

Usage: python scripts/run_desk.py [--config configs/desk.json] [--threads N] [--output-dir DIR]
"""

import argparse
import json
import math
import time
from pathlib import Path

from dyncurv import pipeline
from dyncurv.config import load_config

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "desk.json")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--output-dir")
    args = ap.parse_args()
    overrides = [f"thread_count={args.threads}"]
    if args.output_dir:
        overrides.append(f"output_dir={json.dumps(args.output_dir)}")
    cfg = load_config(args.config, overrides)

    t0 = time.perf_counter()
    out = pipeline.run_all(cfg)
    elapsed = time.perf_counter() - t0

    report = json.loads(out["report"].read_text())
    n_test = len(cfg.presets) * (cfg.flocks_per_preset - 1)
    threshold = 0.2 + 3 * math.sqrt(0.2 * 0.8 / n_test)
    timing = json.loads((Path(cfg.output_dir) / "timing_distances.json").read_text())
    print(f"output      {cfg.output_dir}")
    print(f"delta weight {cfg.resolved_delta_weight():.6g}, time step {cfg.time_step:g}")
    print(f"accuracy    {report['accuracy']:.4f} over {report['trials']} trials (threshold {threshold:.4f})")
    for k, t in timing.items():
        print(f"{k:<11} persistence sets {t['persistence_sets_s']:.1f}s, hausdorff {t['hausdorff_s']:.1f}s")
    print(f"total       {elapsed:.1f}s")


if __name__ == "__main__":
    main()
