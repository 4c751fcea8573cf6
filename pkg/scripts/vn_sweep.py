"""Randomized von Neumann check across several annuli; prints one summary row per r."""

import argparse
import json
from dataclasses import asdict, dataclass

from annulusvn.multspace import SymbolSpec, vn_experiment


@dataclass
class SweepConfig:
    radii: tuple = (0.1, 0.3, 0.5, 0.7, 0.9)
    trials: int = 200
    dims: tuple = (2, 3, 4, 5, 6, 7, 8)
    bandwidth: int = 10
    seed: int = 0


def run(cfg):
    rows = []
    for r in cfg.radii:
        s = vn_experiment(r, cfg.trials, cfg.dims, SymbolSpec(cfg.bandwidth), cfg.seed)["summary"]
        rows.append({"r": r, "max_ratio": s["max_ratio"], "max_ratio_normal": s["max_ratio_normal"],
                     "min_margin_sqrt2": s["min_margin_sqrt2"], "violations": len(s["violations"]),
                     "skipped": len(s["skipped"])})
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=SweepConfig.trials)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--radii", type=float, nargs="+", default=list(SweepConfig.radii))
    args = ap.parse_args()
    cfg = SweepConfig(radii=tuple(args.radii), trials=args.trials, seed=args.seed)
    print(json.dumps({"config": asdict(cfg), "rows": run(cfg)}, indent=2))
