"""Ratio ||g_n||_Mult / ||g_n||_inf against n for several r, as CSV.

The ratio approaches sqrt(2), which is why the constant cannot be lowered.
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from annulusvn.multspace import sharpness_trajectory


@dataclass
class CurveConfig:
    radii: tuple = (0.3, 0.5, 0.8)
    n_max: int = 30


def main(cfg):
    w = csv.writer(sys.stdout)
    w.writerow(["r", "n", "mult_lower", "sup_norm", "ratio"])
    for r in cfg.radii:
        for n, lower, sup, ratio in sharpness_trajectory(r, cfg.n_max):
            w.writerow([r, n, repr(lower), repr(sup), repr(ratio)])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=CurveConfig.n_max)
    ap.add_argument("--radii", type=float, nargs="+", default=list(CurveConfig.radii))
    a = ap.parse_args()
    main(CurveConfig(tuple(a.radii), a.n_max))
