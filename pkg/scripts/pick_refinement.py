"""Finite-node extension norms of g_n under angular grid refinement.

Compares the node-set values with the truncated multiplier norm, which they
approach from below.
"""

import argparse
from dataclasses import dataclass

from annulusvn.laurent import g_family
from annulusvn.multspace import mult_norm
from annulusvn.pickext import refinement_trajectory


@dataclass
class RefineConfig:
    r: float = 0.5
    ns: tuple = (1, 2, 3, 5)
    angles: tuple = (8, 16, 32, 64, 128)


def main(cfg):
    print(f"{'n':>3} {'nodes':>6} {'C_star':>14} {'mult_norm':>14} {'gap':>10}")
    for n in cfg.ns:
        g = g_family(cfg.r, n)
        ref = mult_norm(g, cfg.r).estimate
        for nodes, c in refinement_trajectory(g, cfg.r, angles=cfg.angles):
            print(f"{n:>3} {nodes:>6} {c:>14.10f} {ref:>14.10f} {ref - c:>10.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=RefineConfig.r)
    main(RefineConfig(ap.parse_args().r))
