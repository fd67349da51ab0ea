"""Table of how far into the lab past each frame's simultaneity line reaches.

For the collapse event at ``ct_d`` the partner event on photon 2 in a frame
moving with ``beta`` sits at ``ct_a = ct_d (1 - beta) / (1 + beta)``.

    python3 scripts/past_reach_table.py --ct-d 1
"""

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from relcollapse.scenario import Scenario, past_reach_report, run_collapse


@dataclass(frozen=True)
class TableConfig:
    ct_d: float = 1.0
    betas: tuple = (-0.6, 0.0, 0.1, 0.3, 0.5, 0.6, 0.8, 0.9, 0.99, 0.999)


def table(cfg: TableConfig) -> list[dict]:
    sc = Scenario.default(ct_d=cfg.ct_d, betas=cfg.betas)
    rec = run_collapse(sc, np.random.default_rng(0))
    return past_reach_report(rec, sc)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ct-d", type=float, default=TableConfig.ct_d)
    args = parser.parse_args(argv)
    print(f"{'beta':>8} {'reach':>12} {'reach/ct_d':>12}")
    for row in table(TableConfig(ct_d=args.ct_d)):
        print(f"{row['beta']:>8g} {row['reach']:>12.6f} {row['fraction_of_td']:>12.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
