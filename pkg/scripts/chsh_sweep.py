"""CHSH estimate versus trial count and analyzer angle.

    python3 scripts/chsh_sweep.py --seed 1 --out results/chsh_sweep.csv
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from relcollapse import bell_harness as bh
from relcollapse.polarization import MeasurementBasis, chsh_value, chsh_operators, singlet


@dataclass(frozen=True)
class SweepConfig:
    seed: int = 1
    trial_counts: tuple = (1_000, 10_000, 100_000)
    angles: int = 13  # rotations of station 2's settings over [0, pi/2]


def rotated_operators(phi: float) -> dict:
    ops = chsh_operators()
    for key in ("a2", "b2"):
        base = MeasurementBasis.from_observable(ops[key])
        ops[key] = MeasurementBasis(base.theta + phi).observable()
    return ops


def run(cfg: SweepConfig) -> list[dict]:
    rows = []
    for n in cfg.trial_counts:
        seqs = np.random.SeedSequence([cfg.seed, n]).spawn(2)
        est = bh.merge_and_estimate(bh.run_trials(n, *(np.random.default_rng(s) for s in seqs)))
        rows.append({"kind": "trials", "param": n, "analytic": 2 * math.sqrt(2), "estimate": est.s_value, "std_error": est.s_std_error})
    for phi in np.linspace(0.0, math.pi / 2, cfg.angles):
        ops = rotated_operators(float(phi))
        exact = chsh_value(singlet(), ops["a1"], ops["b1"], ops["a2"], ops["b2"])
        seqs = np.random.SeedSequence([cfg.seed, 7]).spawn(2)
        est = bh.merge_and_estimate(bh.run_trials(20_000, *(np.random.default_rng(s) for s in seqs), operators=ops))
        rows.append({"kind": "angle", "param": float(phi), "analytic": exact, "estimate": est.s_value, "std_error": est.s_std_error})
    return rows


def write_rows(rows, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=SweepConfig.seed)
    parser.add_argument("--out", type=Path)
    args = parser.parse_args(argv)
    rows = run(SweepConfig(seed=args.seed))
    if args.out is None:
        write_rows(rows, sys.stdout)
        return 0
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        write_rows(rows, fh)
    return 0


if __name__ == "__main__":
    sys.exit(main())
