"""Render the spacetime diagram of every config in ``configs/``.

    python3 scripts/make_figure.py --out figures
"""

import argparse
import sys
from pathlib import Path

from relcollapse.cli import main as cli_main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("figures"))
    args = parser.parse_args(argv)
    status = 0
    for cfg in sorted(CONFIGS.glob("*.json")):
        status |= cli_main(["diagram", "--config", str(cfg), "--out", str(args.out / cfg.stem)])
    return status


if __name__ == "__main__":
    sys.exit(main())
