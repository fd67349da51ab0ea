"""Command-line front end.

    relcollapse simulate    --config run.json [--seed N] [--out DIR] [--policy P]
    relcollapse consistency --config run.json [--seed N] [--out DIR] [--policy P]
    relcollapse chsh        --config run.json [--seed N] [--out DIR] [--records FILE] [--lhv]
    relcollapse diagram     --config run.json [--seed N] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bell_harness as bh
from .config import Config, load_config
from .diagram import DiagramSpec, write_svg
from .kinematics import KinematicsError
from .polarization import PolarizationError
from .scenario import (
    POLICIES,
    ConfigError,
    frame_consistency,
    locate_events,
    past_reach_report,
    run_collapse,
    second_detector_check,
)
from .wavepacket import MomentumAmplitude, WavepacketError, position_wavefunction, uniform_grid

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: config error: {message}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relcollapse", description="Relativistic collapse and CHSH simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", required=True, type=Path, help="JSON config (schema 1)")
        p.add_argument("--out", type=Path, help="directory for output files")
        p.add_argument("--seed", type=_u64, help="override the config seed")

    for name in ("simulate", "consistency"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--policy", choices=POLICIES, default="relativistic-consistent")
    p = sub.add_parser("chsh")
    common(p)
    p.add_argument("--records", type=Path, help="write trial records as CSV")
    p.add_argument("--lhv", action="store_true", help="also report the local hidden variable bound")
    p = sub.add_parser("diagram")
    common(p)
    return parser


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: Optional[Path], filename: str) -> None:
    sys.stdout.write(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text)


def _effective(cfg: Config, seed: Optional[int]) -> Config:
    if seed is None:
        return cfg
    raw = dict(cfg.raw)
    raw["seed"] = seed
    return Config(raw)


def _events_dict(ev) -> dict:
    out = {
        "d": list(ev.d.as_tuple()),
        "b": list(ev.b.as_tuple()),
        "a": {repr(k): list(v.as_tuple()) for k, v in ev.a.items()},
        "f": {repr(k): list(v.as_tuple()) for k, v in ev.f.items()},
    }
    if ev.e is not None:
        out["e"] = list(ev.e.as_tuple())
    return out


def _collapse_report(cfg: Config, policy: str, out: Optional[Path]) -> dict:
    sc = cfg.scenario()
    rng = np.random.default_rng(cfg.seed)
    rec = run_collapse(sc, rng)
    report = {
        "config": cfg.raw,
        "derived": cfg.derived(),
        "events": _events_dict(locate_events(sc)),
        "collapse": rec.to_dict(),
        "consistency": frame_consistency(rec, sc, policy).to_dict(),
        "past_reach": past_reach_report(rec, sc),
    }
    if sc.detector_sprime is not None:
        report["second_detector_probability"] = second_detector_check(rec, sc)
    wp = cfg.wavepacket
    if wp is not None and out is not None and "grid_span" in wp and "grid_points" in wp:
        grid = uniform_grid(float(wp["grid_span"]), int(wp["grid_points"]), sc.source.x)
        out.mkdir(parents=True, exist_ok=True)
        names = []
        for label, sign in (("photon1", 1.0), ("photon2", -1.0)):
            packet = MomentumAmplitude(sign * float(wp["p0"]), float(wp["sigma_p"]))
            # packets are centered on the source, so shift the grid into source coordinates
            field = replace(position_wavefunction(packet, grid - sc.source.x, sc.ct_d), grid=grid)
            name = f"{label}_ct_d.csv"
            field.to_csv(out / name)
            names.append(name)
        report["wavefunction_csv"] = names
    return report


def cmd_simulate(cfg: Config, args) -> int:
    report = _collapse_report(cfg, args.policy, args.out)
    _emit(_dump(report), args.out, "simulate.json")
    return EXIT_OK


def cmd_consistency(cfg: Config, args) -> int:
    sc = cfg.scenario()
    rec = run_collapse(sc, np.random.default_rng(cfg.seed))
    report = {"config": cfg.raw, "collapse": rec.to_dict(), **frame_consistency(rec, sc, args.policy).to_dict()}
    if sc.detector_sprime is not None:
        report["second_detector_probability"] = second_detector_check(rec, sc)
    _emit(_dump(report), args.out, "consistency.json")
    return EXIT_OK


def cmd_chsh(cfg: Config, args) -> int:
    settings_seq, outcome_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    records = bh.run_trials(cfg.trials, np.random.default_rng(settings_seq), np.random.default_rng(outcome_seq))
    estimate = bh.merge_and_estimate(records)
    report = {"config": cfg.raw, "estimate": estimate.to_dict(), "s_std_error": estimate.s_std_error}
    if args.lhv:
        report["lhv_max_chsh"] = bh.lhv_max_chsh()
    if args.records is not None:
        args.records.parent.mkdir(parents=True, exist_ok=True)
        bh.write_records_csv(records, args.records)
    _emit(_dump(report), args.out, "chsh.json")
    return EXIT_OK


def cmd_diagram(cfg: Config, args) -> int:
    dg = cfg.diagram
    sc = cfg.scenario()
    events = tuple(dg.get("events", ("d", "b", "a", "f") + (("e",) if sc.detector_sprime is not None else ())))
    spec = DiagramSpec(
        betas=tuple(float(b) for b in dg.get("betas", cfg.betas)),
        events=events,
        axis_range=tuple(dg["range"]) if "range" in dg else None,
        scale=float(dg.get("scale", 100.0)),
    )
    out = args.out if args.out is not None else Path(".")
    path = write_svg(sc, spec, out / dg.get("file", "diagram.svg"))
    sys.stdout.write(f"{path}\n")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "consistency": cmd_consistency,
    "chsh": cmd_chsh,
    "diagram": cmd_diagram,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _effective(load_config(args.config), getattr(args, "seed", None))
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KinematicsError, WavepacketError, PolarizationError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
