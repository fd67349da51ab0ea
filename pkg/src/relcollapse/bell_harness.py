"""Monte Carlo CHSH experiment with two measurement stations.

Station 1 measures photon 1 with setting ``a`` or ``b`` (operators ``a1`` and
``b1``), station 2 measures photon 2 with ``a2`` or ``b2``. Each trial starts
from a fresh singlet and measures the two photons one after the other; the
joint statistics do not depend on which station goes first, and the harness
lets you choose the order to check exactly that.

Settings and outcomes draw from two separate generators, so the setting
sequence can be replayed independently of the measurement noise.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .kinematics import BoostLike, Event, boost_event
from .polarization import (
    MeasurementBasis,
    SinglePhotonOp,
    measure_photon,
    chsh_operators,
    project,
    singlet,
)

SETTINGS = ("a", "b")
PAIRS = ("a1a2", "a1b2", "b1a2", "b1b2")
CSV_HEADER = ["trial_id", "station", "setting", "value", "ct_stamp"]

# rest-frame measurement events of the default geometry (x_o = 0, ct_d = 1)
DEFAULT_STATION_EVENTS = {1: Event(1.0, 1.0), 2: Event(-1.0, 1.0)}


class MalformedRecords(ValueError):
    pass


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    station: int
    setting: str
    value: int
    ct_stamp: float


@dataclass(frozen=True)
class ChshEstimate:
    correlators: dict
    s_value: float
    counts: dict
    std_errors: dict

    @classmethod
    def from_correlators(cls, correlators: Mapping[str, float], counts=None, std_errors=None) -> ChshEstimate:
        corr = {k: float(correlators[k]) for k in PAIRS}
        s = corr["a1a2"] + corr["a1b2"] + corr["b1a2"] - corr["b1b2"]
        counts = dict(counts) if counts is not None else {k: 0 for k in PAIRS}
        std_errors = dict(std_errors) if std_errors is not None else {k: 0.0 for k in PAIRS}
        return cls(corr, s, counts, std_errors)

    @property
    def s_std_error(self) -> float:
        return math.sqrt(sum(e * e for e in self.std_errors.values()))

    def to_dict(self) -> dict:
        def clean(x):
            return None if isinstance(x, float) and not math.isfinite(x) else x

        return {
            "correlators": {k: clean(self.correlators[k]) for k in PAIRS},
            "s_value": clean(self.s_value),
            "counts": {k: self.counts[k] for k in PAIRS},
            "std_errors": {k: clean(self.std_errors[k]) for k in PAIRS},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _pair_key(s1: str, s2: str) -> str:
    return f"{s1}1{s2}2"


def _bases(operators: Mapping[str, SinglePhotonOp]) -> dict[tuple[int, str], MeasurementBasis]:
    # operators are +/-1 valued, so each is a linear polarizer (closed form)
    return {
        (station, setting): MeasurementBasis.from_observable(operators[f"{setting}{station}"])
        for station in (1, 2)
        for setting in SETTINGS
    }


def _branch_table(bases, first: int) -> dict[tuple[str, str], tuple[float, float, float]]:
    """Per setting pair: P(first fires), P(second fires | fired), P(second fires | passed)."""
    second = 2 if first == 1 else 1
    s0 = singlet()
    table = {}
    for s1, s2 in itertools.product(SETTINGS, SETTINGS):
        setting = {1: s1, 2: s2}
        b_first = bases[(first, setting[first])]
        b_second = bases[(second, setting[second])]
        p_fire, fired_state = project(s0, first, b_first.detected)
        _, passed_state = project(s0, first, b_first.transmitted)
        q_fired = project(fired_state, second, b_second.detected)[0] if fired_state is not None else 0.0
        q_passed = project(passed_state, second, b_second.detected)[0] if passed_state is not None else 0.0
        table[(s1, s2)] = (p_fire, q_fired, q_passed)
    return table


def run_trials(
    n: int,
    settings_rng: np.random.Generator,
    outcome_rng: np.random.Generator,
    operators: Optional[Mapping[str, SinglePhotonOp]] = None,
    first_station: int = 1,
    forced_settings: Optional[tuple[str, str]] = None,
    station_events: Optional[Mapping[int, Event]] = None,
    engine: str = "table",
) -> list[TrialRecord]:
    """Simulate ``n`` trials and return two records per trial.

    ``engine="direct"`` calls :func:`measure_photon` trial by trial.
    ``engine="table"`` precomputes the same sequential projections once per
    setting pair and samples all trials in a batch; it is the default because
    it is two orders of magnitude faster.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if first_station not in (1, 2):
        raise ValueError("first_station must be 1 or 2")
    operators = dict(operators) if operators is not None else chsh_operators()
    events = dict(station_events) if station_events is not None else DEFAULT_STATION_EVENTS
    bases = _bases(operators)

    if forced_settings is not None:
        if any(s not in SETTINGS for s in forced_settings):
            raise ValueError(f"settings must be in {SETTINGS}, got {forced_settings!r}")
        choice = np.array([[SETTINGS.index(forced_settings[0]), SETTINGS.index(forced_settings[1])]] * n)
    else:
        choice = settings_rng.integers(0, 2, size=(n, 2))

    second = 2 if first_station == 1 else 1
    if engine == "table":
        values = _sample_table(choice, bases, first_station, outcome_rng)
    elif engine == "direct":
        values = np.empty((n, 2), dtype=int)
        for i in range(n):
            setting = {1: SETTINGS[choice[i, 0]], 2: SETTINGS[choice[i, 1]]}
            out1 = measure_photon(singlet(), first_station, bases[(first_station, setting[first_station])], outcome_rng)
            out2 = measure_photon(out1.collapsed, second, bases[(second, setting[second])], outcome_rng)
            values[i, first_station - 1] = out1.value
            values[i, second - 1] = out2.value
    else:
        raise ValueError(f"unknown engine {engine!r}")

    ct1, ct2 = events[1].ct, events[2].ct
    records = []
    for i in range(n):
        records.append(TrialRecord(i, 1, SETTINGS[choice[i, 0]], int(values[i, 0]), ct1))
        records.append(TrialRecord(i, 2, SETTINGS[choice[i, 1]], int(values[i, 1]), ct2))
    return records


def _sample_table(choice: np.ndarray, bases, first: int, rng: np.random.Generator) -> np.ndarray:
    table = _branch_table(bases, first)
    n = choice.shape[0]
    p_fire = np.empty(n)
    q_fired = np.empty(n)
    q_passed = np.empty(n)
    for (s1, s2), (p, qf, qp) in table.items():
        mask = (choice[:, 0] == SETTINGS.index(s1)) & (choice[:, 1] == SETTINGS.index(s2))
        p_fire[mask], q_fired[mask], q_passed[mask] = p, qf, qp
    u = rng.random((n, 2))
    first_fired = u[:, 0] < p_fire
    second_fired = u[:, 1] < np.where(first_fired, q_fired, q_passed)
    values = np.empty((n, 2), dtype=int)
    second = 2 if first == 1 else 1
    values[:, first - 1] = np.where(first_fired, -1, 1)
    values[:, second - 1] = np.where(second_fired, -1, 1)
    return values


def _pair_up(records: Iterable[TrialRecord]) -> dict[int, dict[int, TrialRecord]]:
    trials: dict[int, dict[int, TrialRecord]] = defaultdict(dict)
    for r in records:
        if r.station not in (1, 2):
            raise MalformedRecords(f"trial {r.trial_id}: station must be 1 or 2, got {r.station!r}")
        if r.setting not in SETTINGS:
            raise MalformedRecords(f"trial {r.trial_id}: unknown setting {r.setting!r}")
        if r.value not in (-1, 1):
            raise MalformedRecords(f"trial {r.trial_id}: value must be +1 or -1, got {r.value!r}")
        if r.station in trials[r.trial_id]:
            raise MalformedRecords(f"trial {r.trial_id}: duplicate record for station {r.station}")
        trials[r.trial_id][r.station] = r
    for tid, pair in trials.items():
        if len(pair) != 2:
            missing = 2 if 1 in pair else 1
            raise MalformedRecords(f"trial {tid}: missing record for station {missing}")
    return trials


def merge_and_estimate(records: Iterable[TrialRecord]) -> ChshEstimate:
    """Pair records by trial and average the outcome products per setting pair."""
    trials = _pair_up(records)
    sums = {k: 0 for k in PAIRS}
    counts = {k: 0 for k in PAIRS}
    for tid in sorted(trials):
        r1, r2 = trials[tid][1], trials[tid][2]
        key = _pair_key(r1.setting, r2.setting)
        sums[key] += r1.value * r2.value
        counts[key] += 1
    corr, err = {}, {}
    for k in PAIRS:
        if counts[k] == 0:
            corr[k], err[k] = math.nan, math.nan
            continue
        e = sums[k] / counts[k]
        corr[k] = e
        err[k] = math.sqrt(max(1.0 - e * e, 0.0) / counts[k])
    return ChshEstimate.from_correlators(corr, counts, err)


def marginals(records: Iterable[TrialRecord]) -> dict[tuple[int, str], tuple[float, float, int]]:
    """Per station and setting: (mean outcome, standard error, count)."""
    acc: dict[tuple[int, str], list[int]] = defaultdict(list)
    for r in records:
        acc[(r.station, r.setting)].append(r.value)
    out = {}
    for key in sorted(acc):
        v = np.asarray(acc[key], dtype=float)
        mean = float(v.mean())
        out[key] = (mean, float(math.sqrt(max(1.0 - mean * mean, 0.0) / v.size)), int(v.size))
    return out


def lhv_strategy_values() -> np.ndarray:
    """CHSH value of each of the 16 deterministic local strategies.

    A strategy fixes station 1's answers ``(A_a, A_b)`` and station 2's
    answers ``(B_a, B_b)``, each +/-1.
    """
    values = []
    for A_a, A_b, B_a, B_b in itertools.product((-1, 1), repeat=4):
        values.append(A_a * B_a + A_a * B_b + A_b * B_a - A_b * B_b)
    return np.array(values, dtype=float)


def lhv_max_chsh() -> float:
    return float(np.max(np.abs(lhv_strategy_values())))


def restamp(
    records: Iterable[TrialRecord], b: BoostLike, station_events: Optional[Mapping[int, Event]] = None
) -> list[TrialRecord]:
    """Replace each record's ``ct_stamp`` with its measurement time in the frame ``b``."""
    events = dict(station_events) if station_events is not None else DEFAULT_STATION_EVENTS
    stamps = {st: boost_event(ev, b).ct for st, ev in events.items()}
    return [replace(r, ct_stamp=stamps[r.station]) for r in records]


def boosted_statistics(
    records: Iterable[TrialRecord], b: BoostLike, station_events: Optional[Mapping[int, Event]] = None
) -> ChshEstimate:
    """The CHSH estimate an observer in the frame ``b`` obtains from the same records."""
    return merge_and_estimate(restamp(records, b, station_events))


def write_records_csv(records: Sequence[TrialRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.trial_id, r.station, r.setting, r.value, repr(float(r.ct_stamp))])
    return path


def read_records_csv(path: Union[str, Path]) -> list[TrialRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise MalformedRecords(f"expected header {','.join(CSV_HEADER)}, got {reader.fieldnames}")
        return [
            TrialRecord(int(row["trial_id"]), int(row["station"]), row["setting"], int(row["value"]), float(row["ct_stamp"]))
            for row in reader
        ]
