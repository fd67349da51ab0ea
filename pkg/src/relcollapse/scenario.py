"""The two-photon collapse experiment as an executable scenario.

Photons leave the source ``(x_o, 0)``; photon 1 moves right towards the
detector ``d_s`` at ``x_d`` and photon 2 moves left. Lab-frame events:

* ``d``: photon 1 meets ``d_s`` (the collapse event)
* ``b``: photon 2 on the lab simultaneity line through ``d``
* ``a``: photon 2 on the simultaneity line through ``d`` of a frame ``beta``
* ``f``: photon 1 on the simultaneity line through ``b`` of a frame ``beta``
* ``e``: photon 1 meets a second detector ``d'_s`` at rest in a moving frame

Photon 2's polarization at a point of its worldline is a basis label. A
labeling policy decides which label an event carries, and
:func:`frame_consistency` checks that every frame sees the outcome recorded at
``d`` along its own simultaneity line.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import polarization as pol
from .kinematics import (
    Detector,
    Event,
    Photon,
    boost_event,
    intersect,
    past_reach,
    precedes,
    simultaneity_partner,
)
from .polarization import MeasurementBasis, PolState
from .wavepacket import MomentumAmplitude, collapse_trigger_time

CLOSURE_TOL = 1e-12
POLICIES = ("relativistic-consistent", "rest-frame-line-only")


class ConfigError(ValueError):
    """An invalid scenario or configuration; the message names the field."""


@dataclass(frozen=True)
class StationDetector:
    x: float
    basis: MeasurementBasis = MeasurementBasis(0.0)


@dataclass(frozen=True)
class PrimedDetector:
    """Detector ``d'_s`` at rest at ``rest_x`` in the frame moving with ``beta``."""

    rest_x: float
    beta: float
    basis: MeasurementBasis

    @classmethod
    def through(cls, e: Event, beta: float, basis: MeasurementBasis) -> PrimedDetector:
        """The detector of frame ``beta`` whose worldline passes through ``e``."""
        return cls(boost_event(e, beta).x, beta, basis)

    def worldline(self) -> Detector:
        return Detector(self.rest_x, self.beta)


@dataclass(frozen=True)
class WavepacketMode:
    p0: float = 200.0
    sigma_p: float = 20.0
    half_width: float = 0.05
    threshold: float = 0.5
    dt: float = 0.005


@dataclass(frozen=True)
class Scenario:
    source: Event
    detector_s: StationDetector
    detector_sprime: Optional[PrimedDetector] = None
    analysis_betas: tuple = ()
    wavepacket: Optional[WavepacketMode] = None

    def __post_init__(self):
        if self.source.ct != 0.0:
            raise ConfigError(f"source: photons are emitted at ct=0, got ct={self.source.ct}")
        if not self.detector_s.x > self.source.x:
            raise ConfigError(f"x_d: detector must sit right of the source (x_d={self.detector_s.x}, x_o={self.source.x})")
        object.__setattr__(self, "analysis_betas", tuple(float(b) for b in self.analysis_betas))
        for i, beta in enumerate(self.analysis_betas):
            if not -1.0 < beta < 1.0:
                raise ConfigError(f"betas[{i}]: |beta| must be < 1, got {beta}")
        if self.detector_sprime is not None and not -1.0 < self.detector_sprime.beta < 1.0:
            raise ConfigError(f"detector_sprime.beta: |beta| must be < 1, got {self.detector_sprime.beta}")

    @classmethod
    def default(cls, x_o: float = 0.0, ct_d: float = 1.0, theta: float = math.pi / 2, betas=(0.6, -0.6)) -> Scenario:
        return cls(Event(x_o, 0.0), StationDetector(x_o + ct_d, MeasurementBasis(theta)), analysis_betas=tuple(betas))

    @property
    def photon1(self) -> Photon:
        return Photon(self.source, +1)

    @property
    def photon2(self) -> Photon:
        return Photon(self.source, -1)

    @property
    def ct_d(self) -> float:
        return self.detector_s.x - self.source.x

    def frame_betas(self) -> list[float]:
        """Rest frame, the analysis frames, then the frame of ``d'_s`` if it is new."""
        out = [0.0]
        for beta in self.analysis_betas:
            if beta not in out:
                out.append(beta)
        if self.detector_sprime is not None and self.detector_sprime.beta not in out:
            out.append(self.detector_sprime.beta)
        return out

    def place_sprime(self, fraction: float, beta: float, basis: Optional[MeasurementBasis] = None) -> Scenario:
        """Copy with ``d'_s`` meeting photon 1 at ``fraction`` of the way from ``d`` to ``f``."""
        ev = locate_events(self, betas=[beta])
        d, f = ev.d, ev.f[beta]
        e = self.photon1.at(d.ct + fraction * (f.ct - d.ct))
        basis = basis if basis is not None else self.detector_s.basis.aligned()
        return Scenario(self.source, self.detector_s, PrimedDetector.through(e, beta, basis), self.analysis_betas, self.wavepacket)


@dataclass(frozen=True)
class EventSet:
    d: Event
    b: Event
    a: dict
    f: dict
    e: Optional[Event] = None


def locate_events(sc: Scenario, betas: Optional[Sequence[float]] = None) -> EventSet:
    """Events d and b, plus a and f for every frame in ``betas`` (default: the scenario's frames)."""
    d = intersect(sc.photon1, Detector(sc.detector_s.x))
    b = simultaneity_partner(d, sc.photon2, 0.0)
    betas = sc.frame_betas() if betas is None else list(betas)
    a = {beta: simultaneity_partner(d, sc.photon2, beta) for beta in betas}
    f = {beta: simultaneity_partner(b, sc.photon1, beta) for beta in betas}
    e = None
    if sc.detector_sprime is not None:
        e = intersect(sc.photon1, sc.detector_sprime.worldline())
    return EventSet(d, b, a, f, e)


@dataclass(frozen=True)
class CollapseRecord:
    d_event: Event
    basis: MeasurementBasis
    fired: bool
    collapsed: PolState
    b_event: Event
    trigger_ct: Optional[float] = None

    @property
    def photon1_label(self) -> str:
        return pol.photon_label(self.collapsed, 1)

    @property
    def photon2_label(self) -> str:
        return pol.photon_label(self.collapsed, 2)

    def to_dict(self) -> dict:
        return {
            "d_event": list(self.d_event.as_tuple()),
            "b_event": list(self.b_event.as_tuple()),
            "basis_theta": self.basis.theta,
            "fired": self.fired,
            "photon1_label": self.photon1_label,
            "photon2_label": self.photon2_label,
            "collapsed": [[a.real, a.imag] for a in self.collapsed.amplitudes.tolist()],
            "trigger_ct": self.trigger_ct,
        }


@functools.lru_cache(maxsize=64)
def _trigger(mode: WavepacketMode, distance: float) -> float:
    packet = MomentumAmplitude(mode.p0, mode.sigma_p)
    return collapse_trigger_time(packet, distance, mode.half_width, mode.threshold, mode.dt)


def run_collapse(sc: Scenario, rng: np.random.Generator) -> CollapseRecord:
    """Measure photon 1 of a fresh singlet with ``d_s`` at event ``d``."""
    d = intersect(sc.photon1, Detector(sc.detector_s.x))
    b = simultaneity_partner(d, sc.photon2, 0.0)
    trigger = None
    if sc.wavepacket is not None:
        trigger = _trigger(sc.wavepacket, sc.detector_s.x - sc.source.x)
    out = pol.measure_photon(pol.singlet(), 1, sc.detector_s.basis, rng)
    return CollapseRecord(d, sc.detector_s.basis, out.fired, out.collapsed, b, trigger)


def _check_sprime(sc: Scenario) -> tuple[PrimedDetector, Event]:
    if sc.detector_sprime is None:
        raise ConfigError("detector_sprime: no second detector configured")
    ev = locate_events(sc, betas=[sc.detector_sprime.beta])
    d, f, e = ev.d, ev.f[sc.detector_sprime.beta], ev.e
    if e is None or not d.ct < e.ct < f.ct:
        where = "parallel to photon 1" if e is None else f"at ct={e.ct:.6g}"
        raise ConfigError(
            f"detector_sprime: must meet photon 1 strictly between d (ct={d.ct:.6g}) and f (ct={f.ct:.6g}), meets it {where}"
        )
    return sc.detector_sprime, e


def second_detector_check(rec: CollapseRecord, sc: Scenario) -> float:
    """Probability that ``d'_s`` fires on photon 1 at event ``e``."""
    det, _ = _check_sprime(sc)
    if rec.fired:
        return 0.0  # photon 1 was absorbed at d
    return pol.firing_probability(pol.frame_map(rec.collapsed), 1, det.basis)


def sample_second_detector(rec: CollapseRecord, sc: Scenario, rng: np.random.Generator) -> bool:
    det, _ = _check_sprime(sc)
    if rec.fired:
        return False
    return pol.measure_photon(pol.frame_map(rec.collapsed), 1, det.basis, rng).fired


# -- labeling policies ------------------------------------------------------

LabelPolicy = Callable[[CollapseRecord, Event, float], str]


def relativistic_consistent(rec: CollapseRecord, event: Event, beta: float) -> str:
    """Photon 2 carries the collapsed label on every frame's simultaneity line through d."""
    state = rec.collapsed if beta == 0.0 else pol.frame_map(rec.collapsed)
    return pol.photon_label(state, 2)


def rest_frame_line_only(rec: CollapseRecord, event: Event, beta: float) -> str:
    """Rejected alternative: collapse only from the lab line ct = ct_d onwards."""
    if event.ct < rec.d_event.ct:
        return "entangled"
    return pol.photon_label(rec.collapsed, 2)


_POLICY_FUNCS = {
    "relativistic-consistent": relativistic_consistent,
    "rest-frame-line-only": rest_frame_line_only,
}


def get_policy(name: str) -> LabelPolicy:
    try:
        return _POLICY_FUNCS[name]
    except KeyError:
        raise ConfigError(f"policy: unknown policy {name!r}, choose from {', '.join(POLICIES)}") from None


@dataclass(frozen=True)
class FrameView:
    beta: float
    partner_event: Event
    d_before_partner: bool  # d strictly precedes b in this frame
    photon2_label: str
    past_reach: float
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "a_event": list(self.partner_event.as_tuple()),
            "d_before_partner": self.d_before_partner,
            "photon2_label": self.photon2_label,
            "past_reach": self.past_reach,
            "consistent": self.consistent,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    policy: str
    views: tuple
    violations: tuple = ()

    @property
    def all_consistent(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "all_consistent": self.all_consistent,
            "views": [v.to_dict() for v in self.views],
            "violations": [dict(v) for v in self.violations],
        }


def frame_consistency(rec: CollapseRecord, sc: Scenario, policy: str = "relativistic-consistent") -> ConsistencyReport:
    """Check that every frame's simultaneity line through d sees the lab outcome.

    For each frame the partner event ``a`` of ``d`` on photon 2's worldline is
    located and labeled by ``policy``; the label must equal photon 2's label
    in the lab frame. With ``d'_s`` configured, the photon 2 event simultaneous
    with ``e`` in the frame of ``d'_s`` is checked the same way.
    """
    label_at = get_policy(policy)
    expected = rec.photon2_label
    d, b = rec.d_event, rec.b_event
    views, violations = [], []
    for beta in sc.frame_betas():
        a = simultaneity_partner(d, sc.photon2, beta)
        # rounding grows with coordinate size, so the tolerance is relative for large scenarios
        tol = CLOSURE_TOL * max(1.0, abs(d.x), abs(d.ct), abs(a.x), abs(a.ct))
        closure = abs(boost_event(a, beta).ct - boost_event(d, beta).ct) <= tol and a == sc.photon2.at(a.ct)
        label = label_at(rec, a, beta)
        ok = closure and label == expected
        if not ok:
            violations.append(
                {
                    "beta": beta,
                    "event": "a",
                    "expected": expected,
                    "found": label,
                    "reason": "partner event off its simultaneity line" if not closure else "photon 2 label disagrees with the outcome at d",
                }
            )
        views.append(FrameView(beta, a, precedes(d, b, beta), label, past_reach(d, a, beta), ok))
    if sc.detector_sprime is not None and not rec.fired:
        det, e = _check_sprime(sc)
        e2 = simultaneity_partner(e, sc.photon2, det.beta)
        label = label_at(rec, e2, det.beta)
        if label != expected:
            violations.append(
                {
                    "beta": det.beta,
                    "event": "e-partner",
                    "expected": expected,
                    "found": label,
                    "reason": "d'_s is certain of photon 1 at e but photon 2 on the same simultaneity line is not collapsed",
                }
            )
    return ConsistencyReport(policy, tuple(views), tuple(violations))


def past_reach_report(rec: CollapseRecord, sc: Scenario) -> list[dict]:
    """Per analysis frame: how far into the lab past the partner ``a`` of ``d`` lies."""
    d = rec.d_event
    elapsed = d.ct - sc.source.ct
    rows = []
    for beta in sc.analysis_betas:
        a = simultaneity_partner(d, sc.photon2, beta)
        reach = past_reach(d, a, beta)
        rows.append({"beta": beta, "reach": reach, "fraction_of_td": reach / elapsed})
    return rows
