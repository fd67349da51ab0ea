"""Special relativity in one space and one time dimension.

Natural units throughout: ``c = 1`` and every time coordinate is carried as
``ct`` in the same length unit as ``x``. A frame is identified by its
velocity ``beta`` relative to the lab frame S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

LIGHTLIKE_TOL = 1e-10


class KinematicsError(ValueError):
    """Base class for errors raised by the kinematics engine."""


class DomainError(KinematicsError):
    """A velocity or coordinate outside its physical domain."""


class DegenerateError(KinematicsError):
    """Two lines coincide, so they have no unique intersection."""


class NoIntersection(KinematicsError):
    """Two lines are parallel and never meet."""


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Event:
    x: float
    ct: float

    def __post_init__(self):
        object.__setattr__(self, "x", _check_finite("x", self.x))
        object.__setattr__(self, "ct", _check_finite("ct", self.ct))

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.ct)


@dataclass(frozen=True)
class Boost:
    """Velocity ``beta = v/c`` of a frame S' relative to S."""

    beta: float

    def __post_init__(self):
        beta = _check_finite("beta", self.beta)
        if not -1.0 < beta < 1.0:
            raise DomainError(f"|beta| must be < 1, got {beta!r}")
        object.__setattr__(self, "beta", beta)

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))

    @property
    def doppler(self) -> float:
        """Frequency scale sqrt((1-beta)/(1+beta)) for a co-moving photon."""
        return math.sqrt((1.0 - self.beta) / (1.0 + self.beta))

    def inverse(self) -> Boost:
        return Boost(-self.beta)

    def then(self, other: Boost) -> Boost:
        """The single boost equal to applying ``self`` and then ``other``."""
        b1, b2 = self.beta, other.beta
        return Boost((b1 + b2) / (1.0 + b1 * b2))


BoostLike = Union[Boost, float]


def as_boost(b: BoostLike) -> Boost:
    return b if isinstance(b, Boost) else Boost(b)


def boost_event(e: Event, b: BoostLike) -> Event:
    """Coordinates of ``e`` in the frame moving with velocity ``b``."""
    b = as_boost(b)
    g, beta = b.gamma, b.beta
    return Event(g * (e.x - beta * e.ct), g * (e.ct - beta * e.x))


class IntervalKind(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class IntervalClass:
    kind: IntervalKind
    s_squared: float


def interval(e1: Event, e2: Event, tol: float = LIGHTLIKE_TOL) -> IntervalClass:
    """Classify the separation of two events with s^2 = dx^2 - d(ct)^2."""
    dx = e2.x - e1.x
    dct = e2.ct - e1.ct
    s2 = dx * dx - dct * dct
    if s2 > tol:
        kind = IntervalKind.SPACELIKE
    elif s2 < -tol:
        kind = IntervalKind.TIMELIKE
    else:
        kind = IntervalKind.LIGHTLIKE
    return IntervalClass(kind, s2)


def precedes(e1: Event, e2: Event, b: BoostLike = 0.0) -> bool:
    """True if ``e1`` happens strictly before ``e2`` in the frame ``b``."""
    return boost_event(e1, b).ct < boost_event(e2, b).ct


# -- lines in the (x, ct) plane ---------------------------------------------


@dataclass(frozen=True)
class _Line:
    # point + s * direction, lab-frame coordinates
    x0: float
    ct0: float
    dx: float
    dct: float


@dataclass(frozen=True)
class Photon:
    """A light ray leaving ``origin``; ``direction`` is +1 (right) or -1 (left)."""

    origin: Event
    direction: int

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction!r}")

    def at(self, ct: float) -> Event:
        return Event(self.origin.x + self.direction * (ct - self.origin.ct), ct)

    def boosted(self, b: BoostLike) -> Photon:
        return Photon(boost_event(self.origin, b), self.direction)

    def _line(self) -> _Line:
        return _Line(self.origin.x, self.origin.ct, float(self.direction), 1.0)

    def _snap(self, e: Event) -> Event:
        return self.at(e.ct)


@dataclass(frozen=True)
class Detector:
    """A detector at rest at ``rest_x`` in the frame moving with ``rest_frame_beta``."""

    rest_x: float
    rest_frame_beta: float = 0.0

    def __post_init__(self):
        _check_finite("rest_x", self.rest_x)
        Boost(self.rest_frame_beta)

    def at(self, ct: float) -> Event:
        b = Boost(self.rest_frame_beta)
        return Event(self.rest_x / b.gamma + b.beta * ct, ct)

    def _line(self) -> _Line:
        b = Boost(self.rest_frame_beta)
        g = b.gamma
        return _Line(g * self.rest_x, g * b.beta * self.rest_x, b.beta, 1.0)

    def _snap(self, e: Event) -> Event:
        return self.at(e.ct)


@dataclass(frozen=True)
class SimultaneityLine:
    """All events with boosted time ``ct_prime`` in the frame ``frame_beta``."""

    frame_beta: float
    ct_prime: float

    def __post_init__(self):
        _check_finite("ct_prime", self.ct_prime)
        Boost(self.frame_beta)

    @classmethod
    def through(cls, anchor: Event, b: BoostLike) -> SimultaneityLine:
        b = as_boost(b)
        return cls(b.beta, boost_event(anchor, b).ct)

    def _line(self) -> _Line:
        b = Boost(self.frame_beta)
        g = b.gamma
        return _Line(g * b.beta * self.ct_prime, g * self.ct_prime, 1.0, b.beta)

    def _snap(self, e: Event) -> Event:
        return e


Line = Union[Photon, Detector, SimultaneityLine]


def _intersect_lines(l1: _Line, l2: _Line) -> Optional[Event]:
    cross = l1.dx * l2.dct - l1.dct * l2.dx
    rx = l2.x0 - l1.x0
    rct = l2.ct0 - l1.ct0
    scale = max(math.hypot(l1.dx, l1.dct) * math.hypot(l2.dx, l2.dct), 1.0)
    if abs(cross) <= 1e-15 * scale:
        offset = rx * l1.dct - rct * l1.dx
        if abs(offset) <= 1e-12 * max(1.0, abs(rx), abs(rct)):
            raise DegenerateError("lines coincide")
        return None
    s = (rx * l2.dct - rct * l2.dx) / cross
    return Event(l1.x0 + s * l1.dx, l1.ct0 + s * l1.dct)


def intersect(w1: Line, w2: Line) -> Optional[Event]:
    """Unique common event of two lines, or ``None`` if they are parallel.

    Raises :class:`DegenerateError` when the lines coincide.
    """
    hit = _intersect_lines(w1._line(), w2._line())
    if hit is None:
        return None
    # place the result exactly on a worldline so its own equation holds bit for bit
    return w1._snap(hit) if not isinstance(w1, SimultaneityLine) else w2._snap(hit)


def simultaneity_partner(anchor: Event, w: Line, b: BoostLike) -> Event:
    """The event on ``w`` simultaneous with ``anchor`` in the frame ``b``."""
    b = as_boost(b)
    # line through the anchor itself, which is exact for the anchor's own coordinates
    line = _Line(anchor.x, anchor.ct, 1.0, b.beta)
    hit = _intersect_lines(line, w._line())
    if hit is None:
        raise NoIntersection(f"line is parallel to the simultaneity line of beta={b.beta}")
    return w._snap(hit)


def past_reach(d: Event, a: Event, b: BoostLike = 0.0) -> float:
    """Lab-frame time ``ct_d - ct_a`` by which the partner ``a`` precedes ``d``.

    ``b`` is accepted for symmetry with :func:`simultaneity_partner`; when ``a``
    is the partner of ``d`` in that frame the result equals ``beta * (x_d - x_a)``.
    """
    as_boost(b)
    return d.ct - a.ct
