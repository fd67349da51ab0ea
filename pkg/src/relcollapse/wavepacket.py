"""Gaussian photon wavepackets: momentum amplitudes, position fields, Doppler shifts.

Units: hbar = c = 1, so E = |p| for a photon and positions and times share
one length unit. A momentum amplitude is

    psi(p) = (2 pi sigma_p^2)^(-1/4) exp(-(p - p0)^2 / (4 sigma_p^2)) exp(-i |p| t)

and its position-space wavefunction is the integral

    psi(x, t) = (2 pi)^(-1/2) * integral psi(p) exp(i (p x - |p| t)) dp

evaluated by the midpoint rule on ``p0 +/- 8 sigma_p``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .kinematics import BoostLike, Event, as_boost, boost_event

MOMENTUM_WINDOW = 8.0
MIN_SAMPLES = 2048
SIGN_DEFINITE_RATIO = 6.0
MAX_SIGMA_DX = 0.1
BOUNDARY_RATIO = 1e-8


class WavepacketError(ValueError):
    pass


class AliasingError(WavepacketError):
    """The position grid is too coarse for the packet's envelope."""


class GridError(WavepacketError):
    """The grid or window does not cover the region being evaluated."""


@dataclass(frozen=True)
class MomentumAmplitude:
    p0: float
    sigma_p: float
    t: float = 0.0  # ct already accumulated by evolve_phase

    def __post_init__(self):
        if not (math.isfinite(self.p0) and math.isfinite(self.sigma_p) and math.isfinite(self.t)):
            raise WavepacketError("p0, sigma_p and t must be finite")
        if self.sigma_p <= 0:
            raise WavepacketError(f"sigma_p must be positive, got {self.sigma_p!r}")
        if self.p0 == 0:
            raise WavepacketError("p0 must be nonzero; its sign is the direction of travel")

    @property
    def direction(self) -> int:
        return 1 if self.p0 > 0 else -1

    @property
    def is_sign_definite(self) -> bool:
        return abs(self.p0) >= SIGN_DEFINITE_RATIO * self.sigma_p

    @property
    def energy(self) -> float:
        return abs(self.p0)

    def amplitude(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        norm = (2.0 * math.pi * self.sigma_p**2) ** -0.25
        envelope = norm * np.exp(-((p - self.p0) ** 2) / (4.0 * self.sigma_p**2))
        return envelope * np.exp(-1j * np.abs(p) * self.t)

    def momentum_grid(self, samples: int = MIN_SAMPLES) -> tuple[np.ndarray, float]:
        """Midpoint nodes and spacing over ``p0 +/- 8 sigma_p``."""
        if samples < MIN_SAMPLES:
            raise WavepacketError(f"need at least {MIN_SAMPLES} momentum samples")
        lo = self.p0 - MOMENTUM_WINDOW * self.sigma_p
        dp = 2.0 * MOMENTUM_WINDOW * self.sigma_p / samples
        return lo + dp * (np.arange(samples) + 0.5), dp

    def norm(self, samples: int = MIN_SAMPLES) -> float:
        p, dp = self.momentum_grid(samples)
        return float(np.sqrt(np.sum(np.abs(self.amplitude(p)) ** 2) * dp))


@dataclass(frozen=True, eq=False)
class PositionField:
    grid: np.ndarray
    values: np.ndarray
    t: float

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.density) * self.dx))

    def centroid(self) -> float:
        rho = self.density
        return float(np.sum(self.grid * rho) / np.sum(rho))

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "re", "im", "abs2"])
            for x, v in zip(self.grid, self.values):
                writer.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v) ** 2))])
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path], t: float = 0.0) -> PositionField:
        with Path(path).open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        grid = np.array([float(r["x"]) for r in rows])
        values = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        return cls(grid, values, t)


def uniform_grid(span: float, points: int, center: float = 0.0) -> np.ndarray:
    """``points`` samples covering ``center +/- span/2``."""
    return center + np.linspace(-span / 2.0, span / 2.0, points)


def _check_grid(grid: np.ndarray) -> float:
    if grid.ndim != 1 or grid.size < 2:
        raise GridError("grid must be a 1-d array with at least two points")
    steps = np.diff(grid)
    dx = float(steps[0])
    if dx <= 0 or np.max(np.abs(steps - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise GridError("grid must be uniform and increasing")
    return dx


def position_wavefunction(
    m: MomentumAmplitude,
    grid,
    t: float = 0.0,
    samples: int = MIN_SAMPLES,
    check_support: bool = True,
) -> PositionField:
    """Position-space wavefunction of ``m`` at time ``t`` on a uniform grid.

    ``check_support`` enforces that the field at both grid ends is below
    ``1e-8`` of its peak; switch it off to evaluate a local window.
    """
    grid = np.asarray(grid, dtype=float)
    dx = _check_grid(grid)
    if m.sigma_p * dx > MAX_SIGMA_DX * (1.0 + 1e-9):
        raise AliasingError(f"sigma_p * dx = {m.sigma_p * dx:.3g} exceeds {MAX_SIGMA_DX}")
    p, dp = m.momentum_grid(samples)
    amp = m.amplitude(p) * np.exp(-1j * np.abs(p) * t) * dp / math.sqrt(2.0 * math.pi)
    # plain matrix product: fixed summation order, bit-stable across runs
    kernel = np.exp(1j * np.outer(grid, p))
    values = kernel @ amp
    if check_support:
        mag = np.abs(values)
        peak = mag.max()
        if max(mag[0], mag[-1]) > BOUNDARY_RATIO * peak:
            raise GridError("grid too narrow: field at the boundary exceeds 1e-8 of its peak")
    return PositionField(grid, values, m.t + t)


def evolve_phase(m: MomentumAmplitude, t: float) -> MomentumAmplitude:
    """Multiply every momentum component by ``exp(-i |p| t)``."""
    return replace(m, t=m.t + t)


def lorentz_momentum(p: float, E: float, b: BoostLike) -> tuple[float, float]:
    """``(p', E')`` of a momentum-energy pair in the frame ``b``."""
    b = as_boost(b)
    g = b.gamma
    return g * (p - b.beta * E), g * (E - b.beta * p)


def doppler_factor(direction: int, b: BoostLike) -> float:
    """Momentum scale ``p'/p`` for a photon moving in ``direction``."""
    b = as_boost(b)
    return b.doppler if direction > 0 else 1.0 / b.doppler


def doppler_transform(m: MomentumAmplitude, b: BoostLike) -> MomentumAmplitude:
    """The packet as seen from the frame ``b``.

    For a sign-definite packet every component scales by the same factor, so
    the Gaussian maps to a Gaussian with ``p0`` and ``sigma_p`` rescaled; the
    Jacobian ``dp/dp'`` is absorbed by the normalization of the new Gaussian.
    """
    b = as_boost(b)
    if not m.is_sign_definite:
        raise WavepacketError(f"|p0| must be at least {SIGN_DEFINITE_RATIO} sigma_p to transform")
    if m.t != 0.0:
        raise WavepacketError("transform the packet before evolving it; a lab time is not a boosted time slice")
    k = doppler_factor(m.direction, b)
    return MomentumAmplitude(m.p0 * k, m.sigma_p * k)


def transformed_amplitude(m: MomentumAmplitude, b: BoostLike, p_prime) -> np.ndarray:
    """``psi'(p')`` by explicit change of variables with the Jacobian, for checking."""
    b = as_boost(b)
    p_prime = np.asarray(p_prime, dtype=float)
    # inverse map for E = |p| on one branch: p = gamma (p' + beta |p'|)
    p = b.gamma * (p_prime + b.beta * np.abs(p_prime))
    jac = np.abs(b.gamma * (1.0 + b.beta * np.sign(p_prime)))
    return m.amplitude(p) * np.sqrt(jac)


def invariant_phase_check(p: float, E: float, x: float, ct: float, b: BoostLike) -> tuple[float, float]:
    """``(p x - E t, p' x' - E' t')``; equal for any boost."""
    if abs(E - abs(p)) > 1e-12 * max(1.0, abs(p)):
        raise WavepacketError(f"photon must be on shell, got E={E!r}, p={p!r}")
    p2, E2 = lorentz_momentum(p, E, b)
    e2 = boost_event(Event(x, ct), b)
    return p * x - E * ct, p2 * e2.x - E2 * e2.ct


def detector_overlap(f: PositionField, detector_x: float, half_width: float) -> float:
    """Probability mass of ``|psi|^2`` inside ``detector_x +/- half_width``."""
    if half_width < 0:
        raise GridError("half_width must be non-negative")
    lo, hi = detector_x - half_width, detector_x + half_width
    grid = f.grid
    if lo < grid[0] or hi > grid[-1]:
        raise GridError(f"window [{lo}, {hi}] is outside the grid [{grid[0]}, {grid[-1]}]")
    if half_width == 0:
        return 0.0
    inside = grid[(grid > lo) & (grid < hi)]
    xs = np.concatenate(([lo], inside, [hi]))
    rho = np.interp(xs, grid, f.density)
    mass = float(np.sum(0.5 * (rho[1:] + rho[:-1]) * np.diff(xs)))
    return min(max(mass, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class JointSpatialState:
    """Product wavefunction psi1(x1, t) psi2(x2, t) of the two photons."""

    packet1: PositionField
    packet2: PositionField

    def amplitude(self) -> np.ndarray:
        """Joint amplitude indexed ``[i1, i2]`` over the two grids."""
        return np.outer(self.packet1.values, self.packet2.values)

    def norm(self) -> float:
        return self.packet1.norm() * self.packet2.norm()


def joint_state(
    m1: MomentumAmplitude, m2: MomentumAmplitude, grid, t: float = 0.0, samples: int = MIN_SAMPLES
) -> JointSpatialState:
    return JointSpatialState(
        position_wavefunction(m1, grid, t, samples),
        position_wavefunction(m2, grid, t, samples),
    )


def collapse_trigger_time(
    m: MomentumAmplitude,
    detector_x: float,
    half_width: float = 0.05,
    threshold: float = 0.5,
    dt: float = 0.005,
    t_max: Optional[float] = None,
    window_points: int = 81,
) -> float:
    """First time on the grid ``0, dt, 2 dt, ...`` at which the detector holds ``threshold`` of the packet."""
    if half_width <= 0:
        raise GridError("half_width must be positive to trigger")
    if t_max is None:
        t_max = abs(detector_x) * 2.0 + 1.0
    local = np.linspace(detector_x - half_width, detector_x + half_width, window_points)
    steps = int(math.floor(t_max / dt)) + 1
    # the envelope moves rigidly at c; nothing reaches the window earlier than this
    reach = abs(detector_x) - half_width - 12.0 / (2.0 * m.sigma_p)
    first = max(0, int(math.floor(reach / dt)) - 1)
    for k in range(first, steps):
        t = k * dt
        f = position_wavefunction(m, local, t, check_support=False)
        if detector_overlap(f, detector_x, half_width) >= threshold:
            return t
    raise WavepacketError(f"packet never reaches overlap {threshold} before t={t_max}")
