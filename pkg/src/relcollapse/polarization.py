"""Two-photon polarization states, operators and projective measurement.

Single-photon basis order is ``(|z>, |y>)``. Two-photon amplitudes are
ordered ``(|z>|z>, |z>|y>, |y>|z>, |y>|y>)``, i.e. index ``2*i1 + i2`` with
photon 1 as the most significant factor. Every function in the package uses
this ordering.

A detector set to angle ``theta`` fires on ``cos(theta)|y> + sin(theta)|z>``
and is transparent to the orthogonal state. A firing detector reports the
eigenvalue -1 and a transmission reports +1, so ``theta = 0`` measures
``sigma_3`` with a detector that fires on ``|y>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
SCHMIDT_TOL = 1e-10
# Born probabilities this close to 0 or 1 are snapped, so ideal detectors are certain.
CERTAINTY_TOL = 1e-12

_SQRT1_2 = 1.0 / math.sqrt(2.0)

KET_Z = np.array([1.0, 0.0], dtype=complex)
KET_Y = np.array([0.0, 1.0], dtype=complex)
KET_DPLUS = (KET_Z + KET_Y) * _SQRT1_2
KET_DMINUS = (KET_Z - KET_Y) * _SQRT1_2


class PolarizationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PolState:
    """Normalized joint polarization state of photon 1 and photon 2.

    ``primed`` marks amplitudes expressed in a boosted frame's basis
    ``(|z'>, |y'>)``; the numbers themselves are identical.
    """

    amplitudes: np.ndarray
    primed: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (4,):
            raise PolarizationError(f"need 4 amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise PolarizationError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise PolarizationError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, ket1, ket2, primed: bool = False) -> PolState:
        ket1 = _normalized(np.asarray(ket1, dtype=complex))
        ket2 = _normalized(np.asarray(ket2, dtype=complex))
        return cls(np.kron(ket1, ket2), primed)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a 2x2 array indexed ``[photon1, photon2]``."""
        return self.amplitudes.reshape(2, 2)

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.matrix(), compute_uv=False)

    def is_product(self, tol: float = SCHMIDT_TOL) -> bool:
        return bool(self.schmidt_coefficients()[1] <= tol)

    def photon_state(self, photon: int) -> Optional[np.ndarray]:
        """Single-photon ket of ``photon`` if the state factorizes, else ``None``."""
        if not self.is_product():
            return None
        m = self.matrix() if photon == 1 else self.matrix().T
        # the largest column is a non-vanishing multiple of the factor
        col = int(np.argmax(np.linalg.norm(m, axis=0)))
        return _normalized(m[:, col])

    def __eq__(self, other):
        if not isinstance(other, PolState):
            return NotImplemented
        return self.primed == other.primed and np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash((self.amplitudes.tobytes(), self.primed))

    def __repr__(self):
        tag = ", primed" if self.primed else ""
        return f"PolState({np.array2string(self.amplitudes, precision=6)}{tag})"


def _normalized(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise PolarizationError("cannot normalize a zero vector")
    return v / n


def singlet() -> PolState:
    return PolState(np.array([0.0, _SQRT1_2, -_SQRT1_2, 0.0], dtype=complex))


# -- operators --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SinglePhotonOp:
    matrix: np.ndarray
    primed: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise PolarizationError(f"operator must be 2x2, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise PolarizationError("operator is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __add__(self, other: SinglePhotonOp) -> SinglePhotonOp:
        return SinglePhotonOp(self.matrix + other.matrix, self.primed)

    def __sub__(self, other: SinglePhotonOp) -> SinglePhotonOp:
        return SinglePhotonOp(self.matrix - other.matrix, self.primed)

    def __neg__(self) -> SinglePhotonOp:
        return SinglePhotonOp(-self.matrix, self.primed)

    def __mul__(self, k: float) -> SinglePhotonOp:
        return SinglePhotonOp(self.matrix * float(k), self.primed)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> SinglePhotonOp:
        return SinglePhotonOp(self.matrix / float(k), self.primed)

    def __eq__(self, other):
        if not isinstance(other, SinglePhotonOp):
            return NotImplemented
        return self.primed == other.primed and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.matrix.tobytes(), self.primed))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def bloch(self) -> tuple[float, float, float, float]:
        """Coefficients ``(c0, c1, c2, c3)`` with op = c0*I + sum ck*sigma_k."""
        m = self.matrix
        c0 = (m[0, 0] + m[1, 1]).real / 2
        c3 = (m[0, 0] - m[1, 1]).real / 2
        c1 = m[0, 1].real
        c2 = -m[0, 1].imag
        return (float(c0), float(c1), float(c2), float(c3))


IDENTITY = SinglePhotonOp(np.eye(2))
SIGMA_1 = SinglePhotonOp(np.outer(KET_Z, KET_Y) + np.outer(KET_Y, KET_Z))
SIGMA_2 = SinglePhotonOp(1j * (-np.outer(KET_Z, KET_Y) + np.outer(KET_Y, KET_Z)))
SIGMA_3 = SinglePhotonOp(np.outer(KET_Z, KET_Z) - np.outer(KET_Y, KET_Y))


def chsh_operators() -> dict[str, SinglePhotonOp]:
    """The CHSH settings ``a1, b1`` (photon 1) and ``a2, b2`` (photon 2)."""
    return {
        "a1": SIGMA_3,
        "b1": SIGMA_1,
        "a2": -(SIGMA_1 + SIGMA_3) / math.sqrt(2.0),
        "b2": (SIGMA_1 - SIGMA_3) / math.sqrt(2.0),
    }


def _check_state(s: PolState):
    if not isinstance(s, PolState):
        raise TypeError(f"expected PolState, got {type(s).__name__}")


def _as_op(op) -> SinglePhotonOp:
    return op if isinstance(op, SinglePhotonOp) else SinglePhotonOp(op)


def expectation(s: PolState, op1, op2) -> float:
    """``<s| op1 (x) op2 |s>`` for Hermitian single-photon operators."""
    _check_state(s)
    a = _as_op(op1).matrix
    b = _as_op(op2).matrix
    m = s.matrix()
    value = np.einsum("ij,ik,jl,kl->", m.conj(), a, b, m)
    if abs(value.imag) > 1e-12:
        raise PolarizationError(f"expectation is not real: {value!r}")
    return float(value.real)


def chsh_value(s: PolState, a1, b1, a2, b2) -> float:
    """<a1 a2> + <a1 b2> + <b1 a2> - <b1 b2>."""
    ops = [_as_op(o) for o in (a1, b1, a2, b2)]
    for name, op in zip(("a1", "b1", "a2", "b2"), ops):
        ev = op.eigenvalues()
        if ev.min() < -1.0 - 1e-12 or ev.max() > 1.0 + 1e-12:
            raise PolarizationError(f"{name} has eigenvalues outside [-1, 1]: {ev}")
    a1, b1, a2, b2 = ops
    return (
        expectation(s, a1, a2)
        + expectation(s, a1, b2)
        + expectation(s, b1, a2)
        - expectation(s, b1, b2)
    )


# -- measurement ------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementBasis:
    theta: float

    @property
    def detected(self) -> np.ndarray:
        return math.cos(self.theta) * KET_Y + math.sin(self.theta) * KET_Z

    @property
    def transmitted(self) -> np.ndarray:
        return math.cos(self.theta) * KET_Z - math.sin(self.theta) * KET_Y

    def observable(self) -> SinglePhotonOp:
        """+1 on the transmitted state, -1 on the detected state."""
        t, d = self.transmitted, self.detected
        return SinglePhotonOp(np.outer(t, t.conj()) - np.outer(d, d.conj()))

    def aligned(self) -> MeasurementBasis:
        """The basis that fires on this basis's transmitted state."""
        return MeasurementBasis(self.theta + math.pi / 2)

    @classmethod
    def from_observable(cls, op: SinglePhotonOp) -> MeasurementBasis:
        """Basis whose ``observable()`` equals a unit-norm ``c1*sigma_1 + c3*sigma_3``.

        Closed form: the observable of angle theta is
        ``cos(2 theta) sigma_3 - sin(2 theta) sigma_1``.
        """
        c0, c1, c2, c3 = op.bloch()
        if abs(c0) > 1e-12 or abs(c2) > 1e-12 or abs(math.hypot(c1, c3) - 1.0) > 1e-12:
            raise PolarizationError("only unit-norm real combinations of sigma_1 and sigma_3 map to a linear polarizer")
        return cls(0.5 * math.atan2(-c1, c3))


@dataclass(frozen=True)
class Outcome:
    fired: bool
    value: int
    collapsed: PolState
    probability: float


def _snap(p: float) -> float:
    if p < CERTAINTY_TOL:
        return 0.0
    if p > 1.0 - CERTAINTY_TOL:
        return 1.0
    return p


def project(s: PolState, photon: int, ket: np.ndarray) -> tuple[float, Optional[PolState]]:
    """Probability of finding ``photon`` in ``ket`` and the normalized post-measurement state."""
    _check_state(s)
    if photon not in (1, 2):
        raise PolarizationError(f"photon must be 1 or 2, got {photon!r}")
    ket = _normalized(np.asarray(ket, dtype=complex))
    m = s.matrix()
    if photon == 1:
        partner = ket.conj() @ m
        post = np.kron(ket, partner)
    else:
        partner = m @ ket.conj()
        post = np.kron(partner, ket)
    p = float(np.vdot(partner, partner).real)
    p = _snap(p)
    if p == 0.0:
        return 0.0, None
    return p, PolState(post / np.linalg.norm(post), s.primed)


def firing_probability(s: PolState, photon: int, basis: MeasurementBasis) -> float:
    return project(s, photon, basis.detected)[0]


def measure_photon(s: PolState, photon: int, basis: MeasurementBasis, rng: np.random.Generator) -> Outcome:
    """Projective measurement of one photon with Born-rule sampling."""
    p_fire, fired_state = project(s, photon, basis.detected)
    fired = bool(rng.random() < p_fire)
    if fired:
        return Outcome(True, -1, fired_state, p_fire)
    p_pass, passed_state = project(s, photon, basis.transmitted)
    return Outcome(False, +1, passed_state, p_pass)


# -- frame mapping ----------------------------------------------------------


def frame_map(s: PolState) -> PolState:
    """Express ``s`` in a boosted frame's basis; amplitudes are unchanged."""
    _check_state(s)
    return PolState(s.amplitudes, primed=True)


def frame_map_op(op: SinglePhotonOp) -> SinglePhotonOp:
    return SinglePhotonOp(_as_op(op).matrix, primed=True)


# -- labels -----------------------------------------------------------------

_NAMED_KETS = (("z", KET_Z), ("y", KET_Y), ("d+", KET_DPLUS), ("d-", KET_DMINUS))


def ket_label(ket: Optional[np.ndarray], tol: float = 1e-10) -> str:
    """Name of a single-photon linear polarization state, up to global phase."""
    if ket is None:
        return "entangled"
    ket = _normalized(np.asarray(ket, dtype=complex))
    for name, ref in _NAMED_KETS:
        if abs(abs(np.vdot(ref, ket)) - 1.0) <= tol:
            return name
    # strip the global phase using the larger component
    k = int(np.argmax(np.abs(ket)))
    real = ket * np.exp(-1j * np.angle(ket[k]))
    if np.max(np.abs(real.imag)) > tol:
        return f"elliptical({real[0].real:.6f},{real[1]:.6f})"
    theta = math.atan2(real[0].real, real[1].real) % math.pi
    return f"lin({theta:.6f})"


def photon_label(s: PolState, photon: int) -> str:
    return ket_label(s.photon_state(photon))
