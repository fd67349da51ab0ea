import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relcollapse.wavepacket import (
    AliasingError,
    GridError,
    JointSpatialState,
    MomentumAmplitude,
    PositionField,
    WavepacketError,
    collapse_trigger_time,
    detector_overlap,
    doppler_factor,
    doppler_transform,
    evolve_phase,
    invariant_phase_check,
    joint_state,
    lorentz_momentum,
    position_wavefunction,
    transformed_amplitude,
    uniform_grid,
)

GRID = np.linspace(-4.0, 9.0, 1301)  # dx = 0.01


def gaussian_oracle(x, p0, sigma):
    # closed-form Fourier transform of the momentum Gaussian at t = 0
    return (2 * sigma**2 / math.pi) ** 0.25 * np.exp(1j * p0 * x) * np.exp(-(sigma**2) * x**2)


def l2(a, b, dx):
    return math.sqrt(np.sum(np.abs(a - b) ** 2) * dx)


@pytest.mark.parametrize("p0,sigma", [(20.0, 2.0), (-20.0, 2.0), (40.0, 5.0)])
def test_matches_analytic_gaussian(p0, sigma):
    f = position_wavefunction(MomentumAmplitude(p0, sigma), GRID)
    # the hard cutoff at p0 +/- 8 sigma leaves ringing of order exp(-16)
    assert l2(f.values, gaussian_oracle(GRID, p0, sigma), f.dx) < 1e-7
    assert f.norm() == pytest.approx(1.0, abs=1e-9)


def test_momentum_norm():
    assert MomentumAmplitude(20.0, 2.0).norm() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 2.5, 5.0])
def test_norm_conserved(t):
    f = position_wavefunction(MomentumAmplitude(20.0, 2.0), GRID, t)
    assert abs(f.norm() - 1.0) <= 1e-6


@pytest.mark.parametrize("t", [1.0, 2.5, 5.0])
def test_rigid_translation_at_c(t):
    m = MomentumAmplitude(20.0, 2.0)
    moved = position_wavefunction(m, GRID, t)
    # a sign-definite packet with E = |p| satisfies psi(x, t) = psi(x - t, 0) e^{...} up to phase
    shifted = position_wavefunction(m, GRID - t)
    err = l2(np.abs(moved.values), np.abs(shifted.values), moved.dx)
    assert err <= 1e-6
    assert moved.centroid() == pytest.approx(t, abs=1e-6)


def test_left_mover_travels_left():
    f = position_wavefunction(MomentumAmplitude(-20.0, 2.0), np.linspace(-9, 4, 1301), 5.0)
    assert f.centroid() == pytest.approx(-5.0, abs=1e-6)


def test_evolve_phase_matches_direct_time_argument():
    m = MomentumAmplitude(20.0, 2.0)
    a = position_wavefunction(evolve_phase(m, 1.5), GRID)
    b = position_wavefunction(m, GRID, 1.5)
    np.testing.assert_allclose(a.values, b.values, atol=1e-13)
    assert a.t == b.t == 1.5


def test_aliasing_guard():
    with pytest.raises(AliasingError):
        position_wavefunction(MomentumAmplitude(20.0, 2.0), np.linspace(-4, 4, 11))
    # the threshold itself is allowed
    position_wavefunction(MomentumAmplitude(20.0, 2.0), np.linspace(-5, 5, 201))


def test_grid_guards():
    with pytest.raises(GridError):
        position_wavefunction(MomentumAmplitude(20.0, 2.0), np.linspace(-0.5, 0.5, 101))
    with pytest.raises(GridError):
        position_wavefunction(MomentumAmplitude(20.0, 2.0), np.array([0.0, 0.01, 0.03]))
    with pytest.raises(WavepacketError):
        MomentumAmplitude(20.0, 2.0).momentum_grid(100)


def test_amplitude_validation():
    with pytest.raises(WavepacketError):
        MomentumAmplitude(20.0, 0.0)
    with pytest.raises(WavepacketError):
        MomentumAmplitude(0.0, 1.0)


def test_doppler_factors_at_three_fifths():
    assert doppler_factor(1, 0.6) == pytest.approx(0.5, abs=1e-10)
    assert doppler_factor(-1, 0.6) == pytest.approx(2.0, abs=1e-10)
    assert doppler_factor(1, 0.6) * doppler_factor(-1, 0.6) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(min_value=-0.99, max_value=0.99))
def test_doppler_factor_agrees_with_lorentz_momentum(beta):
    for p in (1.0, -1.0):
        p2, e2 = lorentz_momentum(p, abs(p), beta)
        assert p2 / p == pytest.approx(doppler_factor(int(p), beta), rel=1e-12)
        assert e2 == pytest.approx(abs(p2), rel=1e-12)


def test_doppler_transform_scales_packet():
    m = MomentumAmplitude(20.0, 2.0)
    r = doppler_transform(m, 0.6)
    assert (r.p0, r.sigma_p) == pytest.approx((10.0, 1.0), abs=1e-12)
    l = doppler_transform(MomentumAmplitude(-20.0, 2.0), 0.6)
    assert (l.p0, l.sigma_p) == pytest.approx((-40.0, 4.0), abs=1e-12)
    back = doppler_transform(r, -0.6)
    assert (back.p0, back.sigma_p) == pytest.approx((20.0, 2.0), abs=1e-12)


def test_boost_separates_frequencies():
    # after a boost the right mover is redshifted and the left mover blueshifted
    r = doppler_transform(MomentumAmplitude(20.0, 2.0), 0.6)
    l = doppler_transform(MomentumAmplitude(-20.0, 2.0), 0.6)
    assert r.energy < 20.0 < l.energy


@pytest.mark.parametrize("beta", [-0.6, 0.3, 0.6, 0.9])
@pytest.mark.parametrize("p0", [20.0, -20.0])
def test_change_of_variables_matches_closed_form(beta, p0):
    m = MomentumAmplitude(p0, 2.0)
    r = doppler_transform(m, beta)
    p_prime, dp = r.momentum_grid()
    np.testing.assert_allclose(transformed_amplitude(m, beta, p_prime), r.amplitude(p_prime), atol=1e-12)
    assert np.sum(np.abs(transformed_amplitude(m, beta, p_prime)) ** 2) * dp == pytest.approx(1.0, abs=1e-10)


def test_doppler_transform_requirements():
    with pytest.raises(WavepacketError):
        doppler_transform(MomentumAmplitude(5.0, 2.0), 0.6)
    with pytest.raises(WavepacketError):
        doppler_transform(evolve_phase(MomentumAmplitude(20.0, 2.0), 1.0), 0.6)


def test_invariant_phase_sweep():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        p = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 10)
        x, ct = rng.uniform(-10, 10, 2)
        beta = rng.uniform(-0.99, 0.99)
        a, b = invariant_phase_check(p, abs(p), x, ct, beta)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(p) * (abs(x) + abs(ct))) * 10


def test_invariant_phase_requires_on_shell():
    with pytest.raises(WavepacketError):
        invariant_phase_check(1.0, 2.0, 0.0, 0.0, 0.5)


def test_detector_overlap():
    f = position_wavefunction(MomentumAmplitude(20.0, 2.0), GRID)
    assert detector_overlap(f, 0.0, 0.0) == 0.0
    assert detector_overlap(f, 0.0, 3.9) == pytest.approx(1.0, abs=1e-6)
    # half the Gaussian lies right of its center
    assert detector_overlap(f, 2.0, 2.0) == pytest.approx(0.5, abs=1e-4)
    # sigma_x = 1/(2 sigma): one standard deviation holds erf(1/sqrt 2)
    sx = 1 / (2 * 2.0)
    assert detector_overlap(f, 0.0, sx) == pytest.approx(math.erf(1 / math.sqrt(2)), abs=1e-4)
    with pytest.raises(GridError):
        detector_overlap(f, 8.95, 0.1)


def test_csv_round_trip(tmp_path):
    f = position_wavefunction(MomentumAmplitude(20.0, 2.0), GRID, 0.7)
    path = f.to_csv(tmp_path / "psi.csv")
    g = PositionField.from_csv(path, t=0.7)
    np.testing.assert_array_equal(g.grid, f.grid)
    np.testing.assert_array_equal(g.values, f.values)
    assert path.read_text().splitlines()[0] == "x,re,im,abs2"


def test_joint_state_is_product():
    j = joint_state(MomentumAmplitude(20.0, 2.0), MomentumAmplitude(-20.0, 2.0), uniform_grid(16, 1601), 2.0)
    assert isinstance(j, JointSpatialState)
    assert j.norm() == pytest.approx(1.0, abs=1e-9)
    amp = j.amplitude()
    assert amp.shape == (1601, 1601)
    assert j.packet1.centroid() == pytest.approx(2.0, abs=1e-6)
    assert j.packet2.centroid() == pytest.approx(-2.0, abs=1e-6)


def test_trigger_time():
    t = collapse_trigger_time(MomentumAmplitude(200.0, 20.0), 1.0)
    # the packet center reaches the detector at ct = 1; half the mass sits inside
    # the 0.1 wide window within about a quarter width of arrival
    assert 0.9 < t < 1.0
    assert t == pytest.approx(0.955, abs=1e-9)
    with pytest.raises(WavepacketError):
        collapse_trigger_time(MomentumAmplitude(20.0, 2.0), 1.0, half_width=0.05)
