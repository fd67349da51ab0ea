import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relcollapse.kinematics import (
    Boost,
    DegenerateError,
    Detector,
    DomainError,
    Event,
    IntervalKind,
    NoIntersection,
    Photon,
    SimultaneityLine,
    boost_event,
    intersect,
    interval,
    past_reach,
    precedes,
    simultaneity_partner,
)

betas = st.floats(min_value=-0.95, max_value=0.95)
coords = st.floats(min_value=-50, max_value=50)
events = st.builds(Event, coords, coords)


def exact_boost(x, ct, beta):
    # beta = 3/5 has gamma = 5/4, so the whole transform is rational
    beta = Fraction(beta)
    gamma_sq = 1 / (1 - beta * beta)
    num, den = gamma_sq.numerator, gamma_sq.denominator
    root_n, root_d = math.isqrt(num), math.isqrt(den)
    assert root_n**2 == num and root_d**2 == den
    g = Fraction(root_n, root_d)
    x, ct = Fraction(x), Fraction(ct)
    return g * (x - beta * ct), g * (ct - beta * x)


@pytest.mark.parametrize(
    "beta,x,ct",
    [("3/5", 1, 1), ("3/5", -1, 1), ("3/5", 2, 0), ("-3/5", 1, 1), ("4/5", 3, -2), ("5/13", 7, 11)],
)
def test_boost_matches_rational_oracle(beta, x, ct):
    ex, ect = exact_boost(x, ct, Fraction(beta))
    got = boost_event(Event(x, ct), float(Fraction(beta)))
    assert got.x == pytest.approx(float(ex), abs=1e-12)
    assert got.ct == pytest.approx(float(ect), abs=1e-12)


def test_gamma_and_doppler_at_three_fifths():
    b = Boost(0.6)
    assert b.gamma == pytest.approx(1.25, abs=1e-15)
    assert b.doppler == pytest.approx(0.5, abs=1e-15)
    assert b.inverse().doppler == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("beta", [1.0, -1.0, 1.5, math.nan, math.inf])
def test_boost_rejects_superluminal(beta):
    with pytest.raises(DomainError):
        Boost(beta)


def test_event_rejects_non_finite():
    with pytest.raises(DomainError):
        Event(math.nan, 0.0)


@given(events, betas)
def test_round_trip(e, beta):
    back = boost_event(boost_event(e, beta), -beta)
    assert back.x == pytest.approx(e.x, abs=1e-12 * max(1, abs(e.x) + abs(e.ct)) * 10)
    assert back.ct == pytest.approx(e.ct, abs=1e-12 * max(1, abs(e.x) + abs(e.ct)) * 10)


@given(events, events, betas)
def test_interval_invariant(e1, e2, beta):
    s = interval(e1, e2).s_squared
    s_b = interval(boost_event(e1, beta), boost_event(e2, beta)).s_squared
    scale = max(1.0, (abs(e1.x) + abs(e1.ct) + abs(e2.x) + abs(e2.ct)) ** 2)
    assert s_b == pytest.approx(s, abs=1e-12 * scale * 20)


@given(betas, betas, events)
def test_velocity_addition_is_composition(b1, b2, e):
    chained = boost_event(boost_event(e, b1), b2)
    direct = boost_event(e, Boost(b1).then(Boost(b2)))
    tol = 1e-9 * max(1, abs(e.x) + abs(e.ct))
    assert chained.x == pytest.approx(direct.x, abs=tol)
    assert chained.ct == pytest.approx(direct.ct, abs=tol)


def test_interval_classification():
    o = Event(0, 0)
    assert interval(o, Event(1, 1)).kind is IntervalKind.LIGHTLIKE
    assert interval(o, Event(2, 1)).kind is IntervalKind.SPACELIKE
    assert interval(o, Event(1, 2)).kind is IntervalKind.TIMELIKE
    assert interval(Event(1, 1), Event(-1, 1)).s_squared == 4.0


@given(betas, st.floats(min_value=-10, max_value=10))
def test_photon_slope_survives_boost(beta, ct):
    for direction in (1, -1):
        p = Photon(Event(0.0, 0.0), direction)
        e1, e2 = boost_event(p.at(ct), beta), boost_event(p.at(ct + 1.0), beta)
        assert (e2.x - e1.x) / (e2.ct - e1.ct) == pytest.approx(direction, abs=1e-10)


def test_order_reversal_for_spacelike_pair():
    d, b = Event(1, 1), Event(-1, 1)
    assert not precedes(d, b) and not precedes(b, d)
    assert precedes(d, b, 0.6)
    assert precedes(b, d, -0.6)


def test_timelike_order_is_absolute():
    e1, e2 = Event(0, 0), Event(0.3, 1)
    assert all(precedes(e1, e2, beta) for beta in np.linspace(-0.99, 0.99, 41))


def test_intersections():
    p1 = Photon(Event(0, 0), 1)
    p2 = Photon(Event(0, 0), -1)
    assert intersect(p1, Detector(1.0)) == Event(1.0, 1.0)
    assert intersect(p1, p2) == Event(0.0, 0.0)
    assert intersect(p1, Photon(Event(1, 0), 1)) is None
    with pytest.raises(DegenerateError):
        intersect(p1, Photon(Event(2, 2), 1))


def test_moving_detector_worldline():
    det = Detector(1.0, 0.6)
    # rest position 1 in the frame moving at 0.6
    for ct in (0.0, 1.0, 3.0):
        assert boost_event(det.at(ct), 0.6).x == pytest.approx(1.0, abs=1e-12)


def test_simultaneity_line_through_anchor():
    anchor = Event(1, 1)
    line = SimultaneityLine.through(anchor, 0.6)
    hit = intersect(line, Photon(Event(0, 0), -1))
    assert hit.x == pytest.approx(-0.25, abs=1e-12)
    assert hit.ct == pytest.approx(0.25, abs=1e-12)


def test_reference_geometry():
    d = Event(1.0, 1.0)
    left, right = Photon(Event(0, 0), -1), Photon(Event(0, 0), 1)
    b = simultaneity_partner(d, left, 0.0)
    assert b == Event(-1.0, 1.0)
    a = simultaneity_partner(d, left, 0.6)
    assert a.as_tuple() == pytest.approx((-0.25, 0.25), abs=1e-12)
    f = simultaneity_partner(b, right, 0.6)
    assert f.as_tuple() == pytest.approx((4.0, 4.0), abs=1e-12)
    assert past_reach(d, a, 0.6) == pytest.approx(0.75, abs=1e-12)
    a_neg = simultaneity_partner(d, left, -0.6)
    assert a_neg.as_tuple() == pytest.approx((-4.0, 4.0), abs=1e-12)
    assert simultaneity_partner(b, right, -0.6).as_tuple() == pytest.approx((0.25, 0.25), abs=1e-12)


@pytest.mark.parametrize("beta", [i / 10 for i in range(1, 10)])
def test_past_reach_law(beta):
    d = Event(1.0, 1.0)
    a = simultaneity_partner(d, Photon(Event(0, 0), -1), beta)
    assert past_reach(d, a, beta) == pytest.approx(beta * (d.x - a.x), abs=1e-12)
    # closed form t_a = t_d (1 - beta) / (1 + beta)
    assert a.ct == pytest.approx((1 - beta) / (1 + beta), abs=1e-12)


def test_partner_of_parallel_line():
    # a photon never meets the simultaneity line of a frame approaching c, but
    # for |beta| < 1 the only parallel case is a detector moving with the line
    with pytest.raises(NoIntersection):
        simultaneity_partner(Event(0, 0), SimultaneityLine(0.5, 3.0), 0.5)


@given(st.floats(min_value=-0.99, max_value=0.99), st.floats(min_value=0.01, max_value=100), st.floats(min_value=-100, max_value=100))
def test_partner_lies_on_photon_exactly(beta, ct_d, x_o):
    src = Event(x_o, 0.0)
    d = Photon(src, 1).at(ct_d)
    a = simultaneity_partner(d, Photon(src, -1), beta)
    assert a.x == x_o - a.ct
    tol = 1e-12 * max(1.0, abs(x_o) + ct_d) * Boost(beta).gamma * 4
    assert abs(boost_event(a, beta).ct - boost_event(d, beta).ct) <= tol


def test_ten_thousand_random_boosts():
    rng = np.random.default_rng(11)
    worst_rt = worst_int = 0.0
    for _ in range(10_000):
        beta = rng.uniform(-0.99, 0.99)
        e1 = Event(*rng.uniform(-10, 10, 2))
        e2 = Event(*rng.uniform(-10, 10, 2))
        back = boost_event(boost_event(e1, beta), -beta)
        worst_rt = max(worst_rt, abs(back.x - e1.x), abs(back.ct - e1.ct))
        s, sb = interval(e1, e2).s_squared, interval(boost_event(e1, beta), boost_event(e2, beta)).s_squared
        worst_int = max(worst_int, abs(s - sb))
    assert worst_rt <= 1e-12
    assert worst_int <= 1e-10
