import math

import numpy as np
import pytest

from liouville_lab.errors import NonFiniteState, StepLimitExceeded
from liouville_lab.ivp import IntegratorConfig, OdeSystem, Trajectory, integrate

CONST = OdeSystem(1, lambda t, y: np.zeros(1), "y' = 0")
HARMONIC = OdeSystem(2, lambda t, y: np.array([y[1], -y[0]]), "y'' = -y")


def test_constant_system_identity():
    traj = integrate(CONST, [1.0], IntegratorConfig((0.0, 10.0)))
    assert traj.t_end == 10.0
    np.testing.assert_allclose(traj.states, 1.0)
    assert traj.events == []


def test_harmonic_event_at_pi():
    # closed form y = sin(t): tracked component 0 crosses zero at pi (and 2*pi)
    traj = integrate(
        HARMONIC, [0.0, 1.0], IntegratorConfig((0.0, 2 * math.pi)), track_zero_of=0
    )
    assert traj.events, "expected at least the crossing at pi"
    assert abs(traj.events[0].t - math.pi) < 1e-10
    for ev in traj.events:
        assert min(abs(ev.t - math.pi), abs(ev.t - 2 * math.pi)) < 1e-10


def test_dense_output_matches_closed_form():
    traj = integrate(HARMONIC, [0.0, 1.0], IntegratorConfig((0.0, 2 * math.pi)))
    ts = np.linspace(0.1, 6.0, 40)
    np.testing.assert_allclose(traj(ts)[0], np.sin(ts), atol=1e-9)


def test_emden_fowler_matches_explicit_profile():
    # Transformed radial Liouville equation at N=4 with the closed-form central
    # value: v(t) = 0.5*log(12) - 3*log(1+e^{2t}) solves v'' = -e^{2t}(1+e^{2t})^4 e^{2v}.
    N = 4.0
    a = 0.5 * math.log(12.0)

    def rhs(t, y):
        lq = 2 * t + N * (2 * t + math.log1p(math.exp(-2 * t)) if t > 0 else math.log1p(math.exp(2 * t)))
        return np.array([y[1], -math.exp(lq + 2 * y[0])])

    sys = OdeSystem(2, rhs)
    r0 = 1e-6
    t0 = math.log(r0)
    e2a = math.exp(2 * a)
    u2, u4 = -e2a / 4, -e2a * (N - e2a / 2) / 16
    y0 = [a + u2 * r0**2 + u4 * r0**4, 2 * u2 * r0**2 + 4 * u4 * r0**4]
    traj = integrate(sys, y0, IntegratorConfig((t0, 8.0), rel_tol=1e-12, abs_tol=1e-14))

    ts = np.linspace(t0, 8.0, 200)
    v_exact = a - (N / 2 + 1) * np.log1p(np.exp(2 * ts))
    assert np.max(np.abs(traj(ts)[0] - v_exact)) < 1e-8


def test_refinement_convergence():
    # halving both tolerances moves reported states by far less than 10x the
    # original tolerance
    y0 = [0.0, 1.0]
    span = (0.0, 5.0)
    coarse = integrate(HARMONIC, y0, IntegratorConfig(span, rel_tol=1e-8, abs_tol=1e-10))
    fine = integrate(HARMONIC, y0, IntegratorConfig(span, rel_tol=5e-9, abs_tol=5e-11))
    ts = np.linspace(0.5, 5.0, 20)
    assert np.max(np.abs(coarse(ts) - fine(ts))) < 10 * 1e-8


def test_bitwise_determinism():
    cfg = IntegratorConfig((0.0, 7.0))
    a = integrate(HARMONIC, [0.0, 1.0], cfg, track_zero_of=0)
    b = integrate(HARMONIC, [0.0, 1.0], cfg, track_zero_of=0)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)
    assert a.events == b.events


def test_forward_backward_roundtrip():
    rel = 1e-10
    fwd = integrate(HARMONIC, [0.0, 1.0], IntegratorConfig((0.0, 4.0), rel_tol=rel))
    back = integrate(HARMONIC, fwd.states[-1], IntegratorConfig((4.0, 0.0), rel_tol=rel))
    assert np.max(np.abs(back.states[-1] - [0.0, 1.0])) < 100 * rel


def test_step_limit():
    with pytest.raises(StepLimitExceeded):
        integrate(HARMONIC, [0.0, 1.0], IntegratorConfig((0.0, 100.0), max_steps=3))


def test_nonfinite_state_on_blowup():
    # y' = y^2 from y(0)=1 blows up at t=1
    sys = OdeSystem(1, lambda t, y: y * y)
    with pytest.raises(NonFiniteState):
        integrate(sys, [1.0], IntegratorConfig((0.0, 2.0)))


def test_watch_stops_early():
    hits = []

    def watch(t, y):
        hits.append(t)
        return t >= 3.0

    traj = integrate(
        HARMONIC, [0.0, 1.0], IntegratorConfig((0.0, 10.0)),
        watch_times=[1.0, 2.0, 3.0, 4.0], watch=watch,
    )
    assert traj.stopped_at == 3.0
    assert hits == [1.0, 2.0, 3.0]
    assert traj.t_end >= 3.0


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        IntegratorConfig((0.0, 0.0))
    with pytest.raises(ValueError):
        IntegratorConfig((0.0, 1.0), rel_tol=-1.0)
    with pytest.raises(ValueError):
        integrate(HARMONIC, [1.0], IntegratorConfig((0.0, 1.0)))
    with pytest.raises(ValueError):
        integrate(HARMONIC, [0.0, 1.0], IntegratorConfig((0.0, 1.0)), track_zero_of=5)
