"""Adaptive initial-value integration with dense output and zero-crossing events.

The stepper is an embedded Runge-Kutta 5(4) pair (scipy's RK45) driven by a
loop that enforces a step budget, rejects non-finite states early, localizes
sign changes of a tracked component on the dense interpolant, and can stop at
caller-supplied checkpoints.  Everything here is deterministic: the same
system, initial state and config always produce the same trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import RK45, OdeSolution
from scipy.optimize import brentq

from .errors import NonFiniteState, StepLimitExceeded

# exp(2u) overflows IEEE doubles long before this; a component this large means
# the model left its region of validity, so abort rather than propagate inf.
NONFINITE_LIMIT = 1e150

# Absolute precision in t to which sign changes are polished on the dense
# interpolant (bracketing + inverse quadratic interpolation via brentq).
EVENT_XTOL = 1e-12


@dataclass(frozen=True)
class OdeSystem:
    """A first-order system y' = rhs(t, y).

    ``rhs`` must be deterministic and side-effect free; it is called many
    times per step and from checkpoint callbacks.
    """

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    description: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("system dimension must be >= 1")


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and span for one integration run."""

    t_span: tuple[float, float]
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 200_000

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        t0, t1 = self.t_span
        if not (math.isfinite(t0) and math.isfinite(t1)) or t0 == t1:
            raise ValueError("t_span must be two distinct finite values")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


class ZeroEvent(NamedTuple):
    t: float
    component: int


@dataclass
class Trajectory:
    """Accepted steps of one integration plus localized zero crossings.

    ``times``/``states`` hold the step endpoints in integration order (strictly
    monotone in t).  ``solution`` is the piecewise dense interpolant covering
    [times[0], times[-1]]; synthetic trajectories built from closed forms may
    carry ``solution=None``.
    """

    times: np.ndarray
    states: np.ndarray
    events: list[ZeroEvent]
    solution: OdeSolution | None = None
    stopped_at: float | None = None  # checkpoint that ended the run early

    @property
    def nodes(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.times.tolist(), self.states))

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        if self.solution is None:
            raise ValueError("trajectory has no dense interpolant")
        return self.solution(t)


def integrate(
    system: OdeSystem,
    y0: Sequence[float],
    config: IntegratorConfig,
    track_zero_of: int | None = None,
    *,
    watch_times: Sequence[float] | None = None,
    watch: Callable[[float, np.ndarray], bool] | None = None,
) -> Trajectory:
    """Integrate ``system`` from ``y0`` over ``config.t_span``.

    Every sign change of component ``track_zero_of`` between accepted steps is
    localized to EVENT_XTOL in t by root polishing on the dense interpolant.

    ``watch`` is evaluated at each of ``watch_times`` (in integration order,
    via dense output); returning True stops the run at that checkpoint.  The
    trajectory then ends at the step containing it and ``stopped_at`` records
    the checkpoint.

    Raises StepLimitExceeded when ``max_steps`` is hit and NonFiniteState when
    a component exceeds NONFINITE_LIMIT, turns NaN, or the stepper underflows.
    """
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (system.dimension,):
        raise ValueError(f"y0 must have length {system.dimension}")
    if track_zero_of is not None and not 0 <= track_zero_of < system.dimension:
        raise ValueError("tracked component out of range")

    t0, t_bound = config.t_span
    forward = t_bound > t0

    def rhs(t, y):
        return np.asarray(system.rhs(t, y), dtype=float)

    solver = RK45(
        rhs, t0, y0, t_bound,
        rtol=config.rel_tol, atol=config.abs_tol, max_step=config.max_step,
    )

    times = [t0]
    states = [y0.copy()]
    interpolants = []
    events: list[ZeroEvent] = []

    pending = []
    if watch_times is not None:
        pending = sorted(watch_times, reverse=not forward)
        pending = [t for t in pending if (t > t0) == forward or t == t_bound]
    widx = 0

    stopped_at = None
    nsteps = 0
    while solver.status == "running":
        if nsteps >= config.max_steps:
            raise StepLimitExceeded(
                f"no convergence within {config.max_steps} steps (t={solver.t:.6g})"
            )
        msg = solver.step()
        nsteps += 1
        if solver.status == "failed":
            raise NonFiniteState(f"stepper failed at t={solver.t:.6g}: {msg}")
        y = solver.y
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > NONFINITE_LIMIT:
            raise NonFiniteState(f"state blew up at t={solver.t:.6g}")

        dense = solver.dense_output()
        interpolants.append(dense)
        t_prev, y_prev = times[-1], states[-1]

        if track_zero_of is not None:
            c = track_zero_of
            a, b = y_prev[c], y[c]
            if b == 0.0:
                events.append(ZeroEvent(float(solver.t), c))
            elif a != 0.0 and (a < 0.0) != (b < 0.0):
                lo, hi = sorted((t_prev, float(solver.t)))
                t_ev = brentq(lambda tt: float(dense(tt)[c]), lo, hi, xtol=EVENT_XTOL)
                events.append(ZeroEvent(float(t_ev), c))

        times.append(float(solver.t))
        states.append(y.copy())

        if watch is not None:
            while widx < len(pending):
                tc = pending[widx]
                reached = tc <= solver.t if forward else tc >= solver.t
                if not reached:
                    break
                widx += 1
                if watch(tc, np.asarray(dense(tc), dtype=float)):
                    stopped_at = tc
                    break
            if stopped_at is not None:
                break

    ts = np.asarray(times)
    solution = OdeSolution(ts, interpolants) if interpolants else None
    return Trajectory(
        times=ts,
        states=np.asarray(states),
        events=events,
        solution=solution,
        stopped_at=stopped_at,
    )
