"""Flow ODE systems, adaptive integration, and cone-boundary event detection.

Each system evolves by x_i' = -2 r_i x_i with the matching Ricci
eigenvalues; the normalized planar system is the volume-one reduction of the
three-parameter family.  Integration wraps an embedded Runge-Kutta 4(5) pair
with dense output; events are scalar sign changes refined on the dense
interpolant well below the 1e-10 time-accuracy requirement.

Termination modes of `integrate`:
  * "horizon"  - reached config.max_time,
  * "event"    - a terminal event fired (the event is recorded),
  * "singular" - a state component fell below config.abs_tol (the flow is
                 collapsing); the trajectory is truncated there and a
                 "singular" event is recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import cone
from .errors import NonPositiveState, NoExitWithinHorizon, StepSizeUnderflow
from .spaces import aw_eigenvalue_tuple, berger_eigenvalue_tuple, xi_value

__all__ = [
    "IntegratorConfig",
    "EventSpec",
    "FlowEvent",
    "Trajectory",
    "FlowSystem",
    "make_system",
    "aw_rhs",
    "aw3_rhs",
    "aw2_rhs",
    "berger_rhs",
    "normalized_rhs",
    "integrate",
    "cone_exit",
    "boundary_event",
    "window_event",
    "post_exit_verdict",
]

SYSTEM_KINDS = ("aw2", "aw3", "aw4", "berger", "normalized")
_SYSTEM_DIMS = {"aw2": 2, "aw3": 3, "aw4": 4, "berger": 2, "normalized": 2}


def aw_rhs(state, xi) -> np.ndarray:
    """Four-parameter Aloff-Wallach flow: (t', s0', s1', s2') = -2 r_i * state."""
    t, s0, s1, s2 = state
    r0, r1, r2, r3 = aw_eigenvalue_tuple(t, s0, s1, s2, xi_value(xi))
    return np.array([-2.0 * r0 * t, -2.0 * r1 * s0, -2.0 * r2 * s1, -2.0 * r3 * s2])


def aw3_rhs(state) -> np.ndarray:
    """Three-parameter slice (t, x, s) at xi = 1, eigenvalues in reduced form."""
    t, x, s = state
    r0 = t * (2.0 * s * s + x * x) / (x * x * s * s)
    r1 = (4.0 * x * s * s - 2.0 * t * s * s + x**3) / (x * x * s * s)
    r2 = (12.0 * s - t - 2.0 * x) / (2.0 * s * s)
    return np.array([-2.0 * r0 * t, -2.0 * r1 * x, -2.0 * r2 * s])


def aw2_rhs(state) -> np.ndarray:
    """Two-parameter slice (t, s) at xi = 1: r0 = (2s^2+t^2)/(ts^2),
    r2 = 3(4s-t)/(2s^2)."""
    t, s = state
    r0 = (2.0 * s * s + t * t) / (t * s * s)
    r2 = 3.0 * (4.0 * s - t) / (2.0 * s * s)
    return np.array([-2.0 * r0 * t, -2.0 * r2 * s])


def berger_rhs(state) -> np.ndarray:
    """Berger flow (x1', x2') = (-2 r1 x1, -2 r2 x2)."""
    x1, x2 = state
    r1, r2 = berger_eigenvalue_tuple(x1, x2)
    return np.array([-2.0 * r1 * x1, -2.0 * r2 * x2])


def normalized_rhs(state) -> np.ndarray:
    """Volume-one planar flow of the three-parameter family (t = x^-2 s^-4)."""
    x, s = state
    xp = (-40.0 * x**3 * s**6 + 24.0 * s**2 - 18.0 * x**5 * s**4 - 2.0 * x**2
          + 48.0 * x**4 * s**5) / (7.0 * x**3 * s**6)
    sp = (-36.0 * x**4 * s**5 + 16.0 * x**3 * s**6 + 10.0 * x**5 * s**4 + 5.0 * x**2
          - 4.0 * s**2) / (7.0 * x**4 * s**5)
    return np.array([xp, sp])


@dataclass(frozen=True)
class FlowSystem:
    """One of the named ODE systems; `rhs` maps a state to its velocity."""

    kind: str
    dim: int
    xi: float | None
    rhs: Callable[[np.ndarray], np.ndarray]


def make_system(kind: str, xi: float | None = None) -> FlowSystem:
    """Build a FlowSystem.  The aw2/aw3 slices are only flow-invariant at
    xi = 1, so any other xi is rejected for them; aw4 accepts any xi in
    (0, 1] (default 1)."""
    if kind not in SYSTEM_KINDS:
        raise ValueError(f"unknown system kind {kind!r}, expected one of {SYSTEM_KINDS}")
    if kind in ("aw2", "aw3"):
        if xi is not None and xi_value(xi) != 1.0:
            raise ValueError(f"{kind} is a flow-invariant subfamily only at xi = 1, got xi = {xi}")
        return FlowSystem(kind, _SYSTEM_DIMS[kind], 1.0, aw2_rhs if kind == "aw2" else aw3_rhs)
    if kind == "aw4":
        x = 1.0 if xi is None else xi_value(xi)
        return FlowSystem(kind, 4, x, lambda state: aw_rhs(state, x))
    if xi is not None:
        raise ValueError(f"system {kind!r} takes no xi parameter")
    return FlowSystem(kind, 2, None, berger_rhs if kind == "berger" else normalized_rhs)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_time: float = 10.0
    direction: str = "forward"

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0.0:
            raise ValueError("max_step must be positive")
        if not self.max_time > 0.0:
            raise ValueError("max_time must be positive")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"direction must be 'forward' or 'backward', got {self.direction!r}")


@dataclass(frozen=True)
class EventSpec:
    """Scalar event g(l, state); a recorded zero crossing of g.

    `terminal` stops the integration at the crossing; `direction` restricts
    to rising (+1) or falling (-1) crossings, 0 accepts both.
    """

    name: str
    fn: Callable[[float, np.ndarray], float]
    terminal: bool = True
    direction: float = 0.0


@dataclass(frozen=True)
class FlowEvent:
    time: float
    name: str
    state: np.ndarray


@dataclass
class Trajectory:
    """Sampled solution of one flow run (times monotone, states positive)."""

    times: np.ndarray
    states: np.ndarray
    events: list[FlowEvent] = field(default_factory=list)
    status: str = "horizon"

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def first_event(self, name: str) -> FlowEvent | None:
        for ev in self.events:
            if ev.name == name:
                return ev
        return None


def integrate(system: FlowSystem, init, config: IntegratorConfig | None = None,
              events: Sequence[EventSpec] = ()) -> Trajectory:
    """Integrate `system` from `init` with adaptive RK 4(5).

    Stops at config.max_time, at the first terminal event, or when a state
    component falls below config.abs_tol (collapsing flow; the run is
    truncated with status "singular").  Raises StepSizeUnderflow when the
    solver stalls and NonPositiveState for nonpositive initial or sampled
    states.
    """
    cfg = config or IntegratorConfig()
    y0 = np.asarray(init, dtype=float)
    if y0.shape != (system.dim,):
        raise ValueError(f"system {system.kind!r} needs {system.dim} components, got {y0.shape}")
    if not np.all(y0 > 0.0):
        raise NonPositiveState(f"initial state must be strictly positive, got {y0}")

    sign = 1.0 if cfg.direction == "forward" else -1.0
    scipy_events = []

    def floor_fn(_l, y):
        return float(np.min(y) - cfg.abs_tol)

    floor_fn.terminal = True
    scipy_events.append(floor_fn)
    for spec in events:
        def wrapped(l, y, _fn=spec.fn):
            return float(_fn(l, y))
        wrapped.terminal = spec.terminal
        wrapped.direction = spec.direction
        scipy_events.append(wrapped)

    sol = solve_ivp(lambda _l, y: system.rhs(y), (0.0, sign * cfg.max_time), y0,
                    method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol,
                    max_step=cfg.max_step, dense_output=True, events=scipy_events)

    recorded: list[FlowEvent] = []
    for idx, spec in enumerate(events):
        for te, ye in zip(sol.t_events[idx + 1], sol.y_events[idx + 1]):
            recorded.append(FlowEvent(float(te), spec.name, np.asarray(ye)))
    for te, ye in zip(sol.t_events[0], sol.y_events[0]):
        recorded.append(FlowEvent(float(te), "singular", np.asarray(ye)))
    recorded.sort(key=lambda ev: abs(ev.time))

    times = sol.t
    states = sol.y.T
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message, trajectory=Trajectory(times, states, recorded, "singular"))
    if np.any(states <= 0.0):
        raise NonPositiveState("integrator produced a nonpositive state sample")
    if sol.status == 1:
        status = "singular" if len(sol.t_events[0]) else "event"
    else:
        status = "horizon"
    return Trajectory(times, states, recorded, status)


def boundary_event(family: str, xi: float = 1.0) -> EventSpec:
    """Cone-boundary event for a flow family.

    aw2: s - t;  aw3: t_A(x, s, s) - t (slice closed form);  berger:
    2 x2 - x1;  aw4: t_A(s, xi) - t through the general linear solve.
    All are positive strictly inside the cone and cross zero on exit.
    """
    if family == "aw2":
        return EventSpec("cone_exit", lambda _l, y: y[1] - y[0], True, -1.0)
    if family == "aw3":
        return EventSpec("cone_exit",
                         lambda _l, y: y[1] * (4.0 * y[2] - y[1]) / (3.0 * y[2]) - y[0],
                         True, -1.0)
    if family == "berger":
        return EventSpec("cone_exit", lambda _l, y: 2.0 * y[1] - y[0], True, -1.0)
    if family == "aw4":
        x = xi_value(xi)
        return EventSpec("cone_exit", lambda _l, y: cone.t_a(y[1:], x) - y[0], True, -1.0)
    raise ValueError(f"no cone boundary event for family {family!r}")


def window_event(dim: int) -> EventSpec:
    """Monitor for leaving the certified slice window x < s (3- or 4-state);
    non-terminal, recorded as "window_exit"."""
    if dim == 3:
        fn = lambda _l, y: y[2] - y[1]
    else:
        fn = lambda _l, y: 0.5 * (y[2] + y[3]) - y[1]
    return EventSpec("window_exit", fn, terminal=False, direction=-1.0)


def _as_aw2_state(init) -> np.ndarray:
    arr = np.asarray(init, dtype=float)
    if arr.shape == (4,):
        if arr[0] != arr[1] or arr[2] != arr[3]:
            raise ValueError(f"a two-parameter metric needs t = s0 and s1 = s2, got {arr}")
        return arr[[0, 2]]
    if arr.shape == (2,):
        return arr
    raise ValueError(f"aw2 initial state must have 2 or 4 components, got {arr.shape}")


def _as_slice_state(init) -> np.ndarray:
    arr = np.asarray(init, dtype=float)
    if arr.shape == (4,):
        if arr[2] != arr[3]:
            raise ValueError(f"a slice metric needs s1 = s2, got {arr}")
        return arr[:3]
    if arr.shape == (3,):
        return arr
    raise ValueError(f"aw3 initial state must have 3 or 4 components, got {arr.shape}")


def cone_exit(family: str, init, config: IntegratorConfig | None = None,
              xi: float = 1.0) -> tuple[float, np.ndarray]:
    """First crossing of the positivity-cone boundary along the flow.

    The initial metric must classify PositivelyCurved for its family.  For
    family "aw3" with xi != 1 the slice is not flow-invariant, so the full
    four-parameter system is integrated with the general boundary event.
    Raises NoExitWithinHorizon if the boundary is not reached (including
    collapse or leaving the certified window first).
    """
    cfg = config or IntegratorConfig()
    xi = xi_value(xi)
    if family == "aw2":
        state = _as_aw2_state(init)
        verdict = cone.classify_2param(state[0], state[1])
        system = make_system("aw2")
        events = [boundary_event("aw2")]
    elif family == "aw3":
        slice_state = _as_slice_state(init)
        if xi == 1.0:
            verdict = cone.classify_3param(*slice_state)
            system = make_system("aw3")
            state = slice_state
            events = [boundary_event("aw3"), window_event(3)]
        else:
            state = np.array([slice_state[0], slice_state[1], slice_state[2], slice_state[2]])
            verdict = cone.classify_aw_slice(state, xi)
            system = make_system("aw4", xi)
            events = [boundary_event("aw4", xi), window_event(4)]
    elif family == "berger":
        state = np.asarray(init, dtype=float)
        verdict = cone.classify_berger(tuple(state))
        system = make_system("berger")
        events = [boundary_event("berger")]
    else:
        raise ValueError(f"unknown cone-exit family {family!r}")

    if verdict.classification is not cone.ConeClass.POSITIVELY_CURVED:
        raise ValueError(f"initial metric is not positively curved ({verdict.classification.value})")
    if cfg.direction != "forward":
        raise ValueError("cone_exit integrates forward")

    traj = integrate(system, state, cfg, events)
    hit = traj.first_event("cone_exit")
    if hit is None:
        raise NoExitWithinHorizon(
            f"no cone exit within horizon {cfg.max_time} (status: {traj.status})")
    window = traj.first_event("window_exit")
    if window is not None and window.time < hit.time:
        raise NoExitWithinHorizon(
            f"left the certified window at l = {window.time} before the boundary crossing")
    return hit.time, hit.state


def post_exit_verdict(family: str, state, xi: float = 1.0,
                      dt: float = 1e-3) -> cone.ConeVerdict:
    """Classify the metric a small flow time `dt` past `state`.

    Used to confirm that a detected boundary crossing really lands outside
    the cone; `family` is one of aw2, aw3, aw4, berger.
    """
    cfg = IntegratorConfig(max_time=dt)
    if family == "aw2":
        after = integrate(make_system("aw2"), state, cfg).final_state
        return cone.classify_2param(after[0], after[1])
    if family == "aw3":
        after = integrate(make_system("aw3"), state, cfg).final_state
        return cone.classify_3param(*after)
    if family == "aw4":
        after = integrate(make_system("aw4", xi), state, cfg).final_state
        return cone.classify_aw_slice(after, xi)
    if family == "berger":
        after = integrate(make_system("berger"), state, cfg).final_state
        return cone.classify_berger(tuple(after))
    raise ValueError(f"unknown family {family!r}")
