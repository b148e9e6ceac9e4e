"""Real-time pursuit game loop: cursor-driven evader, delayed-feedback
pursuer, disturbances, capture scoring, and telemetry.

The play field is the unit square with 1 m per unit.  Simulation advances on
a fixed grid t = tick * dt; one joint RK4 step per tick integrates the evader
filter and the pursuer plant together, with the pursuer's feedback reading
the error history buffer at the two sensing delays.  Given the same input
sequence the loop is fully deterministic, which is what makes cursor-log
replay reproduce a session bitwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import DelaySystem, PlantParams, build_plant
from .ddesim import HistoryBuffer

__all__ = [
    "PRESET_DELAYS",
    "preset_select",
    "EvaderFilter",
    "evader_step",
    "DisturbanceSpec",
    "disturbance_value",
    "disturbance_force",
    "ControlLaw",
    "GameConfig",
    "GameState",
    "TelemetryFrame",
    "GameEngine",
    "read_cursor_log",
    "write_cursor_log",
    "GAME_CSV_HEADER",
]

PRESET_DELAYS = {
    "off": (0.0, 0.0),
    "unstable": (0.6, 0.6),
    "stable": (0.8, 0.8),
    "critical": (1.035, 1.035),
}


def preset_select(choice: str, tau1: float | None = None,
                  tau2: float | None = None) -> tuple[float, float]:
    """Map a preset name to a delay pair; "manual" passes the given values
    through after rejecting negatives."""
    if choice == "manual":
        if tau1 is None or tau2 is None:
            raise ValueError("manual preset requires tau1 and tau2")
        if tau1 < 0 or tau2 < 0:
            raise ValueError(f"delays must be >= 0, got ({tau1}, {tau2})")
        return (float(tau1), float(tau2))
    try:
        return PRESET_DELAYS[choice]
    except KeyError:
        raise ValueError(f"unknown preset {choice!r}") from None


@dataclass(frozen=True)
class EvaderFilter:
    """Cursor-tracking filter for the evader.

    Default mode is a zero-free critically damped second-order filter with
    both poles at -p: transfer p^2/(s+p)^2 from cursor to position, hence a
    provably monotone step response (no overshoot) and peak speed p/e per
    unit step.  Mode "pi" instead closes a unity-feedback PI loop around a
    velocity-command plant; its gains must satisfy kp^2 >= 4 ki so the poles
    stay real, but the closed loop has a zero and can overshoot slightly.
    """

    mode: str = "critical"
    p: float = 10.0
    kp: float = 0.0
    ki: float = 0.0

    def __post_init__(self):
        if self.mode == "critical":
            if self.p <= 0:
                raise ValueError("pole magnitude p must be positive")
        elif self.mode == "pi":
            if self.kp <= 0 or self.ki < 0:
                raise ValueError("PI mode needs kp > 0 and ki >= 0")
            if self.kp ** 2 < 4 * self.ki:
                raise ValueError("PI gains must satisfy kp^2 >= 4 ki (real poles)")
        else:
            raise ValueError(f"unknown evader mode {self.mode!r}")

    # internal state layout: critical -> [x, vx, y, vy]; pi -> [x, qx, y, qy]
    # with q the PI integrator state
    def initial_internal(self, x: float, y: float) -> np.ndarray:
        return np.array([x, 0.0, y, 0.0])

    def derivative(self, internal: np.ndarray, cursor: np.ndarray) -> np.ndarray:
        if self.mode == "critical":
            p = self.p
            return np.array([
                internal[1],
                p * p * (cursor[0] - internal[0]) - 2 * p * internal[1],
                internal[3],
                p * p * (cursor[1] - internal[2]) - 2 * p * internal[3],
            ])
        kp, ki = self.kp, self.ki
        return np.array([
            kp * (cursor[0] - internal[0]) + ki * internal[1],
            cursor[0] - internal[0],
            kp * (cursor[1] - internal[2]) + ki * internal[3],
            cursor[1] - internal[2],
        ])

    def agent_state(self, internal: np.ndarray, cursor: np.ndarray) -> np.ndarray:
        """Position/velocity state [x, vx, y, vy] of the evader."""
        if self.mode == "critical":
            return internal.copy()
        d = self.derivative(internal, cursor)
        return np.array([internal[0], d[0], internal[2], d[2]])

    def state_derivative(self, internal: np.ndarray, cursor: np.ndarray) -> np.ndarray:
        """Time derivative of :meth:`agent_state` with the cursor held."""
        d = self.derivative(internal, cursor)
        if self.mode == "critical":
            return d
        kp, ki = self.kp, self.ki
        # vx = kp (c - x) + ki q  =>  ax = -kp vx + ki (c - x)
        return np.array([
            d[0], -kp * d[0] + ki * (cursor[0] - internal[0]),
            d[2], -kp * d[2] + ki * (cursor[1] - internal[2]),
        ])


def evader_step(filt: EvaderFilter, internal: np.ndarray, cursor,
                dt: float) -> np.ndarray:
    """One RK4 step of the evader filter with the cursor held constant."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    cursor = np.asarray(cursor, dtype=float)
    half = dt / 2
    k1 = filt.derivative(internal, cursor)
    k2 = filt.derivative(internal + half * k1, cursor)
    k3 = filt.derivative(internal + half * k2, cursor)
    k4 = filt.derivative(internal + dt * k3, cursor)
    return internal + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass(frozen=True)
class DisturbanceSpec:
    """Exogenous force on one pursuer acceleration channel."""

    kind: str = "none"  # none | step | pulse | sine
    amplitude: float = 0.0
    start: float = 0.0
    duration: float = 0.0   # pulse only
    frequency: float = 0.0  # sine only, Hz
    channel: str = "x"

    def __post_init__(self):
        if self.kind not in ("none", "step", "pulse", "sine"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        if self.start < 0:
            raise ValueError("start must be >= 0")
        if self.kind == "pulse" and self.duration <= 0:
            raise ValueError("pulse needs a positive duration")
        if self.kind == "sine" and self.frequency <= 0:
            raise ValueError("sine needs a positive frequency")
        if self.channel not in ("x", "y"):
            raise ValueError(f"channel must be 'x' or 'y', got {self.channel!r}")


def disturbance_value(spec: DisturbanceSpec, t: float) -> float:
    """Force value (N) of one disturbance at time t."""
    if spec.kind == "none" or t < spec.start:
        return 0.0
    if spec.kind == "step":
        return spec.amplitude
    if spec.kind == "pulse":
        return spec.amplitude if t < spec.start + spec.duration else 0.0
    return spec.amplitude * np.sin(2 * np.pi * spec.frequency * (t - spec.start))


def disturbance_force(specs, t: float) -> np.ndarray:
    """Summed (x, y) disturbance force of all active specs at time t."""
    out = np.zeros(2)
    for spec in specs:
        v = disturbance_value(spec, t)
        out[0 if spec.channel == "x" else 1] += v
    return out


@dataclass(frozen=True)
class ControlLaw:
    """Pursuer feedback u = -k0 e(t) - k1 e(t-tau1) - k2 e(t-tau2).

    The position/velocity split uses k0 = 0 with the position gains in k1
    and the velocity gains in k2.  Loading a benchmark error dynamics
    extracts all three blocks so the game's closed loop reproduces that
    system exactly when the evader is at rest.
    """

    plant: PlantParams
    k0: np.ndarray
    k1: np.ndarray
    k2: np.ndarray

    def __post_init__(self):
        for name in ("k0", "k1", "k2"):
            k = np.asarray(getattr(self, name), dtype=float)
            if k.shape != (2, 4):
                raise ValueError(f"{name} must be 2x4, got {k.shape}")
            if not np.all(np.isfinite(k)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, k)

    @classmethod
    def from_gain(cls, plant: PlantParams, k: np.ndarray) -> "ControlLaw":
        """Position/velocity split of a 2x4 gain: position gains (k11, k23)
        act on the tau1-delayed error, velocity gains (k12, k24) on the
        tau2-delayed error; cross-coupling entries are dropped."""
        k = np.asarray(k, dtype=float)
        k1 = np.zeros((2, 4))
        k2 = np.zeros((2, 4))
        k1[0, 0] = k[0, 0]
        k1[1, 2] = k[1, 2]
        k2[0, 1] = k[0, 1]
        k2[1, 3] = k[1, 3]
        return cls(plant=plant, k0=np.zeros((2, 4)), k1=k1, k2=k2)

    @classmethod
    def from_delay_system(cls, plant: PlantParams, sys: DelaySystem) -> "ControlLaw":
        """Extract the feedback blocks that realize ``sys`` as the game's
        error dynamics.

        Requires the benchmark's kinematic rows (1 and 3) to match the
        point-mass structure and its feedback to live on the acceleration
        rows; the delayed blocks map to gains via B = -(1/m) K.
        """
        a_p = build_plant(plant).a
        a_b = sys.a
        kin = np.zeros((2, 4))
        kin[0, 1] = 1.0
        kin[1, 3] = 1.0
        if not np.allclose(a_b[[0, 2]], kin, atol=1e-12):
            raise ValueError("benchmark A rows 1 and 3 must be pure kinematics")
        for name, b in (("B1", sys.b1), ("B2", sys.b2)):
            if np.any(b[[0, 2]] != 0):
                raise ValueError(f"benchmark {name} must act on acceleration rows only")
        m = plant.m
        k0 = m * (a_p - a_b)[[1, 3]]
        k1 = -m * sys.b1[[1, 3]]
        k2 = -m * sys.b2[[1, 3]]
        return cls(plant=plant, k0=k0, k1=k1, k2=k2)


@dataclass(frozen=True)
class TelemetryFrame:
    """Per-tick record of the eight animation signals plus tick and t.

    Signal order: evader x, evader y, disturbance x, disturbance y, delay 1,
    delay 2, error x, error y.
    """

    tick: int
    t: float
    evader_x: float
    evader_y: float
    disturbance_x: float
    disturbance_y: float
    tau1: float
    tau2: float
    error_x: float
    error_y: float

    @property
    def signals(self) -> tuple:
        return (
            self.evader_x, self.evader_y,
            self.disturbance_x, self.disturbance_y,
            self.tau1, self.tau2,
            self.error_x, self.error_y,
        )


@dataclass(frozen=True)
class GameState:
    """Snapshot of the loop state after a tick."""

    t: float
    tick: int
    cursor: np.ndarray
    evader: np.ndarray
    pursuer: np.ndarray
    error: np.ndarray
    delays: tuple[float, float]
    disturbance_now: np.ndarray
    captured: bool
    capture_timer: float
    score: int


@dataclass
class GameConfig:
    control: ControlLaw
    tau1: float = 0.8
    tau2: float = 0.8
    evader: EvaderFilter = field(default_factory=EvaderFilter)
    disturbances: list = field(default_factory=list)
    dt: float = 1e-3
    capture_radius: float = 0.05
    capture_hold: float = 0.5
    spawn_offset: tuple[float, float] = (0.3, 0.3)
    evader_start: tuple[float, float] = (0.5, 0.5)
    divergence_threshold: float = 1e9
    max_delay: float = 5.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.capture_radius <= 0 or self.capture_hold <= 0:
            raise ValueError("capture radius and hold must be positive")
        for tau in (self.tau1, self.tau2):
            _check_delay(tau, self.dt, self.max_delay)


def _check_delay(tau: float, dt: float, max_delay: float) -> None:
    if tau < 0:
        raise ValueError(f"delay must be >= 0, got {tau}")
    if tau > max_delay:
        raise ValueError(f"delay {tau} exceeds the configured maximum {max_delay}")
    if 0 < tau < 4 * dt:
        raise ValueError(f"nonzero delay must be at least 4*dt = {4 * dt}, got {tau}")


GAME_CSV_HEADER = "t,xe,ye,xp,yp,ex,ey,dx,dy,tau1,tau2"


class GameEngine:
    """Owns all mutable game state; one instance per session, single thread.

    Inputs (cursor, delays, disturbances) are applied between ticks and take
    effect at the next tick.  Telemetry and state snapshots are immutable.
    """

    def __init__(self, cfg: GameConfig):
        self.cfg = cfg
        self.dt = cfg.dt
        self._a_plant = build_plant(cfg.control.plant).a
        self._m = cfg.control.plant.m
        self.reset()

    # -- lifecycle ---------------------------------------------------------

    def reset(self, keep_score: bool = False) -> None:
        cfg = self.cfg
        if not keep_score:
            self.score = 0
        self.tick_count = 0
        self.tau1 = cfg.tau1
        self.tau2 = cfg.tau2
        self.preset: str | None = None
        self.disturbances = list(cfg.disturbances)
        self._cursor = np.array(cfg.evader_start, dtype=float)
        self._ze_internal = cfg.evader.initial_internal(*cfg.evader_start)
        ze = cfg.evader.agent_state(self._ze_internal, self._cursor)
        self._zp = np.array([
            ze[0] + cfg.spawn_offset[0], 0.0,
            ze[2] + cfg.spawn_offset[1], 0.0,
        ])
        self._e = self._zp - ze
        self.capture_timer = 0.0
        self.captured = False
        self.alive = True
        self.round_event: str | None = None
        self.cursor_log: list[tuple[float, float, float]] = [
            (0.0, float(self._cursor[0]), float(self._cursor[1]))
        ]
        self._init_buffer()

    def _init_buffer(self) -> None:
        horizon = max(self.tau1, self.tau2, self.dt)
        n_pre = int(np.ceil(horizon / self.dt)) + 2
        self._buffer = HistoryBuffer(4, self.dt, capacity=n_pre + 4)
        for k in range(-n_pre, 1):
            self._buffer.append(k * self.dt, self._e, np.zeros(4))

    # -- inputs ------------------------------------------------------------

    def set_cursor(self, x: float, y: float) -> None:
        """Hold a new cursor position from the next tick on (clamped to the
        unit play field); recorded for replay."""
        x = float(np.clip(x, 0.0, 1.0))
        y = float(np.clip(y, 0.0, 1.0))
        if (x, y) != (self._cursor[0], self._cursor[1]):
            self._cursor = np.array([x, y])
            self.cursor_log.append((self.tick_count * self.dt, x, y))

    def set_delays(self, tau1: float, tau2: float) -> None:
        """Change the sensing delays, effective at the next tick.  The error
        history is retained; a grown horizon pads with the oldest sample."""
        _check_delay(tau1, self.dt, self.cfg.max_delay)
        _check_delay(tau2, self.dt, self.cfg.max_delay)
        self.tau1 = float(tau1)
        self.tau2 = float(tau2)
        self.preset = None
        needed = int(np.ceil(max(self.tau1, self.tau2, self.dt) / self.dt)) + 6
        if needed > self._buffer.capacity:
            self._buffer = self._buffer_resized(needed)

    def _buffer_resized(self, capacity: int) -> HistoryBuffer:
        old = self._buffer
        new = HistoryBuffer(4, self.dt, capacity)
        for idx in range(len(old)):
            slot = old._slot(idx)
            new.append(old._times[slot], old._states[slot], old._deriv_in[slot])
            new.set_departure_derivative(old._deriv_out[slot])
        return new

    def set_preset(self, name: str) -> None:
        self.set_delays(*preset_select(name))
        self.preset = name

    def add_disturbance(self, spec: DisturbanceSpec) -> None:
        self.disturbances.append(spec)

    def clear_disturbances(self) -> None:
        self.disturbances = []

    # -- dynamics ----------------------------------------------------------

    def _rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        """Joint derivative of [evader internal, pursuer state]."""
        cfg = self.cfg
        ze_int = y[:4]
        zp = y[4:]
        dze = cfg.evader.derivative(ze_int, self._cursor)
        ze = cfg.evader.agent_state(ze_int, self._cursor)
        e_now = zp - ze
        u = -(cfg.control.k0 @ e_now)
        for k, tau in ((cfg.control.k1, self.tau1), (cfg.control.k2, self.tau2)):
            if tau == 0.0:
                u = u - k @ e_now
            else:
                u = u - k @ self._buffer.interpolate(t - tau, clamp_below=True)
        d = disturbance_force(self.disturbances, t)
        dzp = self._a_plant @ zp
        dzp[1] += (u[0] + d[0]) / self._m
        dzp[3] += (u[1] + d[1]) / self._m
        return np.concatenate([dze, dzp])

    def _error_derivative(self, t: float, ze_int: np.ndarray,
                          zp: np.ndarray) -> np.ndarray:
        dy = self._rhs(t, np.concatenate([ze_int, zp]))
        dze_state = self.cfg.evader.state_derivative(ze_int, self._cursor)
        return dy[4:] - dze_state

    def tick(self) -> TelemetryFrame:
        """Advance one step: evader filter, error history, pursuer, capture
        check; emits the telemetry frame for the new time."""
        if not self.alive:
            raise RuntimeError("round is over; call reset() to start a new one")
        cfg = self.cfg
        dt = self.dt
        t0 = self.tick_count * dt
        # inputs may have switched since the last append: refresh the slope
        # seen by history segments departing from t0
        self._buffer.set_departure_derivative(
            self._error_derivative(t0, self._ze_internal, self._zp)
        )

        y = np.concatenate([self._ze_internal, self._zp])
        half = dt / 2
        k1 = self._rhs(t0, y)
        k2 = self._rhs(t0 + half, y + half * k1)
        k3 = self._rhs(t0 + half, y + half * k2)
        k4 = self._rhs(t0 + dt, y + dt * k3)
        y = y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

        self.tick_count += 1
        t1 = self.tick_count * dt
        self._ze_internal = y[:4]
        self._zp = y[4:]
        ze = cfg.evader.agent_state(self._ze_internal, self._cursor)
        self._e = self._zp - ze

        self.round_event = None
        self.captured = False
        if not np.all(np.isfinite(self._e)) or (
            np.linalg.norm(self._e) > cfg.divergence_threshold
        ):
            self.alive = False
            self.round_event = "escape"
        else:
            dist = float(np.hypot(self._e[0], self._e[2]))
            if dist < cfg.capture_radius:
                self.capture_timer += dt
            else:
                self.capture_timer = 0.0
            if self.capture_timer >= cfg.capture_hold - dt / 2:
                self.score += 1
                self.captured = True
                self.round_event = "capture"
                self.capture_timer = 0.0
                self._zp = np.array([
                    ze[0] + cfg.spawn_offset[0], 0.0,
                    ze[2] + cfg.spawn_offset[1], 0.0,
                ])
                self._e = self._zp - ze

        if self.alive:
            self._buffer.append(
                t1, self._e,
                self._error_derivative(t1, self._ze_internal, self._zp),
            )

        d = disturbance_force(self.disturbances, t1)
        return TelemetryFrame(
            tick=self.tick_count, t=t1,
            evader_x=float(ze[0]), evader_y=float(ze[2]),
            disturbance_x=float(d[0]), disturbance_y=float(d[1]),
            tau1=self.tau1, tau2=self.tau2,
            error_x=float(self._e[0]), error_y=float(self._e[2]),
        )

    # -- views -------------------------------------------------------------

    @property
    def t(self) -> float:
        return self.tick_count * self.dt

    def snapshot(self) -> GameState:
        ze = self.cfg.evader.agent_state(self._ze_internal, self._cursor)
        return GameState(
            t=self.t, tick=self.tick_count,
            cursor=self._cursor.copy(), evader=ze,
            pursuer=self._zp.copy(), error=self._e.copy(),
            delays=(self.tau1, self.tau2),
            disturbance_now=disturbance_force(self.disturbances, self.t),
            captured=self.captured, capture_timer=self.capture_timer,
            score=self.score,
        )

    def telemetry_row(self, frame: TelemetryFrame) -> tuple:
        """Row for the full-run telemetry CSV (see GAME_CSV_HEADER)."""
        ze = self.cfg.evader.agent_state(self._ze_internal, self._cursor)
        return (
            frame.t, frame.evader_x, frame.evader_y,
            float(self._zp[0]), float(self._zp[2]),
            frame.error_x, frame.error_y,
            frame.disturbance_x, frame.disturbance_y,
            frame.tau1, frame.tau2,
        )


def write_cursor_log(path, entries) -> None:
    """Cursor log CSV ``t,cx,cy``; values are written with full round-trip
    precision so a replay sees bitwise-identical floats."""
    with open(path, "w") as fh:
        fh.write("t,cx,cy\n")
        for t, x, y in entries:
            fh.write(f"{float(t)!r},{float(x)!r},{float(y)!r}\n")


def read_cursor_log(path) -> list[tuple[float, float, float]]:
    entries = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,cx,cy":
            raise ValueError(f"bad cursor log header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, x, y = (float(v) for v in line.split(","))
            entries.append((t, x, y))
    if any(b[0] < a[0] for a, b in zip(entries, entries[1:])):
        raise ValueError("cursor log times must be non-decreasing")
    return entries
