"""JSON configuration for the CLI and the game service.

The schema mirrors the nested sections of :class:`AppConfig`; unknown keys
anywhere are rejected so typos fail loudly instead of silently falling back
to defaults.  Parse errors carry line/column positions, semantic errors the
offending key path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import (
    DelaySystem,
    LqrWeights,
    PlantParams,
    assemble_delay_system,
    build_plant,
    fig9_benchmark,
    hayes_system,
    lqr_gain,
)
from .game import (
    ControlLaw,
    DisturbanceSpec,
    EvaderFilter,
    GameConfig,
    preset_select,
)

__all__ = ["ConfigError", "AppConfig", "load_config"]


class ConfigError(ValueError):
    """Configuration file is unreadable or semantically invalid."""


def _require_keys(d: dict, path: str, allowed: set[str]) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in '{path}' "
            f"(allowed: {sorted(allowed)})"
        )


def _number(d: dict, path: str, key: str, default):
    v = d.get(key, default)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"'{path}.{key}' must be a number, got {v!r}")
    return float(v)


def _matrix(value, path: str, shape) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except Exception as exc:
        raise ConfigError(f"'{path}' is not a numeric array: {exc}") from exc
    if arr.shape != shape:
        raise ConfigError(f"'{path}' must have shape {shape}, got {arr.shape}")
    return arr


@dataclass
class AppConfig:
    """Validated application configuration with the shipped defaults."""

    plant: PlantParams = field(default_factory=lambda: PlantParams(m=1.0, c=1.0))
    lqr: LqrWeights = field(default_factory=LqrWeights.identity)
    model_kind: str = "benchmark"          # benchmark | split | custom
    benchmark: str = "fig9"                # fig9 | hayes
    custom_b1: np.ndarray | None = None
    custom_b2: np.ndarray | None = None
    preset: str | None = "stable"
    tau1: float = 0.8
    tau2: float = 0.8
    evader: EvaderFilter = field(default_factory=EvaderFilter)
    disturbances: list[DisturbanceSpec] = field(default_factory=list)
    # sim section
    dt: float = 1e-3
    horizon: float = 20.0
    sim_mode: str = "error"                # error | game
    initial_error: tuple = (0.1, 0.0, 0.1, 0.0)
    divergence_threshold: float = 1e9
    cursor_script: list[tuple[float, float, float]] = field(default_factory=list)
    # capture section
    capture_radius: float = 0.05
    capture_hold: float = 0.5
    spawn_offset: tuple[float, float] = (0.3, 0.3)
    # service section
    port: int = 8000
    telemetry_hz: float = 60.0
    max_lag: float = 0.1
    static_dir: str = "frontend"
    # map section
    map_tau1_range: tuple[float, float] = (0.0, 1.2)
    map_tau2_range: tuple[float, float] = (0.0, 1.2)
    map_n1: int = 61
    map_n2: int = 61
    map_n_nodes: int = 24

    # ------------------------------------------------------------------ #

    @classmethod
    def from_dict(cls, raw: dict) -> "AppConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"top-level config must be an object, got {type(raw).__name__}")
        _require_keys(raw, "config", {
            "plant", "lqr", "model", "delays", "evader", "disturbances",
            "sim", "capture", "service", "map",
        })
        cfg = cls()

        if "plant" in raw:
            sec = raw["plant"]
            _require_keys(sec, "plant", {"m", "c"})
            try:
                cfg.plant = PlantParams(
                    m=_number(sec, "plant", "m", 1.0),
                    c=_number(sec, "plant", "c", 1.0),
                )
            except ValueError as exc:
                raise ConfigError(f"'plant': {exc}") from exc

        if "lqr" in raw:
            sec = raw["lqr"]
            _require_keys(sec, "lqr", {"q", "r", "q_diag", "r_diag"})
            q = np.eye(4)
            r = np.eye(2)
            if "q" in sec:
                q = _matrix(sec["q"], "lqr.q", (4, 4))
            if "q_diag" in sec:
                q = np.diag(_matrix(sec["q_diag"], "lqr.q_diag", (4,)))
            if "r" in sec:
                r = _matrix(sec["r"], "lqr.r", (2, 2))
            if "r_diag" in sec:
                r = np.diag(_matrix(sec["r_diag"], "lqr.r_diag", (2,)))
            try:
                cfg.lqr = LqrWeights(q=q, r=r)
            except ValueError as exc:
                raise ConfigError(f"'lqr': {exc}") from exc

        if "model" in raw:
            sec = raw["model"]
            _require_keys(sec, "model", {"benchmark", "split", "b1", "b2"})
            if "benchmark" in sec:
                if sec["benchmark"] not in ("fig9", "hayes"):
                    raise ConfigError(
                        f"'model.benchmark' must be 'fig9' or 'hayes', got {sec['benchmark']!r}"
                    )
                cfg.model_kind = "benchmark"
                cfg.benchmark = sec["benchmark"]
            elif "split" in sec:
                if sec["split"] == "position-velocity":
                    cfg.model_kind = "split"
                elif sec["split"] == "custom":
                    cfg.model_kind = "custom"
                    if "b1" not in sec or "b2" not in sec:
                        raise ConfigError("'model.split: custom' requires b1 and b2")
                    cfg.custom_b1 = _matrix(sec["b1"], "model.b1", (4, 4))
                    cfg.custom_b2 = _matrix(sec["b2"], "model.b2", (4, 4))
                else:
                    raise ConfigError(
                        f"'model.split' must be 'position-velocity' or 'custom', got {sec['split']!r}"
                    )
            else:
                raise ConfigError("'model' needs either 'benchmark' or 'split'")

        if "delays" in raw:
            sec = raw["delays"]
            _require_keys(sec, "delays", {"preset", "tau1", "tau2"})
            if "preset" in sec:
                try:
                    cfg.tau1, cfg.tau2 = preset_select(sec["preset"])
                except ValueError as exc:
                    raise ConfigError(f"'delays.preset': {exc}") from exc
                cfg.preset = sec["preset"]
            else:
                cfg.tau1 = _number(sec, "delays", "tau1", 0.0)
                cfg.tau2 = _number(sec, "delays", "tau2", 0.0)
                cfg.preset = None
                if cfg.tau1 < 0 or cfg.tau2 < 0:
                    raise ConfigError("'delays': delays must be >= 0")

        if "evader" in raw:
            sec = raw["evader"]
            _require_keys(sec, "evader", {"mode", "p", "kp", "ki"})
            try:
                cfg.evader = EvaderFilter(
                    mode=sec.get("mode", "critical"),
                    p=_number(sec, "evader", "p", 10.0),
                    kp=_number(sec, "evader", "kp", 0.0),
                    ki=_number(sec, "evader", "ki", 0.0),
                )
            except ValueError as exc:
                raise ConfigError(f"'evader': {exc}") from exc

        if "disturbances" in raw:
            if not isinstance(raw["disturbances"], list):
                raise ConfigError("'disturbances' must be a list")
            cfg.disturbances = [
                parse_disturbance(d, f"disturbances[{i}]")
                for i, d in enumerate(raw["disturbances"])
            ]

        if "sim" in raw:
            sec = raw["sim"]
            _require_keys(sec, "sim", {
                "dt", "horizon", "mode", "initial_error",
                "divergence_threshold", "cursor_script",
            })
            cfg.dt = _number(sec, "sim", "dt", cfg.dt)
            cfg.horizon = _number(sec, "sim", "horizon", cfg.horizon)
            if cfg.dt <= 0 or cfg.horizon <= 0:
                raise ConfigError("'sim': dt and horizon must be positive")
            mode = sec.get("mode", cfg.sim_mode)
            if mode not in ("error", "game"):
                raise ConfigError(f"'sim.mode' must be 'error' or 'game', got {mode!r}")
            cfg.sim_mode = mode
            if "initial_error" in sec:
                cfg.initial_error = tuple(
                    _matrix(sec["initial_error"], "sim.initial_error", (4,))
                )
            cfg.divergence_threshold = _number(
                sec, "sim", "divergence_threshold", cfg.divergence_threshold
            )
            if cfg.divergence_threshold <= 0:
                raise ConfigError("'sim.divergence_threshold' must be positive")
            if "cursor_script" in sec:
                script = sec["cursor_script"]
                if not isinstance(script, list):
                    raise ConfigError("'sim.cursor_script' must be a list of [t, x, y]")
                out = []
                for i, row in enumerate(script):
                    row = _matrix(row, f"sim.cursor_script[{i}]", (3,))
                    out.append((float(row[0]), float(row[1]), float(row[2])))
                if any(b[0] < a[0] for a, b in zip(out, out[1:])):
                    raise ConfigError("'sim.cursor_script' times must be non-decreasing")
                cfg.cursor_script = out

        if "capture" in raw:
            sec = raw["capture"]
            _require_keys(sec, "capture", {"radius", "hold", "spawn_offset"})
            cfg.capture_radius = _number(sec, "capture", "radius", cfg.capture_radius)
            cfg.capture_hold = _number(sec, "capture", "hold", cfg.capture_hold)
            if cfg.capture_radius <= 0 or cfg.capture_hold <= 0:
                raise ConfigError("'capture': radius and hold must be positive")
            if "spawn_offset" in sec:
                off = _matrix(sec["spawn_offset"], "capture.spawn_offset", (2,))
                cfg.spawn_offset = (float(off[0]), float(off[1]))

        if "service" in raw:
            sec = raw["service"]
            _require_keys(sec, "service", {"port", "telemetry_hz", "max_lag", "static_dir"})
            port = sec.get("port", cfg.port)
            if not isinstance(port, int) or isinstance(port, bool) or not (0 < port < 65536):
                raise ConfigError(f"'service.port' must be a port number, got {port!r}")
            cfg.port = port
            cfg.telemetry_hz = _number(sec, "service", "telemetry_hz", cfg.telemetry_hz)
            cfg.max_lag = _number(sec, "service", "max_lag", cfg.max_lag)
            if cfg.telemetry_hz <= 0 or cfg.max_lag <= 0:
                raise ConfigError("'service': telemetry_hz and max_lag must be positive")
            static = sec.get("static_dir", cfg.static_dir)
            if not isinstance(static, str):
                raise ConfigError("'service.static_dir' must be a string")
            cfg.static_dir = static

        if "map" in raw:
            sec = raw["map"]
            _require_keys(sec, "map", {"tau1_range", "tau2_range", "n1", "n2", "n_nodes"})
            if "tau1_range" in sec:
                r1 = _matrix(sec["tau1_range"], "map.tau1_range", (2,))
                cfg.map_tau1_range = (float(r1[0]), float(r1[1]))
            if "tau2_range" in sec:
                r2 = _matrix(sec["tau2_range"], "map.tau2_range", (2,))
                cfg.map_tau2_range = (float(r2[0]), float(r2[1]))
            for key in ("n1", "n2", "n_nodes"):
                if key in sec:
                    v = sec[key]
                    if not isinstance(v, int) or isinstance(v, bool) or v < 2:
                        raise ConfigError(f"'map.{key}' must be an integer >= 2")
                    setattr(cfg, f"map_{key}", v)
            if min(cfg.map_tau1_range) < 0 or min(cfg.map_tau2_range) < 0:
                raise ConfigError("'map': delay ranges must be nonnegative")

        return cfg

    def to_dict(self) -> dict:
        """Plain-dict form; parse(to_dict) is semantically idempotent."""
        out: dict = {
            "plant": {"m": self.plant.m, "c": self.plant.c},
            "lqr": {"q": self.lqr.q.tolist(), "r": self.lqr.r.tolist()},
            "evader": {
                "mode": self.evader.mode, "p": self.evader.p,
                "kp": self.evader.kp, "ki": self.evader.ki,
            },
            "disturbances": [
                {
                    "kind": d.kind, "amplitude": d.amplitude, "start": d.start,
                    "duration": d.duration, "frequency": d.frequency,
                    "channel": d.channel,
                }
                for d in self.disturbances
            ],
            "sim": {
                "dt": self.dt, "horizon": self.horizon, "mode": self.sim_mode,
                "initial_error": list(self.initial_error),
                "divergence_threshold": self.divergence_threshold,
                "cursor_script": [list(row) for row in self.cursor_script],
            },
            "capture": {
                "radius": self.capture_radius, "hold": self.capture_hold,
                "spawn_offset": list(self.spawn_offset),
            },
            "service": {
                "port": self.port, "telemetry_hz": self.telemetry_hz,
                "max_lag": self.max_lag, "static_dir": self.static_dir,
            },
            "map": {
                "tau1_range": list(self.map_tau1_range),
                "tau2_range": list(self.map_tau2_range),
                "n1": self.map_n1, "n2": self.map_n2, "n_nodes": self.map_n_nodes,
            },
        }
        if self.model_kind == "benchmark":
            out["model"] = {"benchmark": self.benchmark}
        elif self.model_kind == "split":
            out["model"] = {"split": "position-velocity"}
        else:
            out["model"] = {
                "split": "custom",
                "b1": self.custom_b1.tolist(),
                "b2": self.custom_b2.tolist(),
            }
        if self.preset is not None:
            out["delays"] = {"preset": self.preset}
        else:
            out["delays"] = {"tau1": self.tau1, "tau2": self.tau2}
        return out

    # -- builders ----------------------------------------------------------

    def system_factory(self):
        """Callable (tau1, tau2) -> DelaySystem for the configured model."""
        if self.model_kind == "benchmark":
            return fig9_benchmark if self.benchmark == "fig9" else hayes_system
        plant = build_plant(self.plant)
        if self.model_kind == "split":
            k = lqr_gain(plant.a, plant.b, self.lqr)
            return lambda t1, t2: assemble_delay_system(plant, k, t1, t2)
        b1, b2 = self.custom_b1, self.custom_b2
        return lambda t1, t2: DelaySystem(
            a=plant.a, b1=b1, b2=b2, tau1=t1, tau2=t2, benchmark="custom"
        )

    def build_delay_system(self) -> DelaySystem:
        return self.system_factory()(self.tau1, self.tau2)

    def build_control_law(self) -> ControlLaw:
        if self.model_kind == "benchmark" and self.benchmark == "hayes":
            raise ConfigError("the scalar 'hayes' family has no game realization")
        if self.model_kind == "split":
            plant = build_plant(self.plant)
            return ControlLaw.from_gain(self.plant, lqr_gain(plant.a, plant.b, self.lqr))
        sys = self.system_factory()(self.tau1, self.tau2)
        try:
            return ControlLaw.from_delay_system(self.plant, sys)
        except ValueError as exc:
            raise ConfigError(f"model has no game realization: {exc}") from exc

    def build_game(self) -> GameConfig:
        try:
            return GameConfig(
                control=self.build_control_law(),
                tau1=self.tau1, tau2=self.tau2,
                evader=self.evader,
                disturbances=list(self.disturbances),
                dt=self.dt,
                capture_radius=self.capture_radius,
                capture_hold=self.capture_hold,
                spawn_offset=self.spawn_offset,
                divergence_threshold=self.divergence_threshold,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_disturbance(d: dict, path: str) -> DisturbanceSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"'{path}' must be an object")
    _require_keys(d, path, {"kind", "amplitude", "start", "duration", "frequency", "channel"})
    try:
        return DisturbanceSpec(
            kind=d.get("kind", "none"),
            amplitude=_number(d, path, "amplitude", 0.0),
            start=_number(d, path, "start", 0.0),
            duration=_number(d, path, "duration", 0.0),
            frequency=_number(d, path, "frequency", 0.0),
            channel=d.get("channel", "x"),
        )
    except ValueError as exc:
        raise ConfigError(f"'{path}': {exc}") from exc


def load_config(path) -> AppConfig:
    """Load and validate a JSON config file.

    Raises ConfigError with a line/column diagnostic for malformed JSON and a
    key-path diagnostic for semantic problems.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    return AppConfig.from_dict(raw)
