"""Command-line entry points: headless simulation, stability maps, and the
realtime service.

Exit codes: 0 success, 1 configuration error, 2 divergence (round lost).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import AppConfig, ConfigError, load_config
from .ddesim import SimConfig, simulate
from .game import (
    GAME_CSV_HEADER,
    GameEngine,
    PRESET_DELAYS,
    read_cursor_log,
)
from .stability import classify_presets, stability_map

__all__ = ["main", "run_simulate", "run_stability_map"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="delaychase",
        description="Planar pursuit game with sensing delays: simulation, "
                    "stability analysis, and the realtime game service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="headless error-dynamics or game run")
    p_sim.add_argument("--config", required=True, help="JSON config path")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--cursor-log", help="replay cursor log (t,cx,cy CSV); forces game mode")

    p_map = sub.add_parser("stability-map", help="sweep the delay plane and classify")
    p_map.add_argument("--config", required=True)
    p_map.add_argument("--out", required=True)

    p_srv = sub.add_parser("serve", help="run the realtime websocket service")
    p_srv.add_argument("--config", required=True)
    p_srv.add_argument("--port", type=int, help="override the configured port")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "simulate":
            return run_simulate(cfg, args.out, args.cursor_log)
        if args.command == "stability-map":
            return run_stability_map(cfg, args.out)
        return run_serve(cfg, args.port)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def run_simulate(cfg: AppConfig, out_path, cursor_log_path=None) -> int:
    if cursor_log_path is None and cfg.sim_mode == "error":
        return _run_error_sim(cfg, out_path)
    return _run_game_sim(cfg, out_path, cursor_log_path)


def _run_error_sim(cfg: AppConfig, out_path) -> int:
    system = cfg.build_delay_system()
    sim_cfg = SimConfig(
        horizon=cfg.horizon, dt=cfg.dt,
        initial_history=np.asarray(cfg.initial_error)[: system.dim],
        divergence_threshold=cfg.divergence_threshold,
    )
    try:
        traj = simulate(system, sim_cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    traj.write_csv(out_path)
    if traj.diverged:
        print(f"diverged at t = {traj.divergence_time:.6g} s "
              f"(|e| > {cfg.divergence_threshold:g})")
        return 2
    print(f"wrote {len(traj)} rows to {out_path}")
    return 0


def _game_row(engine: GameEngine) -> tuple:
    s = engine.snapshot()
    return (
        s.t, s.evader[0], s.evader[2], s.pursuer[0], s.pursuer[2],
        s.error[0], s.error[2], s.disturbance_now[0], s.disturbance_now[1],
        s.delays[0], s.delays[1],
    )


def _run_game_sim(cfg: AppConfig, out_path, cursor_log_path=None) -> int:
    engine = GameEngine(cfg.build_game())
    if cursor_log_path is not None:
        try:
            script = read_cursor_log(cursor_log_path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cursor log: {exc}") from exc
    else:
        script = list(cfg.cursor_script)

    n_steps = int(round(cfg.horizon / cfg.dt))
    rows = [_game_row(engine)]
    pointer = 0
    diverged_at = None
    for _ in range(n_steps):
        while pointer < len(script) and script[pointer][0] <= engine.t:
            _, cx, cy = script[pointer]
            engine.set_cursor(cx, cy)
            pointer += 1
        engine.tick()
        rows.append(_game_row(engine))
        if engine.round_event == "escape":
            diverged_at = engine.t
            break

    with open(out_path, "w") as fh:
        fh.write(GAME_CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.15g}" for v in row) + "\n")
    if diverged_at is not None:
        print(f"round lost: error diverged at t = {diverged_at:.6g} s")
        return 2
    print(f"wrote {len(rows)} rows to {out_path}; score {engine.score}")
    return 0


def run_stability_map(cfg: AppConfig, out_path) -> int:
    factory = cfg.system_factory()
    result = stability_map(
        factory,
        tau1_range=cfg.map_tau1_range, tau2_range=cfg.map_tau2_range,
        n1=cfg.map_n1, n2=cfg.map_n2, n_nodes=cfg.map_n_nodes,
    )
    result.write_csv(out_path)
    print(f"wrote {cfg.map_n1 * cfg.map_n2} cells to {out_path}")

    checks = classify_presets(factory, n_nodes=cfg.map_n_nodes)
    names = {taus[0]: name for name, taus in PRESET_DELAYS.items() if taus[0] > 0}
    print()
    print(f"{'preset':>10} {'tau':>7} {'abscissa':>10} {'label':>10} "
          f"{'growth':>9} {'published':>10} {'agrees':>7}")
    for check in checks:
        name = names.get(check.tau, "-")
        agrees = "-" if check.agrees_published is None else ("yes" if check.agrees_published else "NO")
        print(f"{name:>10} {check.tau:7.3f} {check.verdict.abscissa:+10.4f} "
              f"{check.verdict.label:>10} {check.growth_rate:+9.4f} "
              f"{check.published_label or '-':>10} {agrees:>7}")
    return 0


def run_serve(cfg: AppConfig, port_override=None) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(cfg)
    port = port_override if port_override is not None else cfg.port
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
