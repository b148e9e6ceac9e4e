"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Expected values are frozen from independent oracles (scipy lambertw /
expm / solve_continuous_are, closed forms, and a pre-build method-of-steps
integration script); no expected value below was produced by the code under
test.
"""
import time

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import lambertw

from delaychase.cli import main
from delaychase.ddesim import SimConfig, simulate, simulate_two_block
from delaychase.dynamics import (
    DelaySystem,
    LqrWeights,
    PlantParams,
    build_plant,
    care_residual,
    fig9_benchmark,
    hayes_system,
    is_hurwitz,
    lqr_gain,
    solve_care,
    zero_delay_matrix,
)
from delaychase.game import (
    ControlLaw,
    DisturbanceSpec,
    EvaderFilter,
    GameConfig,
    GameEngine,
    evader_step,
    preset_select,
    write_cursor_log,
)
from delaychase.stability import classify_presets, envelope_growth_rate, rightmost_root


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_scalar_quasi_polynomial_oracle():
    t0 = time.perf_counter()
    v_neutral = rightmost_root(hayes_system(np.pi / 2))
    v_one = rightmost_root(hayes_system(1.0))
    elapsed = time.perf_counter() - t0
    ref = complex(lambertw(-1.0, 0))  # independent Lambert-W reference
    ok = (
        abs(v_neutral.abscissa) < 1e-6
        and abs(v_one.abscissa - ref.real) < 1e-4
        and elapsed < 1.0
    )
    report(
        "scalar quasi-polynomial oracle", ok,
        f"abscissa(pi/2) = {v_neutral.abscissa:.2e}, "
        f"abscissa(1) = {v_one.abscissa:.6f} vs W0(-1) = {ref.real:.6f}, "
        f"runtime {elapsed * 1e3:.0f} ms",
    )


def test_zero_delay_reduction():
    sys = fig9_benchmark(0.0, 0.0)
    e0 = np.array([0.1, 0.0, 0.1, 0.0])
    traj = simulate(sys, SimConfig(horizon=10.0, initial_history=e0))
    m = zero_delay_matrix(sys)
    worst = max(
        np.max(np.abs(traj.states[i] - expm(m * traj.times[i]) @ e0))
        for i in range(0, len(traj), 100)
    )
    spectral = rightmost_root(sys).abscissa
    eig_ref = float(np.max(np.linalg.eigvals(m).real))
    ok = worst < 1e-6 and abs(spectral - eig_ref) < 1e-8
    report(
        "zero-delay reduction", ok,
        f"max state error vs expm {worst:.2e} (tol 1e-6); "
        f"abscissa {spectral:.9f} vs eig {eig_ref:.9f}",
    )


def test_riccati_correctness():
    worst_resid = 0.0
    rng = np.random.default_rng(2024)
    for _ in range(100):
        a = rng.normal(size=(4, 4)) - 1.5 * np.eye(4)
        b = rng.normal(size=(4, 2))
        mq = rng.normal(size=(4, 4))
        w = LqrWeights(q=mq @ mq.T, r=np.eye(2) * rng.uniform(0.5, 2.0))
        p = solve_care(a, b, w)
        worst_resid = max(worst_resid, care_residual(a, b, w.q, w.r, p))
        k = np.linalg.solve(w.r, b.T @ p)
        assert is_hurwitz(a - b @ k)
    # closed-form scalar cases
    scalars_ok = True
    for a0, q0, expected in ((0.0, 1.0, 1.0), (-1.0, 1.0, np.sqrt(2) - 1), (-1.0, 0.0, 0.0)):
        p = solve_care([[a0]], [[1.0]], LqrWeights(q=[[q0]], r=[[1.0]]))
        scalars_ok &= abs(p[0, 0] - expected) < 1e-11
    ok = worst_resid < 1e-10 and scalars_ok
    report(
        "Riccati correctness", ok,
        f"worst residual {worst_resid:.2e} over 100 instances (tol 1e-10); "
        f"scalar closed forms {'match' if scalars_ok else 'MISMATCH'}",
    )


def test_integrator_convergence():
    # an oscillatory history keeps the truncation error of the millisecond
    # steps above the double-precision floor, so the ratios are measurable
    sys = hayes_system(1.0)
    hist = lambda t: np.array([np.cos(10.0 * t)])
    ref = simulate(sys, SimConfig(horizon=3.0, dt=1e-3 / 16, initial_history=hist)).final_state[0]
    errs = []
    for dt_ms in (4.0, 2.0, 1.0, 0.5):
        x = simulate(sys, SimConfig(horizon=3.0, dt=dt_ms * 1e-3, initial_history=hist)).final_state[0]
        errs.append(abs(x - ref))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    ok = all(r >= 8.0 for r in ratios)
    report(
        "integrator convergence", ok,
        "errors " + " ".join(f"{e:.2e}" for e in errs)
        + "; halving ratios " + " ".join(f"{r:.1f}" for r in ratios) + " (need >= 8)",
    )


def test_preset_consistency():
    # hard gate: spectral abscissa sign == time-domain growth sign for all
    # three presets (classify_presets raises on any disagreement);
    # agreement with the published region labels is reported, not gating
    checks = classify_presets()
    lines = []
    for c in checks:
        agree = {True: "agrees", False: "DIFFERS", None: "-"}[c.agrees_published]
        lines.append(
            f"tau={c.tau}: abscissa {c.verdict.abscissa:+.4f} ({c.verdict.label}), "
            f"growth {c.growth_rate:+.4f}, published '{c.published_label}' {agree}"
        )
    ok = all(
        (c.verdict.abscissa > 0) == (c.growth_rate > 0) for c in checks
    )
    report("preset consistency (spectral vs time domain)", ok, "; ".join(lines))
    # computed truth: the printed benchmark matrices are unstable at every
    # preset, so only the 0.6 published label matches (see the README note)
    published_agreement = [c.agrees_published for c in checks]
    print(f"       published-label agreement (reported, non-gating): {published_agreement}")


def test_two_block_equivalence():
    sys = fig9_benchmark(0.8, 0.8)
    cfg = SimConfig(horizon=20.0, initial_history=[0.1, 0.0, 0.1, 0.0])
    dev = np.max(np.abs(simulate(sys, cfg).states - simulate_two_block(sys, cfg).states))
    worst_random = 0.0
    rng = np.random.default_rng(99)
    for _ in range(20):
        a = rng.normal(size=(4, 4)) - 3.0 * np.eye(4)
        b1 = 0.3 * rng.normal(size=(4, 4))
        b2 = 0.3 * rng.normal(size=(4, 4))
        s = DelaySystem(a, b1, b2, rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0))
        c = SimConfig(horizon=2.0, initial_history=rng.normal(size=4))
        worst_random = max(
            worst_random,
            np.max(np.abs(simulate(s, c).states - simulate_two_block(s, c).states)),
        )
    ok = dev < 1e-8 and worst_random < 1e-8
    report(
        "two-block equivalence", ok,
        f"fig9 max deviation {dev:.2e}; worst of 20 random systems "
        f"{worst_random:.2e} (tol 1e-8)",
    )


def test_evader_filter():
    dt = 1e-3
    filt = EvaderFilter(p=10.0)
    overshoot_ok = True
    for size in (0.1, 1.0, 10.0):
        internal = filt.initial_internal(0.0, 0.0)
        xs = []
        for _ in range(1500):
            internal = evader_step(filt, internal, (size, 0.0), dt)
            xs.append(internal[0])
        xs = np.array(xs)
        overshoot_ok &= xs.max() <= size + 1e-12
    internal = filt.initial_internal(0.0, 0.0)
    xs, vs = [], []
    for _ in range(1500):
        internal = evader_step(filt, internal, (1.0, 0.0), dt)
        xs.append(internal[0])
        vs.append(internal[1])
    xs, vs = np.array(xs), np.array(vs)
    outside = np.where(np.abs(xs - 1.0) > 0.02)[0]
    t_settle = (outside[-1] + 2) * dt
    peak = vs.max()
    ok = overshoot_ok and abs(t_settle - 0.58) <= 0.02 and abs(peak - 10 / np.e) <= 1e-3
    report(
        "evader filter", ok,
        f"zero overshoot on steps 0.1/1/10: {overshoot_ok}; "
        f"2% settling {t_settle:.4f} s (0.58 +- 0.02); "
        f"peak speed {peak:.6f} vs p/e = {10 / np.e:.6f} (+- 1e-3)",
    )


def test_disturbance_rejection():
    # reference configuration verified against an independent method-of-steps
    # integration before the build: heavy damping keeps the 0.8 s loop stable
    # while the LQR position stiffness (30) bounds the steady offset by 1/30
    plant = PlantParams(m=1.0, c=20.0)
    sm = build_plant(plant)
    k = lqr_gain(sm.a, sm.b, LqrWeights(q=np.diag([900.0, 1.0, 900.0, 1.0]), r=np.eye(2)))
    cfg = GameConfig(
        control=ControlLaw.from_gain(plant, k),
        tau1=preset_select("stable")[0], tau2=preset_select("stable")[1],
        evader_start=(0.5, 0.5), spawn_offset=(0.0, 0.0), capture_hold=1e6,
        disturbances=[DisturbanceSpec(kind="step", amplitude=1.0, start=5.0, channel="x")],
    )
    engine = GameEngine(cfg)
    last_bad = 0.0
    peak = 0.0
    for _ in range(15000):
        frame = engine.tick()
        err = float(np.hypot(frame.error_x, frame.error_y))
        if frame.t > 5.0:
            peak = max(peak, err)
            if err >= 0.05:
                last_bad = frame.t
    ok = 0.0 < last_bad < 15.0 and peak >= 0.05
    report(
        "disturbance rejection", ok,
        f"unit step at t=5 s: peak |pos error| {peak:.4f}, back below 0.05 "
        f"for good at t = {last_bad:.3f} s (deadline 15 s)",
    )


def test_replay_determinism(tmp_path):
    # record a cursor log from an interactive-style run, then feed it through
    # the CLI twice: the CSVs must match byte for byte
    probe = GameEngine(GameConfig(
        control=ControlLaw.from_delay_system(PlantParams(1.0, 1.0), fig9_benchmark(0.8, 0.8)),
        capture_hold=1e6,
    ))
    waypoints = [(0, 0.5, 0.5), (100, 0.81, 0.22), (350, 0.13, 0.94), (777, 0.6, 0.6)]
    pointer = 0
    for k in range(1200):
        while pointer < len(waypoints) and waypoints[pointer][0] <= k:
            probe.set_cursor(waypoints[pointer][1], waypoints[pointer][2])
            pointer += 1
        probe.tick()
    log_path = tmp_path / "cursor.csv"
    write_cursor_log(log_path, probe.cursor_log)

    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(
        '{"model": {"benchmark": "fig9"}, "delays": {"preset": "stable"},'
        ' "sim": {"dt": 0.001, "horizon": 1.2, "mode": "game"}}'
    )
    out1, out2 = tmp_path / "run1.csv", tmp_path / "run2.csv"
    code1 = main(["simulate", "--config", str(cfg_path), "--out", str(out1),
                  "--cursor-log", str(log_path)])
    code2 = main(["simulate", "--config", str(cfg_path), "--out", str(out2),
                  "--cursor-log", str(log_path)])
    identical = out1.read_bytes() == out2.read_bytes()
    ok = code1 == 0 and code2 == 0 and identical
    report(
        "replay determinism", ok,
        f"two replays of a {len(probe.cursor_log)}-entry cursor log: "
        f"exit codes ({code1}, {code2}), CSVs byte-identical: {identical}",
    )


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
