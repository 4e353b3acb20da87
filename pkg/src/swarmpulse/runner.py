"""Deterministic run orchestration: config in, traces and summary out.

One call builds the configured model, simulates it on a single
timeline, and collects the three trace tables plus a summary dict. The
same config and seed always produce byte-identical trace files.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from .config import ScenarioConfig, formation_positions
from .drone import DroneParams
from .engine import DroneSwarmEngine, NumericBlowup, ScenarioEvent
from .geometry import TAU, seeded_rng
from .medium import BroadcastMedium
from .pulse import PulsePopulation
from .reference import SwarmParams, run_reference
from .smoothing import make_filter
from .traces import (
    METRICS_HEADER,
    PHASE_HEADER,
    POSITION_HEADER,
    write_csv,
    write_summary,
)

DEFAULT_OUT = "runs"


@dataclass
class RunResult:
    name: str
    cfg: ScenarioConfig
    phase_rows: list[tuple]
    position_rows: list[tuple]
    metric_rows: list[tuple]
    fire_log: list[tuple[float, int]]
    summary: dict
    paths: dict[str, Path] | None = None


def resolve_out_dir(cfg: ScenarioConfig, out_opt: str | None) -> Path:
    """Precedence: --out flag, config output.dir, SWARMPULSE_OUT, ./runs."""
    if out_opt:
        return Path(out_opt)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    env = os.environ.get("SWARMPULSE_OUT")
    if env:
        return Path(env)
    return Path(DEFAULT_OUT)


def _sample_every(cfg: ScenarioConfig) -> int:
    return max(1, round(1.0 / (cfg.trace_rate * cfg.dt)))


def run_config(
    cfg: ScenarioConfig,
    name: str = "run",
    out_dir: str | None = None,
    write: bool = True,
) -> RunResult:
    """Execute one scenario; optionally write its trace files."""
    if cfg.model == "pulse":
        result = _run_pulse(cfg, name)
    elif cfg.model == "reference_swarmalator":
        result = _run_reference(cfg, name)
    elif cfg.model == "drone":
        result = _run_drone(cfg, name)
    else:
        raise ValueError(f"unknown model {cfg.model!r}")

    if write:
        base = resolve_out_dir(cfg, out_dir) / name
        base.mkdir(parents=True, exist_ok=True)
        paths = {
            "phases": base / "phases.csv",
            "positions": base / "positions.csv",
            "metrics": base / "metrics.csv",
            "summary": base / "summary.json",
        }
        write_csv(paths["phases"], PHASE_HEADER, result.phase_rows)
        write_csv(paths["positions"], POSITION_HEADER, result.position_rows)
        write_csv(paths["metrics"], METRICS_HEADER, result.metric_rows)
        write_summary(paths["summary"], result.summary)
        result.paths = paths
    return result


# -- pulse ---------------------------------------------------------------


def _run_pulse(cfg: ScenarioConfig, name: str) -> RunResult:
    rng = seeded_rng(cfg.seed)
    pop = PulsePopulation(list(rng.uniform(0.0, 1.0, cfg.n)), cfg.pulse_k, cfg.pulse_rate)
    phase_rows: list[tuple] = []
    metric_rows: list[tuple] = []
    fire_log: list[tuple[float, int]] = []

    def record() -> None:
        t = pop.t
        for i, phase in enumerate(pop.phases):
            phase_rows.append((t, i, phase, None))
        thetas = [p * TAU for p in pop.phases]
        metric_rows.append(
            (
                t,
                metrics_mod.order_parameter(thetas),
                pop.spread() * TAU,
                None,
                None,
                None,
                None,
                0,
            )
        )

    record()
    steps = int(round(cfg.duration / cfg.dt))
    every = _sample_every(cfg)
    for step in range(1, steps + 1):
        for event in pop.advance(cfg.dt):
            fire_log.append((event.time, event.osc_id))
        if step % every == 0 or step == steps:
            record()

    final = metric_rows[-1]
    summary = {
        "scenario": name,
        "model": cfg.model,
        "seed": cfg.seed,
        "duration": cfg.duration,
        "dt": cfg.dt,
        "agents_final": cfg.n,
        "fires_total": len(fire_log),
        "final": {
            "t": final[0],
            "order_param": final[1],
            "max_pair_diff": final[2],
        },
    }
    return RunResult(name, cfg, phase_rows, [], metric_rows, fire_log, summary)


# -- reference swarmalator -------------------------------------------------


def _run_reference(cfg: ScenarioConfig, name: str) -> RunResult:
    rng = seeded_rng(cfg.seed)
    params = SwarmParams(
        n=cfg.n,
        k=cfg.ref_k,
        j=cfg.ref_j,
        a=cfg.ref_a,
        b=cfg.ref_b,
        freq_var=cfg.ref_freq_var,
    )
    trace = run_reference(
        params,
        cfg.duration,
        cfg.dt,
        rng,
        base_omega=cfg.ref_omega,
        trace_every=_sample_every(cfg),
    )

    phase_rows: list[tuple] = []
    position_rows: list[tuple] = []
    metric_rows: list[tuple] = []
    for s in range(len(trace.times)):
        t = float(trace.times[s])
        pos = trace.positions[s]
        vel = trace.velocities[s]
        theta = trace.thetas[s]
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(theta))):
            bad = int(np.nonzero(~np.isfinite(pos).all(axis=1) | ~np.isfinite(theta))[0][0])
            raise NumericBlowup(s, bad)
        for i in range(cfg.n):
            phase_rows.append((t, i, float(theta[i]), None))
            position_rows.append(
                (t, i, float(pos[i, 0]), float(pos[i, 1]), float(vel[i, 0]), float(vel[i, 1]))
            )
        spacing = metrics_mod.pairwise_spacing(pos, t)
        metric_rows.append(
            (
                t,
                metrics_mod.order_parameter(theta),
                metrics_mod.max_pair_diff(theta),
                spacing.am,
                spacing.gm,
                spacing.min,
                spacing.max,
                0,
            )
        )

    final = metric_rows[-1]
    final_speed = float(np.max(np.linalg.norm(trace.velocities[-1], axis=1)))
    rc = metrics_mod.rainbow_correlation(trace.positions[-1], trace.thetas[-1])
    summary = {
        "scenario": name,
        "model": cfg.model,
        "seed": cfg.seed,
        "duration": cfg.duration,
        "dt": cfg.dt,
        "agents_final": cfg.n,
        "final": {
            "t": final[0],
            "order_param": final[1],
            "max_pair_diff": final[2],
            "am": final[3],
            "gm": final[4],
            "min": final[5],
            "max": final[6],
            "max_speed": final_speed,
            "rainbow_correlation": rc,
        },
    }
    return RunResult(name, cfg, phase_rows, position_rows, metric_rows, [], summary)


# -- drone ----------------------------------------------------------------


def build_drone_engine(cfg: ScenarioConfig) -> DroneSwarmEngine:
    """Engine exactly as the bundled scenarios construct it."""
    params = DroneParams(
        k_visible=cfg.drone_k_visible,
        k_hidden=cfg.drone_k_hidden,
        j=cfg.drone_j,
        a=cfg.drone_a,
        b=cfg.drone_b,
        speed_cap=cfg.drone_speed_cap,
        freq_var=cfg.drone_freq_var,
    )
    medium = BroadcastMedium(
        airtime=cfg.medium_airtime, collision_policy=cfg.medium_collision_policy
    )
    events = [
        ScenarioEvent(
            time=ev.time,
            kind=ev.kind,
            pos=None if ev.pos is None else np.array(ev.pos, dtype=np.float64),
            target=ev.target,
        )
        for ev in cfg.events
    ]
    engine = DroneSwarmEngine(
        params=params,
        medium=medium,
        rng=seeded_rng(cfg.seed),
        dt=cfg.dt,
        base_omega=cfg.drone_omega,
        hidden_in_payload=cfg.drone_hidden_in_payload,
        filter_factory=lambda: make_filter(
            cfg.smoothing_mode, cfg.smoothing_window, cfg.smoothing_alpha
        ),
        events=events,
    )
    for pos in formation_positions(cfg):
        engine.add_drone(pos)
    return engine


def _run_drone(cfg: ScenarioConfig, name: str) -> RunResult:
    engine = build_drone_engine(cfg)
    phase_rows: list[tuple] = []
    position_rows: list[tuple] = []
    metric_rows: list[tuple] = []

    def on_sample(eng: DroneSwarmEngine) -> None:
        t = eng.t
        alive = eng.alive_drones()
        for d in alive:
            phase_rows.append((t, d.id, d.theta, d.hidden))
            position_rows.append(
                (t, d.id, float(d.pos[0]), float(d.pos[1]), float(d.command[0]), float(d.command[1]))
            )
        thetas = [d.theta for d in alive]
        positions = np.array([d.pos for d in alive])
        if len(alive) >= 2:
            spacing = metrics_mod.pairwise_spacing(positions, t)
            am, gm, mn, mx = spacing.am, spacing.gm, spacing.min, spacing.max
        else:
            am = gm = mn = mx = None
        metric_rows.append(
            (
                t,
                metrics_mod.order_parameter(thetas),
                metrics_mod.max_pair_diff(thetas),
                am,
                gm,
                mn,
                mx,
                engine.medium.collision_count(),
            )
        )

    engine.run(cfg.duration, sample_every=_sample_every(cfg), on_sample=on_sample)

    alive = engine.alive_drones()
    final = metric_rows[-1]
    final_speed = max(
        (float(np.linalg.norm(d.command)) for d in alive), default=0.0
    )
    stats = engine.medium.stats
    per_agent_fires = {}
    for t, aid in engine.fire_log:
        per_agent_fires.setdefault(aid, []).append(t)
    if len(engine.fire_log) >= 2:
        mean_gap, min_gap, jain = metrics_mod.broadcast_spacing_stats(
            per_agent_fires.values()
        )
    else:
        mean_gap = min_gap = jain = None
    summary = {
        "scenario": name,
        "model": cfg.model,
        "seed": cfg.seed,
        "duration": cfg.duration,
        "dt": cfg.dt,
        "agents_final": len(alive),
        "final": {
            "t": final[0],
            "order_param": final[1],
            "max_pair_diff": final[2],
            "am": final[3],
            "gm": final[4],
            "min": final[5],
            "max": final[6],
            "max_speed": final_speed,
        },
        "medium": {
            "sent": stats.sent,
            "delivered": stats.delivered,
            "dropped": stats.dropped,
            "collisions": stats.collisions,
            "in_flight": engine.medium.in_flight(),
        },
        "broadcasts": {
            "total": len(engine.fire_log),
            "mean_gap": mean_gap,
            "min_gap": min_gap,
            "jain_fairness": jain,
        },
    }
    return RunResult(
        name, cfg, phase_rows, position_rows, metric_rows, list(engine.fire_log), summary
    )
