"""Command-line front end: experiment configuration, batch execution, CSV
emission, and standalone SVG figures.

    splitdamp run|converge|phase|releq|compare CONFIG.json [--out DIR] [--jobs N]

Outputs land in DIR/<config-stem>/<scheme>/h<step>/ with one run.json
sidecar per run and one index.json per invocation.  CSV floats are printed
in 17-significant-digit scientific notation, so identical configs produce
byte-identical CSV files.  Exit codes: 0 ok, 2 config/validation error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, build_system, load_config, steps_for
from .diagnostics import (dissipation_defect, energy_series, equilibrium_drift,
                          convergence_order, momentum_series,
                          reference_trajectory, solve_relative_equilibrium)
from .errors import ConfigError, SplitDampError
from .integrators import Scheme, Trajectory, integrate
from .model import PhaseState
from .problems import rotation_about_z
from .svgplot import line_plot

REFERENCE_REFINEMENT = 1000


def _fmt(value) -> str:
    return f"{value:.16e}"


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell)
                              for cell in row))
    path.write_text("\n".join(lines) + "\n")


def _write_run_json(directory: Path, scheme: Scheme, h: float, epsilon: float,
                    wall_time: float, **extra):
    payload = {"scheme": scheme.label, "h": h, "epsilon": epsilon,
               "wall_time": wall_time}
    payload.update(extra)
    (directory / "run.json").write_text(json.dumps(payload, indent=2) + "\n")


def _run_dir(out_root: Path, cfg: ExperimentConfig, scheme_label: str,
             h: float) -> Path:
    return out_root / cfg.stem / scheme_label / f"h{h:g}"


def _write_index(out_root: Path, cfg: ExperimentConfig, run_dirs):
    entries = sorted(str(d.relative_to(out_root / cfg.stem)) for d in run_dirs)
    payload = {"config": cfg.stem, "command": cfg.command, "runs": entries}
    (out_root / cfg.stem / "index.json").write_text(
        json.dumps(payload, indent=2) + "\n")


def _execute(tasks, jobs):
    """Run per-(scheme, h) closures, optionally on a thread pool.  Each task
    writes only inside its own run directory, so there is no contention."""
    if jobs <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [future.result() for future in futures]


def _initial_state(cfg: ExperimentConfig) -> PhaseState:
    return PhaseState(cfg.initial_q, cfg.initial_p, 0.0)


def _phase_columns(cfg: ExperimentConfig, traj: Trajectory):
    if cfg.problem == "planar":
        return ("q", "p"), traj.positions()[:, 0], traj.momenta()[:, 0]
    positions = traj.positions()
    return ("x", "y"), positions[:, 0], positions[:, 1]


def _emit_states(directory: Path, traj: Trajectory):
    n = traj.system.dim
    header = ["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
    rows = [[z.t, *z.q, *z.p] for z in traj.states]
    _write_csv(directory / "states.csv", header, rows)


def _emit_energy(directory: Path, cfg, system, traj, z0, h, n_steps,
                 want_csv, want_svg):
    reference = reference_trajectory(system, z0, h, n_steps,
                                     refinement=REFERENCE_REFINEMENT)
    energies = energy_series(system, traj).values
    ref_energies = energy_series(system, reference).values
    errors = np.abs(energies - ref_energies)
    if want_csv:
        rows = list(zip(traj.times, energies, ref_energies, errors))
        _write_csv(directory / "energy.csv", ["t", "H", "H_ref", "abs_err"], rows)
    if want_svg:
        svg = line_plot([(traj.times, energies, "H"),
                         (traj.times, ref_energies, "H_ref")],
                        title=f"energy ({traj.scheme.label}, h={h:g})",
                        xlabel="t", ylabel="H")
        (directory / "energy.svg").write_text(svg)


def _emit_phase_svg(directory: Path, cfg, traj, h):
    (labels, xs, ys) = _phase_columns(cfg, traj)
    svg = line_plot([(xs, ys, "")],
                    title=f"phase ({traj.scheme.label}, h={h:g})",
                    xlabel=labels[0], ylabel=labels[1])
    (directory / "phase.svg").write_text(svg)


def cmd_run(cfg: ExperimentConfig, out_root: Path, jobs: int):
    system = build_system(cfg)
    z0 = _initial_state(cfg)
    generator = rotation_about_z() if cfg.problem == "elastic" else None

    def one(h):
        def task():
            n_steps = steps_for(cfg.t_final, h)
            started = time.perf_counter()
            traj = integrate(cfg.scheme, system, z0, h, n_steps)
            directory = _run_dir(out_root, cfg, cfg.scheme.label, h)
            directory.mkdir(parents=True, exist_ok=True)
            if "states" in cfg.outputs:
                _emit_states(directory, traj)
            if "energy" in cfg.outputs or "energy_svg" in cfg.outputs:
                _emit_energy(directory, cfg, system, traj, z0, h, n_steps,
                             want_csv="energy" in cfg.outputs,
                             want_svg="energy_svg" in cfg.outputs)
            if "momentum" in cfg.outputs:
                series = momentum_series(generator, traj)
                _write_csv(directory / "momentum.csv", ["t", "J3"],
                           list(zip(series.times, series.values)))
            if "defect" in cfg.outputs:
                series = dissipation_defect(system, traj)
                rows = [[str(int(k)), v] for k, v in zip(series.times, series.values)]
                _write_csv(directory / "defect.csv", ["k", "defect"], rows)
            if "phase_svg" in cfg.outputs:
                _emit_phase_svg(directory, cfg, traj, h)
            _write_run_json(directory, cfg.scheme, h, cfg.epsilon,
                            time.perf_counter() - started)
            return directory
        return task

    run_dirs = _execute([one(h) for h in cfg.h_values], jobs)
    _write_index(out_root, cfg, run_dirs)


def cmd_phase(cfg: ExperimentConfig, out_root: Path, jobs: int):
    system = build_system(cfg)
    z0 = _initial_state(cfg)

    def one(h):
        def task():
            n_steps = steps_for(cfg.t_final, h)
            started = time.perf_counter()
            traj = integrate(cfg.scheme, system, z0, h, n_steps)
            directory = _run_dir(out_root, cfg, cfg.scheme.label, h)
            directory.mkdir(parents=True, exist_ok=True)
            labels, xs, ys = _phase_columns(cfg, traj)
            _write_csv(directory / "phase.csv", list(labels), list(zip(xs, ys)))
            _emit_phase_svg(directory, cfg, traj, h)
            _write_run_json(directory, cfg.scheme, h, cfg.epsilon,
                            time.perf_counter() - started)
            return directory
        return task

    run_dirs = _execute([one(h) for h in cfg.h_values], jobs)
    _write_index(out_root, cfg, run_dirs)


def cmd_converge(cfg: ExperimentConfig, out_root: Path, jobs: int):
    system = build_system(cfg)
    z0 = _initial_state(cfg)
    schemes = cfg.schemes if cfg.schemes else (cfg.scheme,)
    h_min = min(cfg.h_values)
    reference = reference_trajectory(system, z0, h_min,
                                     steps_for(cfg.t_final, h_min),
                                     refinement=REFERENCE_REFINEMENT)

    def one(scheme):
        def task():
            started = time.perf_counter()
            report = convergence_order(scheme, system, z0, cfg.t_final,
                                       cfg.h_values, reference=reference)
            directory = out_root / cfg.stem / scheme.label / "convergence"
            directory.mkdir(parents=True, exist_ok=True)
            rows = [[h, err, report.fitted_slope]
                    for h, err in zip(report.step_sizes, report.global_errors)]
            _write_csv(directory / "convergence.csv", ["h", "error", "slope"], rows)
            svg = line_plot([(report.step_sizes, report.global_errors,
                              scheme.label)],
                            title=f"convergence ({scheme.label}, "
                                  f"slope {report.fitted_slope:.2f})",
                            xlabel="h", ylabel="global error",
                            log_x=True, log_y=True)
            (directory / "convergence.svg").write_text(svg)
            _write_run_json(directory, scheme, float(report.step_sizes[-1]),
                            cfg.epsilon, time.perf_counter() - started,
                            slope=report.fitted_slope)
            return directory
        return task

    run_dirs = _execute([one(s) for s in schemes], jobs)
    _write_index(out_root, cfg, run_dirs)


def cmd_releq(cfg: ExperimentConfig, out_root: Path, jobs: int):
    system = build_system(cfg)
    if cfg.mu is not None:
        mu = cfg.mu
        eq = solve_relative_equilibrium(cfg.params, mu)
        z0 = PhaseState(np.array([0.0, eq.rho, eq.z]),
                        np.array([-mu / eq.rho, 0.0, 0.0]), 0.0)
    else:
        z0 = _initial_state(cfg)
        mu = float(z0.q[0] * z0.p[1] - z0.q[1] * z0.p[0])
        eq = solve_relative_equilibrium(cfg.params, mu)

    def one(h):
        def task():
            n_steps = steps_for(cfg.t_final, h)
            started = time.perf_counter()
            traj = integrate(cfg.scheme, system, z0, h, n_steps)
            drift = equilibrium_drift(cfg.params, traj, eq)
            directory = _run_dir(out_root, cfg, cfg.scheme.label, h)
            directory.mkdir(parents=True, exist_ok=True)
            _write_csv(directory / "drift.csv", ["t", "dist"],
                       list(zip(drift.times, drift.values)))
            svg = line_plot([(drift.times, drift.values, "drift")],
                            title=f"equilibrium drift ({cfg.scheme.label}, h={h:g})",
                            xlabel="t", ylabel="distance")
            (directory / "drift.svg").write_text(svg)
            if "states" in cfg.outputs:
                _emit_states(directory, traj)
            if "phase_svg" in cfg.outputs:
                _emit_phase_svg(directory, cfg, traj, h)
            _write_run_json(directory, cfg.scheme, h, cfg.epsilon,
                            time.perf_counter() - started,
                            mu=mu, equilibrium_rho=eq.rho, equilibrium_z=eq.z,
                            residual_norm=eq.residual_norm,
                            initial_q=list(z0.q), initial_p=list(z0.p))
            return directory
        return task

    run_dirs = _execute([one(h) for h in cfg.h_values], jobs)
    _write_index(out_root, cfg, run_dirs)


def cmd_compare(cfg: ExperimentConfig, out_root: Path, jobs: int):
    system = build_system(cfg)
    z0 = _initial_state(cfg)
    h = cfg.h_values[0]
    n_steps = steps_for(cfg.t_final, h)
    started = time.perf_counter()
    energies = {}
    for scheme in cfg.schemes:
        traj = integrate(scheme, system, z0, h, n_steps)
        energies[scheme.label] = energy_series(system, traj)
    times = next(iter(energies.values())).times
    pairs = list(combinations(energies, 2))
    header = ["t"] + [f"diff_{a}_{b}" for a, b in pairs]
    diffs = [np.abs(energies[a].values - energies[b].values) for a, b in pairs]
    rows = [[t, *(d[i] for d in diffs)] for i, t in enumerate(times)]
    directory = out_root / cfg.stem / "compare" / f"h{h:g}"
    directory.mkdir(parents=True, exist_ok=True)
    _write_csv(directory / "compare.csv", header, rows)
    svg = line_plot([(times, d, f"|H_{a} - H_{b}|") for (a, b), d in zip(pairs, diffs)],
                    title=f"pairwise energy differences (h={h:g})",
                    xlabel="t", ylabel="|dH|")
    (directory / "compare.svg").write_text(svg)
    _write_run_json(directory, cfg.schemes[0], h, cfg.epsilon,
                    time.perf_counter() - started,
                    schemes=[s.label for s in cfg.schemes])
    _write_index(out_root, cfg, [directory])


COMMANDS = {
    "run": cmd_run,
    "converge": cmd_converge,
    "phase": cmd_phase,
    "releq": cmd_releq,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="splitdamp",
        description="Structure-preserving integration experiments for weakly "
                    "damped mechanical systems.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("config", help="JSON experiment configuration")
        sub.add_argument("--out", default="out", help="output directory root")
        sub.add_argument("--jobs", type=int, default=1,
                         help="concurrent (scheme, h) runs")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.command](cfg, Path(args.out), args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SplitDampError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
