"""Trajectory analyses: energy and momentum series, the per-step
energy-balance defect, fine-step reference solutions, convergence-order
fits, and rotating-equilibrium location and drift metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateMomentumError, GridMismatchError,
                     NoConvergenceError, SolverError, SplitDampError)
from .integrators import THREE_TERM, Scheme, Trajectory, integrate, make_step_kernel
from .model import PhaseState, RayleighSystem, SymmetryGenerator, hamiltonian, rayleigh_rate
from .problems import ElasticPendulumParams, gravity_magnitude


@dataclass(frozen=True)
class SeriesReport:
    """A labelled time series (carrier for the CSV/SVG emitters)."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class ConvergenceReport:
    """Global errors over a decreasing step-size ladder with the fitted
    log-log slope."""

    step_sizes: np.ndarray
    global_errors: np.ndarray
    fitted_slope: float

    def __post_init__(self):
        hs = np.asarray(self.step_sizes, dtype=float)
        errs = np.asarray(self.global_errors, dtype=float)
        if np.any(np.diff(hs) >= 0.0):
            raise ValueError("step sizes must be strictly decreasing")
        if np.any(errs <= 0.0):
            raise ValueError("global errors must be positive")
        object.__setattr__(self, "step_sizes", hs)
        object.__setattr__(self, "global_errors", errs)


@dataclass(frozen=True)
class EquilibriumSolution:
    """Rotating-equilibrium point of the reduced chart, with solver stats."""

    rho: float
    z: float
    mu: float
    residual_norm: float
    iterations: int
    residuals: tuple = ()


def energy_series(system: RayleighSystem, traj: Trajectory,
                  label: str = "H") -> SeriesReport:
    """Total energy along a trajectory."""
    values = np.array([hamiltonian(system, z) for z in traj.states])
    return SeriesReport(traj.times, values, label)


def momentum_series(gen: SymmetryGenerator, traj: Trajectory,
                    label: str = "J") -> SeriesReport:
    """Momentum pairing of a symmetry generator along a trajectory."""
    values = np.array([float(z.p @ gen.generator(z.q)) for z in traj.states])
    return SeriesReport(traj.times, values, label)


def dissipation_defect(system: RayleighSystem, traj: Trajectory) -> SeriesReport:
    """Per-step residual of the energy balance.

    defect_k = H(z_{k+1}) - H(z_k) + eps * Q_k, where Q_k is the Simpson
    quadrature of the dissipation rate along the numerical segment.  The
    mid-segment state is regenerated by a half-step of the trajectory's
    own scheme, so the quadrature error is O(h^5) per step and the defect
    is dominated by the integrator, not the quadrature.  The series is
    indexed by step number k.
    """
    if len(traj.states) < 2:
        raise ValueError("defect needs at least two states")
    kernel = make_step_kernel(traj.scheme, system)
    eps = system.epsilon
    h = traj.step_size
    energies = [hamiltonian(system, z) for z in traj.states]
    rates = [rayleigh_rate(system, z) for z in traj.states]
    defects = np.empty(len(traj.states) - 1)
    for k in range(len(defects)):
        z0 = traj.states[k]
        qm, pm = kernel(0.5 * h, z0.q, z0.p)
        rate_mid = rayleigh_rate(system, PhaseState(qm, pm, z0.t + 0.5 * h))
        quad = (h / 6.0) * (rates[k] + 4.0 * rate_mid + rates[k + 1])
        defects[k] = energies[k + 1] - energies[k] + eps * quad
    return SeriesReport(np.arange(len(defects), dtype=float), defects, "defect")


def reference_trajectory(system: RayleighSystem, z0: PhaseState, h_out: float,
                         n_steps: int, refinement: int = 1000) -> Trajectory:
    """Fine-step three-term-splitting run subsampled to the h_out grid.

    The inner step is h_out / refinement; refinement >= 100 is required.
    Doubling the refinement and comparing output is the standard
    self-convergence guard for this reference.
    """
    if refinement < 100:
        raise ValueError("refinement must be >= 100")
    h_out = float(h_out)
    if h_out <= 0.0 or n_steps < 0:
        raise ValueError("need h_out > 0 and n_steps >= 0")
    kernel = make_step_kernel(THREE_TERM, system)
    h_in = h_out / refinement
    q, p, t0 = z0.q, z0.p, z0.t
    states = [z0]
    for k in range(n_steps):
        for _ in range(refinement):
            q, p = kernel(h_in, q, p)
        states.append(PhaseState(q, p, t0 + (k + 1) * h_out))
    return Trajectory(tuple(states), h_out, THREE_TERM, system)


def _steps_exactly(t_final, h, tol=1e-9):
    n = int(round(t_final / h))
    if n < 1 or abs(n * h - t_final) > tol * max(1.0, abs(t_final)):
        raise ValueError(f"step size {h:g} does not divide the horizon {t_final:g}")
    return n


def convergence_order(scheme: Scheme, system: RayleighSystem, z0: PhaseState,
                      t_final: float, step_sizes, refinement: int = 1000,
                      reference: Trajectory | None = None) -> ConvergenceReport:
    """Least-squares order fit of the global error at t_final.

    The reference is a fine-step run at the smallest tested step size
    divided by the refinement factor; pass a precomputed one to share it
    across several schemes.
    """
    hs = sorted((float(h) for h in step_sizes), reverse=True)
    if len(hs) < 3:
        raise ValueError("need at least 3 step sizes")
    counts = [_steps_exactly(t_final, h) for h in hs]
    if reference is None:
        try:
            reference = reference_trajectory(system, z0, hs[-1], counts[-1],
                                             refinement)
        except SplitDampError as exc:
            raise SolverError(f"reference run failed: {exc}") from exc
    elif abs(reference.states[-1].t - (z0.t + t_final)) > 1e-9 * max(1.0, t_final):
        raise ValueError("reference trajectory does not end at t_final")
    z_ref = reference.states[-1]
    errors = []
    for h, n in zip(hs, counts):
        try:
            traj = integrate(scheme, system, z0, h, n)
        except SplitDampError as exc:
            raise SolverError(f"run at h={h:g} failed: {exc}") from exc
        z_end = traj.states[-1]
        errors.append(float(np.linalg.norm(
            np.concatenate([z_end.q - z_ref.q, z_end.p - z_ref.p]))))
    slope = float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
    return ConvergenceReport(np.array(hs), np.array(errors), slope)


def _equilibrium_residual(params, mu, rho, z):
    m, k, ell = params.m, params.k, params.ell
    g = gravity_magnitude(params)
    r = math.hypot(rho, z)
    spring = k * (ell / r - 1.0)
    return np.array([spring * rho + mu * mu / (m * rho ** 3),
                     spring * z - m * g])


def _equilibrium_jacobian(params, mu, rho, z):
    m, k, ell = params.m, params.k, params.ell
    r = math.hypot(rho, z)
    spring = k * (ell / r - 1.0)
    # d/drho and d/dz of k (ell/r - 1): -k ell rho / r^3, -k ell z / r^3
    dsr = -k * ell * rho / r ** 3
    dsz = -k * ell * z / r ** 3
    return np.array([
        [spring + rho * dsr - 3.0 * mu * mu / (m * rho ** 4), rho * dsz],
        [z * dsr, spring + z * dsz],
    ])


def solve_relative_equilibrium(params: ElasticPendulumParams, mu: float,
                               tol: float = 1e-12, max_iterations: int = 50
                               ) -> EquilibriumSolution:
    """Newton solve of the rotating-equilibrium balance in (rho, z).

    The equations are the radial balance spring + centrifugal = 0 and the
    vertical balance spring = gravity, at zero radial and vertical momentum.
    Initial guess (ell, -ell/2); step halving on residual increase.
    mu = 0 degenerates to the hanging equilibrium (rho -> 0) and is rejected.
    """
    mu = float(mu)
    if mu == 0.0:
        raise DegenerateMomentumError(
            "mu = 0 collapses onto the hanging equilibrium (rho -> 0)")
    x = np.array([params.ell, -0.5 * params.ell])
    residual = _equilibrium_residual(params, mu, x[0], x[1])
    norm = float(np.linalg.norm(residual))
    history = [norm]
    for iteration in range(1, max_iterations + 1):
        if norm <= tol:
            return EquilibriumSolution(float(x[0]), float(x[1]), mu, norm,
                                       iteration - 1, tuple(history))
        jac = _equilibrium_jacobian(params, mu, x[0], x[1])
        try:
            delta = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular Jacobian: {exc}") from exc
        damping = 1.0
        while True:
            trial = x + damping * delta
            if trial[0] > 0.0:
                trial_res = _equilibrium_residual(params, mu, trial[0], trial[1])
                trial_norm = float(np.linalg.norm(trial_res))
                if math.isfinite(trial_norm) and trial_norm < norm:
                    break
            damping *= 0.5
            if damping < 1e-12:
                raise NoConvergenceError("damped Newton step stalled")
        x, residual, norm = trial, trial_res, trial_norm
        history.append(norm)
    if norm <= tol:
        return EquilibriumSolution(float(x[0]), float(x[1]), mu, norm,
                                   max_iterations, tuple(history))
    raise NoConvergenceError(
        f"no convergence after {max_iterations} iterations (residual {norm:.3e})")


def project_cylindrical(z: PhaseState):
    """(rho, z, p_rho, p_z, p_phi) of a 3-d Cartesian phase point."""
    qx, qy, qz = z.q
    px, py, pz = z.p
    rho = math.hypot(qx, qy)
    p_rho = (qx * px + qy * py) / rho
    p_phi = qx * py - qy * px
    return rho, qz, p_rho, pz, p_phi


def equilibrium_drift(params: ElasticPendulumParams, traj: Trajectory,
                      eq: EquilibriumSolution) -> SeriesReport:
    """Distance of each projected state from the reduced equilibrium point,
    measured in the (rho, z, p_rho, p_z) chart."""
    if traj.system.dim != 3:
        raise ValueError("drift metric needs a 3-d trajectory")
    target = np.array([eq.rho, eq.z, 0.0, 0.0])
    values = np.empty(len(traj.states))
    for i, state in enumerate(traj.states):
        rho, zz, p_rho, p_z, _ = project_cylindrical(state)
        values[i] = float(np.linalg.norm(np.array([rho, zz, p_rho, p_z]) - target))
    return SeriesReport(traj.times, values, "drift")


def drift_plateau(series: SeriesReport) -> float:
    """Plateau level of a drift series: median over the final quarter."""
    n = len(series.values)
    tail = series.values[-max(1, n // 4):]
    return float(np.median(tail))


def secular_energy_slope(system: RayleighSystem, traj: Trajectory,
                         reference: Trajectory) -> float:
    """Least-squares growth rate of |H - H_ref| over the second half of
    the horizon.  Bounded-error methods give a slope near zero; methods
    that accumulate energy error give a visibly positive one."""
    t_a, t_b = traj.times, reference.times
    if len(t_a) != len(t_b) or float(np.max(np.abs(t_a - t_b))) > 1e-9:
        raise GridMismatchError("trajectory and reference grids differ")
    errors = np.abs(energy_series(system, traj).values
                    - energy_series(system, reference).values)
    half = len(t_a) // 2
    return float(np.polyfit(t_a[half:], errors[half:], 1)[0])
