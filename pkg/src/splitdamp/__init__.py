"""Structure-preserving splitting integrators for Hamiltonian systems with
weak velocity-proportional (Rayleigh) damping, plus conservation
diagnostics and an experiment CLI."""

from .errors import (ConfigError, DegenerateMomentumError, DimensionError,
                     DomainError, GridMismatchError, NegativeRateError,
                     NoConvergenceError, SolverError, SplitDampError, StepError)
from .linalg import expm, expm_phi1, phi1
from .model import (DissipationField, MassMatrix, PhaseState, PotentialField,
                    RayleighSystem, SymmetryGenerator, flat, hamiltonian,
                    kinetic_energy, momentum, rayleigh_rate, sharp)
from .flows import (flow_dissipation, flow_kinetic, flow_potential,
                    flow_potential_dissipation)
from .integrators import (HEUN, HEUN_FULL, STORMER_VERLET, THREE_TERM, TWO_TERM,
                          YOSHIDA4, ButcherTableau, Scheme, Trajectory, compose,
                          composed, integrate, make_step_kernel, rk_split,
                          rk_split_b, step_2s, step_3s, step_heun_full,
                          step_rks, step_rksb, step_sv)
from .problems import (ELASTIC_SINGULAR_RADIUS, ElasticPendulumParams,
                       ReducedState, azimuthal_momentum, elastic_pendulum,
                       gravity_magnitude, planar_pendulum,
                       reduced_vector_field, rotation_about_z)
from .diagnostics import (ConvergenceReport, EquilibriumSolution, SeriesReport,
                          convergence_order, dissipation_defect, drift_plateau,
                          energy_series, equilibrium_drift, momentum_series,
                          project_cylindrical, reference_trajectory,
                          secular_energy_slope, solve_relative_equilibrium)

__version__ = "0.1.0"
