"""Geometric data of a weakly damped mechanical system and its pointwise
observables.

A system bundles a constant mass matrix, a dissipation field q -> D(q),
a potential, and a damping strength epsilon.  States are (q, p) pairs in
a fixed Euclidean chart; the convention throughout is

    H(q, p) = p . M^{-1} p / 2 + V(q),

so the planar pendulum carries the unit mass matrix and the elastic
pendulum carries M = m * I.  All objects are immutable value data after
construction, and the evaluation callables are expected to be pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NegativeRateError

Array = np.ndarray


@dataclass(frozen=True)
class MassMatrix:
    """Constant inertia matrix with its precomputed inverse."""

    matrix: Array
    inverse: Array

    @classmethod
    def from_matrix(cls, matrix, tol=1e-12):
        M = np.atleast_2d(np.asarray(matrix, dtype=float))
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"mass matrix must be square, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ValueError("mass matrix has non-finite entries")
        scale = np.linalg.norm(M)
        if np.linalg.norm(M - M.T) > tol * scale:
            raise ValueError("mass matrix must be symmetric")
        eigenvalues = np.linalg.eigvalsh(M)
        if eigenvalues.min() <= 0.0:
            raise ValueError("mass matrix must be positive definite")
        inverse = np.linalg.inv(M)
        residual = np.linalg.norm(M @ inverse - np.eye(M.shape[0]))
        if residual > tol * max(1.0, scale):
            raise ValueError("mass matrix inverse failed the round-trip check")
        return cls(M, inverse)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DissipationField:
    """Field q -> D(q) of symmetric positive semi-definite damping matrices.

    declared_rank is the (constant) rank of D.  q_independent marks fields
    that do not vary with q, which lets steppers precompute and reuse the
    decay propagator.
    """

    evaluate: Callable[[Array], Array]
    declared_rank: int
    q_independent: bool = False


@dataclass(frozen=True)
class PotentialField:
    """Potential energy value and its gradient, as callables of q."""

    value: Callable[[Array], float]
    gradient: Callable[[Array], Array]


@dataclass(frozen=True)
class SymmetryGenerator:
    """Infinitesimal generator q -> xi(q) of a point symmetry."""

    generator: Callable[[Array], Array]


@dataclass(frozen=True)
class RayleighSystem:
    """Mass matrix, dissipation field, potential, and damping strength.

    singular_radius > 0 turns on a domain guard: energy and force
    evaluations raise DomainError when |q| falls inside that radius
    (used by the elastic pendulum, whose force law is singular at the
    origin).  A radius of 0 disables the guard.
    """

    mass: MassMatrix
    dissipation: DissipationField
    potential: PotentialField
    epsilon: float = 0.0
    singular_radius: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        if self.singular_radius < 0.0:
            raise ValueError("singular_radius must be >= 0")

    @property
    def dim(self):
        return self.mass.dim

    def check_domain(self, q):
        if self.singular_radius > 0.0:
            if float(np.linalg.norm(q)) <= self.singular_radius:
                raise DomainError(
                    f"|q| <= singular radius {self.singular_radius:g}")


@dataclass(frozen=True)
class PhaseState:
    """Configuration/momentum pair with a time stamp."""

    q: Array
    p: Array
    t: float = 0.0

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"q and p must be vectors of equal length, "
                             f"got {q.shape} and {p.shape}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self):
        return self.q.shape[0]


def sharp(system: RayleighSystem, p) -> Array:
    """Velocity M^{-1} p associated with a momentum covector."""
    return system.mass.inverse @ np.asarray(p, dtype=float)


def flat(system: RayleighSystem, v) -> Array:
    """Momentum M v associated with a velocity (inverse of sharp)."""
    return system.mass.matrix @ np.asarray(v, dtype=float)


def kinetic_energy(system: RayleighSystem, p) -> float:
    p = np.asarray(p, dtype=float)
    return 0.5 * float(p @ (system.mass.inverse @ p))


def hamiltonian(system: RayleighSystem, z: PhaseState) -> float:
    """Total energy p.M^{-1}p/2 + V(q) at a phase point."""
    system.check_domain(z.q)
    return kinetic_energy(system, z.p) + float(system.potential.value(z.q))


def rayleigh_rate(system: RayleighSystem, z: PhaseState, tol=1e-12) -> float:
    """Instantaneous energy-loss density d_q(v, v) with v = M^{-1} p.

    The energy decays at epsilon times this value.  The result must be
    nonnegative for a valid dissipation field; anything below -tol raises
    NegativeRateError.
    """
    v = system.mass.inverse @ z.p
    rate = float(v @ (system.dissipation.evaluate(z.q) @ v))
    if rate < -tol:
        raise NegativeRateError(
            f"dissipation rate {rate:.3e} < -{tol:g}; invalid dissipation field")
    return rate


def momentum(gen: SymmetryGenerator, z: PhaseState) -> float:
    """Momentum pairing <p, xi(q)> of a symmetry generator."""
    return float(z.p @ gen.generator(z.q))
