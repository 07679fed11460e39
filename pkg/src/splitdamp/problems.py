"""Benchmark systems: a damped planar pendulum and a damped elastic
pendulum in three dimensions, plus the cylindrical reduced equations used
by the rotating-equilibrium diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import (DissipationField, MassMatrix, PhaseState, PotentialField,
                    RayleighSystem, SymmetryGenerator)

# Guard radius for the elastic pendulum's |q| = 0 force singularity.
ELASTIC_SINGULAR_RADIUS = 1e-9


def planar_pendulum(epsilon: float = 0.0) -> RayleighSystem:
    """Damped pendulum in the vertical plane: unit mass, V(q) = 1 - cos q,
    unit dissipation tensor."""
    unit = np.array([[1.0]])
    mass = MassMatrix.from_matrix(unit)
    dissipation = DissipationField(evaluate=lambda q: unit, declared_rank=1,
                                   q_independent=True)
    potential = PotentialField(
        value=lambda q: 1.0 - math.cos(q[0]),
        gradient=np.sin,
    )
    return RayleighSystem(mass, dissipation, potential, epsilon=epsilon,
                          singular_radius=0.0, label="planar_pendulum")


@dataclass(frozen=True)
class ElasticPendulumParams:
    """Mass, spring stiffness, rest length, and gravity vector."""

    m: float = 1.0
    k: float = 1.0
    ell: float = 1.0
    gravity: tuple = (0.0, 0.0, -1.0)

    def __post_init__(self):
        if self.m <= 0.0 or self.k <= 0.0 or self.ell <= 0.0:
            raise ValueError("m, k, ell must all be positive")
        gravity = tuple(float(g) for g in self.gravity)
        if len(gravity) != 3 or not all(math.isfinite(g) for g in gravity):
            raise ValueError("gravity must be a finite 3-vector")
        object.__setattr__(self, "gravity", gravity)

    @property
    def gravity_vector(self):
        return np.array(self.gravity)


def elastic_pendulum(params: ElasticPendulumParams | None = None,
                     epsilon: float = 0.0) -> RayleighSystem:
    """Spring pendulum under gravity; damping acts along the spring only.

    The dissipation matrix is the unit-rank projector q q^T / |q|^2, so the
    damping vanishes whenever p is perpendicular to q.
    """
    if params is None:
        params = ElasticPendulumParams()
    m, k, ell = params.m, params.k, params.ell
    grav = params.gravity_vector
    guard = ELASTIC_SINGULAR_RADIUS

    def dissipation_matrix(q):
        r2 = float(q @ q)
        if r2 <= guard * guard:
            raise DomainError("dissipation projector undefined at the origin")
        return np.outer(q, q) / r2

    def value(q):
        return 0.5 * k * (ell - float(np.linalg.norm(q))) ** 2 - m * float(q @ grav)

    def gradient(q):
        r = float(np.linalg.norm(q))
        if r <= guard:
            raise DomainError("spring force undefined at the origin")
        return k * (1.0 - ell / r) * q - m * grav

    mass = MassMatrix.from_matrix(m * np.eye(3))
    dissipation = DissipationField(evaluate=dissipation_matrix, declared_rank=1)
    potential = PotentialField(value=value, gradient=gradient)
    return RayleighSystem(mass, dissipation, potential, epsilon=epsilon,
                          singular_radius=guard, label="elastic_pendulum")


def rotation_about_z() -> SymmetryGenerator:
    """Generator of rotations about e3; its momentum is (q x p)_3."""
    return SymmetryGenerator(lambda q: np.array([-q[1], q[0], 0.0]))


def azimuthal_momentum(z: PhaseState) -> float:
    """(q x p)_3, the conserved momentum of the rotation symmetry."""
    q, p = z.q, z.p
    return float(q[0] * p[1] - q[1] * p[0])


def gravity_magnitude(params: ElasticPendulumParams) -> float:
    """Scalar g for gravity of the form (0, 0, -g), as the reduced
    cylindrical equations assume."""
    g = params.gravity
    if g[0] != 0.0 or g[1] != 0.0:
        raise ValueError("reduced equations assume gravity along the z-axis")
    return -g[2]


@dataclass(frozen=True)
class ReducedState:
    """Point (rho, z, p_rho, p_z) of the reduced cylindrical chart at a
    fixed momentum value mu.  Valid only for rho > 0."""

    rho: float
    z: float
    p_rho: float
    p_z: float
    mu: float = 0.0


def reduced_vector_field(params: ElasticPendulumParams, mu: float,
                         s: ReducedState, epsilon: float):
    """Time derivative (rho', z', p_rho', p_z') of the reduced coordinates.

    The angular dynamics is eliminated at fixed momentum mu (the explicit
    argument; s.mu is carried for bookkeeping only).  The centrifugal term
    enters as +mu^2 / (m rho^3), as dictated by the reduced Hamiltonian
    (p_rho^2 + mu^2/rho^2 + p_z^2) / (2m) + V(rho, z).
    """
    if s.rho <= 0.0:
        raise DomainError("reduced chart requires rho > 0")
    m, k, ell = params.m, params.k, params.ell
    g = gravity_magnitude(params)
    r = math.hypot(s.rho, s.z)
    spring = k * (ell / r - 1.0)
    shear = epsilon * (s.z * s.p_z + s.rho * s.p_rho) / (m * r * r)
    return (s.p_rho / m,
            s.p_z / m,
            spring * s.rho + mu * mu / (m * s.rho ** 3) - s.rho * shear,
            spring * s.z - m * g - s.z * shear)
