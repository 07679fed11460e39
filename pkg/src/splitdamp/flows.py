"""Exact flows of the split vector fields.

The damped system splits as (free drift) + (potential kick) + (momentum
decay).  Each summand integrates in closed form on a chart with constant
mass matrix:

* drift:      q' = q + t M^{-1} p
* kick:       p' = p - t grad V(q)
* decay:      p' = exp(-eps t C(q)) p            with C(q) = D(q) M^{-1}
* kick-decay: p' = exp(-eps t C(q)) p - t phi1(-eps t C(q)) grad V(q),
              the exact solution of the frozen-q affine system
              p' = -grad V(q) - eps C(q) p.

All flows advance the state's time stamp by t.  Negative t is permitted
everywhere and runs the decay factors anti-dissipatively (used by the
adjoint and composition tests).
"""

from __future__ import annotations

from .linalg import expm, expm_phi1
from .model import PhaseState, RayleighSystem


def _drift(system, t, q, p):
    return q + t * (system.mass.inverse @ p), p


def _kick(system, t, q, p):
    system.check_domain(q)
    return q, p - t * system.potential.gradient(q)


def _decay(system, epsilon, t, q, p):
    if epsilon == 0.0 or t == 0.0:
        return q, p
    C = system.dissipation.evaluate(q) @ system.mass.inverse
    return q, expm((-epsilon * t) * C) @ p


def _kick_decay(system, epsilon, t, q, p):
    system.check_domain(q)
    grad = system.potential.gradient(q)
    if epsilon == 0.0 or t == 0.0:
        return q, p - t * grad
    A = (-epsilon * t) * (system.dissipation.evaluate(q) @ system.mass.inverse)
    E, P = expm_phi1(A)
    return q, E @ p - t * (P @ grad)


def flow_kinetic(system: RayleighSystem, t: float, z: PhaseState) -> PhaseState:
    """Exact free drift: straight-line motion at constant momentum."""
    t = float(t)
    q, p = _drift(system, t, z.q, z.p)
    return PhaseState(q, p, z.t + t)


def flow_potential(system: RayleighSystem, t: float, z: PhaseState) -> PhaseState:
    """Exact potential kick: momentum update at frozen configuration."""
    t = float(t)
    q, p = _kick(system, t, z.q, z.p)
    return PhaseState(q, p, z.t + t)


def flow_dissipation(system: RayleighSystem, epsilon: float, t: float,
                     z: PhaseState) -> PhaseState:
    """Exact momentum decay at frozen configuration."""
    t = float(t)
    q, p = _decay(system, float(epsilon), t, z.q, z.p)
    return PhaseState(q, p, z.t + t)


def flow_potential_dissipation(system: RayleighSystem, epsilon: float, t: float,
                               z: PhaseState) -> PhaseState:
    """Exact combined kick-decay fiber flow (exponential Euler step).

    Reduces exactly to flow_potential when epsilon == 0, since phi1(0) = I.
    """
    t = float(t)
    q, p = _kick_decay(system, float(epsilon), t, z.q, z.p)
    return PhaseState(q, p, z.t + t)
