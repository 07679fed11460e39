"""Splitting steppers, baselines, compositions, and the trajectory driver.

Scheme catalogue (rightmost factor of each composition acts first):

* three-term ("3s"):   decay(h/2) . drift(h/2) . kick(h) . drift(h/2) . decay(h/2)
* two-term ("2s"):     drift(h/2) . exact kick-decay(h) . drift(h/2)
* rk-split ("rks"):    drift(h/2) . explicit RK on the frozen-q fiber . drift(h/2)
* stormer-verlet ("sv"): the undamped drift-kick-drift base method
* heun-full ("heun"):  Heun's method applied to the full damped field
* rk-split-b ("rksb"): kick(h/2) . explicit RK on drift+decay . kick(h/2);
  a deliberately momentum-breaking rearrangement kept as a counterexample
* composed:            sub-stepped composition of any base scheme

With epsilon = 0 the first four coincide with Stormer-Verlet exactly (the
decay factors are identities and any consistent Runge-Kutta step on a
constant right-hand side is a single kick).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SplitDampError, StepError
from .flows import _kick_decay
from .linalg import expm
from .model import PhaseState, RayleighSystem


@dataclass(frozen=True)
class ButcherTableau:
    """Explicit Runge-Kutta tableau (strictly lower triangular stage matrix)."""

    a: tuple
    b: tuple
    c: tuple
    declared_order: int

    def __post_init__(self):
        a = tuple(tuple(float(x) for x in row) for row in self.a)
        b = tuple(float(x) for x in self.b)
        c = tuple(float(x) for x in self.c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        s = len(b)
        if len(a) != s or any(len(row) != s for row in a) or len(c) != s:
            raise ValueError("tableau blocks must all have the stage count")
        for i, row in enumerate(a):
            if any(row[j] != 0.0 for j in range(i, s)):
                raise ValueError("tableau must be explicit "
                                 "(strictly lower triangular stage matrix)")
        if abs(sum(b) - 1.0) > 1e-14:
            raise ValueError("tableau weights must sum to 1")
        for i, row in enumerate(a):
            if abs(c[i] - sum(row)) > 1e-14:
                raise ValueError("tableau nodes must equal the stage row sums")

    @property
    def stages(self):
        return len(self.b)


HEUN = ButcherTableau(a=((0.0, 0.0), (1.0, 0.0)), b=(0.5, 0.5), c=(0.0, 1.0),
                      declared_order=2)

_KINDS = ("3s", "2s", "rks", "sv", "heun", "rksb", "composed")


@dataclass(frozen=True)
class Scheme:
    """Integrator selector: a kind tag plus optional tableau/composition data."""

    kind: str
    tableau: Optional[ButcherTableau] = None
    base: Optional["Scheme"] = None
    coefficients: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind in ("rks", "rksb") and self.tableau is None:
            raise ValueError(f"scheme {self.kind!r} requires a tableau")
        if self.kind == "composed":
            if self.base is None or self.coefficients is None:
                raise ValueError("composed scheme requires base and coefficients")
            coeffs = tuple(float(g) for g in self.coefficients)
            object.__setattr__(self, "coefficients", coeffs)
            if abs(sum(coeffs) - 1.0) > 1e-14:
                raise ValueError("composition coefficients must sum to 1")

    @property
    def label(self) -> str:
        if self.kind == "composed":
            return f"composed-{self.base.label}"
        return self.kind


THREE_TERM = Scheme("3s")
TWO_TERM = Scheme("2s")
STORMER_VERLET = Scheme("sv")
HEUN_FULL = Scheme("heun")


def rk_split(tableau: ButcherTableau = HEUN) -> Scheme:
    return Scheme("rks", tableau=tableau)


def rk_split_b(tableau: ButcherTableau = HEUN) -> Scheme:
    return Scheme("rksb", tableau=tableau)


# Triple-jump coefficients: the classical order-4 composition of a
# symmetric order-2 base step.  The middle sub-step is negative, which
# runs the decay factors anti-dissipatively.
_TJ = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
YOSHIDA4 = (_TJ, 1.0 - 2.0 * _TJ, _TJ)


def composed(base: Scheme, coefficients=YOSHIDA4) -> Scheme:
    return Scheme("composed", base=base, coefficients=tuple(coefficients))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled states t_k = t0 + k h plus run metadata."""

    states: tuple
    step_size: float
    scheme: Scheme
    system: RayleighSystem

    def __len__(self):
        return len(self.states)

    @property
    def times(self):
        return np.array([z.t for z in self.states])

    def positions(self):
        return np.array([z.q for z in self.states])

    def momenta(self):
        return np.array([z.p for z in self.states])


def _decay_applier(system):
    """(t, q, p) -> (q, p) applying exp(-eps t D(q) M^{-1}).

    For q-independent dissipation the propagator is cached per t value,
    which makes long fixed-step runs cheap.
    """
    eps = system.epsilon
    if eps == 0.0:
        return lambda t, q, p: (q, p)
    Minv = system.mass.inverse
    field = system.dissipation
    if field.q_independent:
        C = field.evaluate(np.zeros(system.dim)) @ Minv
        cache = {}
        if system.dim == 1:
            # scalar propagator; p * e is bitwise the 1x1 matmul result
            c0 = float(C[0, 0])

            def decay(t, q, p):
                if t == 0.0:
                    return q, p
                e = cache.get(t)
                if e is None:
                    e = cache[t] = math.exp(-eps * t * c0)
                return q, p * e

            return decay

        def decay(t, q, p):
            if t == 0.0:
                return q, p
            E = cache.get(t)
            if E is None:
                E = cache[t] = expm((-eps * t) * C)
            return q, E @ p

        return decay

    def decay(t, q, p):
        if t == 0.0:
            return q, p
        C = field.evaluate(q) @ Minv
        return q, expm((-eps * t) * C) @ p

    return decay


def make_step_kernel(scheme: Scheme, system: RayleighSystem) -> Callable:
    """Compile a scheme for a system into a step map (h, q, p) -> (q, p)."""
    eps = system.epsilon
    Minv = system.mass.inverse
    grad = system.potential.gradient
    field = system.dissipation
    guarded = system.singular_radius > 0.0

    def kick_vector(q):
        if guarded:
            system.check_domain(q)
        return grad(q)

    # One-dimensional systems sit on the fine-step reference path, so the
    # drift folds the 1x1 mass inverse into the step scalar (differs from
    # the matmul form only by reassociation, i.e. at the last ulp).
    minv0 = float(Minv[0, 0]) if system.dim == 1 else None

    if scheme.kind == "sv":
        if minv0 is not None:
            def step(h, q, p):
                q = q + (0.5 * h * minv0) * p
                p = p - h * kick_vector(q)
                q = q + (0.5 * h * minv0) * p
                return q, p
            return step

        def step(h, q, p):
            q = q + (0.5 * h) * (Minv @ p)
            p = p - h * kick_vector(q)
            q = q + (0.5 * h) * (Minv @ p)
            return q, p
        return step

    if scheme.kind == "3s":
        decay = _decay_applier(system)
        if minv0 is not None:
            def step(h, q, p):
                q, p = decay(0.5 * h, q, p)
                q = q + (0.5 * h * minv0) * p
                p = p - h * kick_vector(q)
                q = q + (0.5 * h * minv0) * p
                return decay(0.5 * h, q, p)
            return step

        def step(h, q, p):
            q, p = decay(0.5 * h, q, p)
            q = q + (0.5 * h) * (Minv @ p)
            p = p - h * kick_vector(q)
            q = q + (0.5 * h) * (Minv @ p)
            return decay(0.5 * h, q, p)
        return step

    if scheme.kind == "2s":
        def step(h, q, p):
            q = q + (0.5 * h) * (Minv @ p)
            q, p = _kick_decay(system, eps, h, q, p)
            q = q + (0.5 * h) * (Minv @ p)
            return q, p
        return step

    if scheme.kind == "rks":
        a, b = scheme.tableau.a, scheme.tableau.b
        stages = scheme.tableau.stages

        def step(h, q, p):
            q = q + (0.5 * h) * (Minv @ p)
            g = kick_vector(q)
            C = field.evaluate(q) @ Minv if eps != 0.0 else None
            ks = []
            for i in range(stages):
                pi = p
                for j in range(i):
                    if a[i][j] != 0.0:
                        pi = pi + (h * a[i][j]) * ks[j]
                ks.append(-g if C is None else -g - eps * (C @ pi))
            dp = b[0] * ks[0]
            for bi, ki in zip(b[1:], ks[1:]):
                if bi != 0.0:
                    dp = dp + bi * ki
            p = p + h * dp
            q = q + (0.5 * h) * (Minv @ p)
            return q, p
        return step

    if scheme.kind == "rksb":
        a, b = scheme.tableau.a, scheme.tableau.b
        stages = scheme.tableau.stages

        def drift_decay_field(q, p):
            v = Minv @ p
            if eps == 0.0:
                return v, np.zeros_like(p)
            return v, -eps * (field.evaluate(q) @ v)

        def step(h, q, p):
            p = p - (0.5 * h) * kick_vector(q)
            kq, kp = [], []
            for i in range(stages):
                qi, pi = q, p
                for j in range(i):
                    if a[i][j] != 0.0:
                        qi = qi + (h * a[i][j]) * kq[j]
                        pi = pi + (h * a[i][j]) * kp[j]
                fq, fp = drift_decay_field(qi, pi)
                kq.append(fq)
                kp.append(fp)
            dq = b[0] * kq[0]
            dp = b[0] * kp[0]
            for i in range(1, stages):
                if b[i] != 0.0:
                    dq = dq + b[i] * kq[i]
                    dp = dp + b[i] * kp[i]
            q = q + h * dq
            p = p + h * dp
            p = p - (0.5 * h) * kick_vector(q)
            return q, p
        return step

    if scheme.kind == "heun":
        def full_field(q, p):
            v = Minv @ p
            f = -kick_vector(q)
            if eps != 0.0:
                f = f - eps * (field.evaluate(q) @ v)
            return v, f

        def step(h, q, p):
            k1q, k1p = full_field(q, p)
            k2q, k2p = full_field(q + h * k1q, p + h * k1p)
            return q + (0.5 * h) * (k1q + k2q), p + (0.5 * h) * (k1p + k2p)
        return step

    if scheme.kind == "composed":
        inner = make_step_kernel(scheme.base, system)
        gammas = scheme.coefficients

        def step(h, q, p):
            for g in gammas:
                q, p = inner(g * h, q, p)
            return q, p
        return step

    raise ValueError(f"unknown scheme kind {scheme.kind!r}")


def _one_step(scheme, system, h, z):
    h = float(h)
    q, p = make_step_kernel(scheme, system)(h, z.q, z.p)
    return PhaseState(q, p, z.t + h)


def step_3s(system: RayleighSystem, h: float, z: PhaseState) -> PhaseState:
    """One step of the three-term splitting (decay outermost)."""
    return _one_step(THREE_TERM, system, h, z)


def step_2s(system: RayleighSystem, h: float, z: PhaseState) -> PhaseState:
    """One step of the two-term splitting (exact kick-decay inside)."""
    return _one_step(TWO_TERM, system, h, z)


def step_rks(system: RayleighSystem, tableau: ButcherTableau, h: float,
             z: PhaseState) -> PhaseState:
    """One step of the Runge-Kutta splitting: the fiber system
    p' = -grad V(q) - eps C(q) p is integrated by the tableau at frozen q."""
    return _one_step(rk_split(tableau), system, h, z)


def step_sv(system: RayleighSystem, h: float, z: PhaseState) -> PhaseState:
    """One undamped drift-kick-drift (Stormer-Verlet) step."""
    return _one_step(STORMER_VERLET, system, h, z)


def step_heun_full(system: RayleighSystem, h: float, z: PhaseState) -> PhaseState:
    """One explicit Heun step on the full damped vector field."""
    return _one_step(HEUN_FULL, system, h, z)


def step_rksb(system: RayleighSystem, tableau: ButcherTableau, h: float,
              z: PhaseState) -> PhaseState:
    """One step of the momentum-breaking alternative splitting: potential
    kicks outside, Runge-Kutta on the coupled drift+decay field inside."""
    return _one_step(rk_split_b(tableau), system, h, z)


def compose(base_step: Callable, coefficients, system: RayleighSystem,
            h: float, z: PhaseState) -> PhaseState:
    """Apply base_step over sub-steps coefficients[i] * h in sequence.

    base_step has the signature (system, h, z) -> z.  The coefficients must
    sum to 1 so the composition advances time by exactly h.
    """
    coeffs = tuple(float(g) for g in coefficients)
    if abs(sum(coeffs) - 1.0) > 1e-14:
        raise ValueError("composition coefficients must sum to 1")
    for g in coeffs:
        z = base_step(system, g * h, z)
    return z


def integrate(scheme: Scheme, system: RayleighSystem, z0: PhaseState,
              h: float, n_steps: int) -> Trajectory:
    """March n_steps of the scheme from z0 on the uniform grid t0 + k h.

    Deterministic: identical inputs produce bit-identical trajectories on
    one platform.  A failing step aborts with StepError carrying the
    zero-based index of the offending step.
    """
    h = float(h)
    if h <= 0.0:
        raise ValueError("step size must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    kernel = make_step_kernel(scheme, system)
    q, p, t0 = z0.q, z0.p, z0.t
    states = [z0]
    for k in range(n_steps):
        try:
            q, p = kernel(h, q, p)
        except SplitDampError as exc:
            raise StepError(k, str(exc)) from exc
        states.append(PhaseState(q, p, t0 + (k + 1) * h))
    return Trajectory(tuple(states), h, scheme, system)
