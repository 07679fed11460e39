"""Small dense matrix exponential and phi-1 kernels.

Scaling-and-squaring with diagonal Pade approximants (degree chosen from
the 1-norm, up to degree 13).  Sized for the tiny systems this package
integrates: inputs are capped at n <= 16, so there is no sparse, Krylov,
or norm-estimation machinery.

phi1(A) = (e^A - I) A^{-1} is evaluated through the augmented block
exponential exp([[A, I], [0, 0]]) = [[e^A, phi1(A)], [0, I]], which stays
well defined for singular A (phi1(0) = I).
"""

import math

import numpy as np

from .errors import DimensionError

MAX_DIM = 16

# Coefficients of the diagonal Pade approximants to exp, by degree.
_PADE_B = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# 1-norm thresholds below which each degree reaches double precision.
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068,
    13: 5.371920351148152,
}


def _as_square(A, name):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} expects a square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise DimensionError(f"{name} supports n <= {MAX_DIM}, got n = {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name}: input has non-finite entries")
    return A


def _pade(A, m):
    b = _PADE_B[m]
    n = A.shape[0]
    ident = np.eye(n)
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A2 @ A4
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
                 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
        V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
             + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    else:
        U = b[1] * ident
        V = b[0] * ident
        Apow = ident
        for k in range(2, m + 1, 2):
            Apow = Apow @ A2
            V = V + b[k] * Apow
            U = U + b[k + 1] * Apow
        U = A @ U
    return np.linalg.solve(V - U, V + U)


def _expm_core(A):
    norm = np.linalg.norm(A, 1)
    if norm <= _PADE_THETA[9]:
        for m in (3, 5, 7, 9):
            if norm <= _PADE_THETA[m]:
                return _pade(A, m)
    squarings = max(0, int(math.ceil(math.log2(norm / _PADE_THETA[13]))))
    X = _pade(A / (2.0 ** squarings), 13)
    for _ in range(squarings):
        X = X @ X
    return X


def expm(A):
    """Matrix exponential of a small dense square matrix (n <= 16)."""
    A = _as_square(A, "expm")
    if A.shape[0] == 1:
        return np.array([[math.exp(A[0, 0])]])
    return _expm_core(A)


def _phi1_scalar(a):
    if a == 0.0:
        return 1.0
    return math.expm1(a) / a


def expm_phi1(A):
    """Return the pair (e^A, phi1(A)) from one augmented exponential."""
    A = _as_square(A, "expm_phi1")
    n = A.shape[0]
    if n == 1:
        a = A[0, 0]
        return np.array([[math.exp(a)]]), np.array([[_phi1_scalar(a)]])
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = A
    block[:n, n:] = np.eye(n)
    E = _expm_core(block)
    return np.ascontiguousarray(E[:n, :n]), np.ascontiguousarray(E[:n, n:])


def phi1(A):
    """phi1(A) = (e^A - I) A^{-1}, continued through singular A."""
    A = _as_square(A, "phi1")
    if A.shape[0] == 1:
        return np.array([[_phi1_scalar(A[0, 0])]])
    return expm_phi1(A)[1]
