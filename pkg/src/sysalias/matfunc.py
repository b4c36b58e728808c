"""Matrix exponential, logarithm branches and Fréchet derivatives.

``mat_exp`` and ``principal_log`` delegate the heavy lifting to
:func:`scipy.linalg.expm` / :func:`scipy.linalg.logm`; the branch logarithms
are built from a :class:`~sysalias.linalg.SpectralDecomposition`.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.linalg as spl

from .errors import (
    BranchLengthMismatch,
    DimensionMismatch,
    NegativeRealEigenvalue,
    NonRealResult,
    SingularInput,
    SingularResolvent,
)
from .linalg import SpectralDecomposition, as_square

QUAD_NODES = 32
REAL_PROJECTION_TOL = 1e-8


@lru_cache(maxsize=8)
def gauss_legendre_01(nodes: int = QUAD_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def _same_shape(X, E):
    X = as_square(X, "X")
    E = as_square(E, "E")
    if X.shape != E.shape:
        raise DimensionMismatch(f"shapes differ: {X.shape} vs {E.shape}")
    return X, E


def mat_exp(A) -> np.ndarray:
    """Matrix exponential (Padé scaling and squaring)."""
    return spl.expm(as_square(A, "A"))


def _check_log_spectrum(P: np.ndarray, tol: float) -> np.ndarray:
    w = np.linalg.eigvals(P)
    scale = max(np.linalg.norm(P, 2), np.finfo(float).tiny)
    if np.any(np.abs(w) <= 1e-12 * scale):
        raise SingularInput("matrix has a zero eigenvalue; no logarithm exists")
    on_axis = (w.real < 0) & (np.abs(w.imag) <= tol * np.abs(w))
    if np.any(on_axis):
        raise NegativeRealEigenvalue(
            f"eigenvalue(s) {w[on_axis]} on the negative real axis; principal log undefined"
        )
    return w


def principal_log(P, tol: float = 1e-10) -> np.ndarray:
    """Principal matrix logarithm.

    Every eigenvalue of the result has imaginary part in (-pi, pi); the
    result is real whenever ``P`` is real.

    Raises
    ------
    NegativeRealEigenvalue
        An eigenvalue lies within relative distance ``tol`` of the negative
        real axis.
    SingularInput
    """
    P = as_square(P, "P")
    _check_log_spectrum(P, tol)
    X = spl.logm(P, disp=False)[0]
    if not np.iscomplexobj(P):
        X = np.real(X)
    return X


def is_real_branch(dec: SpectralDecomposition, j) -> bool:
    """True if ``j`` yields a real logarithm of the (real) decomposed matrix."""
    if not dec.is_real:
        return False
    j = np.asarray(j)
    for k, lam in enumerate(dec.values):
        if k in dec.conjugate_pairing:
            if j[dec.conjugate_pairing[k]] != -j[k]:
                return False
        elif lam.real < 0 or j[k] != 0:
            return False
    return True


def branch_log_values(dec: SpectralDecomposition, j) -> np.ndarray:
    """Per-group eigenvalues ``log(lambda_k) + 2 pi i j_k`` of the branch."""
    j = np.asarray(j, dtype=int).reshape(-1)
    if j.shape[0] != dec.p:
        raise BranchLengthMismatch(f"branch vector has length {j.shape[0]}, expected {dec.p}")
    return np.log(dec.values) + 2j * np.pi * j


def log_branch(dec: SpectralDecomposition, j, real: bool | None = None) -> np.ndarray:
    """Primary logarithm ``Z diag(log(lambda_k) + 2 pi i j_k) Z^{-1}``.

    Parameters
    ----------
    dec : SpectralDecomposition
    j : sequence of int
        One branch index per eigenvalue group.
    real : bool, optional
        ``True`` demands a real result (``NonRealResult`` otherwise),
        ``False`` always returns the complex matrix.  By default a real
        matrix is returned exactly when the branch is conjugate symmetric.
    """
    L = dec.reconstruct(branch_log_values(dec, j))
    symmetric = is_real_branch(dec, j)
    if real is None:
        real = symmetric
    if not real:
        return L
    if not symmetric:
        raise NonRealResult(f"branch {tuple(np.asarray(j).tolist())} is not conjugate symmetric")
    residue = float(np.max(np.abs(L.imag))) if L.size else 0.0
    if residue > REAL_PROJECTION_TOL:
        raise NonRealResult(f"imaginary residue {residue:.3g} too large for a real branch")
    return L.real.copy()


def frechet_exp(X, E, nodes: int = QUAD_NODES) -> np.ndarray:
    """Fréchet derivative of exp at ``X`` in direction ``E``.

    Evaluates ``int_0^1 exp(X(1-s)) E exp(Xs) ds`` by Gauss-Legendre
    quadrature.
    """
    X, E = _same_shape(X, E)
    s, w = gauss_legendre_01(nodes)
    out = np.zeros(X.shape, dtype=np.result_type(X, E, float))
    for sk, wk in zip(s, w):
        out += wk * (spl.expm((1.0 - sk) * X) @ E @ spl.expm(sk * X))
    return out


def frechet_log(X, E, nodes: int = QUAD_NODES, cond_limit: float = 1e12) -> np.ndarray:
    """Fréchet derivative of the principal log at ``X`` in direction ``E``.

    Evaluates ``int_0^1 R(t) E R(t) dt`` with ``R(t) = (t(X - I) + I)^{-1}``.

    Raises
    ------
    SingularResolvent
        ``t(X - I) + I`` is (numerically) singular at some quadrature node.
    """
    X, E = _same_shape(X, E)
    n = X.shape[0]
    eye = np.eye(n)
    t, w = gauss_legendre_01(nodes)
    out = np.zeros(X.shape, dtype=np.result_type(X, E, float))
    for tk, wk in zip(t, w):
        F = tk * (X - eye) + eye
        if np.linalg.cond(F) > cond_limit:
            raise SingularResolvent(f"t(X - I) + I is singular near t = {tk:.4f}")
        R = np.linalg.inv(F)
        out += wk * (R @ E @ R)
    return out


def _psi(W: np.ndarray) -> np.ndarray:
    """``psi(W) = sum_k W^k/(k+1)! = int_0^1 exp(sW) ds`` via an augmented exponential."""
    m = W.shape[0]
    aug = np.zeros((2 * m, 2 * m), dtype=W.dtype)
    aug[:m, :m] = W
    aug[:m, m:] = np.eye(m)
    return spl.expm(aug)[:m, m:]


def kron_K(X, E=None, nodes: int = QUAD_NODES) -> np.ndarray:
    """The ``n^2 x n^2`` operator ``K(X, E)``.

    With ``E`` omitted (or zero) this is the vectorized Fréchet derivative:
    ``K(X, 0) vec(F) = vec(L_exp(X, F))``, assembled from the same
    Gauss-Legendre rule as :func:`frechet_exp`.  For nonzero ``E`` it is
    ``(I kron exp(X)) psi((X+E)^T (+) (-X))`` with ``psi(z) = (e^z - 1)/z``,
    which makes ``vec(exp(X+E)) = vec(exp(X)) + K(X, E) vec(E)`` exact.
    """
    X = as_square(X, "X")
    n = X.shape[0]
    if E is None or not np.any(np.asarray(E)):
        if E is not None:
            _same_shape(X, E)
        s, w = gauss_legendre_01(nodes)
        K = np.zeros((n * n, n * n), dtype=np.result_type(X, float))
        for sk, wk in zip(s, w):
            # vec(A F B) = (B^T kron A) vec(F)
            K += wk * np.kron(spl.expm(sk * X).T, spl.expm((1.0 - sk) * X))
        return K
    X, E = _same_shape(X, E)
    eye = np.eye(n)
    W = np.kron((X + E).T, eye) + np.kron(eye, -X)
    return np.kron(eye, spl.expm(X)) @ _psi(W)


def first_order_residual(A_bar, E, t: float) -> float:
    """``||exp(A + tE) - exp(A) - L_exp(A, tE)||_F``."""
    A_bar, E = _same_shape(A_bar, E)
    tE = t * E
    R = spl.expm(A_bar + tE) - spl.expm(A_bar) - frechet_exp(A_bar, tE)
    return float(np.linalg.norm(R))
