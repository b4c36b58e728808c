"""Identifiability of a perturbation ``E`` of a nominal ``A_bar`` from partial
measurements ``D vec(exp(A_bar + E))``.

Measurements are encoded by a selection operator ``D`` (rows = scalar
measurements, columns = n^2) acting on column-stacked vectorizations.  Prior
structural knowledge restricts ``E`` to a linear subspace with basis ``P``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spl

from .errors import (
    ConditionViolated,
    DimensionMismatch,
    FullRankWarning,
    NotIdentifiable,
    StackSingular,
    ValidationError,
)
from .linalg import as_matrix, kernel_basis, rank_of, unvec, vec
from .matfunc import kron_K, mat_exp, principal_log


@dataclass(frozen=True)
class SelectionOperator:
    D: np.ndarray
    provenance: str = "custom"
    rank: int | None = None
    full_rank_warning: bool = False

    def __post_init__(self):
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        n2 = D.shape[1]
        n = int(round(np.sqrt(n2)))
        if n * n != n2:
            raise DimensionMismatch(f"D must have n^2 columns, got {n2}")
        if not np.all(np.isfinite(D)):
            raise ValidationError("D has non-finite entries")
        object.__setattr__(self, "D", D)
        if self.rank is None:
            object.__setattr__(self, "rank", rank_of(D))

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.D.shape[1])))


@dataclass(frozen=True)
class SparsityPrior:
    """Linear subspace ``{vec(E) = P v}`` known to contain ``E``."""

    P: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        if P.shape[1] and rank_of(P) != P.shape[1]:
            raise ValidationError("prior basis P must have full column rank")
        object.__setattr__(self, "P", P)

    @property
    def l(self) -> int:
        return self.P.shape[1]

    @classmethod
    def from_mask(cls, mask) -> "SparsityPrior":
        """Subspace of matrices supported on the True entries of ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        idx = np.flatnonzero(vec(mask))
        P = np.zeros((mask.size, idx.size))
        P[idx, np.arange(idx.size)] = 1.0
        return cls(P)


def build_D_initial_points(x0s, C) -> SelectionOperator:
    """``D = [x_01 ... x_0k]^T kron C``: output ``C exp(A) x_0i`` from each initial point."""
    C = as_matrix(C, "C", square=False)
    X = np.column_stack([np.asarray(x, dtype=float).reshape(-1) for x in x0s])
    if X.shape[0] != C.shape[1]:
        raise DimensionMismatch(f"initial points have length {X.shape[0]}, C has {C.shape[1]} columns")
    return SelectionOperator(np.kron(X.T, C), provenance="initial-points")


def build_D_trajectory(x0, A_d, k: int, C) -> SelectionOperator:
    """Selection operator for one trajectory sampled at k consecutive instants.

    Uses the Krylov sequence ``x0, A_d x0, ..., A_d^{k-1} x0`` as initial
    points; sets ``full_rank_warning`` if those vectors are dependent.
    """
    A_d = as_matrix(A_d, "A_d")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape[0] != A_d.shape[0]:
        raise DimensionMismatch("x0 and A_d dimensions differ")
    cols = []
    for _ in range(k):
        cols.append(x)
        x = A_d @ x
    krylov = np.column_stack(cols)
    base = build_D_initial_points(cols, C)
    deficient = rank_of(krylov) < k
    if deficient:
        warnings.warn("Krylov matrix is rank deficient", FullRankWarning, stacklevel=2)
    return SelectionOperator(base.D, provenance="trajectory", rank=base.rank, full_rank_warning=deficient)


def _reduced_operator(A_bar, D: SelectionOperator, prior: SparsityPrior, K=None) -> np.ndarray:
    A_bar = as_matrix(A_bar, "A_bar")
    n = A_bar.shape[0]
    if D.D.shape[1] != n * n or prior.P.shape[0] != n * n:
        raise DimensionMismatch("D and P must have n^2 rows/columns")
    if K is None:
        K = kron_K(A_bar)
    return D.D @ K @ prior.P


def linear_identifiability(A_bar, D: SelectionOperator, prior: SparsityPrior, tol_rank: float = 1e-10, K=None) -> bool:
    """True iff ``D K(A_bar, 0) P`` has full column rank ``l``.

    Equivalent to the preimage of ker(D) under the linearized map meeting
    the prior subspace only at zero.  ``K`` may be passed to reuse a
    precomputed ``K(A_bar, 0)``.
    """
    if prior.l == 0:
        return True
    Q = _reduced_operator(A_bar, D, prior, K)
    return rank_of(Q, tol_rank) == prior.l


def solve_linearized(A_bar, D: SelectionOperator, prior: SparsityPrior, y, tol_rank: float = 1e-10, K=None) -> np.ndarray:
    """Least-squares estimate of ``E`` in the prior subspace from linearized data.

    ``y`` is ``D vec(exp(A_bar + E)) - D vec(exp(A_bar))``.  Minimizes
    ``||D K(A_bar, 0) vec(E~) - y||`` over ``E~ = unvec(P v)`` with an
    orthogonal factorization (no normal equations).
    """
    A_bar = as_matrix(A_bar, "A_bar")
    n = A_bar.shape[0]
    Q = _reduced_operator(A_bar, D, prior, K)
    if rank_of(Q, tol_rank) != prior.l:
        raise NotIdentifiable("D K(A_bar, 0) P is rank deficient")
    y = np.asarray(y, dtype=float).reshape(-1)
    v = spl.lstsq(Q, y, lapack_driver="gelsy")[0]
    return unvec(prior.P @ v, n)


@dataclass
class RecoveryResult:
    E: np.ndarray
    condition_violated: bool
    condition_residual: float
    measurement_residual: float


def _invariance_residual(A_bar, E, Z) -> float:
    # Z annihilates im(C^T); check Z A_bar^i E = 0 for i < n
    n = A_bar.shape[0]
    if Z.shape[0] == 0:
        return 0.0
    worst = 0.0
    M = E.copy()
    for _ in range(n):
        worst = max(worst, float(np.linalg.norm(Z @ M)))
        M = A_bar @ M
    return worst


def _stack_solve(C, Z, top, bottom, X):
    S = np.vstack([C, Z])
    if rank_of(S) < S.shape[0] or S.shape[0] != S.shape[1]:
        raise StackSingular("[C; Z] is not invertible")
    return np.linalg.solve(S, np.vstack([top, bottom])) @ np.linalg.inv(X)


def recover_perturbation(A_bar, C, X, Y, tol: float = 1e-8) -> RecoveryResult:
    """Exact recovery of ``E`` from ``Y = C exp(A_bar + E) X``.

    With ``Z`` an orthonormal basis of ker(C) (as rows), the rows of
    ``exp(A)`` outside im(C^T) equal those of ``exp(A_bar)`` whenever every
    ``A_bar^i E`` maps into im(C^T).  Then ``exp(A) = [C; Z]^{-1} [Y; Z
    exp(A_bar) X] X^{-1}`` and ``E = Log(exp(A)) - A_bar``.

    The subspace condition is verified on the recovered ``E``; if it fails
    beyond ``tol`` a :class:`ConditionViolated` warning is issued and the
    flag is set, but the estimate is still returned.
    """
    A_bar = as_matrix(A_bar, "A_bar")
    C = as_matrix(C, "C", square=False)
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y", square=False)
    n = A_bar.shape[0]
    if C.shape[1] != n or X.shape[0] != n or Y.shape != (C.shape[0], n):
        raise DimensionMismatch("inconsistent shapes for A_bar, C, X, Y")
    if rank_of(X) < n:
        raise StackSingular("X is singular")
    Z = kernel_basis(C).T
    expA = _stack_solve(C, Z, Y, Z @ mat_exp(A_bar) @ X, X)
    E = principal_log(expA) - A_bar

    scale = max(1.0, float(np.linalg.norm(E)))
    cond_res = _invariance_residual(A_bar, E, Z) / scale
    meas = float(np.linalg.norm(C @ mat_exp(A_bar + E) @ X - Y)) / max(1.0, float(np.linalg.norm(Y)))
    violated = cond_res > tol
    if violated:
        warnings.warn(
            f"recovered E violates the output-invariance condition (residual {cond_res:.3g})",
            ConditionViolated,
            stacklevel=2,
        )
    return RecoveryResult(E, violated, cond_res, meas)


def recover_system(A_bar, C, X, Y, tol: float = 1e-8) -> RecoveryResult:
    """Transposed variant: invertible output map ``C``, ``k <= n`` initial points.

    ``Y = C exp(A) X`` (n x k) holds the outputs from the columns of ``X``.
    Transposing gives ``X^T exp(A^T) C^T = Y^T``, i.e. the setting of
    :func:`recover_perturbation` with the roles of ``C`` and ``X^T`` swapped, so

        A = Log([X^T; Z]^{-1} [Y^T; Z exp(A_bar^T) C^T] C^{-T})^T

    with ``Z`` an orthonormal basis of ker(X^T) as rows.  The returned
    result's ``E`` field holds ``A`` itself.
    """
    A_bar = as_matrix(A_bar, "A_bar")
    C = as_matrix(C, "C")
    X = as_matrix(X, "X", square=False)
    Y = as_matrix(Y, "Y", square=False)
    n = A_bar.shape[0]
    k = X.shape[1]
    if C.shape != (n, n) or X.shape[0] != n or Y.shape != (n, k):
        raise DimensionMismatch("inconsistent shapes for A_bar, C, X, Y")
    if rank_of(C) < n:
        raise StackSingular("C is singular")
    Xt = X.T
    Z = kernel_basis(Xt).T
    expAt = _stack_solve(Xt, Z, Y.T, Z @ mat_exp(A_bar.T) @ C.T, C.T)
    A = principal_log(expAt).T

    Et = (A - A_bar).T
    scale = max(1.0, float(np.linalg.norm(Et)))
    cond_res = _invariance_residual(A_bar.T, Et, Z) / scale
    meas = float(np.linalg.norm(C @ mat_exp(A) @ X - Y)) / max(1.0, float(np.linalg.norm(Y)))
    violated = cond_res > tol
    if violated:
        warnings.warn(
            f"recovered A violates the invariance condition (residual {cond_res:.3g})",
            ConditionViolated,
            stacklevel=2,
        )
    return RecoveryResult(A, violated, cond_res, meas)
