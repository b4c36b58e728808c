"""End-to-end identification: trajectory -> A_d estimate -> aliases -> sparsest alias."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spl

from . import aliasing
from .aliasing import AliasCandidate, AliasSet, enumerate_aliases, z_weighted_norm
from .errors import (
    ApproximateMembership,
    EmptyAliasSet,
    RankDeficientData,
    SysAliasError,
    TieWarning,
    TooFewSamples,
    ValidationError,
)
from .linalg import as_matrix, l0_count, rank_of, spectral_decompose
from .matfunc import log_branch, mat_exp

__all__ = [
    "Trajectory",
    "Tolerances",
    "IdentificationReport",
    "simulate",
    "snapshot_matrices",
    "estimate_Ad",
    "l0_count",
    "sparsest_alias",
    "identify",
]

DEFAULT_KAPPA_FACTOR = 1.5


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled states ``x(0), x(h), ..., x(Nh)`` stored row-wise."""

    h: float
    samples: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if not np.all(np.isfinite(s)):
            raise ValidationError("trajectory has non-finite samples")
        if not self.h > 0:
            raise ValidationError("sampling period h must be positive")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.h * np.arange(self.samples.shape[0])


@dataclass(frozen=True)
class Tolerances:
    base_recon: float = 1e-8
    rank: float = 1e-10
    equivalence: float = 1e-9
    group: float | None = None


def simulate(A, x0, h: float, N: int, sigma: float = 0.0, seed=None) -> Trajectory:
    """Sample ``x(kh) = exp(khA) x0`` for k = 0..N, plus optional Gaussian noise."""
    A = as_matrix(A, "A")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != A.shape[0]:
        raise ValidationError("x0 length does not match A")
    if not h > 0 or N < 1:
        raise ValidationError("need h > 0 and N >= 1")
    X = np.array([mat_exp(k * h * A) @ x0 for k in range(N + 1)])
    if sigma > 0:
        rng = np.random.default_rng(seed)
        X = X + sigma * rng.standard_normal(X.shape)
    return Trajectory(h, X, float(sigma))


def snapshot_matrices(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Shifted snapshot pair ``X1 = [x(h) .. x(Nh)]``, ``X2 = [x(0) .. x((N-1)h)]``."""
    if traj.N < 1:
        raise TooFewSamples("need at least two samples")
    S = traj.samples
    return S[1:].T.copy(), S[:-1].T.copy()


def estimate_Ad(X1, X2, tol_rank: float = 1e-10) -> np.ndarray:
    """Least-squares transition matrix ``X1 X2^T (X2 X2^T)^{-1}``.

    Solved through ``X2^T A_d^T = X1^T`` with an orthogonal factorization.
    """
    X1 = as_matrix(X1, "X1", square=False)
    X2 = as_matrix(X2, "X2", square=False)
    if X1.shape != X2.shape:
        raise ValidationError("snapshot matrices must have equal shape")
    n = X2.shape[0]
    if rank_of(X2, tol_rank) < n:
        raise RankDeficientData("X2 X2^T is singular: trajectory does not excite all states")
    return spl.lstsq(X2.T, X1.T)[0].T


def sparsest_alias(alias_set: AliasSet, eps_zero: float | None = None) -> list[AliasCandidate]:
    """Candidates with minimal L0 count, ordered by (l0, z_norm, branch).

    Issues :class:`TieWarning` when the minimizers span more than one
    equivalence class.
    """
    if not alias_set.candidates:
        raise EmptyAliasSet("no alias inside the norm ball")
    scored = []
    for c in alias_set.candidates:
        l0 = c.l0 if eps_zero is None else l0_count(c.matrix, eps_zero)
        scored.append((l0, c.z_norm, c.branch, c))
    scored.sort(key=lambda t: t[:3])
    best = scored[0][0]
    selected = [t[3] for t in scored if t[0] == best]
    if len({c.class_id for c in selected}) > 1:
        warnings.warn("sparsest aliases span several equivalence classes", TieWarning, stacklevel=2)
    return selected


@dataclass
class IdentificationReport:
    A_d_hat: np.ndarray
    alias_set: AliasSet
    selected: list
    diagnostics: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def best(self) -> AliasCandidate:
        return self.selected[0]

    def to_dict(self) -> dict:
        sel = [
            {
                **c.to_dict(),
                "omega_min": aliasing.min_sampling_frequency(c.matrix),
                "h_max": _json_float(aliasing.max_sampling_period(c.matrix)),
            }
            for c in self.selected
        ]
        return {
            "A_d_hat": self.A_d_hat.tolist(),
            "diagnostics": {k: _json_float(v) for k, v in self.diagnostics.items()},
            "warnings": list(self.warnings),
            "selected": sel,
            "alias_set": self.alias_set.to_dict(),
        }


def _json_float(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def identify(
    traj: Trajectory,
    kappa: float | None = None,
    eps_zero: float | None = None,
    tol: Tolerances = Tolerances(),
) -> IdentificationReport:
    """Identify the continuous-time A-matrix as the sparsest alias of the data.

    Parameters
    ----------
    traj : Trajectory
    kappa : float, optional
        Bound on the Z-weighted norm of ``h A``.  Defaults to 1.5 times the
        norm of the principal (all-zero) branch.
    eps_zero : float, optional
        L0 threshold, see :func:`l0_count`.
    tol : Tolerances
    """
    if traj.N < traj.n:
        raise TooFewSamples(f"need N >= n = {traj.n} transitions, got {traj.N}")
    stage = "estimate"
    try:
        X1, X2 = snapshot_matrices(traj)
        A_d = estimate_Ad(X1, X2, tol.rank)
        residual = float(np.linalg.norm(X1 - A_d @ X2) / np.linalg.norm(X2))
        tol_recon = max(tol.base_recon, 3.0 * residual)

        stage = "decompose"
        dec = spectral_decompose(A_d, tol_group=tol.group)

        stage = "enumerate"
        kappa_source = "user"
        if kappa is None:
            j0 = [0] * dec.p
            kappa = DEFAULT_KAPPA_FACTOR * z_weighted_norm(dec, log_branch(dec, j0, real=True))
            kappa_source = "default"
        alias_set = enumerate_aliases(
            dec, traj.h, kappa, tol_recon=tol_recon, eps_zero=eps_zero, tol_equiv=tol.equivalence
        )

        stage = "select"
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            selected = sparsest_alias(alias_set, eps_zero)
    except SysAliasError as exc:
        exc.args = (f"[{stage}] {exc.args[0] if exc.args else ''}",)
        raise

    notes = [w.category.__name__ for w in caught]
    if traj.noise_sigma > 0 or residual > tol.base_recon:
        notes.append(ApproximateMembership.__name__)
        warnings.warn(
            "noisy data: alias membership holds only up to the fit residual",
            ApproximateMembership,
            stacklevel=2,
        )
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)

    h_max_sel = min(aliasing.max_sampling_period(c.matrix) for c in selected)
    diagnostics = {
        "h": traj.h,
        "kappa": float(kappa),
        "kappa_scaled": float(kappa) / traj.h,
        "kappa_source": kappa_source,
        "N": traj.N,
        "noise_sigma": traj.noise_sigma,
        "fit_residual": residual,
        "tol_recon": tol_recon,
        "n_candidates": len(alias_set),
        "n_classes": len(alias_set.classes),
        "omega_sampling": 2 * math.pi / traj.h,
        "omega_min": max(aliasing.min_sampling_frequency(c.matrix) for c in selected),
        "h_max": h_max_sel,
        "aliasing_regime": bool(traj.h > h_max_sel),
        "eigenvector_condition": dec.condition_estimate,
    }
    return IdentificationReport(A_d, alias_set, selected, diagnostics, notes)
