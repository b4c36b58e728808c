"""System aliases: enumerating real logarithm branches in a Z-weighted norm ball.

For a sampled transition matrix ``A_d = exp(hA)`` every real primary
logarithm ``A_j`` (divided by ``h``) explains the same samples.  Writing
``log(lambda_k) = alpha_k + i pi beta_k`` the squared Z-weighted norm of a
branch relative to the all-zero branch is ``4 pi^2 I(0, j)`` where

    I(j, d) = d^T M d + (2j + beta)^T M d

is the alias functional.  Branches with ``I = 0`` between them have equal
norm and form an equivalence class.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GapNotPositive, NegativeRealEigenvalue
from .linalg import SpectralDecomposition, as_matrix, l0_count
from .matfunc import log_branch, mat_exp

# ||h_Z(A_j)||^2 - ||h_Z(A_0)||^2 = NORM_LAW_CONSTANT * I(0, j)
NORM_LAW_CONSTANT = 4.0 * math.pi**2


def _imag_parts(A) -> np.ndarray:
    A = as_matrix(A, "A")
    return np.abs(np.linalg.eigvals(A).imag)


def min_sampling_frequency(A) -> float:
    """Smallest sampling frequency (rad/s) avoiding aliasing: ``2 max |Im lambda_i(A)|``."""
    im = _imag_parts(A)
    return float(2.0 * im.max()) if im.size else 0.0


def max_sampling_period(A, tol: float = 1e-12) -> float:
    """Largest sampling period ``min_i pi / |Im lambda_i(A)|`` (``inf`` for real spectra)."""
    A = as_matrix(A, "A")
    im = _imag_parts(A)
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    im = im[im > tol * scale]
    return float(math.pi / im.max()) if im.size else math.inf


def z_weighted_norm(dec: SpectralDecomposition, A) -> float:
    """``||Z^{-1} A Z||_F`` with ``Z`` held fixed by ``dec``."""
    return float(np.linalg.norm(dec.Zinv @ np.asarray(A) @ dec.Z))


@dataclass(frozen=True)
class AliasFunctionalContext:
    """Data entering the alias functional.

    ``multiplicities`` is the diagonal of M, ``beta`` the normalized
    imaginary parts of the principal scalar logs, ``kappa0`` the Z-weighted
    norm of the all-zero branch.  ``beta`` may hold exact rationals.
    """

    multiplicities: tuple
    beta: tuple
    j_base: tuple = ()
    kappa0: float = 0.0

    @property
    def p(self) -> int:
        return len(self.multiplicities)

    @classmethod
    def from_decomposition(cls, dec: SpectralDecomposition, j_base=None) -> "AliasFunctionalContext":
        logs = np.log(dec.values)
        beta = tuple(float(b) for b in logs.imag / math.pi)
        kappa0 = math.sqrt(sum(m * abs(l) ** 2 for m, l in zip(dec.multiplicities, logs)))
        j_base = tuple(int(x) for x in (j_base if j_base is not None else [0] * dec.p))
        return cls(tuple(dec.multiplicities), beta, j_base, kappa0)


def _check_len(ctx: AliasFunctionalContext, *vectors):
    for v in vectors:
        if len(v) != ctx.p:
            raise ValueError(f"vector of length {len(v)} does not match p = {ctx.p}")


def alias_functional(ctx: AliasFunctionalContext, j: Sequence, delta: Sequence):
    """``I(j, delta) = delta^T M delta + (2 j + beta)^T M delta``.

    Plain Python arithmetic, so exact rationals in ``ctx.beta`` stay exact.
    """
    _check_len(ctx, j, delta)
    return sum(
        m * d * d + (2 * jj + b) * m * d
        for m, b, jj, d in zip(ctx.multiplicities, ctx.beta, j, delta)
    )


def are_equivalent(ctx: AliasFunctionalContext, j1: Sequence, j2: Sequence, tol: float = 1e-9) -> bool:
    _check_len(ctx, j1, j2)
    delta = [b - a for a, b in zip(j1, j2)]
    return abs(alias_functional(ctx, j1, delta)) <= tol


def _mu(ctx: AliasFunctionalContext, i: int) -> float:
    # min over integer d_k (k != i) of sum_k m_k (d_k + beta_k/2)^2
    total = 0.0
    for k, (m, b) in enumerate(zip(ctx.multiplicities, ctx.beta)):
        if k == i:
            continue
        c = -float(b) / 2.0
        total += m * min((math.floor(c) - c) ** 2, (math.ceil(c) - c) ** 2)
    return total


def branch_search_box(ctx: AliasFunctionalContext, kappa: float, refine: bool = True) -> list[tuple[int, int]]:
    """Per-group integer intervals containing every branch with norm <= kappa.

    A branch ``j`` can only satisfy ``||h_Z(A_j)||_F <= kappa`` if
    ``I(0, j) <= (kappa^2 - kappa0^2) / (4 pi^2)``.  Each coordinate is then
    confined to ``|j_i + beta_i/2| <= sqrt((beta/2)^T M (beta/2) + R - mu_i) / sqrt(m_i)``
    where ``mu_i`` (only with ``refine``) is the smallest attainable
    contribution of the other coordinates.  Empty intervals are returned
    as ``(0, -1)``.
    """
    R = (kappa**2 - ctx.kappa0**2) / NORM_LAW_CONSTANT
    base = sum(m * (float(b) / 2.0) ** 2 for m, b in zip(ctx.multiplicities, ctx.beta))
    box = []
    for i, (m, b) in enumerate(zip(ctx.multiplicities, ctx.beta)):
        rad2 = base + R - (_mu(ctx, i) if refine else 0.0)
        if rad2 < 0:
            box.append((0, -1))
            continue
        # slack so that boundary branches survive rounding
        r = math.sqrt(rad2 / m) * (1 + 1e-9) + 1e-9
        c = -float(b) / 2.0
        lo, hi = math.ceil(c - r), math.floor(c + r)
        box.append((lo, hi) if lo <= hi else (0, -1))
    return box


@dataclass
class AliasCandidate:
    """A real logarithm branch of ``A_d`` scaled to continuous time.

    ``matrix`` is ``log_branch(dec, branch) / h``; ``z_norm`` is the
    Z-weighted norm of the unscaled logarithm (``h * matrix``).
    """

    matrix: np.ndarray
    branch: tuple
    z_norm: float
    l0: int
    class_id: int = -1
    h: float = 1.0

    @property
    def z_norm_scaled(self) -> float:
        return self.z_norm / self.h

    def to_dict(self) -> dict:
        return {
            "branch": list(self.branch),
            "class_id": self.class_id,
            "z_norm": self.z_norm,
            "z_norm_scaled": self.z_norm_scaled,
            "l0": self.l0,
            "matrix": self.matrix.tolist(),
        }


@dataclass
class AliasSet:
    candidates: list
    classes: list
    gap: float
    kappa: float
    h: float
    box: list
    context: AliasFunctionalContext
    kappa_min: float = 0.0
    tol_recon: float = 1e-8
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.candidates)

    def class_of(self, branch) -> int:
        for c in self.candidates:
            if c.branch == tuple(branch):
                return c.class_id
        raise KeyError(branch)

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "kappa": self.kappa,
            "kappa_min": self.kappa_min,
            "kappa0": self.context.kappa0,
            "gap": None if math.isinf(self.gap) else self.gap,
            "box": [list(b) for b in self.box],
            "n_classes": len(self.classes),
            "candidates": [c.to_dict() for c in self.candidates],
        }


def _symmetric_branches(dec: SpectralDecomposition, box) -> list[tuple]:
    """All conjugate-symmetric branch vectors inside ``box``."""
    if any(lo > hi for lo, hi in box):
        return []
    fixed = {}
    for k, lam in enumerate(dec.values):
        if k not in dec.conjugate_pairing:
            if lam.real < 0:
                raise NegativeRealEigenvalue(
                    "a negative real eigenvalue admits no real primary logarithm"
                )
            fixed[k] = 0
    if any(not (box[k][0] <= 0 <= box[k][1]) for k in fixed):
        return []
    upper = dec.upper_groups()
    ranges = []
    for k in upper:
        q = dec.conjugate_pairing[k]
        lo = max(box[k][0], -box[q][1])
        hi = min(box[k][1], -box[q][0])
        ranges.append(range(lo, hi + 1))
    out = []
    for combo in itertools.product(*ranges):
        j = [0] * dec.p
        for k, v in zip(upper, combo):
            j[k] = v
            j[dec.conjugate_pairing[k]] = -v
        out.append(tuple(j))
    return out


def _label_classes(ctx, candidates, tol):
    reps: list[tuple] = []
    classes: list[list[int]] = []
    for idx, c in enumerate(candidates):
        for cid, rep in enumerate(reps):
            if are_equivalent(ctx, rep, c.branch, tol):
                c.class_id = cid
                classes[cid].append(idx)
                break
        else:
            c.class_id = len(reps)
            reps.append(c.branch)
            classes.append([idx])
    return classes


def _analytic_norm(ctx: AliasFunctionalContext, j) -> float:
    return math.sqrt(max(0.0, ctx.kappa0**2 + NORM_LAW_CONSTANT * alias_functional(ctx, [0] * ctx.p, j)))


def norm_gap(ctx: AliasFunctionalContext, j_ref, rivals) -> float:
    """Smallest ``| ||h_Z(A)|| - ||h_Z(A_ref)|| |`` over rival branches.

    Computed from ``|a - b| = 4 pi^2 |I(j_ref, j - j_ref)| / (a + b)``;
    ``inf`` when there are no rivals.
    """
    a = _analytic_norm(ctx, j_ref)
    best = math.inf
    for j in rivals:
        delta = [y - x for x, y in zip(j_ref, j)]
        b = _analytic_norm(ctx, j)
        if a + b == 0:
            continue
        best = min(best, NORM_LAW_CONSTANT * abs(alias_functional(ctx, j_ref, delta)) / (a + b))
    return best


def enumerate_aliases(
    dec: SpectralDecomposition,
    h: float,
    kappa: float,
    tol_recon: float = 1e-8,
    kappa_min: float = 0.0,
    eps_zero: float | None = None,
    tol_equiv: float = 1e-9,
) -> AliasSet:
    """All real primary logarithms of ``A_d`` (scaled by ``1/h``) with
    ``kappa_min <= ||h_Z(h A)||_F <= kappa``.

    Parameters
    ----------
    dec : SpectralDecomposition
        Decomposition of the real transition matrix ``A_d``.
    h : float
        Sampling period.
    kappa : float
        Upper bound on the Z-weighted norm of the logarithm ``h * A``.
    tol_recon : float
        Relative tolerance for ``exp(h A) = A_d``.
    kappa_min : float
        Optional lower bound, for enumerating an annulus.
    eps_zero : float, optional
        Threshold for the L0 count of each candidate.
    """
    if h <= 0 or kappa <= 0:
        raise ValueError("h and kappa must be positive")
    ctx = AliasFunctionalContext.from_decomposition(dec)
    box = branch_search_box(ctx, kappa)
    A_d = dec.source
    ad_norm = float(np.linalg.norm(A_d))
    slack = 1e-12 * max(1.0, kappa)

    candidates: list[AliasCandidate] = []
    for j in _symmetric_branches(dec, box):
        L = log_branch(dec, j, real=True)
        z = z_weighted_norm(dec, L)
        if z > kappa + slack or z < kappa_min - slack:
            continue
        if np.linalg.norm(mat_exp(L) - A_d) > tol_recon * ad_norm:
            continue
        M = L / h
        if any(np.linalg.norm(M - c.matrix) <= 1e-8 * ad_norm for c in candidates):
            continue
        candidates.append(AliasCandidate(M, j, z, l0_count(M, eps_zero), h=h))

    candidates.sort(key=lambda c: c.branch)
    classes = _label_classes(ctx, candidates, tol_equiv)
    gap = math.inf
    for a, b in itertools.combinations(candidates, 2):
        if a.class_id != b.class_id:
            gap = min(gap, norm_gap(ctx, a.branch, [b.branch]))
    return AliasSet(candidates, classes, gap, kappa, h, box, ctx, kappa_min, tol_recon)


def uniqueness_window(
    dec: SpectralDecomposition,
    h: float,
    A_ref,
    tol_equiv: float = 1e-9,
    gap_tol: float = 1e-12,
    max_doublings: int = 30,
) -> tuple[float, float]:
    """Norm annulus ``(kappa_l, kappa_u)`` around a reference alias that
    contains no branch from any other equivalence class.

    ``A_ref`` is the continuous-time alias (its logarithm is ``h * A_ref``).
    The gap to rival classes is found by enumerating ever larger balls until
    the nearest rival provably lies inside the searched ball.
    """
    A_ref = as_matrix(A_ref, "A_ref")
    ctx = AliasFunctionalContext.from_decomposition(dec)
    # identify the branch of A_ref from its eigenvalues in the Z basis
    diag = np.diag(dec.Zinv @ (h * A_ref) @ dec.Z)
    logs = np.log(dec.values)
    j_ref = []
    for k in range(dec.p):
        sl = dec.group_slice(k)
        jk = np.round((np.mean(diag[sl]) - logs[k]).imag / (2 * math.pi))
        j_ref.append(int(jk))
    j_ref = tuple(j_ref)
    if np.linalg.norm(log_branch(dec, j_ref, real=False) - h * A_ref) > 1e-6 * max(
        1.0, float(np.linalg.norm(h * A_ref))
    ):
        raise ValueError("A_ref is not a primary logarithm branch of the decomposed matrix")
    a = _analytic_norm(ctx, j_ref)

    if not dec.upper_groups():
        return 0.0, math.inf

    G = max(a, 2 * math.pi)
    M = math.inf
    for _ in range(max_doublings):
        alias_set = enumerate_aliases(dec, h, a + G, tol_recon=1e-6, tol_equiv=tol_equiv)
        rivals = [c.branch for c in alias_set.candidates if not are_equivalent(ctx, j_ref, c.branch, tol_equiv)]
        M = norm_gap(ctx, j_ref, rivals)
        if M <= G:
            break
        G *= 2
    if math.isinf(M):
        return 0.0, math.inf
    if not M > gap_tol:
        raise GapNotPositive(f"norm gap {M:.3g} is not positive")
    margin = 1e-9 * M
    return max(0.0, a - M) + margin, a + M - margin
