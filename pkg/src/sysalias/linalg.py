"""Dense matrix helpers and the grouped eigendecomposition used everywhere else.

Only diagonalizable matrices are supported.  Eigenvalues closer than a
grouping tolerance are merged into one group so that branch indices can be
shared across numerically equal eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DefectiveMatrix, DimensionMismatch, SingularInput, ValidationError

DEFECTIVE_THRESHOLD = 1e8
SINGULAR_TOL = 1e-12


def as_matrix(a, name: str = "matrix", square: bool = True, dtype=float) -> np.ndarray:
    """Return ``a`` as a finite 2-D array, optionally checking squareness."""
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def as_square(a, name: str = "matrix") -> np.ndarray:
    """Real or complex square matrix; complex only if ``a`` really is complex."""
    arr = np.asarray(a)
    dtype = complex if np.iscomplexobj(arr) else float
    return as_matrix(arr, name, square=True, dtype=dtype)


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, so that vec(AXB) = (B^T kron A) vec(X)."""
    return np.asarray(a).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Grouped eigendecomposition ``P = Z diag(eigenvalues) Z^{-1}``.

    Attributes
    ----------
    Z : ndarray (n, n), complex
        Eigenvector matrix; the columns of group ``k`` are contiguous.
    Zinv : ndarray (n, n), complex
    values : ndarray (p,), complex
        One eigenvalue per group, sorted by (real part, imaginary part).
    multiplicities : tuple of int
    conjugate_pairing : dict
        For real sources, maps each group with a non-real eigenvalue to the
        group holding its conjugate.
    condition_estimate : float
        2-norm condition number of ``Z``.
    source : ndarray
        The decomposed matrix.
    """

    Z: np.ndarray
    Zinv: np.ndarray
    values: np.ndarray
    multiplicities: tuple
    conjugate_pairing: dict
    condition_estimate: float
    source: np.ndarray
    is_real: bool
    _offsets: tuple = field(repr=False, default=())

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def p(self) -> int:
        return len(self.values)

    @property
    def groups(self) -> list[tuple[complex, int]]:
        return [(complex(v), m) for v, m in zip(self.values, self.multiplicities)]

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in column order of ``Z`` (length n)."""
        return np.repeat(self.values, self.multiplicities)

    def group_slice(self, k: int) -> slice:
        return slice(self._offsets[k], self._offsets[k] + self.multiplicities[k])

    def reconstruct(self, diagonal=None) -> np.ndarray:
        """``Z diag(d) Z^{-1}`` with ``d`` given per group (defaults to the eigenvalues)."""
        d = self.values if diagonal is None else np.asarray(diagonal)
        full = np.repeat(d, self.multiplicities)
        return (self.Z * full) @ self.Zinv

    def upper_groups(self) -> list[int]:
        """Groups whose eigenvalue has positive imaginary part (one per conjugate pair)."""
        return [k for k in self.conjugate_pairing if self.values[k].imag > 0]


def _cluster(w: np.ndarray, tol: float) -> list[list[int]]:
    # single-linkage clustering of eigenvalues; n is small so O(n^2) is fine
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(n):
        for b in range(a + 1, n):
            if abs(w[a] - w[b]) <= tol:
                parent[find(a)] = find(b)
    clusters: dict[int, list[int]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)
    return list(clusters.values())


def spectral_decompose(
    P,
    tol_group: float | None = None,
    defect_threshold: float = DEFECTIVE_THRESHOLD,
    tol_singular: float = SINGULAR_TOL,
) -> SpectralDecomposition:
    """Grouped eigendecomposition of a nonsingular diagonalizable matrix.

    Parameters
    ----------
    P : array_like, shape (n, n)
        Real or complex matrix.
    tol_group : float, optional
        Eigenvalues within this distance are merged into one group.
        Defaults to ``1e-8 * ||P||_2``.
    defect_threshold : float
        Reject when the eigenvector condition number exceeds this.
    tol_singular : float
        Relative threshold (w.r.t. ``||P||_2``) below which an eigenvalue
        counts as zero.

    Raises
    ------
    SingularInput, DefectiveMatrix
    """
    P = as_square(P, "P")
    n = P.shape[0]
    is_real = not np.iscomplexobj(P)
    scale = np.linalg.norm(P, 2) if n else 0.0
    if tol_group is None:
        tol_group = 1e-8 * scale

    w, V = np.linalg.eig(P)
    w = w.astype(complex)
    V = V.astype(complex)
    if np.any(np.abs(w) <= tol_singular * max(scale, np.finfo(float).tiny)):
        raise SingularInput("matrix has a zero eigenvalue; no logarithm exists")

    clusters = _cluster(w, tol_group)
    values = [complex(np.mean(w[c])) for c in clusters]

    if is_real:
        for i, c in enumerate(clusters):
            if abs(values[i].imag) <= tol_group:
                values[i] = complex(values[i].real, 0.0)

    order = sorted(range(len(clusters)), key=lambda i: (values[i].real, values[i].imag))
    clusters = [clusters[i] for i in order]
    values = [values[i] for i in order]
    cols = [V[:, c] for c in clusters]

    pairing: dict[int, int] = {}
    if is_real:
        for k, v in enumerate(values):
            if v.imag <= 0 or k in pairing:
                continue
            best = min(
                (q for q in range(len(values)) if values[q].imag < 0 and q not in pairing),
                key=lambda q: abs(values[q] - v.conjugate()),
                default=None,
            )
            if best is None or len(clusters[best]) != len(clusters[k]) or abs(
                values[best] - v.conjugate()
            ) > max(tol_group, 1e-10 * scale):
                raise DefectiveMatrix("real matrix without matching conjugate eigenvalue group")
            # enforce exact conjugate symmetry so real branches project cleanly
            values[best] = v.conjugate()
            cols[best] = cols[k].conj()
            pairing[k] = best
            pairing[best] = k

    Z = np.concatenate(cols, axis=1) if cols else np.zeros((0, 0), complex)
    mult = tuple(len(c) for c in clusters)
    cond = float(np.linalg.cond(Z)) if n else 1.0
    if not np.isfinite(cond) or cond > defect_threshold:
        raise DefectiveMatrix(
            f"eigenvector condition estimate {cond:.3g} exceeds {defect_threshold:.1g}; "
            "matrix is numerically non-diagonalizable"
        )
    Zinv = np.linalg.inv(Z)
    offsets = tuple(int(x) for x in np.concatenate([[0], np.cumsum(mult)[:-1]])) if mult else ()
    return SpectralDecomposition(
        Z=Z,
        Zinv=Zinv,
        values=np.array(values, dtype=complex),
        multiplicities=mult,
        conjugate_pairing=pairing,
        condition_estimate=cond,
        source=P.copy(),
        is_real=is_real,
        _offsets=offsets,
    )


def _singular_values(Mx) -> tuple[np.ndarray, np.ndarray]:
    Mx = np.atleast_2d(np.asarray(Mx, dtype=float))
    if not np.all(np.isfinite(Mx)):
        raise ValidationError("matrix has non-finite entries")
    if Mx.size == 0:
        return np.zeros(0), np.eye(Mx.shape[1])
    _, s, Vh = np.linalg.svd(Mx, full_matrices=True)
    return s, Vh


def rank_of(Mx, tol_rank: float = 1e-10) -> int:
    """Numerical rank: singular values above ``tol_rank * s_max``."""
    s, _ = _singular_values(Mx)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol_rank * s[0]))


def kernel_basis(Mx, tol_rank: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as columns) of the right null space of ``Mx``."""
    s, Vh = _singular_values(Mx)
    r = 0 if s.size == 0 or s[0] == 0 else int(np.sum(s > tol_rank * s[0]))
    return Vh[r:].conj().T.copy()


def l0_count(A, eps_zero: float | None = None) -> int:
    """Number of entries with ``|a_ij| > eps_zero``.

    The default threshold is ``1e-6 * max(1, ||A||_F)``.
    """
    A = np.asarray(A)
    if eps_zero is None:
        eps_zero = 1e-6 * max(1.0, float(np.linalg.norm(A)))
    return int(np.count_nonzero(np.abs(A) > eps_zero))
