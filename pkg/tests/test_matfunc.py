import math

import numpy as np
import pytest
import scipy.linalg as spl
from hypothesis import given, settings
from hypothesis import strategies as st

from sysalias.errors import (
    BranchLengthMismatch,
    DimensionMismatch,
    NegativeRealEigenvalue,
    NonRealResult,
    SingularInput,
)
from sysalias.linalg import spectral_decompose, unvec, vec
from sysalias.matfunc import (
    first_order_residual,
    frechet_exp,
    frechet_log,
    kron_K,
    log_branch,
    mat_exp,
    principal_log,
)

from support import central_difference, random_log_friendly, random_strip_matrix, rel_err, rotation


def taylor_exp(A, terms=80):
    # scaled Taylor series with squaring; independent of scipy
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(A, 1), 1e-300)))) + 1)
    B = A / 2**s
    out = np.eye(A.shape[0], dtype=A.dtype)
    term = np.eye(A.shape[0], dtype=A.dtype)
    for k in range(1, terms):
        term = term @ B / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


# --- mat_exp --------------------------------------------------------------

def test_exp_examples():
    np.testing.assert_array_equal(mat_exp(np.zeros((2, 2))), np.eye(2))
    np.testing.assert_allclose(mat_exp(np.diag([1.0, 2.0])), np.diag([math.e, math.e**2]), rtol=1e-14)
    np.testing.assert_allclose(mat_exp(np.array([[0.0, 1.0], [-1.0, 0.0]])), rotation(1.0), atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_exp_matches_taylor(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((int(rng.integers(2, 11)),) * 2)
    assert rel_err(mat_exp(A), taylor_exp(A)) <= 1e-10


# --- principal_log --------------------------------------------------------

def test_principal_log_examples():
    np.testing.assert_array_equal(principal_log(np.eye(3)), np.zeros((3, 3)))
    L = principal_log(rotation(1.0))
    np.testing.assert_allclose(L, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-14)
    assert L.dtype == float
    with pytest.raises(NegativeRealEigenvalue):
        principal_log(-np.eye(2))
    with pytest.raises(SingularInput):
        principal_log(np.diag([1.0, 0.0]))


@pytest.mark.parametrize("seed", range(20))
def test_exp_log_roundtrip_and_strip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    P = random_log_friendly(rng, n)
    L = principal_log(P)
    assert np.isrealobj(L)
    assert rel_err(mat_exp(L), P) <= 1e-8
    assert np.all(np.abs(np.linalg.eigvals(L).imag) < math.pi)


@pytest.mark.parametrize("seed", range(20))
def test_log_exp_identity_on_strip(seed):
    rng = np.random.default_rng(100 + seed)
    A = random_strip_matrix(rng, int(rng.integers(2, 7)))
    assert rel_err(principal_log(mat_exp(A)), A) <= 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_principal_log_agrees_with_zero_branch(seed):
    # independent route: eigendecomposition with the j = 0 branch
    P = random_log_friendly(np.random.default_rng(seed), 4)
    dec = spectral_decompose(P)
    assert rel_err(principal_log(P), log_branch(dec, [0] * dec.p)) <= 1e-9


# --- log_branch -----------------------------------------------------------

def test_log_branch_identity():
    dec = spectral_decompose(np.eye(2))
    np.testing.assert_array_equal(log_branch(dec, [0]), np.zeros((2, 2)))


def test_log_branch_rotation():
    dec = spectral_decompose(rotation(1.0))
    L0 = log_branch(dec, [0, 0])
    np.testing.assert_allclose(L0, principal_log(rotation(1.0)), atol=1e-14)
    # groups are ordered (e^{-i}, e^{+i}); +1 on e^{i} and -1 on e^{-i}
    L = log_branch(dec, [-1, 1])
    w = 1 + 2 * math.pi
    np.testing.assert_allclose(L, [[0.0, w], [-w, 0.0]], atol=1e-13)
    assert rel_err(mat_exp(L), rotation(1.0)) <= 1e-8


def test_log_branch_nonsymmetric():
    dec = spectral_decompose(rotation(1.0))
    L = log_branch(dec, [1, 1])
    assert np.iscomplexobj(L)
    with pytest.raises(NonRealResult):
        log_branch(dec, [1, 1], real=True)
    with pytest.raises(BranchLengthMismatch):
        log_branch(dec, [0])


@pytest.mark.parametrize("seed", range(8))
def test_branch_coverage(seed):
    rng = np.random.default_rng(seed)
    P = random_log_friendly(rng, 4)
    dec = spectral_decompose(P)
    for _ in range(5):
        j = rng.integers(-3, 4, dec.p)
        L = log_branch(dec, j, real=False)
        assert rel_err(mat_exp(L), P) <= 1e-8


# --- Fréchet derivatives ----------------------------------------------------

def test_frechet_exp_trivial_cases():
    rng = np.random.default_rng(3)
    E = rng.standard_normal((3, 3))
    np.testing.assert_allclose(frechet_exp(np.zeros((3, 3)), E), E, atol=1e-14)
    X = rng.standard_normal((3, 3))
    np.testing.assert_allclose(frechet_exp(X, X), X @ mat_exp(X), rtol=1e-12, atol=1e-12)
    with pytest.raises(DimensionMismatch):
        frechet_exp(X, np.eye(2))


@pytest.mark.parametrize("seed", range(10))
def test_frechet_exp_oracles(seed):
    rng = np.random.default_rng(seed)
    X, E = rng.standard_normal((2, 3, 3))
    L = frechet_exp(X, E)
    assert rel_err(L, central_difference(mat_exp, X, E)) <= 1e-6
    # block-triangular exponential trick
    big = np.block([[X, E], [np.zeros((3, 3)), X]])
    assert rel_err(L, spl.expm(big)[:3, 3:]) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_frechet_exp_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    X, E1, E2 = rng.standard_normal((3, 3, 3))
    lhs = frechet_exp(X, a * E1 + b * E2)
    rhs = a * frechet_exp(X, E1) + b * frechet_exp(X, E2)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1 + np.linalg.norm(rhs))


def test_frechet_log_identity_point():
    E = np.random.default_rng(0).standard_normal((3, 3))
    np.testing.assert_allclose(frechet_log(np.eye(3), E), E, atol=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_frechet_log_chain_rule_and_fd(seed):
    rng = np.random.default_rng(seed)
    X = 0.4 * rng.standard_normal((3, 3))
    E = rng.standard_normal((3, 3))
    eX = mat_exp(X)
    assert rel_err(frechet_log(eX, frechet_exp(X, E)), E) <= 1e-6
    assert rel_err(frechet_log(eX, E), central_difference(principal_log, eX, E)) <= 1e-6


# --- K operator ---------------------------------------------------------------

def test_K_at_zero_is_identity():
    np.testing.assert_allclose(kron_K(np.zeros((2, 2))), np.eye(4), atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_K_defining_identity_and_columnwise_assembly(seed):
    rng = np.random.default_rng(seed)
    n = 3
    X, E = rng.standard_normal((2, n, n))
    K = kron_K(X)
    np.testing.assert_allclose(K @ vec(E), vec(frechet_exp(X, E)), atol=1e-12)
    cols = []
    for b in range(n):
        for a in range(n):
            Eab = np.zeros((n, n))
            Eab[a, b] = 1.0
            cols.append(vec(frechet_exp(X, Eab)))
    np.testing.assert_allclose(K, np.column_stack(cols), atol=1e-12)
    # the psi form at E = 0 agrees with the quadrature
    K_psi = kron_K(X, 1e-300 * np.ones((n, n)))
    np.testing.assert_allclose(K_psi, K, atol=1e-10)
    # vec(L_Log(e^X, F)) = K(X, 0)^{-1} vec(F)
    np.testing.assert_allclose(np.linalg.solve(K, vec(frechet_exp(X, E))), vec(E), atol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_K_exact_increment(seed):
    rng = np.random.default_rng(seed)
    A, E = rng.standard_normal((2, 3, 3))
    K = kron_K(A, E)
    lhs = vec(mat_exp(A + E)) - vec(mat_exp(A))
    assert np.linalg.norm(lhs - K @ vec(E)) <= 1e-8 * np.linalg.norm(lhs)


def test_first_order_residual():
    rng = np.random.default_rng(0)
    A, E = rng.standard_normal((2, 3, 3))
    assert first_order_residual(A, E, 0.0) == 0.0
    assert first_order_residual(A, np.zeros((3, 3)), 0.7) == 0.0
    ts = [1e-1 / 2**k for k in range(6)]
    r = [first_order_residual(A, E, t) for t in ts]
    slopes = np.diff(np.log(r)) / np.diff(np.log(ts))
    assert np.all(np.abs(slopes - 2.0) < 0.15)
    assert r[-1] / ts[-1] < r[0] / ts[0]


def test_unvec_roundtrip_with_K():
    X = np.diag([0.1, 0.2])
    E = np.array([[0.0, 1.0], [0.0, 0.0]])
    F = unvec(kron_K(X) @ vec(E), 2)
    # commuting diagonal case: (e^{a} - e^{b}) / (a - b) on the off-diagonal
    expected = (math.exp(0.1) - math.exp(0.2)) / (0.1 - 0.2)
    assert F[0, 1] == pytest.approx(expected, rel=1e-12)
