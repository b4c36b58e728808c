"""Random instance generators and brute-force oracles shared by the tests."""

import itertools
import math
from pathlib import Path

import numpy as np
from scipy.linalg import expm


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def well_conditioned(rng, n, cond_max=50.0):
    while True:
        T = rng.standard_normal((n, n))
        if np.linalg.cond(T) < cond_max:
            return T


def random_log_friendly(rng, n, margin=0.3):
    """Random real matrix with every eigenvalue at angle < pi - margin."""
    while True:
        P = rng.standard_normal((n, n)) + 1.5 * np.eye(n)
        w = np.linalg.eigvals(P)
        if np.all(np.abs(np.angle(w)) < math.pi - margin) and np.min(np.abs(w)) > 0.1:
            return P


def random_strip_matrix(rng, n, h=1.0, frac=0.9):
    """Random real A with max |Im lambda| < frac * pi / h."""
    A = rng.standard_normal((n, n))
    im = np.max(np.abs(np.linalg.eigvals(A).imag))
    if im > 0:
        A *= min(1.0, frac * math.pi / (h * im))
    return A


def random_modal_matrix(rng, n, freq_range=(0.5, 8.0), decay_range=(-0.5, 0.2)):
    """Real diagonalizable A = T blockdiag(...) T^{-1} with floor(n/2) oscillatory modes."""
    blocks = []
    for _ in range(n // 2):
        s = rng.uniform(*decay_range)
        w = rng.uniform(*freq_range)
        blocks.append(np.array([[s, w], [-w, s]]))
    if n % 2:
        blocks.append(np.array([[rng.uniform(-1.0, 0.5)]]))
    B = np.zeros((n, n))
    i = 0
    for b in blocks:
        m = b.shape[0]
        B[i:i + m, i:i + m] = b
        i += m
    T = well_conditioned(rng, n, 20.0)
    return T @ B @ np.linalg.inv(T)


def planted_sparse(rng, n=5):
    """Sparse A (10 nonzeros out of 25): one fast damped oscillator feeding a
    cascade of three first-order states, randomly permuted.

    Sampling at h = 1 aliases the oscillator (|omega| > pi).
    """
    A = np.zeros((5, 5))
    s = -rng.uniform(0.05, 0.3)
    w = rng.uniform(4.0, 6.0)
    A[0, 0] = A[1, 1] = s
    A[0, 1], A[1, 0] = w, -w
    while True:
        d = -rng.uniform(0.1, 0.8, 3)
        if np.min(np.abs(np.subtract.outer(d, d)) + np.eye(3)) > 0.05:
            break
    A[2, 2], A[3, 3], A[4, 4] = d
    for (r, c) in [(2, 0), (3, 2), (4, 3)]:
        A[r, c] = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
    perm = rng.permutation(5)
    return A[np.ix_(perm, perm)]


def oracle_real_logs(Ad, J=6):
    """Brute force: every real primary log of ``Ad`` with |j| <= J per pair.

    Works from a fresh ``np.linalg.eig`` and pairs conjugates directly; returns
    a list of (matrix, z_norm).  Assumes distinct eigenvalues.
    """
    w, V = np.linalg.eig(Ad)
    n = len(w)
    upper = [k for k in range(n) if w[k].imag > 1e-9]
    lower = []
    for k in upper:
        q = int(np.argmin(np.abs(w - np.conj(w[k]))))
        lower.append(q)
    Vinv = np.linalg.inv(V)
    out = []
    for combo in itertools.product(range(-J, J + 1), repeat=len(upper)):
        logs = np.log(w.astype(complex))
        for k, q, j in zip(upper, lower, combo):
            logs[k] += 2j * math.pi * j
            logs[q] -= 2j * math.pi * j
        L = (V * logs) @ Vinv
        out.append((L.real, float(np.sqrt(np.sum(np.abs(logs) ** 2)))))
    return out


def same_matrix_sets(As, Bs, tol):
    if len(As) != len(Bs):
        return False
    used = set()
    for a in As:
        hits = [i for i, b in enumerate(Bs) if i not in used and np.linalg.norm(a - b) <= tol]
        if len(hits) != 1:
            return False
        used.add(hits[0])
    return True


def central_difference(f, X, E, t=1e-5):
    return (f(X + t * E) - f(X - t * E)) / (2 * t)


def rel_err(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300))


def subspace_recovery_instance(rng, satisfy=True):
    """(A_bar, E, C, X, Y) with n = 3, p = 2 and C = [I 0].

    With ``satisfy`` the rows of E and A_bar below the measured block are
    arranged so that Z A_bar^i E = 0 for every i; otherwise both are generic.
    """
    n = 3
    C = np.hstack([np.eye(2), np.zeros((2, 1))])
    if satisfy:
        A_bar = 0.4 * rng.standard_normal((n, n))
        A_bar[2, :2] = 0.0  # keeps span(e1, e2) invariant
        E = 0.3 * rng.standard_normal((n, n))
        E[2, :] = 0.0
    else:
        A_bar = 0.4 * rng.standard_normal((n, n))
        E = 0.3 * rng.standard_normal((n, n))
    X = rng.standard_normal((n, n)) + 2 * np.eye(n)
    Y = C @ expm(A_bar + E) @ X
    return A_bar, E, C, X, Y


DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

SCENARIOS = {
    # name: (A csv, h, steps, seed)
    "fast": ("fast_A.csv", 0.5, 40, 7),
    "planted": ("planted_A.csv", 1.0, 100, 11),
}


def run_scenario(name, workdir):
    """simulate -> identify through the CLI; returns the report bytes."""
    a_csv, h, steps, seed = SCENARIOS[name]
    traj = workdir / f"{name}_traj.csv"
    out = workdir / f"{name}_report.json"
    from sysalias.cli import main

    assert main(["simulate", "--input", str(DATA / a_csv), "--h", str(h), "--steps", str(steps),
                 "--seed", str(seed), "--output", str(traj)]) == 0
    assert main(["identify", "--input", str(traj), "--config", str(DATA / f"{name}_config.json"),
                 "--output", str(out)]) == 0
    return out.read_bytes()
