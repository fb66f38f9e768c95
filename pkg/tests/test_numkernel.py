import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfseries.mpnum import backend
from mfseries.numkernel import (
    KernelError,
    RankDeficientError,
    dehomogenize_solve,
    lu_least_squares,
    normalize_vector,
    numerical_kernel,
    svd,
)
from mfseries.pipeline import SolveOptions, assemble, solve
from mfseries.relations import ExpansionProblem


def random_complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def angle(u, v):
    c = abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.acos(min(1.0, c))


def test_svd_examples():
    res = svd(np.diag([3.0, 1.0]).astype(complex))
    assert res.S == pytest.approx([3, 1])
    assert np.abs(np.abs(res.U) - np.eye(2)).max() < 1e-15
    res = svd(np.array([[1, -1], [2, -2]], dtype=complex))
    assert res.S[0] == pytest.approx(math.sqrt(10)) and res.S[1] < 1e-15
    assert angle(res.V[:, 1], np.array([1, 1]) / math.sqrt(2)) < 1e-12


@settings(max_examples=20)
@given(st.integers(1, 12), st.integers(0, 6), st.integers(0, 2 ** 32 - 1))
def test_svd_unitary_and_reconstructs(n, extra, seed):
    rng = np.random.default_rng(seed)
    A = random_complex(rng, n + extra, n)
    res = svd(A)
    assert np.abs(res.U.conj().T @ res.U - np.eye(n)).max() <= 1e-11
    assert np.abs(res.V.conj().T @ res.V - np.eye(n)).max() <= 1e-11
    assert np.abs(res.reconstruct() - A).max() <= 1e-11 * max(1, np.abs(A).max())
    assert list(res.S) == sorted(res.S, reverse=True)
    ref = np.linalg.svd(A, compute_uv=False)
    assert np.abs(np.array(res.S) - ref).max() <= 1e-11 * ref[0]


@settings(max_examples=10)
@given(st.integers(2, 10), st.integers(0, 2 ** 32 - 1))
def test_svd_adjoint_same_values(n, seed):
    A = random_complex(np.random.default_rng(seed), n, n)
    s1, s2 = svd(A).S, svd(A.conj().T).S
    assert np.abs(np.array(s1) - np.array(s2)).max() <= 1e-11 * s1[0]


def test_svd_extended():
    ar = backend(40)
    A = ar.array([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    res = svd(A, ar)
    err = res.reconstruct() - A
    assert max(abs(x) for x in err.ravel()) < 1e-36
    UhU = np.array([[sum(res.U[k, i].conjugate() * res.U[k, j] for k in range(3)) for j in range(3)] for i in range(3)])
    assert max(abs(x) for x in (UhU - ar.eye(3)).ravel()) < 1e-36


def test_svd_needs_tall():
    with pytest.raises(Exception):
        svd(np.ones((2, 3), dtype=complex))


def test_planted_kernel():
    rng = np.random.default_rng(1)
    v = random_complex(rng, 50, 1)[:, 0]
    v /= np.linalg.norm(v)
    B = random_complex(rng, 50, 50)
    A = B @ (np.eye(50) - np.outer(v, v.conj()))
    res = svd(A)
    assert res.S[-1] <= 1e-12 * res.S[0] * 10
    kern = numerical_kernel(A, expected_dim=1)
    assert kern.dimension == 1 and not kern.flagged
    assert angle(kern.vector, v) < 1e-10
    assert kern.residuals[0] <= 10 * kern.kernel_threshold * kern.singular_values[0]


def test_planted_two_dimensional_kernel():
    rng = np.random.default_rng(2)
    Q, _ = np.linalg.qr(random_complex(rng, 30, 2))
    A = random_complex(rng, 40, 30) @ (np.eye(30) - Q @ Q.conj().T)
    kern = numerical_kernel(A, expected_dim=2)
    assert kern.dimension == 2
    G = np.array([[np.vdot(a, b) for b in kern.basis] for a in kern.basis])
    assert np.abs(G - np.eye(2)).max() < 1e-12


def test_kernel_flags_wrong_expectation():
    rng = np.random.default_rng(3)
    A = random_complex(rng, 6, 6)
    kern = numerical_kernel(A, expected_dim=1)
    assert kern.dimension == 0 and kern.flagged


def test_kernel_rejects_zero_matrix():
    with pytest.raises(KernelError):
        numerical_kernel(np.zeros((4, 4), dtype=complex))


def test_lu_examples():
    e1 = np.array([1, 0, 0], dtype=complex)
    assert np.array_equal(lu_least_squares(np.eye(3, dtype=complex), e1), e1)
    nodes = np.array([0.1, 0.5, -0.3, 0.9, -0.8])
    coeffs = np.array([1.0, -2.0, 0.5, 3.0, -1.0])
    V = np.vander(nodes, 5, increasing=True).astype(complex)
    x = lu_least_squares(V, V @ coeffs)
    assert np.abs(x - coeffs).max() <= 1e-11


def test_lu_extended_vandermonde():
    ar = backend(30)
    nodes = [ar.real(k) / 7 for k in (-3, -1, 1, 2, 5)]
    coeffs = [ar.real(c) for c in (1, -2, 3, 5, -7)]
    V = ar.array([[x ** j for j in range(5)] for x in nodes])
    x = lu_least_squares(V, V @ ar.array(coeffs), ar)
    assert max(abs(a - b) for a, b in zip(x, coeffs)) <= 1e-26


def test_lu_tall_least_squares():
    rng = np.random.default_rng(4)
    A = random_complex(rng, 12, 5)
    x0 = random_complex(rng, 5, 1)[:, 0]
    assert np.abs(lu_least_squares(A, A @ x0) - x0).max() < 1e-12
    with pytest.raises(ValueError):
        lu_least_squares(A.T, x0)


def test_lu_rank_deficiency_reported():
    A = np.array([[1, 2], [2, 4]], dtype=complex)
    with pytest.raises(RankDeficientError) as info:
        lu_least_squares(A, np.ones(2))
    assert info.value.condition > 1e10


def test_dehomogenize_and_normalize():
    A = np.array([[1, -1, 0], [0, 1, -1], [1, 0, -1]], dtype=complex)
    b = dehomogenize_solve(A, drop_row=0)
    assert np.abs(b - 1).max() < 1e-14
    v = normalize_vector(np.array([2.0, 4.0]), 0)
    assert list(v) == [1.0, 2.0]
    with pytest.raises(KernelError):
        normalize_vector(np.array([0.0, 1.0]))


def test_disc6_lu_matches_svd(disc6_domain):
    prob = ExpansionProblem(disc6_domain, 4, 35)
    a = solve(prob, SolveOptions(method="lu"))
    b = solve(prob, SolveOptions(method="svd"))
    assert max(abs(x - y) * prob.R ** n for n, (x, y) in enumerate(zip(a.b, b.b))) <= 1e-10


def test_kernel_stable_under_quadrature_refinement(disc6_domain):
    k70 = numerical_kernel(assemble(ExpansionProblem(disc6_domain, 4, 35, Q=70), SolveOptions()))
    k140 = numerical_kernel(assemble(ExpansionProblem(disc6_domain, 4, 35, Q=140), SolveOptions()))
    assert k70.dimension == k140.dimension == 1
    assert angle(k70.vector, k140.vector) < 1e-8
