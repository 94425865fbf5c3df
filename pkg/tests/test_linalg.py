import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrelax import linalg as la
from entrelax.states import bell_basis, random_density_matrix

seeds = st.integers(0, 2**32 - 1)


def proj(v):
    return np.outer(v, v.conj())


def test_eig_diagonal():
    s = la.eig_hermitian(np.diag([2.0, 1.0]))
    assert np.allclose(s.eigenvalues, [1, 2])
    assert np.allclose(np.abs(s.eigenvectors), [[0, 1], [1, 0]])


def test_eig_identity():
    assert np.allclose(la.eig_hermitian(np.eye(3)).eigenvalues, 1)


def test_eig_pauli_x():
    s = la.eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert np.allclose(s.eigenvalues, [-1, 1])
    assert abs(abs(np.vdot(s.eigenvectors[:, 0], [1, -1])) / math.sqrt(2) - 1) < 1e-12


def test_eig_rejects_non_hermitian():
    with pytest.raises(la.NotHermitianError):
        la.eig_hermitian(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(1, 9))
def test_spectrum_invariants(seed, d):
    m = random_density_matrix(d, np.random.default_rng(seed)) - 0.1 * np.eye(d)
    lam, u = la.eig_hermitian(m)
    assert np.all(np.diff(lam) >= 0)
    assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-12)
    assert np.linalg.norm(u @ np.diag(lam) @ u.conj().T - m) <= 1e-10 * np.linalg.norm(m)


def test_projectors_threshold():
    s, k = la.support_kernel_projectors(np.diag([1, 1e-20, 0.3]))
    assert np.allclose(k, np.diag([0, 1, 0]))
    assert np.array_equal(s + k, np.eye(3))


def test_projectors_identity_and_zero():
    s, k = la.support_kernel_projectors(np.eye(2))
    assert np.allclose(s, np.eye(2)) and np.allclose(k, 0)
    s, k = la.support_kernel_projectors(np.zeros((2, 2)))
    assert np.allclose(k, np.eye(2)) and np.allclose(s, 0)


def test_projectors_reject_negative():
    with pytest.raises(la.NotPSDError):
        la.support_kernel_projectors(np.diag([1.0, -0.5]))


@given(seeds)
def test_projectors_orthogonal_idempotent(seed):
    rng = np.random.default_rng(seed)
    m = random_density_matrix(6, rng, rank=int(rng.integers(1, 6)))
    s, k = la.support_kernel_projectors(m)
    assert np.array_equal(s + k, np.eye(6))
    assert np.allclose(s @ k, 0, atol=1e-10)
    assert np.allclose(s @ s, s, atol=1e-10)


def test_partial_trace_bell():
    phi = proj(bell_basis()[0])
    assert np.allclose(la.partial_trace_y(phi, (2, 2)), np.eye(2) / 2)
    assert np.allclose(la.partial_trace_x(phi, (2, 2)), np.eye(2) / 2)


def test_partial_trace_product_rule():
    rng = np.random.default_rng(1)
    a, b = random_density_matrix(2, rng), 3 * random_density_matrix(3, rng)
    assert np.allclose(la.partial_trace_y(np.kron(a, b), (2, 3)), 3 * a)
    assert np.allclose(la.partial_trace_x(np.kron(a, b), (2, 3)), b)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(la.DimensionError):
        la.partial_trace_x(np.eye(4), (2, 3))


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_trace_preserves_trace(seed, nx, ny):
    m = random_density_matrix(nx * ny, np.random.default_rng(seed))
    assert abs(np.trace(la.partial_trace_x(m, (nx, ny))) - 1) < 1e-12
    assert abs(np.trace(la.partial_trace_y(m, (nx, ny))) - 1) < 1e-12


def test_entropy_examples():
    assert la.von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(1.0)
    assert la.von_neumann_entropy(proj(bell_basis()[2])) == pytest.approx(0.0, abs=1e-12)
    assert la.von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_rejects_non_density():
    with pytest.raises(la.NotDensityMatrixError):
        la.von_neumann_entropy(np.diag([0.7, 0.7]))


@given(seeds, st.integers(1, 9))
def test_entropy_bounds(seed, d):
    s = la.von_neumann_entropy(random_density_matrix(d, np.random.default_rng(seed)))
    assert -1e-12 <= s <= math.log2(d) + 1e-12


def test_kl_examples():
    rho = random_density_matrix(4, np.random.default_rng(0))
    assert la.quantum_kl(rho, rho) == pytest.approx(0, abs=1e-10)
    assert la.quantum_kl(np.diag([1.0, 0]), np.diag([0.5, 0.5])) == pytest.approx(1.0)
    assert la.quantum_kl(np.diag([0.5, 0.5]), np.diag([1.0, 0])) == math.inf


@given(seeds)
def test_kl_commuting_matches_classical(seed):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    a, b = u @ np.diag(p) @ u.conj().T, u @ np.diag(q) @ u.conj().T
    assert la.quantum_kl(a, b) == pytest.approx(float(np.sum(p * np.log2(p / q))), abs=1e-9)


@settings(max_examples=200)
@given(seeds, st.integers(1, 6))
def test_kl_nonnegative(seed, d):
    rng = np.random.default_rng(seed)
    assert la.quantum_kl(random_density_matrix(d, rng), random_density_matrix(d, rng)) >= -1e-10


def test_inv_sqrt_examples():
    assert np.allclose(la.inv_sqrt_on_support(np.eye(2)), np.eye(2))
    assert np.allclose(la.inv_sqrt_on_support(np.diag([4.0, 0])), np.diag([0.5, 0]))


@given(seeds)
def test_inv_sqrt_identity(seed):
    rho = random_density_matrix(5, np.random.default_rng(seed))
    s = la.inv_sqrt_on_support(rho)
    assert np.allclose(s @ rho @ s, np.eye(5), atol=1e-8)


def test_exp_logsum_commuting_singular():
    out = la.exp_logsum(np.diag([0.5, 0]), np.diag([math.log(2), 7.0]))
    assert np.allclose(out, np.diag([1.0, 0]), atol=1e-12)


def test_exp_logsum_zero_delta():
    r = random_density_matrix(4, np.random.default_rng(3))
    assert np.allclose(la.exp_logsum(r, np.zeros((4, 4))), r, atol=1e-12)


def test_exp_logsum_matches_direct():
    rng = np.random.default_rng(5)
    r = random_density_matrix(6, rng)
    h = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    delta = la.hermitize(h)
    lam, u = np.linalg.eigh(r)
    lam2, u2 = np.linalg.eigh(u @ np.diag(np.log(lam)) @ u.conj().T + delta)
    ref = u2 @ np.diag(np.exp(lam2)) @ u2.conj().T
    out = la.exp_logsum(r, delta)
    assert np.linalg.norm(out - ref) <= 1e-8 * np.linalg.norm(ref)
    assert np.allclose(out, out.conj().T, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 9))
def test_exp_logsum_pade_agrees(seed, d):
    rng = np.random.default_rng(seed)
    r = random_density_matrix(d, rng)
    delta = la.hermitize(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    a = la.exp_logsum(r, delta, method="eig")
    b = la.exp_logsum(r, delta, method="pade")
    assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(a)


def test_exp_logsum_respects_projector():
    r = np.diag([0.5, 0.3, 0.2])
    pi1 = np.diag([1.0, 1.0, 0.0])
    out = la.exp_logsum(r, np.zeros((3, 3)), pi1)
    assert np.allclose(out, np.diag([0.5, 0.3, 0.0]))
