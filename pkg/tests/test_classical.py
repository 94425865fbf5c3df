import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrelax import classical as cl
from entrelax.checks import classical_decomposition, random_joint
from entrelax.oracles import brute_force_classical
from entrelax.structures import SolverConfig

seeds = st.integers(0, 2**32 - 1)
LN2 = math.log(2)


def cond_independent(rng, nx=2, ny=3, na=3):
    w = rng.dirichlet(np.ones(na))
    px = rng.dirichlet(np.ones(nx), size=na)
    py = rng.dirichlet(np.ones(ny), size=na)
    return np.einsum("a,ax,ay->xya", w, px, py)


def bijection(t):
    nx, ny = t.shape
    p = np.zeros((nx, ny, nx * ny))
    for i, (x, y) in enumerate(np.ndindex(nx, ny)):
        p[x, y, i] = t[x, y]
    return p


def test_cmi_examples():
    rng = np.random.default_rng(0)
    assert cl.classical_cmi(cond_independent(rng)) == pytest.approx(0, abs=1e-12)
    assert cl.classical_cmi(bijection(rng.dirichlet(np.ones(4)).reshape(2, 2))) == pytest.approx(0, abs=1e-12)
    p = np.zeros((2, 2, 2))
    for a in range(2):
        p[0, 0, a] = p[1, 1, a] = 0.25
    assert cl.classical_cmi(p) == pytest.approx(1.0)


def test_r_examples():
    rng = np.random.default_rng(1)
    p = cond_independent(rng)
    assert np.allclose(cl.classical_r(p), p)
    q = random_joint((2, 3, 4), rng)
    r = cl.classical_r(q)
    assert np.allclose(r.sum(axis=(0, 1)), q.sum(axis=(0, 1)))
    pa = q.sum(axis=(0, 1))
    for x, y, a in np.ndindex(q.shape):
        assert r[x, y, a] == pytest.approx(q[x, :, a].sum() * q[:, y, a].sum() / pa[a])


def test_r_zero_branch():
    p = np.zeros((2, 2, 2))
    p[:, :, 0] = 0.25
    assert np.all(cl.classical_r(p)[:, :, 1] == 0)


def test_lagrangian_examples():
    rng = np.random.default_rng(2)
    p = cond_independent(rng)
    assert cl.classical_lagrangian(p, p) == pytest.approx(0, abs=1e-12)
    q = random_joint((2, 2, 3), rng)
    assert cl.classical_lagrangian(q, q) / LN2 == pytest.approx(cl.classical_cmi(q), abs=1e-12)
    with pytest.raises(ValueError):
        cl.classical_lagrangian(q, random_joint((2, 2, 2), rng))


@given(seeds)
def test_lagrangian_decomposition(seed):
    rng = np.random.default_rng(seed)
    lhs, rhs = classical_decomposition(random_joint((2, 3, 3), rng), random_joint((2, 3, 3), rng))
    assert abs(lhs - rhs) <= 1e-8


@given(seeds)
def test_lagrangian_minimality(seed):
    rng = np.random.default_rng(seed)
    p, p2 = random_joint((3, 2, 3), rng), random_joint((3, 2, 3), rng)
    assert cl.classical_lagrangian(p, p2) >= cl.classical_lagrangian(p, p) - 1e-10


@given(seeds, st.floats(0, 1))
def test_lagrangian_convex_first_argument(seed, lam):
    rng = np.random.default_rng(seed)
    a, b, c = (random_joint((2, 2, 3), rng) for _ in range(3))
    mix = cl.classical_lagrangian(lam * a + (1 - lam) * b, c)
    assert mix <= lam * cl.classical_lagrangian(a, c) + (1 - lam) * cl.classical_lagrangian(b, c) + 1e-10


@settings(max_examples=200)
@given(seeds, st.integers(1, 12))
def test_kl_nonnegative(seed, n):
    rng = np.random.default_rng(seed)
    assert cl.classical_kl(rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))) >= -1e-12


@given(seeds)
def test_step_preserves_invariants(seed):
    rng = np.random.default_rng(seed)
    t = rng.dirichlet(np.ones(6)).reshape(2, 3)
    p = cl.classical_step(random_joint((2, 3, 3), rng), t)
    assert np.all(p >= 0)
    assert abs(p.sum() - 1) < 1e-12
    assert np.allclose(p.sum(axis=2), t, atol=1e-12)


def test_step_fixed_points():
    rng = np.random.default_rng(3)
    t = rng.dirichlet(np.ones(4)).reshape(2, 2)
    b = bijection(t)
    assert np.allclose(cl.classical_step(b, t), b)
    assert cl.classical_stationarity_residual(b) == pytest.approx(0, abs=1e-15)
    p = cond_independent(rng, 2, 2, 2)
    assert np.allclose(cl.classical_step(p, p.sum(axis=2)), p)


def test_step_zero_denominator_uniform():
    t = np.full((2, 2), 0.25)
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 1.0
    out = cl.classical_step(p, t)
    assert np.allclose(out[1, 1], [0.125, 0.125])


def test_cmi_monotone_along_sequence():
    rng = np.random.default_rng(4)
    t = rng.dirichlet(np.ones(4)).reshape(2, 2)
    p = cl.initial_joint(t, 2, rng)
    vals = []
    for _ in range(200):
        p = cl.classical_step(p, t)
        vals.append(cl.classical_cmi(p))
    assert np.all(np.diff(vals) <= 1e-10)


def test_delta_examples():
    rng = np.random.default_rng(5)
    p = cond_independent(rng, 2, 2, 1)
    assert np.allclose(cl.classical_delta(p), 0, atol=1e-12)
    q = random_joint((2, 2, 3), rng)
    r = cl.classical_r(q)
    assert np.allclose(cl.classical_delta(q), -np.log(r.sum(axis=2) / q.sum(axis=2)))


def test_solve_duality_at_convergence():
    t = np.random.default_rng(6).dirichlet(np.ones(9)).reshape(3, 3)
    rep = cl.classical_solve(t, 2, SolverConfig(seed=1))
    assert rep.converged
    expect = float(np.sum(t * rep.delta)) / (2 * LN2)
    assert rep.entanglement_bits == pytest.approx(expect, abs=1e-6)
    assert rep.residual_history[-1] < 1e-8
    assert len(rep.residual_history) == len(rep.cmi_history) == rep.iterations


def test_solve_large_and_single_nalpha():
    t = np.random.default_rng(7).dirichlet(np.ones(6)).reshape(2, 3)
    assert cl.classical_solve(t, 6).entanglement_bits == pytest.approx(0, abs=1e-6)
    one = cl.classical_solve(t, 1).entanglement_bits
    assert one == pytest.approx(0.5 * cl.mutual_information_bits(t), abs=1e-12)


def test_solve_matches_oracle():
    t = np.random.default_rng(8).dirichlet(np.ones(4)).reshape(2, 2)
    rep = cl.classical_solve(t, 2, SolverConfig(restarts=4))
    assert abs(rep.entanglement_bits - brute_force_classical(t, 2)) <= 1e-3


def test_solve_monotone_in_nalpha():
    t = np.random.default_rng(9).dirichlet(np.ones(9)).reshape(3, 3)
    cfg = SolverConfig(restarts=5, seed=2)
    e = [cl.classical_solve(t, n, cfg).entanglement_bits for n in (1, 2, 3)]
    assert e[1] <= e[0] + 1e-9 and e[2] <= e[1] + 1e-9


def test_solve_rejects_bad_target():
    with pytest.raises(ValueError):
        cl.classical_solve(np.array([[0.5, 0.6], [0.0, 0.0]]), 2)
    with pytest.raises(ValueError):
        cl.classical_solve(np.full((2, 2), 0.25), 0)


def test_solve_matches_oracle_nontrivial():
    # 2x2 targets always reach zero at nalpha=2; a 3x3 one generally does not
    t = np.random.default_rng(10).dirichlet(np.ones(9)).reshape(3, 3)
    rep = cl.classical_solve(t, 2, SolverConfig(restarts=10))
    ref = brute_force_classical(t, 2, size_cap=18)
    assert ref > 1e-3
    assert abs(rep.entanglement_bits - ref) <= 1e-3
