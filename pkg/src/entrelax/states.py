"""Named bipartite states and random HJW ensembles.

Basis conventions: product basis ``|xy>`` in lexicographic order (x is the
slow index), so for two qubits the order is 00, 01, 10, 11. Bell states are
returned in the order phi+, phi-, psi+, psi-.
"""

from __future__ import annotations

import numpy as np

from .linalg import DEFAULT_EPS, BipartiteDims, NotPSDError, _eigh, _kernel_mask, hermitize
from .structures import Ensemble

SIMPLEX_ATOL = 1e-10


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def bell_basis() -> list[np.ndarray]:
    """``[phi+, phi-, psi+, psi-]`` as length-4 complex vectors."""
    s = 1 / np.sqrt(2)
    return [
        np.array([s, 0, 0, s], dtype=complex),
        np.array([s, 0, 0, -s], dtype=complex),
        np.array([0, s, s, 0], dtype=complex),
        np.array([0, s, -s, 0], dtype=complex),
    ]


def _check_simplex(m, n: int, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (n,) or np.any(m < -SIMPLEX_ATOL) or abs(m.sum() - 1) > SIMPLEX_ATOL:
        raise ValueError(f"{name} must be {n} non-negative weights summing to 1, got {m}")
    return m


def bell_mixture(m) -> np.ndarray:
    m = _check_simplex(m, 4, "bell mixture weights")
    return hermitize(sum(w * _proj(b) for w, b in zip(m, bell_basis())))


def werner(f: float) -> np.ndarray:
    """Werner state W(F): weight F on phi+, (1-F)/3 on each other Bell state."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"Werner fidelity must lie in [0, 1], got {f}")
    r = (1.0 - f) / 3.0
    return bell_mixture([f, r, r, r])


def werner_weights(f: float) -> np.ndarray:
    r = (1.0 - f) / 3.0
    return np.array([f, r, r, r])


def horodecki(alpha: float) -> np.ndarray:
    """The 3x3 Horodecki family sigma(alpha), alpha in [2, 5]."""
    if not 2.0 <= alpha <= 5.0:
        raise ValueError(f"Horodecki parameter must lie in [2, 5], got {alpha}")
    psi = np.zeros(9, dtype=complex)
    psi[[0, 4, 8]] = 1 / np.sqrt(3)
    plus = np.zeros(9)
    minus = np.zeros(9)
    for x, y in [(0, 1), (1, 2), (2, 0)]:
        plus[3 * x + y] = 1 / 3
        minus[3 * y + x] = 1 / 3
    rho = (2 / 7) * _proj(psi) + (alpha / 7) * np.diag(plus) + ((5 - alpha) / 7) * np.diag(minus)
    return hermitize(rho)


def product_state(a, b) -> np.ndarray:
    v = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    return v / np.linalg.norm(v)


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_right_unitary(nalpha: int, d: int, seed) -> np.ndarray:
    """Seeded ``nalpha x d`` matrix with orthonormal columns.

    Columns of a complex Gaussian matrix orthonormalized by QR, with the phases
    of R's diagonal folded back in so the distribution is Haar on the Stiefel
    manifold.
    """
    if d < 1 or nalpha < d:
        raise ValueError(f"right-unitary needs nalpha >= d >= 1, got nalpha={nalpha}, d={d}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(nalpha, d)) + 1j * rng.normal(size=(nalpha, d))
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def _support_eigenpairs(rho: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    lam, u = _eigh(rho)
    if lam[0] < -eps * max(lam[-1], 0.0) - 1e-12:
        raise NotPSDError("rho is not positive semidefinite")
    keep = ~_kernel_mask(lam, eps)
    return lam[keep], u[:, keep]


def hjw_pure_vectors(rho: np.ndarray, t: np.ndarray, eps: float = DEFAULT_EPS) -> tuple[np.ndarray, np.ndarray]:
    """Weights and unit vectors of the ensemble ``sum_j T_aj sqrt(l_j) |phi_j>``."""
    lam, u = _support_eigenpairs(rho, eps)
    unnorm = t @ (np.sqrt(lam)[:, None] * u.T)  # row alpha = sqrt(w_a) psi_a
    w = np.sum(np.abs(unnorm) ** 2, axis=1)
    safe = np.where(w > 0, np.sqrt(w), 1.0)
    return w, unnorm / safe[:, None]


def hjw_initial_ensemble(rho, dims, nalpha: int, kind: str = "pure", seed=0,
                         eps: float = DEFAULT_EPS) -> Ensemble:
    """Random decomposition of ``rho`` into ``nalpha`` members.

    ``kind="pure"``: rank-one members built from a seeded right-unitary over
    the support eigenpairs of rho. ``kind="mixed"``: a seeded convex blend of
    two independent pure decompositions, so members are generically rank two.
    Either way the members sum to rho.
    """
    rho = hermitize(np.asarray(rho, dtype=complex))
    dims = BipartiteDims(*dims)
    lam, _ = _support_eigenpairs(rho, eps)
    rank = lam.size
    if nalpha < rank:
        raise ValueError(f"nalpha={nalpha} is below rank(rho)={rank}")
    seq = np.random.SeedSequence(seed)
    s1, s2, s3 = seq.spawn(3)
    w, vecs = hjw_pure_vectors(rho, random_right_unitary(nalpha, rank, s1), eps)
    members = w[:, None, None] * np.einsum("ai,aj->aij", vecs, vecs.conj())
    if kind == "pure":
        return Ensemble(dims, members, "pure", vectors=vecs)
    if kind != "mixed":
        raise ValueError(f"kind must be 'pure' or 'mixed', got {kind!r}")
    w2, vecs2 = hjw_pure_vectors(rho, random_right_unitary(nalpha, rank, s2), eps)
    members2 = w2[:, None, None] * np.einsum("ai,aj->aij", vecs2, vecs2.conj())
    lam_mix = np.random.default_rng(s3).uniform(0.2, 0.8)
    return Ensemble(dims, hermitize(lam_mix * members + (1 - lam_mix) * members2), "mixed")


def fresh_member(rho: np.ndarray, rng: np.random.Generator, eps: float = DEFAULT_EPS) -> np.ndarray:
    """One random unit vector from rho's HJW family (a random row of a right-unitary)."""
    lam, u = _support_eigenpairs(rho, eps)
    row = rng.normal(size=lam.size) + 1j * rng.normal(size=lam.size)
    v = u @ (row * np.sqrt(lam))
    return v / np.linalg.norm(v)


def embed_diagonal(p: np.ndarray) -> np.ndarray:
    """Stack of diagonal K^alpha matrices from a joint table P(x, y, alpha)."""
    nx, ny, na = p.shape
    flat = p.reshape(nx * ny, na).T
    return np.stack([np.diag(col).astype(complex) for col in flat])
