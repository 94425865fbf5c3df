"""Cross-module identities shared by the test-suite and ``entrelax verify``."""

from __future__ import annotations

import math

import numpy as np

from . import classical as cl
from . import quantum as qu
from .linalg import BipartiteDims, hermitize, ptrace_x, ptrace_y, quantum_kl
from .states import embed_diagonal, random_density_matrix
from .structures import Ensemble, SolverConfig

LN2 = math.log(2.0)


def random_joint(shape, rng: np.random.Generator) -> np.ndarray:
    p = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return p


def random_ensemble(dims, nalpha: int, rng: np.random.Generator, kind: str = "mixed") -> Ensemble:
    """Random full-rank (or rank-one) members with random weights; not tied to any rho."""
    dims = BipartiteDims(*dims)
    w = rng.dirichlet(np.ones(nalpha))
    rank = 1 if kind == "pure" else None
    members = np.stack([wi * random_density_matrix(dims.d, rng, rank) for wi in w])
    return Ensemble(dims, members, kind)


def classical_decomposition(p, p2) -> tuple[float, float]:
    """Both sides of L(P, P')/ln 2 = D(P_a//P'_a) + sum_a P(a)[I(x:y|a) + D(x|a) + D(y|a)]."""
    p = np.asarray(p, float)
    p2 = np.asarray(p2, float)
    lhs = cl.classical_lagrangian(p, p2) / LN2
    pa, pa2 = p.sum(axis=(0, 1)), p2.sum(axis=(0, 1))
    rhs = cl.classical_kl(pa, pa2)
    for a in np.flatnonzero(pa > 0):
        cond = p[:, :, a] / pa[a]
        cond2 = p2[:, :, a] / pa2[a]
        px, py = cond.sum(axis=1), cond.sum(axis=0)
        rhs += pa[a] * (cl.classical_kl(cond, np.outer(px, py))
                        + cl.classical_kl(px, cond2.sum(axis=1))
                        + cl.classical_kl(py, cond2.sum(axis=0)))
    return lhs, float(rhs)


def quantum_decomposition(e: Ensemble, e2: Ensemble) -> tuple[float, float]:
    """Both sides of the quantum analogue of :func:`classical_decomposition`."""
    dims = e.dims
    lhs = qu.quantum_lagrangian(e, e2) / LN2
    w, w2 = e.weights, e2.weights
    rhs = cl.classical_kl(w, w2)
    for k, k2, wa, wa2 in zip(e.members, e2.members, w, w2):
        if wa <= 0:
            continue
        rho = k / wa
        rx, ry = hermitize(ptrace_y(rho, dims)), hermitize(ptrace_x(rho, dims))
        rx2 = hermitize(ptrace_y(k2 / wa2, dims))
        ry2 = hermitize(ptrace_x(k2 / wa2, dims))
        rhs += wa * (quantum_kl(rho, np.kron(rx, ry)) + quantum_kl(rx, rx2) + quantum_kl(ry, ry2))
    return lhs, float(rhs)


def diagonal_embedding_gap(p0, steps: int = 50, cfg: SolverConfig | None = None) -> float:
    """Largest elementwise gap between mixed and classical iterates on diagonal data.

    The mixed iteration starts from the diagonal embedding of ``p0`` with
    delta set to the embedded classical Delta of ``p0``.
    """
    p0 = np.asarray(p0, float)
    nx, ny, na = p0.shape
    dims = BipartiteDims(nx, ny)
    target = p0.sum(axis=2)
    rho = np.diag(target.reshape(-1)).astype(complex)
    e = Ensemble(dims, embed_diagonal(p0), "mixed")
    delta = np.diag(cl.classical_delta(p0).reshape(-1)).astype(complex)
    cfg = cfg or SolverConfig()
    p = p0
    gap = 0.0
    for _ in range(steps):
        p = cl.classical_step(p, target)
        e, delta = qu.mixed_step(e, delta, rho, cfg)
        gap = max(gap, float(np.max(np.abs(e.members - embed_diagonal(p)))))
    return gap
