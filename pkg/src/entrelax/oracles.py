"""Independent reference values used to check the solvers."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import minimize

from .classical import check_target, mutual_information_bits
from .linalg import BipartiteDims, entropy_bits, hermitize, ptrace_y

SIZE_CAP = 16


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs p in [0, 1], got {p}")
    return entropy_bits([p, 1.0 - p])


def bell_mixture_eof(m) -> float:
    """Closed-form entanglement of formation of a Bell-diagonal state (bits)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4,) or np.any(m < -1e-10) or abs(m.sum() - 1) > 1e-10:
        raise ValueError(f"Bell mixture weights must lie on the 4-simplex, got {m}")
    m_max = float(m.max())
    t = 0.0 if m_max < 0.5 else (2 * m_max - 1) ** 2
    return binary_entropy((1 + math.sqrt(max(1 - t, 0.0))) / 2)


def pure_state_eof(psi, dims) -> float:
    """Entropy of the x-marginal of a normalized pure state (bits)."""
    dims = BipartiteDims(*dims)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dims.d:
        raise ValueError(f"state of length {psi.size} does not match dims {tuple(dims)}")
    rho_x = hermitize(ptrace_y(np.outer(psi, psi.conj()), dims))
    return max(entropy_bits(np.linalg.eigvalsh(rho_x)), 0.0)


def _cmi_bits_batch(p: np.ndarray) -> np.ndarray:
    """CMI in bits for a stack of joints with shape (n, nx, ny, na)."""
    pxa = p.sum(axis=2, keepdims=True)
    pya = p.sum(axis=1, keepdims=True)
    pa = p.sum(axis=(1, 2), keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = p * pa / (pxa * pya)
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, ratio, 1.0)), 0.0)
    return terms.sum(axis=(1, 2, 3))


def _cmi_bits(p: np.ndarray) -> float:
    return float(_cmi_bits_batch(p[None])[0])


def _coordinate_descent(cond: np.ndarray, target: np.ndarray, sweeps: int = 60) -> tuple[np.ndarray, float]:
    """Cyclic minimization over each cell's conditional simplex P(alpha | x, y)."""
    nx, ny, na = cond.shape
    best = _cmi_bits(target[:, :, None] * cond)
    cons = ({"type": "eq", "fun": lambda q: q.sum() - 1.0},)
    for _ in range(sweeps):
        start = best
        for x, y in itertools.product(range(nx), range(ny)):
            if target[x, y] == 0:
                continue

            def f(q, x=x, y=y):
                c = cond.copy()
                c[x, y] = np.clip(q, 0.0, None)
                return _cmi_bits(target[:, :, None] * c)

            res = minimize(f, cond[x, y], method="SLSQP", bounds=[(0.0, 1.0)] * na,
                           constraints=cons, options={"ftol": 1e-14, "maxiter": 200})
            q = np.clip(res.x, 0.0, None)
            q = q / q.sum()
            val = f(q)
            if val < best:
                cond[x, y] = q
                best = val
        if start - best < 1e-13:
            break
    return cond, best


def brute_force_classical(target, nalpha: int, budget: int = 10_000, seed=0,
                          size_cap: int = SIZE_CAP, refine: int = 4) -> float:
    """Minimum of CMI/2 (bits) over joints with the given (x, y) marginal.

    Combines exhaustive enumeration of deterministic assignments alpha(x, y),
    ``budget`` seeded random conditionals, and coordinate descent from the
    best ``refine`` candidates. Never uses the relaxation map.
    """
    target = check_target(target)
    nx, ny = target.shape
    if nx * ny * nalpha > size_cap:
        raise ValueError(f"brute force limited to nx*ny*nalpha <= {size_cap}, got {nx * ny * nalpha}")
    if budget < 10_000:
        raise ValueError("budget must be at least 10^4")
    if nalpha == 1:
        return 0.5 * mutual_information_bits(target)
    rng = np.random.default_rng(seed)

    vertices = []
    for assign in itertools.product(range(nalpha), repeat=nx * ny):
        c = np.zeros((nx * ny, nalpha))
        c[np.arange(nx * ny), assign] = 1.0
        vertices.append(c.reshape(nx, ny, nalpha))
    vertices = np.array(vertices)
    # mix dense and sparse Dirichlet draws so that both interior and
    # near-boundary conditionals are sampled
    conc = np.where(rng.random(budget) < 0.5, 1.0, 0.2)
    draws = rng.gamma(np.broadcast_to(conc[:, None, None, None], (budget, nx, ny, nalpha)))
    draws = draws / draws.sum(axis=-1, keepdims=True)
    pool = np.concatenate([vertices, draws])
    values = _cmi_bits_batch(target[None, :, :, None] * pool)
    best = float(values.min())
    for idx in np.argsort(values)[:refine]:
        _, val = _coordinate_descent(pool[idx].copy(), target)
        best = min(best, val)
    return 0.5 * max(best, 0.0)
