"""Classical conditional-mutual-information minimization.

A joint distribution is a non-negative array ``p[x, y, alpha]`` summing to
one; the target is the fixed ``(x, y)`` marginal. The iteration

    P'(x, y, a) = Pt(x, y) R(x, y, a) / sum_a R(x, y, a),
    R(x, y, a)  = P(x, a) P(y, a) / P(a),

is the classical analogue of the quantum relaxation in :mod:`entrelax.quantum`.
"""

from __future__ import annotations

import math

import numpy as np

from .structures import SolverConfig, SolverReport

LN2 = math.log(2.0)
NORM_ATOL = 1e-12
CLASSICAL_TOL = 1e-9
CLASSICAL_MAX_ITER = 10000


def check_joint(p, atol: float = NORM_ATOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 3 or min(p.shape) < 1:
        raise ValueError(f"joint distribution must be a non-empty (nx, ny, nalpha) array, got {p.shape}")
    if np.any(p < 0):
        raise ValueError("joint distribution has negative entries")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"joint distribution sums to {p.sum()!r}, not 1")
    return p


def check_target(t, atol: float = NORM_ATOL) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or np.any(t < 0) or abs(t.sum() - 1.0) > atol:
        raise ValueError("target must be a non-negative (nx, ny) table summing to 1")
    return t


def classical_r(p) -> np.ndarray:
    """``R(x, y, a) = P(x, a) P(y, a) / P(a)`` with 0/0 = 0."""
    p = np.asarray(p, dtype=float)
    pxa = p.sum(axis=1)
    pya = p.sum(axis=0)
    pa = p.sum(axis=(0, 1))
    safe = np.where(pa > 0, pa, 1.0)
    r = pxa[:, None, :] * pya[None, :, :] / safe
    return np.where(pa > 0, r, 0.0)


def _plogp_ratio(p: np.ndarray, q: np.ndarray) -> float:
    """``sum p ln(p/q)`` over p > 0, ``inf`` if q vanishes there."""
    pos = p > 0
    if np.any(q[pos] <= 0):
        return math.inf
    return float(np.sum(p[pos] * np.log(p[pos] / q[pos])))


def classical_kl(p, q) -> float:
    """Classical KL distance ``D(p // q)`` in bits."""
    return _plogp_ratio(np.asarray(p, float), np.asarray(q, float)) / LN2


def classical_cmi(p) -> float:
    """``H(x:y|alpha)`` in bits."""
    p = check_joint(p)
    return _plogp_ratio(p, classical_r(p)) / LN2


def classical_lagrangian(p, p2) -> float:
    """``sum P ln(P / R[P2])`` in nats."""
    p = np.asarray(p, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p.shape != p2.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {p2.shape}")
    return _plogp_ratio(p, classical_r(p2))


def classical_step(p, target) -> np.ndarray:
    """One sweep of the relaxation map; re-imposes the target marginal exactly.

    Cells whose R-column vanishes while the target is positive are spread
    uniformly over alpha.
    """
    p = np.asarray(p, dtype=float)
    target = np.asarray(target, dtype=float)
    r = classical_r(p)
    col = r.sum(axis=2, keepdims=True)
    nalpha = p.shape[2]
    cond = np.where(col > 0, r / np.where(col > 0, col, 1.0), 1.0 / nalpha)
    return target[:, :, None] * cond


def classical_delta(p) -> np.ndarray:
    """Entanglement operator ``Delta(x, y) = -ln(R(x, y) / P(x, y))`` in nats.

    Cells with P(x, y) = 0 are set to 0.
    """
    p = np.asarray(p, dtype=float)
    pxy = p.sum(axis=2)
    rxy = classical_r(p).sum(axis=2)
    ok = (pxy > 0) & (rxy > 0)
    return np.where(ok, -np.log(np.where(ok, rxy, 1.0) / np.where(ok, pxy, 1.0)), 0.0)


def classical_stationarity_residual(p) -> float:
    p = np.asarray(p, dtype=float)
    pxy = p.sum(axis=2)
    fixed = classical_step(p, pxy)
    mask = np.broadcast_to((pxy > 0)[:, :, None], p.shape)
    return float(np.max(np.abs(p - fixed)[mask], initial=0.0))


def mutual_information_bits(t) -> float:
    """``H(x:y)`` in bits of a two-variable table."""
    t = np.asarray(t, dtype=float)
    prod = np.outer(t.sum(axis=1), t.sum(axis=0))
    return _plogp_ratio(t, prod) / LN2


def initial_joint(target, nalpha: int, rng: np.random.Generator) -> np.ndarray:
    """Random point of P_cla: an independent Dirichlet(1) conditional per cell."""
    target = np.asarray(target, dtype=float)
    u = rng.dirichlet(np.ones(nalpha), size=target.shape)
    return target[:, :, None] * u


def _solve_once(target: np.ndarray, nalpha: int, cfg: SolverConfig, rng) -> SolverReport:
    p = initial_joint(target, nalpha, rng)
    res_hist: list[float] = []
    cmi_hist: list[float] = []
    prev = math.inf
    converged = False
    for _ in range(cfg.max_iter):
        p = classical_step(p, target)
        cmi = _plogp_ratio(p, classical_r(p)) / LN2
        res = classical_stationarity_residual(p)
        res_hist.append(res)
        cmi_hist.append(cmi)
        if res < cfg.tol and abs(cmi - prev) < cfg.tol:
            converged = True
            break
        prev = cmi
    delta = classical_delta(p)
    return SolverReport(
        entanglement_bits=0.5 * cmi_hist[-1],
        ensemble=p,
        delta=delta,
        iterations=len(res_hist),
        residual_history=res_hist,
        cmi_history=cmi_hist,
        converged=converged,
        delta_bits=float(np.sum(target * delta)) / (2 * LN2),
        residual=res_hist[-1],
        kind="classical",
    )


def classical_solve(target, nalpha: int, config: SolverConfig | None = None) -> SolverReport:
    """Estimate ``E_cla = min H(x:y|alpha) / 2`` over joints with the given marginal.

    Runs ``config.restarts`` seeded starts and keeps the smallest value.
    """
    target = check_target(target)
    if nalpha < 1:
        raise ValueError("nalpha must be at least 1")
    cfg = (config or SolverConfig()).with_defaults(CLASSICAL_TOL, CLASSICAL_MAX_ITER)
    best = None
    for i in range(cfg.restarts):
        rep = _solve_once(target, nalpha, cfg, np.random.default_rng([cfg.seed, i]))
        rep.seed = i
        if best is None or rep.entanglement_bits < best.entanglement_bits:
            best = rep
    return best
