"""Relaxation solvers for E_mixed and E_pure (entanglement of formation).

Both solvers alternate between an ensemble update and an update of the
entanglement operator ``delta``:

    K^a     <- pi1 exp(ln R^a[K] + delta) pi1         (normalized)
    Kt^a    <- pi1 exp(ln R^a[K_new] + delta) pi1     (normalized)
    I       <- (pi1 rho^-1/2 pi1) sum_a Kt^a (pi1 rho^-1/2 pi1) + pi0
    delta   <- -ln(exp(-delta/2) I exp(-delta/2))

In the pure variant each numerator is replaced by its top eigenpair.

The trace normalization of K leaves the identity component of ``delta``
undetermined by the update. Each step therefore shifts ``delta`` by
``-ln Z`` (Z the normalization of the K numerators). The shift commutes with
the update, so the ensemble iterates are unchanged, and it makes
``ln K = ln R + delta`` hold exactly at a fixed point.

For singular rho the mixed solver compresses the exponent onto supp(rho)
before exponentiating: ``ln R + delta`` is replaced by its pi1-block plus a
large negative multiple of pi0. This matches the printed form whenever rho
is full rank and keeps the K iterates inside supp(rho) otherwise.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from . import linalg as la
from .linalg import BipartiteDims, hermitize
from .structures import Ensemble, SolverConfig, SolverReport

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
QUANTUM_TOL = 1e-7
QUANTUM_MAX_ITER = 5000
TIE_GAP = 1e-12
# nats; exp of a larger spread is beyond double precision
DELTA_SPREAD_MAX = 200.0


def _reduced(members: np.ndarray, dims) -> tuple[np.ndarray, np.ndarray]:
    return hermitize(la.ptrace_y(members, dims)), hermitize(la.ptrace_x(members, dims))


def r_members(members: np.ndarray, dims) -> np.ndarray:
    """Stacked ``R^a = K^a_x (x) K^a_y / w_a``; zero where w_a = 0."""
    kx, ky = _reduced(members, dims)
    w = np.real(np.trace(members, axis1=-2, axis2=-1))
    safe = np.where(w > 0, w, 1.0)
    r = la.batch_kron(kx, ky) / safe[:, None, None]
    return np.where((w > 0)[:, None, None], hermitize(r), 0.0)


def quantum_r(e: Ensemble) -> list[np.ndarray]:
    return list(r_members(e.members, e.dims))


def _entropy_nats_unnormalized(members: np.ndarray) -> np.ndarray:
    """``-tr K ln K`` for each member of a stack."""
    lam = np.clip(np.linalg.eigvalsh(hermitize(members)), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def quantum_cmi(e: Ensemble) -> float:
    """``S(x:y|alpha)`` in bits for the block-diagonal state built from e.

    Computed as sum_a w_a [S(rho^a_x) + S(rho^a_y) - S(rho^a)] with
    unnormalized blocks: each bracket equals S(K_x) + S(K_y) - S(K) - w ln w.
    """
    kx, ky = _reduced(e.members, e.dims)
    w = e.weights
    pos = w > 0
    wlnw = np.where(pos, w * np.log(np.where(pos, w, 1.0)), 0.0)
    s = (_entropy_nats_unnormalized(kx) + _entropy_nats_unnormalized(ky)
         - _entropy_nats_unnormalized(e.members) + wlnw)
    return float(np.sum(s[pos])) / LN2


def quantum_lagrangian(e: Ensemble, e2: Ensemble, eps: float = la.DEFAULT_EPS) -> float:
    """``sum_a tr[K^a (ln K^a - ln R'^a)]`` in nats; ``inf`` on a support violation."""
    if e.members.shape != e2.members.shape:
        raise la.DimensionError("ensembles differ in shape")
    r2 = r_members(e2.members, e2.dims)
    total = 0.0
    for k, r in zip(e.members, r2):
        w = float(np.real(np.trace(k)))
        if w <= 0:
            continue
        d = la.quantum_kl(k / w, hermitize(r / max(np.real(np.trace(r)), 1e-300)), eps)
        if not np.isfinite(d):
            return np.inf
        wr = float(np.real(np.trace(r)))
        if wr <= 0:
            return np.inf
        total += w * (d * LN2 + math.log(w / wr))
    return total


def entanglement_from_delta(rho, delta) -> float:
    """Dual estimate ``tr(rho delta) / (2 ln 2)`` in bits."""
    rho = np.asarray(rho)
    delta = np.asarray(delta)
    if rho.shape != delta.shape:
        raise la.DimensionError("rho and delta differ in shape")
    return float(np.real(np.trace(rho @ delta))) / (2 * LN2)


def delta_update(delta: np.ndarray, big_i: np.ndarray) -> np.ndarray:
    """``-ln(exp(-delta/2) I exp(-delta/2))`` with a clamped logarithm."""
    half = la.expm_hermitian(-0.5 * delta)
    return la.neg_log_hermitian(hermitize(half @ big_i @ half))


class _Geometry:
    """Quantities of the target rho reused by every step."""

    def __init__(self, rho: np.ndarray, eps: float):
        self.rho = hermitize(np.asarray(rho, dtype=complex))
        self.pi1, self.pi0 = la.support_kernel_projectors(self.rho, eps)
        self.inv_sqrt = la.inv_sqrt_on_support(self.rho, eps)
        self.eps = eps

    def i_operator(self, total: np.ndarray) -> np.ndarray:
        return hermitize(self.inv_sqrt @ total @ self.inv_sqrt + self.pi0)


def _geometry(rho, cfg: SolverConfig, geom: _Geometry | None) -> _Geometry:
    return geom if geom is not None else _Geometry(rho, cfg.eps_kernel)


def _floor_rng(cfg: SolverConfig, members: np.ndarray) -> np.random.Generator:
    # deterministic per state so reruns are bitwise identical
    key = int(np.abs(np.real(members)).sum() * 1e6) % (2**32)
    return np.random.default_rng([cfg.seed, key])


def _apply_weight_floor(members: np.ndarray, vectors: np.ndarray | None, geom: _Geometry,
                        cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray | None]:
    """Replace branches whose weight fell below w_floor by fresh HJW members."""
    from .states import fresh_member

    w = np.real(np.trace(members, axis1=-2, axis2=-1))
    dead = np.flatnonzero(w < cfg.w_floor)
    if dead.size == 0:
        return members, vectors
    rng = _floor_rng(cfg, members)
    members = members.copy()
    vectors = None if vectors is None else vectors.copy()
    for a in dead:
        v = fresh_member(geom.rho, rng, geom.eps)
        members[a] = cfg.w_floor * np.outer(v, v.conj())
        if vectors is not None:
            vectors[a] = v
    members = members / np.real(np.trace(members, axis1=-2, axis2=-1)).sum()
    return members, vectors


def _mixed_half(members: np.ndarray, dims, delta: np.ndarray, geom: _Geometry,
                cfg: SolverConfig) -> tuple[np.ndarray, float]:
    compress = True if cfg.compress is None else cfg.compress
    num = la.exp_logsum_batch(r_members(members, dims), delta, geom.pi1, geom.eps, cfg.exp_method,
                              compress=compress)
    z = float(np.real(np.trace(num, axis1=-2, axis2=-1)).sum())
    return num / z, z


def mixed_step(e: Ensemble, delta, rho, cfg: SolverConfig | None = None,
               geom: _Geometry | None = None) -> tuple[Ensemble, np.ndarray]:
    """One pass of the mixed update; returns the new ensemble and delta."""
    cfg = cfg or SolverConfig()
    geom = _geometry(rho, cfg, geom)
    delta = hermitize(np.asarray(delta, dtype=complex))
    members, z = _mixed_half(e.members, e.dims, delta, geom, cfg)
    delta = delta - math.log(z) * np.eye(delta.shape[0])
    members, _ = _apply_weight_floor(members, None, geom, cfg)
    tilde, _ = _mixed_half(members, e.dims, delta, geom, cfg)
    new_delta = delta_update(delta, geom.i_operator(tilde.sum(axis=0)))
    return Ensemble(e.dims, members, "mixed"), new_delta


def _top_eigpairs(num: np.ndarray, prev: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    """Largest eigenvalue and eigenvector of each matrix in a stack.

    When the top eigenvalue is degenerate (gap below TIE_GAP relative), the
    vector is the projection of the previous vector onto the top eigenspace,
    which maximizes the overlap with it; failing that, the projection of the
    lowest-index basis vector that overlaps the eigenspace.
    """
    lam, u = np.linalg.eigh(hermitize(num))
    top = lam[:, -1]
    vecs = u[:, :, -1].copy()
    if prev is not None:
        scale = np.maximum(np.abs(top), 1e-300)
        for a in np.flatnonzero(top - lam[:, -2] < TIE_GAP * scale):
            block = u[a][:, np.abs(lam[a] - top[a]) < TIE_GAP * scale[a]]
            proj = block @ (block.conj().T @ prev[a])
            nrm = np.linalg.norm(proj)
            if nrm <= 1e-8:
                # lowest-index basis vector with weight in the top eigenspace
                j = int(np.argmax(np.linalg.norm(block, axis=1) > 1e-8))
                proj = block @ block[j].conj()
                nrm = np.linalg.norm(proj)
            vecs[a] = proj / nrm
    # fix the global phase so that the largest component is real positive
    idx = np.argmax(np.abs(vecs), axis=1)
    ph = vecs[np.arange(len(idx)), idx]
    vecs = vecs * (np.abs(ph) / np.where(ph == 0, 1, ph))[:, None]
    return np.clip(top, 0.0, None), vecs


def _pure_half(members: np.ndarray, vectors, dims, delta, geom: _Geometry,
               cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray, float]:
    num = la.exp_logsum_batch(r_members(members, dims), delta, geom.pi1, geom.eps, cfg.exp_method,
                              compress=bool(cfg.compress))
    w, vecs = _top_eigpairs(num, vectors)
    z = float(w.sum())
    w = w / z
    return w[:, None, None] * np.einsum("ai,aj->aij", vecs, vecs.conj()), vecs, z


def pure_step(e: Ensemble, delta, rho, cfg: SolverConfig | None = None,
              geom: _Geometry | None = None) -> tuple[Ensemble, np.ndarray]:
    """One pass of the pure update (top eigenpair per branch)."""
    if e.kind != "pure":
        raise ValueError("pure_step needs a pure ensemble")
    cfg = cfg or SolverConfig()
    geom = _geometry(rho, cfg, geom)
    delta = hermitize(np.asarray(delta, dtype=complex))
    prev = e.pure_vectors()
    members, vecs, z = _pure_half(e.members, prev, e.dims, delta, geom, cfg)
    delta = delta - math.log(z) * np.eye(delta.shape[0])
    members, vecs = _apply_weight_floor(members, vecs, geom, cfg)
    tilde, _, _ = _pure_half(members, vecs, e.dims, delta, geom, cfg)
    new_delta = delta_update(delta, geom.i_operator(tilde.sum(axis=0)))
    return Ensemble(e.dims, members, "pure", vectors=vecs), new_delta


def stationarity_residual(e: Ensemble, delta, rho, kind: str | None = None,
                          eps: float = la.DEFAULT_EPS) -> float:
    """Distance from the optimality conditions.

    mixed: max_a ||pi_s (ln K^a - ln R^a - delta) pi_s||_F on the support of K^a.
    pure:  max_a ||(ln R^a + delta) psi_a - ln(w_a) psi_a||_2.
    Both add the reconstruction error ||sum_a K^a - rho||_F.
    """
    kind = kind or e.kind
    delta = np.asarray(delta, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    recon = float(np.linalg.norm(e.total() - rho))
    w = e.weights
    live = w > 0
    r = r_members(e.members, e.dims)
    log_r, _ = la.log_on_support(r[live], eps)
    if kind == "pure":
        psi = e.pure_vectors()[live]
        lhs = np.einsum("aij,aj->ai", log_r + delta, psi)
        err = np.linalg.norm(lhs - np.log(w[live])[:, None] * psi, axis=1)
    elif kind == "mixed":
        log_k, pi_s = la.log_on_support(e.members[live], eps)
        diff = pi_s @ (log_k - log_r - delta) @ pi_s
        err = np.linalg.norm(diff, axis=(1, 2))
    else:
        raise ValueError(f"kind must be 'mixed' or 'pure', got {kind!r}")
    return float(np.max(err, initial=0.0)) + recon


def _broken(e: Ensemble, delta: np.ndarray) -> bool:
    """True once an iterate is non-finite or delta's spread leaves double range."""
    if not (np.all(np.isfinite(e.members)) and np.all(np.isfinite(delta))):
        return True
    lam = np.linalg.eigvalsh(delta)
    return bool(lam[-1] - lam[0] > DELTA_SPREAD_MAX)


def _solve_once(rho: np.ndarray, dims: BipartiteDims, nalpha: int, cfg: SolverConfig,
                kind: str, seed, init: Ensemble | None = None, trace: list | None = None) -> SolverReport:
    from .states import hjw_initial_ensemble

    geom = _Geometry(rho, cfg.eps_kernel)
    e = init if init is not None else hjw_initial_ensemble(rho, dims, nalpha, kind, seed, cfg.eps_kernel)
    step = pure_step if kind == "pure" else mixed_step
    delta = np.zeros_like(geom.rho)
    res_hist: list[float] = []
    cmi_hist: list[float] = []
    streak = 0
    prev_e = np.inf
    converged = False
    broke = False
    for _ in range(cfg.max_iter):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                e_new, d_new = step(e, delta, geom.rho, cfg, geom)
            broke = _broken(e_new, d_new)
        except np.linalg.LinAlgError:
            broke = True
        if broke:
            break
        e, delta = e_new, d_new
        if trace is not None:
            trace.append((e, delta))
        res = stationarity_residual(e, delta, geom.rho, kind, cfg.eps_kernel)
        cmi = quantum_cmi(e)
        res_hist.append(res)
        cmi_hist.append(cmi)
        ent = 0.5 * cmi
        streak = streak + 1 if (res < cfg.tol and abs(ent - prev_e) < cfg.tol) else 0
        prev_e = ent
        if streak >= cfg.patience:
            converged = True
            break
    if not res_hist:
        res_hist.append(stationarity_residual(e, delta, geom.rho, kind, cfg.eps_kernel))
        cmi_hist.append(quantum_cmi(e))
    return SolverReport(
        entanglement_bits=0.5 * cmi_hist[-1],
        ensemble=e,
        delta=delta,
        iterations=len(res_hist),
        residual_history=res_hist,
        cmi_history=cmi_hist,
        converged=converged,
        delta_bits=entanglement_from_delta(geom.rho, delta),
        residual=res_hist[-1],
        seed=seed,
        kind=kind,
        breakdowns=int(broke),
    )


def _solve(rho, dims, nalpha: int | None, cfg: SolverConfig | None, kind: str) -> SolverReport:
    rho = la.check_hermitian(rho, atol=1e-10)
    dims = BipartiteDims(*dims)
    if rho.shape[0] != dims.d:
        raise la.DimensionError(f"rho of size {rho.shape[0]} does not match dims {tuple(dims)}")
    cfg = (cfg or SolverConfig()).with_defaults(QUANTUM_TOL, QUANTUM_MAX_ITER)
    nalpha = dims.d**2 if nalpha is None else nalpha
    if nalpha < 1:
        raise ValueError("nalpha must be at least 1")
    best = None
    for i in range(cfg.restarts):
        rep = _solve_once(rho, dims, nalpha, cfg, kind, [cfg.seed, i])
        broken = rep.breakdowns
        # a start whose delta diverged is replaced by a fresh one
        for k in range(1, cfg.max_reseeds + 1):
            if not rep.breakdowns:
                break
            rep = _solve_once(rho, dims, nalpha, cfg, kind, [cfg.seed, i, k])
            broken += rep.breakdowns
        rep.breakdowns = broken
        rep.seed = i
        log.debug("%s restart: E=%.8f iters=%d converged=%s", kind, rep.entanglement_bits,
                  rep.iterations, rep.converged)
        if best is None or rep.entanglement_bits < best.entanglement_bits:
            best = rep
    return best


def solve_with_trace(rho, dims, nalpha: int | None = None, cfg: SolverConfig | None = None,
                     kind: str = "mixed") -> tuple[SolverReport, list]:
    """Single-start solve that also returns every ``(ensemble, delta)`` iterate."""
    rho = la.check_hermitian(rho, atol=1e-10)
    dims = BipartiteDims(*dims)
    cfg = (cfg or SolverConfig()).with_defaults(QUANTUM_TOL, QUANTUM_MAX_ITER)
    trace: list = []
    rep = _solve_once(rho, dims, dims.d**2 if nalpha is None else nalpha, cfg, kind,
                      [cfg.seed, 0], trace=trace)
    return rep, trace


def mixed_solve(rho, dims, nalpha: int | None = None, cfg: SolverConfig | None = None) -> SolverReport:
    """Estimate E_mixed of rho; ``nalpha`` defaults to (nx*ny)^2."""
    return _solve(rho, dims, nalpha, cfg, "mixed")


def pure_solve(rho, dims, nalpha: int | None = None, cfg: SolverConfig | None = None) -> SolverReport:
    """Estimate the entanglement of formation of rho and an optimal decomposition."""
    return _solve(rho, dims, nalpha, cfg, "pure")
