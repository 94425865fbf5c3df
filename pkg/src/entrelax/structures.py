"""Shared containers: ensembles, solver configuration and solver reports."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .linalg import BipartiteDims, hermitize

ENSEMBLE_PSD_ATOL = 1e-10
ENSEMBLE_TRACE_ATOL = 1e-10
PURE_RANK_RTOL = 1e-8


@dataclass
class Ensemble:
    """Decomposition candidate ``{K^alpha}`` of a bipartite density matrix.

    ``members`` has shape ``(nalpha, d, d)`` with ``d = nx * ny``. For pure
    ensembles ``vectors`` optionally caches the unit vectors psi_alpha (rows)
    so that ``K^alpha = w_alpha |psi_alpha><psi_alpha|``.
    """

    dims: BipartiteDims
    members: np.ndarray
    kind: str = "mixed"
    vectors: np.ndarray | None = None

    def __post_init__(self):
        self.dims = BipartiteDims(*self.dims)
        self.members = np.asarray(self.members, dtype=complex)
        if self.members.ndim != 3 or self.members.shape[1:] != (self.dims.d, self.dims.d):
            raise ValueError(f"members of shape {self.members.shape} do not match dims {tuple(self.dims)}")
        if self.kind not in ("mixed", "pure"):
            raise ValueError(f"kind must be 'mixed' or 'pure', got {self.kind!r}")

    @property
    def nalpha(self) -> int:
        return self.members.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.real(np.trace(self.members, axis1=1, axis2=2))

    def total(self) -> np.ndarray:
        return hermitize(self.members.sum(axis=0))

    def pure_vectors(self) -> np.ndarray:
        if self.vectors is not None:
            return self.vectors
        _, u = np.linalg.eigh(hermitize(self.members))
        return u[:, :, -1]

    def violations(self) -> list[str]:
        """Names of the ensemble invariants this instance breaks."""
        out = []
        lam = np.linalg.eigvalsh(hermitize(self.members))
        if np.any(lam < -ENSEMBLE_PSD_ATOL):
            out.append("members PSD")
        if abs(self.weights.sum() - 1.0) > ENSEMBLE_TRACE_ATOL:
            out.append("traces sum to one")
        if self.kind == "pure":
            top = lam[:, -1]
            if np.any(lam[:, -2] > PURE_RANK_RTOL * np.maximum(top, 0) + 1e-300):
                out.append("members rank one")
        return out


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls shared by the classical and quantum solvers.

    ``tol`` and ``max_iter`` default to ``None``, meaning the solver's own
    default (1e-9 / 10000 classical, 1e-7 / 5000 quantum).
    """

    tol: float | None = None
    max_iter: int | None = None
    eps_kernel: float = 1e-12
    w_floor: float = 1e-13
    restarts: int = 1
    seed: int = 0
    patience: int = 5
    # fresh starts allowed per restart when an iteration diverges
    max_reseeds: int = 50
    exp_method: str = "eig"
    # None: compress the exponent onto supp(rho) for mixed solves only
    compress: bool | None = None

    def __post_init__(self):
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive")
        if not 0 < self.w_floor <= 1e-6:
            raise ValueError("w_floor must lie in (0, 1e-6]")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_reseeds < 0:
            raise ValueError("max_reseeds must be non-negative")

    def with_defaults(self, tol: float, max_iter: int) -> "SolverConfig":
        return replace(
            self,
            tol=tol if self.tol is None else self.tol,
            max_iter=max_iter if self.max_iter is None else self.max_iter,
        )


@dataclass
class SolverReport:
    """Outcome of a solve.

    ``entanglement_bits`` is half the conditional mutual information of the
    final ensemble. ``delta_bits`` is the dual estimate tr(rho Delta)/(2 ln 2);
    the two agree at a stationary point. ``breakdowns`` counts starts that
    were abandoned because delta diverged.
    """

    entanglement_bits: float
    ensemble: Any
    delta: np.ndarray
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    cmi_history: list[float] = field(default_factory=list)
    converged: bool = False
    delta_bits: float = float("nan")
    residual: float = float("nan")
    seed: int = 0
    kind: str = ""
    breakdowns: int = 0
