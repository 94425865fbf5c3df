"""Dense Hermitian linear algebra used by the quantum solvers.

Matrices are plain complex ``numpy`` arrays. Most helpers accept a stack of
matrices with shape ``(..., d, d)``; the public single-matrix functions
validate their input and raise the errors defined here.

Entropies and relative entropies are returned in bits. Matrix logarithms are
natural logarithms.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

HERMITIAN_ATOL = 1e-12
DEFAULT_EPS = 1e-12
# -ln of the Δ-update argument clamps eigenvalues here to stay finite.
LOG_CLAMP = 1e-300


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class NotDensityMatrixError(ValueError):
    pass


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class BipartiteDims(NamedTuple):
    nx: int
    ny: int

    @property
    def d(self) -> int:
        return self.nx * self.ny


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def check_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    err = np.max(np.abs(m - dagger(m)))
    if err > atol:
        raise NotHermitianError(f"matrix is not Hermitian (max |m - m^dagger| = {err:.3e})")
    return m


def _eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(hermitize(m))


def eig_hermitian(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = check_hermitian(m)
    lam, u = _eigh(m)
    return Spectrum(lam, u)


def from_spectrum(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Rebuild ``U diag(lam) U^dagger`` for one matrix or a stack."""
    return hermitize((u * lam[..., None, :]) @ dagger(u))


def _kernel_mask(lam: np.ndarray, eps: float) -> np.ndarray:
    lam_max = np.max(lam, axis=-1, keepdims=True)
    return lam <= eps * np.maximum(lam_max, 0.0)


def support_kernel_projectors(m, eps: float = DEFAULT_EPS) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the support and kernel of a PSD matrix.

    An eigenvalue counts as kernel when it is at most ``eps * lambda_max``.
    The zero matrix is all kernel.

    Returns
    -------
    (pi_supp, pi_ker)
    """
    m = check_hermitian(m)
    lam, u = _eigh(m)
    lam_max = max(lam[-1], 0.0)
    if lam[0] < -eps * lam_max:
        raise NotPSDError(f"matrix has eigenvalue {lam[0]:.3e} below -eps*lambda_max")
    ker = _kernel_mask(lam, eps)
    uk = u[:, ker]
    pi_ker = hermitize(uk @ dagger(uk))
    pi_supp = np.eye(m.shape[0]) - pi_ker
    return pi_supp, pi_ker


def _check_dims(m: np.ndarray, dims) -> BipartiteDims:
    dims = BipartiteDims(*dims)
    if m.shape[-1] != dims.nx * dims.ny or m.shape[-2] != m.shape[-1]:
        raise DimensionError(f"matrix of shape {m.shape[-2:]} does not match dims {tuple(dims)}")
    return dims


def ptrace_y(m: np.ndarray, dims) -> np.ndarray:
    """Trace out the y factor; works on stacks, no validation."""
    nx, ny = dims
    t = m.reshape(m.shape[:-2] + (nx, ny, nx, ny))
    return np.einsum("...ajbj->...ab", t)


def ptrace_x(m: np.ndarray, dims) -> np.ndarray:
    """Trace out the x factor; works on stacks, no validation."""
    nx, ny = dims
    t = m.reshape(m.shape[:-2] + (nx, ny, nx, ny))
    return np.einsum("...iaib->...ab", t)


def partial_trace_x(m, dims) -> np.ndarray:
    """Reduced matrix on H_y (x traced out)."""
    m = check_hermitian(m)
    dims = _check_dims(m, dims)
    return hermitize(ptrace_x(m, dims))


def partial_trace_y(m, dims) -> np.ndarray:
    """Reduced matrix on H_x (y traced out)."""
    m = check_hermitian(m)
    dims = _check_dims(m, dims)
    return hermitize(ptrace_y(m, dims))


def batch_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product over the last two axes of two stacks."""
    n, m = a.shape[-1], b.shape[-1]
    out = np.einsum("...ac,...bd->...abcd", a, b)
    return out.reshape(out.shape[:-4] + (n * m, n * m))


def entropy_bits(p: np.ndarray) -> float:
    """Shannon entropy in bits of a non-negative vector; 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho, tol: float = 1e-8) -> float:
    """Von Neumann entropy ``-tr rho log2 rho`` of a density matrix."""
    rho = check_hermitian(rho)
    lam = np.linalg.eigvalsh(hermitize(rho))
    if abs(np.sum(lam) - 1.0) > tol or lam[0] < -tol:
        raise NotDensityMatrixError("von_neumann_entropy needs a PSD matrix with unit trace")
    return max(entropy_bits(lam), 0.0)


def quantum_kl(rho, rho2, eps: float = DEFAULT_EPS) -> float:
    """Quantum relative entropy ``D(rho // rho2)`` in bits.

    Returns ``inf`` when rho has weight outside the support of rho2.
    """
    rho = check_hermitian(rho)
    rho2 = check_hermitian(rho2)
    if rho.shape != rho2.shape:
        raise DimensionError("quantum_kl arguments differ in shape")
    lam, u = _eigh(rho)
    mu, v = _eigh(rho2)
    lam = np.clip(lam, 0.0, None)
    overlap = np.abs(dagger(u) @ v) ** 2
    ker = _kernel_mask(mu, eps)
    mass_on_kernel = float(lam @ overlap[:, ker].sum(axis=1))
    if mass_on_kernel > eps * max(lam.max(), 1.0) * 10:
        return np.inf
    pos = lam > 0
    first = float(np.sum(lam[pos] * np.log2(lam[pos])))
    log_mu = np.zeros_like(mu)
    log_mu[~ker] = np.log2(mu[~ker])
    second = float(lam @ overlap @ log_mu)
    return first - second


def log_on_support(m: np.ndarray, eps: float = DEFAULT_EPS) -> tuple[np.ndarray, np.ndarray]:
    """Natural log of a PSD matrix (or stack) restricted to its support.

    Returns ``(log_m, pi_supp)``; kernel directions get 0 in ``log_m``.
    """
    lam, u = _eigh(m)
    ker = _kernel_mask(lam, eps)
    safe = np.where(ker, 1.0, lam)
    loglam = np.where(ker, 0.0, np.log(safe))
    supp = (~ker).astype(float)
    return from_spectrum(loglam, u), from_spectrum(supp, u)


def inv_sqrt_on_support(rho, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``pi_1 rho^{-1/2} pi_1``: inverse square root with the kernel mapped to 0."""
    rho = check_hermitian(rho)
    lam, u = _eigh(rho)
    lam_max = max(lam[-1], 0.0)
    if lam[0] < -eps * lam_max:
        raise NotPSDError(f"matrix has eigenvalue {lam[0]:.3e} below -eps*lambda_max")
    ker = _kernel_mask(lam, eps)
    inv = np.where(ker, 0.0, 1.0 / np.sqrt(np.where(ker, 1.0, lam)))
    return from_spectrum(inv, u)


def expm_hermitian(m: np.ndarray) -> np.ndarray:
    lam, u = _eigh(m)
    return from_spectrum(np.exp(lam), u)


def neg_log_hermitian(m: np.ndarray, clamp: float = LOG_CLAMP) -> np.ndarray:
    """``-ln m`` for a Hermitian matrix; eigenvalues below ``clamp`` are raised to it."""
    lam, u = _eigh(m)
    return from_spectrum(-np.log(np.maximum(lam, clamp)), u)


def _log_with_sentinel(r: np.ndarray, delta: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """``ln r + delta`` with kernel logs replaced by a large negative number.

    The sentinel sits 50 nats plus twice the size of delta below the smallest
    support log, so kernel directions contribute below e^-50 relative.
    """
    lam, u = _eigh(r)
    ker = _kernel_mask(lam, eps)
    safe = np.where(ker, 1.0, lam)
    loglam = np.log(safe)
    big = np.where(ker, np.inf, loglam)
    min_log = np.min(big, axis=-1, keepdims=True)
    min_log = np.where(np.isfinite(min_log), min_log, 0.0)
    dnorm = np.max(np.abs(delta).sum(axis=-1), axis=-1)
    sentinel = min_log - 50.0 - 2.0 * dnorm[..., None]
    loglam = np.where(ker, sentinel, loglam)
    return from_spectrum(loglam, u) + delta, np.all(ker, axis=-1)


def _compress(m: np.ndarray, pi1: np.ndarray) -> np.ndarray:
    """``pi1 m pi1`` with the complement of pi1 pushed to a sentinel far below."""
    d = m.shape[-1]
    pi0 = np.eye(d) - pi1
    low = np.min(np.linalg.eigvalsh(hermitize(m)), axis=-1) - 50.0
    return hermitize(pi1 @ m @ pi1) + low[..., None, None] * pi0


def pade_exp_neg(a: np.ndarray) -> np.ndarray:
    """``exp(-a)`` for a PSD matrix (or stack) without an eigendecomposition.

    Delegates to :func:`scipy.linalg.expm`, a Padé approximant with scaling
    and squaring.
    """
    a = hermitize(np.asarray(a, dtype=complex))
    return hermitize(expm(-a))


def exp_logsum_batch(r: np.ndarray, delta: np.ndarray, pi1: np.ndarray,
                     eps: float = DEFAULT_EPS, method: str = "eig",
                     compress: bool = False) -> np.ndarray:
    """Stacked ``pi1 exp(ln r + delta) pi1``; see :func:`exp_logsum`."""
    m, all_kernel = _log_with_sentinel(r, delta, eps)
    if compress and not np.allclose(pi1, np.eye(pi1.shape[-1]), atol=1e-14):
        m = _compress(m, pi1)
    if method == "eig":
        lam, u = _eigh(m)
        out = from_spectrum(np.exp(lam), u)
    elif method == "pade":
        # shift so that -(m - top) is PSD, then exp(m) = e^top exp(-(top - m))
        top = np.max(np.linalg.eigvalsh(hermitize(m)), axis=-1)
        d = m.shape[-1]
        a = top[..., None, None] * np.eye(d) - m
        out = np.exp(top)[..., None, None] * pade_exp_neg(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.where(all_kernel[..., None, None], 0.0, out)
    return hermitize(pi1 @ out @ pi1)


def exp_logsum(r, delta, pi1=None, eps: float = DEFAULT_EPS, method: str = "eig") -> np.ndarray:
    """Compute ``pi1 exp(ln r + delta) pi1`` for PSD, possibly singular ``r``.

    Directions in the kernel of ``r`` (relative threshold ``eps``) contribute
    nothing: their logarithm is replaced by a sentinel far below every support
    eigenvalue. ``method="eig"`` exponentiates through an eigendecomposition of
    ``ln r + delta``; ``method="pade"`` uses :func:`pade_exp_neg` on the
    shifted, negated matrix instead.
    """
    r = check_hermitian(r)
    delta = check_hermitian(delta)
    if r.shape != delta.shape:
        raise DimensionError("r and delta differ in shape")
    if pi1 is None:
        pi1 = np.eye(r.shape[0])
    return exp_logsum_batch(r, delta, np.asarray(pi1, dtype=complex), eps, method)
