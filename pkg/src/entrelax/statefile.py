"""Plain-text density-matrix files.

Line 1 holds ``nx ny``; then come ``(nx*ny)**2`` lines ``re im`` giving the
matrix row-major in the lexicographic ``|xy>`` basis. Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .linalg import BipartiteDims

STATE_ATOL = 1e-8


class StateFileError(ValueError):
    """A state file failed to parse; ``invariant`` names the broken rule."""

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"state file violates '{invariant}': {detail}")
        self.invariant = invariant


def parse_state_text(text: str) -> tuple[np.ndarray, BipartiteDims]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise StateFileError("header", "file is empty")
    try:
        nx, ny = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise StateFileError("header", f"expected 'nx ny', got {lines[0]!r}") from None
    if nx < 1 or ny < 1:
        raise StateFileError("header", f"dimensions must be positive, got {nx} {ny}")
    d = nx * ny
    body = lines[1:]
    if len(body) != d * d:
        raise StateFileError("entry count", f"expected {d * d} entries, found {len(body)}")
    try:
        vals = np.array([[float(tok) for tok in ln.split()] for ln in body])
    except ValueError as exc:
        raise StateFileError("numeric entries", str(exc)) from None
    if vals.shape != (d * d, 2):
        raise StateFileError("numeric entries", "each entry line must hold exactly 're im'")
    rho = (vals[:, 0] + 1j * vals[:, 1]).reshape(d, d)
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > STATE_ATOL:
        raise StateFileError("Hermitian", f"max |rho - rho^dagger| = {herm:.3e}")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > STATE_ATOL:
        raise StateFileError("unit trace", f"trace is {tr!r}")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -STATE_ATOL:
        raise StateFileError("positive semidefinite", f"smallest eigenvalue is {lam_min:.3e}")
    return rho, BipartiteDims(nx, ny)


def read_state_file(path) -> tuple[np.ndarray, BipartiteDims]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateFileError("readable file", str(exc)) from None
    return parse_state_text(text)


def format_state(rho, dims) -> str:
    dims = BipartiteDims(*dims)
    rho = np.asarray(rho, dtype=complex)
    out = [f"{dims.nx} {dims.ny}"]
    out += [f"{float(z.real)!r} {float(z.imag)!r}" for z in rho.reshape(-1)]
    return "\n".join(out) + "\n"


def write_state_file(path, rho, dims) -> None:
    Path(path).write_text(format_state(rho, dims))
