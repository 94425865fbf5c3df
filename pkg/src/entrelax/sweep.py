"""Parameter sweeps over the Werner and Horodecki families, written as CSV."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import classical as cl
from . import quantum as qu
from .oracles import bell_mixture_eof
from .states import horodecki, werner, werner_weights
from .structures import SolverConfig

CSV_HEADER = ["param", "E_pure", "E_mixed", "E_oracle", "iters_pure", "iters_mixed", "converged"]
FAMILIES = {
    "werner": (werner, (2, 2), 6, (0.5, 1.0, 0.05)),
    "horodecki": (horodecki, (3, 3), 12, (2.0, 5.0, 0.25)),
}
MODES = ("both", "pure", "mixed", "classical-diag")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep. ``mode="classical-diag"`` solves the classical problem on
    the diagonal of rho and reports it in the E_mixed / iters_mixed columns."""

    family: str
    start: float
    stop: float
    step: float
    nalpha: int
    mode: str = "both"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {sorted(FAMILIES)}, got {self.family!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.start <= self.stop:
            raise ValueError("sweep needs from <= to")
        if not self.step > 0:
            raise ValueError("sweep step must be positive")
        if self.nalpha < 1:
            raise ValueError("nalpha must be at least 1")

    @classmethod
    def default(cls, family: str, mode: str = "both") -> "SweepSpec":
        _, _, nalpha, (a, b, h) = FAMILIES[family]
        return cls(family, a, b, h, nalpha, mode)

    def grid(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(n)]


def point_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".10f")


def run_point(spec: SweepSpec, param: float, cfg: SolverConfig) -> dict:
    build, dims, _, _ = FAMILIES[spec.family]
    rho = build(param)
    row = {"param": param, "E_pure": None, "E_mixed": None, "E_oracle": None,
           "iters_pure": None, "iters_mixed": None}
    flags = []
    if spec.mode in ("both", "pure"):
        rep = qu.pure_solve(rho, dims, spec.nalpha, cfg)
        row["E_pure"], row["iters_pure"] = rep.entanglement_bits, rep.iterations
        flags.append(rep.converged)
    if spec.mode in ("both", "mixed"):
        rep = qu.mixed_solve(rho, dims, spec.nalpha, cfg)
        row["E_mixed"], row["iters_mixed"] = rep.entanglement_bits, rep.iterations
        flags.append(rep.converged)
    if spec.mode == "classical-diag":
        target = np.real(np.diag(rho)).reshape(dims)
        rep = cl.classical_solve(target / target.sum(), spec.nalpha, cfg)
        row["E_mixed"], row["iters_mixed"] = rep.entanglement_bits, rep.iterations
        flags.append(rep.converged)
    if spec.family == "werner":
        row["E_oracle"] = bell_mixture_eof(werner_weights(param))
    row["converged"] = all(flags)
    return row


def _run_indexed(args) -> dict:
    spec, index, param, cfg = args
    return run_point(spec, param, replace(cfg, seed=point_seed(cfg.seed, index)))


def run_sweep(spec: SweepSpec, cfg: SolverConfig | None = None, workers: int = 1) -> list[dict]:
    """Solve every grid point; rows come back in grid order.

    Each point's seed is derived from ``(cfg.seed, grid index)``, so the rows
    do not depend on ``workers``.
    """
    cfg = cfg or SolverConfig()
    jobs = [(spec, i, p, cfg) for i, p in enumerate(spec.grid())]
    if workers <= 1:
        return [_run_indexed(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_indexed, jobs))


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


def read_csv_rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
