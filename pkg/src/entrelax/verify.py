"""Self-check suites behind ``entrelax verify``."""

from __future__ import annotations

import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classical as cl
from . import quantum as qu
from .checks import (classical_decomposition, diagonal_embedding_gap, quantum_decomposition,
                     random_ensemble, random_joint)
from .linalg import BipartiteDims, hermitize, ptrace_y, quantum_kl, von_neumann_entropy
from .oracles import bell_mixture_eof, brute_force_classical
from .statefile import StateFileError, read_state_file, write_state_file
from .states import random_density_matrix, random_pure_state, werner, werner_weights
from .structures import SolverConfig


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def parse_dims(text: str) -> list[BipartiteDims]:
    out = []
    for tok in text.split(","):
        nx, ny = tok.lower().split("x")
        out.append(BipartiteDims(int(nx), int(ny)))
    return out


def suite_parse(state: str | None) -> SuiteResult:
    if state is not None:
        try:
            read_state_file(state)
        except StateFileError as exc:
            return SuiteResult("parse", 0, 1, f"invariant '{exc.invariant}' violated: {exc}")
        return SuiteResult("parse", 1, 1)
    passed = 0
    with tempfile.TemporaryDirectory() as tmp:
        good = Path(tmp) / "w.txt"
        write_state_file(good, werner(0.7), (2, 2))
        rho, _ = read_state_file(good)
        passed += int(np.array_equal(rho, werner(0.7)))
        bad = Path(tmp) / "bad.txt"
        lines = good.read_text().splitlines()
        lines[1] = "0.9 0.0"
        bad.write_text("\n".join(lines) + "\n")
        try:
            read_state_file(bad)
        except StateFileError as exc:
            passed += int(exc.invariant == "unit trace")
    return SuiteResult("parse", passed, 2)


def suite_kl(rng, sizes, cases: int) -> SuiteResult:
    passed = total = 0
    for _ in range(cases):
        p, q = rng.dirichlet(np.ones(6)), rng.dirichlet(np.ones(6))
        total += 1
        passed += cl.classical_kl(p, q) >= -1e-12
        for dims in sizes:
            a, b = random_density_matrix(dims.d, rng), random_density_matrix(dims.d, rng)
            total += 1
            passed += quantum_kl(a, b) >= -1e-10
    return SuiteResult("kl-nonnegativity", passed, total)


def suite_lagrangian(rng, sizes, cases: int) -> SuiteResult:
    passed = total = 0
    for _ in range(cases):
        lhs, rhs = classical_decomposition(random_joint((2, 3, 3), rng), random_joint((2, 3, 3), rng))
        total += 1
        passed += abs(lhs - rhs) <= 1e-8
        for dims in sizes:
            lhs, rhs = quantum_decomposition(random_ensemble(dims, 3, rng), random_ensemble(dims, 3, rng))
            total += 1
            passed += abs(lhs - rhs) <= 1e-8
    return SuiteResult("lagrangian-decomposition", passed, total)


def suite_diagonal(rng, cases: int) -> SuiteResult:
    gaps = [diagonal_embedding_gap(cl.initial_joint(rng.dirichlet(np.ones(4)).reshape(2, 2), 3, rng), 50)
            for _ in range(cases)]
    ok = sum(g <= 1e-8 for g in gaps)
    return SuiteResult("diagonal-embedding", ok, cases, f"max gap {max(gaps):.2e}")


def suite_classical_oracle(rng, seed: int, cases: int) -> SuiteResult:
    passed = 0
    worst = 0.0
    for i in range(cases):
        t = rng.dirichlet(np.ones(4)).reshape(2, 2)
        rep = cl.classical_solve(t, 2, SolverConfig(restarts=4, seed=seed + i))
        ref = brute_force_classical(t, 2, seed=seed + i)
        gap = abs(rep.entanglement_bits - ref)
        worst = max(worst, gap)
        passed += gap <= 1e-3
    return SuiteResult("classical-oracle", passed, cases, f"max gap {worst:.2e}")


def suite_werner_oracle(seed: int) -> SuiteResult:
    passed = 0
    fs = (0.6, 0.8, 1.0)
    for f in fs:
        rep = qu.pure_solve(werner(f), (2, 2), 6, SolverConfig(seed=seed))
        passed += abs(rep.entanglement_bits - bell_mixture_eof(werner_weights(f))) <= 5e-3
    return SuiteResult("werner-oracle", passed, len(fs))


def suite_pure_states(rng, sizes, seed: int) -> SuiteResult:
    passed = total = 0
    for dims in sizes:
        psi = random_pure_state(dims.d, rng)
        rho = np.outer(psi, psi.conj())
        expect = von_neumann_entropy(hermitize(ptrace_y(rho, dims)))
        for solve in (qu.pure_solve, qu.mixed_solve):
            rep = solve(rho, dims, 4, SolverConfig(seed=seed, max_iter=500))
            total += 1
            passed += abs(rep.entanglement_bits - expect) <= 1e-4
    return SuiteResult("pure-states", passed, total)


def run_all(seed: int = 0, sizes: str = "2x2,2x3", state: str | None = None,
            cases: int = 10) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    dims = parse_dims(sizes)
    return [
        suite_parse(state),
        suite_kl(rng, dims, cases),
        suite_lagrangian(rng, dims, cases),
        suite_diagonal(rng, min(cases, 5)),
        suite_classical_oracle(rng, seed, min(cases, 5)),
        suite_werner_oracle(seed),
        suite_pure_states(rng, dims, seed),
    ]
