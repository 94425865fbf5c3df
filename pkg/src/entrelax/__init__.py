"""Relaxation solvers for entanglement of formation and related CMI minima."""

from .classical import classical_cmi, classical_solve
from .linalg import BipartiteDims
from .oracles import bell_mixture_eof, brute_force_classical, pure_state_eof
from .quantum import entanglement_from_delta, mixed_solve, pure_solve, quantum_cmi
from .states import bell_basis, bell_mixture, horodecki, werner
from .structures import Ensemble, SolverConfig, SolverReport

__all__ = [
    "BipartiteDims", "Ensemble", "SolverConfig", "SolverReport",
    "bell_basis", "bell_mixture", "bell_mixture_eof", "brute_force_classical",
    "classical_cmi", "classical_solve", "entanglement_from_delta", "horodecki",
    "mixed_solve", "pure_solve", "pure_state_eof", "quantum_cmi", "werner",
]
