"""Entanglement transfer from a correlated two-mode drive to two remote qubits."""

from .channel import MomentMatrix, check_uncertainty, is_gaussian_entangled
from .dynamics import Trajectory, basis_state, evolve_expm, evolve_rk, linearized_entropy, negativity
from .liouvillian import DissipatorSpec, assemble_superoperator, build_kossakowski
from .steady import c_ss_closed_form, c_ss_continued, c_ss_numeric, steady_state

__version__ = "0.1.0"

__all__ = [
    "DissipatorSpec",
    "MomentMatrix",
    "Trajectory",
    "assemble_superoperator",
    "basis_state",
    "build_kossakowski",
    "c_ss_closed_form",
    "c_ss_continued",
    "c_ss_numeric",
    "check_uncertainty",
    "evolve_expm",
    "evolve_rk",
    "is_gaussian_entangled",
    "linearized_entropy",
    "negativity",
    "steady_state",
]
