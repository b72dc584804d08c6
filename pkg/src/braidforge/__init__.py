"""Extraspecial 2-group representations, unitary braid representations, GHZ
states and Yang-Baxterized evolution, with exact monomial fast paths."""
from .espgroup import GroupElement, center, commutator_subgroup, multiply, order
from .linalg import MonomialOperator, TwoBandOperator, approx_eq, kron
from .report import VerificationReport
from .reps import PhaseParams, RepSpec, SignConvention, build_mjj, verify_esp_relations

__version__ = "0.1.0"

__all__ = [
    "GroupElement", "MonomialOperator", "PhaseParams", "RepSpec", "SignConvention",
    "TwoBandOperator", "VerificationReport", "approx_eq", "build_mjj", "center",
    "commutator_subgroup", "kron", "multiply", "order", "verify_esp_relations",
]
