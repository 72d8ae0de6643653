"""Finite atom structures, network games and brute-force oracles."""

from .algebra_core import (
    Atom,
    CaAtomStructure,
    ComplexAlgebra,
    RaAtomStructure,
    check_ca_axioms,
    check_ra_axioms,
    validate_ca_atom_structure,
    validate_ra_atom_structure,
)
from .constructions import monk_ra, rainbow_finite, split_blur, split_ra, theta_embed
from .ef import FiniteStructure, complete_graph, ef_solve
from .games import EXISTS, FORALL, UNKNOWN, GameSpec, Verdict, lyndon_battery, replay_certificate, solve
from .oracle import brute_force_represent, census, enumerate_small_ra, ramsey_colouring_exists

__version__ = "0.1.0"

__all__ = [
    "EXISTS",
    "FORALL",
    "UNKNOWN",
    "Atom",
    "CaAtomStructure",
    "ComplexAlgebra",
    "FiniteStructure",
    "GameSpec",
    "RaAtomStructure",
    "Verdict",
    "brute_force_represent",
    "census",
    "check_ca_axioms",
    "check_ra_axioms",
    "complete_graph",
    "ef_solve",
    "enumerate_small_ra",
    "lyndon_battery",
    "monk_ra",
    "rainbow_finite",
    "ramsey_colouring_exists",
    "replay_certificate",
    "solve",
    "split_blur",
    "split_ra",
    "theta_embed",
    "validate_ca_atom_structure",
    "validate_ra_atom_structure",
]
