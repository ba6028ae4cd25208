"""Finite chains of partial structures and their fulfillment relation."""

__version__ = "0.1.0"

from .arithmetic import check_q, lnp, make_sq_models, pa_pf, prime_code_psi, q_axioms
from .collapse import col_bound, f_collapse, verify_collapse
from .fulfillment import LnModel, Verdict, fulfills, least_term_index
from .logic import ARITHMETIC, Signature, depth, length, parse_formula, render_formula
from .ramsey import (
    ChainColoring,
    TupleColoring,
    completeness_probe,
    enumerate_ln_models,
    find_homog_subseq,
    find_homogeneous,
    is_bounded_coloring,
    pair_coloring,
    ph_number,
)
from .structures import PartialStructure, Segment, is_substructure

__all__ = [
    "ARITHMETIC",
    "ChainColoring",
    "LnModel",
    "PartialStructure",
    "Segment",
    "Signature",
    "TupleColoring",
    "Verdict",
    "check_q",
    "col_bound",
    "completeness_probe",
    "depth",
    "enumerate_ln_models",
    "f_collapse",
    "find_homog_subseq",
    "find_homogeneous",
    "fulfills",
    "is_bounded_coloring",
    "is_substructure",
    "least_term_index",
    "length",
    "lnp",
    "make_sq_models",
    "pa_pf",
    "pair_coloring",
    "parse_formula",
    "ph_number",
    "prime_code_psi",
    "q_axioms",
    "render_formula",
    "verify_collapse",
]
