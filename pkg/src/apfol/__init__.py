"""Analogical proportions in finite first-order structures."""

from .engine import (ProportionVerdict, Verdict, arrow_holds, ept_check, ept_full_check,
                     is_characteristic, proportion_holds)
from .enumeration import Bounds, FragmentSpec, JustificationIndex, build_index, enumerate_cformulas
from .graphs import (UndirectedGraph, WalkLengthSet, gn_proportion, gn_target_proportion,
                     gn_walk_set, path_arrow_holds, path_proportion_holds, walk_length_set)
from .kernels import BACKEND
from .numbers import e_member, e_proportion, e_type
from .structures import FiniteStructure, load_structures, parse_structures
from .syntax import Signature, format_formula, parse_formula, parse_term

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Bounds", "FiniteStructure", "FragmentSpec", "JustificationIndex",
    "ProportionVerdict", "Signature", "UndirectedGraph", "Verdict", "WalkLengthSet",
    "arrow_holds", "build_index", "e_member", "e_proportion", "e_type", "enumerate_cformulas",
    "ept_check", "ept_full_check", "format_formula", "gn_proportion", "gn_target_proportion",
    "gn_walk_set", "is_characteristic", "load_structures", "parse_formula", "parse_structures",
    "parse_term", "path_arrow_holds", "path_proportion_holds", "proportion_holds",
    "walk_length_set",
]
