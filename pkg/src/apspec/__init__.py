"""Spectral triples, Connes metrics and Laplacians on aperiodic subshifts."""

from .symbolic_core import (
    FIBONACCI,
    FIBONACCI_SQUARED,
    TRIBONACCI,
    LanguageOracle,
    Substitution,
    SturmianSlope,
    complexity,
    language_of,
    parse_substitution,
    privileged,
    sturmian_oracle,
)
from .tree_structures import LengthFunction, build_tree, horizontal_edges, make_choice
from .sft_selfsimilar import build_substitution_graph, count_H_n, maximal_fundamental
from .zeta_spectral import closed_form_zeta, tree_abscissa
from .connes_metrics import order_criterion
from .laplacian_pb import assemble_form, eigensystem
from .pisot_form import pisot_data
from .khomology import pairing, realize

__version__ = "0.1.0"

__all__ = [
    "FIBONACCI", "FIBONACCI_SQUARED", "TRIBONACCI", "LanguageOracle", "Substitution", "SturmianSlope",
    "complexity", "language_of", "parse_substitution", "privileged", "sturmian_oracle",
    "LengthFunction", "build_tree", "horizontal_edges", "make_choice",
    "build_substitution_graph", "count_H_n", "maximal_fundamental",
    "closed_form_zeta", "tree_abscissa", "order_criterion",
    "assemble_form", "eigensystem", "pisot_data", "pairing", "realize",
]
