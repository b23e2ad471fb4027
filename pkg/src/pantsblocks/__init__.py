"""Pants decompositions, their elementary moves, and pants-block
decompositions of surface bundles over the interval."""

from .core_model import PantsError, Slope, SupportId, SurfaceType, slope_intersection
from .move_calculus import MoveLetter, MoveWord, free_reduce, matches_relation, parse_word, pmove_rules
from .block_builder import BlockDecomposition, build_from_moves, collapse, is_isomorphic
from .pgraph_pcomplex import PComplex, PGraph, pcomplex_from_blocks, blocks_from_pcomplex
from .reeb_cerf import CerfDiagram, ReebComplexModel, simplify_to_pcomplex, word_from_cerf
from .search_engine import PMoveSequence, connect, replay

__version__ = "0.1.0"

__all__ = [
    "PantsError", "Slope", "SupportId", "SurfaceType", "slope_intersection",
    "MoveLetter", "MoveWord", "free_reduce", "matches_relation", "parse_word", "pmove_rules",
    "BlockDecomposition", "build_from_moves", "collapse", "is_isomorphic",
    "PComplex", "PGraph", "pcomplex_from_blocks", "blocks_from_pcomplex",
    "CerfDiagram", "ReebComplexModel", "simplify_to_pcomplex", "word_from_cerf",
    "PMoveSequence", "connect", "replay",
]
