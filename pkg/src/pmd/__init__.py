"""Decomposition of finite persistence modules over prime fields."""

from .decomp import Certificate, Decomposition, decompose, fitting_split, krs_match
from .errors import CounterexampleFound, InputError, PmdError
from .homspace import are_isomorphic, end_basis, hom_basis, retraction
from .ingest import (GeneratorSpec, SampledFunction, interlevel_h0, random_module,
                     sublevel_h0)
from .io import parse_module, serialize_module
from .linalg import FieldSpec
from .module import (Morphism, PersistenceModule, direct_sum, dualize,
                     interval_module, make_module, restrict, validate)
from .poset import (FinitePoset, ZigzagPath, build_poset, chain, classify_block,
                    grid, is_interval, triangle_region, zigzag_fence)
from .structure import (Barcode, BlockList, barcode_chain, block_decompose,
                        check_middle_exact, extend_zigzag, verify_triangle_blocks,
                        zigzag_barcode)
from .svg import render_svg

__version__ = "0.1.0"

__all__ = [
    "Barcode", "BlockList", "Certificate", "CounterexampleFound", "Decomposition",
    "FieldSpec", "FinitePoset", "GeneratorSpec", "InputError", "Morphism",
    "PersistenceModule", "PmdError", "SampledFunction", "ZigzagPath",
    "are_isomorphic", "barcode_chain", "block_decompose", "build_poset", "chain",
    "check_middle_exact", "classify_block", "decompose", "direct_sum", "dualize",
    "end_basis", "extend_zigzag", "fitting_split", "grid", "hom_basis",
    "interlevel_h0", "interval_module", "is_interval", "krs_match", "make_module",
    "parse_module", "random_module", "render_svg", "restrict", "retraction",
    "serialize_module", "sublevel_h0", "triangle_region", "validate",
    "verify_triangle_blocks", "zigzag_barcode", "zigzag_fence",
]
