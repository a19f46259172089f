"""stabgraph: stabilizer codes as graphs, with a canonicalizing compiler."""

from .circuits import (
    color_edges,
    depth,
    dump_text,
    synth_diagonal_logical,
    synth_encoder,
    synth_generic_logical,
    synth_sqrt_x_logical,
    transversal_h_preserves_code,
)
from .compiler import (
    Circuit,
    ZxcfDiagram,
    codes_equal,
    compile_tableau,
    count_tableaus,
    count_zxcf,
    encoder_to_zxcf,
    tableau_to_encoder,
    zxcf_check,
    zxcf_to_tableau,
)
from .core import PauliString, Scalar8, Tableau, commutes, gf2_rref, tableau_valid
from .graphcode import (
    GraphCode,
    KlForm,
    canonical_stabilizers,
    count_kl,
    degree_bounds,
    is_css,
    kl_extract,
    kl_from_tableau,
    logical_operators,
    prime_decompose,
    reduced_form,
    validate,
)
from .graphstate import ExtendedGraphState
from .stabmix import StabilizerSum

__all__ = [
    "Circuit",
    "ExtendedGraphState",
    "GraphCode",
    "KlForm",
    "PauliString",
    "Scalar8",
    "StabilizerSum",
    "Tableau",
    "ZxcfDiagram",
    "canonical_stabilizers",
    "codes_equal",
    "color_edges",
    "commutes",
    "compile_tableau",
    "count_kl",
    "count_tableaus",
    "count_zxcf",
    "degree_bounds",
    "depth",
    "dump_text",
    "encoder_to_zxcf",
    "gf2_rref",
    "is_css",
    "kl_extract",
    "kl_from_tableau",
    "logical_operators",
    "prime_decompose",
    "reduced_form",
    "synth_diagonal_logical",
    "synth_encoder",
    "synth_generic_logical",
    "synth_sqrt_x_logical",
    "tableau_to_encoder",
    "tableau_valid",
    "transversal_h_preserves_code",
    "validate",
    "zxcf_check",
    "zxcf_to_tableau",
]

__version__ = "0.1.0"
