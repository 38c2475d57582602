from .construct import (
    LengthMatch,
    PolarCodeSpec,
    ReliabilitySequence,
    apply_length_match,
    build_reliability_sequence,
    construct_aed_code,
    construct_from_sequence,
    construct_polar_code,
    density_evolution_reliabilities,
    design_ebn0_for_target,
    design_sigma_for_target,
    extract_nested,
    ga_predicted_fer,
    info_set_from_min,
    length_match_transmit,
    nr_like_polar_spec,
    partial_order_closure,
    polar_encode,
    polar_transform,
    rate_flexible_sequence,
    select_info_set,
)
from .codespec import read_codespec, write_codespec
from .sc import ScDecoder, ScNodeKind, classify_node, decode_sc, decode_ssc
from .scl import SclDecoder, decode_scl
from .aed import (
    AedDecoder,
    apply_permutation,
    block_profile,
    decode_aed,
    invert_permutation,
    sample_automorphisms,
)

__all__ = [
    "LengthMatch",
    "PolarCodeSpec",
    "ReliabilitySequence",
    "apply_length_match",
    "build_reliability_sequence",
    "construct_aed_code",
    "construct_from_sequence",
    "construct_polar_code",
    "density_evolution_reliabilities",
    "design_ebn0_for_target",
    "design_sigma_for_target",
    "extract_nested",
    "ga_predicted_fer",
    "info_set_from_min",
    "length_match_transmit",
    "nr_like_polar_spec",
    "partial_order_closure",
    "polar_encode",
    "polar_transform",
    "rate_flexible_sequence",
    "select_info_set",
    "read_codespec",
    "write_codespec",
    "ScDecoder",
    "ScNodeKind",
    "classify_node",
    "decode_sc",
    "decode_ssc",
    "SclDecoder",
    "decode_scl",
    "AedDecoder",
    "apply_permutation",
    "block_profile",
    "decode_aed",
    "invert_permutation",
    "sample_automorphisms",
]
