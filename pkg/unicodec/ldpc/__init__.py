from .matrix import (
    BaseGraph,
    ParityCheckMatrix,
    TannerGraph,
    creates_four_cycle,
    expand_base_graph,
    format_alist,
    gf2_rank,
    gf2_row_reduce,
    load_alist,
    load_base_graph,
    parse_alist,
    parse_base_graph,
    syndrome,
    write_alist,
    write_base_graph,
)
from .encoder import (
    AccumulatorEncoder,
    DoubleDiagonalEncoder,
    GaussianEliminationEncoder,
    LdpcEncoder,
    encode,
    select_encoder,
)
from .codes import (
    DVBS2_PROFILES,
    LdpcCode,
    RateMatcher,
    bg2_like_base_graph,
    code_from_matrix,
    dvbs2_address_table,
    dvbs2_like,
    ira_from_address_table,
    lifting_set_index,
    load_dvbs2_table,
    nr_like_bg2,
    select_lifting,
    standard_bg2,
    standard_dvbs2_table,
)
from .decoder import (
    BpConfig,
    BpDecoder,
    BpSchedule,
    BpState,
    BpVariant,
    Quantization,
    bp_plan,
    check_update,
    count_bit_errors,
    decode_bp,
    quantize_llr,
    run_bp,
)
from .sc_ldpc import (
    ChainSpec,
    CoupledChain,
    WindowConfig,
    WindowedBpDecoder,
    build_coupled_chain,
    chain_from_spec,
    decode_windowed,
    read_chain_spec,
    spread_edges,
    write_chain_spec,
)

__all__ = [
    "BaseGraph",
    "ParityCheckMatrix",
    "TannerGraph",
    "creates_four_cycle",
    "expand_base_graph",
    "format_alist",
    "gf2_rank",
    "gf2_row_reduce",
    "load_alist",
    "load_base_graph",
    "parse_alist",
    "parse_base_graph",
    "syndrome",
    "write_alist",
    "write_base_graph",
    "AccumulatorEncoder",
    "DoubleDiagonalEncoder",
    "GaussianEliminationEncoder",
    "LdpcEncoder",
    "encode",
    "select_encoder",
    "DVBS2_PROFILES",
    "LdpcCode",
    "RateMatcher",
    "bg2_like_base_graph",
    "code_from_matrix",
    "dvbs2_address_table",
    "dvbs2_like",
    "ira_from_address_table",
    "lifting_set_index",
    "load_dvbs2_table",
    "nr_like_bg2",
    "select_lifting",
    "standard_bg2",
    "standard_dvbs2_table",
    "BpConfig",
    "BpDecoder",
    "BpSchedule",
    "BpState",
    "BpVariant",
    "Quantization",
    "bp_plan",
    "check_update",
    "count_bit_errors",
    "decode_bp",
    "quantize_llr",
    "run_bp",
    "ChainSpec",
    "CoupledChain",
    "WindowConfig",
    "WindowedBpDecoder",
    "build_coupled_chain",
    "chain_from_spec",
    "decode_windowed",
    "read_chain_spec",
    "spread_edges",
    "write_chain_spec",
]
