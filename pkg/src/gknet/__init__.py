"""Common-information source decomposition and network coding feasibility.

The toolkit decomposes correlated finite sources through their Gács-Körner
common part, decides feasibility of multicast, broadcast-with-side-information
and helper-assisted delivery problems on capacitated DAGs, and demonstrates
the resulting zero-error codes end to end over a random linear network coding
transport.
"""

from .bitio import Bits
from .codec import (
    Codebook,
    EncodedBlock,
    build_codebook,
    build_prefix_code,
    decode_ak,
    decode_bsi,
    decode_multicast_block,
    encode_ak,
    encode_bsi_messages,
    encode_multicast_block,
)
from .common_info import (
    Component,
    ComponentPartition,
    SourceDecomposition,
    SupportGraph,
    check_nesting,
    class_of,
    decompose,
    decompose_source,
    gk_entropy,
    refinement_index,
    refinement_table,
    support_graph,
)
from .errors import (
    BindingError,
    DecodeError,
    DeliveryError,
    GknetError,
    InvalidInputError,
    NestingError,
    NotInSupportError,
    UnknownVariableError,
)
from .feasibility import (
    FeasibilityReport,
    Message,
    MessagePlan,
    check_ak,
    check_bsi,
    check_corollary_optimality,
    check_dmb_support,
    check_multicast,
    check_separation,
    check_separation_l,
    plan_degraded_messages,
)
from .netgraph import (
    CutValue,
    Edge,
    Network,
    capacity_function,
    delayed_network,
    expand_with_latent_sources,
    independent_multicast_feasible,
    load_network,
    min_cut,
    rho,
)
from .probability import (
    JointPmf,
    SymbolSequence,
    binary_entropy,
    conditional_entropy,
    entropy,
    is_markov_chain,
    is_strongly_typical,
    load_pmf,
    mutual_information,
    sample_iid,
)
from .rlnc import (
    GenerationDecode,
    Packet,
    Session,
    decode_generation,
    deliver_multicast,
    packetize,
    run_session,
)

__version__ = "0.1.0"
