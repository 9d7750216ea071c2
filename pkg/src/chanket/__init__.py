"""Channel kets, their operator representations, and where information goes."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .hilbert import (
    Decomposition,
    Ket,
    Operator,
    SpaceRegistry,
    partial_trace,
    partial_transpose,
    purify,
    schmidt_decompose,
    von_neumann_entropy,
)
from .opbasis import CoefficientTensor, hermitian_basis, pauli_assemble, pauli_expand
from .channel import (
    ChannelBundle,
    LinearMap,
    apply_channel,
    channel_ket,
    kraus_decompose,
    ket_from_map,
    map_from_ket,
    mixed_env_channel,
    standard_channel,
)
from .infoloc import (
    PreProbability,
    all_info_absent,
    all_info_present,
    cq_structure,
    four_kets_residual,
    hidden_product_factorize,
    info_absent,
    info_present,
    joint_distribution,
    mutual_information,
    strongly_incompatible,
)
from .codes import (
    CodeSpec,
    builtin_code,
    code_channel_ket,
    knill_laflamme,
    operator_base,
    s_equals_2t_check,
    security,
    singleton_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
