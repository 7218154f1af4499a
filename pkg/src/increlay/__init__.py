"""Incremental relaying with imperfect one-bit feedback.

Expected number of transmission phases under a binary symmetric feedback
channel, computed analytically (closed form, explicit path tree, matrix
form) and by Monte Carlo protocol simulation, and the resulting
epsilon-outage capacity of decode-and-forward and bursty amplify-and-forward
relaying.
"""

from .capacity import (
    CapacityResult,
    Estimate,
    OutageTarget,
    baf_capacity,
    baf_log_term,
    df_capacity,
    df_log_term,
    outage_probability_empirical,
)
from .channel import (
    ChannelParams,
    FadingRealization,
    af_decode_after_relay,
    db_to_linear,
    decode_profile,
    decode_threshold,
    df_decode_after_relay,
    draw_realization,
    source_outage_prob,
)
from .errors import (
    ConsistencyError,
    DegenerateTargetError,
    DomainError,
    IncRelayError,
    SolverError,
    TopologyError,
)
from .phases import (
    DecodeProfile,
    PhaseTree,
    build_phase_tree,
    expected_phases,
    expected_phases_matrix,
    expected_phases_one_relay,
    expected_phases_tree,
    feedback_matrix,
    hadamard,
    phase_derivative_sign,
    worthless_feedback_phases,
)
from .simulation import SimConfig, SimReport, closure_check, empirical_decode_profile, run

__version__ = "0.1.0"

__all__ = [
    "CapacityResult",
    "ChannelParams",
    "ConsistencyError",
    "DecodeProfile",
    "DegenerateTargetError",
    "DomainError",
    "Estimate",
    "FadingRealization",
    "IncRelayError",
    "OutageTarget",
    "PhaseTree",
    "SimConfig",
    "SimReport",
    "SolverError",
    "TopologyError",
    "af_decode_after_relay",
    "baf_capacity",
    "baf_log_term",
    "build_phase_tree",
    "closure_check",
    "db_to_linear",
    "decode_profile",
    "decode_threshold",
    "df_capacity",
    "df_decode_after_relay",
    "df_log_term",
    "draw_realization",
    "empirical_decode_profile",
    "expected_phases",
    "expected_phases_matrix",
    "expected_phases_one_relay",
    "expected_phases_tree",
    "feedback_matrix",
    "hadamard",
    "outage_probability_empirical",
    "phase_derivative_sign",
    "run",
    "source_outage_prob",
    "worthless_feedback_phases",
]
