"""Indep/Negative decomposition of entangled photon states."""

from .errors import (
    AlphabetMismatch,
    BadScale,
    ConditionImpossible,
    ConfigError,
    InvalidLabel,
    InvalidScenario,
    NegwaveError,
    NotFactorizable,
    NotUnitary,
    SpaceMismatch,
    ZeroNorm,
)
from .fockstate import (
    EQ_TOL,
    PRUNE_TOL,
    StateSpace,
    StateVector,
    approx_eq,
    build_term,
    inner,
    normalize,
    render,
    superpose,
    tensor,
)
from .negative import (
    CancellationReport,
    Decomposition,
    cancellation_report,
    conditional_erasure,
    decompose,
    is_factorizable,
    reconstruct,
)
from .scenarios import (
    Scenario,
    build_detector_atoms,
    build_hardy,
    build_rotated_pbs,
    build_scenario,
    build_single_photon_bs,
    build_sps_cascade,
    chsh_value,
    conditional_distribution,
    correlation,
    detector_map,
    outcome_distribution,
    sample,
)
from .transforms import (
    LocalUnitary,
    apply_local,
    beam_splitter_map,
    circular_linear_map,
    rotation_map,
)

__version__ = "0.1.0"
