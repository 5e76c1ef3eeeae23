"""Four-photon orbital-angular-momentum entanglement: simulation and analysis."""

from .correlations import (
    DEFAULT_NOISE,
    CountRecord,
    NoiseModel,
    PowerScanConfig,
    apply_noise,
    background_state,
    joint_probability,
    power_scan,
    probability_table,
    simulate_count_records,
    simulate_counts,
)
from .crystal import walkoff_report
from .fock import FockState, ModeBasis, ModeLabel
from .modes import MubBasis, PostSelectionResult, dicke_state, mub_projector, split_to_detectors
from .pipeline import ideal_detector_state, run_pipeline, simulate_detected_state
from .spdc import SpdcParams, apply_hamiltonian, expand_vacuum, four_photon_state
from .tomography import (
    MleOptions,
    MleResult,
    TomographyDataset,
    fidelity,
    full_mub_settings,
    purity,
    reconstruct_mle,
)
from .witnesses import (
    WitnessReport,
    collective_spin_witness,
    fidelity_witness_dicke,
    i24_witness,
    local_unitary,
    optimize_witness,
)

__version__ = "0.1.0"
