"""bellsieve: two-photon linear-optics simulation in which the pump beam's
transverse parity controls Hong-Ou-Mandel interference, enabling Bell-state
analysis in the coincidence basis."""

from .analysis import (
    DEFAULT_SIGMA_L,
    Detector,
    DetectorLayout,
    DiscriminationReport,
    OverlapModel,
    SignatureTable,
    classify,
    coincidence_basis_only,
    coincidence_probability,
    event_distribution,
    hom_scan,
    hom_visibility,
    layout_from_json,
    layout_to_json,
    oracle_apply,
    oracle_check,
    prepare_inputs,
    signature_table,
    single_photon_unitary,
    success_probability,
)
from .hgmodes import (
    DEFAULT_WAIST,
    PHOTON_WAVELENGTH,
    PUMP_WAVELENGTH,
    DetectorPoint,
    HGMode,
    PumpProfile,
    coincidence_amplitude,
    gaussian_pump,
    hg01_pump,
    hg_field,
    hg_pump,
    hermite_poly,
    y_parity,
)
from .optics import (
    BeamSplitter,
    Circuit,
    CircuitSchemaError,
    Delay,
    Mirror,
    PolarizingBS,
    WavePlate,
    circuit_from_json,
    circuit_to_json,
    load_circuit,
    run_circuit,
    save_circuit,
    waveplate_jones,
)
from .twophoton import (
    ANTIDIAG,
    BELL_KINDS,
    DIAG,
    EVEN,
    H,
    ODD,
    V,
    PhotonMode,
    TwoPhotonState,
    attach_pump_parity,
    apply_y_reflection,
    bell_state,
    equal_up_to_global_phase,
    hyper_state,
    inner_product,
    make_state,
    overlap,
    pol_pair_probs,
    rebase_all,
    rebase_path,
    state_from_json,
    state_to_json,
)

__version__ = "0.1.0"
