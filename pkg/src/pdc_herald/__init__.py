"""Heralded single photons from parametric down-conversion sources.

Heralding probabilities, heralded-state photon statistics and single-photon
fidelities for twin-beam sources read out by binary or photon-number-resolving
detectors, in the single-mode and spectrally multimode regimes, plus the
arithmetic of switched multi-source arrays.
"""

from .detector_povm import (
    CoefficientSeries,
    DetectorModel,
    binary_coeffs,
    completeness_defect,
    custom_coeffs,
    pnr_coeffs,
)
from .errors import (
    BudgetExceeded,
    DegenerateHerald,
    GridPointError,
    Infeasible,
    ModeTailTooHeavy,
    PDCError,
    TruncationCapExceeded,
    Unreachable,
    UnsupportedFamily,
)
from .fock_core import (
    PhotonDistribution,
    SqueezeParam,
    TruncationPolicy,
    adaptive_cutoff,
    mean_photon_number,
    pair_parameter,
    squeezing_db,
    squeezing_from_pair_parameter,
    thermal_distribution,
)
from .herald_multimode import (
    ModeDistribution,
    MultimodeHeraldReport,
    build_modes,
    complete_homogeneous,
    modes_from_pair_parameters,
    mu_from_schmidt,
    multimode_frontier,
    multimode_herald,
    schmidt_number,
    total_photon_distribution,
)
from .herald_single_mode import (
    FrontierPoint,
    HeraldReport,
    Optimum,
    closed_form_report,
    evaluate,
    frontier,
    heralded_state,
    heralding_probability,
    optimal_r,
    single_photon_fidelity,
)
from .multiplex import SwitchedSetup, sources_needed, switched_probability

__version__ = "0.1.0"
