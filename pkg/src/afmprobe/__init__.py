"""Transmon-probe observables for magnons in bipartite antiferromagnets.

Analytic pipeline (spin-wave model -> Bogoliubov squeezing -> entanglement
measures -> cavity-mediated magnon-transmon coupling -> Rabi observables)
cross-validated against a truncated-Fock-space exact-diagonalisation oracle.
"""

__version__ = "0.1.0"

from .bogoliubov import SqueezeParams, bogoliubov_rotate, squeeze_params
from .entanglement import (
    EntanglementReport,
    SchmidtSpectrum,
    entanglement_entropy,
    epr_function,
    ground_state_entropy_closed_form,
    schmidt_coefficients,
)
from .errors import (
    BranchError,
    ConfigError,
    InstabilityError,
    NormalizationError,
    ProbeError,
    ResonanceError,
    TruncationError,
)
from .hybrid import (
    DressedParams,
    HybridParams,
    RabiObservables,
    TransmonParams,
    couplings,
    effective_qubit,
    invert_rabi,
    rabi_frequency_zero_detuning,
    rabi_probability,
    schrieffer_wolff,
    transmon_spectrum,
)
from .model import (
    CUBIC,
    MU_B_MEV_PER_T,
    SQUARE,
    KittelModes,
    LatticeKind,
    LatticeSpec,
    MagnonDispersion,
    ModelParams,
    diagonal_frequencies,
    kittel_parameters,
    kpath,
    structure_factor,
)
