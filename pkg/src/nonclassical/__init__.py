"""Exact open-system evolution of oscillator states and their non-classicality."""

from .errors import (
    CapacityError,
    DimensionError,
    ExtentError,
    IntegrationError,
    NonclassicalError,
    NotPSDError,
    QuadratureError,
    TruncationError,
    TruncationWarning,
    ValidationError,
    ZeroTemperatureError,
)
from .evolution import (
    PropagatorRequest,
    diagonalization,
    eigenvector_entry,
    evolve,
    inverse_entry,
    ode_oracle,
    positivity_time,
    propagate,
    zero_temperature_populations,
)
from .linalg import hermitian_eigendecomposition, matrix_sqrt_psd, purity, trace_norm
from .measures import (
    MeasureReport,
    build_rho_nu_plus,
    bures_eta,
    default_families,
    dodonov_eta,
    hillery_eta,
    measure,
    negativity_eta,
)
from .search import SearchConfig, search_over_family
from .states import (
    BathParams,
    FockDensityMatrix,
    coherent_state,
    displaced_thermal_state,
    fock_state,
    load_density_matrix,
    mixture,
    save_density_matrix,
    superposition_family,
    thermal_state,
)
from .sweep import SweepConfig, run_sweep, validate_config
from .wigner import GridSpec, negativity, negativity_report, wigner_synthesize

__version__ = "0.1.0"
