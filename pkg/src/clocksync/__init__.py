"""Clock synchronization through a dispersion-cancelling two-photon interferometer."""
from .belt import BeltConfig, infer_tau_from_M, quantity_at_M
from .counting import CountCurve, CountingConfig, sample_counts
from .engine import (
    ScanCurve,
    ScanGrid,
    amplitude_collapsed,
    amplitude_direct,
    coincidence_rate,
    coincidence_rate_gaussian,
    delta_kappa,
    scan,
)
from .estimator import EstimateReport, ErrorBudget, error_budget, locate_dip, tau_from_dip
from .model import (
    SPEED_OF_LIGHT,
    DispersionProfile,
    MediumConfig,
    ProtocolConfig,
    SpectralDensity,
    beta,
    delay_schedule,
    dip_position,
    doppler_chi,
)

__version__ = "0.1.0"
