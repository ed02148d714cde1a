"""Information and wave-theoretic limits of frequency-flat analog beamforming."""

from .closed_form import (
    endfire_rate,
    endfire_solution,
    flat_rate,
    flat_solution,
    max_bandwidth,
    max_flat_gain,
    optimal_bandwidth,
)
from .errors import (
    AnalogBFError,
    DivergentGainError,
    InfeasibleError,
    InvalidArgumentError,
    NonConvergenceError,
    UnsupportedRegimeError,
)
from .geometry import (
    ArrayGeometry,
    Direction,
    angular_spectrum_finite,
    matched_beamformer,
    radiation_intensity,
    steering_vector,
    uca_geometry,
    ula_geometry,
)
from .optimizer import (
    OptimizationResult,
    Scenario,
    achievable_rate,
    alternating_optimize,
    kkt_residual,
    optimal_g_given_s0,
    waterfill_s0,
)
from .power import (
    radiated_power_asymptotic,
    radiated_power_exact,
    radiated_power_omega_form,
    sphere_average_intensity,
)
from .spectra import AngularSpectrum, SampledSpectrum
from .synthesis import SynthesisReport, finite_n_report, synthesize_flat_beamformer

__version__ = "0.1.0"
