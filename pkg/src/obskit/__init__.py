"""Spectral observability toolkit.

Encodes first-order evolution systems ż = iAz with observation y = Cz by
their spectral data (eigenvalue list, observation Gram matrix) and verifies
at desk scale the statements connecting them: frequency identities,
resolvent inequalities, cluster coercivity certificates and their
transforms, weak observability inequalities with explicit constants, and
the boundary-observed square model where every Gram entry is closed-form.
"""

from ._version import __version__
from .coercivity import (
    CertificatePipeline,
    ClusterReport,
    CoercivityCertificate,
    CoercivityViolation,
    ResolventReport,
    cluster_min_coercivity,
    coercivity_scan,
    default_lambda_grid,
    enumerate_cluster,
    estimate_admissibility,
    fit_psi_envelope,
    resolvent_check,
    scan_certificate,
    shifted_power_law,
    spectral_coercivity_violation_search,
    weak_to_spectral,
)
from .config import RunConfig, apply_overrides, default_config, load_config, system_of
from .decay import Constant, DecayFunction, Exponential, PowerLaw, TransformedWidth
from .errors import (
    CoercivityError,
    ConfigError,
    DomainError,
    NumericError,
    ShapeError,
)
from .evolution import (
    ObservabilityReport,
    admissibility_check,
    evolve,
    kernel_psd_margin,
    observability_integral,
    observability_integral_by_quadrature,
    observability_kernel,
    phase_kernel,
    sharp_admissibility_constant,
    weak_observability_check,
)
from .report import (
    ReportBundle,
    Table,
    Verdict,
    bundle_summary_text,
    bundle_to_csv_texts,
    bundle_to_json_text,
)
from .scenarios import run_scenario
from .spectral import (
    FrequencyReport,
    SpectralSystem,
    StateVector,
    frequency,
    frequency_report,
    key_identity_gap,
    observed_energy_sq,
    residual,
    residual_shifted,
)
from .square import (
    AssumptionReport,
    BoundaryPatch,
    DeltaGammaReport,
    GammaSpec,
    Side,
    SquareMode,
    assumption_I_check,
    bottom_and_left,
    bottom_side_closed_form_n_mu,
    boundary_gram,
    build_square_system,
    delta_gamma_fit,
    full_bottom,
    lattice_circle,
    sine_product_integral,
    square_modes,
)
from .window import (
    CutoffProfile,
    PlancherelReport,
    ThetaConstants,
    chi,
    chi_dot,
    chi_hat,
    chi_hat_by_quadrature,
    cutoff_profile,
    default_tau_grid,
    plancherel_lowerbound_check,
    sandwich_values,
    solve_observation_time,
    theta_constants,
    windowed_frequency,
)

__all__ = [
    "__version__",
    "AssumptionReport",
    "BoundaryPatch",
    "CertificatePipeline",
    "ClusterReport",
    "CoercivityCertificate",
    "CoercivityError",
    "CoercivityViolation",
    "ConfigError",
    "Constant",
    "CutoffProfile",
    "DecayFunction",
    "DeltaGammaReport",
    "DomainError",
    "Exponential",
    "FrequencyReport",
    "GammaSpec",
    "NumericError",
    "ObservabilityReport",
    "PlancherelReport",
    "PowerLaw",
    "ReportBundle",
    "ResolventReport",
    "RunConfig",
    "ShapeError",
    "Side",
    "SpectralSystem",
    "SquareMode",
    "StateVector",
    "Table",
    "ThetaConstants",
    "TransformedWidth",
    "Verdict",
    "admissibility_check",
    "apply_overrides",
    "assumption_I_check",
    "bottom_and_left",
    "bottom_side_closed_form_n_mu",
    "boundary_gram",
    "build_square_system",
    "bundle_summary_text",
    "bundle_to_csv_texts",
    "bundle_to_json_text",
    "chi",
    "chi_dot",
    "chi_hat",
    "chi_hat_by_quadrature",
    "cluster_min_coercivity",
    "coercivity_scan",
    "cutoff_profile",
    "default_config",
    "default_lambda_grid",
    "default_tau_grid",
    "delta_gamma_fit",
    "enumerate_cluster",
    "estimate_admissibility",
    "evolve",
    "fit_psi_envelope",
    "frequency",
    "frequency_report",
    "full_bottom",
    "key_identity_gap",
    "kernel_psd_margin",
    "lattice_circle",
    "load_config",
    "observability_integral",
    "observability_integral_by_quadrature",
    "observability_kernel",
    "observed_energy_sq",
    "phase_kernel",
    "plancherel_lowerbound_check",
    "resolvent_check",
    "residual",
    "residual_shifted",
    "run_scenario",
    "sandwich_values",
    "scan_certificate",
    "sharp_admissibility_constant",
    "shifted_power_law",
    "sine_product_integral",
    "solve_observation_time",
    "spectral_coercivity_violation_search",
    "square_modes",
    "system_of",
    "theta_constants",
    "weak_observability_check",
    "weak_to_spectral",
    "windowed_frequency",
]
