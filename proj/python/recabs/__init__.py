"""Absorption recovery in inhomogeneously broadened multilevel media."""

from ._core import (  # noqa: F401
    CompensationPlan,
    EnhancementPrediction,
    LevelScheme,
    PeakResult,
    QuadratureGrid,
    RecabsError,
    ScatteringRates,
    Spectrum,
    __version__,
    absorption,
    at_window_width,
    bare_reference_scheme,
    compensation_plan,
    ensemble_absorption,
    extract_beta,
    inhomogeneous_limit,
    peak,
    predicted_beta,
    preset,
    quadrature_grid,
    scattering_rates,
    scheme_from_json,
    set_parameter,
    spectrum,
    voigt_peak_oracle,
)
