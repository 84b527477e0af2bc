//! Numerics for the generalized Riemann functions
//! `R_s(x) = sum_{n >= 1} n^{-2s} e^{2 pi i n^2 x}`: exact `L^p` quadrature of
//! truncations, filters and Littlewood-Paley blocks, structure functions, the
//! two flatnesses, scaling fits and the multifractal formalism.

pub mod error;
pub mod filters;
pub mod fit;
pub mod flatness;
pub mod model;
pub mod multifractal;
pub mod quadrature;
pub mod series;
pub mod structure;
pub mod sweep;
pub mod verify;

pub use rustfft::num_complex::Complex64;

pub use error::{Error, Result};
pub use filters::{
    band_filter, high_pass_riemann, lp_block, predicted_block_norm, FilterBand, TailBound,
};
pub use fit::{
    classify_regime, fit_claimed_power, fit_power_law, fit_with_log_correction, ClaimedFit,
    CriticalLines, CurveMeta, ExponentFit, FitWindow, Law, Regime, RegimeKind, ScalingCurve,
};
pub use flatness::{
    flatness_hp, flatness_hp_of, high_pass_norm, predicted_flatness_hp, predicted_hp_norm,
    predicted_partial_sum_norm, zalcwasser_psi, HighPassPoint,
};
pub use model::Prediction;
pub use multifractal::{
    default_p_grid, eta_closed_form, eta_estimate, eta_estimate_detailed, formalism_check,
    legendre_transform, spectrum_closed_form, EtaCurve, EtaEstimate, EtaSource, FormalismReport,
    MultifractalSpectrum, SpectrumSource,
};
pub use quadrature::{
    base_grid_size, l2_exact, l4_exact_counting, l4_quadruple_count, lp_norm, norm, sample,
    GridPolicy, QuadratureReport, SampleGrid,
};
pub use series::{
    direct_eval, increment_coefficients, increments_of, phase_shift, riemann_coefficients, s_star,
    zalcwasser_coefficients, CoefficientSet, SeriesSpec,
};
pub use structure::{
    critical_order, flatness_sf, flatness_sf_of, predicted_flatness_sf, predicted_sf_root,
    required_n_max, structure_function, structure_function_direct, structure_function_with,
    StructureFunctionPoint,
};
