//! Structure functions `S_{s,p}(ell) = int |R_s(x + ell) - R_s(x)|^p dx` and the
//! flatness `G` built from them.
//!
//! The increment `R_s(x + ell/2) - R_s(x - ell/2)` has the same distribution on
//! the torus as `R_s(x + ell) - R_s(x)` and its coefficients are known in closed
//! form, so the structure function is an `L^p` norm of an explicit
//! trigonometric polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{on_line, Prediction};
use crate::quadrature::{
    base_grid_size, l2_exact, lp_norm, norm, sample, GridPolicy, QuadratureReport,
};
use crate::series::{
    increment_coefficients, increments_of, phase_shift, riemann_coefficients, s_star,
    CoefficientSet, SeriesSpec,
};

/// Margin in the n-index over `ell^{-1/2}` required of the truncation.
pub const SF_MARGIN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureFunctionPoint {
    pub ell: f64,
    pub p: f64,
    pub s: f64,
    pub value: f64,
    pub value_root: f64,
    pub quad: QuadratureReport,
}

/// Smallest truncation accepted at scale `ell`: `ceil(4 ell^{-1/2})`.
pub fn required_n_max(ell: f64) -> u64 {
    (SF_MARGIN / ell.sqrt()).ceil() as u64
}

fn check_scale(ell: f64) -> Result<()> {
    if ell > 0.0 && ell < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("scale must lie in (0, 1), got {ell}")))
    }
}

fn check_finite_order(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "order must be positive and finite, got {p}"
        )))
    }
}

fn check_resolution(spec: &SeriesSpec, ell: f64) -> Result<()> {
    check_scale(ell)?;
    let required = required_n_max(ell);
    if spec.n_max() < required {
        return Err(Error::InsufficientResolution {
            n_max: spec.n_max(),
            ell,
            required,
        });
    }
    Ok(())
}

fn point(spec: &SeriesSpec, p: f64, ell: f64, quad: QuadratureReport) -> StructureFunctionPoint {
    StructureFunctionPoint {
        ell,
        p,
        s: spec.s(),
        value: quad.value.powf(p),
        value_root: quad.value,
        quad,
    }
}

pub fn structure_function(spec: &SeriesSpec, p: f64, ell: f64) -> Result<StructureFunctionPoint> {
    structure_function_with(spec, p, ell, GridPolicy::Exact)
}

pub fn structure_function_with(
    spec: &SeriesSpec,
    p: f64,
    ell: f64,
    policy: GridPolicy,
) -> Result<StructureFunctionPoint> {
    check_finite_order(p)?;
    check_resolution(spec, ell)?;
    let inc = increment_coefficients(spec, ell)?;
    Ok(point(spec, p, ell, norm(&inc, p, policy)?))
}

/// Second route: sample `R_s` shifted by `+ell/2` and `-ell/2` on a common grid
/// and integrate the difference of the samples.
pub fn structure_function_direct(
    spec: &SeriesSpec,
    p: f64,
    ell: f64,
) -> Result<StructureFunctionPoint> {
    check_finite_order(p)?;
    check_resolution(spec, ell)?;
    let c = riemann_coefficients(spec);
    let m = base_grid_size(c.lambda(), p, GridPolicy::Exact);
    let plus = sample(&phase_shift(&c, 0.5 * ell), m)?;
    let minus = sample(&phase_shift(&c, -0.5 * ell), m)?;
    let quad = lp_norm(&plus.difference(&minus)?, p)?;
    Ok(point(spec, p, ell, quad))
}

/// `S_p / S_2^{p/2}` for the truncated `R_s`.
pub fn flatness_sf(spec: &SeriesSpec, p: f64, ell: f64) -> Result<f64> {
    check_resolution(spec, ell)?;
    flatness_sf_of(&riemann_coefficients(spec), p, ell)
}

/// Structure-function flatness of an arbitrary coefficient set, without the
/// truncation rule.
pub fn flatness_sf_of(c: &CoefficientSet, p: f64, ell: f64) -> Result<f64> {
    check_finite_order(p)?;
    if p < 2.0 {
        return Err(invalid(format!("flatness needs p >= 2, got {p}")));
    }
    let inc = increments_of(c, ell)?;
    let l2 = l2_exact(&inc);
    if l2 == 0.0 {
        return Err(Error::DegenerateInput(format!(
            "second-order structure function vanishes at ell = {ell}"
        )));
    }
    if p == 2.0 {
        return Ok(1.0);
    }
    let lp = norm(&inc, p, GridPolicy::Exact)?.value;
    Ok((lp / l2).powf(p))
}

/// Model for `S_{s,p}(ell)^{1/p}` as `ell -> 0`.
pub fn predicted_sf_root(s: f64, p: f64, ell: f64) -> Result<Prediction> {
    check_finite_order(p)?;
    check_scale(ell)?;
    let threshold = s_star(p)?;
    if s <= threshold {
        return Err(Error::OutOfValidity { s, p, threshold });
    }
    let log = (1.0 / ell).ln();
    let high = ell.powf(s + 1.0 / p - 0.5);
    Ok(if s < 1.25 && !on_line(s, 1.25) {
        let base = ell.powf(s - 0.25);
        if on_line(p, 4.0) {
            Prediction::value(base * log.powf(0.25))
        } else if p < 4.0 {
            Prediction::value(base)
        } else {
            Prediction::value(high)
        }
    } else if on_line(s, 1.25) {
        if on_line(p, 4.0) {
            Prediction::between(ell * log.sqrt(), ell * log.powf(0.75))
        } else if p < 4.0 {
            Prediction::value(ell * log.sqrt())
        } else {
            Prediction::value(high)
        }
    } else if s < 1.5 {
        let pc = critical_order(s);
        if on_line(p, pc) {
            let lower = if is_even_integer(p) {
                ell * log.powf(1.0 / p)
            } else {
                ell
            };
            Prediction::between(lower, ell * log.sqrt())
        } else if p < pc {
            Prediction::value(ell)
        } else {
            Prediction::value(high)
        }
    } else {
        Prediction::value(ell)
    })
}

/// Model for `G_{s,p}(ell)` as `ell -> 0`.
pub fn predicted_flatness_sf(s: f64, p: f64, ell: f64) -> Result<Prediction> {
    check_finite_order(p)?;
    check_scale(ell)?;
    if p < 2.0 {
        return Err(invalid(format!("flatness needs p >= 2, got {p}")));
    }
    let threshold = s_star(p)?;
    if s <= threshold {
        return Err(Error::OutOfValidity { s, p, threshold });
    }
    let log = (1.0 / ell).ln();
    let power = ell.powf(-(p / 4.0 - 1.0));
    Ok(if s < 1.25 && !on_line(s, 1.25) {
        if on_line(p, 4.0) {
            Prediction::value(log)
        } else if p < 4.0 {
            Prediction::value(1.0)
        } else {
            Prediction::value(power)
        }
    } else if on_line(s, 1.25) {
        if on_line(p, 4.0) {
            Prediction::between(1.0, log)
        } else if p < 4.0 {
            Prediction::value(1.0)
        } else {
            Prediction::value(power * log.powf(-p / 2.0))
        }
    } else if s < 1.5 {
        let pc = critical_order(s);
        if on_line(p, pc) {
            Prediction::between(1.0, log.powf(p / 2.0))
        } else if p < pc {
            Prediction::value(1.0)
        } else {
            Prediction::value(ell.powf(-(1.5 * p - 1.0 - p * s)))
        }
    } else {
        Prediction::value(1.0)
    })
}

/// `2 / (3 - 2s)`, the order separating the two structure-function regimes for
/// `5/4 < s < 3/2`.
pub fn critical_order(s: f64) -> f64 {
    2.0 / (3.0 - 2.0 * s)
}

fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as u64) % 2 == 0
}
