//! Equispaced sampling by inverse FFT and `L^p` norms by the periodic
//! rectangle rule.
//!
//! For even `p = 2q`, `|f|^p = f^q conj(f)^q` is a trigonometric polynomial whose
//! frequencies lie in `[-q B, q B]`, `B` being the spread between the largest
//! and smallest frequency of `f`. The rectangle rule on `m` points integrates it
//! exactly as soon as `m > q B`. Other orders are refined by interleaving
//! shifted copies of the base grid.

use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::{phase_shift, CoefficientSet};

/// Relative change between refinement levels below which a non-even order is
/// considered converged.
pub const QUAD_TOL: f64 = 1e-7;

/// Maximum number of grid doublings past the base grid.
pub const MAX_REFINEMENTS: u32 = 4;

/// Doublings always performed before the convergence test applies.
pub const MIN_REFINEMENTS: u32 = 2;

/// Smallest base grid used by [`norm`] for non-even orders under
/// [`GridPolicy::Exact`].
pub const NON_EVEN_MIN_GRID: usize = 1 << 12;

/// Base grid oversampling `m / lambda` for non-even orders under
/// [`GridPolicy::Exact`].
pub const NON_EVEN_OVERSAMPLING: usize = 8;

/// Default cap on `n_max` for [`l4_exact_counting`].
pub const L4_ORACLE_CAP: u64 = 64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Samples of a trigonometric polynomial at `x_j = j / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    values: Vec<Complex64>,
    lambda: u64,
    source: Option<CoefficientSet>,
}

impl SampleGrid {
    /// Wraps externally computed samples. Without the generating coefficients
    /// non-even orders cannot be refined.
    pub fn from_values(values: Vec<Complex64>, lambda: u64) -> Result<Self> {
        check_alias(values.len(), lambda)?;
        Ok(Self {
            values,
            lambda,
            source: None,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn source(&self) -> Option<&CoefficientSet> {
        self.source.as_ref()
    }

    /// Pointwise `self - other` on the same grid.
    pub fn difference(&self, other: &SampleGrid) -> Result<SampleGrid> {
        if self.m() != other.m() {
            return Err(invalid(format!(
                "grid sizes differ: {} vs {}",
                self.m(),
                other.m()
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        let source = match (&self.source, &other.source) {
            (Some(a), Some(b)) => Some(CoefficientSet::from_entries(
                a.iter().chain(b.iter().map(|(k, v)| (k, -v))),
            )),
            _ => None,
        };
        Ok(SampleGrid {
            values,
            lambda: self.lambda.max(other.lambda),
            source,
        })
    }
}

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub value: f64,
    pub certified_exact: bool,
    pub refinement_levels: u32,
    /// Relative change produced by the last refinement; 0 when no refinement
    /// was needed and NaN when refinement was impossible.
    pub relative_change_last: f64,
}

/// How the base grid of [`norm`] is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridPolicy {
    /// Large enough for exact integration of `|f|^q`, `q` the smallest even
    /// integer at or above `p`.
    #[default]
    Exact,
    /// Smallest alias-free grid; non-even orders rely on refinement alone.
    Adaptive,
}

impl std::str::FromStr for GridPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "adaptive" => Ok(Self::Adaptive),
            other => Err(invalid(format!("unknown grid policy {other:?}"))),
        }
    }
}

fn check_alias(m: usize, lambda: u64) -> Result<()> {
    if (m as u128) <= 2 * lambda as u128 {
        Err(Error::AliasingRisk { m, lambda })
    } else {
        Ok(())
    }
}

fn inverse_fft(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

/// Samples `sum_k v_k e^{2 pi i k j / m}` for `j = 0..m`.
pub fn sample(c: &CoefficientSet, m: usize) -> Result<SampleGrid> {
    let lambda = c.lambda();
    check_alias(m, lambda)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, v) in c.iter() {
        buf[k as usize] = v;
    }
    if !c.is_empty() {
        inverse_fft(&mut buf);
    }
    Ok(SampleGrid {
        values: buf,
        lambda,
        source: Some(c.clone()),
    })
}

fn even_order(p: f64) -> Option<u64> {
    if p.is_finite() && p.fract() == 0.0 && p >= 2.0 && (p as u64) % 2 == 0 {
        Some(p as u64)
    } else {
        None
    }
}

fn is_certified(m: usize, lambda: u64, p: f64) -> bool {
    match even_order(p) {
        Some(q) => (m as u128) > (q as u128 / 2) * lambda as u128,
        None => false,
    }
}

fn power_sum(values: &[Complex64], p: f64) -> f64 {
    match even_order(p) {
        Some(q) => {
            let half = (q / 2) as i32;
            values.iter().map(|z| z.norm_sqr().powi(half)).sum()
        }
        None => values.iter().map(|z| z.norm().powf(p)).sum(),
    }
}

fn check_order(p: f64) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("norm order must be positive, got {p}")))
    }
}

/// `((1/m) sum_j |values_j|^p)^{1/p}`, or the sample maximum for `p = inf`.
pub fn lp_norm(g: &SampleGrid, p: f64) -> Result<QuadratureReport> {
    check_order(p)?;
    let m = g.m();
    if p.is_infinite() {
        let mut peak = g.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut levels = 0;
        if let Some(src) = &g.source {
            let shifted = sample(&phase_shift(src, 0.5 / m as f64), m)?;
            peak = shifted.values.iter().map(|z| z.norm()).fold(peak, f64::max);
            levels = 1;
        }
        return Ok(QuadratureReport {
            value: peak,
            certified_exact: false,
            refinement_levels: levels,
            relative_change_last: f64::NAN,
        });
    }

    if is_certified(m, g.lambda, p) {
        return Ok(QuadratureReport {
            value: (power_sum(&g.values, p) / m as f64).powf(1.0 / p),
            certified_exact: true,
            refinement_levels: 0,
            relative_change_last: 0.0,
        });
    }

    let mut total = power_sum(&g.values, p);
    let mut value = (total / m as f64).powf(1.0 / p);
    let Some(src) = &g.source else {
        return Ok(QuadratureReport {
            value,
            certified_exact: false,
            refinement_levels: 0,
            relative_change_last: f64::NAN,
        });
    };

    let mut levels = 0;
    let mut change = f64::NAN;
    let mut certified = false;
    for level in 1..=MAX_REFINEMENTS {
        let cosets = 1usize << level;
        let fine = m * cosets;
        for r in (1..cosets).step_by(2) {
            let shifted = sample(&phase_shift(src, r as f64 / fine as f64), m)?;
            total += power_sum(&shifted.values, p);
        }
        let next = (total / fine as f64).powf(1.0 / p);
        change = if next == 0.0 {
            0.0
        } else {
            ((next - value) / next).abs()
        };
        value = next;
        levels = level;
        if is_certified(fine, g.lambda, p) {
            certified = true;
            break;
        }
        if level >= MIN_REFINEMENTS && change < QUAD_TOL {
            break;
        }
    }
    Ok(QuadratureReport {
        value,
        certified_exact: certified,
        refinement_levels: levels,
        relative_change_last: change,
    })
}

/// Base grid used by [`norm`] for a polynomial with frequencies in `[0, lambda]`.
pub fn base_grid_size(lambda: u64, p: f64, policy: GridPolicy) -> usize {
    let mut need = 2 * lambda as u128 + 1;
    if policy == GridPolicy::Exact && p.is_finite() {
        let q = ((p / 2.0).ceil() as u128).max(1);
        need = need.max(q * lambda as u128 + 1);
        if even_order(p).is_none() {
            need = need
                .max(NON_EVEN_MIN_GRID as u128)
                .max(NON_EVEN_OVERSAMPLING as u128 * lambda as u128 + 1);
        }
    }
    (need as usize).next_power_of_two()
}

/// `L^p` norm of a coefficient set, sampled after demodulation on the grid
/// chosen by `policy`.
pub fn norm(c: &CoefficientSet, p: f64, policy: GridPolicy) -> Result<QuadratureReport> {
    check_order(p)?;
    if c.is_empty() {
        return Ok(QuadratureReport {
            value: 0.0,
            certified_exact: true,
            refinement_levels: 0,
            relative_change_last: 0.0,
        });
    }
    let demod = c.demodulated();
    let m = base_grid_size(demod.lambda(), p, policy);
    lp_norm(&sample(&demod, m)?, p)
}

/// `sqrt(sum |v_k|^2)`, the Plancherel value of the `L^2` norm.
pub fn l2_exact(c: &CoefficientSet) -> f64 {
    // Neumaier summation from the high-frequency end, where terms are smallest
    // for decaying coefficients.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (_, v) in c.entries().iter().rev() {
        let x = v.norm_sqr();
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    (sum + comp).sqrt()
}

/// Number of `(a, b, c, d)` in `[1, n_max]^4` with `a^2 + b^2 = c^2 + d^2`,
/// by exhaustive enumeration.
pub fn l4_quadruple_count(n_max: u64, cap: u64) -> Result<u64> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    if n_max > cap {
        return Err(Error::OracleCap { n_max, cap });
    }
    let mut count = 0u64;
    for a in 1..=n_max {
        for b in 1..=n_max {
            let lhs = a * a + b * b;
            for c in 1..=n_max {
                for d in 1..=n_max {
                    if c * c + d * d == lhs {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `||K_{n_max}||_4` from the quadruple count, refusing `n_max` above
/// [`L4_ORACLE_CAP`].
pub fn l4_exact_counting(n_max: u64) -> Result<f64> {
    Ok((l4_quadruple_count(n_max, L4_ORACLE_CAP)? as f64).powf(0.25))
}
