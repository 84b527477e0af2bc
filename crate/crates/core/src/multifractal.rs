//! Scaling function `eta_s(p)`, the spectrum of singularities `d_s(alpha)`,
//! their numeric Legendre duality and block-based estimates of `eta`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::filters::ceil_sqrt;
use crate::fit::ols;
use crate::quadrature::{l2_exact, norm, GridPolicy};
use crate::series::{range_coefficients, SeriesSpec};

/// Smallest `p_max` accepted by [`legendre_transform`].
pub const LEGENDRE_P_MAX: f64 = 40.0;

/// Objective slope at `p_max` below which the infimum is reported as `-inf`.
pub const DIVERGENCE_SLOPE: f64 = -1e-6;

/// Tolerance of [`formalism_check`].
pub const FORMALISM_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    ClosedForm,
    LegendreNumeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultifractalSpectrum {
    pub alphas: Vec<f64>,
    /// `f64::NEG_INFINITY` where the spectrum is empty.
    pub d_values: Vec<f64>,
    pub source: SpectrumSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaSource {
    ClosedForm,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCurve {
    pub p_grid: Vec<f64>,
    pub eta: Vec<f64>,
    pub source: EtaSource,
}

impl EtaCurve {
    pub fn closed_form(s: f64, p_grid: &[f64]) -> Result<Self> {
        let eta = p_grid
            .iter()
            .map(|&p| eta_closed_form(s, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p_grid: p_grid.to_vec(),
            eta,
            source: EtaSource::ClosedForm,
        })
    }
}

/// 400 geometric points on `[0.01, 40]` together with the kink `p = 4`.
pub fn default_p_grid() -> Vec<f64> {
    let n = 400;
    let (lo, hi) = (0.01f64.ln(), LEGENDRE_P_MAX.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = 0.01;
    *grid.last_mut().unwrap() = LEGENDRE_P_MAX;
    grid.push(4.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `p(s - 1/4)` for `p <= 4`, `1 + p(s - 1/2)` above.
pub fn eta_closed_form(s: f64, p: f64) -> Result<f64> {
    if !(s > 0.5) {
        return Err(invalid(format!("eta needs s > 1/2, got {s}")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!(
            "order must be positive and finite, got {p}"
        )));
    }
    Ok(if p <= 4.0 {
        p * (s - 0.25)
    } else {
        1.0 + p * (s - 0.5)
    })
}

const EDGE_TOL: f64 = 1e-12;

/// `d_s(alpha)`: `4 alpha - 4s + 2` on `[s - 1/2, s - 1/4]`, `0` at
/// `alpha = 2s - 1/2`, `-inf` elsewhere.
pub fn spectrum_closed_form(s: f64, alphas: &[f64]) -> Result<MultifractalSpectrum> {
    if !(s > 0.5) {
        return Err(invalid(format!("spectrum needs s > 1/2, got {s}")));
    }
    let d_values = alphas
        .iter()
        .map(|&a| {
            if a >= s - 0.5 - EDGE_TOL && a <= s - 0.25 + EDGE_TOL {
                4.0 * a - 4.0 * s + 2.0
            } else if (a - (2.0 * s - 0.5)).abs() <= EDGE_TOL {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    Ok(MultifractalSpectrum {
        alphas: alphas.to_vec(),
        d_values,
        source: SpectrumSource::ClosedForm,
    })
}

/// `inf_p {alpha p - eta(p) + 1}` over the grid of `eta`.
pub fn legendre_transform(eta: &EtaCurve, alphas: &[f64]) -> Result<MultifractalSpectrum> {
    if eta.p_grid.is_empty() || alphas.is_empty() {
        return Err(invalid(
            "Legendre transform needs nonempty p and alpha grids",
        ));
    }
    if eta.p_grid.len() != eta.eta.len() {
        return Err(invalid("p grid and eta values differ in length"));
    }
    if eta.p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("p grid must be strictly increasing"));
    }
    let n = eta.p_grid.len();
    let p_max = eta.p_grid[n - 1];
    if p_max < LEGENDRE_P_MAX || n < 2 {
        return Err(invalid(format!(
            "p grid must reach {LEGENDRE_P_MAX}, ends at {p_max}"
        )));
    }
    let d_values = alphas
        .iter()
        .map(|&a| {
            let obj = |i: usize| a * eta.p_grid[i] - eta.eta[i] + 1.0;
            let end_slope = (obj(n - 1) - obj(n - 2)) / (eta.p_grid[n - 1] - eta.p_grid[n - 2]);
            if end_slope < DIVERGENCE_SLOPE {
                f64::NEG_INFINITY
            } else {
                (0..n).map(obj).fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    Ok(MultifractalSpectrum {
        alphas: alphas.to_vec(),
        d_values,
        source: SpectrumSource::LegendreNumeric,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalismReport {
    pub s: f64,
    /// Number of alphas on the increasing part `[s - 1/2, s - 1/4]`.
    pub checked: usize,
    pub max_deviation: f64,
    /// Alphas below `s - 1/2` whose transform was not flagged as `-inf`.
    pub unflagged_divergences: usize,
    pub passed: bool,
}

/// Compares the Legendre transform of the closed-form `eta` with `d_s` on the
/// increasing part of the spectrum, and checks divergence below it.
pub fn formalism_check(s: f64, alphas: &[f64]) -> Result<FormalismReport> {
    let eta = EtaCurve::closed_form(s, &default_p_grid())?;
    let numeric = legendre_transform(&eta, alphas)?;
    let exact = spectrum_closed_form(s, alphas)?;
    let mut checked = 0;
    let mut max_deviation: f64 = 0.0;
    let mut unflagged = 0;
    for ((&a, &dn), &de) in alphas.iter().zip(&numeric.d_values).zip(&exact.d_values) {
        if a >= s - 0.5 - EDGE_TOL && a <= s - 0.25 + EDGE_TOL {
            checked += 1;
            let dev = if dn.is_finite() {
                (dn - de).abs()
            } else {
                f64::INFINITY
            };
            max_deviation = max_deviation.max(dev);
        } else if a < s - 0.5 && dn != f64::NEG_INFINITY {
            unflagged += 1;
        }
    }
    Ok(FormalismReport {
        s,
        checked,
        max_deviation,
        unflagged_divergences: unflagged,
        passed: checked > 0 && max_deviation < FORMALISM_TOL && unflagged == 0,
    })
}

/// Numeric `eta` from frequency blocks `A^k <= n^2 < A^{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub ks: Vec<u32>,
    pub block_norms: Vec<f64>,
}

/// `-p` times the slope of `log_A ||P_k R_s||_p` against `k`, where `P_k`
/// keeps the frequencies in `[A^k, A^{k+1})`.
pub fn eta_estimate(
    spec: &SeriesSpec,
    p: f64,
    a_param: u64,
    k_range: RangeInclusive<u32>,
) -> Result<f64> {
    eta_estimate_detailed(spec, p, a_param, k_range).map(|e| e.eta)
}

pub fn eta_estimate_detailed(
    spec: &SeriesSpec,
    p: f64,
    a_param: u64,
    k_range: RangeInclusive<u32>,
) -> Result<EtaEstimate> {
    if a_param < 2 {
        return Err(invalid(format!(
            "block parameter must be at least 2, got {a_param}"
        )));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!(
            "order must be positive and finite, got {p}"
        )));
    }
    let ks: Vec<u32> = k_range.collect();
    if ks.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: ks.len(),
        });
    }
    let mut block_norms = Vec::with_capacity(ks.len());
    for &k in &ks {
        let overflow = || Error::OutOfRange(format!("{a_param}^{} overflows", k + 1));
        let lo = a_param.checked_pow(k).ok_or_else(overflow)?;
        let hi = a_param.checked_pow(k + 1).ok_or_else(overflow)?;
        if hi - 1 > spec.lambda() {
            return Err(Error::OutOfRange(format!(
                "frequency block {k} ends at {} beyond the cap {}",
                hi - 1,
                spec.lambda()
            )));
        }
        let block = range_coefficients(spec.s(), ceil_sqrt(lo), ceil_sqrt(hi) - 1);
        if block.is_empty() {
            return Err(Error::DegenerateInput(format!(
                "frequency block [{lo}, {hi}) contains no square"
            )));
        }
        let v = if p == 2.0 {
            l2_exact(&block)
        } else {
            norm(&block, p, GridPolicy::Exact)?.value
        };
        block_norms.push(v);
    }
    let ln_a = (a_param as f64).ln();
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = block_norms.iter().map(|v| v.ln() / ln_a).collect();
    let f = ols(&xs, &ys);
    Ok(EtaEstimate {
        eta: -p * f.slope,
        slope: f.slope,
        r_squared: f.r_squared,
        ks,
        block_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_examples() {
        assert_eq!(eta_closed_form(1.0, 4.0).unwrap(), 3.0);
        assert_eq!(eta_closed_form(1.0, 8.0).unwrap(), 5.0);
        for eps in [1e-3, 1e-6, 1e-9] {
            let gap = (eta_closed_form(0.8, 4.0 - eps).unwrap()
                - eta_closed_form(0.8, 4.0 + eps).unwrap())
            .abs();
            assert!(gap < 2.0 * eps);
        }
        assert!(eta_closed_form(0.5, 2.0).is_err());
        assert!(eta_closed_form(1.0, 0.0).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let sp = spectrum_closed_form(1.0, &[0.75, 0.5, 0.9, 1.5, 0.4]).unwrap();
        assert_eq!(sp.d_values[0], 1.0);
        assert_eq!(sp.d_values[1], 0.0);
        assert_eq!(sp.d_values[2], f64::NEG_INFINITY);
        assert_eq!(sp.d_values[3], 0.0);
        assert_eq!(sp.d_values[4], f64::NEG_INFINITY);
        assert_eq!(sp.source, SpectrumSource::ClosedForm);
        assert!(spectrum_closed_form(0.4, &[0.1]).is_err());
    }

    #[test]
    fn legendre_examples() {
        let eta = EtaCurve::closed_form(1.0, &default_p_grid()).unwrap();
        let sp = legendre_transform(&eta, &[0.75, 0.6, 0.4]).unwrap();
        assert!((sp.d_values[0] - 1.0).abs() < 1e-3);
        assert!((sp.d_values[1] - 0.4).abs() < 1e-3);
        assert_eq!(sp.d_values[2], f64::NEG_INFINITY);
    }

    #[test]
    fn legendre_rejects_bad_grids() {
        let short = EtaCurve::closed_form(1.0, &[1.0, 2.0, 10.0]).unwrap();
        assert!(legendre_transform(&short, &[0.6]).is_err());
        let empty = EtaCurve {
            p_grid: vec![],
            eta: vec![],
            source: EtaSource::ClosedForm,
        };
        assert!(matches!(
            legendre_transform(&empty, &[0.6]),
            Err(Error::InvalidArgument(_))
        ));
        let eta = EtaCurve::closed_form(1.0, &default_p_grid()).unwrap();
        assert!(legendre_transform(&eta, &[]).is_err());
    }

    #[test]
    fn p_grid_shape() {
        let g = default_p_grid();
        assert_eq!(g.len(), 401);
        assert!(g.contains(&4.0));
        assert_eq!(g[0], 0.01);
        assert_eq!(*g.last().unwrap(), 40.0);
    }

    #[test]
    fn formalism_examples() {
        for s in [1.0, 0.8, 2.0] {
            let alphas: Vec<f64> = (0..=100)
                .map(|i| s - 0.75 + 0.5 * i as f64 / 100.0)
                .collect();
            let r = formalism_check(s, &alphas).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.checked > 40);
        }
    }

    #[test]
    fn eta_estimate_needs_four_blocks() {
        let spec = SeriesSpec::new(1.0, 1000).unwrap();
        assert_eq!(
            eta_estimate(&spec, 2.0, 4, 3..=5).unwrap_err(),
            Error::InsufficientData { needed: 4, got: 3 }
        );
        assert!(matches!(
            eta_estimate(&spec, 2.0, 4, 3..=12),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn eta_estimate_second_order() {
        let spec = SeriesSpec::new(1.0, 1 << 11).unwrap();
        let e = eta_estimate(&spec, 2.0, 4, 3..=9).unwrap();
        assert!((e - 1.5).abs() < 0.1, "{e}");
    }

    #[test]
    fn eta_shift_in_s() {
        let a = eta_estimate(&SeriesSpec::new(1.0, 1 << 11).unwrap(), 2.0, 4, 3..=9).unwrap();
        let b = eta_estimate(&SeriesSpec::new(1.2, 1 << 11).unwrap(), 2.0, 4, 3..=9).unwrap();
        assert!(((b - a) - 0.4).abs() < 0.05, "{a} {b}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn transform_is_an_infimum_and_concave(s in 0.55f64..2.5) {
                let grid = default_p_grid();
                let eta = EtaCurve::closed_form(s, &grid).unwrap();
                let alphas: Vec<f64> = (0..=200).map(|i| s - 0.5 + 0.25 * i as f64 / 200.0).collect();
                let sp = legendre_transform(&eta, &alphas).unwrap();
                for (a, d) in alphas.iter().zip(&sp.d_values) {
                    for (p, e) in grid.iter().zip(&eta.eta) {
                        prop_assert!(*d <= a * p - e + 1.0 + 1e-12);
                    }
                }
                for w in sp.d_values.windows(3) {
                    if w.iter().all(|d| d.is_finite()) {
                        prop_assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-9);
                    }
                }
            }

            #[test]
            fn eta_concave_and_continuous(s in 0.51f64..3.0, p in 0.05f64..30.0, h in 0.001f64..1.0) {
                let lo = eta_closed_form(s, p).unwrap();
                let mid = eta_closed_form(s, p + h).unwrap();
                let hi = eta_closed_form(s, p + 2.0 * h).unwrap();
                prop_assert!(mid >= 0.5 * (lo + hi) - 1e-12);
                let left = eta_closed_form(s, 4.0 - 1e-9).unwrap();
                let right = eta_closed_form(s, 4.0 + 1e-9).unwrap();
                prop_assert!((left - right).abs() < 1e-8);
            }
        }
    }
}
