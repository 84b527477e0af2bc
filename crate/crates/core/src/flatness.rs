//! High-pass flatness `F` and the norm laws for partial sums and high-pass
//! filters of `R_s`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::filters::{high_pass_riemann, TailBound};
use crate::model::{on_line, Prediction};
use crate::quadrature::{l2_exact, norm, GridPolicy, QuadratureReport};
use crate::series::{s_star, CoefficientSet, SeriesSpec};

/// Measured norm of a high-pass filter with its truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighPassPoint {
    pub n_freq: u64,
    pub p: f64,
    pub value: f64,
    pub l2: f64,
    pub quad: QuadratureReport,
    pub tail: TailBound,
    /// Whether the tail passes the 1% sup-norm rule against `value`.
    pub tail_certified: bool,
}

fn check_order(p: f64) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("norm order must be positive, got {p}")))
    }
}

fn check_flatness_order(p: f64) -> Result<()> {
    if p >= 2.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("flatness needs 2 <= p < inf, got {p}")))
    }
}

fn check_validity(s: f64, p: f64) -> Result<()> {
    let threshold = s_star(p)?;
    if s > threshold {
        Ok(())
    } else {
        Err(Error::OutOfValidity { s, p, threshold })
    }
}

/// `||(R_s)_{>= n_freq}||_p` for the truncated series. The exact `L^2` value
/// is used when `p = 2`.
pub fn high_pass_norm(
    spec: &SeriesSpec,
    p: f64,
    n_freq: u64,
    policy: GridPolicy,
) -> Result<HighPassPoint> {
    check_order(p)?;
    let (set, tail) = high_pass_riemann(spec, n_freq)?;
    let l2 = l2_exact(&set);
    let quad = if p == 2.0 {
        QuadratureReport {
            value: l2,
            certified_exact: true,
            refinement_levels: 0,
            relative_change_last: 0.0,
        }
    } else {
        norm(&set, p, policy)?
    };
    Ok(HighPassPoint {
        n_freq,
        p,
        value: quad.value,
        l2,
        quad,
        tail,
        tail_certified: tail.certifies(quad.value),
    })
}

/// `||f_{>= N}||_p^p / ||f_{>= N}||_2^p` for the truncated `R_s`.
pub fn flatness_hp(spec: &SeriesSpec, p: f64, n_freq: u64) -> Result<f64> {
    check_flatness_order(p)?;
    let set = match high_pass_riemann(spec, n_freq) {
        Ok((set, _)) => set,
        Err(Error::EmptyBand { cutoff, lambda }) => {
            return Err(Error::DegenerateInput(format!(
                "high-pass cutoff {cutoff} leaves no frequency below {lambda}"
            )))
        }
        Err(e) => return Err(e),
    };
    flatness_hp_of(&set, p)
}

/// `||c||_p^p / ||c||_2^p` for an already filtered set.
pub fn flatness_hp_of(c: &CoefficientSet, p: f64) -> Result<f64> {
    check_flatness_order(p)?;
    if c.is_empty() {
        return Err(Error::DegenerateInput("empty band".into()));
    }
    if p == 2.0 {
        return Ok(1.0);
    }
    let lp = norm(c, p, GridPolicy::Exact)?.value;
    Ok((lp / l2_exact(c)).powf(p))
}

/// Model for `F_{s,p}(N)`; independent of `s` inside the validity range.
pub fn predicted_flatness_hp(s: f64, p: f64, n_freq: f64) -> Result<f64> {
    check_flatness_order(p)?;
    check_validity(s, p)?;
    Ok(if on_line(p, 4.0) {
        n_freq.ln()
    } else if p < 4.0 {
        1.0
    } else {
        n_freq.powf(p / 4.0 - 1.0)
    })
}

/// Model for `||sum_{n <= N} n^{-2s} e^{2 pi i n^2 x}||_p`, any real `s`.
pub fn predicted_partial_sum_norm(s: f64, p: f64, n_max: f64) -> Result<Prediction> {
    check_order(p)?;
    let log = n_max.ln();
    let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let high = n_max.powf(1.0 - 2.0 * inv - 2.0 * s);
    Ok(if s < 0.25 && !on_line(s, 0.25) {
        let base = n_max.powf(0.5 - 2.0 * s);
        if on_line(p, 4.0) {
            Prediction::value(base * log.powf(0.25))
        } else if p < 4.0 {
            Prediction::value(base)
        } else {
            Prediction::value(high)
        }
    } else if on_line(s, 0.25) {
        if on_line(p, 4.0) {
            Prediction::between(log.sqrt(), log.powf(0.75))
        } else if p < 4.0 {
            Prediction::value(log.sqrt())
        } else {
            Prediction::value(high)
        }
    } else if s < 0.5 {
        let pc = 2.0 / (1.0 - 2.0 * s);
        if on_line(p, pc) {
            Prediction::between(log.powf(inv), log.sqrt())
        } else if p < pc {
            Prediction::value(1.0)
        } else {
            Prediction::value(high)
        }
    } else {
        Prediction::value(1.0)
    })
}

/// Model for `||K_N||_p`: `N^{1/2}`, `N^{1/2} (log N)^{1/4}` or `N^{1-2/p}`.
pub fn zalcwasser_psi(p: f64, n_max: f64) -> Result<f64> {
    Ok(predicted_partial_sum_norm(0.0, p, n_max)?.lo())
}

/// Model for `||(R_s)_{>= N}||_p`; `p = inf` reads `1/p = 0`.
pub fn predicted_hp_norm(s: f64, p: f64, n_freq: f64) -> Result<f64> {
    check_order(p)?;
    check_validity(s, p)?;
    let base = n_freq.powf(0.25 - s);
    Ok(if on_line(p, 4.0) {
        base * n_freq.ln().powf(0.25)
    } else if p < 4.0 {
        base
    } else {
        let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
        n_freq.powf(0.5 - inv - s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::ceil_sqrt;
    use crate::quadrature::{lp_norm, sample};
    use crate::series::riemann_coefficients;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn single_surviving_mode() {
        let spec = SeriesSpec::new(1.0, 30).unwrap();
        for p in [2.0, 3.0, 4.0, 6.5, 10.0] {
            let f = flatness_hp(&spec, p, 900).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "p={p}: {f}");
        }
        assert!(matches!(
            flatness_hp(&spec, 4.0, 901),
            Err(Error::DegenerateInput(_))
        ));
        assert!(flatness_hp(&spec, 1.5, 4).is_err());
    }

    #[test]
    fn p4_flatness_tracks_log() {
        let ratios: Vec<f64> = (4..=9)
            .map(|j| {
                let n = 4f64.powi(j);
                let spec = SeriesSpec::new(1.0, 4 * ceil_sqrt(n as u64)).unwrap();
                flatness_hp(&spec, 4.0, n as u64).unwrap() / n.ln()
            })
            .collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo < 3.0, "{ratios:?}");
    }

    #[test]
    fn hand_assembled_flatness() {
        let spec = SeriesSpec::new(1.1, 100).unwrap();
        let (set, _) = high_pass_riemann(&spec, 400).unwrap();
        let demod = set.demodulated();
        let lp = lp_norm(&sample(&demod, 1 << 16).unwrap(), 6.0)
            .unwrap()
            .value;
        let by_hand = (lp / l2_exact(&set)).powi(6);
        assert!(rel(flatness_hp(&spec, 6.0, 400).unwrap(), by_hand) < 1e-10);
    }

    #[test]
    fn high_pass_point_bookkeeping() {
        let spec = SeriesSpec::new(1.0, 512).unwrap();
        let pt = high_pass_norm(&spec, 2.0, 4, GridPolicy::Exact).unwrap();
        assert_eq!(pt.value, pt.l2);
        assert!(pt.tail_certified);
        let pt = high_pass_norm(&spec, 4.0, 1 << 14, GridPolicy::Exact).unwrap();
        assert!(pt.quad.certified_exact);
        assert!(pt.value > pt.l2);
        assert!(!pt.tail_certified);
    }

    #[test]
    fn flatness_models() {
        for s in [0.6, 0.9, 1.3, 2.0] {
            assert_eq!(predicted_flatness_hp(s, 3.0, 1e4).unwrap(), 1.0);
        }
        assert!(rel(predicted_flatness_hp(1.0, 8.0, 1e4).unwrap(), 1e4) < 1e-14);
        assert!(rel(predicted_flatness_hp(1.0, 4.0, 1e4).unwrap(), 1e4f64.ln()) < 1e-14);
        assert_eq!(
            predicted_flatness_hp(0.9, 6.0, 777.0).unwrap(),
            predicted_flatness_hp(1.3, 6.0, 777.0).unwrap()
        );
        assert!(matches!(
            predicted_flatness_hp(0.3, 6.0, 10.0),
            Err(Error::OutOfValidity { .. })
        ));
    }

    #[test]
    fn partial_sum_models() {
        let n: f64 = 1000.0;
        let v = predicted_partial_sum_norm(0.0, 6.0, n)
            .unwrap()
            .point()
            .unwrap();
        assert!(rel(v, n.powf(2.0 / 3.0)) < 1e-14);
        let v = predicted_partial_sum_norm(0.25, 2.0, n)
            .unwrap()
            .point()
            .unwrap();
        assert!(rel(v, n.ln().sqrt()) < 1e-14);
        let v = predicted_partial_sum_norm(0.4, 20.0, n)
            .unwrap()
            .point()
            .unwrap();
        assert!(rel(v, n.powf(0.1)) < 1e-12);
        assert_eq!(
            predicted_partial_sum_norm(0.4, 5.0, n).unwrap(),
            Prediction::value(1.0)
        );
        let crit = predicted_partial_sum_norm(0.4, 10.0, n).unwrap();
        assert!(crit.is_interval());
        assert!(rel(crit.lo(), n.ln().powf(0.1)) < 1e-12);
        assert!(predicted_partial_sum_norm(0.25, 4.0, n)
            .unwrap()
            .is_interval());
        assert_eq!(
            predicted_partial_sum_norm(0.7, 50.0, n).unwrap(),
            Prediction::value(1.0)
        );
        assert!(
            rel(
                zalcwasser_psi(4.0, n).unwrap(),
                n.sqrt() * n.ln().powf(0.25)
            ) < 1e-14
        );
    }

    #[test]
    fn high_pass_models() {
        let n: f64 = 4096.0;
        assert!(rel(predicted_hp_norm(1.0, 6.0, n).unwrap(), n.powf(-2.0 / 3.0)) < 1e-14);
        assert!(rel(predicted_hp_norm(1.0, 2.0, n).unwrap(), n.powf(-0.75)) < 1e-14);
        assert!(
            rel(
                predicted_hp_norm(1.0, f64::INFINITY, n).unwrap(),
                n.powf(-0.5)
            ) < 1e-14
        );
        assert!(predicted_hp_norm(0.2, 2.0, n).is_err());
    }

    #[test]
    fn l2_high_pass_slopes() {
        for s in [0.75, 1.0, 1.4] {
            let spec = SeriesSpec::new(s, 1 << 13).unwrap();
            let pts: Vec<(f64, f64)> = (6..=18)
                .map(|j| {
                    let n = 1u64 << j;
                    let (set, _) = high_pass_riemann(&spec, n).unwrap();
                    ((n as f64).ln(), l2_exact(&set).ln())
                })
                .collect();
            let k = pts.len() as f64;
            let mx = pts.iter().map(|q| q.0).sum::<f64>() / k;
            let my = pts.iter().map(|q| q.1).sum::<f64>() / k;
            let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
            let slope = sxy / sxx;
            assert!((slope - (0.25 - s)).abs() < 0.05, "s={s}: {slope}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn flatness_at_least_one_and_scale_free(
                s in 0.6f64..2.0, n in 4u64..80, cut in 1u64..400, t in 0.01f64..100.0, p in 2.05f64..9.0
            ) {
                let set = riemann_coefficients(&SeriesSpec::new(s, n).unwrap());
                let high = crate::filters::band_filter(&set, crate::filters::FilterBand::high_pass(cut));
                prop_assume!(!high.is_empty());
                let f = flatness_hp_of(&high, p).unwrap();
                prop_assert!(f >= 1.0 - 1e-9);
                let ft = flatness_hp_of(&high.scaled(t), p).unwrap();
                prop_assert!(rel(ft, f) < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(
            predicted_hp_norm(1.0, 0.0, 4.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(predicted_flatness_hp(1.0, f64::INFINITY, 4.0).is_err());
    }
}
