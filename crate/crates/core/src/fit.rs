//! Log-log exponent regression, logarithmic-correction fits and the regime
//! map of the two flatness laws.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::on_line;
use crate::series::s_star;
use crate::structure::critical_order;

/// Minimum number of points in a curve or fit window.
pub const MIN_POINTS: usize = 4;

/// R² below which a claimed pure power law is refitted with a log correction.
pub const REFIT_R2: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurveMeta {
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub quantity: String,
}

/// Values of one quantity against a strictly monotone positive scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCurve {
    scales: Vec<f64>,
    values: Vec<f64>,
    pub meta: CurveMeta,
}

impl ScalingCurve {
    pub fn new(scales: Vec<f64>, values: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        if scales.len() != values.len() {
            return Err(invalid(format!(
                "{} scales but {} values",
                scales.len(),
                values.len()
            )));
        }
        if scales.len() < MIN_POINTS {
            return Err(Error::InsufficientData {
                needed: MIN_POINTS,
                got: scales.len(),
            });
        }
        if scales.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(invalid("scales must be positive and finite"));
        }
        let up = scales.windows(2).all(|w| w[0] < w[1]);
        let down = scales.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(invalid("scales must be strictly monotone"));
        }
        Ok(Self {
            scales,
            values,
            meta,
        })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Restricts to the points kept by `window`.
    pub fn windowed(&self, window: FitWindow) -> Result<Self> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.scales[a].total_cmp(&self.scales[b]));
        let n = idx.len();
        if window.skip_low + window.skip_high + MIN_POINTS > n {
            return Err(Error::InsufficientData {
                needed: window.skip_low + window.skip_high + MIN_POINTS,
                got: n,
            });
        }
        let mut keep: Vec<usize> = idx[window.skip_low..n - window.skip_high].to_vec();
        keep.sort_unstable();
        Ok(Self {
            scales: keep.iter().map(|&i| self.scales[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
            meta: self.meta.clone(),
        })
    }
}

/// Number of points dropped at the small-scale and large-scale ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub skip_low: usize,
    pub skip_high: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            skip_low: 2,
            skip_high: 2,
        }
    }
}

impl FitWindow {
    pub const FULL: FitWindow = FitWindow {
        skip_low: 0,
        skip_high: 0,
    };
}

impl std::str::FromStr for FitWindow {
    type Err = Error;

    /// `"lo:hi"` or a single count applied to both ends.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("bad fit window {s:?}")))
        };
        match s.split_once(':') {
            Some((a, b)) => Ok(Self {
                skip_low: parse(a)?,
                skip_high: parse(b)?,
            }),
            None => {
                let k = parse(s)?;
                Ok(Self {
                    skip_low: k,
                    skip_high: k,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub log_correction_power: Option<f64>,
    pub residual_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residual_max: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(ys).map(|(x, y)| y - (slope * x + intercept));
    let (ss_res, residual_max) =
        residuals.fold((0.0, 0.0f64), |(ss, mx), r| (ss + r * r, mx.max(r.abs())));
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    LineFit {
        slope,
        intercept,
        r_squared,
        residual_max,
    }
}

fn log_values(curve: &ScalingCurve) -> Result<Vec<f64>> {
    if curve.values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("log-log fits need positive finite values"));
    }
    Ok(curve.values.iter().map(|v| v.ln()).collect())
}

/// Fits `log v = slope log t + intercept`.
pub fn fit_power_law(curve: &ScalingCurve) -> Result<ExponentFit> {
    let ys = log_values(curve)?;
    let xs: Vec<f64> = curve.scales.iter().map(|t| t.ln()).collect();
    let f = ols(&xs, &ys);
    Ok(ExponentFit {
        slope: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        log_correction_power: None,
        residual_max: f.residual_max,
    })
}

/// Fits `v / t^base = c |log t|^beta` by regressing `log(v / t^base)` on
/// `log |log t|`. The returned slope is `base`; `beta` is the log-correction power.
pub fn fit_with_log_correction(curve: &ScalingCurve, base_exponent: f64) -> Result<ExponentFit> {
    let ys = log_values(curve)?;
    let logs: Vec<f64> = curve.scales.iter().map(|t| t.ln().abs()).collect();
    if logs.iter().any(|&l| l <= 1.0) {
        return Err(Error::InsufficientRange(
            "every |log scale| must exceed 1 for a log-log correction fit".into(),
        ));
    }
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 2.0 {
        return Err(Error::InsufficientRange(format!(
            "|log scale| spans {lo:.3}..{hi:.3}, ratio below 2"
        )));
    }
    let xs: Vec<f64> = logs.iter().map(|l| l.ln()).collect();
    let reduced: Vec<f64> = ys
        .iter()
        .zip(&curve.scales)
        .map(|(y, t)| y - base_exponent * t.ln())
        .collect();
    let f = ols(&xs, &reduced);
    Ok(ExponentFit {
        slope: base_exponent,
        intercept: f.intercept,
        r_squared: f.r_squared,
        log_correction_power: Some(f.slope),
        residual_max: f.residual_max,
    })
}

/// Power-law fit of a curve claimed to follow `t^claimed`, with an automatic
/// log-correction refit when the straight-line fit is poor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimedFit {
    pub fit: ExponentFit,
    pub refit: Option<ExponentFit>,
    pub warning: Option<String>,
}

pub fn fit_claimed_power(curve: &ScalingCurve, claimed: f64) -> Result<ClaimedFit> {
    let fit = fit_power_law(curve)?;
    if fit.r_squared >= REFIT_R2 {
        return Ok(ClaimedFit {
            fit,
            refit: None,
            warning: None,
        });
    }
    let refit = fit_with_log_correction(curve, claimed).ok();
    let warning = Some(match &refit {
        Some(r) => format!(
            "R^2 = {:.4} below {REFIT_R2}; log-correction refit with base {claimed} gives beta = {:.4}",
            fit.r_squared,
            r.log_correction_power.unwrap_or(f64::NAN)
        ),
        None => format!(
            "R^2 = {:.4} below {REFIT_R2}; scale range too narrow for a log-correction refit",
            fit.r_squared
        ),
    });
    Ok(ClaimedFit {
        fit,
        refit,
        warning,
    })
}

/// Growth law of a flatness in its large variable (`N`, or `1/ell`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Law {
    Constant,
    /// `(log X)^power`.
    Log {
        power: f64,
    },
    /// `X^exponent (log X)^log_power`.
    Power {
        exponent: f64,
        log_power: f64,
    },
    /// Only known to lie between constants and `(log X)^log_power_hi`.
    Bounded {
        log_power_hi: f64,
    },
}

impl Law {
    /// Exponent of the pure power part; 0 for constant, logarithmic and
    /// bounded laws.
    pub fn power_exponent(&self) -> f64 {
        match *self {
            Law::Power { exponent, .. } => exponent,
            _ => 0.0,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Law::Constant => "constant".into(),
            Law::Log { power: 1.0 } => "log-growth".into(),
            Law::Log { power } => format!("log-growth^{power}"),
            Law::Power {
                exponent,
                log_power: 0.0,
            } => {
                format!("power {}", fmt_num(exponent))
            }
            Law::Power {
                exponent,
                log_power,
            } => {
                format!(
                    "power {} with log^{}",
                    fmt_num(exponent),
                    fmt_num(log_power)
                )
            }
            Law::Bounded { log_power_hi } => {
                format!("bounded between 1 and log^{}", fmt_num(log_power_hi))
            }
        }
    }
}

fn fmt_num(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    format!("{r}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// Both flatnesses bounded.
    NonIntermittent,
    /// Logarithmic growth at `p = 4`.
    LogGrowth,
    /// Both flatnesses grow like the same power.
    MatchingPowerLaw,
    /// `F` grows like `N^{p/4-1}`, `G` like the weaker `ell^{-(3p/2-1-ps)}`.
    StructureOnlyPowerLaw,
    /// `F` intermittent while `G` is constant because the increments are
    /// dominated by the smooth part (`S^{1/p} ~ ell`).
    Smooth,
    /// On a line where only two-sided bounds are known.
    Critical,
    /// `s <= s_star(p)`.
    OutOfValidity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CriticalLines {
    pub p_is_4: bool,
    pub s_is_5_4: bool,
    pub p_is_sf_critical: bool,
    pub s_is_3_2: bool,
}

impl CriticalLines {
    pub fn any(&self) -> bool {
        self.p_is_4 || self.s_is_5_4 || self.p_is_sf_critical || self.s_is_3_2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub s: f64,
    pub p: f64,
    pub valid: bool,
    pub kind: RegimeKind,
    pub f_law: Law,
    pub g_law: Law,
    pub critical: CriticalLines,
    pub verdict: String,
}

impl Regime {
    /// Power exponent of `F` in `N`.
    pub fn f_exponent(&self) -> f64 {
        self.f_law.power_exponent()
    }

    /// Power exponent of `G` in `1/ell`, i.e. `G ~ ell^{-g_exponent}`.
    pub fn g_exponent(&self) -> f64 {
        self.g_law.power_exponent()
    }

    pub fn flatnesses_agree(&self) -> bool {
        self.f_law == self.g_law
    }
}

fn f_law(p: f64) -> Law {
    if on_line(p, 4.0) {
        Law::Log { power: 1.0 }
    } else if p < 4.0 {
        Law::Constant
    } else {
        Law::Power {
            exponent: p / 4.0 - 1.0,
            log_power: 0.0,
        }
    }
}

fn g_law(s: f64, p: f64) -> Law {
    if s < 1.25 && !on_line(s, 1.25) {
        f_law(p)
    } else if on_line(s, 1.25) {
        if on_line(p, 4.0) {
            Law::Bounded { log_power_hi: 1.0 }
        } else if p < 4.0 {
            Law::Constant
        } else {
            Law::Power {
                exponent: p / 4.0 - 1.0,
                log_power: -p / 2.0,
            }
        }
    } else if s < 1.5 {
        let pc = critical_order(s);
        if on_line(p, pc) {
            Law::Bounded {
                log_power_hi: p / 2.0,
            }
        } else if p < pc {
            Law::Constant
        } else {
            Law::Power {
                exponent: 1.5 * p - 1.0 - p * s,
                log_power: 0.0,
            }
        }
    } else {
        Law::Constant
    }
}

/// Which branch of the two flatness laws applies at `(s, p)`.
pub fn classify_regime(s: f64, p: f64) -> Regime {
    let critical = CriticalLines {
        p_is_4: on_line(p, 4.0),
        s_is_5_4: on_line(s, 1.25),
        p_is_sf_critical: s > 1.25 && s < 1.5 && on_line(p, critical_order(s)),
        s_is_3_2: on_line(s, 1.5),
    };
    let valid = p >= 2.0 && s_star(p).map(|t| s > t).unwrap_or(false);
    let f = f_law(p);
    let g = g_law(s, p);
    let kind = if !valid {
        RegimeKind::OutOfValidity
    } else if matches!(g, Law::Bounded { .. }) || (critical.s_is_5_4 && p > 4.0) {
        RegimeKind::Critical
    } else if f == g {
        match f {
            Law::Constant => RegimeKind::NonIntermittent,
            Law::Log { .. } => RegimeKind::LogGrowth,
            _ => RegimeKind::MatchingPowerLaw,
        }
    } else if matches!(g, Law::Power { .. }) {
        RegimeKind::StructureOnlyPowerLaw
    } else {
        RegimeKind::Smooth
    };
    let verdict = if valid {
        format!(
            "F {}; G {}; flatnesses {}",
            f.describe(),
            g.describe(),
            if f == g { "agree" } else { "differ" }
        )
    } else {
        format!("s = {s} outside the validity range for p = {p}")
    };
    Regime {
        s,
        p,
        valid,
        kind,
        f_law: f,
        g_law: g,
        critical,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(scales: Vec<f64>, values: Vec<f64>) -> ScalingCurve {
        ScalingCurve::new(scales, values, CurveMeta::default()).unwrap()
    }

    fn dyadic_small() -> Vec<f64> {
        (6..=16).map(|j| 2f64.powi(-j)).collect()
    }

    #[test]
    fn exact_power() {
        let t: Vec<f64> = (1..=8).map(|i| i as f64 * 1.7).collect();
        let v = t.iter().map(|x| 3.0 * x * x).collect();
        let f = fit_power_law(&curve(t, v)).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn constant_data() {
        let f = fit_power_law(&curve(vec![1.0, 2.0, 4.0, 8.0, 16.0], vec![5.0; 5])).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn t_log_t_needs_a_correction() {
        let t = dyadic_small();
        let v: Vec<f64> = t.iter().map(|x| x * (1.0 / x).ln()).collect();
        let f = fit_power_law(&curve(t.clone(), v.clone())).unwrap();
        // Oracle: the least-squares slope of u - ln(u) against -u with
        // u = ln(1/t), assembled from closed-form sums.
        let us: Vec<f64> = t.iter().map(|x| (1.0 / x).ln()).collect();
        let n = us.len() as f64;
        let mu = us.iter().sum::<f64>() / n;
        let ml = us.iter().map(|u| u.ln()).sum::<f64>() / n;
        let cov: f64 = us.iter().map(|u| (u - mu) * (u.ln() - ml)).sum();
        let var: f64 = us.iter().map(|u| (u - mu).powi(2)).sum();
        let oracle = 1.0 - cov / var;
        assert!((f.slope - oracle).abs() < 1e-12, "{} vs {oracle}", f.slope);
        assert!(f.slope > 0.8 && f.slope < 0.9);
        assert!(f.r_squared < 1.0 - 1e-6);
    }

    #[test]
    fn log_correction_recovered() {
        let t = dyadic_small();
        let v: Vec<f64> = t.iter().map(|x| x * (1.0 / x).ln().sqrt()).collect();
        let f = fit_with_log_correction(&curve(t.clone(), v), 1.0).unwrap();
        assert!((f.log_correction_power.unwrap() - 0.5).abs() < 0.05);
        assert_eq!(f.slope, 1.0);

        let v: Vec<f64> = t.iter().map(|x| 2.0 * x.powf(0.75)).collect();
        let f = fit_with_log_correction(&curve(t, v), 0.75).unwrap();
        assert!(f.log_correction_power.unwrap().abs() < 0.05);
    }

    #[test]
    fn log_correction_range_checks() {
        let narrow: Vec<f64> = (6..=10).map(|j| 2f64.powi(-j)).collect();
        let v = narrow.clone();
        assert!(matches!(
            fit_with_log_correction(&curve(narrow, v), 1.0),
            Err(Error::InsufficientRange(_))
        ));
        let near_one = vec![0.5, 0.1, 0.01, 0.001];
        assert!(matches!(
            fit_with_log_correction(&curve(near_one.clone(), near_one), 1.0),
            Err(Error::InsufficientRange(_))
        ));
        let big: Vec<f64> = (3..=12).map(|j| 4f64.powi(j)).collect();
        let v: Vec<f64> = big.iter().map(|n| n.ln()).collect();
        let f = fit_with_log_correction(&curve(big, v), 0.0).unwrap();
        assert!((f.log_correction_power.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_validation() {
        let meta = CurveMeta::default;
        assert!(matches!(
            ScalingCurve::new(vec![1.0, 2.0, 3.0], vec![1.0; 3], meta()),
            Err(Error::InsufficientData { needed: 4, got: 3 })
        ));
        assert!(ScalingCurve::new(vec![1.0, 2.0, 2.0, 3.0], vec![1.0; 4], meta()).is_err());
        assert!(ScalingCurve::new(vec![1.0, 3.0, 2.0, 4.0], vec![1.0; 4], meta()).is_err());
        assert!(ScalingCurve::new(vec![1.0, 2.0], vec![1.0; 4], meta()).is_err());
        assert!(ScalingCurve::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0; 4], meta()).is_err());
        let c = curve(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, -1.0, 1.0, 1.0]);
        assert!(matches!(fit_power_law(&c), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn windows() {
        let t = dyadic_small();
        let v: Vec<f64> = (0..t.len()).map(|i| i as f64 + 1.0).collect();
        let w = curve(t.clone(), v).windowed(FitWindow::default()).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w.scales()[0], 2f64.powi(-8));
        assert_eq!(w.values()[0], 3.0);
        assert!(curve(t[..6].to_vec(), vec![1.0; 6])
            .windowed(FitWindow::default())
            .is_err());
        assert_eq!(
            "3".parse::<FitWindow>().unwrap(),
            FitWindow {
                skip_low: 3,
                skip_high: 3
            }
        );
        assert_eq!(
            "0:1".parse::<FitWindow>().unwrap(),
            FitWindow {
                skip_low: 0,
                skip_high: 1
            }
        );
        assert!("x".parse::<FitWindow>().is_err());
    }

    #[test]
    fn claimed_power_refits() {
        // Scales e^{-2^j}: the log factor is linear in j while log t is not.
        let t: Vec<f64> = (1..=9).map(|j| (-(2f64.powi(j))).exp()).collect();
        let v: Vec<f64> = t.iter().map(|x| (1.0 / x).ln().powi(40)).collect();
        let c = fit_claimed_power(&curve(t, v), 0.0).unwrap();
        assert!(c.fit.r_squared < REFIT_R2, "{}", c.fit.r_squared);
        assert!((c.refit.unwrap().log_correction_power.unwrap() - 40.0).abs() < 1e-9);
        assert!(c.warning.is_some());
        let t = dyadic_small();
        let v: Vec<f64> = t.iter().map(|x| x.powi(3)).collect();
        let c = fit_claimed_power(&curve(t, v), 3.0).unwrap();
        assert!(c.refit.is_none() && c.warning.is_none());
    }

    #[test]
    fn regime_examples() {
        let r = classify_regime(1.0, 6.0);
        assert_eq!(r.kind, RegimeKind::MatchingPowerLaw);
        assert!((r.f_exponent() - 0.5).abs() < 1e-15 && (r.g_exponent() - 0.5).abs() < 1e-15);

        let r = classify_regime(1.4, 6.0);
        assert_eq!(r.kind, RegimeKind::Smooth);
        assert!((r.f_exponent() - 0.5).abs() < 1e-15);
        assert_eq!(r.g_law, Law::Constant);
        assert_eq!(r.verdict, "F power 0.5; G constant; flatnesses differ");

        let r = classify_regime(1.4, 12.0);
        assert_eq!(r.kind, RegimeKind::StructureOnlyPowerLaw);
        assert!((r.g_exponent() - 0.2).abs() < 1e-12);

        let r = classify_regime(1.0, 4.0);
        assert_eq!(r.kind, RegimeKind::LogGrowth);
        assert!(r.verdict.contains("log-growth"));
        assert!(r.critical.p_is_4);

        assert_eq!(classify_regime(1.0, 3.0).kind, RegimeKind::NonIntermittent);
        assert_eq!(classify_regime(1.25, 4.0).kind, RegimeKind::Critical);
        assert_eq!(classify_regime(1.375, 8.0).kind, RegimeKind::Critical);
        assert!(classify_regime(1.375, 8.0).critical.p_is_sf_critical);
        assert_eq!(classify_regime(0.3, 6.0).kind, RegimeKind::OutOfValidity);
        assert!(classify_regime(1.5, 6.0).critical.s_is_3_2);
    }

    #[test]
    fn exponents_coincide_off_critical_lines() {
        for si in 0..60 {
            let s = 0.55 + 0.025 * si as f64;
            for pi in 0..40 {
                let p = 2.0 + 0.3 * pi as f64;
                let r = classify_regime(s, p);
                if !r.valid || on_line(s, 1.25) {
                    continue;
                }
                let same = r.f_exponent() == r.g_exponent();
                let expected = p <= 4.0 || s < 1.25;
                assert_eq!(same, expected, "s={s} p={p}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            (4usize..20).prop_flat_map(|n| {
                (
                    prop::collection::vec(0.1f64..2.0, n),
                    prop::collection::vec(0.01f64..100.0, n),
                )
                    .prop_map(|(steps, vals)| {
                        let mut t = 0.5;
                        let scales = steps
                            .iter()
                            .map(|d| {
                                t *= 1.0 + d;
                                t
                            })
                            .collect();
                        (scales, vals)
                    })
            })
        }

        proptest! {
            #[test]
            fn value_scaling_shifts_intercept((t, v) in data(), c in 0.01f64..100.0) {
                let base = fit_power_law(&curve(t.clone(), v.clone())).unwrap();
                let scaled = v.iter().map(|x| x * c).collect();
                let f = fit_power_law(&curve(t, scaled)).unwrap();
                prop_assert!((f.slope - base.slope).abs() < 1e-12 * (1.0 + base.slope.abs()));
                prop_assert!((f.intercept - base.intercept - c.ln()).abs() < 1e-10);
            }

            #[test]
            fn order_does_not_matter((t, v) in data()) {
                let a = fit_power_law(&curve(t.clone(), v.clone())).unwrap();
                let rt: Vec<f64> = t.into_iter().rev().collect();
                let rv: Vec<f64> = v.into_iter().rev().collect();
                let b = fit_power_law(&curve(rt, rv)).unwrap();
                prop_assert!((a.slope - b.slope).abs() < 1e-12 * (1.0 + a.slope.abs()));
                prop_assert!((a.r_squared - b.r_squared).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&a.r_squared));
            }
        }
    }
}
