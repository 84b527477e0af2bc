//! Truncated generalized Riemann series and exact coefficient-level transforms.
//!
//! A truncated series `sum_{n <= n_max} n^{-2s} e^{2 pi i n^2 x}` is stored
//! sparsely as a [`CoefficientSet`]: its support is the set of perfect squares,
//! whose density up to the frequency cap is only `lambda^{-1/2}`. Dense arrays
//! are materialized only when sampling.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Entries of an increment set whose modulus falls below this fraction of the
/// largest modulus are dropped.
pub const INCREMENT_DEAD_BAND: f64 = 1e-300;

/// Regularity threshold below which the `L^p` theory of the series does not apply.
///
/// `1/4` for `p <= 4`, `1/2 - 1/p` above.
pub fn s_star(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid(format!("norm order must be positive, got {p}")));
    }
    if p <= 4.0 {
        Ok(0.25)
    } else {
        Ok(0.5 - 1.0 / p)
    }
}

/// Regularity `s` and truncation `n_max` of a generalized Riemann series.
///
/// Any real `s` is accepted; use [`SeriesSpec::is_valid_for`] to check whether a
/// norm order lies inside the range covered by the asymptotic theory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    s: f64,
    n_max: u64,
    lambda: u64,
}

impl SeriesSpec {
    pub fn new(s: f64, n_max: u64) -> Result<Self> {
        if !s.is_finite() {
            return Err(invalid(format!("regularity must be finite, got {s}")));
        }
        if n_max == 0 {
            return Err(invalid("truncation n_max must be at least 1"));
        }
        let lambda = n_max
            .checked_mul(n_max)
            .ok_or_else(|| invalid(format!("n_max = {n_max} overflows the frequency cap")))?;
        Ok(Self { s, n_max, lambda })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Frequency cap `n_max^2`.
    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn is_valid_for(&self, p: f64) -> bool {
        s_star(p).map(|t| self.s > t).unwrap_or(false)
    }

    /// Errors with [`Error::OutOfValidity`] when `s <= s_star(p)`.
    pub fn check_valid_for(&self, p: f64) -> Result<()> {
        let threshold = s_star(p)?;
        if self.s > threshold {
            Ok(())
        } else {
            Err(Error::OutOfValidity {
                s: self.s,
                p,
                threshold,
            })
        }
    }
}

/// Sparse Fourier coefficients indexed by nonnegative integer frequency.
///
/// Entries are kept sorted by frequency with no duplicates and no zero
/// amplitudes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientSet {
    entries: Vec<(u64, Complex64)>,
}

impl CoefficientSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary entries. Repeated frequencies are summed and
    /// exact zeros are discarded.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let mut raw: Vec<(u64, Complex64)> = entries.into_iter().collect();
        raw.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(u64, Complex64)> = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            match merged.last_mut() {
                Some((last, acc)) if *last == k => *acc += v,
                _ => merged.push((k, v)),
            }
        }
        merged.retain(|(_, v)| *v != Complex64::new(0.0, 0.0));
        Self { entries: merged }
    }

    /// Caller guarantees sorted, unique, nonzero entries.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(u64, Complex64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, v)| *v != Complex64::new(0.0, 0.0)));
        Self { entries }
    }

    pub fn entries(&self) -> &[(u64, Complex64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest frequency present, or 0 for the empty set.
    pub fn lambda(&self) -> u64 {
        self.entries.last().map_or(0, |&(k, _)| k)
    }

    pub fn min_frequency(&self) -> Option<u64> {
        self.entries.first().map(|&(k, _)| k)
    }

    pub fn get(&self, k: u64) -> Option<Complex64> {
        self.entries
            .binary_search_by_key(&k, |&(key, _)| key)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(k, _)| k)
    }

    /// Multiplies every amplitude by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        Self::from_entries(self.entries.iter().map(|&(k, v)| (k, v * t)))
    }

    /// Shifts every frequency down by the smallest one.
    ///
    /// The result has the same modulus as the original at every point
    /// (`f(x) e^{-2 pi i k_min x}`), so every `L^p` norm is unchanged while
    /// the frequency cap drops to the bandwidth of the set.
    pub fn demodulated(&self) -> Self {
        match self.min_frequency() {
            None | Some(0) => self.clone(),
            Some(k0) => Self::from_sorted_unchecked(
                self.entries.iter().map(|&(k, v)| (k - k0, v)).collect(),
            ),
        }
    }

    pub fn sum_squared_moduli(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.norm_sqr()).sum()
    }
}

/// Fractional part of `k * a` in `[0, 1)`, compensating the rounding error of
/// the product so large frequencies keep their phase.
pub(crate) fn frac_of_product(k: u64, a: f64) -> f64 {
    let kf = k as f64;
    let prod = kf * a;
    let err = kf.mul_add(a, -prod);
    let f = (prod - prod.floor()) + err;
    f.rem_euclid(1.0)
}

/// `e^{2 pi i k a}` for an integer frequency.
pub(crate) fn unit_phase(k: u64, a: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * frac_of_product(k, a))
}

/// Coefficients `n^{-2s}` at frequencies `n^2`, `1 <= n <= n_max`.
pub fn riemann_coefficients(spec: &SeriesSpec) -> CoefficientSet {
    range_coefficients(spec.s(), 1, spec.n_max())
}

/// Coefficients of `sum_{n_lo <= n <= n_hi} n^{-2s} e^{2 pi i n^2 x}`.
pub(crate) fn range_coefficients(s: f64, n_lo: u64, n_hi: u64) -> CoefficientSet {
    let n_lo = n_lo.max(1);
    if n_hi < n_lo {
        return CoefficientSet::empty();
    }
    let entries = (n_lo..=n_hi)
        .map(|n| {
            let amp = (n as f64).powf(-2.0 * s);
            (n * n, Complex64::new(amp, 0.0))
        })
        .filter(|(_, v)| v.re != 0.0)
        .collect();
    CoefficientSet::from_sorted_unchecked(entries)
}

/// The Zalcwasser polynomial `K_N(x) = sum_{n <= N} e^{2 pi i n^2 x}`.
pub fn zalcwasser_coefficients(n_max: u64) -> Result<CoefficientSet> {
    let spec = SeriesSpec::new(0.0, n_max)?;
    Ok(riemann_coefficients(&spec))
}

/// Exact translation `f(x + a)` realized as a phase on each coefficient.
pub fn phase_shift(c: &CoefficientSet, a: f64) -> CoefficientSet {
    CoefficientSet::from_sorted_unchecked(
        c.entries
            .iter()
            .map(|&(k, v)| (k, v * unit_phase(k, a)))
            .collect(),
    )
}

/// Coefficients of `R_s(x + ell/2) - R_s(x - ell/2)`, that is
/// `2i sin(pi n^2 ell) n^{-2s}` at frequency `n^2`.
pub fn increment_coefficients(spec: &SeriesSpec, ell: f64) -> Result<CoefficientSet> {
    increments_of(&riemann_coefficients(spec), ell)
}

/// Coefficients of `f(x + ell/2) - f(x - ell/2)` for an arbitrary set:
/// `2i sin(pi k ell) v_k`.
pub fn increments_of(c: &CoefficientSet, ell: f64) -> Result<CoefficientSet> {
    if !(ell > 0.0 && ell < 1.0) {
        return Err(invalid(format!(
            "increment scale must lie in (0, 1), got {ell}"
        )));
    }
    let half = 0.5 * ell;
    let raw: Vec<(u64, Complex64)> = c
        .iter()
        .map(|(k, v)| {
            let sine = sin_pi(2.0 * frac_of_product(k, half));
            (k, v * Complex64::new(0.0, 2.0 * sine))
        })
        .collect();
    let peak = raw.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let floor = INCREMENT_DEAD_BAND * peak;
    Ok(CoefficientSet::from_sorted_unchecked(
        raw.into_iter()
            .filter(|(_, v)| v.norm() > floor && *v != Complex64::new(0.0, 0.0))
            .collect(),
    ))
}

/// `sin(pi t)` for `t` in `[0, 2)`, exactly zero at `t = 0` and `t = 1`.
fn sin_pi(t: f64) -> f64 {
    let (u, sign) = if t >= 1.0 { (t - 1.0, -1.0) } else { (t, 1.0) };
    sign * (PI * u.min(1.0 - u)).sin()
}

/// Naive summation of the trigonometric polynomial at `x`.
pub fn direct_eval(c: &CoefficientSet, x: f64) -> Complex64 {
    c.entries.iter().map(|&(k, v)| v * unit_phase(k, x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn s_star_branches() {
        assert_eq!(s_star(4.0).unwrap(), 0.25);
        assert!((s_star(6.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s_star(1.0).unwrap(), 0.25);
        let far = s_star(1e6).unwrap();
        assert!(far < 0.5 && far > 0.499);
        assert!(matches!(s_star(0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(s_star(-2.0), Err(Error::InvalidArgument(_))));
        assert!(s_star(f64::NAN).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SeriesSpec::new(1.0, 0).is_err());
        assert!(SeriesSpec::new(f64::INFINITY, 4).is_err());
        let spec = SeriesSpec::new(1.0, 32).unwrap();
        assert_eq!(spec.lambda(), 1024);
        assert!(spec.is_valid_for(6.0));
        let rough = SeriesSpec::new(0.2, 32).unwrap();
        assert!(!rough.is_valid_for(2.0));
        assert!(matches!(
            rough.check_valid_for(2.0),
            Err(Error::OutOfValidity { .. })
        ));
    }

    #[test]
    fn riemann_small_cases() {
        let one = riemann_coefficients(&SeriesSpec::new(1.0, 2).unwrap());
        assert_eq!(one.entries(), &[(1, c(1.0, 0.0)), (4, c(0.25, 0.0))]);

        let half = riemann_coefficients(&SeriesSpec::new(0.5, 3).unwrap());
        assert_eq!(half.len(), 3);
        assert!((half.get(4).unwrap().re - 0.5).abs() < 1e-15);
        assert!((half.get(9).unwrap().re - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(half.get(2), None);
    }

    #[test]
    fn riemann_l2_mass_matches_partial_zeta() {
        // Oracle: sum of n^-4 accumulated from the small end in pairs of f64
        // (compensated summation), independent of the coefficient path.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for n in (1..=64u64).rev() {
            let term = 1.0 / ((n * n * n * n) as f64);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let set = riemann_coefficients(&SeriesSpec::new(1.0, 64).unwrap());
        assert!((set.sum_squared_moduli() - sum).abs() < 1e-12);
    }

    #[test]
    fn zalcwasser_is_s_zero() {
        let k2 = zalcwasser_coefficients(2).unwrap();
        assert_eq!(k2.entries(), &[(1, c(1.0, 0.0)), (4, c(1.0, 0.0))]);
        for n in [1u64, 3, 7, 16, 40] {
            let spec = SeriesSpec::new(0.0, n).unwrap();
            assert_eq!(
                zalcwasser_coefficients(n).unwrap(),
                riemann_coefficients(&spec)
            );
        }
        let k16 = zalcwasser_coefficients(16).unwrap();
        assert_eq!(k16.len(), 16);
        assert_eq!(k16.lambda(), 256);
        assert!(zalcwasser_coefficients(0).is_err());
    }

    #[test]
    fn phase_shift_identities() {
        let set = riemann_coefficients(&SeriesSpec::new(1.0, 8).unwrap());
        assert_eq!(phase_shift(&set, 0.0), set);
        let whole = phase_shift(&set, 1.0);
        for ((k1, v1), (k2, v2)) in set.iter().zip(whole.iter()) {
            assert_eq!(k1, k2);
            assert!((v1 - v2).norm() < 1e-15);
        }
        let shifted = phase_shift(&set, 0.3);
        assert_eq!(shifted.len(), set.len());
        for ((k1, v1), (k2, v2)) in set.iter().zip(shifted.iter()) {
            assert_eq!(k1, k2);
            assert!((v1.norm() - v2.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn increment_single_term() {
        let spec = SeriesSpec::new(1.0, 1).unwrap();
        let inc = increment_coefficients(&spec, 0.5).unwrap();
        assert_eq!(inc.len(), 1);
        assert!((inc.get(1).unwrap() - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn increment_small_scale_linearizes() {
        let spec = SeriesSpec::new(0.8, 40).unwrap();
        let ell = 1e-6;
        let inc = increment_coefficients(&spec, ell).unwrap();
        for (k, v) in inc.iter() {
            let kf = k as f64;
            if kf * ell > 0.01 {
                continue;
            }
            let n = kf.sqrt();
            let linear = TAU * kf * ell * n.powf(-1.6);
            assert!((v.im - linear).abs() <= 0.01 * linear, "k={k}");
            assert_eq!(v.re, 0.0);
        }
    }

    #[test]
    fn increment_plancherel_mass() {
        let spec = SeriesSpec::new(1.0, 32).unwrap();
        let ell = 2f64.powi(-8);
        let inc = increment_coefficients(&spec, ell).unwrap();
        let oracle: f64 = (1..=32u64)
            .map(|n| {
                let sn = (std::f64::consts::PI * (n * n) as f64 * ell).sin();
                4.0 * sn * sn / ((n * n * n * n) as f64)
            })
            .sum();
        assert!((inc.sum_squared_moduli() - oracle).abs() < 1e-12);
    }

    #[test]
    fn increment_rejects_bad_scale() {
        let spec = SeriesSpec::new(1.0, 4).unwrap();
        for ell in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(
                increment_coefficients(&spec, ell),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn direct_eval_at_origin() {
        let k1 = zalcwasser_coefficients(1).unwrap();
        assert!((direct_eval(&k1, 0.0) - c(1.0, 0.0)).norm() < 1e-15);
        let k2 = zalcwasser_coefficients(2).unwrap();
        assert!((direct_eval(&k2, 0.0) - c(2.0, 0.0)).norm() < 1e-15);
        let r1 = riemann_coefficients(&SeriesSpec::new(1.0, 4).unwrap());
        let expected = 1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0;
        assert!((direct_eval(&r1, 0.0).re - expected).abs() < 1e-15);
    }

    #[test]
    fn from_entries_merges_and_drops_zeros() {
        let set = CoefficientSet::from_entries(vec![
            (9, c(1.0, 0.0)),
            (1, c(2.0, 0.0)),
            (9, c(-1.0, 0.0)),
            (4, c(0.0, 1.0)),
        ]);
        assert_eq!(set.entries(), &[(1, c(2.0, 0.0)), (4, c(0.0, 1.0))]);
        assert_eq!(set.lambda(), 4);
        assert_eq!(CoefficientSet::empty().lambda(), 0);
    }

    #[test]
    fn demodulation_keeps_modulus() {
        let set = range_coefficients(1.0, 10, 20);
        let demod = set.demodulated();
        assert_eq!(demod.min_frequency(), Some(0));
        assert_eq!(demod.lambda(), 400 - 100);
        for x in [0.0, 0.13, 0.377, 0.9] {
            let a = direct_eval(&set, x).norm();
            let b = direct_eval(&demod, x).norm();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn large_frequency_phase_is_accurate() {
        // k a = 3 * 2^40 + 0.25 exactly representable in the inputs.
        let k = 3u64 << 42;
        let a = 0.25 + 1.0 / ((1u64 << 44) as f64);
        let f = frac_of_product(k, a);
        assert!((f - 0.75).abs() < 1e-9, "{f}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn support_is_squares(s in -1.0f64..3.0, n_max in 1u64..200) {
                let set = riemann_coefficients(&SeriesSpec::new(s, n_max).unwrap());
                prop_assert_eq!(set.len() as u64, n_max);
                for (i, k) in set.keys().enumerate() {
                    let n = i as u64 + 1;
                    prop_assert_eq!(k, n * n);
                }
            }

            #[test]
            fn phase_shift_preserves_moduli(a in -3.0f64..3.0, n_max in 1u64..60, s in 0.0f64..2.0) {
                let set = riemann_coefficients(&SeriesSpec::new(s, n_max).unwrap());
                let shifted = phase_shift(&set, a);
                prop_assert_eq!(shifted.len(), set.len());
                for ((k1, v1), (k2, v2)) in set.iter().zip(shifted.iter()) {
                    prop_assert_eq!(k1, k2);
                    prop_assert!((v1.norm() - v2.norm()).abs() <= 1e-14 * v1.norm());
                }
            }

            #[test]
            fn increment_modulus(s in 0.0f64..2.0, n_max in 1u64..80, ell in 1e-4f64..0.999) {
                let spec = SeriesSpec::new(s, n_max).unwrap();
                let inc = increment_coefficients(&spec, ell).unwrap();
                for (k, v) in inc.iter() {
                    let n = (k as f64).sqrt();
                    let expected = 2.0 * (std::f64::consts::PI * k as f64 * ell).sin().abs() * n.powf(-2.0 * s);
                    // the oracle's argument pi*k*ell carries an absolute error of a few ulps of itself
                    let arg_err = 8.0 * f64::EPSILON * std::f64::consts::PI * k as f64;
                    prop_assert!((v.norm() - expected).abs() <= 1e-12 * expected + 2.0 * arg_err * n.powf(-2.0 * s));
                }
            }

            #[test]
            fn direct_eval_is_periodic(x in -2.0f64..2.0, n_max in 1u64..30, s in 0.5f64..1.5) {
                let set = riemann_coefficients(&SeriesSpec::new(s, n_max).unwrap());
                let a = direct_eval(&set, x);
                let b = direct_eval(&set, x + 1.0);
                prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
            }
        }
    }
}
