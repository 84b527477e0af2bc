//! Frequency-band filters, high-pass filters of `R_s` and Littlewood-Paley
//! blocks, with bounds on what truncation discards.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::{range_coefficients, CoefficientSet, SeriesSpec};

/// Frequencies `lo <= k < hi`; `hi = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterBand {
    lo: u64,
    hi: Option<u64>,
}

impl FilterBand {
    pub fn new(lo: u64, hi: Option<u64>) -> Result<Self> {
        match hi {
            Some(h) if h <= lo => Err(invalid(format!("empty band [{lo}, {h})"))),
            _ => Ok(Self { lo, hi }),
        }
    }

    pub fn high_pass(lo: u64) -> Self {
        Self { lo, hi: None }
    }

    /// Frequencies strictly below `hi`.
    pub fn low_pass(hi: u64) -> Result<Self> {
        Self::new(0, Some(hi))
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> Option<u64> {
        self.hi
    }

    pub fn contains(&self, k: u64) -> bool {
        k >= self.lo && self.hi.map_or(true, |h| k < h)
    }
}

pub fn band_filter(c: &CoefficientSet, band: FilterBand) -> CoefficientSet {
    CoefficientSet::from_entries(c.iter().filter(|&(k, _)| band.contains(k)))
}

/// Bounds on the tail `sum_{n > n_max} n^{-2s} e^{2 pi i n^2 x}` dropped by
/// truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Bound on the sup norm, `n_max^{1-2s}/(2s-1) + n_max^{-2s}`; infinite when
    /// the tail does not converge absolutely.
    pub sup_tail: f64,
    /// Bound on the `L^2` norm from the same integral comparison on `n^{-4s}`.
    pub l2_tail: f64,
    pub convergent: bool,
}

impl TailBound {
    pub fn for_truncation(s: f64, n_max: u64) -> Self {
        let n = n_max as f64;
        let convergent = 2.0 * s > 1.0;
        let sup_tail = if convergent {
            n.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0) + n.powf(-2.0 * s)
        } else {
            f64::INFINITY
        };
        let l2_tail = if 4.0 * s > 1.0 {
            (n.powf(1.0 - 4.0 * s) / (4.0 * s - 1.0) + n.powf(-4.0 * s)).sqrt()
        } else {
            f64::INFINITY
        };
        Self {
            sup_tail,
            l2_tail,
            convergent,
        }
    }

    /// Tail rule for sweeps: the sup bound must stay below 1% of the measured norm.
    pub fn certifies(&self, measured: f64) -> bool {
        self.convergent && self.sup_tail < 0.01 * measured
    }

    /// Bound on the `L^p` norm of the tail for `p >= 2` by interpolating the sup
    /// and `L^2` bounds.
    pub fn lp_bound(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_tail;
        }
        let p = p.max(2.0);
        self.sup_tail.powf(1.0 - 2.0 / p) * self.l2_tail.powf(2.0 / p)
    }
}

pub(crate) fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r.saturating_mul(r) < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r
}

/// `(R_s)_{>= n_freq}` truncated at `spec.n_max`, i.e. the terms with
/// `n >= sqrt(n_freq)`, together with the bound on the discarded tail.
pub fn high_pass_riemann(spec: &SeriesSpec, n_freq: u64) -> Result<(CoefficientSet, TailBound)> {
    if n_freq == 0 {
        return Err(invalid("high-pass cutoff must be at least 1"));
    }
    if n_freq > spec.lambda() {
        return Err(Error::EmptyBand {
            cutoff: n_freq,
            lambda: spec.lambda(),
        });
    }
    let set = range_coefficients(spec.s(), ceil_sqrt(n_freq), spec.n_max());
    Ok((set, TailBound::for_truncation(spec.s(), spec.n_max())))
}

/// Block `sum_{A^k <= n < A^{k+1}} n^{-2s} e^{2 pi i n^2 x}`.
pub fn lp_block(spec: &SeriesSpec, a_param: u64, k: u32) -> Result<CoefficientSet> {
    if a_param < 2 {
        return Err(invalid(format!(
            "block parameter must be at least 2, got {a_param}"
        )));
    }
    let overflow = || Error::OutOfRange(format!("{a_param}^{} overflows", k + 1));
    let lo = a_param.checked_pow(k).ok_or_else(overflow)?;
    let hi = a_param.checked_pow(k + 1).ok_or_else(overflow)?;
    if hi - 1 > spec.n_max() {
        return Err(Error::OutOfRange(format!(
            "block {k} with A = {a_param} ends at n = {} beyond n_max = {}",
            hi - 1,
            spec.n_max()
        )));
    }
    Ok(range_coefficients(spec.s(), lo, hi - 1))
}

/// Model growth of `||Delta_k R_s||_p` up to constants.
pub fn predicted_block_norm(s: f64, p: f64, a_param: u64, k: u32) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid(format!("norm order must be positive, got {p}")));
    }
    let a = a_param as f64;
    let kf = k as f64;
    Ok(if p < 4.0 {
        a.powf(kf * (0.5 - 2.0 * s))
    } else if p == 4.0 {
        a.powf(kf * (0.5 - 2.0 * s)) * kf.max(1.0).powf(0.25)
    } else {
        let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
        a.powf(kf * (1.0 - 2.0 * inv - 2.0 * s))
    })
}
