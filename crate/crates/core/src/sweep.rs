//! Scale sweeps used by the fits: high-pass cutoffs in `N` and increment
//! scales in `ell`.

use crate::error::{invalid, Result};
use crate::filters::ceil_sqrt;
use crate::flatness::{flatness_hp, high_pass_norm, HighPassPoint};
use crate::quadrature::GridPolicy;
use crate::series::SeriesSpec;
use crate::structure::{
    flatness_sf, required_n_max, structure_function_with, StructureFunctionPoint,
};

/// Default ratio `n_max / sqrt(N)` for high-pass sweeps.
pub const HP_TRUNCATION_RATIO: u64 = 4;

/// `lo, lo*factor, ...` up to and including `hi`.
pub fn geometric_u64(lo: u64, hi: u64, factor: u64) -> Result<Vec<u64>> {
    if lo == 0 || factor < 2 || hi < lo {
        return Err(invalid(format!("bad geometric range {lo}:{hi}:{factor}")));
    }
    let mut out = vec![lo];
    let mut x = lo;
    while let Some(next) = x.checked_mul(factor) {
        if next > hi {
            break;
        }
        out.push(next);
        x = next;
    }
    Ok(out)
}

/// Geometric scales `hi, hi/factor, ...` down to `lo`, in decreasing order.
pub fn geometric_scales(lo: f64, hi: f64, factor: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && factor > 1.0) {
        return Err(invalid(format!("bad scale range {lo}:{hi}:{factor}")));
    }
    let mut out = vec![hi];
    let mut x = hi;
    loop {
        let next = x / factor;
        if next < lo * (1.0 - 1e-12) {
            break;
        }
        out.push(next);
        x = next;
    }
    Ok(out)
}

/// `2^{-j}` for `j` in `j_lo..=j_hi`.
pub fn dyadic_scales(j_lo: i32, j_hi: i32) -> Vec<f64> {
    (j_lo..=j_hi).map(|j| 2f64.powi(-j)).collect()
}

/// Truncation used at high-pass cutoff `n_freq`.
pub fn hp_truncation(n_freq: u64, ratio: u64) -> u64 {
    ratio * ceil_sqrt(n_freq).max(1)
}

pub fn high_pass_sweep(
    s: f64,
    p: f64,
    cutoffs: &[u64],
    ratio: u64,
    policy: GridPolicy,
) -> Result<Vec<HighPassPoint>> {
    cutoffs
        .iter()
        .map(|&n| {
            let spec = SeriesSpec::new(s, hp_truncation(n, ratio))?;
            high_pass_norm(&spec, p, n, policy)
        })
        .collect()
}

pub fn flatness_hp_sweep(s: f64, p: f64, cutoffs: &[u64], ratio: u64) -> Result<Vec<f64>> {
    cutoffs
        .iter()
        .map(|&n| flatness_hp(&SeriesSpec::new(s, hp_truncation(n, ratio))?, p, n))
        .collect()
}

/// Structure functions with the smallest admissible truncation at each scale.
pub fn structure_sweep(
    s: f64,
    p: f64,
    ells: &[f64],
    policy: GridPolicy,
) -> Result<Vec<StructureFunctionPoint>> {
    ells.iter()
        .map(|&ell| {
            let spec = SeriesSpec::new(s, required_n_max(ell))?;
            structure_function_with(&spec, p, ell, policy)
        })
        .collect()
}

pub fn flatness_sf_sweep(s: f64, p: f64, ells: &[f64]) -> Result<Vec<f64>> {
    ells.iter()
        .map(|&ell| flatness_sf(&SeriesSpec::new(s, required_n_max(ell))?, p, ell))
        .collect()
}
