//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use rflat_core::{FitWindow, GridPolicy};

pub const CACHE_ENV: &str = "RFLAT_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "rflat",
    version,
    about = "Flatness and multifractality of generalized Riemann series"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output directory.
    #[arg(long, short, default_value = "out", global = true)]
    pub out: PathBuf,
    /// Result cache directory; no caching when unset.
    #[arg(long, env = CACHE_ENV, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for parameter sweeps.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample R_s on [0, 1] and the graph of Im R_s(x/2) / pi.
    Sample(SampleArgs),
    /// L^p norms of truncated series.
    Norm(NormArgs),
    /// High-pass norms over a cutoff sweep, and optional Littlewood-Paley blocks.
    Filter(FilterArgs),
    /// Structure functions over an increment sweep.
    Structure(StructureArgs),
    /// Both flatnesses with exponent fits and the regime verdict.
    Flatness(FlatnessArgs),
    /// Exponent fit of a two-column CSV (scale,value).
    Fit(FitArgs),
    /// Eta curves, singularity spectra and the Legendre check.
    Multifractal(MultifractalArgs),
    /// Data for the figure panels and the headline flatness curves.
    Figures(FiguresArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "0.75,1,1.4,2")]
    pub s: Reals,
    /// Truncation of the series.
    #[arg(long, default_value_t = 256)]
    pub n_max: u64,
    /// Number of points on [0, 1].
    #[arg(long, default_value_t = 4096)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeriesKind {
    /// n^{-2s} at frequency n^2.
    Riemann,
    /// Unit coefficients, i.e. s = 0.
    Partial,
}

#[derive(Debug, Clone, Args)]
pub struct NormArgs {
    #[arg(long, default_value = "1")]
    pub s: Reals,
    #[arg(long, default_value = "2,4,6")]
    pub p: Reals,
    #[arg(long, value_delimiter = ',', default_value = "64")]
    pub n_max: Vec<u64>,
    #[arg(long, value_enum, default_value = "riemann")]
    pub kind: SeriesKind,
    #[arg(long, default_value = "exact")]
    pub grid_policy: GridPolicy,
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    #[arg(long, default_value = "1")]
    pub s: Reals,
    #[arg(long, default_value = "2,6")]
    pub p: Reals,
    /// Cutoffs `lo:hi[:factor]`, e.g. `4^3:4^9:2`.
    #[arg(long, default_value = "4^3:4^9:2")]
    pub n_range: NRange,
    /// Truncation `n_max` as a multiple of `sqrt(N)`.
    #[arg(long, default_value_t = rflat_core::sweep::HP_TRUNCATION_RATIO)]
    pub truncation_ratio: u64,
    /// Also emit Littlewood-Paley block norms with this parameter.
    #[arg(long = "lp-A")]
    pub lp_a: Option<u64>,
    /// Block indices `lo:hi` for `--lp-A`.
    #[arg(long, default_value = "0:8")]
    pub k_range: KRange,
    #[arg(long, default_value = "exact")]
    pub grid_policy: GridPolicy,
    #[arg(long, default_value = "2:2")]
    pub fit_window: FitWindow,
}

#[derive(Debug, Clone, Args)]
pub struct StructureArgs {
    #[arg(long, default_value = "1")]
    pub s: Reals,
    #[arg(long, default_value = "2,6")]
    pub p: Reals,
    /// Increments `lo:hi[:factor]`, e.g. `2^-16:2^-6:2`.
    #[arg(long, default_value = "2^-16:2^-6:2")]
    pub ell_range: EllRange,
    #[arg(long, default_value = "exact")]
    pub grid_policy: GridPolicy,
    #[arg(long, default_value = "2:2")]
    pub fit_window: FitWindow,
    /// Base exponent for an additional log-corrected fit.
    #[arg(long)]
    pub log_base: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FlatnessArgs {
    #[arg(long, default_value = "1")]
    pub s: Reals,
    #[arg(long, default_value = "4,6")]
    pub p: Reals,
    #[arg(long, default_value = "2^10:2^18:2")]
    pub n_range: NRange,
    #[arg(long, default_value = "2^-16:2^-6:2")]
    pub ell_range: EllRange,
    #[arg(long, default_value_t = rflat_core::sweep::HP_TRUNCATION_RATIO)]
    pub truncation_ratio: u64,
    #[arg(long, default_value = "2:2")]
    pub fit_window: FitWindow,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with header and columns scale,value.
    #[arg(long)]
    pub input: PathBuf,
    /// Base exponent for a log-corrected fit.
    #[arg(long)]
    pub log_base: Option<f64>,
    /// Claimed exponent; triggers a log-corrected refit when R^2 is low.
    #[arg(long)]
    pub claimed: Option<f64>,
    #[arg(long, default_value = "0:0")]
    pub fit_window: FitWindow,
}

#[derive(Debug, Clone, Args)]
pub struct MultifractalArgs {
    #[arg(long, default_value = "0.6,0.8,1,1.25,1.5,2")]
    pub s: Reals,
    /// Orders at which eta is also estimated from blocks.
    #[arg(long, default_value = "2,4,8")]
    pub p: Reals,
    #[arg(long = "lp-A", default_value_t = rflat_core::verify::C10_A)]
    pub lp_a: u64,
    #[arg(long, default_value = "3:8")]
    pub k_range: KRange,
    /// Number of alpha values in the spectrum tables.
    #[arg(long, default_value_t = 201)]
    pub alphas: usize,
    /// Skip the block estimates.
    #[arg(long)]
    pub no_estimate: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    #[arg(long, default_value_t = 4096)]
    pub m: usize,
    #[arg(long, default_value = "2^8:2^16:2")]
    pub n_range: NRange,
    #[arg(long, default_value = "2^-14:2^-6:2")]
    pub ell_range: EllRange,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Oracle and invariant criteria only.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Comma-separated numbers; the empty string is the empty list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Reals(pub Vec<f64>);

impl std::ops::Deref for Reals {
    type Target = Vec<f64>;

    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl FromStr for Reals {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Reals)
    }
}

/// `2^10`, `1024`, `2^-6`, `0.5`.
fn parse_power(t: &str) -> Result<f64, String> {
    let t = t.trim();
    let v = match t.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.trim().parse().map_err(|_| format!("bad base in {t:?}"))?;
            let e: f64 = e
                .trim()
                .parse()
                .map_err(|_| format!("bad exponent in {t:?}"))?;
            b.powf(e)
        }
        None => t.parse().map_err(|_| format!("bad number {t:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{t:?} is not finite"))
    }
}

/// Geometric cutoff range `lo:hi[:factor]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: u64,
    pub hi: u64,
    pub factor: u64,
}

impl NRange {
    pub fn values(&self) -> rflat_core::Result<Vec<u64>> {
        rflat_core::sweep::geometric_u64(self.lo, self.hi, self.factor)
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected lo:hi[:factor], got {s:?}"));
        }
        let int = |t: &str| -> Result<u64, String> {
            let v = parse_power(t)?;
            if v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                Ok(v as u64)
            } else {
                Err(format!("{t:?} is not a positive integer"))
            }
        };
        let r = NRange {
            lo: int(parts[0])?,
            hi: int(parts[1])?,
            factor: parts.get(2).map(|t| int(t)).transpose()?.unwrap_or(4),
        };
        if r.hi < r.lo || r.factor < 2 {
            return Err(format!("need lo <= hi and factor >= 2 in {s:?}"));
        }
        Ok(r)
    }
}

/// Geometric increment range `lo:hi[:factor]` inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllRange {
    pub lo: f64,
    pub hi: f64,
    pub factor: f64,
}

impl EllRange {
    /// Increments in decreasing order.
    pub fn values(&self) -> rflat_core::Result<Vec<f64>> {
        rflat_core::sweep::geometric_scales(self.lo, self.hi, self.factor)
    }
}

impl FromStr for EllRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected lo:hi[:factor], got {s:?}"));
        }
        let r = EllRange {
            lo: parse_power(parts[0])?,
            hi: parse_power(parts[1])?,
            factor: parts
                .get(2)
                .map(|t| parse_power(t))
                .transpose()?
                .unwrap_or(2.0),
        };
        if !(r.lo > 0.0 && r.lo <= r.hi && r.hi < 1.0 && r.factor > 1.0) {
            return Err(format!("need 0 < lo <= hi < 1 and factor > 1 in {s:?}"));
        }
        Ok(r)
    }
}

/// Inclusive integer range `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub lo: u32,
    pub hi: u32,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo = a.trim().parse().map_err(|_| format!("bad index {a:?}"))?;
        let hi = b.trim().parse().map_err(|_| format!("bad index {b:?}"))?;
        if hi < lo {
            return Err(format!("empty range {s:?}"));
        }
        Ok(KRange { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(
            "4^3:4^9:4".parse::<NRange>().unwrap(),
            NRange {
                lo: 64,
                hi: 262144,
                factor: 4
            }
        );
        assert_eq!("16:512".parse::<NRange>().unwrap().factor, 4);
        assert!("0:8".parse::<NRange>().is_err());
        assert!("8:4".parse::<NRange>().is_err());
        assert!("2^-1:4".parse::<NRange>().is_err());
        let e: EllRange = "2^-16:2^-6".parse().unwrap();
        assert_eq!(e.values().unwrap().len(), 11);
        assert_eq!(e.values().unwrap()[0], 2f64.powi(-6));
        assert!("0.1:1.5".parse::<EllRange>().is_err());
        assert_eq!("3:8".parse::<KRange>().unwrap(), KRange { lo: 3, hi: 8 });
        assert!("8:3".parse::<KRange>().is_err());
        assert_eq!("".parse::<Reals>().unwrap().0, Vec::<f64>::new());
        assert_eq!(
            "2, inf".parse::<Reals>().unwrap().0,
            vec![2.0, f64::INFINITY]
        );
        assert!("2,x".parse::<Reals>().is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from([
            "rflat", "flatness", "--s", "1,1.4", "--p", "6", "--jobs", "2",
        ])
        .unwrap();
        assert_eq!(cli.global.jobs, 2);
        match cli.command {
            Command::Flatness(a) => {
                assert_eq!(a.s.0, vec![1.0, 1.4]);
                assert_eq!(a.fit_window, FitWindow::default());
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from(["rflat", "multifractal", "--lp-A", "4"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Multifractal(MultifractalArgs { lp_a: 4, .. })
        ));
    }
}
