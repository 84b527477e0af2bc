//! Subcommand implementations.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use rflat_core::sweep::hp_truncation;
use rflat_core::verify::{run_all, run_criterion, VerifyReport};
use rflat_core::{
    classify_regime, default_p_grid, eta_closed_form, eta_estimate_detailed, fit_claimed_power,
    fit_power_law, fit_with_log_correction, flatness_hp, flatness_sf, formalism_check,
    high_pass_norm, legendre_transform, lp_block, norm, predicted_block_norm, predicted_hp_norm,
    predicted_sf_root, required_n_max, riemann_coefficients, s_star, sample, spectrum_closed_form,
    structure_function_with, ClaimedFit, CurveMeta, EtaCurve, ExponentFit, FitWindow,
    FormalismReport, GridPolicy, Prediction, Regime, ScalingCurve, SeriesSpec,
};

use crate::args::*;
use crate::cache::{cached, Cache};
use crate::error::{usage, CliError, CliResult};
use crate::output::{ensure_dir, named, write_csv, write_json};
use crate::record::{Params, Real, ResultRecord, TailRecord, SCHEMA_VERSION};

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some acceptance criterion failed.
    Failed,
}

pub struct Context {
    pub out: PathBuf,
    pub cache: Option<Cache>,
    pool: rayon::ThreadPool,
}

impl Context {
    pub fn new(global: &GlobalOpts) -> CliResult<Self> {
        if global.jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        let cache = match &global.cache_dir {
            Some(dir) => Some(Cache::open(dir).map_err(|e| CliError::Io {
                path: dir.clone(),
                source: e,
            })?),
            None => None,
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(global.jobs)
            .build()
            .map_err(|e| usage(format!("cannot start {} workers: {e}", global.jobs)))?;
        Ok(Self {
            out: global.out.clone(),
            cache,
            pool,
        })
    }

    fn par_map<T: Sync, R: Send>(
        &self,
        items: &[T],
        f: impl Fn(&T) -> CliResult<R> + Sync + Send,
    ) -> CliResult<Vec<R>> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    fn dir(&self) -> CliResult<&Path> {
        ensure_dir(&self.out)?;
        Ok(&self.out)
    }

    fn with_out(&self, out: PathBuf) -> Self {
        Self {
            out,
            cache: self.cache.clone(),
            pool: rayon::ThreadPoolBuilder::new()
                .num_threads(self.pool.current_num_threads())
                .build()
                .expect("thread pool"),
        }
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    let ctx = Context::new(&cli.global)?;
    match cli.command {
        Command::Sample(a) => cmd_sample(&ctx, &a),
        Command::Norm(a) => cmd_norm(&ctx, &a),
        Command::Filter(a) => cmd_filter(&ctx, &a),
        Command::Structure(a) => cmd_structure(&ctx, &a),
        Command::Flatness(a) => cmd_flatness(&ctx, &a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Multifractal(a) => cmd_multifractal(&ctx, &a),
        Command::Figures(a) => cmd_figures(&ctx, &a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn policy_name(p: GridPolicy) -> String {
    match p {
        GridPolicy::Exact => "exact".into(),
        GridPolicy::Adaptive => "adaptive".into(),
    }
}

fn check_finite(name: &str, xs: &[f64]) -> CliResult<()> {
    match xs.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(usage(format!("--{name} must be finite, got {x}"))),
        None => Ok(()),
    }
}

fn check_orders(ps: &[f64], min: f64) -> CliResult<()> {
    match ps.iter().find(|&&p| !(p >= min)) {
        Some(p) => Err(usage(format!("--p values must be at least {min}, got {p}"))),
        None => Ok(()),
    }
}

fn check_window(points: usize, w: FitWindow, flag: &str) -> CliResult<()> {
    let need = w.skip_low + w.skip_high + rflat_core::fit::MIN_POINTS;
    if points < need {
        return Err(usage(format!(
            "{flag} gives {points} points but the fit window {}:{} needs at least {need}",
            w.skip_low, w.skip_high
        )));
    }
    Ok(())
}

fn pairs(s: &[f64], p: &[f64]) -> Vec<(f64, f64)> {
    s.iter()
        .flat_map(|&s| p.iter().map(move |&p| (s, p)))
        .collect()
}

/// Reason a high-pass or structure sweep at `(s, p)` is refused, if any.
fn sweep_refusal(s: f64, p: f64) -> Option<String> {
    let star = s_star(p).ok()?;
    if s <= star {
        Some(format!("s = {s} is at or below s_star({p}) = {star}"))
    } else if s <= 0.5 {
        Some(format!(
            "s = {s} <= 1/2: the truncation tail does not converge"
        ))
    } else {
        None
    }
}

#[derive(Serialize)]
struct Skipped {
    schema_version: u32,
    s: f64,
    p: f64,
    skipped: String,
}

fn write_skip(dir: &Path, stem: &str, s: f64, p: f64, reason: String) -> CliResult<()> {
    log::warn!("skipping {stem} at s={s}, p={p}: {reason}");
    write_json(
        &named(dir, stem, s, Some(p), "json"),
        &Skipped {
            schema_version: SCHEMA_VERSION,
            s,
            p,
            skipped: reason,
        },
    )
}

fn curve(
    scales: Vec<f64>,
    values: Vec<f64>,
    s: f64,
    p: f64,
    quantity: &str,
) -> CliResult<ScalingCurve> {
    Ok(ScalingCurve::new(
        scales,
        values,
        CurveMeta {
            s: Some(s),
            p: Some(p),
            quantity: quantity.into(),
        },
    )?)
}

/// Slope of the model curve over the same scales.
fn model_slope(scales: &[f64], model: &[f64]) -> Option<f64> {
    let c = ScalingCurve::new(scales.to_vec(), model.to_vec(), CurveMeta::default()).ok()?;
    fit_power_law(&c).ok().map(|f| f.slope)
}

// ---------------------------------------------------------------- sample

#[derive(Serialize)]
struct SampleSummary {
    schema_version: u32,
    s: f64,
    n_max: u64,
    m: usize,
    max_abs_im: f64,
    /// `max |y[j+1] - 2 y[j] + y[j-1]| * m^2` on the graph data.
    scaled_second_difference: f64,
    /// The same statistic on every other point.
    scaled_second_difference_half: f64,
}

fn scaled_second_difference(y: &[f64], step: usize) -> f64 {
    let pts: Vec<f64> = y.iter().step_by(step).copied().collect();
    let h = step as f64 / y.len() as f64;
    pts.windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / (h * h))
        .fold(0.0, f64::max)
}

fn cmd_sample(ctx: &Context, a: &SampleArgs) -> CliResult<Outcome> {
    check_finite("s", &a.s)?;
    if a.m < 3 {
        return Err(usage("--m must be at least 3"));
    }
    let specs =
        a.s.iter()
            .map(|&s| SeriesSpec::new(s, a.n_max).map_err(|e| usage(e.to_string())))
            .collect::<CliResult<Vec<_>>>()?;
    let dir = ctx.dir()?;
    ctx.par_map(&specs, |spec| {
        let s = spec.s();
        if s <= 0.5 {
            log::warn!("s = {s}: the series diverges; sampling the truncation only");
        }
        let coeffs = riemann_coefficients(spec);
        // a grid that is a multiple of 2m and alias-free
        let mut big = 2 * a.m;
        while (big as u128) <= 2 * spec.lambda() as u128 {
            big *= 2;
        }
        let grid = sample(&coeffs, big)?;
        let v = grid.values();
        let set_step = big / a.m;
        let half_step = big / (2 * a.m);
        let mut set_rows = Vec::with_capacity(a.m);
        let mut graph = Vec::with_capacity(a.m);
        for j in 0..a.m {
            let x = j as f64 / a.m as f64;
            let z = v[j * set_step];
            set_rows.push(vec![x, z.re, z.im]);
            graph.push(v[j * half_step].im / std::f64::consts::PI);
        }
        write_csv(
            &named(dir, "sample", s, None, "csv"),
            &["x", "re", "im"],
            &set_rows,
        )?;
        let graph_rows: Vec<Vec<f64>> = graph
            .iter()
            .enumerate()
            .map(|(j, &y)| vec![j as f64 / a.m as f64, y])
            .collect();
        write_csv(
            &named(dir, "graph", s, None, "csv"),
            &["x", "im_over_pi"],
            &graph_rows,
        )?;
        let summary = SampleSummary {
            schema_version: SCHEMA_VERSION,
            s,
            n_max: spec.n_max(),
            m: a.m,
            max_abs_im: set_rows.iter().map(|r| r[2].abs()).fold(0.0, f64::max),
            scaled_second_difference: scaled_second_difference(&graph, 1),
            scaled_second_difference_half: scaled_second_difference(&graph, 2),
        };
        write_json(&named(dir, "sample", s, None, "json"), &summary)?;
        println!(
            "s={s}: {} points, max|im| = {:.6}, scaled second difference {:.4e} (half grid {:.4e})",
            a.m,
            summary.max_abs_im,
            summary.scaled_second_difference,
            summary.scaled_second_difference_half
        );
        Ok(())
    })?;
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- norm

fn cmd_norm(ctx: &Context, a: &NormArgs) -> CliResult<Outcome> {
    check_finite("s", &a.s)?;
    check_orders(&a.p, f64::MIN_POSITIVE)?;
    let s_list: Vec<f64> = match a.kind {
        SeriesKind::Riemann => a.s.to_vec(),
        SeriesKind::Partial => vec![0.0],
    };
    let mut jobs = Vec::new();
    for &s in &s_list {
        for &n in &a.n_max {
            SeriesSpec::new(s, n).map_err(|e| usage(e.to_string()))?;
            for &p in a.p.iter() {
                jobs.push((s, p, n));
            }
        }
    }
    let policy = policy_name(a.grid_policy);
    let records = ctx.par_map(&jobs, |&(s, p, n)| {
        let mut params = Params::new(s, p, n as f64);
        params.n_max = Some(n);
        params.grid_policy = Some(policy.clone());
        cached(ctx.cache.as_ref(), "norm", params, |params| {
            let set = riemann_coefficients(&SeriesSpec::new(s, n)?);
            let q = norm(&set, p, a.grid_policy)?;
            let mut r = ResultRecord::new("norm", params)
                .with("value", q.value)
                .with("refinement_levels", q.refinement_levels as f64)
                .with("relative_change_last", q.relative_change_last);
            r.certified_exact = Some(q.certified_exact);
            Ok::<_, CliError>(r)
        })
    })?;
    let dir = ctx.dir()?;
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            let certified = if r.certified_exact == Some(true) {
                1.0
            } else {
                0.0
            };
            vec![
                r.params.s.0,
                r.params.p.0,
                r.params.scale.0,
                r.get("value"),
                certified,
            ]
        })
        .collect();
    write_csv(
        &dir.join("norms.csv"),
        &["s", "p", "n_max", "value", "certified"],
        &rows,
    )?;
    write_json(&dir.join("norms.json"), &records)?;
    for r in &records {
        println!(
            "s={} p={} n_max={}: {:.12e}{}",
            r.params.s.0,
            r.params.p.0,
            r.params.scale.0,
            r.get("value"),
            if r.certified_exact == Some(true) {
                " (exact)"
            } else {
                ""
            }
        );
    }
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- filter

#[derive(Serialize)]
struct CurveReport {
    schema_version: u32,
    quantity: String,
    s: f64,
    p: f64,
    window: FitWindow,
    fit: ExponentFit,
    predicted_slope: Option<f64>,
    log_corrected: Option<ExponentFit>,
    all_certified: bool,
}

fn hp_point(
    ctx: &Context,
    s: f64,
    p: f64,
    n: u64,
    ratio: u64,
    policy: GridPolicy,
) -> CliResult<ResultRecord> {
    let n_max = hp_truncation(n, ratio);
    let mut params = Params::new(s, p, n as f64);
    params.n_max = Some(n_max);
    params.grid_policy = Some(policy_name(policy));
    cached(ctx.cache.as_ref(), "hp_norm", params, |params| {
        let pt = high_pass_norm(&SeriesSpec::new(s, n_max)?, p, n, policy)?;
        let mut r = ResultRecord::new("hp_norm", params)
            .with("value", pt.value)
            .with("l2", pt.l2)
            .with("tail_certified", if pt.tail_certified { 1.0 } else { 0.0 });
        r.certified_exact = Some(pt.quad.certified_exact);
        r.tail = Some(TailRecord::from(&pt.tail));
        Ok(r)
    })
}

fn cmd_filter(ctx: &Context, a: &FilterArgs) -> CliResult<Outcome> {
    check_finite("s", &a.s)?;
    check_orders(&a.p, f64::MIN_POSITIVE)?;
    let cutoffs = a.n_range.values().map_err(|e| usage(e.to_string()))?;
    check_window(cutoffs.len(), a.fit_window, "--n-range")?;
    if a.truncation_ratio == 0 {
        return Err(usage("--truncation-ratio must be positive"));
    }
    if let Some(big_a) = a.lp_a {
        if big_a < 2 {
            return Err(usage("--lp-A must be at least 2"));
        }
        let top = (big_a as f64).powi(a.k_range.hi as i32 + 1);
        if top > 4096.0 {
            return Err(usage(format!(
                "--lp-A {big_a} with k up to {} needs n_max {top} > 4096",
                a.k_range.hi
            )));
        }
    }
    let dir = ctx.dir()?;
    for (s, p) in pairs(&a.s, &a.p) {
        if let Some(reason) = sweep_refusal(s, p) {
            write_skip(dir, "hp", s, p, reason)?;
            continue;
        }
        let pts = ctx.par_map(&cutoffs, |&n| {
            hp_point(ctx, s, p, n, a.truncation_ratio, a.grid_policy)
        })?;
        let scales: Vec<f64> = cutoffs.iter().map(|&n| n as f64).collect();
        let values: Vec<f64> = pts.iter().map(|r| r.get("value")).collect();
        let model = cutoffs
            .iter()
            .map(|&n| predicted_hp_norm(s, p, n as f64))
            .collect::<rflat_core::Result<Vec<f64>>>()?;
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .zip(&model)
            .map(|(r, &m)| {
                let tail = r.tail.as_ref().map(|t| t.sup_tail.0).unwrap_or(f64::NAN);
                vec![
                    r.params.scale.0,
                    r.get("value"),
                    m,
                    tail,
                    r.get("tail_certified"),
                ]
            })
            .collect();
        write_csv(
            &named(dir, "hp", s, Some(p), "csv"),
            &["n", "norm", "model", "sup_tail", "tail_certified"],
            &rows,
        )?;
        let c = curve(scales, values, s, p, "hp_norm")?.windowed(a.fit_window)?;
        let fit = fit_power_law(&c)?;
        let predicted_slope = model_slope(
            &cutoffs.iter().map(|&n| n as f64).collect::<Vec<_>>(),
            &model,
        );
        let report = CurveReport {
            schema_version: SCHEMA_VERSION,
            quantity: "hp_norm".into(),
            s,
            p,
            window: a.fit_window,
            fit,
            predicted_slope,
            log_corrected: None,
            all_certified: pts.iter().all(|r| r.get("tail_certified") == 1.0),
        };
        write_json(&named(dir, "hp", s, Some(p), "json"), &report)?;
        println!(
            "high-pass s={s} p={p}: slope {:.4} (model {}), R^2 {:.5}, tails certified: {}",
            fit.slope,
            predicted_slope
                .map(|x| format!("{x:.4}"))
                .unwrap_or_else(|| "n/a".into()),
            fit.r_squared,
            report.all_certified
        );

        if let Some(big_a) = a.lp_a {
            let n_max = big_a.pow(a.k_range.hi + 1) - 1;
            let ks: Vec<u32> = (a.k_range.lo..=a.k_range.hi).collect();
            let blocks = ctx.par_map(&ks, |&k| {
                let mut params = Params::new(s, p, k as f64);
                params.a = Some(big_a);
                params.n_max = Some(n_max);
                params.grid_policy = Some(policy_name(a.grid_policy));
                cached(ctx.cache.as_ref(), "block_norm", params, |params| {
                    let block = lp_block(&SeriesSpec::new(s, n_max)?, big_a, k)?;
                    let q = norm(&block, p, a.grid_policy)?;
                    let mut r = ResultRecord::new("block_norm", params)
                        .with("value", q.value)
                        .with("model", predicted_block_norm(s, p, big_a, k)?);
                    r.certified_exact = Some(q.certified_exact);
                    Ok::<_, CliError>(r)
                })
            })?;
            let rows: Vec<Vec<f64>> = blocks
                .iter()
                .map(|r| vec![r.params.scale.0, r.get("value"), r.get("model")])
                .collect();
            write_csv(
                &named(dir, "blocks", s, Some(p), "csv"),
                &["k", "norm", "model"],
                &rows,
            )?;
        }
    }
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- structure

fn sf_point(
    ctx: &Context,
    s: f64,
    p: f64,
    ell: f64,
    policy: GridPolicy,
) -> CliResult<ResultRecord> {
    let n_max = required_n_max(ell);
    let mut params = Params::new(s, p, ell);
    params.n_max = Some(n_max);
    params.grid_policy = Some(policy_name(policy));
    cached(ctx.cache.as_ref(), "structure_function", params, |params| {
        let pt = structure_function_with(&SeriesSpec::new(s, n_max)?, p, ell, policy)?;
        let mut r = ResultRecord::new("structure_function", params)
            .with("value", pt.value)
            .with("value_root", pt.value_root);
        r.certified_exact = Some(pt.quad.certified_exact);
        Ok(r)
    })
}

fn prediction_bounds(pr: Prediction) -> (f64, f64) {
    match pr {
        Prediction::Value { value } => (value, value),
        Prediction::Between { lo, hi } => (lo, hi),
    }
}

fn cmd_structure(ctx: &Context, a: &StructureArgs) -> CliResult<Outcome> {
    check_finite("s", &a.s)?;
    check_orders(&a.p, f64::MIN_POSITIVE)?;
    let ells = a.ell_range.values().map_err(|e| usage(e.to_string()))?;
    check_window(ells.len(), a.fit_window, "--ell-range")?;
    if let Some(b) = a.log_base {
        check_finite("log-base", &[b])?;
    }
    let dir = ctx.dir()?;
    for (s, p) in pairs(&a.s, &a.p) {
        if let Some(reason) = sweep_refusal(s, p) {
            write_skip(dir, "sf", s, p, reason)?;
            continue;
        }
        let pts = ctx.par_map(&ells, |&ell| sf_point(ctx, s, p, ell, a.grid_policy))?;
        let bounds = ells
            .iter()
            .map(|&ell| predicted_sf_root(s, p, ell).map(prediction_bounds))
            .collect::<rflat_core::Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .zip(&bounds)
            .map(|(r, &(lo, hi))| {
                vec![
                    r.params.scale.0,
                    r.get("value"),
                    r.get("value_root"),
                    lo,
                    hi,
                ]
            })
            .collect();
        write_csv(
            &named(dir, "sf", s, Some(p), "csv"),
            &["ell", "value", "value_root", "model_lo", "model_hi"],
            &rows,
        )?;
        let roots: Vec<f64> = pts.iter().map(|r| r.get("value_root")).collect();
        let c = curve(ells.clone(), roots, s, p, "sf_root")?.windowed(a.fit_window)?;
        let fit = fit_power_law(&c)?;
        let log_corrected = match a.log_base.map(|b| fit_with_log_correction(&c, b)) {
            Some(Ok(f)) => Some(f),
            Some(Err(e)) => {
                log::warn!("no log-corrected fit at s={s}, p={p}: {e}");
                None
            }
            None => None,
        };
        let lo: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let report = CurveReport {
            schema_version: SCHEMA_VERSION,
            quantity: "sf_root".into(),
            s,
            p,
            window: a.fit_window,
            fit,
            predicted_slope: model_slope(&ells, &lo),
            log_corrected,
            all_certified: pts.iter().all(|r| r.certified_exact == Some(true)),
        };
        write_json(&named(dir, "sf", s, Some(p), "json"), &report)?;
        print!(
            "structure s={s} p={p}: slope {:.4}, R^2 {:.5}",
            fit.slope, fit.r_squared
        );
        if let Some(l) = &report.log_corrected {
            print!(
                ", log power {:.4}",
                l.log_correction_power.unwrap_or(f64::NAN)
            );
        }
        println!();
    }
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- flatness

#[derive(Serialize)]
struct FlatnessReport {
    schema_version: u32,
    s: f64,
    p: f64,
    window: FitWindow,
    regime: Regime,
    /// Tag of the regime, e.g. `log-growth`.
    flag: String,
    f_fit: ExponentFit,
    /// Fitted `G` exponent in `1/ell`.
    g_exponent: f64,
    g_fit: ExponentFit,
    f_claimed: ClaimedFit,
}

fn regime_flag(r: &Regime) -> String {
    serde_json::to_value(r.kind)
        .ok()
        .and_then(|v| v.as_str().map(|s| s.replace('_', "-")))
        .unwrap_or_default()
}

fn flatness_curves(
    ctx: &Context,
    s: f64,
    p: f64,
    cutoffs: &[u64],
    ells: &[f64],
    ratio: u64,
) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let f = ctx.par_map(cutoffs, |&n| {
        let n_max = hp_truncation(n, ratio);
        let mut params = Params::new(s, p, n as f64);
        params.n_max = Some(n_max);
        cached(ctx.cache.as_ref(), "flatness_hp", params, |params| {
            let v = flatness_hp(&SeriesSpec::new(s, n_max)?, p, n)?;
            Ok::<_, CliError>(ResultRecord::new("flatness_hp", params).with("value", v))
        })
        .map(|r| r.get("value"))
    })?;
    let g = ctx.par_map(ells, |&ell| {
        let n_max = required_n_max(ell);
        let mut params = Params::new(s, p, ell);
        params.n_max = Some(n_max);
        cached(ctx.cache.as_ref(), "flatness_sf", params, |params| {
            let v = flatness_sf(&SeriesSpec::new(s, n_max)?, p, ell)?;
            Ok::<_, CliError>(ResultRecord::new("flatness_sf", params).with("value", v))
        })
        .map(|r| r.get("value"))
    })?;
    Ok((f, g))
}

fn cmd_flatness(ctx: &Context, a: &FlatnessArgs) -> CliResult<Outcome> {
    check_finite("s", &a.s)?;
    check_orders(&a.p, 2.0)?;
    let cutoffs = a.n_range.values().map_err(|e| usage(e.to_string()))?;
    let ells = a.ell_range.values().map_err(|e| usage(e.to_string()))?;
    check_window(cutoffs.len(), a.fit_window, "--n-range")?;
    check_window(ells.len(), a.fit_window, "--ell-range")?;
    if a.truncation_ratio == 0 {
        return Err(usage("--truncation-ratio must be positive"));
    }
    if a.p.is_empty() || a.s.is_empty() {
        log::warn!("empty parameter list; nothing to do");
        eprintln!("warning: empty --s or --p list, no output written");
        return Ok(Outcome::Success);
    }
    let dir = ctx.dir()?;
    for (s, p) in pairs(&a.s, &a.p) {
        let regime = classify_regime(s, p);
        if !regime.valid {
            write_skip(
                dir,
                "flatness",
                s,
                p,
                format!("outside the validity range: {}", regime.verdict),
            )?;
            continue;
        }
        if let Some(reason) = sweep_refusal(s, p) {
            write_skip(dir, "flatness", s, p, reason)?;
            continue;
        }
        let (f, g) = flatness_curves(ctx, s, p, &cutoffs, &ells, a.truncation_ratio)?;
        let n_scales: Vec<f64> = cutoffs.iter().map(|&n| n as f64).collect();
        let f_rows: Vec<Vec<f64>> = n_scales.iter().zip(&f).map(|(&n, &v)| vec![n, v]).collect();
        write_csv(
            &named(dir, "F", s, Some(p), "csv"),
            &["n", "flatness"],
            &f_rows,
        )?;
        let g_rows: Vec<Vec<f64>> = ells.iter().zip(&g).map(|(&l, &v)| vec![l, v]).collect();
        write_csv(
            &named(dir, "G", s, Some(p), "csv"),
            &["ell", "flatness"],
            &g_rows,
        )?;

        let fc = curve(n_scales, f, s, p, "flatness_hp")?.windowed(a.fit_window)?;
        let gc = curve(ells.clone(), g, s, p, "flatness_sf")?.windowed(a.fit_window)?;
        let f_fit = fit_power_law(&fc)?;
        let g_fit = fit_power_law(&gc)?;
        let report = FlatnessReport {
            schema_version: SCHEMA_VERSION,
            s,
            p,
            window: a.fit_window,
            flag: regime_flag(&regime),
            f_fit,
            g_exponent: -g_fit.slope,
            g_fit,
            f_claimed: fit_claimed_power(&fc, regime.f_exponent())?,
            regime,
        };
        write_json(&named(dir, "flatness", s, Some(p), "json"), &report)?;
        println!(
            "flatness s={s} p={p}: F exponent {:.3}, G exponent {:.3}; {} [{}]",
            report.f_fit.slope, report.g_exponent, report.regime.verdict, report.flag
        );
    }
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- fit

#[derive(Serialize)]
struct FitReport {
    schema_version: u32,
    input: PathBuf,
    points: usize,
    window: FitWindow,
    fit: ExponentFit,
    log_corrected: Option<ExponentFit>,
    claimed: Option<ClaimedFit>,
}

fn read_curve(path: &Path) -> CliResult<ScalingCurve> {
    let bad = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut scales = Vec::new();
    let mut values = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        if row.len() < 2 {
            return Err(bad(format!(
                "row {} has {} columns, need scale,value",
                i + 2,
                row.len()
            )));
        }
        let num = |j: usize| -> CliResult<f64> {
            row[j]
                .trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("row {}: bad number {:?}", i + 2, &row[j])))
        };
        scales.push(num(0)?);
        values.push(num(1)?);
    }
    ScalingCurve::new(
        scales,
        values,
        CurveMeta {
            quantity: "input".into(),
            ..Default::default()
        },
    )
    .map_err(|e| bad(e.to_string()))
}

fn cmd_fit(a: &FitArgs) -> CliResult<Outcome> {
    let c = read_curve(&a.input)?.windowed(a.fit_window)?;
    let report = FitReport {
        schema_version: SCHEMA_VERSION,
        input: a.input.clone(),
        points: c.len(),
        window: a.fit_window,
        fit: fit_power_law(&c)?,
        log_corrected: a
            .log_base
            .map(|b| fit_with_log_correction(&c, b))
            .transpose()?,
        claimed: a.claimed.map(|e| fit_claimed_power(&c, e)).transpose()?,
    };
    print!("{}", crate::record::emit(&report)?);
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- multifractal

#[derive(Serialize)]
struct EtaPoint {
    p: f64,
    estimate: f64,
    closed_form: f64,
    r_squared: f64,
}

#[derive(Serialize)]
struct MultifractalReport {
    schema_version: u32,
    s: f64,
    lp_a: u64,
    k_range: [u32; 2],
    eta_estimates: Vec<EtaPoint>,
    formalism: FormalismReport,
    alphas: Vec<Real>,
    d_closed_form: Vec<Real>,
    d_legendre: Vec<Real>,
}

fn isqrt_ceil(x: u64) -> u64 {
    let mut r = (x as f64).sqrt().ceil() as u64;
    while r * r < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r
}

fn cmd_multifractal(ctx: &Context, a: &MultifractalArgs) -> CliResult<Outcome> {
    check_finite("s", &a.s)?;
    if let Some(s) = a.s.iter().find(|&&s| s <= 0.5) {
        return Err(usage(format!("--s values must exceed 1/2, got {s}")));
    }
    if a.alphas < 2 {
        return Err(usage("--alphas must be at least 2"));
    }
    if !a.no_estimate {
        check_orders(&a.p, f64::MIN_POSITIVE)?;
        if a.p.iter().any(|p| p.is_infinite()) {
            return Err(usage("--p must be finite for block estimates"));
        }
        if a.lp_a < 2 {
            return Err(usage("--lp-A must be at least 2"));
        }
        let top = (a.lp_a as f64).powi(a.k_range.hi as i32 + 1);
        if top > (1u64 << 24) as f64 {
            return Err(usage(format!(
                "--lp-A {} with k up to {} reaches frequency {top} > 2^24",
                a.lp_a, a.k_range.hi
            )));
        }
        if a.k_range.hi - a.k_range.lo < 3 {
            return Err(usage("--k-range needs at least 4 blocks"));
        }
    }
    let dir = ctx.dir()?;
    let p_grid = default_p_grid();
    for &s in a.s.iter() {
        let eta = EtaCurve::closed_form(s, &p_grid)?;
        let eta_rows: Vec<Vec<f64>> = eta
            .p_grid
            .iter()
            .zip(&eta.eta)
            .map(|(&p, &e)| vec![p, e])
            .collect();
        write_csv(&named(dir, "eta", s, None, "csv"), &["p", "eta"], &eta_rows)?;

        let (lo, hi) = (s - 0.75, s);
        let alphas: Vec<f64> = (0..a.alphas)
            .map(|i| lo + (hi - lo) * i as f64 / (a.alphas - 1) as f64)
            .collect();
        let closed = spectrum_closed_form(s, &alphas)?;
        let numeric = legendre_transform(&eta, &alphas)?;
        let rows: Vec<Vec<f64>> = alphas
            .iter()
            .zip(closed.d_values.iter().zip(&numeric.d_values))
            .filter(|(_, (c, n))| c.is_finite() && n.is_finite())
            .map(|(&al, (&c, &n))| vec![al, c, n])
            .collect();
        write_csv(
            &named(dir, "spectrum", s, None, "csv"),
            &["alpha", "closed_form", "legendre"],
            &rows,
        )?;
        let formalism = formalism_check(s, &alphas)?;

        let eta_estimates = if a.no_estimate {
            Vec::new()
        } else {
            let n_max = isqrt_ceil(a.lp_a.pow(a.k_range.hi + 1));
            ctx.par_map(&a.p, |&p| {
                let mut params = Params::new(s, p, a.k_range.hi as f64);
                params.a = Some(a.lp_a);
                params.n_max = Some(n_max);
                params.k_range = Some([a.k_range.lo, a.k_range.hi]);
                let r = cached(ctx.cache.as_ref(), "eta_estimate", params, |params| {
                    let e = eta_estimate_detailed(
                        &SeriesSpec::new(s, n_max)?,
                        p,
                        a.lp_a,
                        a.k_range.lo..=a.k_range.hi,
                    )?;
                    Ok::<_, CliError>(
                        ResultRecord::new("eta_estimate", params)
                            .with("eta", e.eta)
                            .with("r_squared", e.r_squared),
                    )
                })?;
                Ok(EtaPoint {
                    p,
                    estimate: r.get("eta"),
                    closed_form: eta_closed_form(s, p)?,
                    r_squared: r.get("r_squared"),
                })
            })?
        };
        for e in &eta_estimates {
            println!(
                "eta s={s} p={}: estimate {:.4}, closed form {:.4}",
                e.p, e.estimate, e.closed_form
            );
        }
        println!(
            "formalism s={s}: max deviation {:.2e} over {} alphas, unflagged divergences {}: {}",
            formalism.max_deviation,
            formalism.checked,
            formalism.unflagged_divergences,
            if formalism.passed { "pass" } else { "FAIL" }
        );
        let report = MultifractalReport {
            schema_version: SCHEMA_VERSION,
            s,
            lp_a: a.lp_a,
            k_range: [a.k_range.lo, a.k_range.hi],
            eta_estimates,
            formalism,
            alphas: alphas.iter().map(|&x| Real(x)).collect(),
            d_closed_form: closed.d_values.iter().map(|&x| Real(x)).collect(),
            d_legendre: numeric.d_values.iter().map(|&x| Real(x)).collect(),
        };
        write_json(&named(dir, "multifractal", s, None, "json"), &report)?;
    }
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- figures

/// Figure rows: the image sets and graphs for four values of `s`.
pub const FIGURE_S: [f64; 4] = [0.75, 1.0, 1.4, 2.0];

/// `(s, p)` pairs for the flatness curves exported with the figures.
pub const FIGURE_FLATNESS: [(f64, f64); 4] = [(1.0, 4.0), (1.0, 6.0), (1.4, 6.0), (1.3, 6.0)];

fn cmd_figures(ctx: &Context, a: &FiguresArgs) -> CliResult<Outcome> {
    let sample_ctx = ctx.with_out(ctx.out.join("figure_rows"));
    cmd_sample(
        &sample_ctx,
        &SampleArgs {
            s: Reals(FIGURE_S.to_vec()),
            n_max: 256,
            m: a.m,
        },
    )?;
    let flat_ctx = ctx.with_out(ctx.out.join("flatness"));
    for (s, p) in FIGURE_FLATNESS {
        cmd_flatness(
            &flat_ctx,
            &FlatnessArgs {
                s: Reals(vec![s]),
                p: Reals(vec![p]),
                n_range: a.n_range,
                ell_range: a.ell_range,
                truncation_ratio: rflat_core::sweep::HP_TRUNCATION_RATIO,
                fit_window: FitWindow::default(),
            },
        )?;
    }
    let mf_ctx = ctx.with_out(ctx.out.join("multifractal"));
    cmd_multifractal(
        &mf_ctx,
        &MultifractalArgs {
            s: Reals(vec![1.0]),
            p: Reals::default(),
            lp_a: rflat_core::verify::C10_A,
            k_range: KRange { lo: 3, hi: 8 },
            alphas: 201,
            no_estimate: true,
        },
    )?;
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------- verify

fn cmd_verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let report = if a.only.is_empty() {
        run_all(a.quick, a.seed, |r| println!("{}", r.line()))
    } else {
        let mut criteria = Vec::new();
        for &id in &a.only {
            let r = run_criterion(id, a.seed).ok_or_else(|| usage(format!("no criterion {id}")))?;
            println!("{}", r.line());
            criteria.push(r);
        }
        let all_passed = criteria.iter().all(|c| c.passed);
        VerifyReport {
            quick: a.quick,
            seed: a.seed,
            criteria,
            all_passed,
        }
    };
    for r in report.criteria.iter().filter(|r| !r.passed) {
        println!("\n{}", r.detail());
    }
    if let Some(path) = &a.report {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            ensure_dir(parent)?;
        }
        write_json(path, &report)?;
    }
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} criteria passed",
        report.criteria.len() - failed,
        report.criteria.len()
    );
    Ok(if report.all_passed {
        Outcome::Success
    } else {
        Outcome::Failed
    })
}
