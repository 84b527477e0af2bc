//! Cross-checks of the public API against independently computed references.

use std::collections::HashMap;
use std::f64::consts::PI;

use rflat_core::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Number of `(a, b, c, d)` in `1..=n` with `a^2 + b^2 = c^2 + d^2`, via a
/// histogram of pair sums.
fn pair_sum_count(n: u64) -> u64 {
    let mut hist: HashMap<u64, u64> = HashMap::new();
    for a in 1..=n {
        for b in 1..=n {
            *hist.entry(a * a + b * b).or_default() += 1;
        }
    }
    hist.values().map(|c| c * c).sum()
}

/// `sum_{n > N} n^{-4}` from the Euler-Maclaurin expansion.
fn zeta4_tail(n: f64) -> f64 {
    1.0 / (3.0 * n.powi(3)) - 1.0 / (2.0 * n.powi(4)) + 1.0 / (3.0 * n.powi(5))
        - 1.0 / (3.0 * n.powi(7))
}

#[test]
fn squared_amplitudes_sum_to_truncated_zeta4() {
    let set = riemann_coefficients(&SeriesSpec::new(1.0, 64).unwrap());
    let want = PI.powi(4) / 90.0 - zeta4_tail(64.0);
    let got = l2_exact(&set).powi(2);
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn l4_norm_matches_pair_sum_histogram() {
    assert_eq!(pair_sum_count(2), 6);
    for n in [1u64, 2, 4, 8, 16, 32] {
        let count = pair_sum_count(n);
        assert_eq!(l4_quadruple_count(n, 64).unwrap(), count);
        let k = riemann_coefficients(&SeriesSpec::new(0.0, n).unwrap());
        let q = norm(&k, 4.0, GridPolicy::Exact).unwrap();
        assert!(q.certified_exact);
        assert!(rel(q.value.powi(4), count as f64) < 1e-9, "n={n}");
        assert!(rel(l4_exact_counting(n).unwrap(), q.value) < 1e-9);
    }
}

#[test]
fn sampling_matches_naive_trigonometric_sum() {
    let set = riemann_coefficients(&SeriesSpec::new(1.0, 8).unwrap());
    let grid = sample(&set, 256).unwrap();
    for (j, v) in grid.values().iter().enumerate() {
        let x = j as f64 / 256.0;
        let mut want = Complex64::new(0.0, 0.0);
        for n in 1..=8u64 {
            let theta = 2.0 * PI * ((n * n * j as u64) % 256) as f64 / 256.0;
            want += Complex64::from_polar(1.0 / (n * n) as f64, theta);
        }
        assert!((v - want).norm() < 1e-10, "j={j}");
        assert!((direct_eval(&set, x) - want).norm() < 1e-10);
    }
}

#[test]
fn plancherel_on_partial_sums_and_increments() {
    let k16 = riemann_coefficients(&SeriesSpec::new(0.0, 16).unwrap());
    assert!((norm(&k16, 2.0, GridPolicy::Exact).unwrap().value - 4.0).abs() < 1e-12);

    let ell = 2f64.powi(-8);
    let sum_to = |n_max: u64| -> f64 {
        (1..=n_max)
            .rev()
            .map(|n| 4.0 * (PI * (n * n) as f64 * ell).sin().powi(2) / (n as f64).powi(4))
            .sum()
    };
    let inc = increment_coefficients(&SeriesSpec::new(1.0, 32).unwrap(), ell).unwrap();
    assert!(rel(l2_exact(&inc).powi(2), sum_to(32)) < 1e-12);
    let spec = SeriesSpec::new(1.0, required_n_max(ell)).unwrap();
    let sf = structure_function(&spec, 2.0, ell).unwrap();
    assert!(rel(sf.value, sum_to(spec.n_max())) < 1e-10);
}

#[test]
fn structure_function_routes_agree() {
    for (s, p, ell) in [
        (2.0, 2.0, 2f64.powi(-10)),
        (1.0, 4.0, 0.01),
        (0.8, 6.0, 0.1),
    ] {
        let spec = SeriesSpec::new(s, required_n_max(ell)).unwrap();
        let a = structure_function(&spec, p, ell).unwrap();
        let b = structure_function_direct(&spec, p, ell).unwrap();
        assert!(rel(a.value, b.value) < 1e-9, "s={s} p={p}");
    }
}

#[test]
fn high_pass_tail_bound_example() {
    let spec = SeriesSpec::new(1.0, 1000).unwrap();
    let (set, tail) = high_pass_riemann(&spec, 10_000).unwrap();
    let keys: Vec<u64> = set.keys().collect();
    assert_eq!(keys.first(), Some(&10_000));
    assert_eq!(keys.last(), Some(&1_000_000));
    assert_eq!(keys.len(), 901);
    assert!((tail.sup_tail - (1e-3 + 1e-6)).abs() < 1e-15);
    assert!(tail.convergent);
}

#[test]
fn block_norm_exponents() {
    // s=1: p=2 gives A^{-3k/2}, p=6 gives A^{-4k/3}
    let b2 = predicted_block_norm(1.0, 2.0, 2, 4).unwrap();
    assert!(rel(b2, 2f64.powf(-6.0)) < 1e-12);
    let b6 = predicted_block_norm(1.0, 6.0, 2, 3).unwrap();
    assert!(rel(b6, 2f64.powf(-4.0)) < 1e-12);
    let flat = predicted_block_norm(0.25, 2.0, 2, 7).unwrap();
    assert!((flat - 1.0).abs() < 1e-12);
}

#[test]
fn model_laws_closed_forms() {
    let n = 1e6f64;
    assert_eq!(predicted_flatness_hp(1.0, 3.0, n).unwrap(), 1.0);
    assert!(rel(predicted_flatness_hp(1.0, 8.0, n).unwrap(), n) < 1e-12);
    assert_eq!(
        predicted_flatness_hp(0.9, 6.0, n).unwrap(),
        predicted_flatness_hp(1.3, 6.0, n).unwrap()
    );
    assert!(rel(predicted_hp_norm(1.0, 6.0, n).unwrap(), n.powf(-2.0 / 3.0)) < 1e-12);
    assert!(rel(predicted_hp_norm(1.0, 2.0, n).unwrap(), n.powf(-0.75)) < 1e-12);
    assert!(
        rel(
            predicted_hp_norm(1.0, f64::INFINITY, n).unwrap(),
            n.powf(-0.5)
        ) < 1e-12
    );
    assert!(rel(zalcwasser_psi(6.0, n).unwrap(), n.powf(2.0 / 3.0)) < 1e-12);

    let ell = 1e-4f64;
    let r = predicted_sf_root(1.4, 12.0, ell).unwrap().point().unwrap();
    assert!(rel(r, ell.powf(1.4 + 1.0 / 12.0 - 0.5)) < 1e-12);
    let r = predicted_sf_root(2.0, 7.0, ell).unwrap().point().unwrap();
    assert!(rel(r, ell) < 1e-12);
    assert!((s_star(6.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(s_star(4.0).unwrap(), 0.25);
}

#[test]
fn regime_examples() {
    let r = classify_regime(1.0, 6.0);
    assert!((r.f_exponent() - 0.5).abs() < 1e-12);
    assert!((r.g_exponent() - 0.5).abs() < 1e-12);
    assert!(r.flatnesses_agree());

    let r = classify_regime(1.4, 6.0);
    assert!((r.f_exponent() - 0.5).abs() < 1e-12);
    assert_eq!(r.g_exponent(), 0.0);
    assert!(!r.flatnesses_agree());

    let r = classify_regime(1.4, 12.0);
    assert!((r.g_exponent() - 0.2).abs() < 1e-12);
}

#[test]
fn eta_and_spectrum_closed_forms() {
    assert_eq!(eta_closed_form(1.0, 4.0).unwrap(), 3.0);
    assert_eq!(eta_closed_form(1.0, 8.0).unwrap(), 5.0);
    let d = spectrum_closed_form(1.0, &[0.75, 0.5, 0.6, 0.9]).unwrap();
    assert!((d.d_values[0] - 1.0).abs() < 1e-12);
    assert!(d.d_values[1].abs() < 1e-12);
    assert!((d.d_values[2] - 0.4).abs() < 1e-12);
    assert_eq!(d.d_values[3], f64::NEG_INFINITY);

    let eta = EtaCurve::closed_form(1.0, &default_p_grid()).unwrap();
    let t = legendre_transform(&eta, &[0.75, 0.6, 0.4]).unwrap();
    assert!((t.d_values[0] - 1.0).abs() < 1e-3);
    assert!((t.d_values[1] - 0.4).abs() < 1e-3);
    assert_eq!(t.d_values[2], f64::NEG_INFINITY);
}

#[test]
fn synthetic_fits() {
    let t: Vec<f64> = (6..=16).map(|j| 2f64.powi(-j)).collect();
    let meta = CurveMeta::default();
    let pure = ScalingCurve::new(
        t.clone(),
        t.iter().map(|x| 3.0 * x * x).collect(),
        meta.clone(),
    )
    .unwrap();
    let f = fit_power_law(&pure).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-12);
    assert!((f.r_squared - 1.0).abs() < 1e-12);

    let sqrt_log: Vec<f64> = t.iter().map(|x| x * (1.0 / x).ln().sqrt()).collect();
    let c = ScalingCurve::new(t.clone(), sqrt_log, meta.clone()).unwrap();
    let beta = fit_with_log_correction(&c, 1.0)
        .unwrap()
        .log_correction_power
        .unwrap();
    assert!((beta - 0.5).abs() < 0.05);

    let p = ScalingCurve::new(t.clone(), t.iter().map(|x| x.powf(0.7)).collect(), meta).unwrap();
    let beta = fit_with_log_correction(&p, 0.7)
        .unwrap()
        .log_correction_power
        .unwrap();
    assert!(beta.abs() < 0.05);
}

#[test]
fn eta_block_estimate_near_closed_form() {
    let spec = SeriesSpec::new(1.0, 1 << 9).unwrap();
    let e = eta_estimate(&spec, 2.0, 2, 3..=9).unwrap();
    assert!((e - 1.5).abs() < 0.1, "{e}");
}
