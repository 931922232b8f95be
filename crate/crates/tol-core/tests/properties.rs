//! Property tests over the spec's cross-cutting invariants.

use num_complex::Complex;
use proptest::prelude::*;
use tol_core::{
    build_toeplitz, det_lu, schur_toeplitz_det, Dist, LogComplex, NoiseSource, Symbol,
};

type C64 = Complex<f64>;

fn small_coeff() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(re, im)| C64::new(re, im))
        .prop_filter("away from zero", |c| c.norm() > 0.05)
}

fn arb_symbol() -> impl Strategy<Value = Symbol> {
    (1i64..=2, 0i64..=2, proptest::collection::vec(small_coeff(), 5))
        .prop_filter_map("valid band", |(d1, d2, cs)| {
            let terms: Vec<(i64, C64)> = (-d2..=d1)
                .enumerate()
                .map(|(i, e)| (e, cs[i % cs.len()]))
                .collect();
            Symbol::new(&terms)
                .ok()
                .filter(|s| s.d1() == d1 && s.d2() == d2)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Winding numbers are stable under doubling the curve resolution.
    #[test]
    fn winding_invariant_under_resolution_doubling(
        s in arb_symbol(),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let z = C64::new(re, im);
        prop_assume!(s.distance_to_curve(z, 4096) > 1e-3);
        let w1 = s.winding_number(z, 4096).unwrap();
        let w2 = s.winding_number(z, 8192).unwrap();
        prop_assert_eq!(w1, w2);
    }

    // Outside the coefficient ℓ¹-ball the winding number vanishes.
    #[test]
    fn winding_zero_far_outside(s in arb_symbol(), angle in 0.0f64..6.28, extra in 0.1f64..3.0) {
        let z = C64::from_polar(s.coeff_l1() + extra, angle);
        prop_assert_eq!(s.winding_number(z, 4096).unwrap(), 0);
    }

    // Noise blocks of different sizes nest bit-exactly.
    #[test]
    fn noise_blocks_nest(seed in any::<u64>(), small in 1usize..6, extra in 0usize..5) {
        let src = NoiseSource::new(seed, Dist::ComplexGaussian);
        let a = src.sample_block(small);
        let b = src.sample_block(small + extra);
        for i in 0..small {
            for j in 0..small {
                prop_assert_eq!(a.get(i, j), b.get(i, j));
            }
        }
    }

    // LogComplex multiplication tracks plain complex multiplication.
    #[test]
    fn log_complex_multiplication(
        (ar, ai) in (-5.0f64..5.0, -5.0f64..5.0),
        (br, bi) in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let a = C64::new(ar, ai);
        let b = C64::new(br, bi);
        prop_assume!(a.norm() > 1e-6 && b.norm() > 1e-6);
        let lc = LogComplex::from_c64(a).mul(&LogComplex::from_c64(b));
        let want = a * b;
        prop_assert!((lc.to_c64() - want).norm() < 1e-12 * (1.0 + want.norm()));
    }

    // The product of root moduli is |a_{-d2}/a_{d1}|, independent of z,
    // whenever the symbol has a genuine negative band.
    #[test]
    fn root_modulus_product(s in arb_symbol(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        prop_assume!(s.d2() > 0);
        let lambdas = tol_core::solve_lambda(&s, C64::new(re, im)).unwrap();
        let prod: f64 = lambdas.iter().map(|l| l.norm()).product();
        let want = (s.coeff(-s.d2()) / s.coeff(s.d1())).norm();
        prop_assert!((prod - want).abs() < 1e-8 * (1.0 + want));
    }
}

// Random-symbol agreement of the two determinant routes, excluding tagged
// fallbacks (the Figure-1 sweep lives in the acceptance suite).
#[test]
fn schur_and_lu_agree_on_random_symbols() {
    let mut rng = tol_core::noise::splitmix_stream(963);
    let u = |r: u64| 2.0 * (r as f64 / u64::MAX as f64) - 1.0;
    let mut done = 0;
    while done < 50 {
        let d1 = 1 + (rng() % 2) as i64;
        let d2 = (rng() % 3) as i64;
        let terms: Vec<(i64, C64)> = (-d2..=d1)
            .map(|e| (e, C64::new(u(rng()), u(rng()))))
            .collect();
        let s = match Symbol::new(&terms) {
            Ok(s) if s.d1() == d1 && s.d2() == d2 => s,
            _ => continue,
        };
        let z = C64::new(1.5 * u(rng()), 1.5 * u(rng()));
        if s.distance_to_curve(z, 4096) < 0.1 {
            continue;
        }
        let n = 8 + (rng() % 57) as usize;
        let schur = match schur_toeplitz_det(&s, n, z) {
            Ok(v) if !v.fallback => v,
            _ => continue,
        };
        let lu = det_lu(&build_toeplitz(&s, n, z).unwrap());
        assert!(
            (schur.value.log_mag - lu.log_mag).abs() < 1e-6,
            "log-mag mismatch at N = {n}"
        );
        assert!(schur.value.phase_diff(&lu).abs() < 1e-6);
        done += 1;
    }
}

// Persisted outlier runs round-trip: CSV + summary reload, summary
// recomputation, and region labels revalidated from scratch.
#[test]
fn outlier_run_persists_and_round_trips() {
    use tol_core::experiments::{
        load_eig_csv, save_summary_json, validate_sample_labels, ExperimentConfig, RunSummary,
    };
    let dir = std::env::temp_dir().join(format!("tol-prop-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = ExperimentConfig {
        symbol: "1:1,2:1".into(),
        n: vec![50],
        gamma: 0.75,
        trials: 3,
        seed: 77,
        dist: Dist::ComplexGaussian,
        eps: 0.1,
        wind: None,
        trunc_l: 8,
        window: None,
        out: Some(dir.join("roundtrip.csv")),
    };
    let run = tol_core::run_outlier_experiment(&cfg).unwrap();
    let loaded = load_eig_csv(&dir.join("roundtrip.csv")).unwrap();
    assert_eq!(loaded.rows, run.rows);
    assert_eq!(loaded.symbol, cfg.symbol);
    run.summary.recompute_from_rows(&loaded.rows).unwrap();

    let summary_path = dir.join("roundtrip.summary.json");
    let reloaded: RunSummary =
        serde_json::from_str(&std::fs::read_to_string(&summary_path).unwrap()).unwrap();
    assert_eq!(reloaded, run.summary);
    save_summary_json(&summary_path, &reloaded).unwrap();

    let s: Symbol = cfg.symbol.parse().unwrap();
    for sample in &run.samples {
        validate_sample_labels(&s, sample, cfg.eps).unwrap();
    }
}

// Field-zero runs round-trip through the JSONL records with labels intact.
#[test]
fn field_run_persists_and_round_trips() {
    use tol_core::experiments::{load_zero_sets, ExperimentConfig};
    use tol_core::Window;
    let dir = std::env::temp_dir().join(format!("tol-prop-f-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = ExperimentConfig {
        symbol: "1:1".into(),
        n: vec![],
        gamma: 0.75,
        trials: 4,
        seed: 55,
        dist: Dist::ComplexGaussian,
        eps: 0.15,
        wind: Some(1),
        trunc_l: 16,
        window: Some(Window::new(-0.45, 0.45, -0.45, 0.45)),
        out: Some(dir.join("zeros.jsonl")),
    };
    let run = tol_core::run_field_zero_experiment(&cfg).unwrap();
    let loaded = load_zero_sets(&dir.join("zeros.jsonl")).unwrap();
    assert_eq!(loaded, run.records);
    let s: Symbol = cfg.symbol.parse().unwrap();
    for sample in &run.samples {
        tol_core::experiments::validate_sample_labels(&s, sample, cfg.eps).unwrap();
    }
}
