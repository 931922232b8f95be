//! Config-driven experiment runners, point-process statistics, persistence,
//! and plots.
//!
//! All randomness flows from the single config seed through the
//! counter-based scheme: trial `t` uses `seed ⊕ m(t)`. Trials run in
//! parallel but results are merged in trial order, so a run is reproducible
//! independent of the parallelism degree.

mod persist;
mod plot;

pub use persist::{
    load_eig_csv, load_zero_sets, resolve_out_path, save_eig_csv, save_summary_json,
    validate_sample_labels, EigCsv, EigRow, RunSummary, ZeroSetRecord,
};
pub use plot::emit_plot;

use crate::field::{find_zeros, verify_window_in_region, FieldEvaluator, Window};
use crate::noise::{Dist, NoiseSource};
use crate::points::{LabeledPoint, PointProcessSample, PointProvenance};
use crate::roots::classify_region;
use crate::symbol::{Symbol, DEFAULT_CURVE_SAMPLES};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Experiment configuration, mirrored between a JSON file and CLI flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Symbol in the text format, e.g. `1:1,2:1`.
    pub symbol: String,
    /// Matrix dimension(s).
    #[serde(default)]
    pub n: Vec<usize>,
    /// Perturbation exponent; must exceed 1/2.
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub dist: Dist,
    /// Region shrink: points within ε of the curve are not classified.
    pub eps: f64,
    /// Target winding index for field runs.
    #[serde(default)]
    pub wind: Option<i64>,
    /// Field truncation.
    #[serde(default = "default_trunc")]
    pub trunc_l: u32,
    #[serde(default)]
    pub window: Option<Window>,
    /// Output path (CSV / JSONL / JSON depending on the runner).
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_trunc() -> u32 {
    20
}

impl ExperimentConfig {
    pub fn parse_symbol(&self) -> Result<Symbol> {
        self.symbol.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma <= 0.5 {
            return Err(Error::Config(format!(
                "gamma = {} must exceed 1/2",
                self.gamma
            )));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::Config("eps must be positive".into()));
        }
        self.parse_symbol()?;
        Ok(())
    }

    pub fn noise(&self) -> NoiseSource {
        NoiseSource::new(self.seed, self.dist)
    }
}

/// Result of an outlier run: one labeled sample per trial plus the flat
/// CSV rows and a summary.
#[derive(Debug)]
pub struct OutlierRun {
    pub samples: Vec<PointProcessSample>,
    pub rows: Vec<EigRow>,
    pub summary: RunSummary,
}

/// Per trial: build `T_N(a) + N^{-γ} E_N`, eigensolve, label each
/// eigenvalue with its distance to the curve and (when the distance
/// exceeds ε) its region's winding index. Eigensolver failures flag the
/// trial in the summary rather than being dropped silently.
pub fn run_outlier_experiment(cfg: &ExperimentConfig) -> Result<OutlierRun> {
    cfg.validate()?;
    let s = cfg.parse_symbol()?;
    let n = *cfg
        .n
        .first()
        .ok_or_else(|| Error::Config("outlier run needs a dimension".into()))?;
    let t_matrix = crate::build_toeplitz(&s, n, C64::new(0.0, 0.0))?;
    let base = cfg.noise();

    let per_trial: Vec<std::result::Result<(PointProcessSample, Vec<EigRow>), usize>> = (0
        ..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let src = base.for_trial(t as u64);
            let e = src.sample_block(n);
            let m = t_matrix.add(&e.scale(C64::new((n as f64).powf(-cfg.gamma), 0.0)));
            let eig = match crate::eigenvalues(&m) {
                Ok(v) => v,
                Err(_) => return Err(t),
            };
            let mut points = Vec::new();
            let mut rows = Vec::new();
            for z in eig {
                let dist = s.distance_to_curve(z, DEFAULT_CURVE_SAMPLES);
                let wind = if dist > cfg.eps {
                    classify_region(&s, z).ok().map(|r| r.wind_index)
                } else {
                    None
                };
                let is_outlier = dist > cfg.eps;
                rows.push(EigRow {
                    trial: t,
                    n,
                    gamma: cfg.gamma,
                    seed: src.seed,
                    re: z.re,
                    im: z.im,
                    dist_to_curve: dist,
                    wind_index: wind,
                    is_outlier,
                });
                if is_outlier {
                    points.push(LabeledPoint {
                        re: z.re,
                        im: z.im,
                        wind_index: wind,
                        multiplicity: 1,
                    });
                }
            }
            Ok((
                PointProcessSample {
                    provenance: PointProvenance::Eigen,
                    seed: src.seed,
                    points,
                },
                rows,
            ))
        })
        .collect();

    let mut samples = Vec::new();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for r in per_trial {
        match r {
            Ok((sample, mut trial_rows)) => {
                samples.push(sample);
                rows.append(&mut trial_rows);
            }
            Err(t) => failed.push(t),
        }
    }
    let summary = RunSummary::from_outliers(cfg, &samples, &failed);
    if let Some(out) = &cfg.out {
        let out = resolve_out_path(out);
        save_eig_csv(&out, cfg, &rows)?;
        save_summary_json(&out.with_extension("summary.json"), &summary)?;
    }
    Ok(OutlierRun {
        samples,
        rows,
        summary,
    })
}

/// Result of a field-zero run.
#[derive(Debug)]
pub struct FieldRun {
    pub samples: Vec<PointProcessSample>,
    pub records: Vec<ZeroSetRecord>,
}

/// Per seed: build the field evaluator at the config's truncation and find
/// its zeros inside the window. The window is verified to sit in
/// `𝒮_𝔡^{-ε}` by grid probing before any work starts (this is also where
/// empty-region symbol/winding combinations are rejected).
pub fn run_field_zero_experiment(cfg: &ExperimentConfig) -> Result<FieldRun> {
    cfg.validate()?;
    let s = cfg.parse_symbol()?;
    let wind = cfg
        .wind
        .ok_or_else(|| Error::Config("field run needs a winding target".into()))?;
    let window = cfg
        .window
        .ok_or_else(|| Error::Config("field run needs a window".into()))?;
    verify_window_in_region(&s, wind, window, cfg.eps, 8)?;
    let base = cfg.noise();

    let records: Result<Vec<ZeroSetRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let src = base.for_trial(t as u64);
            let fe = FieldEvaluator::new(&s, wind, cfg.trunc_l, src)?;
            let zeros = find_zeros(&fe, window, cfg.eps)?;
            Ok(ZeroSetRecord {
                symbol: s.to_string(),
                d: wind,
                l: cfg.trunc_l,
                seed: src.seed,
                dist: cfg.dist.to_string(),
                window,
                zeros,
            })
        })
        .collect();
    let records = records?;
    let samples = records
        .iter()
        .map(|r| PointProcessSample {
            provenance: PointProvenance::FieldZero,
            seed: r.seed,
            points: r
                .zeros
                .iter()
                .map(|z| LabeledPoint {
                    re: z.re,
                    im: z.im,
                    wind_index: Some(wind),
                    multiplicity: z.multiplicity,
                })
                .collect(),
        })
        .collect();
    if let Some(out) = &cfg.out {
        let out = resolve_out_path(out);
        persist::save_zero_sets(&out, &records)?;
    }
    Ok(FieldRun { samples, records })
}

/// Counting window for point-process comparison: a disk or a rectangle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum CountWindow {
    Disk { re: f64, im: f64, radius: f64 },
    Rect(Window),
}

impl CountWindow {
    pub fn count(&self, sample: &PointProcessSample) -> usize {
        match self {
            CountWindow::Disk { re, im, radius } => {
                sample.count_in_disk(C64::new(*re, *im), *radius)
            }
            CountWindow::Rect(w) => sample.count_in_rect(w.re0, w.re1, w.im0, w.im1),
        }
    }
}

/// Per-window comparison statistics between two families of samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowComparison {
    pub window: CountWindow,
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// Standard errors of the two means.
    pub se_a: f64,
    pub se_b: f64,
    /// Two-sided Mann–Whitney rank-test p-value on the count samples.
    pub rank_p: f64,
    /// Mean nearest-neighbor spacing inside the window (samples with at
    /// least two points).
    pub nn_spacing_a: Option<f64>,
    pub nn_spacing_b: Option<f64>,
    /// Means within 3 combined standard errors.
    pub means_agree: bool,
    /// Rank test does not reject at the configured significance.
    pub rank_agrees: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub significance: f64,
    pub windows: Vec<WindowComparison>,
    pub all_agree: bool,
}

/// Compare two point-process sample families through counts in windows.
/// Refuses to compute significance below 30 trials per side.
pub fn compare_point_processes(
    a: &[PointProcessSample],
    b: &[PointProcessSample],
    windows: &[CountWindow],
    significance: f64,
) -> Result<CompareReport> {
    if a.len() < 30 || b.len() < 30 {
        return Err(Error::InsufficientData(format!(
            "need at least 30 trials per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut out = Vec::new();
    for w in windows {
        let ca: Vec<f64> = a.iter().map(|s| w.count(s) as f64).collect();
        let cb: Vec<f64> = b.iter().map(|s| w.count(s) as f64).collect();
        let (mean_a, var_a) = mean_var(&ca);
        let (mean_b, var_b) = mean_var(&cb);
        let se_a = (var_a / ca.len() as f64).sqrt();
        let se_b = (var_b / cb.len() as f64).sqrt();
        let rank_p = mann_whitney_p(&ca, &cb);
        let nn_a = mean_nn_spacing(a, w);
        let nn_b = mean_nn_spacing(b, w);
        let combined = (se_a * se_a + se_b * se_b).sqrt();
        let means_agree = (mean_a - mean_b).abs() <= 3.0 * combined.max(f64::MIN_POSITIVE);
        let rank_agrees = rank_p >= significance;
        out.push(WindowComparison {
            window: *w,
            mean_a,
            mean_b,
            var_a,
            var_b,
            se_a,
            se_b,
            rank_p,
            nn_spacing_a: nn_a,
            nn_spacing_b: nn_b,
            means_agree,
            rank_agrees,
        });
    }
    let all_agree = out.iter().all(|w| w.means_agree && w.rank_agrees);
    Ok(CompareReport {
        significance,
        windows: out,
        all_agree,
    })
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Two-sided Mann–Whitney U test with normal approximation and tie
/// correction. Identical samples give p = 1.
pub fn mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let mut all: Vec<(f64, usize)> = a
        .iter()
        .map(|&x| (x, 0usize))
        .chain(b.iter().map(|&x| (x, 1usize)))
        .collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0));
    // mid-ranks with tie bookkeeping
    let total = all.len();
    let mut ranks = vec![0.0f64; total];
    let mut tie_term = 0.0f64;
    let mut i = 0;
    while i < total {
        let mut j = i;
        while j + 1 < total && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        for r in ranks.iter_mut().take(j + 1).skip(i) {
            *r = avg;
        }
        i = j + 1;
    }
    let r1: f64 = all
        .iter()
        .zip(&ranks)
        .filter(|((_, g), _)| *g == 0)
        .map(|(_, &r)| r)
        .sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let mu = n1 * n2 / 2.0;
    let nt = n1 + n2;
    let var = n1 * n2 / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    if var <= 0.0 {
        return 1.0; // everything tied
    }
    // continuity-corrected z
    let diff = u1 - mu;
    let z = (diff.abs() - 0.5).max(0.0) / var.sqrt();
    erfc_scaled(z)
}

/// Two-sided normal tail probability `P(|Z| > z)`.
fn erfc_scaled(z: f64) -> f64 {
    // Abramowitz–Stegun 7.1.26 complementary error function.
    let x = z / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    (poly * (-x * x).exp()).clamp(0.0, 1.0)
}

fn mean_nn_spacing(samples: &[PointProcessSample], w: &CountWindow) -> Option<f64> {
    let mut spacings = Vec::new();
    for s in samples {
        let pts: Vec<C64> = s
            .points
            .iter()
            .filter(|p| match w {
                CountWindow::Disk { re, im, radius } => {
                    (p.z() - C64::new(*re, *im)).norm() <= *radius
                }
                CountWindow::Rect(r) => r.contains(p.z()),
            })
            .map(|p| p.z())
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let mut acc = 0.0;
        for (i, p) in pts.iter().enumerate() {
            let nn = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min);
            acc += nn;
        }
        spacings.push(acc / pts.len() as f64);
    }
    if spacings.is_empty() {
        None
    } else {
        Some(spacings.iter().sum::<f64>() / spacings.len() as f64)
    }
}

/// Quantile table of the spectral radius of `N^{-1/2} E_N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralRadiusTable {
    pub dist: String,
    pub seed: u64,
    pub trials: usize,
    /// `(N, [q05, q25, q50, q75, q95])`
    pub rows: Vec<(usize, [f64; 5])>,
}

/// For each N: `trials` eigensolves of `N^{-1/2} E_N`, recording the
/// maximum eigenvalue modulus; reports the 5/25/50/75/95% quantiles.
pub fn run_spectral_radius(cfg: &ExperimentConfig) -> Result<SpectralRadiusTable> {
    cfg.validate()?;
    let base = cfg.noise();
    let mut rows = Vec::new();
    for &n in &cfg.n {
        let radii: Result<Vec<f64>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let src = base.for_trial(t as u64);
                let m = src.sample_block(n).scale(C64::new((n as f64).powf(-0.5), 0.0));
                let eig = crate::eigenvalues(&m)?;
                Ok(eig.iter().map(|e| e.norm()).fold(0.0, f64::max))
            })
            .collect();
        let mut radii = radii?;
        radii.sort_by(f64::total_cmp);
        let q = |p: f64| -> f64 {
            let idx = ((radii.len() - 1) as f64 * p).round() as usize;
            radii[idx]
        };
        rows.push((n, [q(0.05), q(0.25), q(0.50), q(0.75), q(0.95)]));
    }
    Ok(SpectralRadiusTable {
        dist: cfg.dist.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        rows,
    })
}

/// Monte Carlo estimate of the Lévy concentration function
/// `ℒ(X, ε) = sup_w P(|X − w| ≤ ε)` from precollected samples, for each ε.
/// The sup runs over the centers of an ε-cell grid covering the samples.
/// Refuses below 10⁴ samples; ε must lie in (0, e⁻¹].
pub fn estimate_levy_concentration(samples: &[C64], eps_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.len() < 10_000 {
        return Err(Error::InsufficientData(format!(
            "Lévy estimation needs at least 1e4 samples, got {}",
            samples.len()
        )));
    }
    for &e in eps_list {
        if e <= 0.0 || e > (-1.0f64).exp() {
            return Err(Error::Config(format!("ε = {e} outside (0, e^-1]")));
        }
    }
    let mut out = Vec::new();
    for &eps in eps_list {
        out.push((eps, levy_sup(samples, eps)));
    }
    Ok(out)
}

fn levy_sup(samples: &[C64], eps: f64) -> f64 {
    use std::collections::HashMap;
    let cell = eps;
    let key = |z: C64| -> (i64, i64) {
        (
            (z.re / cell).floor() as i64,
            (z.im / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<C64>> = HashMap::new();
    for &s in samples {
        grid.entry(key(s)).or_default().push(s);
    }
    let mut best = 0usize;
    for (&(cx, cy), _) in grid.iter() {
        let w = C64::new((cx as f64 + 0.5) * cell, (cy as f64 + 0.5) * cell);
        let mut count = 0usize;
        for dx in -2..=2i64 {
            for dy in -2..=2i64 {
                if let Some(v) = grid.get(&(cx + dx, cy + dy)) {
                    count += v.iter().filter(|s| (*s - w).norm() <= eps).count();
                }
            }
        }
        best = best.max(count);
    }
    best as f64 / samples.len() as f64
}
