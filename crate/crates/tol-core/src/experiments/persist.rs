//! Persistence: the eigen-run CSV, run summaries, and zero-set records.
//! Every file carries the seed and the entry distribution so a run can be
//! replayed exactly.

use super::ExperimentConfig;
use crate::field::{Window, Zero};
use crate::points::PointProcessSample;
use crate::roots::classify_region;
use crate::symbol::Symbol;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// One eigenvalue row of an outlier run.
#[derive(Debug, Clone, PartialEq)]
pub struct EigRow {
    pub trial: usize,
    pub n: usize,
    pub gamma: f64,
    pub seed: u64,
    pub re: f64,
    pub im: f64,
    pub dist_to_curve: f64,
    /// `None` when the eigenvalue was within ε of the curve.
    pub wind_index: Option<i64>,
    pub is_outlier: bool,
}

/// A parsed eigen-run CSV: header metadata plus the rows.
#[derive(Debug, Clone)]
pub struct EigCsv {
    pub symbol: String,
    pub dist: String,
    pub seed: u64,
    pub eps: f64,
    pub rows: Vec<EigRow>,
}

/// Summary of an outlier run: per-trial outlier counts plus config echo.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunSummary {
    pub symbol: String,
    pub n: Vec<usize>,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub dist: String,
    pub eps: f64,
    pub outliers_per_trial: Vec<usize>,
    pub total_outliers: usize,
    pub failed_trials: Vec<usize>,
}

impl RunSummary {
    pub fn from_outliers(
        cfg: &ExperimentConfig,
        samples: &[PointProcessSample],
        failed: &[usize],
    ) -> Self {
        let outliers_per_trial: Vec<usize> = samples
            .iter()
            .map(|s| s.points.iter().map(|p| p.multiplicity).sum())
            .collect();
        let total_outliers = outliers_per_trial.iter().sum();
        RunSummary {
            symbol: cfg.symbol.clone(),
            n: cfg.n.clone(),
            gamma: cfg.gamma,
            trials: cfg.trials,
            seed: cfg.seed,
            dist: cfg.dist.to_string(),
            eps: cfg.eps,
            outliers_per_trial,
            total_outliers,
            failed_trials: failed.to_vec(),
        }
    }

    /// Recompute the summary statistics from raw CSV rows; used to check
    /// that a stored summary matches its data file.
    pub fn recompute_from_rows(&self, rows: &[EigRow]) -> Result<()> {
        let mut per_trial = vec![0usize; self.trials];
        for r in rows {
            if r.is_outlier {
                per_trial[r.trial] += 1;
            }
        }
        // failed trials have no rows and keep count zero on both sides
        if per_trial
            .iter()
            .enumerate()
            .filter(|(t, _)| !self.failed_trials.contains(t))
            .map(|(_, c)| *c)
            .ne(self
                .outliers_per_trial
                .iter()
                .copied())
        {
            return Err(Error::Domain(
                "summary outlier counts disagree with the CSV rows".into(),
            ));
        }
        Ok(())
    }
}

/// Resolve an output path against the `TOL_OUT_DIR` override.
pub fn resolve_out_path(path: &Path) -> PathBuf {
    match std::env::var_os("TOL_OUT_DIR") {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

fn fmt_f64(x: f64) -> String {
    // Round-trippable shortest representation.
    let mut s = String::new();
    write!(s, "{x}").unwrap();
    s
}

/// Write the eigen-run CSV:
/// `trial, N, gamma, seed, re, im, dist_to_curve, wind_index_or_NA, is_outlier`
/// with `# key=value` metadata lines for symbol, dist, seed, and eps.
pub fn save_eig_csv(path: &Path, cfg: &ExperimentConfig, rows: &[EigRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::new();
    writeln!(out, "# symbol={}", cfg.symbol).unwrap();
    writeln!(out, "# dist={}", cfg.dist).unwrap();
    writeln!(out, "# seed={}", cfg.seed).unwrap();
    writeln!(out, "# eps={}", fmt_f64(cfg.eps)).unwrap();
    writeln!(
        out,
        "trial,N,gamma,seed,re,im,dist_to_curve,wind_index_or_NA,is_outlier"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.n,
            fmt_f64(r.gamma),
            r.seed,
            fmt_f64(r.re),
            fmt_f64(r.im),
            fmt_f64(r.dist_to_curve),
            r.wind_index.map_or("NA".to_string(), |w| w.to_string()),
            r.is_outlier
        )
        .unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read an eigen-run CSV back.
pub fn load_eig_csv(path: &Path) -> Result<EigCsv> {
    let text = fs::read_to_string(path)?;
    let mut symbol = String::new();
    let mut dist = String::new();
    let mut seed = 0u64;
    let mut eps = 0.0f64;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(meta) = line.strip_prefix("# ") {
            if let Some((k, v)) = meta.split_once('=') {
                match k {
                    "symbol" => symbol = v.to_string(),
                    "dist" => dist = v.to_string(),
                    "seed" => seed = v.parse().map_err(|_| bad_csv("seed"))?,
                    "eps" => eps = v.parse().map_err(|_| bad_csv("eps"))?,
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with("trial,") || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad_csv(line));
        }
        rows.push(EigRow {
            trial: f[0].parse().map_err(|_| bad_csv(line))?,
            n: f[1].parse().map_err(|_| bad_csv(line))?,
            gamma: f[2].parse().map_err(|_| bad_csv(line))?,
            seed: f[3].parse().map_err(|_| bad_csv(line))?,
            re: f[4].parse().map_err(|_| bad_csv(line))?,
            im: f[5].parse().map_err(|_| bad_csv(line))?,
            dist_to_curve: f[6].parse().map_err(|_| bad_csv(line))?,
            wind_index: if f[7] == "NA" {
                None
            } else {
                Some(f[7].parse().map_err(|_| bad_csv(line))?)
            },
            is_outlier: f[8].parse().map_err(|_| bad_csv(line))?,
        });
    }
    Ok(EigCsv {
        symbol,
        dist,
        seed,
        eps,
        rows,
    })
}

fn bad_csv(what: &str) -> Error {
    Error::Domain(format!("malformed eigen CSV near `{what}`"))
}

pub fn save_summary_json(path: &Path, summary: &RunSummary) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, serde_json::to_string_pretty(summary)?)?;
    Ok(())
}

/// One persisted zero set: `{symbol, d, L, seed, dist, window, zeros}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ZeroSetRecord {
    pub symbol: String,
    /// Winding index of the region.
    pub d: i64,
    #[serde(rename = "L")]
    pub l: u32,
    pub seed: u64,
    pub dist: String,
    pub window: Window,
    pub zeros: Vec<Zero>,
}

/// Write zero sets as JSON lines: one record object per line.
pub fn save_zero_sets(path: &Path, records: &[ZeroSetRecord]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::new();
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r)?).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_zero_sets(path: &Path) -> Result<Vec<ZeroSetRecord>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line)?);
    }
    Ok(out)
}

/// Recompute region labels for every stored point and compare with the
/// stored labels; the invariant behind trusting persisted samples.
pub fn validate_sample_labels(symbol: &Symbol, sample: &PointProcessSample, eps: f64) -> Result<()> {
    for p in &sample.points {
        let z = C64::new(p.re, p.im);
        let dist = symbol.distance_to_curve(z, crate::symbol::DEFAULT_CURVE_SAMPLES);
        let recomputed = if dist > eps {
            classify_region(symbol, z).ok().map(|r| r.wind_index)
        } else {
            None
        };
        if recomputed != p.wind_index {
            return Err(Error::Domain(format!(
                "stored label {:?} at ({}, {}) disagrees with recomputed {:?}",
                p.wind_index, p.re, p.im, recomputed
            )));
        }
    }
    Ok(())
}
