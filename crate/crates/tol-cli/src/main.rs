//! `tol`: the command-line surface of the Toeplitz outlier laboratory.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure,
//! 4 acceptance-check failure (`detcheck`).

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use std::path::PathBuf;
use std::process::ExitCode;
use tol_core::experiments::{load_eig_csv, load_zero_sets, resolve_out_path, ExperimentConfig};
use tol_core::{
    CountWindow, Dist, Error, LabeledPoint, NoiseSource, PointProcessSample, PointProvenance,
    Symbol, Window,
};

type C64 = Complex<f64>;

#[derive(Parser)]
#[command(
    name = "tol",
    version,
    about = "Outliers of noisy banded Toeplitz matrices and their limiting zero processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the experiment runners; any flag left unset falls back
/// to the `--config` JSON file when one is given.
#[derive(Args, Debug, Default, Clone)]
struct ConfigFlags {
    /// JSON config file mirroring these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Symbol text, e.g. `1:1,2:1` for λ+λ².
    #[arg(long)]
    symbol: Option<String>,
    /// Matrix dimension (repeatable).
    #[arg(long = "n")]
    n: Vec<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// complex-gaussian | real-gaussian | complex-uniform-disk-normalized | rademacher
    #[arg(long)]
    dist: Option<String>,
    /// Region shrink ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Target winding index 𝔡.
    #[arg(long)]
    wind: Option<i64>,
    /// Field truncation L.
    #[arg(long = "trunc-l")]
    trunc_l: Option<u32>,
    /// Window `re0,re1,im0,im1`.
    #[arg(long)]
    window: Option<String>,
    /// Output path (root overridable through TOL_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigFlags {
    fn build(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg: ExperimentConfig = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig {
                symbol: String::new(),
                n: Vec::new(),
                gamma: 0.75,
                trials: 1,
                seed: 0,
                dist: Dist::ComplexGaussian,
                eps: 0.1,
                wind: None,
                trunc_l: 20,
                window: None,
                out: None,
            },
        };
        if let Some(s) = &self.symbol {
            cfg.symbol = s.clone();
        }
        if !self.n.is_empty() {
            cfg.n = self.n.clone();
        }
        if let Some(g) = self.gamma {
            cfg.gamma = g;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = &self.dist {
            cfg.dist = d.parse()?;
        }
        if let Some(e) = self.eps {
            cfg.eps = e;
        }
        if self.wind.is_some() {
            cfg.wind = self.wind;
        }
        if let Some(l) = self.trunc_l {
            cfg.trunc_l = l;
        }
        if let Some(w) = &self.window {
            cfg.window = Some(w.parse()?);
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if cfg.symbol.is_empty() {
            return Err(Error::Config("a symbol is required".into()));
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of T_N(a) + N^{-γ}E_N over many trials; persists the
    /// labeled spectrum as CSV plus a JSON summary.
    Simulate(ConfigFlags),
    /// Zeros of the truncated limiting field in a window, one record per
    /// seed, persisted as JSON lines.
    Field(ConfigFlags),
    /// Compare two persisted point processes through counts in windows.
    Compare(CompareArgs),
    /// The determinant-expansion identity Σ_k P_k(z) = det(T + N^{-γ}E_N)
    /// on random small configurations; exits 4 on failure.
    Detcheck(DetcheckArgs),
    /// Spectral-radius quantiles of N^{-1/2} E_N across dimensions.
    Specradius(ConfigFlags),
    /// Lévy concentration of the field value at the window center.
    Concentration(ConcentrationArgs),
    /// SVG scatter of persisted points over the symbol curve.
    Plot(PlotArgs),
}

#[derive(Args)]
struct CompareArgs {
    /// First sample family: eigen CSV or zero-set JSONL.
    #[arg(long)]
    a: PathBuf,
    /// Second sample family.
    #[arg(long)]
    b: PathBuf,
    /// Disk window `re,im,radius` (repeatable).
    #[arg(long)]
    disk: Vec<String>,
    /// Rectangle window `re0,re1,im0,im1` (repeatable).
    #[arg(long)]
    window: Vec<String>,
    /// Rank-test significance level.
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetcheckArgs {
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.75)]
    gamma: f64,
    #[arg(long = "n-min", default_value_t = 3)]
    n_min: usize,
    #[arg(long = "n-max", default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct ConcentrationArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// ε values, comma separated.
    #[arg(long = "eps-list", default_value = "0.2,0.1,0.05,0.025")]
    eps_list: String,
}

#[derive(Args)]
struct PlotArgs {
    /// Eigen CSV or zero-set JSONL with the points to draw.
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify_exit(&e))
        }
    }
}

fn classify_exit(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::SymbolParse(_)
        | Error::Dimension(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Simulate(flags) => {
            let cfg = flags.build()?;
            let run = tol_core::run_outlier_experiment(&cfg)?;
            println!(
                "simulate: {} trials, {} eigenvalues, {} outliers, {} failed trials",
                cfg.trials,
                run.rows.len(),
                run.summary.total_outliers,
                run.summary.failed_trials.len()
            );
            if let Some(out) = &cfg.out {
                println!("wrote {}", resolve_out_path(out).display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Field(flags) => {
            let cfg = flags.build()?;
            let run = tol_core::run_field_zero_experiment(&cfg)?;
            let total: usize = run
                .samples
                .iter()
                .map(|s| s.points.iter().map(|p| p.multiplicity).sum::<usize>())
                .sum();
            println!(
                "field: {} seeds, {} zeros total (mean {:.3})",
                cfg.trials,
                total,
                total as f64 / cfg.trials as f64
            );
            if let Some(out) = &cfg.out {
                println!("wrote {}", resolve_out_path(out).display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(args) => {
            let a = load_samples(&args.a)?;
            let b = load_samples(&args.b)?;
            let mut windows = Vec::new();
            for d in &args.disk {
                let p: Vec<f64> = d
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| Error::Config(format!("bad disk `{d}`")))?;
                if p.len() != 3 {
                    return Err(Error::Config(format!("disk needs re,im,radius: `{d}`")));
                }
                windows.push(CountWindow::Disk {
                    re: p[0],
                    im: p[1],
                    radius: p[2],
                });
            }
            for w in &args.window {
                windows.push(CountWindow::Rect(w.parse::<Window>()?));
            }
            if windows.is_empty() {
                return Err(Error::Config("compare needs at least one window".into()));
            }
            let report = tol_core::compare_point_processes(&a, &b, &windows, args.significance)?;
            for w in &report.windows {
                println!(
                    "window {:?}: mean {:.4} vs {:.4} (se {:.4}/{:.4}), rank p = {:.4}, agree = {}",
                    w.window,
                    w.mean_a,
                    w.mean_b,
                    w.se_a,
                    w.se_b,
                    w.rank_p,
                    w.means_agree && w.rank_agrees
                );
            }
            println!("all windows agree: {}", report.all_agree);
            if let Some(out) = &args.out {
                let path = resolve_out_path(out);
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Detcheck(args) => {
            let worst = detcheck(&args)?;
            println!(
                "detcheck: {} configurations, worst relative error {:.3e} (tolerance {:.1e})",
                args.trials, worst, args.tol
            );
            if worst < args.tol {
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL");
                Ok(ExitCode::from(4))
            }
        }
        Command::Specradius(flags) => {
            let cfg = flags.build()?;
            let table = tol_core::run_spectral_radius(&cfg)?;
            println!("N, q05, q25, q50, q75, q95");
            for (n, q) in &table.rows {
                println!(
                    "{n}, {:.4}, {:.4}, {:.4}, {:.4}, {:.4}",
                    q[0], q[1], q[2], q[3], q[4]
                );
            }
            if let Some(out) = &cfg.out {
                let path = resolve_out_path(out);
                std::fs::write(&path, serde_json::to_string_pretty(&table)?)?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Concentration(args) => {
            let cfg = args.flags.build()?;
            let eps_list: Vec<f64> = args
                .eps_list
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::Config(format!("bad eps list `{}`", args.eps_list)))?;
            let s: Symbol = cfg.symbol.parse()?;
            let wind = cfg
                .wind
                .ok_or_else(|| Error::Config("concentration needs --wind".into()))?;
            let window = cfg.window.ok_or_else(|| {
                Error::Config("concentration needs --window (its center is the sample point)".into())
            })?;
            let z = window.center();
            let region = tol_core::classify_region(&s, z)?;
            if region.wind_index != wind {
                return Err(Error::RegionMismatch {
                    expected: wind,
                    got: region.wind_index,
                });
            }
            let sampler = tol_core::field::FieldSampler::new(&s, wind, cfg.trunc_l)?;
            let base = NoiseSource::new(cfg.seed, cfg.dist);
            let samples: Vec<C64> = (0..cfg.trials)
                .map(|t| sampler.sample(&region, &base.for_trial(t as u64)))
                .collect();
            let table = tol_core::estimate_levy_concentration(&samples, &eps_list)?;
            println!("eps, sup_prob");
            for (e, p) in &table {
                println!("{e}, {p:.6}");
            }
            if let Some(out) = &cfg.out {
                let path = resolve_out_path(out);
                std::fs::write(&path, serde_json::to_string_pretty(&table)?)?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot(args) => {
            let (samples, meta) = load_samples_with_meta(&args.points)?;
            let symbol: Symbol = meta.symbol.parse()?;
            let refs: Vec<&PointProcessSample> = samples.iter().collect();
            let svg = tol_core::emit_plot(&symbol, &refs, meta.n, meta.gamma, meta.seed)?;
            let path = resolve_out_path(&args.out);
            std::fs::write(&path, svg)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

struct PlotMeta {
    symbol: String,
    n: usize,
    gamma: f64,
    seed: u64,
}

fn load_samples(path: &PathBuf) -> Result<Vec<PointProcessSample>, Error> {
    Ok(load_samples_with_meta(path)?.0)
}

/// Load a persisted point process: an eigen CSV keeps only the outliers;
/// a zero-set JSONL takes every zero.
fn load_samples_with_meta(path: &PathBuf) -> Result<(Vec<PointProcessSample>, PlotMeta), Error> {
    let is_csv = path.extension().is_some_and(|e| e == "csv");
    if is_csv {
        let csv = load_eig_csv(path)?;
        let max_trial = csv.rows.iter().map(|r| r.trial).max().unwrap_or(0);
        let mut samples: Vec<PointProcessSample> = (0..=max_trial)
            .map(|_| PointProcessSample {
                provenance: PointProvenance::Eigen,
                seed: csv.seed,
                points: Vec::new(),
            })
            .collect();
        let mut n = 0;
        let mut gamma = 0.0;
        for r in &csv.rows {
            n = r.n;
            gamma = r.gamma;
            samples[r.trial].seed = r.seed;
            if r.is_outlier {
                samples[r.trial].points.push(LabeledPoint {
                    re: r.re,
                    im: r.im,
                    wind_index: r.wind_index,
                    multiplicity: 1,
                });
            }
        }
        Ok((
            samples,
            PlotMeta {
                symbol: csv.symbol,
                n,
                gamma,
                seed: csv.seed,
            },
        ))
    } else {
        let records = load_zero_sets(path)?;
        let symbol = records
            .first()
            .map(|r| r.symbol.clone())
            .ok_or_else(|| Error::Config("empty zero-set file".into()))?;
        let seed = records.first().map(|r| r.seed).unwrap_or(0);
        let l = records.first().map(|r| r.l).unwrap_or(0);
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
                        wind_index: Some(r.d),
                        multiplicity: z.multiplicity,
                    })
                    .collect(),
            })
            .collect();
        Ok((
            samples,
            PlotMeta {
                symbol,
                n: l as usize,
                gamma: 0.0,
                seed,
            },
        ))
    }
}

/// Random small-configuration determinant identity sweep; returns the
/// worst relative error over `trials` configurations.
fn detcheck(args: &DetcheckArgs) -> Result<f64, Error> {
    use tol_core::noise::splitmix_stream;
    let mut rng = splitmix_stream(args.seed);
    let mut worst = 0.0f64;
    let mut done = 0usize;
    while done < args.trials {
        let u = |r: u64| 2.0 * (r as f64 / u64::MAX as f64) - 1.0;
        let d1 = 1 + (rng() % 2) as i64;
        let d2 = (rng() % 3) as i64;
        let mut terms = Vec::new();
        for exp in -d2..=d1 {
            terms.push((exp, C64::new(u(rng()), u(rng()))));
        }
        let s = match Symbol::new(&terms) {
            Ok(s) if s.d1() == d1 && s.d2() == d2 => s,
            _ => continue,
        };
        let span = args.n_max.saturating_sub(args.n_min);
        let n = args.n_min + if span == 0 { 0 } else { (rng() as usize) % (span + 1) };
        if n <= s.d1().max(s.d2()) as usize {
            continue;
        }
        let z = C64::new(u(rng()), u(rng()));
        let src = NoiseSource::new(rng(), Dist::ComplexGaussian);
        let mut sum = C64::new(0.0, 0.0);
        for k in 0..=n {
            sum += tol_core::compute_pk(&s, n, z, k, args.gamma, &src)?.to_c64();
        }
        let t = tol_core::build_toeplitz(&s, n, z)?;
        let e = src
            .sample_block(n)
            .scale(C64::new((n as f64).powf(-args.gamma), 0.0));
        let want = tol_core::det_lu(&t.add(&e)).to_c64();
        let rel = (sum - want).norm() / want.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        done += 1;
    }
    Ok(worst)
}
