//! The limiting random analytic fields `𝔓_𝔡^L`, their closed-form
//! specializations, and zero location inside a region window.
//!
//! An evaluator caches the tableau-pair enumeration once per
//! `(symbol, 𝔡, L, seed)`: pairs sharing an exponent vector `c` also share
//! the `z`-dependence, so the noise aggregates
//! `W_c = Σ_{pairs: c(𝔵,𝔶)=c} ẑ · det(E_∞[X̂; Ŷ])` are precomputed and an
//! evaluation is just `Σ_c ∏ λ_i^{±c_i} · W_c`.
//!
//! Zeros are located by the argument principle: rectangle subdivision with
//! boundary phase winding (adaptively refined until each phase step is
//! below π/2), then Newton refinement with a numerically differenced
//! derivative. Subdivision split points carry a deterministic seed-derived
//! jitter so zeros cannot sit on shared cell edges.

use crate::linalg::DenseMatrix;
use crate::noise::{splitmix64, NoiseSource};
use crate::roots::{classify_region, solve_lambda, RegionClass};
use crate::symbol::Symbol;
use crate::tableaux::visit_pairs;
use crate::{det_lu, Error, Result, C64};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// An axis-aligned rectangle `[re0, re1] × [im0, im1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Window {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        Window { re0, re1, im0, im1 }
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn diag(&self) -> f64 {
        ((self.re1 - self.re0).powi(2) + (self.im1 - self.im0).powi(2)).sqrt()
    }

    pub fn area(&self) -> f64 {
        (self.re1 - self.re0).max(0.0) * (self.im1 - self.im0).max(0.0)
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re0 && z.re <= self.re1 && z.im >= self.im0 && z.im <= self.im1
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    /// Parse `re0,re1,im0,im1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("bad window `{s}`")))?;
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "window needs 4 comma-separated numbers, got `{s}`"
            )));
        }
        if parts[0] > parts[1] || parts[2] > parts[3] {
            return Err(Error::Config(format!("degenerate window `{s}`")));
        }
        Ok(Window::new(parts[0], parts[1], parts[2], parts[3]))
    }
}

/// A located zero with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Zero {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl Zero {
    pub fn z(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Evaluator for the truncated field `𝔓_𝔡^L` of one symbol, region index,
/// truncation, and noise realization. Immutable after construction.
pub struct FieldEvaluator {
    symbol: Symbol,
    wind: i64,
    l: u32,
    noise: NoiseSource,
    /// exponent vector → accumulated signed noise minors, sorted by
    /// (max c, c) for shell evaluations
    groups: Vec<(Vec<u32>, C64)>,
    d0: usize,
}

impl FieldEvaluator {
    /// Enumerate the pairs once and fold the noise minors into per-exponent
    /// aggregates.
    pub fn new(symbol: &Symbol, wind: i64, l: u32, noise: NoiseSource) -> Result<Self> {
        let mut map: HashMap<Vec<u32>, C64> = HashMap::new();
        let mut minors: HashMap<(Vec<u32>, Vec<u32>), C64> = HashMap::new();
        visit_pairs(symbol, wind, l, crate::tableaux::DEFAULT_PAIR_BUDGET, |p| {
            let key = (p.xhat.clone(), p.yhat.clone());
            let minor = *minors.entry(key.clone()).or_insert_with(|| {
                let k = key.0.len();
                let m = DenseMatrix::from_fn(k, k, |i, j| {
                    noise.entry(key.0[i] as u64, key.1[j] as u64)
                });
                det_lu(&m).to_c64()
            });
            let contribution = minor * (p.sign as f64);
            *map.entry(p.c.clone()).or_insert(C64::new(0.0, 0.0)) += contribution;
            Ok(())
        })?;
        let mut groups: Vec<(Vec<u32>, C64)> = map.into_iter().collect();
        groups.sort_by(|a, b| {
            let ka = (*a.0.iter().max().unwrap_or(&0), a.0.clone());
            let kb = (*b.0.iter().max().unwrap_or(&0), b.0.clone());
            ka.cmp(&kb)
        });
        Ok(FieldEvaluator {
            symbol: symbol.clone(),
            wind,
            l,
            noise,
            groups,
            d0: (symbol.d1() - wind) as usize,
        })
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn wind(&self) -> i64 {
        self.wind
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn noise(&self) -> NoiseSource {
        self.noise
    }

    /// Number of cached exponent groups.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Full evaluation with region classification and cross-checks.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let region = classify_region(&self.symbol, z)?;
        if region.wind_index != self.wind {
            return Err(Error::RegionMismatch {
                expected: self.wind,
                got: region.wind_index,
            });
        }
        Ok(self.eval_at_region(&region, self.l))
    }

    /// Fast-path evaluation: root solve and modulus split only, no curve
    /// sampling. The window is expected to be pre-verified.
    pub fn eval_fast(&self, z: C64) -> Result<C64> {
        let lambdas = solve_lambda(&self.symbol, z)?;
        let d0 = lambdas.iter().filter(|l| l.norm() > 1.0).count();
        if d0 != self.d0 {
            return Err(Error::RegionMismatch {
                expected: self.wind,
                got: self.symbol.d1() - d0 as i64,
            });
        }
        Ok(self.eval_lambdas(&lambdas, self.l))
    }

    /// Evaluation at an explicit (pre-classified) region.
    pub fn eval_at_region(&self, region: &RegionClass, l: u32) -> C64 {
        self.eval_lambdas(&region.lambdas, l)
    }

    /// Evaluation from explicit λ values, truncated at `max c_i ≤ l`.
    pub fn eval_lambdas(&self, lambdas: &[C64], l: u32) -> C64 {
        self.eval_shell(lambdas, 0, l)
    }

    /// Partial sum over groups with `l_lo < max c_i ≤ l_hi` (use
    /// `l_lo = 0` with the convention that it includes `max c = 0`).
    pub fn eval_shell(&self, lambdas: &[C64], l_lo: u32, l_hi: u32) -> C64 {
        let lmax = self.l as usize;
        let pow: Vec<Vec<C64>> = lambdas
            .iter()
            .enumerate()
            .map(|(i, &lam)| {
                let base = if i < self.d0 {
                    C64::new(1.0, 0.0) / lam
                } else {
                    lam
                };
                let mut v = Vec::with_capacity(lmax + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=lmax {
                    v.push(acc);
                    acc *= base;
                }
                v
            })
            .collect();
        let mut sum = C64::new(0.0, 0.0);
        let mut comp = C64::new(0.0, 0.0);
        for (c, w) in &self.groups {
            let worst = *c.iter().max().unwrap_or(&0);
            if worst > l_hi || (l_lo > 0 && worst <= l_lo) {
                continue;
            }
            let mut coeff = *w;
            for (i, &e) in c.iter().enumerate() {
                coeff *= pow[i][e as usize];
            }
            let y = coeff - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }
}

/// Repeated sampling of the field value at a fixed point across noise
/// seeds: the pair enumeration is shared, only the noise aggregates are
/// recomputed per seed.
pub struct FieldSampler {
    pairs: Vec<crate::tableaux::FieldTableauPair>,
    d0: usize,
}

impl FieldSampler {
    pub fn new(symbol: &Symbol, wind: i64, l: u32) -> Result<Self> {
        let mut pairs = Vec::new();
        visit_pairs(symbol, wind, l, crate::tableaux::DEFAULT_PAIR_BUDGET, |p| {
            pairs.push(p.clone());
            Ok(())
        })?;
        Ok(FieldSampler {
            pairs,
            d0: (symbol.d1() - wind) as usize,
        })
    }

    /// The field value at a pre-classified region for one noise seed.
    pub fn sample(&self, region: &RegionClass, noise: &NoiseSource) -> C64 {
        let mut minors: HashMap<(&[u32], &[u32]), C64> = HashMap::new();
        let mut sum = C64::new(0.0, 0.0);
        for p in &self.pairs {
            let key = (p.xhat.as_slice(), p.yhat.as_slice());
            let minor = *minors.entry(key).or_insert_with(|| {
                let k = p.xhat.len();
                let m = DenseMatrix::from_fn(k, k, |i, j| {
                    noise.entry(p.xhat[i] as u64, p.yhat[j] as u64)
                });
                det_lu(&m).to_c64()
            });
            let mut coeff = minor * (p.sign as f64);
            for (i, &e) in p.c.iter().enumerate() {
                let lam = region.lambdas[i];
                coeff *= if i < self.d0 {
                    (C64::new(1.0, 0.0) / lam).powi(e as i32)
                } else {
                    lam.powi(e as i32)
                };
            }
            sum += coeff;
        }
        sum
    }
}

/// Which closed-form specialization to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormKind {
    /// `a(λ) = λ`, region winding 1: the hyperbolic-style power series
    /// `Σ λ₁^k ĝ_k` with `ĝ_k` the anti-diagonal sums of the noise array.
    Jordan,
    /// `a(λ) = λ + λ²`, winding 1: `Σ_t λ₁^{-(t+1)} Σ_k λ₂^{k+t} ĝ_k`, the
    /// geometric-series form of the single outside-root resolvent.
    LimaconWindOne,
    /// `a(λ) = λ + λ²`, winding 2: the 2×2-minor series
    /// `Σ λ₁^{i+j-3} λ₂^{k+l-3} (−1)^{(j−i−1)+(l−k−1)} W_{ijkl} X_{ijkl}`.
    LimaconWindTwo,
}

impl ClosedFormKind {
    pub fn for_symbol(s: &Symbol, wind: i64) -> Result<Self> {
        if *s == Symbol::jordan() && wind == 1 {
            Ok(ClosedFormKind::Jordan)
        } else if *s == Symbol::limacon() && wind == 1 {
            Ok(ClosedFormKind::LimaconWindOne)
        } else if *s == Symbol::limacon() && wind == 2 {
            Ok(ClosedFormKind::LimaconWindTwo)
        } else {
            Err(Error::Config(format!(
                "no closed form for symbol `{s}` at winding {wind}"
            )))
        }
    }
}

/// Direct evaluation of the closed-form series, truncated on exactly the
/// monomials whose tableaux-side exponents obey `max c_i ≤ L`, with the
/// noise coefficients realized as the same signed sums of `E_∞` entries the
/// tableaux machinery produces (so comparisons are pointwise, not in law).
///
/// The winding-2 sign is `(−1)^{(j−i−1)+(l−k−1)} = ŝgn({i,j})·ŝgn({k,l})`;
/// the product form it is sometimes stated with is not reconcilable with
/// the determinant expansion by any global sign.
pub fn closed_form(
    kind: ClosedFormKind,
    region: &RegionClass,
    l: u32,
    noise: &NoiseSource,
) -> Result<C64> {
    let zero = C64::new(0.0, 0.0);
    match kind {
        ClosedFormKind::Jordan => {
            if region.wind_index != 1 {
                return Err(Error::RegionMismatch {
                    expected: 1,
                    got: region.wind_index,
                });
            }
            let lam = region.lambdas[0];
            let mut sum = zero;
            for k in 0..=l {
                let mut g = zero;
                for m in 1..=(k + 1) {
                    let n = k + 2 - m;
                    g += noise.entry(m as u64, n as u64);
                }
                sum += lam.powi(k as i32) * g;
            }
            Ok(sum)
        }
        ClosedFormKind::LimaconWindOne => {
            if region.wind_index != 1 {
                return Err(Error::RegionMismatch {
                    expected: 1,
                    got: region.wind_index,
                });
            }
            let (l1, l2) = (region.lambdas[0], region.lambdas[1]);
            let inv1 = C64::new(1.0, 0.0) / l1;
            let mut sum = zero;
            // c₁ = t+1 ≤ L, c₂ = k+t ≤ L
            for t in 0..l {
                for k in 0..=(l - t) {
                    let mut g = zero;
                    for m in 1..=(k + 1) {
                        let n = k + 2 - m;
                        g += noise.entry(m as u64, n as u64);
                    }
                    sum += inv1.powi((t + 1) as i32) * l2.powi((k + t) as i32) * g;
                }
            }
            Ok(sum)
        }
        ClosedFormKind::LimaconWindTwo => {
            if region.wind_index != 2 {
                return Err(Error::RegionMismatch {
                    expected: 2,
                    got: region.wind_index,
                });
            }
            let (l1, l2) = (region.lambdas[0], region.lambdas[1]);
            let ratio = l2 / l1;
            let mut sum = zero;
            // i < j, k < l index the 2×2 noise minors; (s, t) range over
            // [i, j) × [k, l) with c₁ = (i+j−3)+(t−s), c₂ = (k+l−3)+(s−t).
            let bound = (2 * l + 4) as u64;
            for i in 1..bound {
                for j in (i + 1)..=bound {
                    if (i + j) as i64 - 3 > 2 * l as i64 {
                        break;
                    }
                    for k in 1..bound {
                        for ll in (k + 1)..=bound {
                            if (k + ll) as i64 - 3 > 2 * l as i64 {
                                break;
                            }
                            let mut w = zero;
                            let mut any = false;
                            for s in i..j {
                                for t in k..ll {
                                    let c1 = (i + j) as i64 - 3 + t as i64 - s as i64;
                                    let c2 = (k + ll) as i64 - 3 + s as i64 - t as i64;
                                    if (0..=l as i64).contains(&c1)
                                        && (0..=l as i64).contains(&c2)
                                    {
                                        w += ratio.powi((s as i64 - t as i64) as i32);
                                        any = true;
                                    }
                                }
                            }
                            if !any {
                                continue;
                            }
                            let x = noise.entry(i, k) * noise.entry(j, ll)
                                - noise.entry(i, ll) * noise.entry(j, k);
                            let parity = (j - i - 1) + (ll - k - 1);
                            let sgn = if parity % 2 == 0 { 1.0 } else { -1.0 };
                            sum += l1.powi((i + j) as i32 - 3)
                                * l2.powi((k + ll) as i32 - 3)
                                * w
                                * x
                                * sgn;
                        }
                    }
                }
            }
            Ok(sum)
        }
    }
}

/// Options for zero finding.
#[derive(Debug, Clone, Copy)]
pub struct ZeroFinderOpts {
    /// Subdivision stops refining once the cell diagonal is below this.
    pub cell_tol: f64,
    /// Residual threshold relative to the local field scale.
    pub residual_rel_tol: f64,
    /// Maximum bisection depth while tracing an edge's phase.
    pub max_edge_depth: usize,
    /// Seed folded into the deterministic split jitter.
    pub seed: u64,
}

impl Default for ZeroFinderOpts {
    fn default() -> Self {
        ZeroFinderOpts {
            cell_tol: 1e-9,
            residual_rel_tol: 1e-8,
            max_edge_depth: 44,
            seed: 0,
        }
    }
}

/// Zeros of the evaluator inside the window. The window must lie in the
/// evaluator's region at distance ≥ ε from the curve; this is checked by
/// probing a coarse grid before any work starts.
pub fn find_zeros(fe: &FieldEvaluator, window: Window, eps: f64) -> Result<Vec<Zero>> {
    verify_window_in_region(fe.symbol(), fe.wind(), window, eps, 8)?;
    let opts = ZeroFinderOpts {
        seed: fe.noise().seed,
        ..Default::default()
    };
    find_zeros_fn(&|z| fe.eval_fast(z), window, &opts)
}

/// Probe an `(n+1)²` grid of the window: every node must classify into the
/// expected winding index with distance ≥ eps from the curve.
pub fn verify_window_in_region(
    s: &Symbol,
    wind: i64,
    window: Window,
    eps: f64,
    n: usize,
) -> Result<()> {
    for i in 0..=n {
        for j in 0..=n {
            let z = C64::new(
                window.re0 + (window.re1 - window.re0) * i as f64 / n as f64,
                window.im0 + (window.im1 - window.im0) * j as f64 / n as f64,
            );
            let dist = s.distance_to_curve(z, crate::symbol::DEFAULT_CURVE_SAMPLES);
            if dist < eps {
                return Err(Error::Config(format!(
                    "window point {z} is {dist:.4} from the curve (< ε = {eps})"
                )));
            }
            let region = classify_region(s, z)?;
            if region.wind_index != wind {
                return Err(Error::RegionMismatch {
                    expected: wind,
                    got: region.wind_index,
                });
            }
        }
    }
    Ok(())
}

/// Argument-principle zero finder over an arbitrary evaluator.
pub fn find_zeros_fn(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    window: Window,
    opts: &ZeroFinderOpts,
) -> Result<Vec<Zero>> {
    // Pad outward by a hair so a zero sitting exactly on the requested
    // boundary still counts as inside.
    let pad = 1e-9 * (1.0 + window.diag());
    let window = Window::new(
        window.re0 - pad,
        window.re1 + pad,
        window.im0 - pad,
        window.im1 + pad,
    );
    let scale = local_scale(f, window)?;
    let total = boundary_winding(f, window, opts)?;
    if total < 0 {
        return Err(Error::Domain(format!(
            "boundary winding {total} negative; the evaluator is not holomorphic here"
        )));
    }
    let mut zeros = subdivide(f, window, total as usize, opts, 0)?;
    // Newton refinement with numerically differenced derivative.
    for z in zeros.iter_mut() {
        let refined = newton_polish(f, z.z(), z.multiplicity, window.diag())?;
        z.re = refined.re;
        z.im = refined.im;
        let fv = f(refined)?;
        if fv.norm() > opts.residual_rel_tol * scale {
            return Err(Error::Domain(format!(
                "zero at {refined} kept residual {:.3e} (scale {scale:.3e})",
                fv.norm()
            )));
        }
    }
    let conserved: usize = zeros.iter().map(|z| z.multiplicity).sum();
    debug_assert_eq!(conserved, total as usize, "winding not conserved");
    Ok(zeros)
}

fn local_scale(f: &(dyn Fn(C64) -> Result<C64> + Sync), w: Window) -> Result<f64> {
    let mut scale = 0.0f64;
    for z in [
        C64::new(w.re0, w.im0),
        C64::new(w.re1, w.im0),
        C64::new(w.re1, w.im1),
        C64::new(w.re0, w.im1),
        w.center(),
    ] {
        scale = scale.max(f(z)?.norm());
    }
    Ok(scale.max(f64::MIN_POSITIVE))
}

fn subdivide(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    w: Window,
    count: usize,
    opts: &ZeroFinderOpts,
    depth: usize,
) -> Result<Vec<Zero>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if w.diag() < opts.cell_tol || depth > 64 {
        return Ok(vec![Zero {
            re: w.center().re,
            im: w.center().im,
            multiplicity: count,
        }]);
    }
    // Deterministic jittered split; retry with fresh jitter when a zero
    // sits on a proposed interior edge and phase tracking stalls.
    for attempt in 0..8u64 {
        let h = splitmix64(
            opts.seed
                ^ splitmix64(w.re0.to_bits() ^ w.im0.to_bits().rotate_left(13))
                ^ splitmix64(depth as u64 * 4 + attempt),
        );
        let fx = 0.5 + 0.12 * (((h & 0xffff) as f64 / 65535.0) - 0.5);
        let fy = 0.5 + 0.12 * ((((h >> 16) & 0xffff) as f64 / 65535.0) - 0.5);
        let xm = w.re0 + (w.re1 - w.re0) * fx;
        let ym = w.im0 + (w.im1 - w.im0) * fy;
        let quads = [
            Window::new(w.re0, xm, w.im0, ym),
            Window::new(xm, w.re1, w.im0, ym),
            Window::new(w.re0, xm, ym, w.im1),
            Window::new(xm, w.re1, ym, w.im1),
        ];
        let counts: Result<Vec<i64>> = quads
            .par_iter()
            .map(|q| boundary_winding(f, *q, opts))
            .collect();
        let counts = match counts {
            Ok(c) => c,
            Err(Error::PhaseTracking { .. }) => continue,
            Err(e) => return Err(e),
        };
        if counts.iter().any(|&c| c < 0) || counts.iter().sum::<i64>() != count as i64 {
            // A zero straddles an interior edge; jitter again.
            continue;
        }
        let children: Result<Vec<Vec<Zero>>> = quads
            .par_iter()
            .zip(counts.par_iter())
            .map(|(q, &c)| subdivide(f, *q, c as usize, opts, depth + 1))
            .collect();
        let mut out = Vec::new();
        for ch in children? {
            out.extend(ch);
        }
        return Ok(out);
    }
    Err(Error::PhaseTracking {
        x0: w.re0,
        y0: w.im0,
        x1: w.re1,
        y1: w.im1,
    })
}

/// Winding number of `f` around the rectangle boundary, walking the four
/// edges counterclockwise with adaptive phase tracking.
pub fn boundary_winding(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    w: Window,
    opts: &ZeroFinderOpts,
) -> Result<i64> {
    let corners = [
        C64::new(w.re0, w.im0),
        C64::new(w.re1, w.im0),
        C64::new(w.re1, w.im1),
        C64::new(w.re0, w.im1),
    ];
    let mut total = 0.0f64;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        total += edge_phase(f, a, f(a)?, b, f(b)?, 0, opts)?;
    }
    let wnum = total / (2.0 * PI);
    let rounded = wnum.round();
    if (wnum - rounded).abs() > 1e-4 {
        return Err(Error::PhaseTracking {
            x0: w.re0,
            y0: w.im0,
            x1: w.re1,
            y1: w.im1,
        });
    }
    Ok(rounded as i64)
}

fn edge_phase(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    a: C64,
    fa: C64,
    b: C64,
    fb: C64,
    depth: usize,
    opts: &ZeroFinderOpts,
) -> Result<f64> {
    if fa == C64::new(0.0, 0.0) || fb == C64::new(0.0, 0.0) {
        return Err(Error::PhaseTracking {
            x0: a.re,
            y0: a.im,
            x1: b.re,
            y1: b.im,
        });
    }
    if depth > opts.max_edge_depth {
        return Err(Error::PhaseTracking {
            x0: a.re,
            y0: a.im,
            x1: b.re,
            y1: b.im,
        });
    }
    // A segment is accepted only when its midpoint confirms both half-steps
    // are small and the magnitude does not dip toward a hidden zero; an
    // endpoint-only criterion can alias a full 2π interior swing when a
    // zero hugs the edge.
    let mid = (a + b) * 0.5;
    let fm = f(mid)?;
    if fm != C64::new(0.0, 0.0) {
        let s1 = (fm * fa.conj()).arg();
        let s2 = (fb * fm.conj()).arg();
        if depth >= 3
            && s1.abs() < PI / 2.0
            && s2.abs() < PI / 2.0
            && fm.norm() >= 0.35 * fa.norm().min(fb.norm())
        {
            return Ok(s1 + s2);
        }
    }
    Ok(edge_phase(f, a, fa, mid, fm, depth + 1, opts)?
        + edge_phase(f, mid, fm, b, fb, depth + 1, opts)?)
}

fn newton_polish(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    start: C64,
    multiplicity: usize,
    scale: f64,
) -> Result<C64> {
    let mut z = start;
    let h = 1e-7 * scale.max(1e-9);
    let m = multiplicity.max(1) as f64;
    for _ in 0..60 {
        let fz = f(z)?;
        let d = (f(z + C64::new(h, 0.0))? - f(z - C64::new(h, 0.0))?) / (2.0 * h);
        if d == C64::new(0.0, 0.0) {
            break;
        }
        let step = fz / d * m;
        z -= step;
        if step.norm() < 1e-13 * scale.max(1e-9) {
            break;
        }
    }
    Ok(z)
}
