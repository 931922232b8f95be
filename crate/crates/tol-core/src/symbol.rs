//! Finite-band Laurent symbols and their curve `a(S¹)`.
//!
//! A symbol is `a(λ) = Σ_{ℓ=-d₂}^{d₁} a_ℓ λ^ℓ` with `a_{d₁} ≠ 0` and, when
//! `d₂ > 0`, `a_{-d₂} ≠ 0`. The curve `a(S¹)` splits the plane into regions
//! indexed by the winding number of the curve about each point; everything
//! downstream (root classification, field evaluation, outlier labeling)
//! keys off winding numbers and distances to this curve.

use crate::{Error, Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Default sample count for curve discretization. Symbols here have degree
/// ≤ ~6 and mild curvature, so 4096 points plus local refinement suffice.
pub const DEFAULT_CURVE_SAMPLES: usize = 4096;

/// Points closer to the curve than this are rejected by winding/region
/// queries; root-modulus classification degenerates on `a(S¹)`.
pub const ON_CURVE_TOL: f64 = 1e-8;

/// A Laurent polynomial symbol with tight band limits.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    d1: i64,
    d2: i64,
    coeffs: BTreeMap<i64, C64>,
}

impl Symbol {
    /// Build a symbol from `(exponent, coefficient)` terms. Zero
    /// coefficients are dropped; the band limits are the extreme exponents
    /// actually present. Requires a positive top degree `d₁ ≥ 1`.
    pub fn new(terms: &[(i64, C64)]) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for &(exp, c) in terms {
            if c != C64::new(0.0, 0.0) {
                let slot = coeffs.entry(exp).or_insert(C64::new(0.0, 0.0));
                *slot += c;
            }
        }
        coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        let d1 = *coeffs.keys().max().ok_or_else(|| {
            Error::Domain("symbol has no nonzero coefficients".into())
        })?;
        let d2 = -*coeffs.keys().min().unwrap();
        if d1 < 1 {
            return Err(Error::Domain(format!(
                "symbol must have positive top degree, got d1 = {d1}"
            )));
        }
        // d2 = 0 is allowed (e.g. the Jordan symbol a(λ) = λ).
        let d2 = d2.max(0);
        Ok(Symbol { d1, d2, coeffs })
    }

    /// Max positive exponent `d₁ ≥ 1`.
    pub fn d1(&self) -> i64 {
        self.d1
    }

    /// Max negative exponent `d₂ ≥ 0` (as a non-negative number).
    pub fn d2(&self) -> i64 {
        self.d2
    }

    /// Total band width `d = d₁ + d₂ ≥ 1`.
    pub fn d(&self) -> i64 {
        self.d1 + self.d2
    }

    /// Coefficient `a_ℓ` (zero for exponents outside the band).
    pub fn coeff(&self, exp: i64) -> C64 {
        self.coeffs.get(&exp).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Sum of coefficient magnitudes `Σ |a_ℓ|`.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// The Jordan symbol `a(λ) = λ`.
    pub fn jordan() -> Self {
        Symbol::new(&[(1, C64::new(1.0, 0.0))]).unwrap()
    }

    /// The limaçon symbol `a(λ) = λ + λ²`.
    pub fn limacon() -> Self {
        Symbol::new(&[(1, C64::new(1.0, 0.0)), (2, C64::new(1.0, 0.0))]).unwrap()
    }

    /// The ellipse symbol `a(λ) = λ⁻¹ + 0.5 i λ`.
    pub fn ellipse() -> Self {
        Symbol::new(&[(-1, C64::new(1.0, 0.0)), (1, C64::new(0.0, 0.5))]).unwrap()
    }

    /// Evaluate `a(λ)`. Fails for `λ = 0` when the symbol has negative
    /// exponents; `λ = 0` is outside the Laurent domain regardless.
    pub fn eval(&self, lambda: C64) -> Result<C64> {
        if lambda == C64::new(0.0, 0.0) {
            return Err(Error::Domain("symbol evaluation at λ = 0".into()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (&exp, &c) in &self.coeffs {
            acc += c * lambda.powi(exp as i32);
        }
        Ok(acc)
    }

    /// Sample the closed curve `a(e^{2πik/M})`, `k = 0..M-1`, in index order.
    pub fn sample_curve(&self, m: usize) -> CurveSample {
        assert!(m >= 64, "curve sampling needs at least 64 points");
        let points = (0..m)
            .map(|k| {
                let theta = 2.0 * PI * (k as f64) / (m as f64);
                self.eval(C64::from_polar(1.0, theta)).unwrap()
            })
            .collect();
        CurveSample { points, m }
    }

    /// Distance from `z` to the sampled curve, sharpened by a golden-section
    /// search on the circle parameter around the discrete argmin.
    pub fn distance_to_curve(&self, z: C64, m: usize) -> f64 {
        assert!(m >= 64);
        let step = 2.0 * PI / (m as f64);
        let mut best_k = 0usize;
        let mut best = f64::INFINITY;
        for k in 0..m {
            let p = self.eval(C64::from_polar(1.0, step * k as f64)).unwrap();
            let d = (z - p).norm();
            if d < best {
                best = d;
                best_k = k;
            }
        }
        // Golden-section refinement on θ over the two adjacent intervals.
        let f = |theta: f64| (z - self.eval(C64::from_polar(1.0, theta)).unwrap()).norm();
        let center = step * best_k as f64;
        let refined = golden_min(f, center - step, center + step, 1e-12);
        refined.min(best)
    }

    /// Winding number of `a(S¹)` about `z`, by phase unwrapping over the
    /// curve sample with adaptive bisection wherever a phase step reaches
    /// π/2. Errors if `z` is within [`ON_CURVE_TOL`] of the curve.
    pub fn winding_number(&self, z: C64, m: usize) -> Result<i64> {
        let dist = self.distance_to_curve(z, m);
        if dist < ON_CURVE_TOL {
            return Err(Error::OnCurve { dist });
        }
        let step = 2.0 * PI / (m as f64);
        let mut total = 0.0f64;
        let mut prev_theta = 0.0f64;
        let mut prev = self.eval(C64::new(1.0, 0.0)).unwrap() - z;
        for k in 1..=m {
            let theta = step * k as f64;
            let p = self.eval(C64::from_polar(1.0, theta)).unwrap() - z;
            total += self.unwrapped_step(z, prev_theta, prev, theta, p, 0)?;
            prev_theta = theta;
            prev = p;
        }
        let w = total / (2.0 * PI);
        let rounded = w.round();
        debug_assert!(
            (w - rounded).abs() < 1e-6,
            "phase total {w} not near an integer"
        );
        Ok(rounded as i64)
    }

    /// Phase change of `a(e^{iθ}) − z` from `(θ0, p0)` to `(θ1, p1)`,
    /// bisecting recursively while a single step turns by π/2 or more.
    fn unwrapped_step(
        &self,
        z: C64,
        theta0: f64,
        p0: C64,
        theta1: f64,
        p1: C64,
        depth: usize,
    ) -> Result<f64> {
        let delta = (p1 * p0.conj()).arg();
        if delta.abs() < PI / 2.0 {
            return Ok(delta);
        }
        if depth > 48 {
            return Err(Error::OnCurve { dist: 0.0 });
        }
        let mid_theta = 0.5 * (theta0 + theta1);
        let pm = self.eval(C64::from_polar(1.0, mid_theta)).unwrap() - z;
        Ok(self.unwrapped_step(z, theta0, p0, mid_theta, pm, depth + 1)?
            + self.unwrapped_step(z, mid_theta, pm, theta1, p1, depth + 1)?)
    }
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// Ordered sample of the symbol curve at equally spaced circle points.
#[derive(Debug, Clone)]
pub struct CurveSample {
    /// `a(e^{2πik/M})` for `k = 0..M-1`, closed under wraparound.
    pub points: Vec<C64>,
    /// Sample count `M`.
    pub m: usize,
}

/// Text format: comma-separated `ℓ:coeff` terms, e.g. `1:1,2:1` for λ+λ²
/// and `-1:1,1:0.5i` for λ⁻¹+0.5iλ. A coefficient is `re`, `im i`, or
/// `re+im i` (no spaces). Exponents must lie in [-8, 8].
impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (exp_s, coeff_s) = part.split_once(':').ok_or_else(|| {
                Error::SymbolParse(format!("term `{part}` is missing `exp:coeff`"))
            })?;
            let exp: i64 = exp_s
                .trim()
                .parse()
                .map_err(|_| Error::SymbolParse(format!("bad exponent `{exp_s}`")))?;
            if !(-8..=8).contains(&exp) {
                return Err(Error::SymbolParse(format!(
                    "exponent {exp} outside supported range [-8, 8]"
                )));
            }
            terms.push((exp, parse_complex(coeff_s.trim())?));
        }
        Symbol::new(&terms)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&exp, &c) in &self.coeffs {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{exp}:{}", format_complex(c))?;
        }
        Ok(())
    }
}

fn format_complex(c: C64) -> String {
    if c.im == 0.0 {
        trim_float(c.re)
    } else if c.re == 0.0 {
        format!("{}i", trim_float(c.im))
    } else if c.im < 0.0 {
        format!("{}-{}i", trim_float(c.re), trim_float(-c.im))
    } else {
        format!("{}+{}i", trim_float(c.re), trim_float(c.im))
    }
}

fn trim_float(x: f64) -> String {
    let s = format!("{x}");
    s
}

/// Parse `re`, `imi`, or `re±imi` (e.g. `1`, `-0.5i`, `1+0.5i`, `2-i`).
fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::SymbolParse(format!("bad coefficient `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(body) = s.strip_suffix('i') {
        // Either a pure imaginary or re±im i; find the split sign that is
        // not a leading sign or part of an exponent.
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for idx in (1..chars.len()).rev() {
            let c = chars[idx];
            if (c == '+' || c == '-') && chars[idx - 1] != 'e' && chars[idx - 1] != 'E' {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx].parse().map_err(|_| bad())?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        Ok(C64::new(re, 0.0))
    }
}
