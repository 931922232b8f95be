//! Dense complex linear algebra: banded Toeplitz construction, LU
//! determinants in log form, the generalized-Vandermonde (Schur polynomial)
//! Toeplitz determinant, and a self-contained non-Hermitian eigensolver.
//!
//! Determinants of `T_N(a(z))` scale like `|a_{d₁}|^N ∏|λ_i|^N`, far past
//! double-precision range for `N` in the hundreds, so every large
//! determinant flows through [`LogComplex`].

mod eigen;

pub use eigen::{eigenvalues, EigenBackend, ReferenceEigen};

use crate::symbol::Symbol;
use crate::{Error, Result, C64};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        DenseMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows_data: &[Vec<C64>]) -> Self {
        let rows = rows_data.len();
        let cols = if rows > 0 { rows_data[0].len() } else { 0 };
        let mut entries = Vec::with_capacity(rows * cols);
        for r in rows_data {
            assert_eq!(r.len(), cols);
            entries.extend_from_slice(r);
        }
        DenseMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.cols + j] = v;
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `self + c·Id`.
    pub fn plus_scaled_identity(&self, c: C64) -> DenseMatrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i) + c;
            out.set(i, i, v);
        }
        out
    }

    /// `self + other`, elementwise.
    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// `self · s`, elementwise.
    pub fn scale(&self, s: C64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// Max entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// The minor with the given (0-based, strictly increasing) rows/cols.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }
}

/// A nonzero complex value stored as `exp(log_mag + i·phase)`, safe against
/// overflow for `|log_mag| ≤ 1e6`. Zero is the distinguished value with
/// `log_mag = -∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    /// Natural log of the magnitude; `-∞` encodes exact zero.
    pub log_mag: f64,
    /// Phase in (-π, π].
    pub phase: f64,
}

impl LogComplex {
    pub fn zero() -> Self {
        LogComplex {
            log_mag: f64::NEG_INFINITY,
            phase: 0.0,
        }
    }

    pub fn one() -> Self {
        LogComplex {
            log_mag: 0.0,
            phase: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn from_c64(v: C64) -> Self {
        if v == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        LogComplex {
            log_mag: v.norm().ln(),
            phase: v.arg(),
        }
    }

    /// Back to a plain complex number; overflows to ±∞ magnitudes if
    /// `log_mag` exceeds ~709.
    pub fn to_c64(&self) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(self.log_mag.exp(), self.phase)
    }

    pub fn mul(&self, other: &LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return LogComplex::zero();
        }
        LogComplex {
            log_mag: self.log_mag + other.log_mag,
            phase: wrap_phase(self.phase + other.phase),
        }
    }

    pub fn mul_c64(&self, v: C64) -> LogComplex {
        self.mul(&LogComplex::from_c64(v))
    }

    /// Phase difference `self - other` wrapped to (-π, π].
    pub fn phase_diff(&self, other: &LogComplex) -> f64 {
        wrap_phase(self.phase - other.phase)
    }
}

/// Wrap an angle to (-π, π].
pub fn wrap_phase(p: f64) -> f64 {
    use std::f64::consts::PI;
    let w = p.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// `T_N(a(z)) = T_N(a) − z·Id`: entry `(i, j)` is `a_{j−i} − z·1{i=j}` on
/// the band `j−i ∈ [−d₂, d₁]`, zero elsewhere.
pub fn build_toeplitz(s: &Symbol, n: usize, z: C64) -> Result<DenseMatrix> {
    let need = s.d1().max(s.d2()) as usize;
    if n <= need {
        return Err(Error::Dimension(format!(
            "Toeplitz dimension {n} must exceed max(d1, d2) = {need}"
        )));
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        let off = j as i64 - i as i64;
        let mut v = if -s.d2() <= off && off <= s.d1() {
            s.coeff(off)
        } else {
            C64::new(0.0, 0.0)
        };
        if i == j {
            v -= z;
        }
        v
    }))
}

/// The Toeplitz matrix with shifted symbol, `T_M(a, z; d̄₁)`: entry `(i, j)`
/// is `a'_{d₁−d̄₁+j−i}` where `a'_ℓ = a_ℓ − z·δ_{ℓ,0}`. At `d̄₁ = d₁` this is
/// `build_toeplitz`; at `d̄₁ = d` it is upper triangular.
pub fn shifted_toeplitz(s: &Symbol, m: usize, z: C64, dbar1: i64) -> Result<DenseMatrix> {
    let d = s.d();
    if !(0..=d).contains(&dbar1) {
        return Err(Error::Dimension(format!(
            "shift d̄1 = {dbar1} outside [0, d = {d}]"
        )));
    }
    if (m as i64) <= d {
        return Err(Error::Dimension(format!(
            "shifted Toeplitz dimension {m} must exceed d = {d}"
        )));
    }
    let base = s.d1() - dbar1;
    Ok(DenseMatrix::from_fn(m, m, |i, j| {
        let off = base + j as i64 - i as i64;
        let mut v = if -s.d2() <= off && off <= s.d1() {
            s.coeff(off)
        } else {
            C64::new(0.0, 0.0)
        };
        if off == 0 {
            v -= z;
        }
        v
    }))
}

/// Determinant by partially pivoted LU, in log form. Exact singularity
/// reports the distinguished zero.
pub fn det_lu(m: &DenseMatrix) -> LogComplex {
    assert!(m.is_square(), "det_lu needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return LogComplex::one();
    }
    let mut a = m.entries().to_vec();
    let mut log_mag = 0.0f64;
    let mut phase = 0.0f64;
    let mut sign_flips = 0usize;
    for k in 0..n {
        // Partial pivot on column k.
        let mut piv = k;
        let mut best = a[k * n + k].norm_sqr();
        for r in (k + 1)..n {
            let v = a[r * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return LogComplex::zero();
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            sign_flips += 1;
        }
        let pivot = a[k * n + k];
        log_mag += pivot.norm().ln();
        phase = wrap_phase(phase + pivot.arg());
        let inv = C64::new(1.0, 0.0) / pivot;
        for r in (k + 1)..n {
            let factor = a[r * n + k] * inv;
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for c in (k + 1)..n {
                let sub = factor * a[k * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    if sign_flips % 2 == 1 {
        phase = wrap_phase(phase + std::f64::consts::PI);
    }
    LogComplex { log_mag, phase }
}

/// Determinant of the minor `m[rows; cols]` as a plain complex number.
/// Intended for small minors (`|rows| ≤ 12`); the empty minor is 1.
pub fn submatrix_det(m: &DenseMatrix, rows: &[usize], cols: &[usize]) -> Result<C64> {
    if rows.len() != cols.len() {
        return Err(Error::Dimension(format!(
            "minor must be square: {} rows vs {} cols",
            rows.len(),
            cols.len()
        )));
    }
    if rows.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(det_lu(&m.minor(rows, cols)).to_c64())
}

/// Result of the Schur-polynomial Toeplitz determinant; `fallback` marks
/// values that came from banded LU because the root configuration was too
/// degenerate for the Vandermonde route.
#[derive(Debug, Clone, Copy)]
pub struct SchurDet {
    pub value: LogComplex,
    pub fallback: bool,
}

/// `det T_N(a(z))` through the Schur-polynomial identity
/// `det T_N(a(z)) = a_{d₁}^N · S_𝔪(λ₁(z), …, λ_d(z))`, `𝔪 = (N^{d₁}, 0^{d₂})`,
/// with `S_𝔪 = det V_𝔪 / det V_𝟎` and per-column scaling
/// `max(|λ_j|, 1)^{-(N+d-1)}` so the scaled LU stays in range; the scale
/// logs are accumulated back. Falls back to dense LU when roots cluster
/// within 1e-5 or the scaled system looks ill-conditioned.
pub fn schur_toeplitz_det(s: &Symbol, n: usize, z: C64) -> Result<SchurDet> {
    let lambdas = crate::roots::solve_lambda(s, z)?;
    let d = lambdas.len();

    let mut clustered = false;
    for i in 0..d {
        for j in (i + 1)..d {
            if (lambdas[i] - lambdas[j]).norm() < 1e-5 {
                clustered = true;
            }
        }
    }
    if clustered {
        let t = build_toeplitz(s, n, z)?;
        return Ok(SchurDet {
            value: det_lu(&t),
            fallback: true,
        });
    }

    let d1 = s.d1() as usize;
    // Row exponents of V_𝔪: N+d-i for i = 1..d1, d-i for i = d1+1..d.
    let exps_m: Vec<i64> = (1..=d as i64)
        .map(|i| {
            if i <= d1 as i64 {
                n as i64 + d as i64 - i
            } else {
                d as i64 - i
            }
        })
        .collect();
    let exps_0: Vec<i64> = (1..=d as i64).map(|i| d as i64 - i).collect();

    let num = scaled_vandermonde_logdet(&lambdas, &exps_m);
    let den = scaled_vandermonde_logdet(&lambdas, &exps_0);

    let (num, den) = match (num, den) {
        (Some(a), Some(b)) if !b.value.is_zero() => (a, b),
        _ => {
            let t = build_toeplitz(s, n, z)?;
            return Ok(SchurDet {
                value: det_lu(&t),
                fallback: true,
            });
        }
    };
    if num.cond_estimate > 1e10 || den.cond_estimate > 1e10 {
        let t = build_toeplitz(s, n, z)?;
        return Ok(SchurDet {
            value: det_lu(&t),
            fallback: true,
        });
    }

    // a_{d1}^N · det V_𝔪 / det V_𝟎
    let a_top = LogComplex::from_c64(s.coeff(s.d1()));
    let mut value = num.value;
    value.log_mag -= den.value.log_mag;
    value.phase = wrap_phase(value.phase - den.value.phase);
    value.log_mag += n as f64 * a_top.log_mag;
    value.phase = wrap_phase(value.phase + wrap_phase(n as f64 * a_top.phase));
    Ok(SchurDet {
        value,
        fallback: false,
    })
}

struct ScaledDet {
    value: LogComplex,
    cond_estimate: f64,
}

/// log-det of the generalized Vandermonde matrix `[λ_j^{e_i}]` with column
/// scaling by `max(|λ_j|, 1)^{-max_i e_i}`; the removed scale is added back
/// onto the log magnitude. Returns `None` when a zero λ meets a negative
/// exponent (cannot happen for valid symbols; guarded anyway).
fn scaled_vandermonde_logdet(lambdas: &[C64], exps: &[i64]) -> Option<ScaledDet> {
    let d = lambdas.len();
    let top = *exps.iter().max().unwrap();
    let mut m = DenseMatrix::zeros(d, d);
    let mut scale_log = 0.0f64;
    for (j, &lam) in lambdas.iter().enumerate() {
        let r = lam.norm().max(1.0);
        let log_col_scale = -(top as f64) * r.ln();
        scale_log -= log_col_scale;
        for (i, &e) in exps.iter().enumerate() {
            if lam == C64::new(0.0, 0.0) {
                if e < 0 {
                    return None;
                }
                m.set(
                    i,
                    j,
                    if e == 0 {
                        // 0^0 = 1, scaled
                        C64::from_polar(log_col_scale.exp(), 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    },
                );
                continue;
            }
            // λ^e · r^{-top} in polar form, assembled in log space.
            let lm = (e as f64) * lam.norm().ln() + log_col_scale;
            let ph = wrap_phase(e as f64 * lam.arg());
            m.set(i, j, C64::from_polar(lm.exp(), ph));
        }
    }
    // LU with the condition estimated from the pivot spread.
    let det = det_lu(&m);
    let cond = pivot_spread(&m);
    let mut value = det;
    if !value.is_zero() {
        value.log_mag += scale_log;
    }
    Some(ScaledDet {
        value,
        cond_estimate: cond,
    })
}

/// Ratio of largest to smallest pivot magnitude in a pivoted LU sweep; a
/// cheap conditioning proxy for the scaled Vandermonde solves.
fn pivot_spread(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut a = m.entries().to_vec();
    let mut hi = 0.0f64;
    let mut lo = f64::INFINITY;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm_sqr();
        for r in (k + 1)..n {
            let v = a[r * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return f64::INFINITY;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
        }
        let p = a[k * n + k].norm();
        hi = hi.max(p);
        lo = lo.min(p);
        let inv = C64::new(1.0, 0.0) / a[k * n + k];
        for r in (k + 1)..n {
            let factor = a[r * n + k] * inv;
            for c in (k + 1)..n {
                let sub = factor * a[k * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    hi / lo
}
