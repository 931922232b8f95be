//! Dense non-Hermitian complex eigensolver: Householder reduction to upper
//! Hessenberg form, then implicitly shifted QR with Wilkinson shifts and
//! aggressive deflation. Eigenvalues only; no Schur vectors are accumulated,
//! which keeps the whole solve at roughly `7·N³` complex multiply-adds.
//!
//! The backend is pluggable through [`EigenBackend`]; the in-repo reference
//! implementation below is the default and the one exercised by the tests
//! and benchmarks.

use super::DenseMatrix;
use crate::{Error, Result, C64};

/// Subdiagonal entries below `tol_scale · matrix_scale` are treated as zero.
const DEFLATION_RELTOL: f64 = 1e-14;

/// Hard cap of `40·N` QR sweeps across the whole spectrum.
const MAX_SWEEP_FACTOR: usize = 40;

/// Eigenvalue backend hook. The default is [`ReferenceEigen`]; an external
/// LAPACK-equivalent can be substituted behind the same contract (all `N`
/// eigenvalues with algebraic multiplicity, any order).
pub trait EigenBackend {
    fn eigenvalues(&self, m: &DenseMatrix) -> Result<Vec<C64>>;
}

/// The in-repo Hessenberg + implicit QR implementation.
#[derive(Debug, Default, Clone, Copy)]
pub struct ReferenceEigen;

impl EigenBackend for ReferenceEigen {
    fn eigenvalues(&self, m: &DenseMatrix) -> Result<Vec<C64>> {
        eigenvalues(m)
    }
}

/// All `N` eigenvalues of a square complex matrix, with multiplicity, in no
/// particular order. `N ≤ 4096`.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::Dimension("eigenvalues need a square matrix".into()));
    }
    let n = m.rows();
    if n > 4096 {
        return Err(Error::Dimension(format!(
            "eigensolver capped at N = 4096, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }

    // Column-major working copy: both Householder update sweeps then walk
    // contiguous columns.
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[j * n + i] = m.get(i, j);
        }
    }
    hessenberg_in_place(&mut a, n);

    // Hand the Hessenberg matrix to the QR stage in row-major layout; the
    // bulge chase walks rows.
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n.min(j + 2) {
            h[i * n + j] = a[j * n + i];
        }
    }
    let scale = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); n]);
    }
    qr_eigenvalues(&mut h, n, DEFLATION_RELTOL * scale)
}

/// Reduce a column-major matrix to upper Hessenberg form in place by
/// Householder reflections, without accumulating the transform.
fn hessenberg_in_place(a: &mut [C64], n: usize) {
    let zero = C64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n.
        let col = &a[k * n..(k + 1) * n];
        let mut norm2 = 0.0f64;
        for i in (k + 1)..n {
            norm2 += col[i].norm_sqr();
        }
        if norm2 == 0.0 {
            continue;
        }
        let x0 = col[k + 1];
        let alpha = norm2.sqrt();
        // beta = -sign(x0)·alpha keeps v well away from zero.
        let beta = if x0 == zero {
            C64::new(-alpha, 0.0)
        } else {
            -(x0 / x0.norm()) * alpha
        };
        let v0 = x0 - beta;
        let v0n2 = v0.norm_sqr();
        let tau_den = norm2 - x0.norm_sqr() + v0n2;
        if tau_den == 0.0 {
            continue;
        }
        // Normalized so v[k+1] = 1; tau = 2/(v*v).
        v[k + 1] = C64::new(1.0, 0.0);
        let inv_v0 = C64::new(1.0, 0.0) / v0;
        for i in (k + 2)..n {
            v[i] = col[i] * inv_v0;
        }
        let tau = C64::new(2.0 * v0n2 / tau_den, 0.0);

        // Set the subdiagonal result directly, zero the rest of the column.
        a[k * n + k + 1] = beta;
        for i in (k + 2)..n {
            a[k * n + i] = zero;
        }

        // Left update: A[k+1.., k+1..] -= tau v (v^H A), column by column.
        for j in (k + 1)..n {
            let colj = &mut a[j * n..(j + 1) * n];
            let mut dot = zero;
            for i in (k + 1)..n {
                dot += v[i].conj() * colj[i];
            }
            let f = tau * dot;
            for i in (k + 1)..n {
                colj[i] -= f * v[i];
            }
        }

        // Right update: A[0.., k+1..] -= (A v) (tau v)^H.
        for i in 0..n {
            w[i] = zero;
        }
        for j in (k + 1)..n {
            let vj = v[j];
            if vj == zero {
                continue;
            }
            let colj = &a[j * n..(j + 1) * n];
            for i in 0..n {
                w[i] += colj[i] * vj;
            }
        }
        for j in (k + 1)..n {
            let f = (tau * v[j]).conj();
            let colj = &mut a[j * n..(j + 1) * n];
            for i in 0..n {
                colj[i] -= w[i] * f;
            }
        }
    }
}

/// Implicit single-shift QR on a row-major upper Hessenberg matrix; returns
/// the diagonal after full deflation.
fn qr_eigenvalues(h: &mut [C64], n: usize, tol: f64) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let max_sweeps = MAX_SWEEP_FACTOR * n;
    let mut sweeps = 0usize;
    let mut hi = n - 1; // active block ends at row/col hi
    let mut stagnation = 0usize;

    while hi > 0 {
        if h[hi * n + hi - 1].norm() <= tol {
            h[hi * n + hi - 1] = zero;
            hi -= 1;
            stagnation = 0;
            continue;
        }
        // Start of the unreduced block ending at hi.
        let mut lo = hi - 1;
        while lo > 0 {
            if h[lo * n + lo - 1].norm() <= tol {
                h[lo * n + lo - 1] = zero;
                break;
            }
            lo -= 1;
        }

        if sweeps >= max_sweeps {
            return Err(Error::EigenSolver { sweeps });
        }
        sweeps += 1;
        stagnation += 1;

        // Wilkinson shift from the trailing 2×2 of the active block;
        // exceptional shift when progress stalls.
        let mu = if stagnation % 12 == 0 {
            let s = h[hi * n + hi - 1].norm()
                + if hi >= 2 {
                    h[(hi - 1) * n + hi - 2].norm()
                } else {
                    0.0
                };
            h[hi * n + hi] + C64::new(0.75 * s, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                h[hi * n + hi],
            )
        };

        // Implicit shifted sweep on lo..=hi via Givens rotations.
        let mut x = h[lo * n + lo] - mu;
        let mut y = h[(lo + 1) * n + lo];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            // Rows k, k+1 from the left (bulge sits one column left of k).
            let jstart = k.saturating_sub(1).max(lo);
            let (top, bottom) = h.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n..k * n + n];
            let row_k1 = &mut bottom[..n];
            for j in jstart..n {
                let hkj = row_k[j];
                let hk1j = row_k1[j];
                row_k[j] = c * hkj + s * hk1j;
                row_k1[j] = -s.conj() * hkj + c * hk1j;
            }
            // Columns k, k+1 from the right (bulge grows at row k+2).
            let iend = (k + 2).min(hi);
            for i in 0..=iend {
                let hik = h[i * n + k];
                let hik1 = h[i * n + k + 1];
                h[i * n + k] = c * hik + s.conj() * hik1;
                h[i * n + k + 1] = -s * hik + c * hik1;
            }
            if k + 1 < hi {
                x = h[(k + 1) * n + k];
                y = h[(k + 2) * n + k];
            }
        }
    }
    Ok((0..n).map(|i| h[i * n + i]).collect())
}

/// The eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let half = tr * 0.5;
    let disc = (half * half - det).sqrt();
    let e1 = half + disc;
    let e2 = half - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Complex Givens pair `(c, s)` with real `c ≥ 0` such that the rotation
/// `[[c, s], [-s̄, c]]` maps `(x, y)` to `(r·e^{i arg x}, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let zero = C64::new(0.0, 0.0);
    if y == zero {
        return (1.0, zero);
    }
    let nx = x.norm();
    let ny = y.norm();
    let r = (nx * nx + ny * ny).sqrt();
    if nx == 0.0 {
        return (0.0, y.conj() / ny);
    }
    let c = nx / r;
    let s = (x / nx) * (y.conj() / r);
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::build_toeplitz;
    use crate::noise::splitmix_stream;
    use crate::symbol::Symbol;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_c(rng: &mut impl FnMut() -> u64) -> C64 {
        let u = |r: u64| 2.0 * (r as f64 / u64::MAX as f64) - 1.0;
        c(u(rng()), u(rng()))
    }

    /// Greedy optimal assignment distance between two eigenvalue multisets.
    fn match_dist(mut a: Vec<C64>, b: &[C64]) -> f64 {
        let mut worst = 0.0f64;
        for &want in b {
            let (idx, d) = a
                .iter()
                .enumerate()
                .map(|(i, &got)| (i, (got - want).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            worst = worst.max(d);
            a.swap_remove(idx);
        }
        worst
    }

    #[test]
    fn nilpotent_jordan_block() {
        let j = Symbol::jordan();
        let t = build_toeplitz(&j, 3, c(0.0, 0.0)).unwrap();
        let eig = eigenvalues(&t).unwrap();
        assert_eq!(eig.len(), 3);
        for e in eig {
            assert!(e.norm() < 1e-7, "nilpotent eigenvalue {e}");
        }
    }

    #[test]
    fn diagonal_matrix() {
        let d = DenseMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0)],
        ]);
        let eig = eigenvalues(&d).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        assert!(match_dist(eig, &want) < 1e-12);
    }

    // Characteristic-polynomial oracle: coefficients by Faddeev–LeVerrier,
    // roots by the Aberth solver, matched after optimal assignment.
    #[test]
    fn random_matrix_matches_charpoly_oracle() {
        let mut rng = splitmix_stream(23);
        for _ in 0..6 {
            let m = DenseMatrix::from_fn(6, 6, |_, _| rand_c(&mut rng));
            let coeffs = charpoly(&m);
            let roots = crate::roots::aberth_roots(&coeffs).unwrap();
            let eig = eigenvalues(&m).unwrap();
            let d = match_dist(eig, &roots);
            assert!(d < 1e-8, "eigenvalues off charpoly roots by {d}");
        }
    }

    /// det(λI − A) coefficients, ascending in λ, by Faddeev–LeVerrier.
    fn charpoly(m: &DenseMatrix) -> Vec<C64> {
        let n = m.rows();
        let mut c_coef = vec![C64::new(0.0, 0.0); n + 1];
        c_coef[n] = C64::new(1.0, 0.0);
        let mut mk = DenseMatrix::identity(n);
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1}... standard recurrence
            let am = matmul(m, &mk);
            let tr = (0..n).map(|i| am.get(i, i)).sum::<C64>();
            let ck = -tr / (k as f64);
            c_coef[n - k] = ck;
            mk = am;
            for i in 0..n {
                let v = mk.get(i, i) + ck;
                mk.set(i, i, v);
            }
        }
        c_coef
    }

    fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
        })
    }

    #[test]
    fn shift_equivariance() {
        let s = Symbol::ellipse();
        let t0 = build_toeplitz(&s, 12, c(0.0, 0.0)).unwrap();
        let shift = c(0.4, -0.2);
        let shifted = t0.plus_scaled_identity(shift);
        let direct = build_toeplitz(&s, 12, -shift).unwrap();
        let a = eigenvalues(&shifted).unwrap();
        let b = eigenvalues(&direct).unwrap();
        assert!(match_dist(a, &b) < 1e-9);
    }

    #[test]
    fn moderate_size_residual() {
        // Eigenvalues of a random 60×60 must reproduce trace and |det|.
        let mut rng = splitmix_stream(31);
        let m = DenseMatrix::from_fn(60, 60, |_, _| rand_c(&mut rng));
        let eig = eigenvalues(&m).unwrap();
        let tr: C64 = (0..60).map(|i| m.get(i, i)).sum();
        let eig_tr: C64 = eig.iter().sum();
        assert!((tr - eig_tr).norm() < 1e-9 * (1.0 + tr.norm()));
        let logdet = crate::linalg::det_lu(&m);
        let eig_logdet: f64 = eig.iter().map(|e| e.norm().ln()).sum();
        assert!((logdet.log_mag - eig_logdet).abs() < 1e-8 * (1.0 + logdet.log_mag.abs()));
    }
}
