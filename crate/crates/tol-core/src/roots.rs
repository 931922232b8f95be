//! The root system of `P_{z,a}(λ) = λ^{d₂}(a(λ) − z)` and region
//! classification.
//!
//! Writing `λ^{d₂}(a(λ) − z) = a_{d₁} ∏_ℓ (λ + λ_ℓ(z))`, the values
//! `λ_ℓ(z)` (the negatives of the polynomial roots) are kept
//! modulus-non-increasing. The count `d₀(z)` of them outside the unit
//! circle determines the winding index `𝔡 = d₁ − d₀(z)`, which labels the
//! region of the plane `z` lives in.

use crate::symbol::{Symbol, DEFAULT_CURVE_SAMPLES};
use crate::{Error, Result, C64};

/// Unit-modulus tolerance: any root with `||λ|−1| < UNIT_MOD_TOL` makes
/// region membership meaningless, and classification fails loudly rather
/// than risk corrupting downstream point-process statistics.
pub const UNIT_MOD_TOL: f64 = 1e-8;

/// Default minimum distance to the symbol curve for classification.
pub const CLASSIFY_CURVE_TOL: f64 = 1e-6;

/// Classification of a point `z` relative to the symbol's root system.
#[derive(Debug, Clone)]
pub struct RegionClass {
    /// `λ_1(z), …, λ_d(z)`, modulus-non-increasing, modulus ties broken by
    /// ascending phase.
    pub lambdas: Vec<C64>,
    /// Count of roots with modulus > 1.
    pub d0: usize,
    /// Winding index `𝔡 = d₁ − d₀`.
    pub wind_index: i64,
    /// `1 − max(max_{i≤d0} 1/|λ_i|, max_{i>d0} |λ_i|)`, in (0, 1].
    pub margin: f64,
}

impl RegionClass {
    /// Smallest pairwise distance between the `λ_i`; degenerate (multiple)
    /// roots push this toward zero and trip the Schur evaluator's fallback.
    pub fn min_separation(&self) -> f64 {
        let d = self.lambdas.len();
        let mut best = f64::INFINITY;
        for i in 0..d {
            for j in (i + 1)..d {
                best = best.min((self.lambdas[i] - self.lambdas[j]).norm());
            }
        }
        best
    }
}

/// Coefficients (ascending) of `P_{z,a}(λ) = Σ_{ℓ=0}^d (a_{ℓ-d₂} − z δ_{ℓ,d₂}) λ^ℓ`.
fn pz_coefficients(s: &Symbol, z: C64) -> Vec<C64> {
    let d = s.d();
    (0..=d)
        .map(|ell| {
            let mut c = s.coeff(ell - s.d2());
            if ell == s.d2() {
                c -= z;
            }
            c
        })
        .collect()
}

/// `λ_ℓ(z)`: the negatives of the roots of `P_{z,a}`, sorted
/// modulus-non-increasing with modulus ties broken by ascending phase.
pub fn solve_lambda(s: &Symbol, z: C64) -> Result<Vec<C64>> {
    let coeffs = pz_coefficients(s, z);
    let roots = aberth_roots(&coeffs)?;
    let mut lambdas: Vec<C64> = roots.into_iter().map(|r| -r).collect();
    lambdas.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
    Ok(lambdas)
}

/// All roots of the polynomial `Σ coeffs[k] λ^k` by Aberth–Ehrlich
/// simultaneous iteration, initial guesses on a perturbed circle of radius
/// `|c₀/c_top|^{1/deg}`, converged to residual `< 1e-13·(coefficient scale)`
/// and polished by one Newton step each.
pub fn aberth_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let mut top = coeffs.len();
    while top > 0 && coeffs[top - 1] == zero {
        top -= 1;
    }
    if top <= 1 {
        return Err(Error::Domain("constant polynomial has no roots".into()));
    }
    let coeffs = &coeffs[..top];
    let deg = coeffs.len() - 1;

    // Deflate exact zero roots (vanishing trailing coefficients).
    let mut zeros = 0usize;
    while zeros < deg && coeffs[zeros] == zero {
        zeros += 1;
    }
    let work: Vec<C64> = coeffs[zeros..].to_vec();
    let wdeg = work.len() - 1;
    let mut roots = vec![zero; zeros];
    if wdeg == 0 {
        return Ok(roots);
    }

    let scale = work.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let lead = work[wdeg];
    let radius = {
        let r = (work[0].norm() / lead.norm()).powf(1.0 / wdeg as f64);
        if r.is_finite() && r > 1e-12 {
            r
        } else {
            1.0
        }
    };

    // Perturbed-circle initial guesses: irrational angular offset so no
    // guess aligns with a symmetry axis of the polynomial.
    let mut x: Vec<C64> = (0..wdeg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.353_612) / (wdeg as f64)
                + 0.618 / (wdeg as f64);
            C64::from_polar(radius * (1.0 + 0.05 * ((k % 3) as f64 - 1.0)), theta)
        })
        .collect();

    let eval = |t: C64| -> (C64, C64) {
        // Horner for p and p'.
        let mut p = work[wdeg];
        let mut dp = zero;
        for k in (0..wdeg).rev() {
            dp = dp * t + p;
            p = p * t + work[k];
        }
        (p, dp)
    };

    let tol = 1e-13 * scale;
    let mut converged = false;
    let mut sweeps = 0usize;
    let mut worst: f64;
    while sweeps < 200 {
        sweeps += 1;
        let mut moved = 0.0f64;
        worst = 0.0;
        for i in 0..wdeg {
            let (p, dp) = eval(x[i]);
            worst = worst.max(p.norm());
            if p == zero {
                continue;
            }
            let newton = if dp == zero { C64::new(1e-12, 0.0) } else { p / dp };
            let mut repulsion = zero;
            for j in 0..wdeg {
                if j != i {
                    let diff = x[i] - x[j];
                    if diff != zero {
                        repulsion += C64::new(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom == zero { newton } else { newton / denom };
            x[i] -= step;
            moved = moved.max(step.norm());
        }
        if worst < tol || moved < 1e-16 * radius.max(1.0) {
            converged = worst < tol || moved == 0.0;
            if converged {
                break;
            }
        }
    }
    // Each root polished by one Newton step.
    for xi in x.iter_mut() {
        let (p, dp) = eval(*xi);
        if dp != zero {
            *xi -= p / dp;
        }
    }
    if !converged {
        let final_worst = x.iter().map(|&t| eval(t).0.norm()).fold(0.0, f64::max);
        if final_worst >= tol * 10.0 {
            return Err(Error::RootSolver {
                sweeps,
                residual: final_worst,
            });
        }
    }
    roots.extend(x);
    Ok(roots)
}

/// Classify `z` into its region: root moduli, `d₀`, winding index, margin.
/// Cross-checks the root count against the curve winding number.
pub fn classify_region(s: &Symbol, z: C64) -> Result<RegionClass> {
    classify_region_with(s, z, CLASSIFY_CURVE_TOL, DEFAULT_CURVE_SAMPLES)
}

/// [`classify_region`] with explicit curve tolerance and sample count.
pub fn classify_region_with(
    s: &Symbol,
    z: C64,
    curve_tol: f64,
    curve_samples: usize,
) -> Result<RegionClass> {
    let dist = s.distance_to_curve(z, curve_samples);
    if dist <= curve_tol {
        return Err(Error::OnCurve { dist });
    }
    let lambdas = solve_lambda(s, z)?;
    for lam in &lambdas {
        if (lam.norm() - 1.0).abs() < UNIT_MOD_TOL {
            return Err(Error::UnitModulusAmbiguity {
                z,
                tol: UNIT_MOD_TOL,
            });
        }
    }
    let d0 = lambdas.iter().filter(|l| l.norm() > 1.0).count();
    let wind_index = s.d1() - d0 as i64;

    let mut worst: f64 = 0.0;
    for (i, lam) in lambdas.iter().enumerate() {
        if i < d0 {
            worst = worst.max(1.0 / lam.norm());
        } else {
            worst = worst.max(lam.norm());
        }
    }
    let margin = 1.0 - worst;
    debug_assert!(margin > 0.0);

    // The winding number of the curve about z must agree with d1 - d0; a
    // mismatch means the solver or the curve sampling is lying.
    let from_curve = s.winding_number(z, curve_samples)?;
    if from_curve != wind_index {
        return Err(Error::WindingMismatch {
            z,
            from_roots: wind_index,
            from_curve,
        });
    }

    Ok(RegionClass {
        lambdas,
        d0,
        wind_index,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::splitmix_stream;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn jordan_negated_root() {
        let s = Symbol::jordan();
        let l = solve_lambda(&s, c(2.0, 0.0)).unwrap();
        assert_eq!(l.len(), 1);
        assert!((l[0] - c(-2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn ellipse_closed_form_quadratic() {
        // 0.5iλ² + 1 = 0 at z = 0: λ = ∓(1+i), both of modulus √2.
        let s = Symbol::ellipse();
        let l = solve_lambda(&s, c(0.0, 0.0)).unwrap();
        assert_eq!(l.len(), 2);
        for lam in &l {
            assert!((lam.norm() - 2f64.sqrt()).abs() < 1e-12);
        }
        let prod = l[0] * l[1];
        // ∏(λ + λ_i) = λ² + ... + λ_1λ_2 = (1/(0.5i))·(0.5iλ² + 1) ⟹ λ_1λ_2 = 1/(0.5i) = -2i
        assert!((prod - c(0.0, -2.0)).norm() < 1e-12);
        let sum = l[0] + l[1];
        assert!(sum.norm() < 1e-12);
    }

    /// Companion-matrix eigenvalue oracle for polynomial roots.
    fn companion_roots(coeffs: &[C64]) -> Vec<C64> {
        let deg = coeffs.len() - 1;
        let lead = coeffs[deg];
        let m = crate::linalg::DenseMatrix::from_fn(deg, deg, |i, j| {
            if j == deg - 1 {
                -coeffs[i] / lead
            } else if i == j + 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        crate::linalg::eigenvalues(&m).unwrap()
    }

    #[test]
    fn degree_five_matches_companion_oracle() {
        let mut rng = splitmix_stream(97);
        let u = |r: u64| 2.0 * (r as f64 / u64::MAX as f64) - 1.0;
        for _ in 0..8 {
            let terms: Vec<(i64, C64)> = (-2..=3)
                .map(|e| (e, c(u(rng()), u(rng()))))
                .collect();
            let s = match Symbol::new(&terms) {
                Ok(s) if s.d1() == 3 && s.d2() == 2 => s,
                _ => continue,
            };
            let z = c(u(rng()), u(rng()));
            let lambdas = solve_lambda(&s, z).unwrap();
            let coeffs = super::pz_coefficients(&s, z);
            let mut oracle: Vec<C64> = companion_roots(&coeffs).iter().map(|r| -r).collect();
            // optimal assignment by greedy min over the 5 roots
            for lam in &lambdas {
                let (idx, dist) = oracle
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (i, (o - lam).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(dist < 1e-9, "root {lam} off oracle by {dist}");
                oracle.swap_remove(idx);
            }
        }
    }

    #[test]
    fn classify_jordan_regions() {
        let s = Symbol::jordan();
        let inside = classify_region(&s, c(0.5, 0.0)).unwrap();
        assert_eq!(inside.d0, 0);
        assert_eq!(inside.wind_index, 1);
        assert!((inside.margin - 0.5).abs() < 1e-9);

        let outside = classify_region(&s, c(2.0, 0.0)).unwrap();
        assert_eq!(outside.d0, 1);
        assert_eq!(outside.wind_index, 0);
    }

    #[test]
    fn classify_ellipse_interior() {
        let s = Symbol::ellipse();
        let r = classify_region(&s, c(0.0, 0.0)).unwrap();
        assert_eq!(r.d0, 2);
        assert_eq!(r.wind_index, -1);
    }

    #[test]
    fn product_rule_constant_for_d2_positive() {
        let s = Symbol::ellipse();
        let want = (s.coeff(-1) / s.coeff(1)).norm();
        let mut rng = splitmix_stream(5);
        let u = |r: u64| 3.0 * (r as f64 / u64::MAX as f64) - 1.5;
        for _ in 0..25 {
            let z = c(u(rng()), u(rng()));
            let l = solve_lambda(&s, z).unwrap();
            let prod: f64 = l.iter().map(|x| x.norm()).product();
            assert!(
                (prod - want).abs() < 1e-10 * want,
                "product {prod} vs {want} at z = {z}"
            );
        }
    }

    #[test]
    fn product_rule_jordan_d2_zero() {
        let s = Symbol::jordan();
        let z = c(0.3, -0.8);
        let l = solve_lambda(&s, z).unwrap();
        // ∏|λ| = |a_0 - z| / |a_1| = |z| here (a_0 = 0)
        assert!((l[0].norm() - z.norm()).abs() < 1e-12);
    }

    #[test]
    fn spec_membership_matches_winding() {
        let s = Symbol::limacon();
        let mut rng = splitmix_stream(13);
        let u = |r: u64| 4.0 * (r as f64 / u64::MAX as f64) - 2.0;
        let mut seen_nonzero = 0;
        for _ in 0..200 {
            let z = c(u(rng()), u(rng()));
            if s.distance_to_curve(z, DEFAULT_CURVE_SAMPLES) < 1e-3 {
                continue;
            }
            let r = match classify_region(&s, z) {
                Ok(r) => r,
                Err(Error::UnitModulusAmbiguity { .. }) => continue,
                Err(e) => panic!("unexpected: {e}"),
            };
            if r.wind_index != 0 {
                seen_nonzero += 1;
            }
        }
        assert!(seen_nonzero > 5, "sampling missed the spectrum entirely");
    }

    #[test]
    fn root_bound_in_z() {
        // max_ℓ |λ_ℓ(z)| ≤ C̃·max(|z|, 1) with C̃ from coefficient sizes.
        let symbols = [Symbol::jordan(), Symbol::limacon(), Symbol::ellipse()];
        let mut rng = splitmix_stream(29);
        let u = |r: u64| r as f64 / u64::MAX as f64;
        for s in &symbols {
            let c_tilde = (1.0 + s.coeff_l1()) / s.coeff(s.d1()).norm() + 1.0;
            for k in 0..60 {
                let radius = 10f64.powf(3.0 * u(rng()));
                let z = C64::from_polar(radius, 6.28 * u(rng()) + k as f64);
                let l = solve_lambda(s, z).unwrap();
                let max_mod = l.iter().map(|x| x.norm()).fold(0.0, f64::max);
                let bound = c_tilde * z.norm().max(1.0);
                assert!(
                    max_mod <= bound,
                    "{s}: max|λ| = {max_mod} exceeds {bound} at |z| = {radius}"
                );
            }
        }
    }

    #[test]
    fn continuity_within_region() {
        let s = Symbol::limacon();
        let base = c(-0.2, 0.05);
        let l0 = solve_lambda(&s, base).unwrap();
        for k in 0..10 {
            let dz = C64::from_polar(1e-7, 0.631 * k as f64);
            let l1 = solve_lambda(&s, base + dz).unwrap();
            // optimal matching distance between the two root multisets
            let mut pool = l1.clone();
            let mut worst = 0.0f64;
            for lam in &l0 {
                let (idx, d) = pool
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (i, (o - lam).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                worst = worst.max(d);
                pool.swap_remove(idx);
            }
            assert!(worst < 1e-3, "roots jumped by {worst}");
        }
    }

    #[test]
    fn unit_modulus_is_hard_error() {
        let s = Symbol::jordan();
        // |λ_1(z)| = |z| = 1 exactly on the curve; just inside the
        // tolerance band the classification must fail loudly.
        let z = C64::from_polar(1.0 + 1e-10, 0.3);
        match classify_region_with(&s, z, 1e-12, DEFAULT_CURVE_SAMPLES) {
            Err(Error::UnitModulusAmbiguity { .. }) | Err(Error::OnCurve { .. }) => {}
            other => panic!("expected ambiguity error, got {other:?}"),
        }
    }
}
