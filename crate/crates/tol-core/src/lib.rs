//! Numerical laboratory for eigenvalue outliers of randomly perturbed
//! finite-band Toeplitz matrices.
//!
//! A banded Toeplitz matrix `T_N(a)` built from a Laurent-polynomial symbol
//! `a(λ) = Σ a_ℓ λ^ℓ` and perturbed by vanishing noise `N^{-γ} E_N` keeps its
//! bulk spectrum near the symbol curve `a(S¹)`, but sheds a handful of
//! outlier eigenvalues inside the regions of nonzero winding number. This
//! crate simulates those outliers directly (dense non-Hermitian eigensolves)
//! and, independently, constructs the limiting random analytic fields whose
//! zero sets the outliers converge to, so the two point processes can be
//! compared quantitatively at desk scale.
//!
//! The pieces:
//!
//! - [`symbol`]: Laurent symbols, the curve `a(S¹)`, winding numbers,
//!   distance to the curve.
//! - [`roots`]: the root system `λ_i(z)` of `λ^{d₂}(a(λ) − z)`, modulus
//!   ordering, and region classification by winding index.
//! - [`linalg`]: dense complex matrices, banded Toeplitz construction, a
//!   self-contained Hessenberg/QR eigensolver, and determinants in
//!   log-magnitude form (LU and generalized-Vandermonde/Schur routes).
//! - [`noise`]: a seeded, counter-based i.i.d. array `E_∞`; any block or
//!   single entry is reproducible bit-for-bit.
//! - [`expansion`]: the determinant expansion `det(T+Δ) = Σ_k P_k(z)`, the
//!   interlacing index-chain lattice behind its dominant term, and the
//!   L-truncated normalized dominant term.
//! - [`tableaux`]: field tableaux (semistandard Young tableaux with strict
//!   southwest diagonals), their exponents and signs, and the bijection
//!   between index chains and tableau pairs.
//! - [`field`]: evaluation of the limiting random fields, closed-form
//!   specializations, and zero location by argument-principle subdivision.
//! - [`experiments`]: config-driven Monte Carlo runners, point-process
//!   statistics, persistence, and SVG plots.

pub mod expansion;
pub mod experiments;
pub mod field;
pub mod linalg;
pub mod noise;
pub mod points;
pub mod roots;
pub mod symbol;
pub mod tableaux;

mod error;

pub use error::Error;
pub use experiments::{
    compare_point_processes, emit_plot, estimate_levy_concentration, run_field_zero_experiment,
    run_outlier_experiment, run_spectral_radius, CompareReport, CountWindow, ExperimentConfig,
};
pub use expansion::{
    compute_phat_l, compute_pk, count_pairs, enumerate_chains, IndexChain, NoiseIndexing,
};
pub use linalg::{
    build_toeplitz, det_lu, eigenvalues, schur_toeplitz_det, shifted_toeplitz, submatrix_det,
    DenseMatrix, LogComplex,
};
pub use field::{
    boundary_winding, closed_form, find_zeros, find_zeros_fn, verify_window_in_region,
    ClosedFormKind, FieldEvaluator, Window, Zero, ZeroFinderOpts,
};
pub use noise::{Dist, NoiseSource};
pub use points::{LabeledPoint, PointProcessSample, PointProvenance};
pub use roots::{classify_region, solve_lambda, RegionClass};
pub use symbol::{CurveSample, Symbol};
pub use tableaux::{
    chain_to_pair, coefficient, enumerate_pairs, make_pair, pair_accepted, pair_shapes,
    FieldTableauPair, Tableau,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Result alias for fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;
