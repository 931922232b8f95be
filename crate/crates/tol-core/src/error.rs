use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("symbol parse error: {0}")]
    SymbolParse(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("query point is on the symbol curve (distance {dist:.3e} below tolerance)")]
    OnCurve { dist: f64 },

    #[error("root of modulus within {tol:.1e} of one; region membership is ambiguous at z = {z}")]
    UnitModulusAmbiguity { z: num_complex::Complex<f64>, tol: f64 },

    #[error("winding cross-check failed at z = {z}: root count gives {from_roots}, curve gives {from_curve}")]
    WindingMismatch {
        z: num_complex::Complex<f64>,
        from_roots: i64,
        from_curve: i64,
    },

    #[error("root solver did not converge after {sweeps} sweeps (max residual {residual:.3e})")]
    RootSolver { sweeps: usize, residual: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigenSolver { sweeps: usize },

    #[error("combinatorial budget exceeded: {count} items (budget {budget})")]
    BudgetExceeded { count: usize, budget: usize },

    #[error("region mismatch: expected winding index {expected}, got {got}")]
    RegionMismatch { expected: i64, got: i64 },

    #[error("phase tracking failed on edge ({x0},{y0})-({x1},{y1}) after max refinement")]
    PhaseTracking { x0: f64, y0: f64, x1: f64, y1: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
