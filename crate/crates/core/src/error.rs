use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:.3e} exceeds {tolerance:.1e}")]
    Symmetry { max_asymmetry: f64, tolerance: f64 },

    #[error("no convergence after {iterations} iterations (best residual {best_residual:.3e})")]
    Convergence { iterations: usize, best_residual: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular mode at q = {q}: pair amplitude denominator vanishes")]
    SingularMode { q: f64 },

    #[error("system too large for exact diagonalization: N = {n_sites}, limit {limit}")]
    Size { n_sites: usize, limit: usize },

    #[error("argument {value} outside the domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("state is not normalized: norm {norm}")]
    Normalization { norm: f64 },

    #[error("invalid density matrix: {0}")]
    Validity(String),
}
