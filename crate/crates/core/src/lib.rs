//! Numerical laboratory for random weight-`k` cusp forms on the full modular
//! group.
//!
//! The library evaluates the reproducing (Bergman) kernel of the space of
//! weight-`k` cusp forms by a certified group sum and, on the diagonal near
//! the cusp, by a Poisson-summed exponential series; it samples the induced
//! random field exactly on finite point sets from the covariance alone; and
//! it provides the norm/statistics machinery used to measure sup-norm growth,
//! L^p moments, and concentration by Monte Carlo.
//!
//! Module map:
//! - [`hyperbolic`]: upper half-plane geometry, the modular group action,
//!   fundamental-domain reduction, certified orbit enumeration.
//! - [`kernel`]: Bergman kernel `R_k`, covariance kernel `r_k`, cusp-series
//!   evaluation, closed-form predictions.
//! - [`sampler`]: grids, covariance factorization, exact Gaussian/spherical
//!   field draws.
//! - [`stats`]: hyperbolic L^p norms, analytic L^p expectations, ensemble
//!   statistics, concentration and growth fits.
//! - [`delta`]: independent ground truth at k = 12 via the discriminant form.
//! - [`experiments`]: end-to-end Monte Carlo drivers shared by the CLI and
//!   the acceptance suite.
//! - [`rng`]: counter-style seed derivation for reproducible parallel draws.

pub mod delta;
pub mod experiments;
pub mod hyperbolic;
pub mod kernel;
pub mod rng;
pub mod sampler;
pub mod stats;

use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight: k must be an even integer >= 4 (got {0})")]
    InvalidWeight(i64),
    #[error("no cusp forms at this weight (k = {0}, dim S_k = 0)")]
    NoCuspForms(u32),
    #[error("enumeration budget exceeded (cap {cap}, X = {x})")]
    EnumerationBudget { cap: usize, x: f64 },
    #[error("reduction did not terminate")]
    ReductionDiverged,
    #[error("cusp series valid only for y >= 2 (got y = {0})")]
    CuspSeriesRange(f64),
    #[error("grid budget exceeded (requested {requested}, cap {cap})")]
    GridBudget { requested: usize, cap: usize },
    #[error("covariance rank exceeds dim S_k: kernel inaccuracy (rank would exceed {n_dim}, residual {residual:.3e})")]
    RankExceedsDimension { n_dim: usize, residual: f64 },
    #[error("covariance not PSD within tolerance (eigenvalue {eig:.3e} below -tol*max = {floor:.3e})")]
    NotPositiveSemidefinite { eig: f64, floor: f64 },
    #[error("increase n_max: q-expansion tail bound {tail:.3e} exceeds target {target:.3e}")]
    IncreaseNMax { tail: f64, target: f64 },
    #[error("empty grid")]
    EmptyGrid,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("quadrature divergent on unbounded region without a y-cap")]
    QuadratureDivergent,
}

pub type Result<T> = std::result::Result<T, Error>;
