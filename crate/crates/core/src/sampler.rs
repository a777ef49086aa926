//! Exact-law sampling of the random cusp-form field on finite grids.
//!
//! The grid covariance matrix [r_k(z_i, z_j)] is a Gram matrix of rank at
//! most N = dim S_k. Any factor F with F F* = C supports exact sampling
//! without ever constructing a basis of S_k:
//!
//! - Gaussian model: values = F w with w i.i.d. standard complex normal.
//! - Spherical model: values = F w * sqrt(N / (|w|^2 + T)) with
//!   T ~ Gamma(N - rank, 1) independent.
//!
//! Why the spherical formula is exact. Let A be the N -> grid evaluation
//! matrix of the field, so C = A A* and the spherical values are
//! sqrt(N) A b / |b| for b i.i.d. standard complex normal (a uniform sphere
//! point is b/|b|, independent of |b|). Since col(A) = col(F), there is a
//! partial isometry U (rank x N rows, U U* = I) with A = F U. Then
//! w := U b is i.i.d. standard complex normal in the rank coordinates,
//! |b|^2 = |w|^2 + |(I - U*U) b|^2, and the second piece is an independent
//! Gamma(N - rank, 1) mass because (I - U*U) b is a standard complex normal
//! of dimension N - rank. Substituting gives exactly
//! F w sqrt(N) / sqrt(|w|^2 + T). In particular E |h(z_i)|^2 = C_ii holds as
//! an identity, not just asymptotically: E[w w*/(|w|^2+T)] = I/N by
//! symmetry of the Beta(rank, N - rank) split.
//!
//! The rank cap N is also a correctness tripwire: a covariance whose
//! numerical rank exceeds N means the kernel entries are wrong.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::hyperbolic::{Region, UpperHalfPoint};
use crate::kernel::{covariance_r, Weight};
use crate::rng::rng_for_draw;
use crate::{Error, Result};

/// Default grid density: spacing = y / (3 sqrt k), a third of the kernel
/// correlation length.
pub const DEFAULT_GRID_DENSITY: f64 = 1.0 / 3.0;

/// Default cap on grid size.
pub const DEFAULT_GRID_CAP: usize = 400_000;

/// Default absolute accuracy for covariance entries. Small enough that noise
/// eigenvalues stay far below the rank-truncation threshold on every grid the
/// acceptance suite builds.
pub const DEFAULT_COVARIANCE_EPS: f64 = 1.0e-12;

/// Default relative eigenvalue / residual truncation for factorization.
pub const DEFAULT_FACTOR_TOL: f64 = 1.0e-10;

#[derive(Clone, Debug, Serialize)]
pub struct SpacingPolicy {
    pub density: f64,
    pub k: u32,
}

/// A finite point set with hyperbolic quadrature weights.
#[derive(Clone, Debug)]
pub struct Grid {
    pub points: Vec<UpperHalfPoint>,
    /// Hyperbolic cell measure dx dy / y^2 at each point.
    pub weights: Vec<f64>,
    pub region: Region,
    pub spacing: SpacingPolicy,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hyperbolic_area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Lays out rows multiplicatively in y (spacing density * y / sqrt k) and
/// uniformly in x within each row. Global regions are additionally capped at
/// y <= 1.2 k / (2 pi), above which the field is negligible.
pub fn make_grid(region: &Region, weight: &Weight, density: f64) -> Result<Grid> {
    make_grid_with_cap(region, weight, density, DEFAULT_GRID_CAP)
}

pub fn make_grid_with_cap(
    region: &Region,
    weight: &Weight,
    density: f64,
    cap: usize,
) -> Result<Grid> {
    assert!(density > 0.0, "grid density must be positive");
    region.validate()?;
    let k = weight.k();
    let sqrt_k = (k as f64).sqrt();
    let h = density / sqrt_k; // relative row height
    let (y_lo, mut y_hi) = region.y_span();
    if !matches!(region, Region::CompactRectangle { .. }) {
        let field_cap = 1.2 * k as f64 / (2.0 * std::f64::consts::PI);
        y_hi = y_hi.min(field_cap);
    }
    if !y_hi.is_finite() {
        return Err(Error::QuadratureDivergent);
    }
    let (x_lo, x_hi) = region.x_span();
    let width = x_hi - x_lo;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut y_a = y_lo;
    while y_a < y_hi {
        let y_b = (y_a * (1.0 + h)).min(y_hi);
        let ym = 0.5 * (y_a + y_b);
        let dx_target = density * ym / sqrt_k;
        let nx = (width / dx_target).ceil().max(1.0) as usize;
        let dx = width / nx as f64;
        for i in 0..nx {
            let x = x_lo + (i as f64 + 0.5) * dx;
            let p = UpperHalfPoint::new(x, ym);
            if region.contains(&p) {
                points.push(p);
                weights.push(dx * (y_b - y_a) / (ym * ym));
                if points.len() > cap {
                    return Err(Error::GridBudget { requested: points.len(), cap });
                }
            }
        }
        y_a = y_b;
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(Grid {
        points,
        weights,
        region: region.clone(),
        spacing: SpacingPolicy { density, k },
    })
}

/// Dense covariance matrix of the grid: entry (i, j) = r_k(z_i, z_j).
/// Exactly Hermitian by construction (upper triangle mirrored).
pub fn build_covariance(grid: &Grid, weight: &Weight, eps: f64) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    let mut v = covariance_r(&grid.points[i], &grid.points[j], weight, eps)?;
                    if i == j {
                        v = Complex64::new(v.re, 0.0);
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for (off, &v) in rows[i].iter().enumerate() {
            let j = i + off;
            c[(i, j)] = v;
            if j != i {
                c[(j, i)] = v.conj();
            }
        }
    }
    Ok(c)
}

/// Low-rank Hermitian factor F with F F* ~ C.
#[derive(Clone, Debug)]
pub struct CovarianceFactor {
    /// n x rank.
    pub factor: DMatrix<Complex64>,
    pub rank: usize,
    pub truncation_tol: f64,
    /// Trace-norm mass of the dropped part.
    pub dropped_mass: f64,
    pub n_points: usize,
    pub k: u32,
}

/// Eigendecomposition route: drop eigenvalues below tol * max, fail on
/// meaningfully negative ones, and fail if the retained rank exceeds N.
pub fn hermitian_factor(
    c: &DMatrix<Complex64>,
    tol: f64,
    n_dim: usize,
    k: u32,
) -> Result<CovarianceFactor> {
    let n = c.nrows();
    assert_eq!(n, c.ncols());
    let eig = c.clone().symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let floor = tol * max_eig;
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped_mass = 0.0;
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam < -floor {
            return Err(Error::NotPositiveSemidefinite { eig: lam, floor: -floor });
        }
        if lam >= floor && lam > 0.0 {
            kept.push(i);
        } else {
            dropped_mass += lam.abs();
        }
    }
    if kept.len() > n_dim {
        let residual: f64 = kept.iter().map(|&i| eig.eigenvalues[i]).sum();
        return Err(Error::RankExceedsDimension { n_dim, residual });
    }
    kept.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let rank = kept.len();
    let mut f = DMatrix::zeros(n, rank);
    for (col, &i) in kept.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        for r in 0..n {
            f[(r, col)] = eig.eigenvectors[(r, i)] * s;
        }
    }
    Ok(CovarianceFactor {
        factor: f,
        rank,
        truncation_tol: tol,
        dropped_mass,
        n_points: n,
        k,
    })
}

/// Pivoted-Cholesky route: builds the factor from on-demand kernel columns
/// without materializing C. Stops when the trace residual falls below
/// tol * trace; exceeding rank N with residual still large is the kernel
/// accuracy tripwire.
pub fn factor_from_kernel(
    grid: &Grid,
    weight: &Weight,
    eps: f64,
    tol: f64,
) -> Result<CovarianceFactor> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let n_dim = weight.dim();
    if n_dim == 0 {
        return Err(Error::NoCuspForms(weight.k()));
    }
    let mut diag: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| covariance_r(&grid.points[i], &grid.points[i], weight, eps).map(|v| v.re))
        .collect::<Result<Vec<_>>>()?;
    let trace0: f64 = diag.iter().sum();
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    loop {
        let residual: f64 = diag.iter().map(|d| d.max(0.0)).sum();
        if residual <= tol * trace0 {
            break;
        }
        let floor = -tol * trace0 * 10.0;
        if let Some(worst) = diag.iter().cloned().filter(|d| *d < floor).reduce(f64::min) {
            return Err(Error::NotPositiveSemidefinite { eig: worst, floor });
        }
        if cols.len() == n_dim {
            return Err(Error::RankExceedsDimension { n_dim, residual });
        }
        let (piv, &piv_val) = diag
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .expect("nonempty diag");
        let zp = grid.points[piv];
        let mut col: Vec<Complex64> = grid
            .points
            .par_iter()
            .map(|zi| covariance_r(zi, &zp, weight, eps))
            .collect::<Result<Vec<_>>>()?;
        for (f, _) in cols.iter().zip(pivots.iter()) {
            let fp = f[piv].conj();
            for i in 0..n {
                col[i] -= f[i] * fp;
            }
        }
        let s = piv_val.max(0.0).sqrt();
        if s == 0.0 {
            break;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            col[i] *= inv;
        }
        col[piv] = Complex64::new(s, 0.0);
        for i in 0..n {
            diag[i] -= col[i].norm_sqr();
        }
        diag[piv] = 0.0;
        cols.push(col);
        pivots.push(piv);
    }
    let rank = cols.len();
    let mut f = DMatrix::zeros(n, rank);
    for (c, col) in cols.iter().enumerate() {
        for i in 0..n {
            f[(i, c)] = col[i];
        }
    }
    let dropped_mass: f64 = diag.iter().map(|d| d.max(0.0)).sum();
    Ok(CovarianceFactor {
        factor: f,
        rank,
        truncation_tol: tol,
        dropped_mass,
        n_points: n,
        k: weight.k(),
    })
}

/// Coefficient model of a draw. Both are complex-coefficient ensembles; a
/// real-coefficient variant would slot in here but is deliberately left out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Model {
    Gaussian,
    Spherical,
}

/// One realization of the field h_k at the grid points.
#[derive(Clone, Debug)]
pub struct FieldSample {
    pub values: Vec<Complex64>,
    pub model: Model,
    pub seed: u64,
    pub stream: u64,
    pub draw: u64,
    /// Spherical draws record the implied norm factor zeta-hat =
    /// sqrt((|w|^2 + T)/N); the Gaussian model has none.
    pub zeta: Option<f64>,
}

fn standard_complex_normals(rng: &mut impl Rng, count: usize) -> Vec<Complex64> {
    // E|w|^2 = 1: real and imaginary parts each have variance 1/2.
    let s = 0.5f64.sqrt();
    (0..count)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

fn apply_factor(f: &DMatrix<Complex64>, w: &[Complex64], scale: f64) -> Vec<Complex64> {
    let n = f.nrows();
    let r = f.ncols();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..r {
        let wc = w[c] * scale;
        let col = f.column(c);
        for i in 0..n {
            out[i] += col[i] * wc;
        }
    }
    out
}

/// Gaussian-model draw: values = F w.
pub fn sample_gaussian(f: &CovarianceFactor, seed: u64, stream: u64, draw: u64) -> FieldSample {
    let mut rng = rng_for_draw(seed, stream, draw);
    let w = standard_complex_normals(&mut rng, f.rank);
    FieldSample {
        values: apply_factor(&f.factor, &w, 1.0),
        model: Model::Gaussian,
        seed,
        stream,
        draw,
        zeta: None,
    }
}

/// Spherical-model draw: values = F w * sqrt(N / (|w|^2 + T)) with
/// T ~ Gamma(N - rank, 1) the unseen orthogonal coefficient mass.
pub fn sample_spherical(
    f: &CovarianceFactor,
    n_dim: usize,
    seed: u64,
    stream: u64,
    draw: u64,
) -> Result<FieldSample> {
    if f.rank > n_dim {
        return Err(Error::RankExceedsDimension { n_dim, residual: f.dropped_mass });
    }
    let mut rng = rng_for_draw(seed, stream, draw);
    let w = standard_complex_normals(&mut rng, f.rank);
    let s2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    let extra = n_dim - f.rank;
    let t = if extra == 0 {
        0.0
    } else {
        Gamma::new(extra as f64, 1.0).expect("valid gamma shape").sample(&mut rng)
    };
    let total = s2 + t;
    let scale = (n_dim as f64 / total).sqrt();
    Ok(FieldSample {
        values: apply_factor(&f.factor, &w, scale),
        model: Model::Spherical,
        seed,
        stream,
        draw,
        zeta: Some((total / n_dim as f64).sqrt()),
    })
}

/// Parallel batch of spherical draws, order-independent by construction.
pub fn sample_spherical_batch(
    f: &CovarianceFactor,
    n_dim: usize,
    seed: u64,
    stream: u64,
    count: usize,
) -> Result<Vec<FieldSample>> {
    (0..count as u64)
        .into_par_iter()
        .map(|draw| sample_spherical(f, n_dim, seed, stream, draw))
        .collect()
}

pub fn sample_gaussian_batch(
    f: &CovarianceFactor,
    seed: u64,
    stream: u64,
    count: usize,
) -> Vec<FieldSample> {
    (0..count as u64)
        .into_par_iter()
        .map(|draw| sample_gaussian(f, seed, stream, draw))
        .collect()
}
