//! End-to-end experiment drivers: grid construction, covariance
//! factorization, batched draws, and the statistics measured on them. The
//! CLI wraps these with I/O; the acceptance suite calls them directly.

use rayon::prelude::*;
use serde::Serialize;

use crate::hyperbolic::Region;
use crate::kernel::{covariance_r, Weight};
use crate::sampler::{
    factor_from_kernel, make_grid, sample_gaussian, sample_spherical, FieldSample, Model,
    DEFAULT_COVARIANCE_EPS, DEFAULT_FACTOR_TOL, DEFAULT_GRID_DENSITY,
};
use crate::stats::{ensemble_stats, EnsembleStats};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct SupRunConfig {
    pub k: u32,
    pub region: Region,
    pub model: Model,
    pub n_samples: usize,
    pub seed: u64,
    pub density: f64,
    pub covariance_eps: f64,
    pub factor_tol: f64,
}

impl SupRunConfig {
    pub fn new(k: u32, region: Region, model: Model, n_samples: usize, seed: u64) -> Self {
        SupRunConfig {
            k,
            region,
            model,
            n_samples,
            seed,
            density: DEFAULT_GRID_DENSITY,
            covariance_eps: DEFAULT_COVARIANCE_EPS,
            factor_tol: DEFAULT_FACTOR_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupRunResult {
    pub k: u32,
    pub n_grid: usize,
    pub rank: usize,
    pub n_dim: usize,
    /// Grid sup of |h| per draw.
    pub sups: Vec<f64>,
    /// Height of the argmax per draw.
    pub argmax_y: Vec<f64>,
    pub stats: EnsembleStats,
    pub zeta_mean: Option<f64>,
    /// Worst-case grid-sup bias cap from the k^{7/4} Lipschitz estimate
    /// (absolute constant of the estimate set to 1).
    pub sup_bias_cap: f64,
    pub dropped_mass: f64,
}

/// Runs one sup-norm Monte Carlo sweep at fixed weight.
pub fn run_sup_experiment(cfg: &SupRunConfig) -> Result<SupRunResult> {
    let weight = Weight::new(cfg.k)?;
    let grid = make_grid(&cfg.region, &weight, cfg.density)?;
    let factor = factor_from_kernel(&grid, &weight, cfg.covariance_eps, cfg.factor_tol)?;
    let n_dim = weight.dim();
    let stream = cfg.k as u64;
    // Draws reduce to (sup, argmax height, zeta) inside the parallel map so
    // large grids never hold the full sample batch in memory.
    let reduced: Vec<(f64, f64, Option<f64>)> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|draw| {
            let s = match cfg.model {
                Model::Spherical => sample_spherical(&factor, n_dim, cfg.seed, stream, draw)?,
                Model::Gaussian => sample_gaussian(&factor, cfg.seed, stream, draw),
            };
            let (mut best, mut best_y) = (0.0f64, grid.points[0].y);
            for (v, p) in s.values.iter().zip(&grid.points) {
                let m = v.norm();
                if m > best {
                    best = m;
                    best_y = p.y;
                }
            }
            Ok((best, best_y, s.zeta))
        })
        .collect::<Result<Vec<_>>>()?;
    let sups: Vec<f64> = reduced.iter().map(|r| r.0).collect();
    let argmax_y: Vec<f64> = reduced.iter().map(|r| r.1).collect();
    let have_zeta = reduced.iter().all(|r| r.2.is_some());
    let zeta_sum: f64 = reduced.iter().filter_map(|r| r.2).sum();
    let stats = ensemble_stats(&sups, cfg.seed ^ 0x5eed)?;
    // |h(z) - h(w)| <= k^{7/4} |z-w| / min(y, v) for unit-norm forms; the
    // worst cell half-diagonal is ~ density * y / (sqrt 2 * sqrt k).
    let sup_bias_cap =
        (cfg.k as f64).powf(1.75) * cfg.density / (cfg.k as f64).sqrt() * std::f64::consts::SQRT_2
            / 2.0;
    Ok(SupRunResult {
        k: cfg.k,
        n_grid: grid.len(),
        rank: factor.rank,
        n_dim,
        sups,
        argmax_y,
        stats,
        zeta_mean: if have_zeta { Some(zeta_sum / reduced.len() as f64) } else { None },
        sup_bias_cap,
        dropped_mass: factor.dropped_mass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LpRunConfig {
    pub k: u32,
    pub region: Region,
    pub p_list: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub density: f64,
    pub covariance_eps: f64,
    pub factor_tol: f64,
}

impl LpRunConfig {
    pub fn new(k: u32, region: Region, p_list: Vec<f64>, n_samples: usize, seed: u64) -> Self {
        LpRunConfig {
            k,
            region,
            p_list,
            n_samples,
            seed,
            density: DEFAULT_GRID_DENSITY,
            covariance_eps: DEFAULT_COVARIANCE_EPS,
            factor_tol: DEFAULT_FACTOR_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpRow {
    pub p: f64,
    /// (E ||h||_p^p)^{1/p} from the closed form (complex-sphere exponent).
    pub analytic: f64,
    /// Same under the alternative real-sphere exponent.
    pub analytic_alt: f64,
    /// (mean of ||h||_p^p)^{1/p} over the draws.
    pub empirical_root: f64,
    /// Bootstrap standard error of `empirical_root`.
    pub stderr_root: f64,
    /// Plain mean of ||h||_p (informational; carries the Jensen gap).
    pub mean_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpRunResult {
    pub k: u32,
    pub n_grid: usize,
    pub rank: usize,
    pub n_samples: usize,
    pub rows: Vec<LpRow>,
    /// Quadrature integral of r_diag over the grid (the p = 2 identity target).
    pub r_integral: f64,
}

/// L^p moments of spherical draws against the closed-form prediction.
pub fn run_lp_experiment(cfg: &LpRunConfig) -> Result<LpRunResult> {
    use crate::stats::{
        analytic_lp_expectation_on_grid, bootstrap_stderr, lp_norm, ExponentConvention,
    };
    let weight = Weight::new(cfg.k)?;
    let grid = make_grid(&cfg.region, &weight, cfg.density)?;
    let factor = factor_from_kernel(&grid, &weight, cfg.covariance_eps, cfg.factor_tol)?;
    let n_dim = weight.dim();
    let r_diag: Vec<f64> = grid
        .points
        .par_iter()
        .map(|z| covariance_r(z, z, &weight, cfg.covariance_eps).map(|v| v.re))
        .collect::<Result<Vec<_>>>()?;
    let r_integral: f64 = grid.weights.iter().zip(&r_diag).map(|(w, r)| w * r).sum();
    let draws: Vec<FieldSample> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|d| sample_spherical(&factor, n_dim, cfg.seed, cfg.k as u64 ^ 0x11, d))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &p in &cfg.p_list {
        let powers: Vec<f64> = draws
            .par_iter()
            .map(|s| lp_norm(s, &grid, p).map(|r| r.value.powf(p)))
            .collect::<Result<Vec<_>>>()?;
        let mean_power = powers.iter().sum::<f64>() / powers.len() as f64;
        let empirical_root = mean_power.powf(1.0 / p);
        let stderr_root = bootstrap_stderr(&powers, cfg.seed ^ 0xb00, |v| {
            (v.iter().sum::<f64>() / v.len() as f64).powf(1.0 / p)
        });
        let mean_norm =
            powers.iter().map(|x| x.powf(1.0 / p)).sum::<f64>() / powers.len() as f64;
        rows.push(LpRow {
            p,
            analytic: analytic_lp_expectation_on_grid(
                &weight,
                p,
                &grid,
                &r_diag,
                ExponentConvention::ComplexSphere,
            )?,
            analytic_alt: analytic_lp_expectation_on_grid(
                &weight,
                p,
                &grid,
                &r_diag,
                ExponentConvention::RealSphere,
            )?,
            empirical_root,
            stderr_root,
            mean_norm,
        });
    }
    Ok(LpRunResult {
        k: cfg.k,
        n_grid: grid.len(),
        rank: factor.rank,
        n_samples: cfg.n_samples,
        rows,
        r_integral,
    })
}

/// The standard compact bulk rectangle used by the experiments.
pub fn default_compact_region() -> Region {
    Region::CompactRectangle { x0: -0.4, x1: 0.4, y0: 1.2, y1: 1.8 }
}

/// The global region (fundamental domain, k-capped by the grid builder).
pub fn global_region() -> Region {
    Region::FundamentalTruncated { y_cap: f64::MAX }
}

/// Histogram mode of the argmax heights (log-spaced bins).
pub fn argmax_height_mode(argmax_y: &[f64]) -> f64 {
    let lo = argmax_y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = argmax_y.iter().cloned().fold(0.0f64, f64::max) * 1.0001;
    let bins = 40usize;
    let mut counts = vec![0usize; bins];
    for &y in argmax_y {
        let f = ((y / lo).ln() / (hi / lo).ln() * bins as f64) as usize;
        counts[f.min(bins - 1)] += 1;
    }
    let best = counts.iter().enumerate().max_by_key(|(_, c)| **c).map(|(i, _)| i).unwrap_or(0);
    lo * ((hi / lo).ln() * (best as f64 + 0.5) / bins as f64).exp()
}
