//! Independent ground truth at weight 12.
//!
//! The space of weight-12 cusp forms is one-dimensional, spanned by the
//! discriminant form Delta(z) = q prod (1 - q^n)^24. Evaluating Delta from
//! its exact q-expansion and its Petersson norm by quadrature gives the
//! covariance r_12(z, z) = y^12 |Delta(z)|^2 / <Delta, Delta> by a route that
//! shares nothing with the kernel group sum; the agreement of the two is the
//! strongest end-to-end check in the crate.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::hyperbolic::UpperHalfPoint;
use crate::{Error, Result};

/// Exact integer q-expansion coefficients tau(1) ... tau(n_max).
#[derive(Clone, Debug)]
pub struct QExpansion {
    /// coefficients[n - 1] = tau(n).
    pub coefficients: Vec<i128>,
    pub n_max: usize,
}

/// tau(n) for n <= n_max via the power-series product q * prod (1 - q^n)^24,
/// carried out in arbitrary-width integers, then converted exactly.
pub fn tau_coefficients(n_max: usize) -> QExpansion {
    assert!(n_max >= 1);
    // Work with the series prod (1 - q^n)^24 truncated at degree n_max - 1,
    // then shift by the leading q.
    let deg = n_max - 1;
    let mut poly: Vec<BigInt> = vec![BigInt::zero(); deg + 1];
    poly[0] = BigInt::one();
    // Binomial row for (1 - x)^24.
    let mut binom = [0i128; 25];
    binom[0] = 1;
    for j in 1..=24 {
        binom[j] = binom[j - 1] * (25 - j as i128) / j as i128;
    }
    for n in 1..=deg.max(1) {
        if n > deg {
            break;
        }
        // Multiply poly by (1 - q^n)^24 = sum_j binom[j] (-1)^j q^{nj}.
        let mut next: Vec<BigInt> = vec![BigInt::zero(); deg + 1];
        for (j, &bj) in binom.iter().enumerate() {
            let shift = n * j;
            if shift > deg {
                break;
            }
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let factor = BigInt::from(sign * bj);
            for i in 0..=(deg - shift) {
                if !poly[i].is_zero() {
                    next[i + shift] += &poly[i] * &factor;
                }
            }
        }
        poly = next;
    }
    let coefficients: Vec<i128> = poly
        .iter()
        .map(|c| c.to_i128().expect("tau coefficient exceeds i128"))
        .collect();
    QExpansion { coefficients, n_max }
}

impl QExpansion {
    pub fn tau(&self, n: usize) -> i128 {
        self.coefficients[n - 1]
    }
}

/// Default expansion length; e^{-2 pi * 0.5 * 200} dwarfs any polynomial
/// growth of tau, so 200 terms cover y >= 0.5 to far below f64 resolution.
pub const DEFAULT_N_MAX: usize = 200;

/// Delta(z) = sum tau(n) e^{2 pi i n z}, with the crude |tau(n)| <= n^6
/// majorant certifying the omitted tail below 1e-15 of the leading term.
pub fn delta_eval(z: &UpperHalfPoint, exp: &QExpansion) -> Result<Complex64> {
    let y = z.y;
    assert!(y >= 0.5, "delta_eval is supported for y >= 0.5");
    let lead = (-2.0 * std::f64::consts::PI * y).exp();
    let n_max = exp.n_max;
    // Tail bound: sum_{n > n_max} n^6 e^{-2 pi n y} by geometric comparison.
    let t = (n_max + 1) as f64;
    let ratio = (-2.0 * std::f64::consts::PI * y).exp() * ((t + 1.0) / t).powi(6);
    let tail = t.powi(6) * (-2.0 * std::f64::consts::PI * y * t).exp() / (1.0 - ratio);
    if !(tail <= 1e-15 * lead) {
        return Err(Error::IncreaseNMax { tail, target: 1e-15 * lead });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let two_pi = 2.0 * std::f64::consts::PI;
    for n in (1..=n_max).rev() {
        // Summing smallest terms first keeps the roundoff at the floor.
        let nf = n as f64;
        let mag = (-two_pi * nf * y).exp();
        if mag == 0.0 {
            continue;
        }
        let phase = two_pi * nf * z.x;
        let coeff = exp.tau(n) as f64;
        sum += Complex64::new(phase.cos(), phase.sin()) * (coeff * mag);
    }
    Ok(sum)
}

/// Result of the Petersson-norm quadrature.
#[derive(Clone, Copy, Debug)]
pub struct PeterssonNorm {
    pub value: f64,
    /// |value(res) - value(res/2)|: the refinement error estimate.
    pub refinement_error: f64,
    /// Certified bound on the mass above the y-truncation.
    pub truncation_bound: f64,
}

/// Number of q-expansion terms carried by the norm integrand; the heaviest
/// factor is e^{-2 pi (m+n) sqrt(3)/2}, so cross terms die out fast.
const NORM_TERMS: usize = 40;

/// <Delta, Delta> = int_D y^12 |Delta|^2 dx dy / y^2.
///
/// |Delta|^2 is 1-periodic in x, so the x-integral is exact: over the full
/// period it is the Parseval sum `sum_n tau(n)^2 e^{-4 pi n y}`, whose
/// y-integral from the domain floor upward has a closed form via incomplete
/// gamma. What remains is the lens sqrt(3)/2 <= y <= 1, |x| < sqrt(1-y^2)
/// that the fundamental domain excludes: its x-integral is a finite
/// sinc-weighted coefficient sum, leaving one smooth 1-D y-quadrature at the
/// requested `resolution` (midpoint; the refinement gap is the reported
/// error estimate).
pub fn petersson_norm_delta(resolution: usize, exp: &QExpansion) -> PeterssonNorm {
    let coarse = petersson_once(resolution / 2, exp);
    let value = petersson_once(resolution, exp);
    // Coefficient truncation: |tau(n)| <= n^6 bounds the omitted Parseval
    // terms by sum_{n > N} n^12 e^{-4 pi n y0}, dwarfed by the kept terms.
    let y0 = 3.0f64.sqrt() / 2.0;
    let nf = (NORM_TERMS + 1) as f64;
    let tail = 2.0 * nf.powi(12) * (-4.0 * std::f64::consts::PI * y0 * nf).exp();
    PeterssonNorm { value, refinement_error: (value - coarse).abs(), truncation_bound: tail }
}

/// int_a^infty y^10 e^{-s y} dy = Gamma(11, a s) / s^11, via the finite sum
/// 10! e^{-as}/s^11 * sum_{j<=10} (as)^j / j!.
fn upper_tail_y10(a: f64, s: f64) -> f64 {
    let x = a * s;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=10u32 {
        term *= x / j as f64;
        sum += term;
    }
    let ln10fact = (2..=10u64).map(|j| (j as f64).ln()).sum::<f64>();
    (ln10fact - x - 11.0 * s.ln()).exp() * sum
}

fn petersson_once(resolution: usize, exp: &QExpansion) -> f64 {
    let y0 = 3.0f64.sqrt() / 2.0;
    let two_pi = 2.0 * std::f64::consts::PI;
    let n_max = NORM_TERMS.min(exp.n_max);
    // Full-period Parseval part over y >= y0.
    let mut full = 0.0;
    for n in (1..=n_max).rev() {
        let tau = exp.tau(n) as f64;
        full += tau * tau * upper_tail_y10(y0, 2.0 * two_pi * n as f64);
    }
    // Lens correction: y in [y0, 1], |x| <= x0(y) = sqrt(1 - y^2). The
    // substitution y = cos(theta), x0 = sin(theta) removes the square-root
    // singularity of x0 at y = 1, restoring O(h^2) midpoint convergence.
    let ny = resolution.max(8);
    let theta_max = y0.acos();
    let dt = theta_max / ny as f64;
    let lens: f64 = (0..ny)
        .into_par_iter()
        .map(|j| {
            let theta = (j as f64 + 0.5) * dt;
            let y = theta.cos();
            let x0 = theta.sin();
            let mut band = 0.0;
            for m in 1..=n_max {
                let tm = exp.tau(m) as f64;
                for n in 1..=n_max {
                    let tn = exp.tau(n) as f64;
                    let decay = (-two_pi * (m + n) as f64 * y).exp();
                    if decay == 0.0 {
                        continue;
                    }
                    let d = m as f64 - n as f64;
                    let xint = if m == n {
                        2.0 * x0
                    } else {
                        (two_pi * d * x0).sin() / (std::f64::consts::PI * d)
                    };
                    band += tm * tn * decay * xint;
                }
            }
            y.powi(10) * band * theta.sin() * dt
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    full - lens
}

/// Norm quadrature resolution giving ~1e-8 relative accuracy (the k = 12
/// kernel cross-check budget is 1e-6).
pub const DEFAULT_NORM_RESOLUTION: usize = 4000;

/// The weight-12 oracle bundle: expansion plus cached Petersson norm.
pub struct DeltaOracle {
    pub expansion: QExpansion,
    pub norm: PeterssonNorm,
}

impl DeltaOracle {
    pub fn new(resolution: usize) -> Self {
        let expansion = tau_coefficients(DEFAULT_N_MAX);
        let norm = petersson_norm_delta(resolution, &expansion);
        DeltaOracle { expansion, norm }
    }

    /// r_12(z, z) = y^12 |Delta(z)|^2 / <Delta, Delta>, the exact covariance
    /// of the one-dimensional weight-12 ensemble.
    pub fn variance_k12(&self, z: &UpperHalfPoint) -> Result<f64> {
        let d = delta_eval(z, &self.expansion)?;
        Ok(z.y.powi(12) * d.norm_sqr() / self.norm.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tau_small_values() {
        let exp = tau_coefficients(16);
        assert_eq!(exp.tau(1), 1);
        assert_eq!(exp.tau(2), -24);
        assert_eq!(exp.tau(3), 252);
        assert_eq!(exp.tau(4), -1472);
        assert_eq!(exp.tau(5), 4830);
        assert_eq!(exp.tau(6), -6048);
        assert_eq!(exp.tau(7), -16744);
    }

    #[test]
    fn tau_hecke_multiplicativity() {
        let exp = tau_coefficients(16);
        assert_eq!(exp.tau(6), exp.tau(2) * exp.tau(3));
        assert_eq!(exp.tau(10), exp.tau(2) * exp.tau(5));
        assert_eq!(exp.tau(15), exp.tau(3) * exp.tau(5));
    }

    #[test]
    fn delta_periodicity_and_decay() {
        let exp = tau_coefficients(DEFAULT_N_MAX);
        let z = UpperHalfPoint::new(0.37, 1.1);
        let z1 = UpperHalfPoint::new(z.x + 1.0, z.y);
        let a = delta_eval(&z, &exp).unwrap();
        let b = delta_eval(&z1, &exp).unwrap();
        assert!((a - b).norm() <= 1e-12 * a.norm());

        // Single dominant term: |Delta(iy)| ~ e^{-2 pi y}.
        for y in [3.0, 4.0, 5.0] {
            let v = delta_eval(&UpperHalfPoint::new(0.0, y), &exp).unwrap().norm();
            let pred = (-2.0 * std::f64::consts::PI * y).exp();
            assert!((v / pred - 1.0).abs() < 1e-3, "y={y}: {v} vs {pred}");
        }
    }

    #[test]
    fn delta_weight_twelve_modularity() {
        let exp = tau_coefficients(DEFAULT_N_MAX);
        let z = UpperHalfPoint::new(0.3, 1.4);
        let s = crate::hyperbolic::GroupElement::inversion();
        let sz = crate::hyperbolic::moebius_apply(&s, &z);
        let a = z.y.powi(6) * delta_eval(&z, &exp).unwrap().norm();
        let b = sz.y.powi(6) * delta_eval(&sz, &exp).unwrap().norm();
        assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
    }

    #[test]
    fn delta_eval_rejects_underresolved_expansion() {
        let exp = tau_coefficients(10);
        let z = UpperHalfPoint::new(0.0, 0.5);
        assert!(matches!(delta_eval(&z, &exp), Err(Error::IncreaseNMax { .. })));
    }

    #[test]
    fn petersson_norm_self_consistent() {
        let exp = tau_coefficients(DEFAULT_N_MAX);
        let n = petersson_norm_delta(DEFAULT_NORM_RESOLUTION, &exp);
        assert!(n.value > 0.0);
        assert!(n.refinement_error <= 1e-4 * n.value, "refinement {} vs {}", n.refinement_error, n.value);
        assert!(n.truncation_bound < 1e-100);
        // Scale sanity: the norm is ~1.035e-6.
        assert!((n.value - 1.0354e-6).abs() < 0.01e-6, "norm = {}", n.value);
    }

    #[test]
    fn petersson_invariant_under_translated_half_cell() {
        // Integrating y^12 |Delta|^2 / y^2 over a cell and over its image
        // under z -> z + 1 gives the same mass (integrand periodicity).
        let exp = tau_coefficients(DEFAULT_N_MAX);
        let cell = |x0: f64| {
            let mut s = 0.0;
            let n = 40;
            for i in 0..n {
                for j in 0..n {
                    let x = x0 + (i as f64 + 0.5) / n as f64 * 0.3;
                    let y = 1.1 + (j as f64 + 0.5) / n as f64 * 0.4;
                    let z = UpperHalfPoint::new(x, y);
                    let d = delta_eval(&z, &exp).unwrap();
                    s += y.powi(10) * d.norm_sqr() * (0.3 / n as f64) * (0.4 / n as f64);
                }
            }
            s
        };
        let a = cell(0.1);
        let b = cell(1.1);
        assert_abs_diff_eq!(a, b, epsilon = 1e-6 * a);
    }
}
