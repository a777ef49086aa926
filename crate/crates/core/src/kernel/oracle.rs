//! Exact evaluation of the cusp-stabilizer part of the diagonal kernel.
//!
//! For z = x + iy the stabilizer of the cusp contributes
//! `2 * sum_{n in Z} (2iy / (n + 2iy))^k` to R_k(z, z); this is independent
//! of x. When 2y is an integer every term is a Gaussian-rational power, so
//! the partial sum can be evaluated in exact integer arithmetic at any
//! precision. The n-sum cancels catastrophically (terms are O(1), the sum can
//! be exponentially small), which is precisely why the exact route exists:
//! it adjudicates the Poisson-summed series at full strength in regimes
//! where f64, and even double-double, would drown in roundoff.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fixed-point scale, in bits, for the exact accumulation.
const SCALE_BITS: u32 = 512;

/// Exact stabilizer sum `2 * sum_n (2iy/(n+2iy))^k` at z = x + iy.
///
/// `two_y` is 2y (must be a positive integer), `k` the (even) weight, and
/// `abs_tail` the absolute truncation target for the n-tail. Returns the
/// value together with the certified n-tail bound actually achieved.
pub fn stabilizer_sum_exact(two_y: u32, k: u32, abs_tail: f64) -> (f64, f64) {
    assert!(two_y > 0 && k >= 4 && k % 2 == 0);
    let y2 = two_y as i64;

    // Truncation: for n > M, |term| = (1 + n^2/(2y)^2)^{-k/2} < ((2y)/n)^k,
    // so the two-sided remainder is < 4 (2y/M)^k M/(k-1) for M >= 2*(2y).
    let mut m_cut: i64 = 4 * y2;
    let tail_at = |m: i64| -> f64 {
        let r = two_y as f64 / m as f64;
        4.0 * r.powi(k as i32) * m as f64 / (k as f64 - 1.0)
    };
    while tail_at(m_cut) > abs_tail && m_cut < 20_000_000 {
        m_cut *= 2;
    }
    let tail = tail_at(m_cut);

    // (2iy)^k = (2y)^k * i^k, and i^k = (-1)^{k/2} for even k.
    let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
    let y2k = BigInt::from(y2).pow(k);
    let scale = BigInt::from(1) << SCALE_BITS;
    let numer_base = &y2k * &scale;

    let mut acc = BigInt::zero();
    for n in 0..=m_cut {
        // (n + i*2y)^k as a Gaussian integer by binary powering.
        let (re, im) = gaussian_pow(BigInt::from(n), BigInt::from(y2), k);
        let modulus = &re * &re + &im * &im;
        // Re of (2y)^k / (n+2iy)^k, scaled by 2^SCALE_BITS.
        let contrib = (&numer_base * &re) / &modulus;
        if n == 0 {
            acc += contrib;
        } else {
            // n and -n give conjugate powers: equal real parts.
            acc += contrib << 1;
        }
    }

    // Group factor 2 for +-gamma.
    let value = 2.0 * big_to_f64_scaled(&acc, SCALE_BITS) * sign as f64;
    (value, tail)
}

fn gaussian_pow(re: BigInt, im: BigInt, mut k: u32) -> (BigInt, BigInt) {
    let mut base = (re, im);
    let mut acc = (BigInt::from(1), BigInt::zero());
    while k > 0 {
        if k & 1 == 1 {
            acc = gaussian_mul(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = gaussian_mul(&base, &base);
        }
    }
    acc
}

fn gaussian_mul(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn big_to_f64_scaled(v: &BigInt, bits: u32) -> f64 {
    // v / 2^bits without overflowing f64 conversion for moderate magnitudes.
    let negative = v.is_negative();
    let mut a = v.abs();
    let mut shift = 0u32;
    while a.bits() > 900 {
        a >>= 64;
        shift += 64;
    }
    let x = a.to_f64().unwrap_or(f64::INFINITY);
    let val = x * 2.0f64.powi(shift as i32 - bits as i32);
    if negative {
        -val
    } else {
        val
    }
}
