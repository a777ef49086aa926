//! Counter-style RNG derivation.
//!
//! Each Monte Carlo draw gets its own ChaCha stream keyed by
//! (seed, stream, draw index), so parallel draws are order-independent and a
//! fixed seed reproduces byte-identical output regardless of worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[inline]
fn splitmix(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, v: u64) -> u64 {
    let mut s = h ^ v.wrapping_mul(0xA24B_AED4_963E_E407);
    let mut out = s;
    for _ in 0..2 {
        out ^= splitmix(&mut s);
    }
    out
}

/// Deterministic generator for one draw.
pub fn rng_for_draw(seed: u64, stream: u64, draw: u64) -> ChaCha12Rng {
    let mut h = absorb(absorb(absorb(0x6A09_E667_F3BC_C908, seed), stream), draw);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut h).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}
