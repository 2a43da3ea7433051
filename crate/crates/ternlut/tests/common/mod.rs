//! Shared test support: independent oracles and seeded generators.
//!
//! Everything here deliberately avoids the crate's own arithmetic paths so
//! the acceptance checks are two-route comparisons, not self-consistency.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ternlut::{ActivationType, TernaryMatrix, TileConfig, Trit, F16};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_trit(rng: &mut ChaCha8Rng) -> Trit {
    match rng.random_range(0..3) {
        0 => Trit::Neg,
        1 => Trit::Zero,
        _ => Trit::Pos,
    }
}

pub fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> TernaryMatrix {
    TernaryMatrix::from_fn(rows, cols, |_, _| rand_trit(rng)).unwrap()
}

pub fn rand_i8_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<i8> {
    (0..len).map(|_| rng.random_range(-128i16..=127) as i8).collect()
}

/// Random finite binary16 words: uniform bit patterns with NaN/Inf redrawn.
/// Covers normals, subnormals, and both zeros.
pub fn rand_f16_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<F16> {
    (0..len)
        .map(|_| loop {
            let bits: u16 = rng.random();
            let w = F16::from_bits(bits);
            if w.is_finite() {
                return w;
            }
        })
        .collect()
}

pub fn rand_cfg(rng: &mut ChaCha8Rng, act: ActivationType, max_l: usize, max_mu: usize, max_k: usize) -> TileConfig {
    TileConfig::new(
        rng.random_range(1..=max_l),
        rng.random_range(1..=max_mu),
        rng.random_range(1..=max_k),
        act,
    )
    .unwrap()
}

/// Direct ternary-MAC oracle: plain row dot products in i32, no tiling, no
/// LUTs, no key encoding.
pub fn naive_gemv_i32(w: &TernaryMatrix, x: &[i8]) -> Vec<i32> {
    assert_eq!(x.len(), w.cols());
    (0..w.rows())
        .map(|r| w.row(r).iter().zip(x).map(|(t, &a)| t.value() as i32 * a as i32).sum())
        .collect()
}

const EXP_MASK: u16 = 0x7C00;
const MAN_MASK: u16 = 0x03FF;
const SIGN_MASK: u16 = 0x8000;
const QNAN: u16 = 0x7E00;

/// Independent software binary16 adder: exact integer alignment at the
/// 2^-24 granularity followed by one round-to-nearest-even step. Never goes
/// through f32, so it cross-checks the crate's widening emulation.
pub fn ref_f16_add(a: u16, b: u16) -> u16 {
    let a_exp = (a & EXP_MASK) >> 10;
    let b_exp = (b & EXP_MASK) >> 10;
    let a_man = a & MAN_MASK;
    let b_man = b & MAN_MASK;

    if (a_exp == 31 && a_man != 0) || (b_exp == 31 && b_man != 0) {
        return QNAN;
    }
    let a_inf = a_exp == 31;
    let b_inf = b_exp == 31;
    if a_inf && b_inf {
        return if (a ^ b) & SIGN_MASK != 0 { QNAN } else { a };
    }
    if a_inf {
        return a;
    }
    if b_inf {
        return b;
    }

    let a_zero = a & !SIGN_MASK == 0;
    let b_zero = b & !SIGN_MASK == 0;
    if a_zero && b_zero {
        // Same-signed zeros keep the sign; opposite signs give +0 under RNE.
        return if a == b { a } else { 0 };
    }
    if a_zero {
        return b;
    }
    if b_zero {
        return a;
    }

    // Every finite binary16 is an integer multiple of 2^-24, so the sum is
    // exact in i64.
    let sig = |h: u16| -> i64 {
        let exp = (h & EXP_MASK) >> 10;
        let man = (h & MAN_MASK) as i64;
        let (m, lsb_exp) = if exp == 0 { (man, -24i32) } else { (man | 0x400, exp as i32 - 25) };
        let v = m << (lsb_exp + 24);
        if h & SIGN_MASK != 0 {
            -v
        } else {
            v
        }
    };
    let sum = sig(a) + sig(b);
    if sum == 0 {
        // Exact cancellation of nonzero operands rounds to +0.
        return 0;
    }
    let sign = if sum < 0 { SIGN_MASK } else { 0 };
    let mag = sum.unsigned_abs(); // value = mag * 2^-24

    let msb = 63 - mag.leading_zeros() as i32;
    let e_r = msb - 24; // unbiased exponent of the result
    if e_r < -14 {
        // Below the normal range the sum is exactly representable (subnormal).
        debug_assert!(mag < 0x400);
        return sign | mag as u16;
    }
    let shift = msb - 10;
    debug_assert!(shift >= 0);
    let mut m = mag >> shift;
    if shift > 0 {
        let dropped = mag & ((1u64 << shift) - 1);
        let half = 1u64 << (shift - 1);
        if dropped > half || (dropped == half && (m & 1) == 1) {
            m += 1;
        }
    }
    let mut e = e_r;
    if m == 0x800 {
        m >>= 1;
        e += 1;
    }
    if e > 15 {
        return sign | EXP_MASK;
    }
    sign | (((e + 15) as u16) << 10) | (m as u16 & MAN_MASK)
}
