//! Datapath word types.
//!
//! [`Word`] is the small arithmetic surface every simulated wire carries:
//! an additive identity, addition, and negation. The integer lane uses plain
//! two's-complement types; the floating lane uses [`F16`], a software IEEE 754
//! binary16 with round-to-nearest-even.
//!
//! Each binary16 addition is performed by widening both operands to binary32,
//! adding, and rounding the result back to binary16. Because binary32 carries
//! 24 significand bits and binary16 carries 11, the intermediate precision
//! satisfies 24 >= 2*11 + 2, so the double rounding is exact for addition:
//! the result is bit-identical to a native correctly-rounded binary16 add.
//! The acceptance suite cross-checks this against an independent bit-level
//! binary16 adder.

use std::fmt;

/// Minimal arithmetic interface of a simulated datapath word.
pub trait Word: Copy + PartialEq + fmt::Debug {
    const ZERO: Self;
    fn add(self, rhs: Self) -> Self;
    fn neg(self) -> Self;
}

impl Word for i16 {
    const ZERO: Self = 0;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn neg(self) -> Self {
        -self
    }
}

impl Word for i32 {
    const ZERO: Self = 0;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn neg(self) -> Self {
        -self
    }
}

impl Word for i64 {
    const ZERO: Self = 0;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn neg(self) -> Self {
        -self
    }
}

impl Word for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn neg(self) -> Self {
        -self
    }
}

/// IEEE 754 binary16 value, stored as its raw bit pattern.
///
/// Equality is bitwise: `-0.0 != +0.0` and NaN equals NaN. This is deliberate,
/// since the simulator's FP16 contract is bit-exactness against an oracle that
/// follows the same arithmetic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct F16(u16);

const F16_EXP_MASK: u16 = 0x7C00;
const F16_MAN_MASK: u16 = 0x03FF;
const F16_SIGN_MASK: u16 = 0x8000;

impl F16 {
    pub const ZERO: F16 = F16(0x0000);
    pub const NEG_ZERO: F16 = F16(0x8000);
    pub const ONE: F16 = F16(0x3C00);
    pub const INFINITY: F16 = F16(0x7C00);
    pub const NEG_INFINITY: F16 = F16(0xFC00);
    /// Canonical quiet NaN. All NaN arithmetic results are canonicalized to
    /// this pattern so simulation output does not depend on host NaN payloads.
    pub const NAN: F16 = F16(0x7E00);
    pub const MAX: F16 = F16(0x7BFF);

    #[inline]
    pub const fn from_bits(bits: u16) -> F16 {
        F16(bits)
    }

    #[inline]
    pub const fn to_bits(self) -> u16 {
        self.0
    }

    /// Rounds an f32 to binary16 (round-to-nearest-even).
    #[inline]
    pub fn from_f32(x: f32) -> F16 {
        F16(f32_to_f16_bits(x))
    }

    /// Exact widening to f32; every binary16 value is representable.
    #[inline]
    pub fn to_f32(self) -> f32 {
        f16_bits_to_f32(self.0)
    }

    /// Exact widening to f64.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.to_f32() as f64
    }

    #[inline]
    pub const fn is_nan(self) -> bool {
        self.0 & (F16_EXP_MASK | F16_MAN_MASK) > F16_EXP_MASK
    }

    #[inline]
    pub const fn is_infinite(self) -> bool {
        self.0 & (F16_EXP_MASK | F16_MAN_MASK) == F16_EXP_MASK
    }

    #[inline]
    pub const fn is_finite(self) -> bool {
        self.0 & F16_EXP_MASK != F16_EXP_MASK
    }
}

impl Word for F16 {
    const ZERO: Self = F16::ZERO;

    /// Correctly rounded binary16 addition (see module docs), with NaN
    /// results canonicalized to [`F16::NAN`].
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let wide = self.to_f32() + rhs.to_f32();
        let out = F16(f32_to_f16_bits(wide));
        if out.is_nan() {
            F16::NAN
        } else {
            out
        }
    }

    /// Sign-bit flip; this is how the hardware negates a fetched entry.
    #[inline]
    fn neg(self) -> Self {
        F16(self.0 ^ F16_SIGN_MASK)
    }
}

impl fmt::Debug for F16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F16({}, 0x{:04x})", self.to_f32(), self.0)
    }
}

impl fmt::Display for F16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f32())
    }
}

/// Exact f16 -> f32 bit conversion.
pub fn f16_bits_to_f32(h: u16) -> f32 {
    let sign = ((h & F16_SIGN_MASK) as u32) << 16;
    let exp = ((h & F16_EXP_MASK) >> 10) as u32;
    let man = (h & F16_MAN_MASK) as u32;
    let bits = match exp {
        0 => {
            if man == 0 {
                sign
            } else {
                // Subnormal: normalize into the f32 representation.
                let mut e = 1i32;
                let mut m = man;
                while m & 0x0400 == 0 {
                    m <<= 1;
                    e -= 1;
                }
                m &= 0x03FF;
                let exp32 = (e - 15 + 127) as u32;
                sign | (exp32 << 23) | (m << 13)
            }
        }
        31 => sign | 0x7F80_0000 | (man << 13),
        _ => sign | ((exp + 127 - 15) << 23) | (man << 13),
    };
    f32::from_bits(bits)
}

/// Correctly rounded f32 -> f16 bit conversion (round-to-nearest-even).
pub fn f32_to_f16_bits(x: f32) -> u16 {
    let bits = x.to_bits();
    let sign = ((bits >> 16) & 0x8000) as u16;
    let exp32 = ((bits >> 23) & 0xFF) as i32;
    let man32 = bits & 0x007F_FFFF;

    if exp32 == 0xFF {
        return if man32 == 0 {
            sign | F16_EXP_MASK
        } else {
            // NaN: keep quiet, preserve top payload bits, never collapse to inf.
            sign | F16_EXP_MASK | 0x0200 | (man32 >> 13) as u16
        };
    }

    // Rebias. exp16 is the would-be biased binary16 exponent.
    let exp16 = exp32 - 127 + 15;

    if exp16 >= 31 {
        // At least 2^16, above the rounding threshold to the max finite value.
        return sign | F16_EXP_MASK;
    }

    if exp16 <= 0 {
        // Subnormal or zero result.
        if exp16 < -10 {
            // Magnitude below half the smallest subnormal: rounds to zero.
            return sign;
        }
        let man = man32 | 0x0080_0000; // make the hidden bit explicit
        let shift = (14 - exp16) as u32; // in [14, 24]
        let halfway = 1u32 << (shift - 1);
        let rem = man & ((1u32 << shift) - 1);
        let mut m = (man >> shift) as u16;
        if rem > halfway || (rem == halfway && (m & 1) == 1) {
            m += 1; // may carry into the exponent: that is the smallest normal
        }
        return sign | m;
    }

    // Normal result: drop 13 mantissa bits with round-to-nearest-even.
    let mut m = (man32 >> 13) as u16;
    let rem = man32 & 0x1FFF;
    let mut e = exp16 as u16;
    if rem > 0x1000 || (rem == 0x1000 && (m & 1) == 1) {
        m += 1;
        if m == 0x0400 {
            m = 0;
            e += 1;
            if e >= 31 {
                return sign | F16_EXP_MASK;
            }
        }
    }
    sign | (e << 10) | m
}
