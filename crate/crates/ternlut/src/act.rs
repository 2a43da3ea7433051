//! Activation vectors and their ingestion formats.
//!
//! Two on-disk formats are accepted: a CSV of decimal values (commas and/or
//! whitespace as separators) and raw little-endian binary (one byte per INT8
//! word, two bytes per FP16 word). NaN and infinity are rejected at ingestion;
//! the datapath has no defined behavior for them as inputs.

use crate::error::{Error, Result};
use crate::tile::ActivationType;
use crate::word::F16;

/// An input activation vector, typed by the datapath lane it feeds.
#[derive(Clone, PartialEq, Debug)]
pub enum ActivationVector {
    Int8(Vec<i8>),
    Fp16(Vec<F16>),
}

impl ActivationVector {
    pub fn act(&self) -> ActivationType {
        match self {
            ActivationVector::Int8(_) => ActivationType::Int8,
            ActivationVector::Fp16(_) => ActivationType::Fp16,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ActivationVector::Int8(v) => v.len(),
            ActivationVector::Fp16(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Wraps FP16 words, rejecting NaN/Inf patterns.
    pub fn from_f16_words(words: Vec<F16>) -> Result<ActivationVector> {
        for (i, w) in words.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::invalid(format!(
                    "activation {i} is {} (bits 0x{:04x}); NaN/Inf inputs are rejected",
                    if w.is_nan() { "NaN" } else { "infinite" },
                    w.to_bits()
                )));
            }
        }
        Ok(ActivationVector::Fp16(words))
    }

    /// Parses decimal text. INT8 values must be integers in [-128, 127];
    /// FP16 values are parsed as f32 and rounded to binary16 (round-to-
    /// nearest-even), then checked finite.
    pub fn parse_csv(text: &str, act: ActivationType) -> Result<ActivationVector> {
        let tokens = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty());
        match act {
            ActivationType::Int8 => {
                let mut out = Vec::new();
                for tok in tokens {
                    let v: i32 = tok
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid INT8 activation {tok:?}")))?;
                    if !(-128..=127).contains(&v) {
                        return Err(Error::Parse(format!("INT8 activation {v} out of [-128, 127]")));
                    }
                    out.push(v as i8);
                }
                if out.is_empty() {
                    return Err(Error::Parse("activation file contains no values".to_string()));
                }
                Ok(ActivationVector::Int8(out))
            }
            ActivationType::Fp16 => {
                let mut out = Vec::new();
                for tok in tokens {
                    let v: f32 = tok
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid FP16 activation {tok:?}")))?;
                    out.push(F16::from_f32(v));
                }
                if out.is_empty() {
                    return Err(Error::Parse("activation file contains no values".to_string()));
                }
                ActivationVector::from_f16_words(out)
            }
        }
    }

    /// Parses raw little-endian binary: INT8 is one two's-complement byte per
    /// word, FP16 is two bytes per word (LSB first).
    pub fn parse_raw(bytes: &[u8], act: ActivationType) -> Result<ActivationVector> {
        if bytes.is_empty() {
            return Err(Error::Parse("activation file is empty".to_string()));
        }
        match act {
            ActivationType::Int8 => Ok(ActivationVector::Int8(bytes.iter().map(|&b| b as i8).collect())),
            ActivationType::Fp16 => {
                if bytes.len() % 2 != 0 {
                    return Err(Error::Parse(format!(
                        "raw FP16 activation file has odd length {}",
                        bytes.len()
                    )));
                }
                let words = bytes
                    .chunks_exact(2)
                    .map(|c| F16::from_bits(u16::from_le_bytes([c[0], c[1]])))
                    .collect();
                ActivationVector::from_f16_words(words)
            }
        }
    }

    /// Serializes to the raw little-endian binary format.
    pub fn to_raw(&self) -> Vec<u8> {
        match self {
            ActivationVector::Int8(v) => v.iter().map(|&x| x as u8).collect(),
            ActivationVector::Fp16(v) => v.iter().flat_map(|w| w.to_bits().to_le_bytes()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int8_csv_parses_and_bounds() {
        let v = ActivationVector::parse_csv("1, -2, 3\n127 -128", ActivationType::Int8).unwrap();
        assert_eq!(v, ActivationVector::Int8(vec![1, -2, 3, 127, -128]));
        assert!(ActivationVector::parse_csv("128", ActivationType::Int8).is_err());
        assert!(ActivationVector::parse_csv("1.5", ActivationType::Int8).is_err());
        assert!(ActivationVector::parse_csv("", ActivationType::Int8).is_err());
    }

    #[test]
    fn fp16_csv_rounds_to_nearest_even() {
        let v = ActivationVector::parse_csv("1.0,2049", ActivationType::Fp16).unwrap();
        match v {
            ActivationVector::Fp16(w) => {
                assert_eq!(w[0].to_bits(), 0x3C00);
                assert_eq!(w[1], F16::from_f32(2048.0));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn fp16_rejects_nan_and_inf() {
        assert!(ActivationVector::parse_csv("NaN", ActivationType::Fp16).is_err());
        assert!(ActivationVector::parse_csv("inf", ActivationType::Fp16).is_err());
        // 70000 overflows binary16 to +inf after rounding.
        assert!(ActivationVector::parse_csv("70000", ActivationType::Fp16).is_err());
        let nan_bytes = 0x7E00u16.to_le_bytes();
        assert!(ActivationVector::parse_raw(&nan_bytes, ActivationType::Fp16).is_err());
    }

    #[test]
    fn raw_round_trip() {
        let v = ActivationVector::Int8(vec![-1, 0, 127, -128]);
        assert_eq!(ActivationVector::parse_raw(&v.to_raw(), ActivationType::Int8).unwrap(), v);

        let w = ActivationVector::Fp16(vec![F16::from_f32(1.5), F16::from_f32(-0.25)]);
        assert_eq!(ActivationVector::parse_raw(&w.to_raw(), ActivationType::Fp16).unwrap(), w);
        assert!(ActivationVector::parse_raw(&[0u8; 3], ActivationType::Fp16).is_err());
    }
}
