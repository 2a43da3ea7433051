//! Accelerator tile geometry and throughput arithmetic.
//!
//! A tile is fully described by `(L, mu, K, activation type)`: `L` parallel
//! LUTs, each precomputing the partial sums of a group of `mu` activations,
//! read out by `K` parallel fetchers. Per cycle the core consumes an
//! `n = L * mu` slice of the input vector and produces partial sums for
//! `m = K` outputs, i.e. an `n x m` weight tile.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest supported LUT group size. The positive-half table holds
/// `(3^mu - 1) / 2` entries, so 8 caps table size at 3280 words, which keeps
/// exhaustive checks and sweeps cheap.
pub const MU_MAX: usize = 8;

/// 3^n for small n.
#[inline]
pub fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Number of positive-half ternary combinations of a group of `mu`
/// activations: `(3^mu - 1) / 2`. This is the LUT storage depth.
#[inline]
pub fn table_size(mu: usize) -> usize {
    (pow3(mu) - 1) / 2
}

/// Activation word type handled by the datapath.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationType {
    Int8,
    Fp16,
}

impl ActivationType {
    /// Bit width of one activation word.
    pub fn word_bits(self) -> usize {
        match self {
            ActivationType::Int8 => 8,
            ActivationType::Fp16 => 16,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationType::Int8 => "int8",
            ActivationType::Fp16 => "fp16",
        }
    }

    pub fn parse(s: &str) -> Result<ActivationType> {
        match s.to_ascii_lowercase().as_str() {
            "int8" => Ok(ActivationType::Int8),
            "fp16" => Ok(ActivationType::Fp16),
            other => Err(Error::Parse(format!("unknown activation type {other:?} (expected int8 or fp16)"))),
        }
    }
}

impl fmt::Display for ActivationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One accelerator instance: `L` LUTs of group size `mu`, `K` fetchers per
/// LUT, and the activation type. Validity (`L >= 1`, `1 <= mu <= MU_MAX`,
/// `K >= 1`) is enforced at construction so downstream code never re-checks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TileConfig {
    l: usize,
    mu: usize,
    k: usize,
    act: ActivationType,
}

impl TileConfig {
    pub fn new(l: usize, mu: usize, k: usize, act: ActivationType) -> Result<TileConfig> {
        if l < 1 {
            return Err(Error::invalid("L must be at least 1".to_string()));
        }
        if mu < 1 || mu > MU_MAX {
            return Err(Error::invalid(format!("mu must be in [1, {MU_MAX}], got {mu}")));
        }
        if k < 1 {
            return Err(Error::invalid("K must be at least 1".to_string()));
        }
        Ok(TileConfig { l, mu, k, act })
    }

    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn mu(&self) -> usize {
        self.mu
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn act(&self) -> ActivationType {
        self.act
    }

    /// Tile dimensions `(n, m)` with `n = L * mu` input activations consumed
    /// and `m = K` outputs updated per cycle.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.l * self.mu, self.k)
    }

    /// Input-side tile width `n = L * mu`.
    #[inline]
    pub fn n(&self) -> usize {
        self.l * self.mu
    }

    /// Output-side tile width `m = K`.
    #[inline]
    pub fn m(&self) -> usize {
        self.k
    }

    /// Multiplications retired per cycle: `n * m`.
    #[inline]
    pub fn tile_size(&self) -> usize {
        self.n() * self.m()
    }

    /// Peak throughput in multiplications per second at clock `f_clk_hz`.
    pub fn peak_throughput(&self, f_clk_hz: f64) -> Result<f64> {
        if !(f_clk_hz > 0.0) {
            return Err(Error::invalid(format!("clock frequency must be positive, got {f_clk_hz}")));
        }
        Ok(f_clk_hz * self.tile_size() as f64)
    }
}

impl fmt::Display for TileConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} mu={} K={} act={}", self.l, self.mu, self.k, self.act)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        assert_eq!(table_size(1), 1);
        assert_eq!(table_size(2), 4);
        assert_eq!(table_size(3), 13);
        assert_eq!(table_size(4), 40);
        assert_eq!(table_size(5), 121);
        assert_eq!(table_size(8), 3280);
    }

    #[test]
    fn dims_match_parameters() {
        let cfg = TileConfig::new(32, 2, 32, ActivationType::Int8).unwrap();
        assert_eq!(cfg.dims(), (64, 32));
        assert_eq!(cfg.tile_size(), 2048);

        let unit = TileConfig::new(1, 1, 1, ActivationType::Int8).unwrap();
        assert_eq!(unit.dims(), (1, 1));

        let tall = TileConfig::new(28, 3, 16, ActivationType::Int8).unwrap();
        assert_eq!(tall.dims(), (84, 16));
        assert_eq!(tall.tile_size(), 1344);
    }

    #[test]
    fn construction_guards() {
        assert!(TileConfig::new(0, 1, 1, ActivationType::Int8).is_err());
        assert!(TileConfig::new(1, 0, 1, ActivationType::Int8).is_err());
        assert!(TileConfig::new(1, MU_MAX + 1, 1, ActivationType::Int8).is_err());
        assert!(TileConfig::new(1, 1, 0, ActivationType::Int8).is_err());
    }

    #[test]
    fn peak_throughput_values() {
        let cfg = TileConfig::new(32, 2, 32, ActivationType::Int8).unwrap();
        assert_eq!(cfg.peak_throughput(500e6).unwrap(), 1.024e12);

        let unit = TileConfig::new(1, 1, 1, ActivationType::Int8).unwrap();
        assert_eq!(unit.peak_throughput(1.0).unwrap(), 1.0);

        let tall = TileConfig::new(28, 3, 16, ActivationType::Int8).unwrap();
        assert_eq!(tall.peak_throughput(500e6).unwrap(), 6.72e11);

        assert!(cfg.peak_throughput(0.0).is_err());
        assert!(cfg.peak_throughput(-1.0).is_err());
        assert!(cfg.peak_throughput(f64::NAN).is_err());
    }
}
