//! Bit-accurate functional simulation, analytical cost modeling, and
//! design-space exploration for lookup-table-based ternary-weight GEMV cores.
//!
//! An accelerator instance is a tile `(L, mu, K, activation type)`: `L`
//! parallel lookup tables each precompute all positive-half partial sums of a
//! group of `mu` activations, and `K` fetch units per LUT index those sums
//! with encoded weight keys, conditionally negate, and accumulate. The crate
//! covers:
//!
//! * [`trit`] / [`tile`] / [`act`] / [`word`] — domain types: trits, ternary
//!   matrices, tile geometry, activation vectors, and an emulated IEEE 754
//!   binary16;
//! * [`encode`] — offline sign-magnitude group encoding and the byte-exact
//!   `TLUT` stream format (~1.6 bits per weight at `mu = 5`);
//! * [`dag`] / [`netlist`] — the optimized build-phase adder network
//!   (symmetry, sparsity, prefix reuse), closed-form resource counts, and
//!   structural netlist emission;
//! * [`lut`] — the two-phase GEMV simulator with architecture-order oracles,
//!   exact for INT8 and bit-exact for FP16;
//! * [`cost`] — the weighted-area model with fitted and exact build costs,
//!   baselines, and gamma calibration;
//! * [`dse`] — sweeps, group-size and throughput-constrained optimization,
//!   Pareto frontiers, tile-geometry scans, and published-design comparisons.
//!
//! All types are immutable values after construction; everything here is safe
//! to share across threads and evaluations are pure.

pub mod act;
pub mod cost;
pub mod dag;
pub mod dse;
pub mod encode;
pub mod error;
pub mod lut;
pub mod netlist;
pub mod tile;
pub mod trit;
pub mod word;

pub use act::ActivationVector;
pub use error::{Error, Result};
pub use tile::{ActivationType, TileConfig, MU_MAX};
pub use trit::{TernaryMatrix, Trit};
pub use word::F16;
