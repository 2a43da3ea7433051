//! Bit-accurate functional simulation of the two-phase LUT GEMV.
//!
//! Phase one (build) evaluates the optimized adder network on a group of
//! activations, producing all positive-half partial sums. Phase two (fetch &
//! accumulate) indexes those sums with encoded weight keys, conditionally
//! negates, and reduces.
//!
//! Arithmetic orders are fixed so floating-point results are deterministic
//! and oracle-comparable:
//!
//! * within a LUT entry: the adder DAG's prefix order (parent, then leaf);
//! * across the `L` fetch results of one tile: a left fold from the additive
//!   identity in ascending LUT order;
//! * across input tiles: ascending tile index, folded into the output
//!   accumulator (initialized to the additive identity).
//!
//! The INT8 lane stores LUT entries in 16-bit words (`|entry| <= mu * 127 <=
//! 1016`) and accumulates in 32-bit words, exact for reduction lengths up to
//! 2^16. The FP16 lane performs every addition in emulated binary16.

use crate::act::ActivationVector;
use crate::dag::{build_optimized_dag, AdderDag};
use crate::encode::{encode_group, GroupKey};
use crate::error::{Error, Result};
use crate::tile::{ActivationType, TileConfig, MU_MAX};
use crate::trit::{TernaryMatrix, Trit};
use crate::word::{Word, F16};
use std::fmt;
use std::sync::OnceLock;

static DAG_CACHE: [OnceLock<AdderDag>; MU_MAX] = [const { OnceLock::new() }; MU_MAX];

/// Shared immutable DAG per group size; safe to use from any thread.
pub(crate) fn shared_dag(mu: usize) -> &'static AdderDag {
    DAG_CACHE[mu - 1].get_or_init(|| build_optimized_dag(mu).expect("mu validated by caller"))
}

/// A datapath lane: the external activation word plus the internal entry and
/// accumulator word types of the simulated hardware.
pub trait Lane {
    type Act: Copy + fmt::Debug;
    type Entry: Word;
    type Acc: Word;
    /// Activation word as a build-phase tap.
    fn tap(a: Self::Act) -> Self::Entry;
    /// Fetched entry widened to the accumulator word.
    fn widen(e: Self::Entry) -> Self::Acc;
}

/// INT8 activations, 16-bit LUT entries, 32-bit accumulators.
pub struct Int8Lane;

impl Lane for Int8Lane {
    type Act = i8;
    type Entry = i16;
    type Acc = i32;
    #[inline]
    fn tap(a: i8) -> i16 {
        i16::from(a)
    }
    #[inline]
    fn widen(e: i16) -> i32 {
        i32::from(e)
    }
}

/// Binary16 end to end.
pub struct Fp16Lane;

impl Lane for Fp16Lane {
    type Act = F16;
    type Entry = F16;
    type Acc = F16;
    #[inline]
    fn tap(a: F16) -> F16 {
        a
    }
    #[inline]
    fn widen(e: F16) -> F16 {
        e
    }
}

/// Precomputed positive-half partial sums of one activation group.
/// `entries[v - 1]` is the sum for the group with base-3 value `v`.
#[derive(Clone, PartialEq, Debug)]
pub struct LutTable<W: Word> {
    mu: usize,
    entries: Vec<W>,
}

impl<W: Word> LutTable<W> {
    #[inline]
    pub fn mu(&self) -> usize {
        self.mu
    }

    #[inline]
    pub fn entries(&self) -> &[W] {
        &self.entries
    }
}

/// Builds the LUT for a group of `mu` activation taps by evaluating the
/// optimized adder DAG (never by naive enumeration), so entry values and
/// arithmetic order match the modeled hardware.
pub fn build_lut<W: Word>(taps: &[W], mu: usize) -> Result<LutTable<W>> {
    if mu < 1 || mu > MU_MAX {
        return Err(Error::invalid(format!("mu must be in [1, {MU_MAX}], got {mu}")));
    }
    if taps.len() != mu {
        return Err(Error::invalid(format!("tap count {} does not match mu={mu}", taps.len())));
    }
    Ok(LutTable { mu, entries: shared_dag(mu).evaluate(taps) })
}

/// Fetch-and-conditionally-negate: the zero key yields the additive identity;
/// otherwise the stored entry for the key's magnitude, negated when the
/// symmetry flag is set (a sign-bit flip in the FP16 lane).
pub fn fac_fetch<W: Word>(table: &LutTable<W>, key: &GroupKey) -> Result<W> {
    if key.mu() != table.mu {
        return Err(Error::corrupt(format!(
            "key mu={} does not match table mu={}",
            key.mu(),
            table.mu
        )));
    }
    if key.is_zero() {
        return Ok(W::ZERO);
    }
    let entry = table.entries[key.magnitude() as usize - 1];
    Ok(if key.sign() { entry.neg() } else { entry })
}

/// One tile step: consumes `n = L * mu` activation words and `L` keys per
/// output (layout `keys[j * L + l]` for output `j`), producing `m` partial
/// sums. Each output folds its `L` fetch results in ascending LUT order.
pub fn tile_mac<LN: Lane>(cfg: &TileConfig, x_tile: &[LN::Act], keys: &[GroupKey]) -> Result<Vec<LN::Acc>> {
    let (n, m) = cfg.dims();
    if x_tile.len() != n {
        return Err(Error::invalid(format!("x_tile length {} does not match n={n}", x_tile.len())));
    }
    if keys.len() != cfg.l() * m {
        return Err(Error::invalid(format!(
            "key count {} does not match L*m={}",
            keys.len(),
            cfg.l() * m
        )));
    }
    let mu = cfg.mu();
    let tables: Vec<LutTable<LN::Entry>> = (0..cfg.l())
        .map(|l| {
            let taps: Vec<LN::Entry> = x_tile[l * mu..(l + 1) * mu].iter().map(|&a| LN::tap(a)).collect();
            build_lut(&taps, mu)
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut partial = LN::Acc::ZERO;
        for (l, table) in tables.iter().enumerate() {
            let fetched = fac_fetch(table, &keys[j * cfg.l() + l])?;
            partial = partial.add(LN::widen(fetched));
        }
        out.push(partial);
    }
    Ok(out)
}

/// Encodes the weight group for output row `r`, LUT `l` of an input tile
/// starting at `col0`, zero-padding columns past the matrix edge.
fn row_group_key(w: &TernaryMatrix, r: usize, col0: usize, mu: usize, buf: &mut [Trit]) -> Result<GroupKey> {
    buf.fill(Trit::Zero);
    if col0 < w.cols() {
        let take = mu.min(w.cols() - col0);
        buf[..take].copy_from_slice(&w.row(r)[col0..col0 + take]);
    }
    encode_group(buf, mu)
}

/// Simulated output-stationary GEMV: `y = W x` for an `M x N` ternary matrix.
///
/// The outer loop walks output tiles of `m` rows, the inner loop input tiles
/// of `n` columns; edges are zero-padded. LUT banks are built once per input
/// tile and reused across every output of every output tile.
pub fn gemv_typed<LN: Lane>(w: &TernaryMatrix, x: &[LN::Act], cfg: &TileConfig) -> Result<Vec<LN::Acc>> {
    if x.len() != w.cols() {
        return Err(Error::invalid(format!(
            "activation length {} does not match matrix cols {}",
            x.len(),
            w.cols()
        )));
    }
    let (n, m) = cfg.dims();
    let mu = cfg.mu();
    let in_tiles = w.cols().div_ceil(n);
    let out_tiles = w.rows().div_ceil(m);

    // Build every input tile's LUT bank once; they depend only on x.
    let mut banks: Vec<Vec<LutTable<LN::Entry>>> = Vec::with_capacity(in_tiles);
    for it in 0..in_tiles {
        let mut bank = Vec::with_capacity(cfg.l());
        for l in 0..cfg.l() {
            let col0 = it * n + l * mu;
            let taps: Vec<LN::Entry> = (0..mu)
                .map(|i| {
                    let col = col0 + i;
                    if col < w.cols() {
                        LN::tap(x[col])
                    } else {
                        LN::Entry::ZERO
                    }
                })
                .collect();
            bank.push(build_lut(&taps, mu)?);
        }
        banks.push(bank);
    }

    let mut y = vec![LN::Acc::ZERO; w.rows()];
    let mut buf = vec![Trit::Zero; mu];
    for ot in 0..out_tiles {
        let row_end = ((ot + 1) * m).min(w.rows());
        for r in ot * m..row_end {
            let mut acc = LN::Acc::ZERO;
            for (it, bank) in banks.iter().enumerate() {
                let mut partial = LN::Acc::ZERO;
                for (l, table) in bank.iter().enumerate() {
                    let key = row_group_key(w, r, it * n + l * mu, mu, &mut buf)?;
                    let fetched = fac_fetch(table, &key)?;
                    partial = partial.add(LN::widen(fetched));
                }
                acc = acc.add(partial);
            }
            y[r] = acc;
        }
    }
    Ok(y)
}

/// Architecture-order oracle: computes `y = W x` by direct ternary
/// conditional accumulation with the same tiling and the same summation
/// order as [`gemv_typed`], but with no lookup tables, no key encoding, and
/// no fetch path. Each group sum is rebuilt from its nonzero trits in prefix
/// order and negated afterwards for negative-half groups, mirroring what the
/// fetch unit's sign flip would do.
pub fn reference_gemv_typed<LN: Lane>(w: &TernaryMatrix, x: &[LN::Act], cfg: &TileConfig) -> Result<Vec<LN::Acc>> {
    if x.len() != w.cols() {
        return Err(Error::invalid(format!(
            "activation length {} does not match matrix cols {}",
            x.len(),
            w.cols()
        )));
    }
    let (n, m) = cfg.dims();
    let mu = cfg.mu();
    let in_tiles = w.cols().div_ceil(n);
    let out_tiles = w.rows().div_ceil(m);

    let tap_at = |col: usize| -> LN::Entry {
        if col < w.cols() {
            LN::tap(x[col])
        } else {
            LN::Entry::ZERO
        }
    };

    let mut y = vec![LN::Acc::ZERO; w.rows()];
    for ot in 0..out_tiles {
        let row_end = ((ot + 1) * m).min(w.rows());
        for r in ot * m..row_end {
            let row = w.row(r);
            let mut acc = LN::Acc::ZERO;
            for it in 0..in_tiles {
                let mut partial = LN::Acc::ZERO;
                for l in 0..cfg.l() {
                    let col0 = it * n + l * mu;
                    // Group trits with zero padding past the edge.
                    let trit_at = |i: usize| -> Trit {
                        let col = col0 + i;
                        if col < row.len() {
                            row[col]
                        } else {
                            Trit::Zero
                        }
                    };
                    // Sign of the group is the sign of its leading nonzero trit.
                    let lead = (0..mu).map(trit_at).find(|t| !t.is_zero());
                    let group_sum = match lead {
                        None => LN::Entry::ZERO,
                        Some(lead) => {
                            let negate = lead == Trit::Neg;
                            let mut sum: Option<LN::Entry> = None;
                            for i in 0..mu {
                                let t = if negate { -trit_at(i) } else { trit_at(i) };
                                match t {
                                    Trit::Zero => {}
                                    Trit::Pos => {
                                        sum = Some(match sum {
                                            None => tap_at(col0 + i),
                                            Some(s) => s.add(tap_at(col0 + i)),
                                        });
                                    }
                                    Trit::Neg => {
                                        // The leading nonzero of the canonical
                                        // group is +1, so a subtraction always
                                        // has a left operand.
                                        sum = Some(sum.expect("leading trit is positive").add(tap_at(col0 + i).neg()));
                                    }
                                }
                            }
                            let s = sum.expect("group has a nonzero trit");
                            if negate {
                                s.neg()
                            } else {
                                s
                            }
                        }
                    };
                    partial = partial.add(LN::widen(group_sum));
                }
                acc = acc.add(partial);
            }
            y[r] = acc;
        }
    }
    Ok(y)
}

/// Float64 accumulation reference for accuracy reporting (not bit-exact).
pub fn reference_gemv_f64(w: &TernaryMatrix, x: &ActivationVector) -> Result<Vec<f64>> {
    if x.len() != w.cols() {
        return Err(Error::invalid(format!(
            "activation length {} does not match matrix cols {}",
            x.len(),
            w.cols()
        )));
    }
    let xs: Vec<f64> = match x {
        ActivationVector::Int8(v) => v.iter().map(|&a| a as f64).collect(),
        ActivationVector::Fp16(v) => v.iter().map(|a| a.to_f64()).collect(),
    };
    Ok((0..w.rows())
        .map(|r| w.row(r).iter().zip(&xs).map(|(t, &a)| t.value() as f64 * a).sum())
        .collect())
}

/// GEMV result, typed by lane.
#[derive(Clone, PartialEq, Debug)]
pub enum OutputVector {
    Int8(Vec<i32>),
    Fp16(Vec<F16>),
}

impl OutputVector {
    pub fn len(&self) -> usize {
        match self {
            OutputVector::Int8(v) => v.len(),
            OutputVector::Fp16(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn act(&self) -> ActivationType {
        match self {
            OutputVector::Int8(_) => ActivationType::Int8,
            OutputVector::Fp16(_) => ActivationType::Fp16,
        }
    }
}

fn check_act(x: &ActivationVector, cfg: &TileConfig) -> Result<()> {
    if x.act() != cfg.act() {
        return Err(Error::invalid(format!(
            "activation vector type {} does not match config type {}",
            x.act(),
            cfg.act()
        )));
    }
    Ok(())
}

/// Lane-dispatched [`gemv_typed`].
pub fn gemv(w: &TernaryMatrix, x: &ActivationVector, cfg: &TileConfig) -> Result<OutputVector> {
    check_act(x, cfg)?;
    match x {
        ActivationVector::Int8(v) => Ok(OutputVector::Int8(gemv_typed::<Int8Lane>(w, v, cfg)?)),
        ActivationVector::Fp16(v) => Ok(OutputVector::Fp16(gemv_typed::<Fp16Lane>(w, v, cfg)?)),
    }
}

/// Lane-dispatched [`reference_gemv_typed`].
pub fn reference_gemv(w: &TernaryMatrix, x: &ActivationVector, cfg: &TileConfig) -> Result<OutputVector> {
    check_act(x, cfg)?;
    match x {
        ActivationVector::Int8(v) => Ok(OutputVector::Int8(reference_gemv_typed::<Int8Lane>(w, v, cfg)?)),
        ActivationVector::Fp16(v) => Ok(OutputVector::Fp16(reference_gemv_typed::<Fp16Lane>(w, v, cfg)?)),
    }
}

/// Build-phase pipeline depth in cycles: one level per doubling of the group
/// plus one for negation/registering.
pub fn build_latency(mu: usize) -> u64 {
    let ceil_log2 = if mu <= 1 { 0 } else { (usize::BITS - (mu - 1).leading_zeros()) as u64 };
    ceil_log2 + 1
}

/// Cycle count for an `M x N` GEMV. Fetch cycles are
/// `ceil(N/n) * ceil(M/m)`. With `overlap` (double-buffered build, the
/// default) only the initial build latency is exposed; without it every
/// input tile pays the build latency once.
pub fn cycle_count(cfg: &TileConfig, m_rows: usize, n_cols: usize, overlap: bool) -> Result<u64> {
    if m_rows < 1 || n_cols < 1 {
        return Err(Error::invalid("matrix dimensions must be at least 1".to_string()));
    }
    let (n, m) = cfg.dims();
    let in_tiles = n_cols.div_ceil(n) as u64;
    let out_tiles = m_rows.div_ceil(m) as u64;
    let fetch = in_tiles * out_tiles;
    let d = build_latency(cfg.mu());
    Ok(if overlap { fetch + d } else { fetch + in_tiles * d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::decode_matrix;

    fn cfg(l: usize, mu: usize, k: usize) -> TileConfig {
        TileConfig::new(l, mu, k, ActivationType::Int8).unwrap()
    }

    #[test]
    fn build_lut_hand_example() {
        let t = build_lut::<i16>(&[3, -5], 2).unwrap();
        assert_eq!(t.entries(), &[-5, 8, 3, -2]);
        let t = build_lut::<i16>(&[7], 1).unwrap();
        assert_eq!(t.entries(), &[7]);
        let t = build_lut::<i16>(&[1, 1, 1], 3).unwrap();
        assert_eq!(t.entries()[12], 3); // v=13 is (+1,+1,+1)
        assert!(build_lut::<i16>(&[1, 2], 3).is_err());
    }

    #[test]
    fn fac_fetch_examples() {
        let t = build_lut::<i16>(&[3, -5], 2).unwrap();
        let fetch = |sign, mag| fac_fetch(&t, &GroupKey::new(sign, mag, 2).unwrap()).unwrap();
        assert_eq!(fetch(false, 2), 8);
        assert_eq!(fetch(true, 2), -8);
        assert_eq!(fetch(false, 0), 0);
        // Key from a different group size is rejected.
        let k3 = GroupKey::new(false, 1, 3).unwrap();
        assert!(matches!(fac_fetch(&t, &k3), Err(Error::CorruptStream(_))));
    }

    #[test]
    fn fac_fetch_negation_symmetry() {
        let t = build_lut::<i16>(&[4, -7, 2], 3).unwrap();
        for mag in 1..=13u16 {
            let k = GroupKey::new(false, mag, 3).unwrap();
            let plus = fac_fetch(&t, &k).unwrap();
            let minus = fac_fetch(&t, &k.negated()).unwrap();
            assert_eq!(minus, -plus);
        }
    }

    #[test]
    fn tile_mac_row_sum() {
        // L=2, mu=2, K=1, x=(1,2,3,4), all +1 weights -> 10.
        let c = cfg(2, 2, 1);
        let all_ones = encode_group(&[Trit::Pos, Trit::Pos], 2).unwrap();
        let out = tile_mac::<Int8Lane>(&c, &[1, 2, 3, 4], &[all_ones, all_ones]).unwrap();
        assert_eq!(out, vec![10]);

        let zero = encode_group(&[Trit::Zero, Trit::Zero], 2).unwrap();
        let out = tile_mac::<Int8Lane>(&c, &[1, 2, 3, 4], &[zero, zero]).unwrap();
        assert_eq!(out, vec![0]);

        assert!(tile_mac::<Int8Lane>(&c, &[1, 2, 3], &[all_ones, all_ones]).is_err());
        assert!(tile_mac::<Int8Lane>(&c, &[1, 2, 3, 4], &[all_ones]).is_err());
    }

    #[test]
    fn gemv_identity_and_negated_rows() {
        let eye = TernaryMatrix::from_fn(8, 8, |r, c| if r == c { Trit::Pos } else { Trit::Zero }).unwrap();
        let x: Vec<i8> = (1..=8).collect();
        let y = gemv_typed::<Int8Lane>(&eye, &x, &cfg(2, 2, 3)).unwrap();
        assert_eq!(y, (1..=8).map(i32::from).collect::<Vec<_>>());

        let all_neg = TernaryMatrix::from_fn(4, 4, |_, _| Trit::Neg).unwrap();
        let y = gemv_typed::<Int8Lane>(&all_neg, &[1, 2, 3, 4], &cfg(1, 3, 2)).unwrap();
        assert_eq!(y, vec![-10; 4]);
    }

    #[test]
    fn gemv_rejects_dimension_mismatch() {
        let w = TernaryMatrix::zeros(3, 4).unwrap();
        assert!(gemv_typed::<Int8Lane>(&w, &[1, 2, 3], &cfg(1, 1, 1)).is_err());
    }

    #[test]
    fn gemv_matches_reference_on_mixed_shapes() {
        let w = TernaryMatrix::parse_text("+-0+0\n0+--+\n-0+0-\n").unwrap();
        let x: Vec<i8> = vec![5, -3, 7, 100, -128];
        for c in [cfg(1, 1, 1), cfg(2, 2, 2), cfg(1, 5, 3), cfg(3, 1, 1)] {
            let a = gemv_typed::<Int8Lane>(&w, &x, &c).unwrap();
            let b = reference_gemv_typed::<Int8Lane>(&w, &x, &c).unwrap();
            assert_eq!(a, b, "cfg {c}");
            // Direct dot product as the third route.
            let direct: Vec<i32> = (0..3)
                .map(|r| w.row(r).iter().zip(&x).map(|(t, &a)| t.value() as i32 * a as i32).sum())
                .collect();
            assert_eq!(a, direct, "cfg {c}");
        }
    }

    #[test]
    fn gemv_accepts_encoded_weights_round_trip() {
        let w = TernaryMatrix::parse_text("+-0\n0+-\n--+\n").unwrap();
        let decoded = decode_matrix(&crate::encode::encode_matrix(&w, 2).unwrap()).unwrap();
        let x = vec![1i8, -2, 3];
        let c = cfg(1, 2, 2);
        assert_eq!(
            gemv_typed::<Int8Lane>(&w, &x, &c).unwrap(),
            gemv_typed::<Int8Lane>(&decoded, &x, &c).unwrap()
        );
    }

    #[test]
    fn fp16_gemv_is_bit_exact_against_reference() {
        let w = TernaryMatrix::parse_text("+-+0\n-+0+\n").unwrap();
        let x: Vec<F16> = [0.5f32, -1.25, 3.0, 0.0078125].iter().map(|&v| F16::from_f32(v)).collect();
        let c = TileConfig::new(2, 2, 1, ActivationType::Fp16).unwrap();
        let a = gemv_typed::<Fp16Lane>(&w, &x, &c).unwrap();
        let b = reference_gemv_typed::<Fp16Lane>(&w, &x, &c).unwrap();
        let bits_a: Vec<u16> = a.iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u16> = b.iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
    }

    #[test]
    fn dispatch_checks_activation_type() {
        let w = TernaryMatrix::zeros(2, 2).unwrap();
        let x = ActivationVector::Int8(vec![1, 2]);
        let c = TileConfig::new(1, 2, 1, ActivationType::Fp16).unwrap();
        assert!(gemv(&w, &x, &c).is_err());
    }

    #[test]
    fn cycle_model() {
        // Single tile: 1 + D(mu).
        let c = cfg(2, 2, 4);
        assert_eq!(cycle_count(&c, 4, 4, true).unwrap(), 1 + build_latency(2));
        // 64x128 on a 64x32 tile: 2*2 fetch cycles.
        let c = cfg(32, 2, 32);
        assert_eq!(cycle_count(&c, 64, 128, true).unwrap(), 4 + build_latency(2));
        assert_eq!(cycle_count(&c, 64, 128, false).unwrap(), 4 + 2 * build_latency(2));
        assert_eq!(build_latency(4), 3);
        assert_eq!(build_latency(1), 1);
        assert_eq!(build_latency(5), 4);
        assert!(cycle_count(&c, 0, 4, true).is_err());
    }
}
