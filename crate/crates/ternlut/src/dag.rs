//! Build-phase adder network construction and resource counting.
//!
//! The LUT build phase computes every positive-half partial sum of a group of
//! `mu` activations. Three structural reductions apply:
//!
//! * symmetry — only positive-half groups are materialized; negative halves
//!   are recovered by the fetch unit's sign flip;
//! * sparsity — zero trits never contribute an addition;
//! * redundancy — each non-singleton group is computed from the group with
//!   its last nonzero trit cleared, reusing that prefix sum.
//!
//! The prefix strategy yields exactly `(3^mu - 1)/2 - mu` adders per LUT
//! (every non-singleton output costs one adder; singletons are wires), which
//! stays at or below the closed-form bound
//! `(mu - 1) * (3^mu - 1)/2 - R(mu) - mu * S(mu)`.

use crate::encode::signed_value_to_group;
use crate::error::{Error, Result};
use crate::tile::{pow3, table_size, TileConfig, MU_MAX};
use crate::trit::Trit;
use crate::word::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_mu_at_least_2(mu: usize) -> Result<()> {
    if !(2..=MU_MAX).contains(&mu) {
        return Err(Error::invalid(format!("mu must be in [2, {MU_MAX}], got {mu}")));
    }
    Ok(())
}

/// Closed-form count of additions eliminated by zero-trit pruning:
/// `S(2) = 1`, `S(mu) = S(mu-1) + 3^(mu-2)`.
pub fn sparsity_savings(mu: usize) -> Result<u64> {
    check_mu_at_least_2(mu)?;
    let mut s: u64 = 1;
    for j in 3..=mu {
        s += pow3(j - 2) as u64;
    }
    Ok(s)
}

/// Closed-form count of additions eliminated by shared-prefix reuse:
/// `R(mu) = 2 * sum_{k=0}^{mu-3} 2^k * (3^(mu-2-k) - 1)` (empty sum for mu=2).
pub fn redundancy_savings(mu: usize) -> Result<u64> {
    check_mu_at_least_2(mu)?;
    let mut r: u64 = 0;
    for k in 0..mu.saturating_sub(2) {
        r += (1u64 << k) * (pow3(mu - 2 - k) as u64 - 1);
    }
    Ok(2 * r)
}

/// Upper bound on adders per LUT after all three reductions:
/// `(mu - 1) * (3^mu - 1)/2 - R(mu) - mu * S(mu)`.
pub fn adder_bound(mu: usize) -> Result<u64> {
    check_mu_at_least_2(mu)?;
    let base = (mu as u64 - 1) * table_size(mu) as u64;
    Ok(base - redundancy_savings(mu)? - mu as u64 * sparsity_savings(mu)?)
}

/// Adders in a naive build tree: `3^mu` entries, `mu - 1` additions each.
pub fn naive_adders(mu: usize) -> u64 {
    (mu as u64).saturating_sub(1) * pow3(mu) as u64
}

/// Naive count excluding the all-zero entry: `(mu - 1) * (3^mu - 1)`.
pub fn naive_adders_nonzero(mu: usize) -> u64 {
    (mu as u64).saturating_sub(1) * (pow3(mu) as u64 - 1)
}

/// Node index within an [`AdderDag`].
pub type NodeId = usize;

/// Sign applied to an adder's right operand.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One node of the build-phase network: an activation tap or a two-input adder.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DagNode {
    /// Activation tap `i` of the group (0-based, most significant trit first).
    Input(usize),
    /// `value(left) + sign * value(right)`. With the prefix construction,
    /// `right` always references an input tap.
    Add { left: NodeId, right: NodeId, right_sign: Sign },
}

/// The optimized build-phase adder network for one LUT.
///
/// `output_map[v - 1]` is the node computing the partial sum of the unique
/// positive-half group whose base-3 value is `v`, for `v` in
/// `1..=(3^mu - 1)/2`. Nodes are stored in a topological order: the first
/// `mu` entries are the input taps, and every adder follows its operands.
#[derive(Clone, Debug)]
pub struct AdderDag {
    mu: usize,
    nodes: Vec<DagNode>,
    output_map: Vec<NodeId>,
}

/// Builds the optimized DAG for group size `mu` using the prefix strategy:
/// every positive-half group with two or more nonzero trits is computed from
/// the group with its last nonzero trit cleared, plus or minus that trit's
/// activation tap; singleton groups are wires to their tap.
pub fn build_optimized_dag(mu: usize) -> Result<AdderDag> {
    if !(1..=MU_MAX).contains(&mu) {
        return Err(Error::invalid(format!("mu must be in [1, {MU_MAX}], got {mu}")));
    }
    let t = table_size(mu);
    let mut nodes: Vec<DagNode> = (0..mu).map(DagNode::Input).collect();
    let mut output_map: Vec<Option<NodeId>> = vec![None; t];

    // Order groups by nonzero-trit count so each prefix parent exists before
    // its children (parents have exactly one fewer nonzero trit).
    let mut by_weight: Vec<(usize, usize)> = (1..=t)
        .map(|v| {
            let digits = signed_value_to_group(v as i32, mu);
            (digits.iter().filter(|d| !d.is_zero()).count(), v)
        })
        .collect();
    by_weight.sort_unstable();

    for (nonzeros, v) in by_weight {
        let digits = signed_value_to_group(v as i32, mu);
        if nonzeros == 1 {
            // A positive-half singleton is always +e_i: wire to tap i.
            let i = digits.iter().position(|d| !d.is_zero()).unwrap();
            debug_assert_eq!(digits[i], Trit::Pos);
            output_map[v - 1] = Some(i);
        } else {
            let j = digits.iter().rposition(|d| !d.is_zero()).unwrap();
            let trit = digits[j];
            let parent_v = v as i64 - trit.value() as i64 * pow3(mu - 1 - j) as i64;
            debug_assert!(parent_v > 0 && (parent_v as usize) <= t);
            let left = output_map[parent_v as usize - 1].expect("prefix parent built first");
            let right_sign = if trit == Trit::Pos { Sign::Plus } else { Sign::Minus };
            nodes.push(DagNode::Add { left, right: j, right_sign });
            output_map[v - 1] = Some(nodes.len() - 1);
        }
    }

    Ok(AdderDag {
        mu,
        nodes,
        output_map: output_map.into_iter().map(|n| n.unwrap()).collect(),
    })
}

impl AdderDag {
    #[inline]
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Number of stored outputs, i.e. the LUT table size `(3^mu - 1)/2`.
    #[inline]
    pub fn outputs(&self) -> usize {
        self.output_map.len()
    }

    /// Exact number of two-input adders: `(3^mu - 1)/2 - mu`.
    #[inline]
    pub fn adder_count(&self) -> usize {
        self.nodes.len() - self.mu
    }

    #[inline]
    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    /// Node computing output magnitude `v` (1-based).
    #[inline]
    pub fn output_node(&self, v: usize) -> NodeId {
        self.output_map[v - 1]
    }

    /// Evaluates the network on a group of activation taps, producing all
    /// positive-half partial sums indexed by magnitude (`result[v - 1]`).
    ///
    /// The arithmetic order is fixed by the DAG: each entry is its prefix
    /// parent plus or minus one tap, so non-associative word types (binary16)
    /// get a deterministic, hardware-shaped evaluation order.
    pub fn evaluate<W: Word>(&self, taps: &[W]) -> Vec<W> {
        assert_eq!(taps.len(), self.mu, "tap count must equal mu");
        let mut vals: Vec<W> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                DagNode::Input(i) => taps[i],
                DagNode::Add { left, right, right_sign } => {
                    let r = match right_sign {
                        Sign::Plus => vals[right],
                        Sign::Minus => vals[right].neg(),
                    };
                    vals[left].add(r)
                }
            };
            vals.push(v);
        }
        self.output_map.iter().map(|&id| vals[id]).collect()
    }

    /// Structural audit: symmetry (outputs cover exactly the positive half),
    /// sparsity (no adder consumes a zero-trit tap), and the prefix shape
    /// (right operands are taps, lefts precede their node).
    pub fn check_structure(&self) -> Result<()> {
        for (idx, node) in self.nodes.iter().enumerate() {
            match *node {
                DagNode::Input(i) => {
                    if idx >= self.mu || i != idx {
                        return Err(Error::VerificationFailure(format!("tap node {idx} malformed")));
                    }
                }
                DagNode::Add { left, right, .. } => {
                    if left >= idx {
                        return Err(Error::VerificationFailure(format!("adder {idx} uses later node {left}")));
                    }
                    if right >= self.mu {
                        return Err(Error::VerificationFailure(format!("adder {idx} right operand is not a tap")));
                    }
                }
            }
        }
        for (i, &node) in self.output_map.iter().enumerate() {
            let v = (i + 1) as i32;
            let digits = signed_value_to_group(v, self.mu);
            // Sparsity: reconstruct the adder chain for this output and check
            // every consumed tap is a nonzero trit of the group.
            let mut cur = node;
            loop {
                match self.nodes[cur] {
                    DagNode::Input(tap) => {
                        if digits[tap].is_zero() {
                            return Err(Error::VerificationFailure(format!(
                                "output {v} is wired to zero-trit tap {tap}"
                            )));
                        }
                        break;
                    }
                    DagNode::Add { left, right, .. } => {
                        if digits[right].is_zero() {
                            return Err(Error::VerificationFailure(format!(
                                "output {v} consumes zero-trit tap {right}"
                            )));
                        }
                        cur = left;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exhaustively checks every DAG output against brute-force dot products on
/// `trials` random activation vectors (plus the all-zero and one-hot bases).
pub fn verify_dag(dag: &AdderDag, trials: usize, seed: u64) -> Result<()> {
    let mu = dag.mu();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<Vec<i64>> = Vec::with_capacity(trials + mu + 1);
    cases.push(vec![0i64; mu]);
    for i in 0..mu {
        let mut one_hot = vec![0i64; mu];
        one_hot[i] = 1;
        cases.push(one_hot);
    }
    for _ in 0..trials {
        cases.push((0..mu).map(|_| rng.random_range(-1_000_000..=1_000_000)).collect());
    }

    for taps in &cases {
        let got = dag.evaluate::<i64>(taps);
        for v in 1..=dag.outputs() {
            let digits = signed_value_to_group(v as i32, mu);
            let want: i64 = digits.iter().zip(taps).map(|(d, &x)| d.value() as i64 * x).sum();
            if got[v - 1] != want {
                return Err(Error::VerificationFailure(format!(
                    "dag mu={mu} output v={v}: got {}, want {want}, taps {taps:?}",
                    got[v - 1]
                )));
            }
        }
    }
    Ok(())
}

/// Primitive counts for one full accelerator instance.
///
/// `mux2_equivalents` follows the cost-model convention of one 2:1-mux
/// equivalent per stored entry per fetch unit (`L * K * table_size`); the
/// structurally exact selector count is `L * K * (table_size - 1)` two-input
/// muxes, reported separately by the netlist.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ResourceCounts {
    pub build_adders: u64,
    pub accumulate_adders: u64,
    pub mux2_equivalents: u64,
    pub inverters: u64,
    pub output_registers: u64,
    pub lut_storage_words: u64,
}

/// Deterministic primitive counts for a tile configuration.
pub fn resource_counts(cfg: &TileConfig) -> ResourceCounts {
    let l = cfg.l() as u64;
    let k = cfg.k() as u64;
    let t = table_size(cfg.mu()) as u64;
    ResourceCounts {
        build_adders: l * (t - cfg.mu() as u64),
        accumulate_adders: l * k,
        mux2_equivalents: l * k * t,
        inverters: l * k,
        output_registers: k,
        lut_storage_words: l * t,
    }
}
