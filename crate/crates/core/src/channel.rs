//! Stochastic Pauli channels, their eigenvalues and twirls onto block structure.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::ActionIndex;
use crate::orbit::{anticommutation_census, AnticommutationCensus, BlockDecomposition};
use crate::pauli::{check_qubits, symplectic_product, PauliOperator, DEFAULT_ENUMERATION_CAP};

/// Deviation from unit total weight tolerated on construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Weights with smaller magnitude are treated as zero.
pub const CLAMP_BELOW: f64 = 1e-15;

/// Largest qubit count for which a dense eigenvalue table is built.
pub const EIGENVALUE_TABLE_MAX_QUBITS: usize = 10;

/// `ρ ↦ Σ_μ x_μ P_μ ρ P_μ`, stored sparsely over the canonical Pauli order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    n_qubits: usize,
    /// Non-zero `(canonical index, weight)` pairs sorted by index.
    support: Vec<(usize, f64)>,
}

impl PauliChannel {
    /// Builds a channel from explicit weights (identity included). Weights must
    /// be non-negative and sum to one.
    pub fn new<I>(n_qubits: usize, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliOperator, f64)>,
    {
        check_qubits(n_qubits)?;
        let mut map: BTreeMap<usize, f64> = BTreeMap::new();
        for (p, w) in weights {
            if p.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch {
                    left: n_qubits,
                    right: p.n_qubits(),
                });
            }
            if p.is_negative() {
                return Err(Error::InvalidChannel(format!(
                    "channel entries are unsigned Paulis, got {p}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidChannel(format!("weight for {p} is {w}")));
            }
            if w < -CLAMP_BELOW {
                return Err(Error::InvalidChannel(format!("negative weight {w} for {p}")));
            }
            if map.insert(p.index(), w).is_some() {
                return Err(Error::InvalidChannel(format!("duplicate entry for {p}")));
            }
        }
        let support: Vec<(usize, f64)> = map.into_iter().filter(|(_, w)| w.abs() >= CLAMP_BELOW).collect();
        let total: f64 = support.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidChannel(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n_qubits, support })
    }

    /// Error weights only; the identity weight is `1 - Σ w` unless given explicitly.
    pub fn from_error_weights<I>(n_qubits: usize, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliOperator, f64)>,
    {
        let mut entries: Vec<(PauliOperator, f64)> = weights.into_iter().collect();
        if !entries.iter().any(|(p, _)| p.is_identity()) {
            let rest: f64 = entries.iter().map(|(_, w)| w).sum();
            if rest > 1.0 + NORMALIZATION_TOLERANCE {
                return Err(Error::InvalidChannel(format!("error weights sum to {rest} > 1")));
            }
            entries.push((PauliOperator::identity(n_qubits)?, (1.0 - rest).max(0.0)));
        }
        Self::new(n_qubits, entries)
    }

    /// Dense weight vector over the canonical order.
    pub fn from_weights(n_qubits: usize, weights: &[f64]) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << (2 * n_qubits);
        if weights.len() != dim {
            return Err(Error::InvalidChannel(format!(
                "expected {dim} weights, got {}",
                weights.len()
            )));
        }
        Self::new(
            n_qubits,
            weights
                .iter()
                .enumerate()
                .map(|(i, &w)| (PauliOperator::from_index(n_qubits, i).expect("in range"), w)),
        )
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, [(PauliOperator::identity(n_qubits)?, 1.0)])
    }

    /// Uniform weight `p / (4^n - 1)` on every non-identity Pauli.
    pub fn depolarizing(n_qubits: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!("depolarizing probability {p}")));
        }
        let dim = 1usize << (2 * n_qubits);
        let mut w = vec![p / (dim - 1) as f64; dim];
        w[0] = 1.0 - p;
        Self::from_weights(n_qubits, &w)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn support(&self) -> impl Iterator<Item = (PauliOperator, f64)> + '_ {
        self.support
            .iter()
            .map(move |&(i, w)| (PauliOperator::from_index(self.n_qubits, i).expect("in range"), w))
    }

    pub fn weight(&self, p: &PauliOperator) -> f64 {
        let i = p.index();
        self.support
            .binary_search_by_key(&i, |(j, _)| *j)
            .map(|k| self.support[k].1)
            .unwrap_or(0.0)
    }

    /// Dense weights over the canonical order.
    pub fn weights(&self) -> Result<Vec<f64>> {
        if self.n_qubits > DEFAULT_ENUMERATION_CAP {
            return Err(Error::CapExceeded {
                what: "dense channel weights (qubits)",
                cap: DEFAULT_ENUMERATION_CAP,
                reached: self.n_qubits,
            });
        }
        let mut w = vec![0.0; 1usize << (2 * self.n_qubits)];
        for &(i, x) in &self.support {
            w[i] = x;
        }
        Ok(w)
    }

    /// Entanglement infidelity: total non-identity weight.
    pub fn infidelity(&self) -> f64 {
        self.support.iter().filter(|(i, _)| *i != 0).map(|(_, w)| w).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.infidelity() == 0.0
    }

    /// `λ_μ = Σ_{ν commuting} x_ν − Σ_{ν anticommuting} x_ν`.
    pub fn eigenvalue(&self, p: &PauliOperator) -> Result<f64> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        Ok(self.eigenvalue_bits(p.x_bits(), p.z_bits()))
    }

    #[inline]
    pub(crate) fn eigenvalue_bits(&self, x: u32, z: u32) -> f64 {
        let n = self.n_qubits;
        let m = (1u32 << n) - 1;
        let mut anti = 0.0;
        for &(i, w) in &self.support {
            if symplectic_product(x, z, (i >> n) as u32, i as u32 & m) == 1 {
                anti += w;
            }
        }
        1.0 - 2.0 * anti
    }

    /// Eigenvalues of all `4^n` Paulis in canonical order.
    ///
    /// Computed with a Walsh–Hadamard transform: with `ν' = (z_ν, x_ν)` the
    /// symplectic product `⟨μ, ν⟩` is the ordinary dot product `μ · ν'`.
    pub fn eigenvalue_table(&self) -> Result<Vec<f64>> {
        let n = self.n_qubits;
        if n > EIGENVALUE_TABLE_MAX_QUBITS {
            return Err(Error::CapExceeded {
                what: "eigenvalue table (qubits)",
                cap: EIGENVALUE_TABLE_MAX_QUBITS,
                reached: n,
            });
        }
        let dim = 1usize << (2 * n);
        let m = (1usize << n) - 1;
        let mut a = vec![0.0; dim];
        for &(i, w) in &self.support {
            let swapped = ((i & m) << n) | (i >> n);
            a[swapped] += w;
        }
        let mut h = 1;
        while h < dim {
            for start in (0..dim).step_by(2 * h) {
                for k in start..start + h {
                    let (u, v) = (a[k], a[k + h]);
                    a[k] = u + v;
                    a[k + h] = u - v;
                }
            }
            h *= 2;
        }
        Ok(a)
    }

    /// Sampler over the support, for Monte Carlo error insertion.
    pub fn sampler(&self) -> ChannelSampler {
        let dist = WeightedIndex::new(self.support.iter().map(|(_, w)| *w))
            .expect("validated weights are non-negative with positive sum");
        let m = (1u32 << self.n_qubits) - 1;
        ChannelSampler {
            dist,
            paulis: self
                .support
                .iter()
                .map(|&(i, _)| ((i >> self.n_qubits) as u32, i as u32 & m))
                .collect(),
        }
    }
}

/// Draws Pauli errors `(x_bits, z_bits)` with the channel's probabilities.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    dist: WeightedIndex<f64>,
    paulis: Vec<(u32, u32)>,
}

impl ChannelSampler {
    #[inline]
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        use rand::distr::Distribution;
        self.paulis[self.dist.sample(rng)]
    }
}

/// A channel aggregated onto a block decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockChannel {
    pub n_qubits: usize,
    /// Sizes `N_1..N_{k-1}`.
    pub block_sizes: Vec<usize>,
    /// `p_1..p_{k-1}`.
    pub block_probabilities: Vec<f64>,
    /// `1 - p`.
    pub identity_weight: f64,
}

impl BlockChannel {
    /// Validates `p_i ≥ 0`, `Σ p_i ≤ 1` and `p_i = 0` on empty blocks.
    pub fn new(d: &BlockDecomposition, probabilities: Vec<f64>) -> Result<Self> {
        let sizes = d.sizes();
        validate_probabilities(&probabilities, &sizes)?;
        let p: f64 = probabilities.iter().sum();
        Ok(Self {
            n_qubits: d.n_qubits(),
            block_sizes: sizes,
            block_probabilities: probabilities,
            identity_weight: 1.0 - p,
        })
    }

    /// Entanglement infidelity `p = Σ p_i`.
    pub fn infidelity(&self) -> f64 {
        self.block_probabilities.iter().sum()
    }

    /// The twirled channel: weight `p_i / N_i` on each member of block `i`.
    pub fn uniform_channel(&self, d: &BlockDecomposition) -> Result<PauliChannel> {
        if d.sizes() != self.block_sizes {
            return Err(Error::InvalidChannel("block channel does not match decomposition".into()));
        }
        let mut entries = vec![(PauliOperator::identity(self.n_qubits)?, self.identity_weight)];
        for (b, &p) in self.block_probabilities.iter().enumerate() {
            let size = self.block_sizes[b];
            if size == 0 {
                continue;
            }
            entries.extend(d.members(b + 1).map(|q| (q, p / size as f64)));
        }
        PauliChannel::new(self.n_qubits, entries)
    }

    /// Spreads each `p_i` evenly over the lowest-weight members of block `i`,
    /// e.g. single-qubit errors where the block has any.
    pub fn lowest_weight_channel(&self, d: &BlockDecomposition) -> Result<PauliChannel> {
        let mut entries = vec![(PauliOperator::identity(self.n_qubits)?, self.identity_weight)];
        for (b, &p) in self.block_probabilities.iter().enumerate() {
            let members: Vec<PauliOperator> = d.members(b + 1).collect();
            let Some(min_w) = members.iter().map(PauliOperator::weight).min() else {
                continue;
            };
            let light: Vec<PauliOperator> = members.into_iter().filter(|q| q.weight() == min_w).collect();
            let share = p / light.len() as f64;
            entries.extend(light.into_iter().map(|q| (q, share)));
        }
        PauliChannel::new(self.n_qubits, entries)
    }
}

pub(crate) fn validate_probabilities(p: &[f64], sizes: &[usize]) -> Result<()> {
    if p.len() != sizes.len() {
        return Err(Error::InvalidProbabilities(format!(
            "expected {} block probabilities, got {}",
            sizes.len(),
            p.len()
        )));
    }
    for (i, (&pi, &size)) in p.iter().zip(sizes).enumerate() {
        if !pi.is_finite() || pi < 0.0 {
            return Err(Error::InvalidProbabilities(format!("p_{} = {pi}", i + 1)));
        }
        if size == 0 && pi != 0.0 {
            return Err(Error::InvalidProbabilities(format!(
                "p_{} = {pi} on an empty block",
                i + 1
            )));
        }
    }
    let total: f64 = p.iter().sum();
    if total > 1.0 + NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidProbabilities(format!("Σ p_i = {total} > 1")));
    }
    Ok(())
}

/// Block sums `p_i = Σ_{μ ∈ B_i} x_μ`.
pub fn twirl_to_blocks(c: &PauliChannel, d: &BlockDecomposition) -> Result<BlockChannel> {
    if c.n_qubits() != d.n_qubits() {
        return Err(Error::SizeMismatch {
            left: c.n_qubits(),
            right: d.n_qubits(),
        });
    }
    let mut sums = vec![0.0; d.len()];
    for &(i, w) in &c.support {
        sums[d.block_of(i)] += w;
    }
    Ok(BlockChannel {
        n_qubits: d.n_qubits(),
        block_sizes: d.sizes(),
        block_probabilities: sums[1..].to_vec(),
        identity_weight: sums[0],
    })
}

/// `λ_j = 1 − 2 Σ_i p_i A[i][j] / N_i`, skipping empty blocks.
pub fn block_eigenvalue(b: &BlockChannel, census: &AnticommutationCensus, block: usize) -> Result<f64> {
    let k = census.block_sizes.len();
    if k != b.block_sizes.len() + 1 || census.block_sizes[1..] != b.block_sizes[..] {
        return Err(Error::InvalidChannel("census and block channel disagree on blocks".into()));
    }
    if block == 0 || block >= k {
        return Err(Error::InvalidChannel(format!("block {block} is not a non-identity block")));
    }
    let mut anti = 0.0;
    for (i, &p) in b.block_probabilities.iter().enumerate() {
        let size = b.block_sizes[i];
        if size == 0 {
            continue;
        }
        anti += p * census.count(i + 1, block) as f64 / size as f64;
    }
    Ok(1.0 - 2.0 * anti)
}

/// Block channel of `c` and the eigenvalue of every non-identity block of its twirl.
pub fn twirled_lambdas(c: &PauliChannel, d: &BlockDecomposition) -> Result<(BlockChannel, Vec<f64>)> {
    let b = twirl_to_blocks(c, d)?;
    let census = anticommutation_census(d)?;
    let lambdas = (1..d.len())
        .map(|j| block_eigenvalue(&b, &census, j))
        .collect::<Result<_>>()?;
    Ok((b, lambdas))
}

/// Brute-force group twirl: averages the permuted weight vectors over every
/// element's unsigned action.
pub fn dense_group_twirl(c: &PauliChannel, action: &ActionIndex) -> Result<PauliChannel> {
    if c.n_qubits() != action.n_qubits {
        return Err(Error::SizeMismatch {
            left: c.n_qubits(),
            right: action.n_qubits,
        });
    }
    if action.is_empty() {
        return Err(Error::InvalidChannel("empty action index".into()));
    }
    let w = c.weights()?;
    let mut out = vec![0.0; w.len()];
    for perm in &action.permutations {
        for (mu, &x) in w.iter().enumerate() {
            out[perm[mu] as usize] += x;
        }
    }
    let g = action.len() as f64;
    out.iter_mut().for_each(|x| *x /= g);
    PauliChannel::from_weights(c.n_qubits(), &out)
}

/// On-disk channel description: `{"n": 2, "weights": [{"pauli": "XZ", "w": 0.01}]}`.
/// Omitted Paulis have weight 0; the identity weight is inferred when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub n: usize,
    pub weights: Vec<WeightEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub pauli: PauliOperator,
    pub w: f64,
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<PauliChannel> {
        PauliChannel::from_error_weights(self.n, self.weights.iter().map(|e| (e.pauli, e.w)))
    }
}

impl From<&PauliChannel> for ChannelFile {
    fn from(c: &PauliChannel) -> Self {
        Self {
            n: c.n_qubits(),
            weights: c.support().map(|(pauli, w)| WeightEntry { pauli, w }).collect(),
        }
    }
}

impl TryFrom<ChannelFile> for PauliChannel {
    type Error = Error;

    fn try_from(f: ChannelFile) -> Result<Self> {
        f.to_channel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{enumerate_group, GeneratorSet, GroupName, DEFAULT_GROUP_CAP};
    use crate::orbit::{anticommutation_census, compute_blocks};

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn one_qubit(xi: f64, xz: f64, xx: f64, xy: f64) -> PauliChannel {
        PauliChannel::from_weights(1, &[xi, xz, xx, xy]).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let id = PauliChannel::identity(2).unwrap();
        assert_eq!(id.eigenvalue(&p("XY")).unwrap(), 1.0);
        // x_I = 0.97, x_X = x_Z = 0.01, x_Y = 0.01: (0.97 + 0.01) − (0.01 + 0.01)
        let c = one_qubit(0.97, 0.01, 0.01, 0.01);
        assert!((c.eigenvalue(&p("X")).unwrap() - 0.96).abs() < 1e-15);
        let dep = PauliChannel::depolarizing(1, 0.03).unwrap();
        assert!((dep.eigenvalue(&p("X")).unwrap() - (1.0 - 4.0 * 0.03 / 3.0)).abs() < 1e-15);
        assert!(c.eigenvalue(&p("XX")).is_err());
    }

    #[test]
    fn eigenvalue_table_matches_direct_sums() {
        let d = compute_blocks(&GeneratorSet::new(GroupName::CnotPauli, 3).unwrap()).unwrap();
        let b = BlockChannel::new(&d, vec![0.01, 0.02, 0.005, 0.003]).unwrap();
        let c = b.lowest_weight_channel(&d).unwrap();
        let table = c.eigenvalue_table().unwrap();
        for (i, lam) in table.iter().enumerate() {
            let q = PauliOperator::from_index(3, i).unwrap();
            assert!((lam - c.eigenvalue(&q).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(PauliChannel::from_weights(1, &[0.5, 0.4, 0.0, 0.0]).is_err());
        assert!(PauliChannel::from_weights(1, &[1.1, -0.1, 0.0, 0.0]).is_err());
        assert!(PauliChannel::new(1, [(p("X"), 0.5), (p("X"), 0.5)]).is_err());
        assert!(PauliChannel::new(1, [(p("-X"), 1.0)]).is_err());
        // tiny weights are clamped away
        let c = PauliChannel::from_weights(1, &[1.0, 1e-16, 0.0, 0.0]).unwrap();
        assert_eq!(c.support().count(), 1);
    }

    #[test]
    fn twirl_sums() {
        let d = compute_blocks(&GeneratorSet::new(GroupName::Real, 1).unwrap()).unwrap();
        let c = one_qubit(0.965, 0.01, 0.02, 0.005);
        let b = twirl_to_blocks(&c, &d).unwrap();
        assert!((b.block_probabilities[0] - 0.03).abs() < 1e-15);
        assert!((b.block_probabilities[1] - 0.005).abs() < 1e-15);
        let id = twirl_to_blocks(&PauliChannel::identity(1).unwrap(), &d).unwrap();
        assert_eq!(id.block_probabilities, vec![0.0, 0.0]);
        let dep = twirl_to_blocks(&PauliChannel::depolarizing(1, 0.03).unwrap(), &d).unwrap();
        assert!((dep.block_probabilities[0] - 0.02).abs() < 1e-15);
        assert!((dep.block_probabilities[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn block_eigenvalues_one_qubit_real() {
        let d = compute_blocks(&GeneratorSet::new(GroupName::Real, 1).unwrap()).unwrap();
        let census = anticommutation_census(&d).unwrap();
        let (p1, p2) = (0.02, 0.01);
        let b = BlockChannel::new(&d, vec![p1, p2]).unwrap();
        assert!((block_eigenvalue(&b, &census, 1).unwrap() - (1.0 - p1 - 2.0 * p2)).abs() < 1e-15);
        assert!((block_eigenvalue(&b, &census, 2).unwrap() - (1.0 - 2.0 * p1)).abs() < 1e-15);
        assert!(block_eigenvalue(&b, &census, 0).is_err());
    }

    #[test]
    fn cnot_block_eigenvalue_two_qubits() {
        let d = compute_blocks(&GeneratorSet::new(GroupName::CnotPauli, 2).unwrap()).unwrap();
        let census = anticommutation_census(&d).unwrap();
        let ps = [0.004, 0.003, 0.002, 0.001];
        let b = BlockChannel::new(&d, ps.to_vec()).unwrap();
        let expect = 1.0 - (ps[1] + ps[2] + ps[3]) * 4.0 / 3.0;
        assert!((block_eigenvalue(&b, &census, 1).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn group_twirl_examples() {
        let full = enumerate_group(&GeneratorSet::new(GroupName::Full, 1).unwrap(), DEFAULT_GROUP_CAP).unwrap();
        let c = one_qubit(0.97, 0.0, 0.02, 0.01);
        let tw = dense_group_twirl(&c, &full.unsigned_action_index()).unwrap();
        for q in ["X", "Y", "Z"] {
            assert!((tw.weight(&p(q)) - 0.01).abs() < 1e-15);
            assert!((tw.eigenvalue(&p(q)).unwrap() - (1.0 - 4.0 * 0.03 / 3.0)).abs() < 1e-14);
        }

        let real = enumerate_group(&GeneratorSet::new(GroupName::Real, 1).unwrap(), DEFAULT_GROUP_CAP).unwrap();
        let c = one_qubit(0.975, 0.0, 0.02, 0.005);
        let tw = dense_group_twirl(&c, &real.unsigned_action_index()).unwrap();
        assert!((tw.weight(&p("X")) - 0.01).abs() < 1e-15);
        assert!((tw.weight(&p("Z")) - 0.01).abs() < 1e-15);
        assert!((tw.weight(&p("Y")) - 0.005).abs() < 1e-15);
        // idempotent
        let again = dense_group_twirl(&tw, &real.unsigned_action_index()).unwrap();
        for (a, b) in again.weights().unwrap().iter().zip(tw.weights().unwrap()) {
            assert!((a - b).abs() < 1e-15);
        }

        let pauli = enumerate_group(&GeneratorSet::new(GroupName::Pauli, 1).unwrap(), DEFAULT_GROUP_CAP).unwrap();
        let tw = dense_group_twirl(&c, &pauli.unsigned_action_index()).unwrap();
        assert_eq!(tw, c);
    }

    #[test]
    fn channel_file_infers_identity() {
        let f: ChannelFile =
            serde_json::from_str(r#"{"n": 2, "weights": [{"pauli": "XZ", "w": 0.01}, {"pauli": "YI", "w": 0.02}]}"#)
                .unwrap();
        let c = f.to_channel().unwrap();
        assert!((c.weight(&p("II")) - 0.97).abs() < 1e-15);
        assert!((c.infidelity() - 0.03).abs() < 1e-15);
        let back = ChannelFile::from(&c);
        assert_eq!(back.to_channel().unwrap(), c);
        assert!(serde_json::from_str::<ChannelFile>(r#"{"n": 1, "weights": [], "extra": 1}"#).is_err());
        let bad: ChannelFile = serde_json::from_str(r#"{"n": 1, "weights": [{"pauli": "XX", "w": 0.1}]}"#).unwrap();
        assert!(bad.to_channel().is_err());
    }

    #[test]
    fn block_probabilities_validation() {
        let d = compute_blocks(&GeneratorSet::new(GroupName::CnotPauli, 1).unwrap()).unwrap();
        assert!(BlockChannel::new(&d, vec![0.1, 0.1, 0.1, 0.1]).is_err());
        assert!(BlockChannel::new(&d, vec![0.1, 0.1, 0.0, 0.1]).is_ok());
        assert!(BlockChannel::new(&d, vec![0.1, 0.1, 0.0]).is_err());
        assert!(BlockChannel::new(&d, vec![0.6, 0.6, 0.0, 0.0]).is_err());
    }
}
