//! Orbit (block) structure of Paulis under a generator set, anticommutation
//! censuses between blocks, closed-form block sizes and 2-design moment tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{enumerate_group, GeneratorSet, GroupName, DEFAULT_GROUP_CAP};
use crate::pauli::{
    check_qubits, symplectic_product, Parity, PauliOperator, DEFAULT_ENUMERATION_CAP,
};
use crate::tableau::CliffordTableau;

/// Partition of all `4^n` Pauli indices into orbits. Block 0 is `{I}`.
///
/// For the named restricted groups the blocks follow the conventional
/// numbering (real Clifford: `B1` real, `B2` imaginary; CNOT+Pauli: `B1`..`B4`)
/// and a block may be empty, as `B3` is for CNOT+Pauli on one qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    n_qubits: usize,
    group: GroupName,
    blocks: Vec<Vec<u32>>,
    block_of: Vec<u32>,
}

impl BlockDecomposition {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn group(&self) -> GroupName {
        self.group
    }

    /// Number of blocks including block 0.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block(&self, id: usize) -> &[u32] {
        &self.blocks[id]
    }

    pub fn block_of(&self, pauli_index: usize) -> usize {
        self.block_of[pauli_index] as usize
    }

    pub fn block_of_pauli(&self, p: &PauliOperator) -> Result<usize> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        Ok(self.block_of(p.index()))
    }

    /// Sizes of the non-identity blocks `N_1..N_{k-1}`.
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks[1..].iter().map(Vec::len).collect()
    }

    pub fn members(&self, id: usize) -> impl Iterator<Item = PauliOperator> + '_ {
        let n = self.n_qubits;
        self.blocks[id]
            .iter()
            .map(move |&i| PauliOperator::from_index(n, i as usize).expect("index in range"))
    }

    /// Checks that every block is closed under the unsigned action of every generator.
    pub fn is_closed_under(&self, generators: &GeneratorSet) -> bool {
        let n = self.n_qubits;
        let m = (1u32 << n) - 1;
        generators.tableaus().iter().all(|t| {
            (0..self.block_of.len()).all(|i| {
                let (x, z) = t.apply_unsigned_bits((i >> n) as u32, i as u32 & m);
                let j = ((x as usize) << n) | z as usize;
                self.block_of[i] == self.block_of[j]
            })
        })
    }
}

/// Orbits of the unsigned conjugation action of `generators` on Pauli indices.
pub fn compute_blocks(generators: &GeneratorSet) -> Result<BlockDecomposition> {
    compute_blocks_with_cap(generators, DEFAULT_ENUMERATION_CAP)
}

pub fn compute_blocks_with_cap(generators: &GeneratorSet, cap: usize) -> Result<BlockDecomposition> {
    let n = generators.n_qubits();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "block computation (qubits)",
            cap,
            reached: n,
        });
    }
    let total = 1usize << (2 * n);
    let m = (1u32 << n) - 1;
    let mut orbit_of = vec![u32::MAX; total];
    let mut orbits: Vec<Vec<u32>> = Vec::new();
    let mut stack = Vec::new();
    // Seeds are visited in increasing index order, so orbit ids follow the
    // smallest member.
    for seed in 0..total {
        if orbit_of[seed] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        let mut members = vec![seed as u32];
        orbit_of[seed] = id;
        stack.push(seed);
        while let Some(i) = stack.pop() {
            for t in generators.tableaus() {
                let (x, z) = t.apply_unsigned_bits((i >> n) as u32, i as u32 & m);
                let j = ((x as usize) << n) | z as usize;
                if orbit_of[j] == u32::MAX {
                    orbit_of[j] = id;
                    members.push(j as u32);
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    let generic = BlockDecomposition {
        n_qubits: n,
        group: generators.name(),
        blocks: orbits,
        block_of: orbit_of,
    };
    match generators.name() {
        GroupName::Real => relabel(generic, 3, |p| match (p.is_identity(), p.y_count_parity()) {
            (true, _) => 0,
            (false, Parity::Even) => 1,
            (false, Parity::Odd) => 2,
        }),
        GroupName::CnotPauli => relabel(generic, 5, |p| p.cnot_pauli_block().index()),
        GroupName::Full | GroupName::Pauli => Ok(generic),
    }
}

/// Maps computed orbits onto a fixed class layout, requiring a one-to-one match
/// between non-empty classes and orbits.
fn relabel(
    generic: BlockDecomposition,
    classes: usize,
    class_of: impl Fn(&PauliOperator) -> usize,
) -> Result<BlockDecomposition> {
    let n = generic.n_qubits;
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); classes];
    let mut orbit_for_class: Vec<Option<usize>> = vec![None; classes];
    for (orbit_id, members) in generic.blocks.iter().enumerate() {
        let first = PauliOperator::from_index(n, members[0] as usize)?;
        let class = class_of(&first);
        for &i in members {
            let c = class_of(&PauliOperator::from_index(n, i as usize)?);
            if c != class {
                return Err(Error::BlockLayoutMismatch(format!(
                    "orbit of {first} spans classes {class} and {c}"
                )));
            }
        }
        if let Some(other) = orbit_for_class[class].replace(orbit_id) {
            return Err(Error::BlockLayoutMismatch(format!(
                "class {class} splits into orbits {other} and {orbit_id}"
            )));
        }
        blocks[class] = members.clone();
    }
    let mut block_of = vec![0u32; generic.block_of.len()];
    for (b, members) in blocks.iter().enumerate() {
        for &i in members {
            block_of[i as usize] = b as u32;
        }
    }
    Ok(BlockDecomposition {
        n_qubits: n,
        group: generic.group,
        blocks,
        block_of,
    })
}

/// Closed-form block sizes `N_1(n)..N_{k-1}(n)`.
pub fn closed_form_sizes(group: GroupName, n: usize) -> Result<Vec<u64>> {
    check_qubits(n)?;
    let two = 1u64 << n;
    let four = two * two;
    Ok(match group {
        GroupName::Real => vec![(four + two) / 2 - 1, (four - two) / 2],
        // (4^n - 3·2^n)/2 + 1, written to stay non-negative at n = 1
        GroupName::CnotPauli => vec![two - 1, two - 1, (four + 2 - 3 * two) / 2, (four - two) / 2],
        GroupName::Full => vec![four - 1],
        GroupName::Pauli => vec![1; (four - 1) as usize],
    })
}

/// `counts[i][j]`: number of Paulis in block `i` anticommuting with any member of block `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnticommutationCensus {
    pub n_qubits: usize,
    pub block_sizes: Vec<usize>,
    /// Representative used for each block (`None` for empty blocks).
    pub representatives: Vec<Option<PauliOperator>>,
    pub counts: Vec<Vec<u64>>,
}

impl AnticommutationCensus {
    pub fn count(&self, block: usize, against: usize) -> u64 {
        self.counts[block][against]
    }
}

fn anticommuting_per_block(d: &BlockDecomposition, rep: usize) -> Vec<u64> {
    let n = d.n_qubits;
    let m = (1u32 << n) - 1;
    let (rx, rz) = ((rep >> n) as u32, rep as u32 & m);
    let mut counts = vec![0u64; d.blocks.len()];
    for (i, &b) in d.block_of.iter().enumerate() {
        counts[b as usize] += symplectic_product(rx, rz, (i >> n) as u32, i as u32 & m) as u64;
    }
    counts
}

/// Brute-force census, checking every member of every block as a representative.
pub fn anticommutation_census(d: &BlockDecomposition) -> Result<AnticommutationCensus> {
    anticommutation_census_with(d, usize::MAX)
}

/// Census checking at most `max_reps` evenly spaced representatives per block.
pub fn anticommutation_census_with(
    d: &BlockDecomposition,
    max_reps: usize,
) -> Result<AnticommutationCensus> {
    let k = d.blocks.len();
    let mut counts = vec![vec![0u64; k]; k];
    let mut representatives = vec![None; k];
    for (j, members) in d.blocks.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let step = members.len().div_ceil(max_reps.max(1)).max(1);
        let reps: Vec<u32> = members.iter().copied().step_by(step).collect();
        let columns: Vec<Vec<u64>> = reps
            .par_iter()
            .map(|&r| anticommuting_per_block(d, r as usize))
            .collect();
        if let Some((pos, bad)) = columns.iter().enumerate().find(|(_, c)| *c != &columns[0]) {
            return Err(Error::NonUniformCensus {
                block: j,
                detail: format!(
                    "{} gives {:?}, {} gives {:?}",
                    PauliOperator::from_index(d.n_qubits, reps[0] as usize)?,
                    columns[0],
                    PauliOperator::from_index(d.n_qubits, reps[pos] as usize)?,
                    bad
                ),
            });
        }
        for i in 0..k {
            counts[i][j] = columns[0][i];
        }
        representatives[j] = Some(PauliOperator::from_index(d.n_qubits, reps[0] as usize)?);
    }
    Ok(AnticommutationCensus {
        n_qubits: d.n_qubits,
        block_sizes: d.blocks.iter().map(Vec::len).collect(),
        representatives,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum MomentSampling {
    /// Average over the full enumerated group.
    Exact,
    /// Average over `samples` random generator words of length `word_length`
    /// (`None` means `10 · n · |generators|`).
    WordSampled {
        word_length: Option<usize>,
        samples: usize,
        seed: u64,
    },
}

/// First and second moments of `a_{μν}(U)` over non-identity pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub group: GroupName,
    pub n_qubits: usize,
    pub sampling: MomentSampling,
    /// Number of unitaries averaged over.
    pub samples: usize,
    /// Target second moment `1/(4^n - 1)`.
    pub target_second_moment: f64,
    pub max_abs_first_moment: f64,
    pub max_second_moment_deviation: f64,
    /// Number of `(μ, ν)` pairs whose second moment is exactly zero.
    pub zero_second_moments: usize,
    /// Allowed deviation in word-sampled mode; zero in exact mode.
    pub tolerance: f64,
    /// Exact mode: every first moment is 0 and every second moment is exactly
    /// `1/(4^n-1)`. Sampled mode: all deviations within `tolerance`.
    pub is_two_design: bool,
    #[serde(skip)]
    first_sums: Vec<i64>,
    #[serde(skip)]
    second_counts: Vec<u64>,
}

impl MomentReport {
    fn slot(&self, mu: &PauliOperator, nu: &PauliOperator) -> usize {
        mu.index() * (1usize << (2 * self.n_qubits)) + nu.index()
    }

    /// `(Σ_U a_{μν}(U), number of U)`.
    pub fn first_moment_ratio(&self, mu: &PauliOperator, nu: &PauliOperator) -> (i64, usize) {
        (self.first_sums[self.slot(mu, nu)], self.samples)
    }

    /// `(Σ_U a_{μν}(U)^2, number of U)`.
    pub fn second_moment_ratio(&self, mu: &PauliOperator, nu: &PauliOperator) -> (u64, usize) {
        (self.second_counts[self.slot(mu, nu)], self.samples)
    }

    pub fn second_moment(&self, mu: &PauliOperator, nu: &PauliOperator) -> f64 {
        let (c, n) = self.second_moment_ratio(mu, nu);
        c as f64 / n as f64
    }

    /// True iff the exact rational second moment of `(μ, ν)` equals `1/(4^n-1)`.
    pub fn second_moment_is_uniform(&self, mu: &PauliOperator, nu: &PauliOperator) -> bool {
        let (c, n) = self.second_moment_ratio(mu, nu);
        c * ((1u64 << (2 * self.n_qubits)) - 1) == n as u64
    }
}

/// 2-design moment test for a generator set.
pub fn two_design_moments(generators: &GeneratorSet, sampling: MomentSampling) -> Result<MomentReport> {
    let n = generators.n_qubits();
    if n > 4 {
        return Err(Error::CapExceeded {
            what: "moment table (qubits)",
            cap: 4,
            reached: n,
        });
    }
    let elements: Vec<CliffordTableau> = match sampling {
        MomentSampling::Exact => enumerate_group(generators, DEFAULT_GROUP_CAP)?.elements().to_vec(),
        MomentSampling::WordSampled {
            word_length,
            samples,
            seed,
        } => {
            let len = word_length.unwrap_or(10 * n * generators.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| generators.random_word(len, &mut rng)).collect()
        }
    };
    let dim = 1usize << (2 * n);
    let mut first_sums = vec![0i64; dim * dim];
    let mut second_counts = vec![0u64; dim * dim];
    for t in &elements {
        for mu in 1..dim {
            let p = PauliOperator::from_index(n, mu)?;
            let img = t.apply_unchecked(&p);
            let slot = mu * dim + img.index();
            first_sums[slot] += img.sign() as i64;
            second_counts[slot] += 1;
        }
    }
    let samples = elements.len();
    let nontrivial = (dim - 1) as f64;
    let target = 1.0 / nontrivial;
    let (mut max_first, mut max_second, mut zeros, mut exact_ok) = (0.0f64, 0.0f64, 0usize, true);
    for mu in 1..dim {
        for nu in 1..dim {
            let s = mu * dim + nu;
            let first = first_sums[s] as f64 / samples as f64;
            let second = second_counts[s] as f64 / samples as f64;
            max_first = max_first.max(first.abs());
            max_second = max_second.max((second - target).abs());
            if second_counts[s] == 0 {
                zeros += 1;
            }
            if first_sums[s] != 0 || second_counts[s] * (dim as u64 - 1) != samples as u64 {
                exact_ok = false;
            }
        }
    }
    let (tolerance, is_two_design) = match sampling {
        MomentSampling::Exact => (0.0, exact_ok),
        MomentSampling::WordSampled { .. } => {
            // 5 binomial standard deviations of the second moment at the 2-design value
            let tol = 5.0 * (target * (1.0 - target) / samples as f64).sqrt();
            let tol_first = 5.0 * (target / samples as f64).sqrt();
            (tol, max_second <= tol && max_first <= tol_first)
        }
    };
    Ok(MomentReport {
        group: generators.name(),
        n_qubits: n,
        sampling,
        samples,
        target_second_moment: target,
        max_abs_first_moment: max_first,
        max_second_moment_deviation: max_second,
        zero_second_moments: zeros,
        tolerance,
        is_two_design,
        first_sums,
        second_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(g: GroupName, n: usize) -> BlockDecomposition {
        compute_blocks(&GeneratorSet::new(g, n).unwrap()).unwrap()
    }

    fn names(d: &BlockDecomposition, id: usize) -> Vec<String> {
        d.members(id).map(|p| p.to_string()).collect()
    }

    #[test]
    fn real_one_qubit_blocks() {
        let d = blocks(GroupName::Real, 1);
        assert_eq!(names(&d, 0), ["I"]);
        assert_eq!(names(&d, 1), ["Z", "X"]);
        assert_eq!(names(&d, 2), ["Y"]);
    }

    #[test]
    fn cnot_pauli_two_qubit_blocks() {
        let d = blocks(GroupName::CnotPauli, 2);
        let mut b1 = names(&d, 1);
        b1.sort();
        assert_eq!(b1, ["IZ", "ZI", "ZZ"]);
        let mut b2 = names(&d, 2);
        b2.sort();
        assert_eq!(b2, ["IX", "XI", "XX"]);
        let mut b3 = names(&d, 3);
        b3.sort();
        assert_eq!(b3, ["XZ", "YY", "ZX"]);
        assert_eq!(d.block(4).len(), 6);
        assert!(d.members(4).all(|p| p.y_count_parity() == Parity::Odd));
    }

    #[test]
    fn full_clifford_is_transitive() {
        assert_eq!(blocks(GroupName::Full, 2).sizes(), vec![15]);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form_sizes(GroupName::Real, 2).unwrap(), vec![9, 6]);
        assert_eq!(closed_form_sizes(GroupName::CnotPauli, 2).unwrap(), vec![3, 3, 3, 6]);
        assert_eq!(closed_form_sizes(GroupName::CnotPauli, 1).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(closed_form_sizes(GroupName::CnotPauli, 3).unwrap(), vec![7, 7, 21, 28]);
        assert_eq!(closed_form_sizes(GroupName::Pauli, 1).unwrap(), vec![1, 1, 1]);
        for g in GroupName::ALL {
            for n in 1..=4 {
                let d = blocks(g, n);
                let sizes: Vec<u64> = d.sizes().iter().map(|&s| s as u64).collect();
                assert_eq!(sizes, closed_form_sizes(g, n).unwrap(), "{g} n={n}");
                assert!(d.is_closed_under(&GeneratorSet::new(g, n).unwrap()));
            }
        }
    }

    #[test]
    fn real_census_two_qubits() {
        let c = anticommutation_census(&blocks(GroupName::Real, 2)).unwrap();
        // N1(1) + N2(1) + 1 = 4, twice over
        assert_eq!(c.count(1, 1), 4);
        assert_eq!(c.count(2, 1), 4);
        // 2 N1(1) + 2 = 6 real, 2 N2(1) = 2 imaginary
        assert_eq!(c.count(1, 2), 6);
        assert_eq!(c.count(2, 2), 2);
    }

    #[test]
    fn cnot_census_two_qubits() {
        let d = blocks(GroupName::CnotPauli, 2);
        let c = anticommutation_census(&d).unwrap();
        // hand count for ZI: anticommutes with XI, XX (B2); XZ, YY (B3); YI, YZ, YX, XY (B4)
        assert_eq!(c.count(1, 1), 0);
        assert_eq!(c.count(2, 1), 2);
        assert_eq!(c.count(3, 1), 2);
        assert_eq!(c.count(4, 1), 4);
        for j in 1..d.len() {
            let col: u64 = (0..d.len()).map(|i| c.count(i, j)).sum();
            assert_eq!(col, 8);
        }
    }

    #[test]
    fn non_uniform_census_is_reported() {
        // {ZI, IZ, XI} as one block: ZI and XI each anticommute with one member, IZ with none.
        let mut block_of = vec![2u32; 16];
        block_of[0] = 0;
        for i in [1, 2, 4] {
            block_of[i] = 1;
        }
        let fake = BlockDecomposition {
            n_qubits: 2,
            group: GroupName::Pauli,
            blocks: vec![
                vec![0],
                vec![1, 2, 4],
                (0..16).filter(|i| block_of[*i as usize] == 2).collect(),
            ],
            block_of,
        };
        assert!(matches!(
            anticommutation_census(&fake),
            Err(Error::NonUniformCensus { block: 1, .. })
        ));
    }

    #[test]
    fn moments_one_qubit() {
        let full = two_design_moments(&GeneratorSet::new(GroupName::Full, 1).unwrap(), MomentSampling::Exact)
            .unwrap();
        assert!(full.is_two_design);
        assert_eq!(full.max_abs_first_moment, 0.0);
        let x: PauliOperator = "X".parse().unwrap();
        let y: PauliOperator = "Y".parse().unwrap();
        assert_eq!(full.second_moment_ratio(&x, &y), (8, 24));

        let real = two_design_moments(&GeneratorSet::new(GroupName::Real, 1).unwrap(), MomentSampling::Exact)
            .unwrap();
        assert!(!real.is_two_design);
        assert_eq!(real.second_moment(&x, &y), 0.0);

        let pauli = two_design_moments(&GeneratorSet::new(GroupName::Pauli, 1).unwrap(), MomentSampling::Exact)
            .unwrap();
        for a in ["X", "Y", "Z"] {
            for b in ["X", "Y", "Z"] {
                let (pa, pb) = (a.parse().unwrap(), b.parse().unwrap());
                assert_eq!(pauli.second_moment(&pa, &pb), if a == b { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn word_sampled_moments() {
        let gens = GeneratorSet::new(GroupName::Full, 1).unwrap();
        let r = two_design_moments(
            &gens,
            MomentSampling::WordSampled {
                word_length: None,
                samples: 4000,
                seed: 7,
            },
        )
        .unwrap();
        assert!(r.is_two_design, "{r:?}");
        let real = two_design_moments(
            &GeneratorSet::new(GroupName::Real, 1).unwrap(),
            MomentSampling::WordSampled {
                word_length: None,
                samples: 4000,
                seed: 7,
            },
        )
        .unwrap();
        assert!(!real.is_two_design);
    }
}
