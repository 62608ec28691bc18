//! Randomized benchmarking sequences and their fidelities.
//!
//! Fidelities are computed in the Heisenberg picture: each stabilizer of the
//! initial state is conjugated forward through the sequence, and every error
//! location contributes the channel eigenvalue of the Pauli sitting there.

mod config;
mod data;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{ExperimentConfig, ResolvedChannels, SamplingMode};
pub use data::{DecayData, LengthData};

use crate::channel::{ChannelSampler, PauliChannel};
use crate::error::Result;
use crate::generators::{enumerate_group, CliffordGroup, GeneratorSet};
use crate::pauli::{symplectic_product, PauliOperator};
use crate::tableau::CliffordTableau;

/// Largest group the engine will enumerate for uniform sampling.
pub const UNIFORM_GROUP_CAP: usize = 1_000_000;

/// Channel eigenvalue lookup, tabulated when the qubit count allows it.
#[derive(Debug, Clone)]
struct Eigenvalues {
    channel: PauliChannel,
    table: Option<Vec<f64>>,
    trivial: bool,
}

impl Eigenvalues {
    fn new(channel: PauliChannel) -> Self {
        let trivial = channel.is_identity();
        let table = if trivial { None } else { channel.eigenvalue_table().ok() };
        Self { channel, table, trivial }
    }

    #[inline]
    fn get(&self, x: u32, z: u32) -> f64 {
        if self.trivial {
            return 1.0;
        }
        match &self.table {
            Some(t) => t[((x as usize) << self.channel.n_qubits()) | z as usize],
            None => self.channel.eigenvalue_bits(x, z),
        }
    }
}

#[derive(Debug, Clone)]
enum Sampler {
    Uniform(Arc<CliffordGroup>),
    Word { generators: GeneratorSet, word_length: usize },
}

/// A validated experiment ready to sample and evaluate sequences.
#[derive(Debug, Clone)]
pub struct Engine {
    config: ExperimentConfig,
    sampler: Sampler,
    channels: ResolvedChannels,
    gate: Eigenvalues,
    prep: Eigenvalues,
    meas: Eigenvalues,
    /// Signed elements of the stabilizer group generated by the measured Paulis.
    stabilizers: Vec<PauliOperator>,
}

impl Engine {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let generators = GeneratorSet::new(config.group, config.n_qubits)?;
        let sampler = match config.sampling {
            SamplingMode::UniformEnumerated => {
                Sampler::Uniform(Arc::new(enumerate_group(&generators, UNIFORM_GROUP_CAP)?))
            }
            SamplingMode::GeneratorWord { word_length } => Sampler::Word { generators, word_length },
        };
        let channels = config.channels()?;
        Ok(Self {
            config: config.clone(),
            sampler,
            gate: Eigenvalues::new(channels.gate.clone()),
            prep: Eigenvalues::new(channels.prep.clone()),
            meas: Eigenvalues::new(channels.meas.clone()),
            channels,
            stabilizers: stabilizer_group(&config.stabilizer_generators()),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn channels(&self) -> &ResolvedChannels {
        &self.channels
    }

    /// `l − 1` random gates followed by the inverse of their product.
    pub fn sample_sequence<R: Rng + ?Sized>(&self, length: usize, rng: &mut R) -> Vec<CliffordTableau> {
        let n = self.config.n_qubits;
        let mut seq = Vec::with_capacity(length);
        let mut total = CliffordTableau::identity(n).expect("validated qubit count");
        for _ in 1..length {
            let g = match &self.sampler {
                Sampler::Uniform(group) => {
                    group.elements()[rng.random_range(0..group.order())].clone()
                }
                Sampler::Word { generators, word_length } => generators.random_word(*word_length, rng),
            };
            total = CliffordTableau::compose(&g, &total).expect("same qubit count");
            seq.push(g);
        }
        seq.push(total.inverse());
        seq
    }

    /// Probability that the final measurement returns the prepared outcome.
    ///
    /// With stabilizer group `S` of size `2^m`, this is
    /// `2^{-m} Σ_{S} s_S λ_p(S) Π_t λ(S^{(t)}) λ_m(S^{(l)})`.
    pub fn exact_sequence_fidelity(&self, sequence: &[CliffordTableau]) -> f64 {
        let mut total = 0.0;
        for s in &self.stabilizers {
            if s.is_identity() {
                total += 1.0;
                continue;
            }
            let mut factor = self.prep.get(s.x_bits(), s.z_bits());
            let mut cur = *s;
            for g in sequence {
                cur = g.apply_unchecked(&cur);
                factor *= self.gate.get(cur.x_bits(), cur.z_bits());
            }
            factor *= self.meas.get(cur.x_bits(), cur.z_bits());
            debug_assert_eq!((cur.x_bits(), cur.z_bits()), (s.x_bits(), s.z_bits()));
            let sign = if cur.is_negative() == s.is_negative() { 1.0 } else { -1.0 };
            total += sign * factor;
        }
        (total / self.stabilizers.len() as f64).clamp(0.0, 1.0)
    }

    /// Fraction of `shots` simulated runs that return the prepared outcome.
    pub fn monte_carlo_sequence_fidelity<R: Rng + ?Sized>(
        &self,
        sequence: &[CliffordTableau],
        shots: usize,
        rng: &mut R,
    ) -> f64 {
        if shots == 0 {
            return self.exact_sequence_fidelity(sequence);
        }
        let gens = self.config.stabilizer_generators();
        // trajectories[t][k]: generator k just after gate t (t = 0 is after preparation)
        let mut trajectories = vec![gens.clone()];
        for g in sequence {
            let next = trajectories
                .last()
                .unwrap()
                .iter()
                .map(|p| g.apply_unchecked(p))
                .collect();
            trajectories.push(next);
        }
        let final_flip: Vec<bool> = gens
            .iter()
            .zip(trajectories.last().unwrap())
            .map(|(a, b)| a.is_negative() != b.is_negative())
            .collect();

        let prep = sampler_or_none(&self.channels.prep);
        let gate = sampler_or_none(&self.channels.gate);
        let meas = sampler_or_none(&self.channels.meas);
        let mut flips = vec![false; gens.len()];
        let mut successes = 0usize;
        for _ in 0..shots {
            flips.copy_from_slice(&final_flip);
            let mut hit = |sampler: &Option<ChannelSampler>, at: &[PauliOperator], rng: &mut R| {
                if let Some(s) = sampler {
                    let (ex, ez) = s.sample(rng);
                    for (f, p) in flips.iter_mut().zip(at) {
                        *f ^= symplectic_product(ex, ez, p.x_bits(), p.z_bits()) == 1;
                    }
                }
            };
            hit(&prep, &trajectories[0], rng);
            for at in &trajectories[1..] {
                hit(&gate, at, rng);
            }
            hit(&meas, trajectories.last().unwrap(), rng);
            if flips.iter().all(|f| !f) {
                successes += 1;
            }
        }
        successes as f64 / shots as f64
    }

    /// Independent random stream for one sequence.
    pub fn sequence_rng(&self, length: usize, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(sequence_seed(self.config.rng_seed, length, index))
    }

    /// Fidelity of one sequence of the sweep, drawn from its own stream.
    pub fn sequence_fidelity(&self, length: usize, index: usize) -> f64 {
        let mut rng = self.sequence_rng(length, index);
        let seq = self.sample_sequence(length, &mut rng);
        self.monte_carlo_sequence_fidelity(&seq, self.config.shots_per_sequence, &mut rng)
    }

    /// Full sweep over lengths and sequences. Independent of the thread count.
    pub fn run(&self) -> DecayData {
        let per = self.config.sequences_per_length;
        let work: Vec<(usize, usize)> = self
            .config
            .lengths
            .iter()
            .flat_map(|&l| (0..per).map(move |i| (l, i)))
            .collect();
        let fidelities: Vec<f64> = work
            .par_iter()
            .map(|&(l, i)| self.sequence_fidelity(l, i))
            .collect();
        DecayData::from_fidelities(
            self.config
                .lengths
                .iter()
                .zip(fidelities.chunks(per))
                .map(|(&l, f)| (l, f.to_vec())),
        )
    }
}

fn sampler_or_none(c: &PauliChannel) -> Option<ChannelSampler> {
    (!c.is_identity()).then(|| c.sampler())
}

/// All `2^m` signed products of independent commuting Paulis.
fn stabilizer_group(generators: &[PauliOperator]) -> Vec<PauliOperator> {
    let n = generators[0].n_qubits();
    let mut group = vec![PauliOperator::identity(n).expect("validated qubit count")];
    for g in generators {
        let with_g: Vec<PauliOperator> = group
            .iter()
            .map(|s| s.checked_mul(g).expect("same size").expect("stabilizers commute"))
            .collect();
        group.extend(with_g);
    }
    group
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// `seed ⊕ hash(length, index)`.
pub fn sequence_seed(seed: u64, length: usize, index: usize) -> u64 {
    seed ^ splitmix64(splitmix64(length as u64) ^ index as u64)
}

/// Validates `config` and runs the full sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<DecayData> {
    Ok(Engine::new(config)?.run())
}
