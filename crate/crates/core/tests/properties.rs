use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rbkit::analysis::fit_single_exponential;
use rbkit::channel::{BlockChannel, ChannelFile, PauliChannel};
use rbkit::closed_form::{closed_form_lambdas, infidelity_bounds, BoundVariant};
use rbkit::dense::{gate_unitary, pauli_matrix, CMatrix};
use rbkit::engine::{DecayData, Engine, ExperimentConfig, SamplingMode};
use rbkit::orbit::closed_form_sizes;
use rbkit::{compute_blocks, CliffordTableau, GeneratorSet, GroupName, PauliOperator};

fn pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
    let mask = (1u32 << n) - 1;
    (any::<u32>(), any::<u32>(), any::<bool>())
        .prop_map(move |(x, z, s)| PauliOperator::new(n, x & mask, z & mask, s).unwrap())
}

fn group() -> impl Strategy<Value = GroupName> {
    prop_oneof![Just(GroupName::Real), Just(GroupName::CnotPauli), Just(GroupName::Full)]
}

/// A random word over the group's generators, as a tableau and as the gate list.
fn word(g: GroupName, n: usize, picks: &[usize]) -> (CliffordTableau, Vec<rbkit::Gate>) {
    let gens = GeneratorSet::new(g, n).unwrap();
    let mut t = CliffordTableau::identity(n).unwrap();
    let mut gates = Vec::new();
    for &k in picks {
        let i = k % gens.len();
        t = CliffordTableau::compose(&gens.tableaus()[i], &t).unwrap();
        gates.push(gens.gates()[i]);
    }
    (t, gates)
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn commutation_is_symmetric_and_matches_matrices(a in pauli(2), b in pauli(2)) {
        let c = a.commutes(&b).unwrap();
        prop_assert_eq!(c, b.commutes(&a).unwrap());
        let (ma, mb) = (pauli_matrix(&a).unwrap(), pauli_matrix(&b).unwrap());
        let commutator = &ma * &mb - &mb * &ma;
        prop_assert_eq!(c, commutator.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn conjugation_preserves_commutation(
        g in group(), picks in prop::collection::vec(0usize..16, 0..20), a in pauli(3), b in pauli(3)
    ) {
        let (t, _) = word(g, 3, &picks);
        let (ta, tb) = (t.apply(&a).unwrap(), t.apply(&b).unwrap());
        prop_assert_eq!(a.commutes(&b).unwrap(), ta.commutes(&tb).unwrap());
        prop_assert_eq!(a.weight() == 0, ta.weight() == 0);
    }

    #[test]
    fn inverse_undoes_conjugation(g in group(), picks in prop::collection::vec(0usize..16, 0..20), a in pauli(4)) {
        let (t, _) = word(g, 4, &picks);
        prop_assert_eq!(t.inverse().apply(&t.apply(&a).unwrap()).unwrap(), a);
        prop_assert!(CliffordTableau::compose(&t, &t.inverse()).unwrap().is_identity());
    }

    #[test]
    fn composition_is_sequential_application(
        g in group(),
        p in prop::collection::vec(0usize..16, 0..10),
        q in prop::collection::vec(0usize..16, 0..10),
        a in pauli(3),
    ) {
        let (s, _) = word(g, 3, &p);
        let (t, _) = word(g, 3, &q);
        let st = CliffordTableau::compose(&s, &t).unwrap();
        prop_assert_eq!(st.apply(&a).unwrap(), s.apply(&t.apply(&a).unwrap()).unwrap());
    }

    #[test]
    fn tableau_matches_dense_conjugation(g in group(), picks in prop::collection::vec(0usize..16, 0..12), a in pauli(2)) {
        let (t, gates) = word(g, 2, &picks);
        let mut u = CMatrix::identity(4, 4);
        for gate in gates {
            u = gate_unitary(gate, 2).unwrap() * u;
        }
        let conjugated = &u * pauli_matrix(&a).unwrap() * u.adjoint();
        prop_assert!(max_diff(&conjugated, &pauli_matrix(&t.apply(&a).unwrap()).unwrap()) < 1e-12);
    }

    #[test]
    fn bounds_are_ordered_and_contain_p(
        n in 3usize..7, raw in prop::collection::vec(0.0f64..1.0, 4), scale in 0.0f64..1.0
    ) {
        for variant in [BoundVariant::RealFromLambda1, BoundVariant::CnotPauliFromLambda12, BoundVariant::CnotPauliFromLambda3] {
            let k = closed_form_sizes(variant.group(), n).unwrap().len();
            let sum: f64 = raw[..k].iter().sum::<f64>().max(1e-12);
            let probs: Vec<f64> = raw[..k].iter().map(|r| r / sum * scale).collect();
            let p: f64 = probs.iter().sum();
            let lambdas = closed_form_lambdas(variant.group(), n, &probs).unwrap();
            let used: Vec<f64> = variant.blocks().iter().map(|&b| lambdas[b - 1]).collect();
            let b = infidelity_bounds(variant, &used, n).unwrap();
            prop_assert!(0.0 <= b.lower && b.lower <= b.upper);
            prop_assert!(b.lower <= p + 1e-12 && p <= b.upper + 1e-12);
            prop_assert!(b.upper <= b.worst_case_factor * b.lower + 1e-12);
        }
    }

    #[test]
    fn single_exponential_fit_recovers_exact_decay(lambda in 0.9f64..0.999, a in 0.2f64..0.5, b in 0.45f64..0.55) {
        let data = DecayData::from_fidelities(
            [1usize, 2, 4, 8, 16, 32, 64].map(|l| (l, vec![a * lambda.powi(l as i32) + b])),
        );
        let fit = fit_single_exponential(&data).unwrap();
        prop_assert!((fit.lambda().0 - lambda).abs() < 1e-7);
    }

    #[test]
    fn csv_roundtrip(rows in prop::collection::btree_map(1usize..50, prop::collection::vec(0.0f64..=1.0, 1..6), 1..6)) {
        let data = DecayData::from_fidelities(rows);
        prop_assert_eq!(DecayData::from_csv(&data.to_csv()).unwrap().summary(), data.summary());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monte_carlo_agrees_with_exact(seed in any::<u64>(), length in 1usize..12, p1 in 0.0f64..0.05, p2 in 0.0f64..0.05) {
        let d = compute_blocks(&GeneratorSet::new(GroupName::Real, 2).unwrap()).unwrap();
        let channel = BlockChannel::new(&d, vec![p1, p2]).unwrap().lowest_weight_channel(&d).unwrap();
        let config = ExperimentConfig {
            n_qubits: 2,
            group: GroupName::Real,
            sampling: SamplingMode::UniformEnumerated,
            lengths: vec![length],
            sequences_per_length: 1,
            shots_per_sequence: 0,
            gate_channel: ChannelFile::from(&channel),
            prep_channel: Some(ChannelFile::from(&PauliChannel::depolarizing(2, 0.02).unwrap())),
            meas_channel: None,
            measured_pauli: "ZX".parse().unwrap(),
            extra_stabilizers: vec![],
            rng_seed: seed,
        };
        let engine = Engine::new(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = engine.sample_sequence(length, &mut rng);
        let exact = engine.exact_sequence_fidelity(&seq);
        let shots = 20_000;
        let mc = engine.monte_carlo_sequence_fidelity(&seq, shots, &mut rng);
        let sigma = (exact * (1.0 - exact) / shots as f64).sqrt().max(1.0 / shots as f64);
        prop_assert!((mc - exact).abs() <= 4.0 * sigma, "mc {} exact {} sigma {}", mc, exact, sigma);
    }
}
