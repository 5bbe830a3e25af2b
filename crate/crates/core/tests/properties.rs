use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use qrel_core::hilbert::{
    apply_unitary, change_basis, measure, outcome_probabilities, random_state, random_unitary, reduced_state,
    tensor_product, DensityMatrix, Operator, StateVector,
};
use qrel_core::measurement::{dephase, premeasure, project_chain, rewrite_basis_paradox};
use qrel_core::relations::{check_equivalence, detect_intransitivity, reciprocal_superposition, FrameGraph, FrameId, Violation};
use qrel_core::transforms::{
    delta_factor, dilate_length, flat_5_interval, frame_swap_debroglie, gamma_factor, quantum_interval,
    FiveDisplacement, QuantumInterval, TransformParams, HBAR,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_observable(dim: usize, seed: u64) -> Operator {
    let mut r = rng(seed);
    let u = random_unitary(dim, &mut r);
    let values: Vec<f64> = (0..dim).map(|i| (i as f64 * 0.7 + (seed % 13) as f64).sin()).collect();
    u.mul(&Operator::diagonal(&values)).unwrap().mul(&u.adjoint()).unwrap()
}

fn moduli(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes().iter().map(|a| a.norm()).collect()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #[test]
    fn unitary_chains_preserve_norm(seed in any::<u64>(), dim in 2usize..6, len in 1usize..60) {
        let mut r = rng(seed);
        let mut psi = random_state(dim, "S", &mut r);
        for _ in 0..len {
            psi = apply_unitary(&random_unitary(dim, &mut r), &psi).unwrap();
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn basis_change_on_partner_does_not_signal(seed in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4) {
        let mut r = rng(seed);
        let joint = random_state(d1 * d2, "SA", &mut r);
        let psi = StateVector::new(joint.amplitudes().to_vec(), vec![d1, d2], vec!["S".into(), "A".into()]).unwrap();
        let basis = random_unitary(d2, &mut r);
        let rotated = change_basis(&psi, 1, &basis).unwrap();
        let obs = random_observable(d1, seed.wrapping_add(1));
        let before = outcome_probabilities(&psi, 0, &obs).unwrap();
        let after = outcome_probabilities(&rotated, 0, &obs).unwrap();
        prop_assert_eq!(before.len(), after.len());
        for (b, a) in before.iter().zip(&after) {
            prop_assert!((b.1 - a.1).abs() < 1e-12);
        }
        let rho_b = reduced_state(&psi, &[0]).unwrap();
        let rho_a = reduced_state(&rotated, &[0]).unwrap();
        prop_assert!((rho_b.entries() - rho_a.entries()).camax() < 1e-12);
    }

    #[test]
    fn repeated_measurement_is_stable(seed in any::<u64>(), dim in 2usize..5) {
        let mut r = rng(seed);
        let psi = random_state(dim, "S", &mut r);
        let obs = random_observable(dim, seed ^ 0x5a5a);
        let first = measure(&psi, 0, &obs, seed).unwrap();
        for s in 0..5u64 {
            let again = measure(&first.collapsed, 0, &obs, s).unwrap();
            prop_assert_eq!(again.outcome_index, first.outcome_index);
            prop_assert!((again.probability - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product_is_pure(seed in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4) {
        let mut r = rng(seed);
        let a = random_state(d1, "S", &mut r);
        let b = random_state(d2, "A", &mut r);
        let rho = reduced_state(&tensor_product(&a, &b).unwrap(), &[0]).unwrap();
        let pure = DensityMatrix::from_pure(&a);
        prop_assert!((rho.entries() - pure.entries()).camax() < 1e-12);
    }

    #[test]
    fn dephasing_is_positive_and_trace_preserving(seed in any::<u64>(), dim in 2usize..5, strength in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = DensityMatrix::from_pure(&random_state(dim, "S", &mut r));
        let b = DensityMatrix::from_pure(&random_state(dim, "S", &mut r));
        let mixed = DensityMatrix::new(a.entries() * Complex64::new(0.3, 0.0) + b.entries() * Complex64::new(0.7, 0.0)).unwrap();
        let basis = random_observable(dim, seed ^ 0xbeef);
        let out = dephase(&mixed, &basis, strength).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.eigenvalues().iter().all(|&e| e >= -1e-12));
    }

    #[test]
    fn chain_projection_is_pointer_correlated(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s0 = random_state(2, "S", &mut r);
        let psi_t = premeasure(&s0, 3).unwrap();
        let p = project_chain(&psi_t, seed).unwrap();
        // |s↑⟩|A↑⟩ sits at joint index 1, |s↓⟩|A↓⟩ at 5
        let kept = if p.branch == 0 { 1 } else { 5 };
        for (i, a) in p.state.amplitudes().iter().enumerate() {
            if i != kept {
                prop_assert!(a.norm_sqr() <= 1e-12);
            }
        }
        let reciprocal = reciprocal_superposition(&s0, "A").unwrap().collapse_on(p.branch).unwrap();
        prop_assert!((reciprocal.backward.amplitudes()[p.branch].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_rewrite_preserves_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi_t = premeasure(&random_state(2, "S", &mut r), 3).unwrap();
        let rw = rewrite_basis_paradox(&psi_t).unwrap();
        let back = change_basis(&rw.rewritten, 0, &Operator::hadamard().adjoint()).unwrap();
        prop_assert!((psi_t.overlap(&back).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocity_is_an_involution_on_moduli(seed in any::<u64>(), dim in 2usize..6) {
        let mut r = rng(seed);
        let forward = random_state(dim, "S", &mut r);
        let pair = reciprocal_superposition(&forward, "A").unwrap();
        prop_assert!(pair.modulus_mismatch() < 1e-12);
        let twice = reciprocal_superposition(&pair.backward, "S").unwrap();
        for (a, b) in moduli(&twice.backward).iter().zip(moduli(&forward)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dilation_round_trip_and_composition(
        dx in -1e3f64..1e3,
        m1 in log_uniform(1e-31, 1e3),
        m2 in log_uniform(1e-31, 1e3),
        m3 in log_uniform(1e-31, 1e3),
    ) {
        let there = dilate_length(dx, m1, m2).unwrap();
        let back = dilate_length(there, m2, m1).unwrap();
        prop_assert!((back - dx).abs() <= 1e-12 * dx.abs().max(1e-300));
        let chained = dilate_length(there, m2, m3).unwrap();
        let direct = dilate_length(dx, m1, m3).unwrap();
        prop_assert!((chained - direct).abs() <= 1e-12 * direct.abs().max(1e-300));
    }

    #[test]
    fn debroglie_products_are_hbar(m_s in log_uniform(1e-31, 1e3), m_a in log_uniform(1e-31, 1e3), v in log_uniform(1e-3, 1e8)) {
        let swap = frame_swap_debroglie(m_s, m_a, v).unwrap();
        prop_assert!((swap.product_forward - HBAR).abs() / HBAR < 1e-9);
        prop_assert!((swap.product_backward - HBAR).abs() / HBAR < 1e-9);
    }

    #[test]
    fn quantum_interval_symmetries(dt in -1e3f64..1e3, j1 in 1e-6f64..1e3, j2 in 1e-6f64..1e3) {
        let nu = quantum_interval(&QuantumInterval::new(dt, j1, j2).unwrap());
        prop_assert_eq!(nu, quantum_interval(&QuantumInterval::new(dt, j2, j1).unwrap()));
        prop_assert_eq!(nu, quantum_interval(&QuantumInterval::new(-dt, j1, j2).unwrap()));
    }

    #[test]
    fn delta_matches_gamma(x in 0.0f64..=0.99, c in 1.0f64..1e9) {
        let delta = delta_factor(&TransformParams::with_action(1.0, 1.0, x, 1.0, 1.0).unwrap()).unwrap();
        let gamma = gamma_factor(x * c, c).unwrap();
        prop_assert!((delta - gamma).abs() <= 1e-12 * gamma);
    }

    #[test]
    fn five_interval_triangle_inequality(a in prop::array::uniform5(-1e3f64..1e3), b in prop::array::uniform5(-1e3f64..1e3)) {
        let sum: [f64; 5] = std::array::from_fn(|i| a[i] + b[i]);
        let lhs = flat_5_interval(&FiveDisplacement::new(sum).unwrap());
        let rhs = flat_5_interval(&FiveDisplacement::new(a).unwrap()) + flat_5_interval(&FiveDisplacement::new(b).unwrap());
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    (1usize..=12).prop_flat_map(|n| {
        let edges = prop::collection::vec((0..n, 0..n), 0..(n * n).min(40));
        (Just(n), edges.clone(), edges)
    })
}

fn build_graph(n: usize, q: &[(usize, usize)], phys: &[(usize, usize)]) -> FrameGraph {
    let name = |i: usize| format!("F{i:02}");
    let frames = (0..n).map(|i| FrameId::new(name(i))).collect();
    let to_edges = |e: &[(usize, usize)]| e.iter().map(|&(a, b)| (name(a), name(b))).collect::<Vec<_>>();
    FrameGraph::new(frames, to_edges(q), to_edges(phys)).unwrap()
}

fn brute_force_violations(n: usize, phys: &[(usize, usize)]) -> Vec<Violation> {
    let name = |i: usize| format!("F{i:02}");
    let rel: BTreeSet<(usize, usize)> = phys.iter().copied().collect();
    let mut out = Vec::new();
    for a in 0..n {
        if !rel.contains(&(a, a)) {
            out.push(Violation::Reflexivity { frame: name(a) });
        }
        for b in 0..n {
            if rel.contains(&(a, b)) && !rel.contains(&(b, a)) {
                out.push(Violation::Symmetry { from: name(a), to: name(b) });
            }
            for c in 0..n {
                if rel.contains(&(a, b)) && rel.contains(&(b, c)) && !rel.contains(&(a, c)) {
                    out.push(Violation::Transitivity { a: name(a), b: name(b), c: name(c) });
                }
            }
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn equivalence_checker_matches_brute_force((n, q, phys) in graph_strategy()) {
        let g = build_graph(n, &q, &phys);
        prop_assert_eq!(check_equivalence(&g), brute_force_violations(n, &phys));
        prop_assert!(check_equivalence(&g.with_equivalence_closure()).is_empty());
    }

    #[test]
    fn intransitivity_detector_matches_brute_force((n, q, phys) in graph_strategy()) {
        let g = build_graph(n, &q, &phys);
        let rel: BTreeSet<(usize, usize)> = q.iter().copied().collect();
        let mut expected = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if rel.contains(&(x, y)) && rel.contains(&(y, x)) && !rel.contains(&(x, x)) {
                    expected.push((format!("F{x:02}"), format!("F{y:02}")));
                }
            }
        }
        let found = detect_intransitivity(&g);
        prop_assert_eq!(&found, &expected);

        // empty exactly when every mutually related member is self-related
        let members: BTreeSet<usize> = rel.iter().filter(|(x, y)| rel.contains(&(*y, *x))).map(|e| e.0).collect();
        let reflexive_on_members = members.iter().all(|m| rel.contains(&(*m, *m)));
        prop_assert_eq!(found.is_empty(), reflexive_on_members);
    }
}

#[test]
fn thousand_unitaries_preserve_norm() {
    let mut r = rng(7);
    let mut psi = random_state(4, "S", &mut r);
    for _ in 0..1000 {
        psi = apply_unitary(&random_unitary(4, &mut r), &psi).unwrap();
    }
    assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn born_frequencies_match_weights() {
    let psi = StateVector::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), "S").unwrap();
    let n = 10_000u64;
    let ups = (0..n)
        .filter(|&s| measure(&psi, 0, &Operator::spin_z(), s).unwrap().outcome_index == 0)
        .count();
    let freq = ups as f64 / n as f64;
    assert!((freq - 0.36).abs() < 5.0 / (n as f64).sqrt(), "frequency {freq}");
}
