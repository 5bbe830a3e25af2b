//! Cross-module invariant suite behind `qrel verify`.
//!
//! Every check reduces to one observed number compared against a tolerance;
//! a check passes when `observed <= tolerance`. Randomized checks draw from
//! fixed seeds, so the suite is deterministic.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use qrel_core::hilbert::{
    apply_unitary, change_basis, measure, outcome_probabilities, random_state, random_unitary, reduced_state,
    tensor_product, DensityMatrix, Operator, StateVector,
};
use qrel_core::measurement::{dephase, premeasure, project_chain, rewrite_basis_paradox};
use qrel_core::nested::{chain_diffusion_fit, compose_packets, evolve_chain, nested_norm, FrameChain};
use qrel_core::relations::{check_equivalence, detect_intransitivity, reciprocal_superposition, FrameGraph, FrameId};
use qrel_core::transforms::{
    delta_factor, dilate_length, flat_5_interval, frame_swap_debroglie, gamma_factor, quantum_interval,
    FiveDisplacement, QuantumInterval, TransformParams, ELECTRON_MASS, HBAR,
};
use qrel_core::wavepacket::{
    double_slit, evolve_free, frame_swapped_run, gaussian_width, init_gaussian, Grid1D, SlitConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::output::format_float;
use crate::scenario::{render, Scenario, ScenarioKind};

/// Tolerance per invariant. Count-valued checks use 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub no_signaling: f64,
    pub exact_count: f64,
    pub partial_trace: f64,
    pub pointer_correlation: f64,
    pub rewrite_overlap: f64,
    /// Allowed `|f − p|·√N`.
    pub born_sigmas: f64,
    pub dephase_positivity: f64,
    pub reciprocity: f64,
    pub dilation: f64,
    pub debroglie: f64,
    pub interval_symmetry: f64,
    pub delta_gamma: f64,
    pub triangle: f64,
    pub packet_norm: f64,
    pub packet_energy: f64,
    pub time_reversal: f64,
    pub spreading: f64,
    pub fringe: f64,
    pub nested_axiom: f64,
    pub composition: f64,
    pub diffusion_fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            no_signaling: 1e-12,
            exact_count: 0.0,
            partial_trace: 1e-12,
            pointer_correlation: 1e-12,
            rewrite_overlap: 1e-12,
            born_sigmas: 5.0,
            dephase_positivity: 1e-12,
            reciprocity: 1e-12,
            dilation: 1e-12,
            debroglie: 1e-9,
            interval_symmetry: 1e-12,
            delta_gamma: 1e-12,
            triangle: 1e-12,
            packet_norm: 1e-10,
            packet_energy: 1e-10,
            time_reversal: 1e-10,
            spreading: 5e-3,
            fringe: 0.02,
            nested_axiom: 1e-10,
            composition: 5e-3,
            diffusion_fit: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match &self.error {
            Some(e) => format!("{status} {} error: {e}", self.name),
            None => format!("{status} {} observed={:e} tol={:e}", self.name, self.observed, self.tolerance),
        }
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<f64, String>;

fn checks(t: &Tolerances) -> Vec<(&'static str, f64, Check)> {
    vec![
        ("hilbert.norm_preservation", t.norm, norm_preservation),
        ("hilbert.basis_change_no_signaling", t.no_signaling, no_signaling),
        ("hilbert.repeated_measurement", t.exact_count, repeated_measurement),
        ("hilbert.partial_trace_of_product", t.partial_trace, partial_trace),
        ("measurement.chain_correlation", t.pointer_correlation, chain_correlation),
        ("measurement.basis_rewrite_overlap", t.rewrite_overlap, rewrite_overlap),
        ("measurement.born_frequencies", t.born_sigmas, born_frequencies),
        ("measurement.dephase_positivity", t.dephase_positivity, dephase_positivity),
        ("relations.closure_is_equivalence", t.exact_count, closure_is_equivalence),
        ("relations.intransitivity_brute_force", t.exact_count, intransitivity_brute_force),
        ("relations.reciprocity_involution", t.reciprocity, reciprocity_involution),
        ("relations.backward_collapse_branch", t.exact_count, backward_collapse),
        ("transforms.dilation_round_trip", t.dilation, dilation_round_trip),
        ("transforms.debroglie_products", t.debroglie, debroglie_products),
        ("transforms.interval_symmetry", t.interval_symmetry, interval_symmetry),
        ("transforms.delta_gamma_identity", t.delta_gamma, delta_gamma),
        ("transforms.five_interval_triangle", t.triangle, five_triangle),
        ("wavepacket.norm_conservation", t.packet_norm, packet_norm),
        ("wavepacket.energy_conservation", t.packet_energy, packet_energy),
        ("wavepacket.time_reversal", t.time_reversal, time_reversal),
        ("wavepacket.gaussian_spreading", t.spreading, gaussian_spreading),
        ("wavepacket.fringe_law_sweep", t.fringe, fringe_sweep),
        ("wavepacket.frame_swap_products", t.debroglie, frame_swap_products),
        ("wavepacket.frame_swap_spacing", t.fringe, frame_swap_spacing),
        ("nested.pair_norm_conservation", t.packet_norm, chain_norms),
        ("nested.two_frame_axiom", t.nested_axiom, nested_axiom),
        ("nested.gaussian_composition", t.composition, gaussian_composition),
        ("nested.diffusion_fit_reduction", t.diffusion_fit, diffusion_fit),
        ("cli.determinism", t.exact_count, determinism),
        ("cli.float_round_trip", t.exact_count, float_round_trip),
    ]
}

/// Runs every invariant. Seeds are fixed per check.
pub fn run_suite(tolerances: &Tolerances) -> Vec<CheckResult> {
    checks(tolerances)
        .into_iter()
        .enumerate()
        .map(|(i, (name, tolerance, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i as u64);
            match check(&mut rng) {
                Ok(observed) => CheckResult {
                    name,
                    observed,
                    tolerance,
                    passed: observed <= tolerance,
                    error: None,
                },
                Err(e) => CheckResult {
                    name,
                    observed: f64::NAN,
                    tolerance,
                    passed: false,
                    error: Some(e),
                },
            }
        })
        .collect()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

const CASES: usize = 200;

fn random_observable(dim: usize, rng: &mut ChaCha8Rng) -> Result<Operator, String> {
    let u = random_unitary(dim, rng);
    let values: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    u.mul(&Operator::diagonal(&values)).map_err(e)?.mul(&u.adjoint()).map_err(e)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn norm_preservation(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut psi = random_state(4, "S", rng);
    for _ in 0..1000 {
        psi = apply_unitary(&random_unitary(4, rng), &psi).map_err(e)?;
    }
    Ok((psi.norm_sqr() - 1.0).abs())
}

fn no_signaling(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let (d1, d2) = (rng.random_range(2..4), rng.random_range(2..4));
        let joint = random_state(d1 * d2, "SA", rng);
        let psi = StateVector::new(joint.amplitudes().to_vec(), vec![d1, d2], vec!["S".into(), "A".into()])
            .map_err(e)?;
        let rotated = change_basis(&psi, 1, &random_unitary(d2, rng)).map_err(e)?;
        let obs = random_observable(d1, rng)?;
        let before = outcome_probabilities(&psi, 0, &obs).map_err(e)?;
        let after = outcome_probabilities(&rotated, 0, &obs).map_err(e)?;
        for (b, a) in before.iter().zip(&after) {
            worst = worst.max((b.1 - a.1).abs());
        }
    }
    Ok(worst)
}

fn repeated_measurement(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut mismatches = 0;
    for _ in 0..CASES {
        let dim = rng.random_range(2..5);
        let psi = random_state(dim, "S", rng);
        let obs = random_observable(dim, rng)?;
        let first = measure(&psi, 0, &obs, rng.random()).map_err(e)?;
        let second = measure(&first.collapsed, 0, &obs, rng.random()).map_err(e)?;
        if second.outcome_index != first.outcome_index {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64)
}

fn partial_trace(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let a = random_state(rng.random_range(2..4), "S", rng);
        let b = random_state(rng.random_range(2..4), "A", rng);
        let rho = reduced_state(&tensor_product(&a, &b).map_err(e)?, &[0]).map_err(e)?;
        worst = worst.max((rho.entries() - DensityMatrix::from_pure(&a).entries()).camax());
    }
    Ok(worst)
}

fn chain_correlation(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let psi_t = premeasure(&random_state(2, "S", rng), 3).map_err(e)?;
        let p = project_chain(&psi_t, rng.random()).map_err(e)?;
        let kept = if p.branch == 0 { 1 } else { 5 };
        for (i, a) in p.state.amplitudes().iter().enumerate() {
            if i != kept {
                worst = worst.max(a.norm_sqr());
            }
        }
    }
    Ok(worst)
}

fn rewrite_overlap(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let psi_t = premeasure(&random_state(2, "S", rng), 3).map_err(e)?;
        let rw = rewrite_basis_paradox(&psi_t).map_err(e)?;
        let back = change_basis(&rw.rewritten, 0, &Operator::hadamard().adjoint()).map_err(e)?;
        worst = worst.max((1.0 - psi_t.overlap(&back).map_err(e)?).abs());
    }
    Ok(worst)
}

fn born_frequencies(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let psi = StateVector::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), "S").map_err(e)?;
    let n = 10_000u64;
    let mut ups = 0u64;
    for seed in 0..n {
        if measure(&psi, 0, &Operator::spin_z(), seed).map_err(e)?.outcome_index == 0 {
            ups += 1;
        }
    }
    let freq = ups as f64 / n as f64;
    Ok((freq - 0.36).abs() * (n as f64).sqrt())
}

fn dephase_positivity(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let dim = rng.random_range(2..5);
        let a = DensityMatrix::from_pure(&random_state(dim, "S", rng));
        let b = DensityMatrix::from_pure(&random_state(dim, "S", rng));
        let w: f64 = rng.random();
        let mixed = DensityMatrix::new(a.entries() * Complex64::new(w, 0.0) + b.entries() * Complex64::new(1.0 - w, 0.0))
            .map_err(e)?;
        let out = dephase(&mixed, &random_observable(dim, rng)?, rng.random()).map_err(e)?;
        let min_eig = out.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.max((-min_eig).max(0.0)).max((out.trace() - 1.0).abs());
    }
    Ok(worst)
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let count = rng.random_range(0..=(n * n).min(40));
    (0..count).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
}

fn name(i: usize) -> String {
    format!("F{i:02}")
}

fn graph(n: usize, q: &[(usize, usize)], phys: &[(usize, usize)]) -> Result<FrameGraph, String> {
    let named = |edges: &[(usize, usize)]| edges.iter().map(|&(a, b)| (name(a), name(b))).collect::<Vec<_>>();
    FrameGraph::new((0..n).map(|i| FrameId::new(name(i))).collect(), named(q), named(phys)).map_err(e)
}

fn closure_is_equivalence(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut failures = 0;
    for _ in 0..CASES {
        let n = rng.random_range(1..=12);
        let phys = random_edges(rng, n);
        let g = graph(n, &[], &phys)?.with_equivalence_closure();
        failures += check_equivalence(&g).len();
    }
    Ok(failures as f64)
}

fn intransitivity_brute_force(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut mismatches = 0;
    for _ in 0..CASES {
        let n = rng.random_range(1..=12);
        let q = random_edges(rng, n);
        let rel: BTreeSet<(usize, usize)> = q.iter().copied().collect();
        let mut expected = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if rel.contains(&(x, y)) && rel.contains(&(y, x)) && !rel.contains(&(x, x)) {
                    expected.push((name(x), name(y)));
                }
            }
        }
        if detect_intransitivity(&graph(n, &q, &[])?) != expected {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64)
}

fn reciprocity_involution(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let forward = random_state(rng.random_range(2..6), "S", rng);
        let pair = reciprocal_superposition(&forward, "A").map_err(e)?;
        let twice = reciprocal_superposition(&pair.backward, "S").map_err(e)?;
        worst = worst.max(pair.modulus_mismatch());
        for (a, b) in twice.backward.amplitudes().iter().zip(forward.amplitudes()) {
            worst = worst.max((a.norm() - b.norm()).abs());
        }
    }
    Ok(worst)
}

fn backward_collapse(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut mismatches = 0;
    for _ in 0..CASES {
        let s0 = random_state(2, "S", rng);
        let p = project_chain(&premeasure(&s0, 3).map_err(e)?, rng.random()).map_err(e)?;
        let pair = reciprocal_superposition(&s0, "A").map_err(e)?.collapse_on(p.branch).map_err(e)?;
        if (pair.backward.amplitudes()[p.branch].norm() - 1.0).abs() > 1e-12 {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64)
}

fn dilation_round_trip(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let [m1, m2, m3] = [(); 3].map(|_| log_uniform(rng, 1e-31, 1e3));
        let dx = rng.random_range(-1e3..1e3);
        let there = dilate_length(dx, m1, m2).map_err(e)?;
        let back = dilate_length(there, m2, m1).map_err(e)?;
        let chained = dilate_length(there, m2, m3).map_err(e)?;
        let direct = dilate_length(dx, m1, m3).map_err(e)?;
        worst = worst
            .max((back - dx).abs() / dx.abs())
            .max((chained - direct).abs() / direct.abs());
    }
    Ok(worst)
}

fn debroglie_products(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let swap = frame_swap_debroglie(
            log_uniform(rng, 1e-31, 1e3),
            log_uniform(rng, 1e-31, 1e3),
            log_uniform(rng, 1e-3, 1e8),
        )
        .map_err(e)?;
        worst = worst
            .max((swap.product_forward - HBAR).abs() / HBAR)
            .max((swap.product_backward - HBAR).abs() / HBAR);
    }
    Ok(worst)
}

fn interval_symmetry(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (dt, j1, j2) = (rng.random_range(-1e3..1e3), rng.random_range(1e-6..1e3), rng.random_range(1e-6..1e3));
        let nu = quantum_interval(&QuantumInterval::new(dt, j1, j2).map_err(e)?);
        let swapped = quantum_interval(&QuantumInterval::new(dt, j2, j1).map_err(e)?);
        let reversed = quantum_interval(&QuantumInterval::new(-dt, j1, j2).map_err(e)?);
        worst = worst.max((nu - swapped).abs() / nu).max((nu - reversed).abs() / nu);
    }
    Ok(worst)
}

fn delta_gamma(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for i in 0..=990 {
        let x = i as f64 / 1000.0;
        let delta = delta_factor(&TransformParams::with_action(1.0, 1.0, x, 1.0, 1.0).map_err(e)?).map_err(e)?;
        let gamma = gamma_factor(x, 1.0).map_err(e)?;
        worst = worst.max((delta - gamma).abs() / gamma);
    }
    Ok(worst)
}

fn five_triangle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1e3..1e3));
        let b: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1e3..1e3));
        let sum: [f64; 5] = std::array::from_fn(|i| a[i] + b[i]);
        let lhs = flat_5_interval(&FiveDisplacement::new(sum).map_err(e)?);
        let rhs = flat_5_interval(&FiveDisplacement::new(a).map_err(e)?)
            + flat_5_interval(&FiveDisplacement::new(b).map_err(e)?);
        worst = worst.max(((lhs - rhs) / rhs).max(0.0));
    }
    Ok(worst)
}

fn natural_grid() -> Result<Grid1D, String> {
    Grid1D::new(-64.0, 64.0, 1024).map_err(e)
}

fn packet_norm(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let p = init_gaussian(natural_grid()?, -10.0, 2.0, 0.8, 1.0, 1.0).map_err(e)?;
    let out = evolve_free(&p, 1e-3, 10_000).map_err(e)?;
    Ok((out.norm_sqr() - p.norm_sqr()).abs())
}

fn packet_energy(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let p = init_gaussian(natural_grid()?, -10.0, 2.0, 0.8, 1.0, 1.0).map_err(e)?;
    let out = evolve_free(&p, 1e-3, 10_000).map_err(e)?;
    let before = p.wavenumber_moment(2);
    Ok((out.wavenumber_moment(2) - before).abs() / before)
}

fn time_reversal(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let p = init_gaussian(natural_grid()?, 5.0, 1.5, -0.7, 2.0, 1.0).map_err(e)?;
    let back = evolve_free(&evolve_free(&p, 2e-3, 500).map_err(e)?, -2e-3, 500).map_err(e)?;
    Ok(back
        .amplitudes()
        .iter()
        .zip(p.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

fn gaussian_spreading(_: &mut ChaCha8Rng) -> Result<f64, String> {
    // ℏt/(2mσ0²) = 1 at t = 2 with ℏ = m = σ0 = 1
    let p = init_gaussian(natural_grid()?, 0.0, 1.0, 0.0, 1.0, 1.0).map_err(e)?;
    let out = evolve_free(&p, 5e-3, 400).map_err(e)?;
    let oracle = gaussian_width(1.0, 1.0, 1.0, 2.0);
    Ok((out.position_std() - oracle).abs() / oracle)
}

pub fn electron_speed(lambda: f64) -> f64 {
    2.0 * PI * HBAR / (ELECTRON_MASS * lambda)
}

fn fringe_sweep(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let grid = Grid1D::centered(0.5e-6 / 8.0, 4096).map_err(e)?;
    let mut worst: f64 = 0.0;
    for d in [50e-6, 100e-6, 200e-6] {
        for lambda in [0.5e-6, 1e-6, 2e-6] {
            let cfg = SlitConfig::new(d, d / 10.0, 1.0, electron_speed(lambda)).map_err(e)?;
            let spacing = double_slit(&cfg, ELECTRON_MASS, grid).map_err(e)?.fringe_spacing().map_err(e)?;
            let oracle = lambda / d;
            worst = worst.max((spacing - oracle).abs() / oracle);
        }
    }
    Ok(worst)
}

fn swap_runs() -> Result<Vec<qrel_core::wavepacket::FrameSwapReport>, String> {
    let grid = Grid1D::centered(1e-6 / 8.0, 4096).map_err(e)?;
    let cfg = SlitConfig::new(100e-6, 10e-6, 1.0, electron_speed(1e-6)).map_err(e)?;
    [1.0, 1e2, 1e4]
        .iter()
        .map(|r| frame_swapped_run(&cfg, ELECTRON_MASS, ELECTRON_MASS * r, grid).map_err(e))
        .collect()
}

fn frame_swap_products(_: &mut ChaCha8Rng) -> Result<f64, String> {
    Ok(swap_runs()?.iter().fold(0.0, |w, r| {
        w.max((r.lab_debroglie_product - HBAR).abs() / HBAR)
            .max((r.swapped_debroglie_product - HBAR).abs() / HBAR)
    }))
}

fn frame_swap_spacing(_: &mut ChaCha8Rng) -> Result<f64, String> {
    Ok(swap_runs()?.iter().fold(0.0, |w, r| w.max(r.spacing_relative_error)))
}

fn chain_norms(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let packets = [1.0, 0.25, 3.0]
        .iter()
        .enumerate()
        .map(|(i, &m)| init_gaussian(natural_grid()?, 2.0 * i as f64, 2.0, 0.3 * i as f64, m, 1.0).map_err(e))
        .collect::<Result<Vec<_>, _>>()?;
    let chain = FrameChain::from_packets(packets).map_err(e)?;
    let out = evolve_chain(&chain, 1e-3, 1000).map_err(e)?;
    Ok(chain
        .pair_packets()
        .iter()
        .zip(out.pair_packets())
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0, f64::max))
}

fn nested_axiom(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let p = init_gaussian(natural_grid()?, 1.0, 2.0, 1.3, 1.0, 1.0).map_err(e)?;
    Ok((nested_norm(&FrameChain::from_packets(vec![p]).map_err(e)?) - 1.0).abs())
}

fn gaussian_composition(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let (sa, sb) = (1.5, 2.5);
    let a = init_gaussian(natural_grid()?, 0.0, sa, 0.0, 1.0, 1.0).map_err(e)?;
    let b = init_gaussian(natural_grid()?, 0.0, sb, 0.0, 1.0, 1.0).map_err(e)?;
    let z = compose_packets(&[a, b]).map_err(e)?;
    let expected = (sa * sa + sb * sb).sqrt();
    Ok((z.packet().position_std() - expected).abs() / expected)
}

fn diffusion_fit(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let p = init_gaussian(natural_grid()?, 0.0, 2.0, 0.3, 1.0, 1.0).map_err(e)?;
    let fit = chain_diffusion_fit(&FrameChain::from_packets(vec![p]).map_err(e)?, 1e-3, 20).map_err(e)?;
    let expected = Complex64::new(0.0, 0.5);
    Ok((fit.k() - expected).norm() / expected.norm())
}

/// Scenarios used by the determinism check, one per kind.
pub fn sample_scenarios() -> Vec<Scenario> {
    let slit = json!({
        "slit_separation": 100e-6, "slit_width": 10e-6, "screen_distance": 1.0,
        "packet_speed": electron_speed(1e-6),
    });
    let slit_grid = json!({"x_min": -256e-6, "x_max": 256e-6, "n_points": 4096});
    let qubit = json!({"c_up": [0.6, 0.0], "c_down": [0.0, 0.8]});
    let make = |kind, params| Scenario {
        kind,
        seed: 17,
        output_path: "out".into(),
        params,
    };
    vec![
        make(ScenarioKind::WignerChain, qubit.clone()),
        make(ScenarioKind::BasisParadox, qubit),
        make(
            ScenarioKind::DoubleSlit,
            json!({"slit": slit, "mass": ELECTRON_MASS, "grid": slit_grid}),
        ),
        make(
            ScenarioKind::FrameSwap,
            json!({"slit": slit, "m_s": ELECTRON_MASS, "m_a": 100.0 * ELECTRON_MASS, "grid": slit_grid}),
        ),
        make(
            ScenarioKind::ChainFit,
            json!({
                "masses": [1.0, 1.0],
                "pair_init": [{"x0": 0.0, "sigma0": 2.0, "k0": 0.0}, {"x0": 1.0, "sigma0": 2.0, "k0": 0.5}],
                "grid": {"x_min": -64.0, "x_max": 64.0, "n_points": 1024},
            }),
        ),
        make(
            ScenarioKind::RelationCheck,
            json!({"frames": [{"name": "E"}, {"name": "A"}], "q_edges": [["E", "A"], ["A", "E"]]}),
        ),
        make(
            ScenarioKind::TransformTable,
            json!({"mass_pairs": [[1.0, 1.0], [1.0, 4.0]], "energies": [0.0, 0.6]}),
        ),
    ]
}

fn determinism(_: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut mismatches = 0;
    for s in sample_scenarios() {
        if render(&s).map_err(e)? != render(&s).map_err(e)? {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64)
}

fn float_round_trip(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut failures = 0;
    for _ in 0..CASES {
        let x = f64::from_bits(rng.random::<u64>());
        if !x.is_finite() {
            continue;
        }
        let csv: f64 = format_float(x).parse().map_err(e)?;
        let json: f64 = serde_json::from_str(&serde_json::to_string(&x).map_err(e)?).map_err(e)?;
        if csv.to_bits() != x.to_bits() || json.to_bits() != x.to_bits() {
            failures += 1;
        }
    }
    Ok(failures as f64)
}
