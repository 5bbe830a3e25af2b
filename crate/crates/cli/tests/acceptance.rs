//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qrel_cli::verify::electron_speed;
use qrel_core::hilbert::{random_state, StateVector};
use qrel_core::measurement::{wigner_chain, Outcome};
use qrel_core::nested::{chain_diffusion_fit, nested_norm, FrameChain};
use qrel_core::relations::{detect_intransitivity, reciprocal_superposition};
use qrel_core::transforms::{
    delta_factor, dilate_length, frame_swap_debroglie, gamma_factor, quantum_interval, QuantumInterval,
    TransformParams, ELECTRON_MASS, HBAR,
};
use qrel_core::wavepacket::{
    double_slit, evolve_free, frame_swapped_run, gaussian_width, init_gaussian, Grid1D, SlitConfig,
};
use qrel_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))?;
    Ok(elapsed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn intransitivity() -> Verdict {
    let start = Instant::now();
    // |c_up|² from 1e-11 to 1 − 1e-11, phases spread over the circle
    let weights: Vec<f64> = std::iter::once(1e-11)
        .chain((1..19).map(|i| i as f64 / 19.0))
        .chain(std::iter::once(1.0 - 1e-11))
        .collect();
    for (i, &p) in weights.iter().enumerate() {
        let phase = 2.0 * PI * i as f64 / weights.len() as f64;
        let s0 = StateVector::qubit(
            Complex64::new(p.sqrt(), 0.0),
            Complex64::from_polar((1.0 - p).sqrt(), phase),
            "S",
        )
        .map_err(e)?;
        let chain = wigner_chain(&s0, i as u64).map_err(e)?;
        ensure(!chain.comparison.same, || format!("grid point {i}: descriptions coincide"))?;
        ensure(chain.e_view.outcome == Outcome::Unresolved, || format!("grid point {i}: E view resolved"))?;
        ensure(matches!(chain.sa_view.outcome, Outcome::Resolved(_)), || format!("grid point {i}: SA view unresolved"))?;
        let witness = detect_intransitivity(&chain.induced_graph());
        let expected = vec![("A".to_string(), "E".to_string()), ("E".to_string(), "A".to_string())];
        ensure(witness == expected, || format!("grid point {i}: witness {witness:?}"))?;
    }
    let t = within_time(start, Duration::from_secs(1), "coefficient grid")?;
    Ok(format!("{} grid points distinct, witness {{EQA, AQE}} found ({t:.2?})", weights.len()))
}

fn reciprocity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let forward = random_state(2, "S", &mut rng);
        let pair = reciprocal_superposition(&forward, "A").map_err(e)?;
        let (f, b) = (forward.amplitudes(), pair.backward.amplitudes());
        worst = worst
            .max((f[0].norm_sqr() - b[0].norm_sqr()).abs())
            .max((f[1].norm_sqr() - b[1].norm_sqr()).abs());
        let twice = reciprocal_superposition(&pair.backward, "S").map_err(e)?;
        for (x, y) in twice.backward.amplitudes().iter().zip(f) {
            worst = worst.max((x.norm() - y.norm()).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max modulus mismatch {worst:e} > 1e-12"))?;
    Ok(format!("1000 states, max modulus mismatch {worst:e}"))
}

fn dilation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let [m1, m2, m3] = [(); 3].map(|_| log_uniform(&mut rng, 1e-31, 1e3));
        let dx = rng.random_range(1e-9..1e3);
        let there = dilate_length(dx, m1, m2).map_err(e)?;
        let back = dilate_length(there, m2, m1).map_err(e)?;
        let chained = dilate_length(there, m2, m3).map_err(e)?;
        let direct = dilate_length(dx, m1, m3).map_err(e)?;
        worst = worst.max((back - dx).abs() / dx).max((chained - direct).abs() / direct);
    }
    ensure(worst <= 1e-12, || format!("max relative error {worst:e} > 1e-12"))?;
    Ok(format!("1000 mass triples, max relative error {worst:e}"))
}

fn debroglie() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let swap = frame_swap_debroglie(
            log_uniform(&mut rng, 1e-31, 1e3),
            log_uniform(&mut rng, 1e-31, 1e3),
            log_uniform(&mut rng, 1e-3, 1e8),
        )
        .map_err(e)?;
        worst = worst
            .max((swap.product_forward - HBAR).abs() / HBAR)
            .max((swap.product_backward - HBAR).abs() / HBAR);
    }
    ensure(worst <= 1e-9, || format!("product error {worst:e} > 1e-9"))?;

    let grid = Grid1D::centered(1e-6 / 8.0, 4096).map_err(e)?;
    let cfg = SlitConfig::new(100e-6, 10e-6, 1.0, electron_speed(1e-6)).map_err(e)?;
    let mut spacing_errors = Vec::new();
    for ratio in [1.0, 1e2, 1e4] {
        let r = frame_swapped_run(&cfg, ELECTRON_MASS, ELECTRON_MASS * ratio, grid).map_err(e)?;
        let expected = r.lab_spacing * (1.0 / ratio).sqrt();
        let err = (r.swapped_spacing - expected).abs() / expected;
        ensure(err < 0.02, || format!("ratio {ratio:e}: spacing error {err:e}"))?;
        for product in [r.lab_debroglie_product, r.swapped_debroglie_product] {
            ensure((product - HBAR).abs() / HBAR <= 1e-9, || format!("ratio {ratio:e}: product {product:e}"))?;
        }
        spacing_errors.push(err);
    }
    let t = within_time(start, Duration::from_secs(60), "de Broglie criterion")?;
    let max_spacing = spacing_errors.iter().cloned().fold(0.0, f64::max);
    Ok(format!(
        "1000 swaps, max product error {worst:e}; fringe ratios {{1, 1e2, 1e4}} max error {max_spacing:e} ({t:.2?})"
    ))
}

fn interval_and_factors() -> Verdict {
    let nu = quantum_interval(&QuantumInterval::new(3.0, 5.0, 1.0).map_err(e)?);
    ensure(nu == 5.0, || format!("ν(3, 5, 1) = {nu}, expected 5"))?;
    let mut worst: f64 = 0.0;
    for i in 0..=990 {
        let x = i as f64 / 1000.0;
        let delta = delta_factor(&TransformParams::with_action(1.0, 1.0, x, 1.0, 1.0).map_err(e)?).map_err(e)?;
        let gamma = gamma_factor(x, 1.0).map_err(e)?;
        worst = worst.max((delta - gamma).abs());
    }
    ensure(worst <= 1e-12, || format!("|δ − γ| = {worst:e} > 1e-12"))?;
    for x in [1.0, -1.0, 1.5] {
        let d = delta_factor(&TransformParams::with_action(1.0, 1.0, x, 1.0, 1.0).map_err(e)?);
        ensure(matches!(d, Err(Error::Singular { .. })), || format!("δ at {x} returned {d:?}"))?;
        let g = gamma_factor(x * 3e8, 3e8);
        ensure(matches!(g, Err(Error::Singular { .. })), || format!("γ at {x} returned {g:?}"))?;
    }
    Ok(format!("ν = 5 exactly, max |δ − γ| on [0, 0.99] {worst:e}, singular inputs rejected"))
}

fn schroedinger() -> Verdict {
    let grid = Grid1D::new(-64.0, 64.0, 1024).map_err(e)?;
    let start = Instant::now();
    // ℏt/(2mσ0²) = 1 at t = 2 with ℏ = m = σ0 = 1
    let p = init_gaussian(grid, 0.0, 1.0, 0.0, 1.0, 1.0).map_err(e)?;
    let spread = evolve_free(&p, 5e-3, 400).map_err(e)?;
    let ratio = spread.position_std() / p.position_std();
    let oracle = gaussian_width(1.0, 1.0, 1.0, 2.0);
    let spread_err = (spread.position_std() - oracle).abs() / oracle;
    ensure(spread_err < 5e-3, || format!("σ(t)/σ0 = {ratio}, error {spread_err:e}"))?;
    within_time(start, Duration::from_secs(10), "spreading scenario")?;

    let start = Instant::now();
    let moving = init_gaussian(grid, -10.0, 2.0, 0.8, 1.0, 1.0).map_err(e)?;
    let out = evolve_free(&moving, 1e-3, 10_000).map_err(e)?;
    let drift = (out.norm_sqr() - moving.norm_sqr()).abs();
    ensure(drift < 1e-10, || format!("norm drift {drift:e} over 10⁴ steps"))?;
    within_time(start, Duration::from_secs(10), "norm scenario")?;

    let start = Instant::now();
    let slit_grid = Grid1D::centered(1e-6 / 8.0, 1 << 12).map_err(e)?;
    let cfg = SlitConfig::new(100e-6, 10e-6, 1.0, electron_speed(1e-6)).map_err(e)?;
    let spacing = double_slit(&cfg, ELECTRON_MASS, slit_grid).map_err(e)?.fringe_spacing().map_err(e)?;
    let fringe_oracle = 1e-6 * 1.0 / 100e-6;
    let fringe_err = (spacing - fringe_oracle).abs() / fringe_oracle;
    ensure(fringe_err < 0.02, || format!("fringe {spacing:e} m vs {fringe_oracle:e} m"))?;
    let t = within_time(start, Duration::from_secs(10), "double-slit scenario")?;
    Ok(format!(
        "σ(t)/σ0 = {ratio:.6} (error {spread_err:.1e}), norm drift {drift:.1e}, fringe {spacing:.6e} m vs {fringe_oracle:e} m ({t:.2?})"
    ))
}

fn nested() -> Verdict {
    let grid = Grid1D::new(-64.0, 64.0, 1024).map_err(e)?;
    let pair = init_gaussian(grid, 1.0, 2.0, 1.3, 1.0, 1.0).map_err(e)?;
    let n2 = nested_norm(&FrameChain::from_packets(vec![pair.clone()]).map_err(e)?);
    ensure((n2 - 1.0).abs() < 1e-10, || format!("n = 2 nested norm {n2}"))?;

    let sigma = 2.0;
    let inner = init_gaussian(grid, 0.0, sigma, 2.0 / sigma, 1.0, 1.0).map_err(e)?;
    let n3 = nested_norm(&FrameChain::from_packets(vec![inner, pair.clone()]).map_err(e)?);
    ensure((n3 - 1.0).abs() > 0.01, || format!("n = 3 nested norm {n3} within 0.01 of 1"))?;

    let fit = chain_diffusion_fit(&FrameChain::from_packets(vec![pair]).map_err(e)?, 1e-3, 20).map_err(e)?;
    let expected = Complex64::new(0.0, 0.5);
    let fit_err = (fit.k() - expected).norm() / expected.norm();
    ensure(fit_err < 1e-4, || format!("fitted k = {} (error {fit_err:e})", fit.k()))?;
    Ok(format!(
        "n=2 norm {n2:.12}, n=3 (k0σ0 = 2) norm {n3:e}, fitted k = {:.3e}{:+.9}i (error {fit_err:.1e})",
        fit.k_re, fit.k_im
    ))
}

fn determinism() -> Verdict {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut configs: Vec<_> = fs::read_dir(&scenarios)
        .map_err(e)?
        .filter_map(|entry| entry.ok().map(|x| x.path()))
        .filter(|p| p.file_name().is_some_and(|n| n != "sweep.json"))
        .collect();
    configs.sort();
    let dirs = [tempfile::tempdir().map_err(e)?, tempfile::tempdir().map_err(e)?];
    for cfg in &configs {
        for dir in &dirs {
            let out = Command::new(env!("CARGO_BIN_EXE_qrel"))
                .args(["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
                .output()
                .map_err(e)?;
            ensure(out.status.success(), || {
                format!("{} failed: {}", cfg.display(), String::from_utf8_lossy(&out.stderr))
            })?;
        }
    }
    let mut files = 0;
    for entry in fs::read_dir(dirs[0].path()).map_err(e)? {
        let path = entry.map_err(e)?.path();
        let twin = dirs[1].path().join(path.file_name().unwrap());
        ensure(fs::read(&path).map_err(e)? == fs::read(&twin).map_err(e)?, || {
            format!("{} differs between runs", path.display())
        })?;
        files += 1;
    }
    ensure(files == configs.len(), || format!("{files} outputs for {} configs", configs.len()))?;
    Ok(format!("{files} scenario kinds rerun, outputs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("intransitivity mechanized", intransitivity),
        ("reciprocity", reciprocity),
        ("dilation round trip", dilation),
        ("de Broglie invariance", debroglie),
        ("interval and factors", interval_and_factors),
        ("Schrödinger fidelity", schroedinger),
        ("nested frames", nested),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
