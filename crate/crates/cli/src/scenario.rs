//! Declarative scenarios: one JSON file, one run, one output file.
//!
//! ```json
//! {"kind": "double_slit", "seed": 0, "output_path": "pattern.csv", "params": {...}}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qrel_core::hilbert::StateVector;
use qrel_core::measurement::{premeasure, rewrite_basis_paradox, wigner_chain, Branch};
use qrel_core::nested::{
    chain_diffusion_fit, constraint_residual, nested_norm, FrameChain,
};
use qrel_core::relations::{check_equivalence, detect_intransitivity, FrameGraph};
use qrel_core::wavepacket::{double_slit, fraunhofer_spacing, frame_swapped_run, init_gaussian, Grid1D, SlitConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::output::{to_json, write_output};
use crate::table::{transform_table, TableRequest};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    WignerChain,
    BasisParadox,
    DoubleSlit,
    FrameSwap,
    ChainFit,
    RelationCheck,
    TransformTable,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::WignerChain => "wigner_chain",
            ScenarioKind::BasisParadox => "basis_paradox",
            ScenarioKind::DoubleSlit => "double_slit",
            ScenarioKind::FrameSwap => "frame_swap",
            ScenarioKind::ChainFit => "chain_fit",
            ScenarioKind::RelationCheck => "relation_check",
            ScenarioKind::TransformTable => "transform_table",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    pub output_path: PathBuf,
    pub params: Value,
}

/// Two-level amplitudes as `[re, im]` pairs.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitParams {
    pub c_up: [f64; 2],
    pub c_down: [f64; 2],
}

impl QubitParams {
    fn state(&self) -> CliResult<StateVector> {
        let c1 = Complex64::new(self.c_up[0], self.c_up[1]);
        let c2 = Complex64::new(self.c_down[0], self.c_down[1]);
        let s = StateVector::qubit(c1, c2, "S")?;
        s.ensure_normalized()
            .map_err(|_| CliError::Config(format!("params: |c_up|² + |c_down|² = {} ≠ 1", s.norm_sqr())))?;
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSlitParams {
    pub slit: SlitConfig,
    pub mass: f64,
    pub grid: Grid1D,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSwapParams {
    pub slit: SlitConfig,
    pub m_s: f64,
    pub m_a: f64,
    pub grid: Grid1D,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInit {
    pub x0: f64,
    pub sigma0: f64,
    pub k0: f64,
}

fn unit() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_steps() -> usize {
    20
}

/// Chain in natural units unless `hbar` is given.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFitParams {
    pub masses: Vec<f64>,
    pub pair_init: Vec<PairInit>,
    pub grid: Grid1D,
    #[serde(default = "unit")]
    pub hbar: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

/// Rendered output of a scenario, not yet written.
#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub kind: ScenarioKind,
    pub contents: String,
    /// Key metric for the summary line.
    pub metric: String,
}

/// Reads and validates a scenario file. Parse errors carry line and column.
pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn parse_params<T: DeserializeOwned>(kind: ScenarioKind, params: &Value) -> CliResult<T> {
    T::deserialize(params).map_err(|e| CliError::Config(format!("params for {}: {e}", kind.name())))
}

/// Runs the scenario in memory.
pub fn render(scenario: &Scenario) -> CliResult<Rendered> {
    let kind = scenario.kind;
    let seed = scenario.seed;
    let (contents, metric) = match kind {
        ScenarioKind::WignerChain => render_wigner(parse_params(kind, &scenario.params)?, seed)?,
        ScenarioKind::BasisParadox => render_basis(parse_params(kind, &scenario.params)?, seed)?,
        ScenarioKind::DoubleSlit => render_double_slit(parse_params(kind, &scenario.params)?)?,
        ScenarioKind::FrameSwap => render_frame_swap(parse_params(kind, &scenario.params)?, seed)?,
        ScenarioKind::ChainFit => render_chain_fit(parse_params(kind, &scenario.params)?, seed)?,
        ScenarioKind::RelationCheck => render_relations(parse_params(kind, &scenario.params)?, seed)?,
        ScenarioKind::TransformTable => {
            let request: TableRequest = parse_params(kind, &scenario.params)?;
            let table = transform_table(&request)?;
            let metric = format!("rows={}", table.pairs.len() + table.energies.len());
            (to_json(&table)?, metric)
        }
    };
    Ok(Rendered { kind, contents, metric })
}

/// Runs the scenario and writes its output under `out_dir` (if given).
/// Returns the one-line summary.
pub fn run(scenario: &Scenario, out_dir: Option<&Path>) -> CliResult<String> {
    let rendered = render(scenario)?;
    let path = match out_dir {
        Some(dir) => dir.join(&scenario.output_path),
        None => scenario.output_path.clone(),
    };
    write_output(&path, rendered.contents.as_bytes())?;
    Ok(format!("{} {} -> {}", rendered.kind.name(), rendered.metric, path.display()))
}

fn render_wigner(p: QubitParams, seed: u64) -> CliResult<(String, String)> {
    let chain = wigner_chain(&p.state()?, seed)?;
    let witness = detect_intransitivity(&chain.induced_graph());
    let record = |r: &qrel_core::measurement::MeasurementRecord| -> CliResult<Value> {
        Ok(json!({
            "observer": r.observer,
            "observed": r.observed,
            "time": r.time,
            "outcome": serde_json::to_value(r.outcome).map_err(|e| CliError::Io(e.to_string()))?,
            "pointer_weights": r.state.pointer_weights()?,
        }))
    };
    let report = json!({
        "kind": "wigner_chain",
        "seed": seed,
        "sa_view": record(&chain.sa_view)?,
        "e_view": record(&chain.e_view)?,
        "descriptions_agree": chain.comparison.same,
        "outcomes_agree": chain.comparison.outcomes_agree,
        "max_density_difference": chain.comparison.max_density_difference,
        "intransitive_pairs": witness,
    });
    let metric = format!(
        "descriptions_agree={} intransitive_pairs={}",
        chain.comparison.same,
        witness.len()
    );
    Ok((to_json(&report)?, metric))
}

fn branch_json(b: &Branch) -> Value {
    json!({
        "system": b.system,
        "coefficient": b.coefficient,
        "apparatus": b.apparatus.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
    })
}

fn render_basis(p: QubitParams, seed: u64) -> CliResult<(String, String)> {
    let psi_t = premeasure(&p.state()?, 3)?;
    let rw = rewrite_basis_paradox(&psi_t)?;
    let report = json!({
        "kind": "basis_paradox",
        "seed": seed,
        "pointer_terms": rw.pointer_terms.iter().map(branch_json).collect::<Vec<_>>(),
        "rotated_terms": rw.rotated_terms.iter().map(branch_json).collect::<Vec<_>>(),
        "rotated_overlap": rw.rotated_overlap,
    });
    Ok((to_json(&report)?, format!("rotated_overlap={:.6e}", rw.rotated_overlap)))
}

fn render_double_slit(p: DoubleSlitParams) -> CliResult<(String, String)> {
    let pattern = double_slit(&p.slit, p.mass, p.grid)?;
    let spacing = pattern.fringe_spacing()?;
    let oracle = fraunhofer_spacing(&p.slit, p.mass, qrel_core::transforms::HBAR)?;
    let metric = format!("fringe_spacing={spacing:.6e} m (fraunhofer {oracle:.6e} m)");
    Ok((pattern.to_csv(), metric))
}

fn render_frame_swap(p: FrameSwapParams, seed: u64) -> CliResult<(String, String)> {
    let r = frame_swapped_run(&p.slit, p.m_s, p.m_a, p.grid)?;
    let report = json!({
        "kind": "frame_swap",
        "seed": seed,
        "m_s": r.m_s,
        "m_a": r.m_a,
        "dilation_factor": r.dilation_factor,
        "lab_spacing": r.lab_spacing,
        "swapped_spacing": r.swapped_spacing,
        "expected_swapped_spacing": r.expected_swapped_spacing,
        "spacing_relative_error": r.spacing_relative_error,
        "lab_debroglie_product": r.lab_debroglie_product,
        "swapped_debroglie_product": r.swapped_debroglie_product,
        "swapped_reduced_wavelength": r.swapped_reduced_wavelength,
        "undilated_reduced_wavelength": r.undilated_reduced_wavelength,
    });
    let metric = format!(
        "spacing_ratio={:.6e} (dilation {:.6e})",
        r.swapped_spacing / r.lab_spacing,
        r.dilation_factor
    );
    Ok((to_json(&report)?, metric))
}

fn render_chain_fit(p: ChainFitParams, seed: u64) -> CliResult<(String, String)> {
    if p.masses.is_empty() {
        return Err(CliError::Config("params for chain_fit: `masses` must not be empty".into()));
    }
    if p.masses.len() != p.pair_init.len() {
        return Err(CliError::Config(format!(
            "params for chain_fit: {} masses but {} pair_init entries",
            p.masses.len(),
            p.pair_init.len()
        )));
    }
    let packets = p
        .masses
        .iter()
        .zip(&p.pair_init)
        .map(|(&m, init)| init_gaussian(p.grid, init.x0, init.sigma0, init.k0, m, p.hbar))
        .collect::<qrel_core::Result<Vec<_>>>()?;
    let chain = FrameChain::from_packets(packets)?;
    let fit = chain_diffusion_fit(&chain, p.dt, p.steps)?;
    let inverse_mass: f64 = p.masses.iter().map(|m| 1.0 / m).sum();
    let report = json!({
        "kind": "chain_fit",
        "seed": seed,
        "k_re": fit.k_re,
        "k_im": fit.k_im,
        "residual": fit.residual,
        "expected_k_im": p.hbar * inverse_mass / 2.0,
        "nested_norm": nested_norm(&chain),
        "constraint_residual": constraint_residual(&chain, p.dt)?,
    });
    let metric = format!("k=({:.6e}, {:.6e}) residual={:.3e}", fit.k_re, fit.k_im, fit.residual);
    Ok((to_json(&report)?, metric))
}

fn render_relations(g: FrameGraph, seed: u64) -> CliResult<(String, String)> {
    let violations = check_equivalence(&g);
    let witness = detect_intransitivity(&g);
    let report = json!({
        "kind": "relation_check",
        "seed": seed,
        "is_equivalence": violations.is_empty(),
        "violations": violations,
        "intransitive_pairs": witness,
    });
    let metric = format!("violations={} intransitive_pairs={}", violations.len(), witness.len());
    Ok((to_json(&report)?, metric))
}
