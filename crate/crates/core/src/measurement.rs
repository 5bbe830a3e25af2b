//! System–apparatus–environment measurement chains.
//!
//! The system S is a two-level register with pointer basis `|s↑⟩ = |0⟩`,
//! `|s↓⟩ = |1⟩`. The apparatus A has at least three orthogonal states:
//! `|A_0⟩ = |0⟩` (ready), `|A_{s↑}⟩ = |1⟩` and `|A_{s↓}⟩ = |2⟩`. Joint states
//! are ordered `S ⊗ A`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{
    apply_unitary, change_basis, measure, reduced_state, tensor_product, DensityMatrix, Operator, StateVector,
};
use crate::relations::{FrameGraph, FrameId};
use crate::transforms::PLANCK_TIME;

/// Pointer-basis weights above this count as populated.
pub const POINTER_WEIGHT_TOL: f64 = 1e-12;

/// Largest cross term between relative apparatus states still accepted as a
/// correlated (Schmidt-form) state.
pub const CORRELATION_TOL: f64 = 1e-9;

pub const APPARATUS_READY: usize = 0;
pub const APPARATUS_SAW_UP: usize = 1;
pub const APPARATUS_SAW_DOWN: usize = 2;

/// Permutation unitary taking `|↑⟩|A_0⟩ → |↑⟩|A_{s↑}⟩` and
/// `|↓⟩|A_0⟩ → |↓⟩|A_{s↓}⟩` (and back), identity elsewhere.
pub fn premeasurement_unitary(pointer_dim: usize) -> Result<Operator> {
    if pointer_dim < 3 {
        return Err(invalid(
            "pointer_dim",
            format!("apparatus needs at least 3 states, got {pointer_dim}"),
        ));
    }
    let n = 2 * pointer_dim;
    let idx = |s: usize, a: usize| s * pointer_dim + a;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(idx(0, APPARATUS_READY), idx(0, APPARATUS_SAW_UP));
    perm.swap(idx(1, APPARATUS_READY), idx(1, APPARATUS_SAW_DOWN));
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (col, &row) in perm.iter().enumerate() {
        m[(row, col)] = Complex64::new(1.0, 0.0);
    }
    Operator::new(m)
}

/// `c1|s↑⟩|A_{s↑}⟩ + c2|s↓⟩|A_{s↓}⟩` from `s0 = c1|s↑⟩ + c2|s↓⟩` and a ready
/// apparatus.
pub fn premeasure(s0: &StateVector, pointer_dim: usize) -> Result<StateVector> {
    if s0.dims() != [2] {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: s0.len(),
        });
    }
    let u = premeasurement_unitary(pointer_dim)?;
    let ready = StateVector::basis(pointer_dim, APPARATUS_READY, "A")?;
    let joint = tensor_product(s0, &ready)?;
    apply_unitary(&u, &joint)
}

/// One term `coefficient · |system⟩ ⊗ |apparatus⟩` of a two-term expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Name of the system basis vector.
    pub system: String,
    /// Norm of the (unnormalized) relative apparatus state.
    pub coefficient: f64,
    /// Normalized relative apparatus state; all zeros when `coefficient` is 0.
    pub apparatus: Vec<Complex64>,
}

/// The same joint state expanded in the pointer basis and in the rotated
/// `|s→⟩, |s←⟩` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisRewrite {
    /// Coefficients of the joint state in the `|s→⟩, |s←⟩` basis of S.
    pub rewritten: StateVector,
    pub pointer_terms: [Branch; 2],
    pub rotated_terms: [Branch; 2],
    /// `|⟨a→|a←⟩|` between the two rotated relative apparatus states.
    pub rotated_overlap: f64,
}

fn branches(psi: &StateVector, names: [&str; 2]) -> [Branch; 2] {
    let k = psi.dims()[1];
    let make = |s: usize| {
        let rel = &psi.amplitudes()[s * k..(s + 1) * k];
        let norm = rel.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let apparatus = if norm > 0.0 {
            rel.iter().map(|a| a / norm).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); k]
        };
        Branch {
            system: names[s].to_string(),
            coefficient: norm,
            apparatus,
        }
    };
    [make(0), make(1)]
}

fn ensure_system_apparatus(psi: &StateVector) -> Result<()> {
    if psi.dims().len() != 2 || psi.dims()[0] != 2 {
        return Err(invalid("state", "expected a joint S ⊗ A state with a two-level S"));
    }
    psi.ensure_normalized()
}

/// Rewrites an entangled `S ⊗ A` state with S expanded in `|s→⟩, |s←⟩`.
///
/// Physically nothing changes: the result is the same vector in other
/// coordinates, so every prediction for A alone is untouched. The report
/// exposes both expansions so the second, which pairs S with apparatus states
/// that do not correspond to any recorded outcome, can be inspected.
pub fn rewrite_basis_paradox(psi_t: &StateVector) -> Result<BasisRewrite> {
    ensure_system_apparatus(psi_t)?;
    let rewritten = change_basis(psi_t, 0, &Operator::hadamard())?;
    let pointer_terms = branches(psi_t, ["s_up", "s_down"]);
    let rotated_terms = branches(&rewritten, ["s_right", "s_left"]);
    let rotated_overlap = rotated_terms[0]
        .apparatus
        .iter()
        .zip(&rotated_terms[1].apparatus)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .norm();
    Ok(BasisRewrite {
        rewritten,
        pointer_terms,
        rotated_terms,
        rotated_overlap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Resolved(usize),
    Unresolved,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateDescription {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl StateDescription {
    /// Density matrix of the whole described system.
    pub fn density(&self) -> DensityMatrix {
        match self {
            StateDescription::Pure(s) => DensityMatrix::from_pure(s),
            StateDescription::Mixed(r) => r.clone(),
        }
    }

    /// Weights of the system's pointer states (first subsystem for pure
    /// descriptions, the diagonal for mixed ones).
    pub fn pointer_weights(&self) -> Result<Vec<f64>> {
        match self {
            StateDescription::Pure(s) => Ok(reduced_state(s, &[0])?.diagonal()),
            StateDescription::Mixed(r) => Ok(r.diagonal()),
        }
    }
}

/// How one frame describes another at one instant of its own time.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub observer: String,
    pub observed: String,
    /// Observer's local time, s.
    pub time: f64,
    pub outcome: Outcome,
    pub state: StateDescription,
}

impl MeasurementRecord {
    /// The outcome is derived from the state: unresolved exactly when two or
    /// more pointer weights exceed [`POINTER_WEIGHT_TOL`].
    pub fn new(observer: &str, observed: &str, time: f64, state: StateDescription) -> Result<Self> {
        let weights = state.pointer_weights()?;
        let populated: Vec<usize> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > POINTER_WEIGHT_TOL)
            .map(|(i, _)| i)
            .collect();
        let outcome = match populated.as_slice() {
            [only] => Outcome::Resolved(*only),
            [] => return Err(Error::NotNormalized(0.0)),
            _ => Outcome::Unresolved,
        };
        Ok(Self {
            observer: observer.to_string(),
            observed: observed.to_string(),
            time,
            outcome,
            state,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptionComparison {
    pub same: bool,
    pub outcomes_agree: bool,
    /// Largest entry of the difference between the two density matrices.
    pub max_density_difference: f64,
}

pub fn compare_descriptions(a: &MeasurementRecord, b: &MeasurementRecord) -> DescriptionComparison {
    let (ra, rb) = (a.state.density(), b.state.density());
    let max_density_difference = if ra.dim() == rb.dim() {
        ra.entries()
            .iter()
            .zip(rb.entries().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let outcomes_agree = a.outcome == b.outcome;
    DescriptionComparison {
        same: outcomes_agree && max_density_difference <= 1e-12,
        outcomes_agree,
        max_density_difference,
    }
}

/// SA's own account and E's account of SA after A has measured S.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerChain {
    /// SA after the projection: a definite pointer outcome.
    pub sa_view: MeasurementRecord,
    /// E's account at the same step: still the entangled superposition.
    pub e_view: MeasurementRecord,
    pub comparison: DescriptionComparison,
}

impl WignerChain {
    pub fn records(&self) -> [&MeasurementRecord; 2] {
        [&self.sa_view, &self.e_view]
    }

    /// Frames E and A with `EQA`/`AQE` whenever E's description is unresolved.
    ///
    /// A description by E in superposition is matched, through the reciprocal
    /// description, by A describing E in superposition. SA's own description
    /// is definite, so neither frame is in superposition relative to itself.
    pub fn induced_graph(&self) -> FrameGraph {
        let frames = vec![FrameId::new("E"), FrameId::new("A")];
        let q = if self.e_view.outcome == Outcome::Unresolved {
            vec![("E".to_string(), "A".to_string()), ("A".to_string(), "E".to_string())]
        } else {
            Vec::new()
        };
        FrameGraph::new(frames, q, Vec::new()).expect("static frame names")
    }
}

/// Runs the premeasurement of `s0`, collapses SA from its own standpoint with
/// the seeded projection, and records E's unchanged description alongside.
pub fn wigner_chain(s0: &StateVector, seed: u64) -> Result<WignerChain> {
    let psi_t = premeasure(s0, 3)?;
    let graph = FrameGraph::new(vec![FrameId::new("E"), FrameId::new("A")], vec![], vec![])?;
    let mut sa_clock = graph.clock("A")?;
    let mut e_clock = graph.clock("E")?;
    let sa_time = sa_clock.advance(1.0)?.seconds();
    let e_time = e_clock.advance(1.0)?.seconds();

    let collapsed = measure(&psi_t, 0, &Operator::spin_z(), seed)?.collapsed;
    let sa_view = MeasurementRecord::new("SA", "SA", sa_time, StateDescription::Pure(collapsed))?;
    let e_view = MeasurementRecord::new("E", "SA", e_time, StateDescription::Pure(psi_t))?;
    let comparison = compare_descriptions(&sa_view, &e_view);
    Ok(WignerChain {
        sa_view,
        e_view,
        comparison,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainProjection {
    pub state: StateVector,
    pub branch: usize,
    pub probability: f64,
}

/// Projection onto a correlated pointer branch `|s_i⟩|A_{s_i}⟩`.
///
/// Fails if the relative apparatus states of `|s↑⟩` and `|s↓⟩` overlap by more
/// than [`CORRELATION_TOL`], i.e. the pointer basis is not a Schmidt basis.
pub fn project_chain(psi_t: &StateVector, seed: u64) -> Result<ChainProjection> {
    ensure_system_apparatus(psi_t)?;
    let cross = pointer_cross_term(psi_t);
    if cross > CORRELATION_TOL {
        return Err(Error::NoPointerCorrelation(cross));
    }
    let m = measure(psi_t, 0, &Operator::spin_z(), seed)?;
    Ok(ChainProjection {
        state: m.collapsed,
        branch: m.outcome_index,
        probability: m.probability,
    })
}

/// `|⟨r↑|r↓⟩|` for the unnormalized relative apparatus states.
pub fn pointer_cross_term(psi_t: &StateVector) -> f64 {
    let k = psi_t.dims()[1];
    let (up, down) = psi_t.amplitudes().split_at(k);
    up.iter().zip(down).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceParams {
    /// Relaxation time τ_R, s.
    pub relaxation_time: f64,
    /// Thermal de Broglie length λ_T, m.
    pub thermal_length: f64,
    /// Separation Δx of the superposed branches, m.
    pub separation: f64,
}

impl DecoherenceParams {
    pub fn new(relaxation_time: f64, thermal_length: f64, separation: f64) -> Result<Self> {
        let p = Self {
            relaxation_time,
            thermal_length,
            separation,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("relaxation_time", self.relaxation_time),
            ("thermal_length", self.thermal_length),
            ("separation", self.separation),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `τ_D = τ_R (λ_T / Δx)²`.
pub fn decoherence_time(p: &DecoherenceParams) -> Result<f64> {
    p.validate()?;
    let ratio = p.thermal_length / p.separation;
    Ok(p.relaxation_time * ratio * ratio)
}

/// `τ_D` in units of the Planck time.
pub fn decoherence_time_in_planck_units(p: &DecoherenceParams) -> Result<f64> {
    Ok(decoherence_time(p)? / PLANCK_TIME)
}

/// Scales the off-diagonal elements of `rho`, written in the eigenbasis of
/// `basis`, by `1 − strength`. Diagonal and trace are preserved.
pub fn dephase(rho: &DensityMatrix, basis: &Operator, strength: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(invalid("strength", format!("must lie in [0, 1], got {strength}")));
    }
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: basis.dim(),
        });
    }
    let herm = basis.hermiticity_error();
    if herm > 1e-12 {
        return Err(Error::NotHermitian(herm));
    }
    let v = SymmetricEigen::new(basis.entries().clone()).eigenvectors;
    let mut pointer = v.adjoint() * rho.entries() * &v;
    let keep = 1.0 - strength;
    let n = rho.dim();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pointer[(i, j)] *= keep;
            }
        }
    }
    let out = &v * pointer * v.adjoint();
    // re-symmetrize the round-off
    let out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(out)
}
