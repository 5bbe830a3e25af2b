//! Relations between quantum frames.
//!
//! A [`FrameGraph`] carries two independent relations over its frames:
//! `q_edges`, where `(x, y)` reads "y is in a superposition relative to x",
//! and `phys_edges`, where `(a, b)` reads "a is physical relative to b".
//! Physical reality should make `phys_edges` an equivalence relation;
//! [`check_equivalence`] lists every way it fails to be one. The
//! superposition relation fails in a specific pattern (`xQy` and `yQx`
//! without `xQx`), which [`detect_intransitivity`] reports.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::StateVector;

/// Reciprocal amplitudes must have equal moduli to this tolerance.
pub const RECIPROCITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameId {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

impl FrameId {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mass: None,
        }
    }

    pub fn with_mass(name: impl Into<String>, mass: f64) -> Self {
        Self {
            name: name.into(),
            mass: Some(mass),
        }
    }
}

pub type Edge = (String, String);

/// Frames plus the two relations. Serializes as
/// `{"frames":[{"name":..,"mass":..}],"q_edges":[["E","A"]],"phys_edges":[...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFrameGraph", into = "RawFrameGraph")]
pub struct FrameGraph {
    frames: Vec<FrameId>,
    q_edges: BTreeSet<Edge>,
    phys_edges: BTreeSet<Edge>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrameGraph {
    frames: Vec<FrameId>,
    #[serde(default)]
    q_edges: Vec<[String; 2]>,
    #[serde(default)]
    phys_edges: Vec<[String; 2]>,
}

impl TryFrom<RawFrameGraph> for FrameGraph {
    type Error = Error;

    fn try_from(raw: RawFrameGraph) -> Result<Self> {
        let to_edges = |v: Vec<[String; 2]>| v.into_iter().map(|[a, b]| (a, b)).collect::<Vec<_>>();
        FrameGraph::new(raw.frames, to_edges(raw.q_edges), to_edges(raw.phys_edges))
    }
}

impl From<FrameGraph> for RawFrameGraph {
    fn from(g: FrameGraph) -> Self {
        let to_pairs = |s: BTreeSet<Edge>| s.into_iter().map(|(a, b)| [a, b]).collect();
        RawFrameGraph {
            frames: g.frames,
            q_edges: to_pairs(g.q_edges),
            phys_edges: to_pairs(g.phys_edges),
        }
    }
}

impl FrameGraph {
    pub fn new(
        frames: Vec<FrameId>,
        q_edges: impl IntoIterator<Item = Edge>,
        phys_edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let mut names = BTreeSet::new();
        for f in &frames {
            if !names.insert(f.name.as_str()) {
                return Err(Error::DuplicateFrame(f.name.clone()));
            }
            if let Some(m) = f.mass {
                if !(m.is_finite() && m > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "mass",
                        reason: format!("frame `{}` has nonpositive mass {m}", f.name),
                    });
                }
            }
        }
        let check = |edges: BTreeSet<Edge>| -> Result<BTreeSet<Edge>> {
            for (a, b) in &edges {
                for end in [a, b] {
                    if !names.contains(end.as_str()) {
                        return Err(Error::UnknownFrame(end.clone()));
                    }
                }
            }
            Ok(edges)
        };
        let q_edges = check(q_edges.into_iter().collect())?;
        let phys_edges = check(phys_edges.into_iter().collect())?;
        Ok(Self {
            frames,
            q_edges,
            phys_edges,
        })
    }

    pub fn empty() -> Self {
        Self {
            frames: Vec::new(),
            q_edges: BTreeSet::new(),
            phys_edges: BTreeSet::new(),
        }
    }

    pub fn frames(&self) -> &[FrameId] {
        &self.frames
    }

    pub fn q_edges(&self) -> &BTreeSet<Edge> {
        &self.q_edges
    }

    pub fn phys_edges(&self) -> &BTreeSet<Edge> {
        &self.phys_edges
    }

    pub fn frame(&self, name: &str) -> Result<&FrameId> {
        self.frames
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFrame(name.to_string()))
    }

    /// A fresh local clock for `frame`, reading zero.
    pub fn clock(&self, frame: &str) -> Result<LocalClock> {
        frame_times(self, frame)
    }

    /// Reflexive, symmetric, transitive closure of `phys_edges` over all frames.
    pub fn with_equivalence_closure(&self) -> Self {
        let names: Vec<&str> = self.frames.iter().map(|f| f.name.as_str()).collect();
        // union-find over frame indices
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut parent: Vec<usize> = (0..names.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (a, b) in &self.phys_edges {
            let (ra, rb) = (find(&mut parent, index[a.as_str()]), find(&mut parent, index[b.as_str()]));
            parent[ra] = rb;
        }
        let mut phys = BTreeSet::new();
        for i in 0..names.len() {
            for j in 0..names.len() {
                if find(&mut parent, i) == find(&mut parent, j) {
                    phys.insert((names[i].to_string(), names[j].to_string()));
                }
            }
        }
        Self {
            frames: self.frames.clone(),
            q_edges: self.q_edges.clone(),
            phys_edges: phys,
        }
    }
}

/// One way in which `phys_edges` fails to be an equivalence relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `a` is not physical relative to itself.
    Reflexivity { frame: String },
    /// `(from, to)` present without `(to, from)`.
    Symmetry { from: String, to: String },
    /// `(a, b)` and `(b, c)` present without `(a, c)`.
    Transitivity { a: String, b: String, c: String },
}

/// Every reflexivity, symmetry and transitivity failure of `phys_edges`,
/// sorted.
pub fn check_equivalence(g: &FrameGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    for f in &g.frames {
        if !g.phys_edges.contains(&(f.name.clone(), f.name.clone())) {
            out.push(Violation::Reflexivity { frame: f.name.clone() });
        }
    }
    let mut successors: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in &g.phys_edges {
        successors.entry(a.as_str()).or_default().push(b.as_str());
        if !g.phys_edges.contains(&(b.clone(), a.clone())) {
            out.push(Violation::Symmetry {
                from: a.clone(),
                to: b.clone(),
            });
        }
    }
    for (a, b) in &g.phys_edges {
        for &c in successors.get(b.as_str()).map(Vec::as_slice).unwrap_or(&[]) {
            if !g.phys_edges.contains(&(a.clone(), c.to_string())) {
                out.push(Violation::Transitivity {
                    a: a.clone(),
                    b: b.clone(),
                    c: c.to_string(),
                });
            }
        }
    }
    out.sort();
    out
}

/// Pairs `(x, y)` with `xQy` and `yQx` but no `xQx`, sorted.
pub fn detect_intransitivity(g: &FrameGraph) -> Vec<Edge> {
    g.q_edges
        .iter()
        .filter(|(x, y)| {
            g.q_edges.contains(&(y.clone(), x.clone())) && !g.q_edges.contains(&(x.clone(), x.clone()))
        })
        .cloned()
        .collect()
}

/// The description of S by A together with the corresponding description of
/// A by S.
#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocalPair {
    pub forward: StateVector,
    pub backward: StateVector,
}

impl ReciprocalPair {
    /// Largest `| |forward_i|² − |backward_i|² |`.
    pub fn modulus_mismatch(&self) -> f64 {
        self.forward
            .amplitudes()
            .iter()
            .zip(self.backward.amplitudes())
            .map(|(f, b)| (f.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max)
    }

    /// Both descriptions after an observation finds eigenstate `branch`:
    /// when A sees S in `|s_i⟩`, S sees A in the corresponding `|A_i⟩`.
    pub fn collapse_on(&self, branch: usize) -> Result<ReciprocalPair> {
        let dim = self.forward.len();
        if self.forward.amplitudes().get(branch).is_none_or(|a| a.norm_sqr() <= f64::EPSILON) {
            return Err(Error::ZeroProbability(branch));
        }
        let fwd_label = self.forward.labels()[0].as_str();
        let bwd_label = self.backward.labels()[0].as_str();
        Ok(ReciprocalPair {
            forward: StateVector::basis(dim, branch, fwd_label)?,
            backward: StateVector::basis(dim, branch, bwd_label)?,
        })
    }
}

/// Builds the reciprocal description: if A describes S by `Σ cᵢ|sᵢ⟩`, S
/// describes A by `Σ cᵢ'|A_{sᵢ}⟩` with `|cᵢ'| = |cᵢ|`.
///
/// Phases are copied from the forward amplitudes. The returned backward state
/// is labeled with `describer` (the frame whose state it now is); applying the
/// map to the backward state with the original label restores the forward
/// moduli.
pub fn reciprocal_superposition(forward: &StateVector, describer: &str) -> Result<ReciprocalPair> {
    forward.ensure_normalized()?;
    if forward.dims().len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: forward.dims().len(),
        });
    }
    let backward = StateVector::single(forward.amplitudes().to_vec(), describer)?;
    Ok(ReciprocalPair {
        forward: forward.clone(),
        backward,
    })
}

/// Time elapsed on one frame's own clock.
///
/// Two readings can only be ordered when they come from the same frame;
/// comparing readings from different frames yields `None` from
/// `partial_cmp` and an error from [`LocalTime::try_cmp`].
#[derive(Clone, Debug)]
pub struct LocalTime {
    frame: String,
    seconds: f64,
}

impl LocalTime {
    pub fn frame(&self) -> &str {
        &self.frame
    }

    pub fn seconds(&self) -> f64 {
        self.seconds
    }

    pub fn try_cmp(&self, other: &LocalTime) -> Result<Ordering> {
        self.partial_cmp(other)
            .ok_or_else(|| Error::CrossFrameComparison(self.frame.clone(), other.frame.clone()))
    }

    /// Re-expresses this reading in `target`'s clock through a dilation
    /// factor (for instance a δ factor from [`crate::transforms::delta_factor`]).
    pub fn mapped_into(&self, target: &str, factor: f64) -> Result<LocalTime> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter {
                name: "factor",
                reason: format!("time dilation factor must be positive, got {factor}"),
            });
        }
        Ok(LocalTime {
            frame: target.to_string(),
            seconds: self.seconds * factor,
        })
    }
}

impl PartialEq for LocalTime {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.seconds == other.seconds
    }
}

impl PartialOrd for LocalTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.frame != other.frame {
            return None;
        }
        self.seconds.partial_cmp(&other.seconds)
    }
}

/// Monotone accumulator of one frame's local time.
///
/// There is deliberately no comparison between clocks:
///
/// ```compile_fail
/// # use qrel_core::relations::{FrameGraph, FrameId};
/// let g = FrameGraph::new(vec![FrameId::new("E"), FrameId::new("A")], vec![], vec![]).unwrap();
/// let (e, a) = (g.clock("E").unwrap(), g.clock("A").unwrap());
/// let _ = e < a;
/// ```
#[derive(Debug)]
pub struct LocalClock {
    frame: String,
    elapsed: f64,
}

impl LocalClock {
    pub fn frame(&self) -> &str {
        &self.frame
    }

    /// Advances by `dt ≥ 0` seconds of this frame's time.
    pub fn advance(&mut self, dt: f64) -> Result<LocalTime> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("local time only moves forward, got {dt}"),
            });
        }
        self.elapsed += dt;
        Ok(self.now())
    }

    pub fn now(&self) -> LocalTime {
        LocalTime {
            frame: self.frame.clone(),
            seconds: self.elapsed,
        }
    }
}

/// Local clock handle for `frame`, starting at zero.
pub fn frame_times(g: &FrameGraph, frame: &str) -> Result<LocalClock> {
    let f = g.frame(frame)?;
    Ok(LocalClock {
        frame: f.name.clone(),
        elapsed: 0.0,
    })
}
