//! Dense finite-dimensional state and operator algebra.
//!
//! States live on a labeled tensor-product basis. The flat amplitude index is
//! row-major over the subsystem digits, so the last subsystem varies fastest:
//! for dims `[2, 3]` the joint index of `(i, j)` is `3 * i + j`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Tolerance on `|‖ψ‖² − 1|` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance used when checking `U†U = 1` and `A = A†`.
pub const OPERATOR_TOL: f64 = 1e-12;

/// Eigenvalues closer than this are merged into one degenerate eigenspace.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl StateVector {
    /// Builds a state over subsystems with the given dimensions and labels.
    ///
    /// The amplitudes are not required to be normalized here; operations that
    /// need a normalized input check it themselves.
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(invalid("dims", "subsystem dimensions must be positive"));
        }
        if labels.len() != dims.len() {
            return Err(invalid("labels", "one label per subsystem is required"));
        }
        let expected: usize = dims.iter().product();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        Ok(Self {
            amplitudes,
            dims,
            labels,
        })
    }

    /// A single-subsystem state.
    pub fn single(amplitudes: Vec<Complex64>, label: &str) -> Result<Self> {
        let dim = amplitudes.len();
        Self::new(amplitudes, vec![dim], vec![label.to_string()])
    }

    /// Computational basis state `|index⟩` of a single subsystem.
    pub fn basis(dim: usize, index: usize, label: &str) -> Result<Self> {
        if index >= dim {
            return Err(Error::SubsystemOutOfRange { index, count: dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::single(amplitudes, label)
    }

    /// `c1|0⟩ + c2|1⟩` on a single two-level subsystem.
    pub fn qubit(c1: Complex64, c2: Complex64, label: &str) -> Result<Self> {
        Self::single(vec![c1, c2], label)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|`; equals 1 for states that agree up to a global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Born weights of the joint basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn flat_index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                actual: digits.len(),
            });
        }
        let mut idx = 0;
        for (&d, &dim) in digits.iter().zip(&self.dims) {
            if d >= dim {
                return Err(Error::SubsystemOutOfRange { index: d, count: dim });
            }
            idx = idx * dim + d;
        }
        Ok(idx)
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.flat_index(digits)?])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dims.len() {
            return Err(invalid("labels", "one label per subsystem is required"));
        }
        self.labels = labels;
        Ok(self)
    }

    fn check_subsystem(&self, subsystem: usize) -> Result<()> {
        if subsystem >= self.dims.len() {
            Err(Error::SubsystemOutOfRange {
                index: subsystem,
                count: self.dims.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Number of joint indices before and after `subsystem` (outer, inner strides).
    fn strides(&self, subsystem: usize) -> (usize, usize) {
        let outer = self.dims[..subsystem].iter().product();
        let inner = self.dims[subsystem + 1..].iter().product();
        (outer, inner)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    entries: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(invalid("entries", "operator must have positive dimension"));
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(Self { entries })
    }

    /// Row-major construction of a `dim × dim` operator.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_slice(dim, &c)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// The spin observable `Ŝ = diag(+1, −1)`: `|↑⟩` is basis index 0.
    pub fn spin_z() -> Self {
        Self::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]).expect("static operator")
    }

    /// Maps the up/down basis to `|→⟩ = (|↑⟩+|↓⟩)/√2`, `|←⟩ = (|↑⟩−|↓⟩)/√2`.
    /// Its columns are the new basis vectors. It is its own inverse.
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real_rows(2, &[s, s, s, -s]).expect("static operator")
    }

    /// Diagonal observable with the given real eigenvalues.
    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.iter().map(|&v| Complex64::new(v, 0.0));
        Self {
            entries: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(values.len(), d)),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    /// Max entry modulus of `U†U − 1`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let prod = self.entries.adjoint() * &self.entries;
        max_abs_diff(&prod, &DMatrix::identity(n, n))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Max entry modulus of `A − A†`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }

    /// Projector `|ψ⟩⟨ψ|` of a single-register state.
    pub fn projector(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            entries: &v * v.adjoint(),
        }
    }

    fn ensure_unitary(&self) -> Result<()> {
        let err = self.unitarity_error();
        if err > OPERATOR_TOL * self.dim() as f64 {
            Err(Error::NotUnitary(err))
        } else {
            Ok(())
        }
    }

    fn ensure_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > OPERATOR_TOL {
            Err(Error::NotHermitian(err))
        } else {
            Ok(())
        }
    }
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Density operator of a (possibly reduced) state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace to within `1e-10`.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let op = Operator::new(entries)?;
        let herm = op.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let rho = Self {
            entries: op.entries,
        };
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(invalid("entries", format!("trace {tr} is not 1")));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            entries: Operator::projector(state).entries,
        }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Largest off-diagonal modulus.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.entries[(i, j)].norm());
                }
            }
        }
        m
    }

    pub(crate) fn from_entries_unchecked(entries: DMatrix<Complex64>) -> Self {
        Self { entries }
    }
}

/// `a ⊗ b`, with `dims` and `labels` concatenated.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.ensure_normalized()?;
    b.ensure_normalized()?;
    let mut amplitudes = Vec::with_capacity(a.len() * b.len());
    for x in a.amplitudes() {
        for y in b.amplitudes() {
            amplitudes.push(x * y);
        }
    }
    let dims = a.dims().iter().chain(b.dims()).copied().collect();
    let labels = a.labels().iter().chain(b.labels()).cloned().collect();
    StateVector::new(amplitudes, dims, labels)
}

/// Applies a unitary acting on the whole joint space.
pub fn apply_unitary(u: &Operator, psi: &StateVector) -> Result<StateVector> {
    if u.dim() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            actual: u.dim(),
        });
    }
    u.ensure_unitary()?;
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    let out = u.entries() * v;
    StateVector::new(out.iter().copied().collect(), psi.dims.clone(), psi.labels.clone())
}

/// Applies `op` to one subsystem, i.e. `1 ⊗ … ⊗ op ⊗ … ⊗ 1`, without building
/// the full joint matrix. No unitarity check.
pub fn apply_local(op: &Operator, psi: &StateVector, subsystem: usize) -> Result<StateVector> {
    psi.check_subsystem(subsystem)?;
    let d = psi.dims[subsystem];
    if op.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: op.dim(),
        });
    }
    let (outer, inner) = psi.strides(subsystem);
    let m = op.entries();
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    let mut block = vec![Complex64::new(0.0, 0.0); d];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for (k, b) in block.iter_mut().enumerate() {
                *b = psi.amplitudes[base + k * inner];
            }
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, b) in block.iter().enumerate() {
                    acc += m[(r, c)] * b;
                }
                out[base + r * inner] = acc;
            }
        }
    }
    StateVector::new(out, psi.dims.clone(), psi.labels.clone())
}

/// Re-expresses `psi` in a new basis of one subsystem.
///
/// The columns of `basis` are the new basis vectors written in the old basis,
/// so the new coefficients are `basis† · ψ` on that subsystem.
pub fn change_basis(psi: &StateVector, subsystem: usize, basis: &Operator) -> Result<StateVector> {
    psi.check_subsystem(subsystem)?;
    if basis.dim() != psi.dims[subsystem] {
        return Err(Error::DimensionMismatch {
            expected: psi.dims[subsystem],
            actual: basis.dim(),
        });
    }
    basis.ensure_unitary()?;
    apply_local(&basis.adjoint(), psi, subsystem)
}

/// One eigenspace of an observable.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub value: f64,
    pub projector: Operator,
}

/// Eigenspaces of a Hermitian observable, sorted by descending eigenvalue.
/// Degenerate eigenvalues share one projector.
pub fn eigenspaces(observable: &Operator) -> Result<Vec<Eigenspace>> {
    observable.ensure_hermitian()?;
    let eig = SymmetricEigen::new(observable.entries().clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let n = observable.dim();
    let mut spaces: Vec<(f64, DMatrix<Complex64>)> = Vec::new();
    for idx in order {
        let value = eig.eigenvalues[idx];
        let v = eig.eigenvectors.column(idx);
        let p = &v * v.adjoint();
        match spaces.last_mut() {
            Some((last, proj)) if (*last - value).abs() <= DEGENERACY_TOL => *proj += p,
            _ => spaces.push((value, DMatrix::zeros(n, n) + p)),
        }
    }
    Ok(spaces
        .into_iter()
        .map(|(value, projector)| Eigenspace {
            value,
            projector: Operator {
                entries: projector,
            },
        })
        .collect())
}

/// Born weight of every eigenspace of `observable` on `subsystem`, in the
/// order returned by [`eigenspaces`].
pub fn outcome_probabilities(
    psi: &StateVector,
    subsystem: usize,
    observable: &Operator,
) -> Result<Vec<(f64, f64)>> {
    eigenspaces(observable)?
        .iter()
        .map(|e| {
            let projected = apply_local(&e.projector, psi, subsystem)?;
            Ok((e.value, projected.norm_sqr()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    /// Eigenvalue of the observed outcome.
    pub outcome: f64,
    /// Position of the outcome in the descending eigenvalue order.
    pub outcome_index: usize,
    /// Born weight of the sampled outcome.
    pub probability: f64,
    pub collapsed: StateVector,
}

/// Projects onto the eigenspace `outcome_index` and renormalizes.
///
/// Requesting a zero-probability outcome is an error.
pub fn project(
    psi: &StateVector,
    subsystem: usize,
    observable: &Operator,
    outcome_index: usize,
) -> Result<Measurement> {
    psi.check_subsystem(subsystem)?;
    if observable.dim() != psi.dims[subsystem] {
        return Err(Error::DimensionMismatch {
            expected: psi.dims[subsystem],
            actual: observable.dim(),
        });
    }
    let spaces = eigenspaces(observable)?;
    let space = spaces.get(outcome_index).ok_or(Error::SubsystemOutOfRange {
        index: outcome_index,
        count: spaces.len(),
    })?;
    let projected = apply_local(&space.projector, psi, subsystem)?;
    let probability = projected.norm_sqr() / psi.norm_sqr();
    if probability <= f64::EPSILON {
        return Err(Error::ZeroProbability(outcome_index));
    }
    Ok(Measurement {
        outcome: space.value,
        outcome_index,
        probability,
        collapsed: projected.normalized()?,
    })
}

/// Projective measurement with outcomes drawn from a generator seeded by `seed`.
///
/// Degenerate eigenvalues collapse onto the whole eigenspace (Lüders rule).
pub fn measure(
    psi: &StateVector,
    subsystem: usize,
    observable: &Operator,
    seed: u64,
) -> Result<Measurement> {
    psi.ensure_normalized()?;
    psi.check_subsystem(subsystem)?;
    if observable.dim() != psi.dims[subsystem] {
        return Err(Error::DimensionMismatch {
            expected: psi.dims[subsystem],
            actual: observable.dim(),
        });
    }
    let probs = outcome_probabilities(psi, subsystem, observable)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r: f64 = rng.random();
    let index = sample_index(probs.iter().map(|p| p.1), r);
    project(psi, subsystem, observable, index)
}

/// Inverse-CDF sampling over unnormalized weights; never returns a
/// zero-weight index.
pub(crate) fn sample_index(weights: impl Iterator<Item = f64> + Clone, r: f64) -> usize {
    let total: f64 = weights.clone().sum();
    let target = r * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, w) in weights.enumerate() {
        if w > f64::EPSILON {
            last_nonzero = i;
            acc += w;
            if target < acc {
                return i;
            }
        }
    }
    last_nonzero
}

/// Partial trace keeping the listed subsystems (in ascending order).
pub fn reduced_state(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    for &k in &kept {
        psi.check_subsystem(k)?;
    }
    let n_sub = psi.dims.len();
    let traced: Vec<usize> = (0..n_sub).filter(|s| !kept.contains(s)).collect();
    let dk: usize = kept.iter().map(|&s| psi.dims[s]).product();
    let dt: usize = traced.iter().map(|&s| psi.dims[s]).product();

    // Reshape ψ into a dk × dt matrix M so that ρ = M M†.
    let mut m = DMatrix::<Complex64>::zeros(dk, dt);
    let mut digits = vec![0usize; n_sub];
    for (flat, amp) in psi.amplitudes.iter().enumerate() {
        let mut rem = flat;
        for s in (0..n_sub).rev() {
            digits[s] = rem % psi.dims[s];
            rem /= psi.dims[s];
        }
        let row = kept.iter().fold(0, |acc, &s| acc * psi.dims[s] + digits[s]);
        let col = traced.iter().fold(0, |acc, &s| acc * psi.dims[s] + digits[s]);
        m[(row, col)] = *amp;
    }
    let rho = &m * m.adjoint();
    Ok(DensityMatrix::from_entries_unchecked(rho))
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `R`'s diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let g = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator { entries: q }
}

/// Uniformly random normalized state of a single register.
pub fn random_state<R: Rng + ?Sized>(dim: usize, label: &str, rng: &mut R) -> StateVector {
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::single(amps, label)
        .and_then(StateVector::normalized)
        .expect("Gaussian vector is nonzero with probability one")
}
