//! Chains of quantum frames `Q1 … Qn` linked by pairwise relative packets.
//!
//! Entry `j` of a chain is the amplitude of `Q_{j+2}` relative to `Q_{j+1}`,
//! a free packet in its own relative coordinate with its own pair mass.
//!
//! The amplitude `Z` between the chain ends is defined here as the
//! convolution of the pair packets: relative displacements add, so the
//! end-to-end amplitude at `X` sums over every way of splitting `X` into
//! pairwise displacements. This is an interpretation, not a derived result.
//! Because free propagators multiply in Fourier space, `Z` evolves as a free
//! packet of reduced mass `1/Σ(1/m_j)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::relations::FrameId;
use crate::wavepacket::{evolve_free, fft, ifft, WavePacket};

#[derive(Clone, Debug, PartialEq)]
pub struct FrameChain {
    frames: Vec<FrameId>,
    pair_packets: Vec<WavePacket>,
}

impl FrameChain {
    /// Requires `frames.len() == pair_packets.len() + 1 ≥ 2` and every pair
    /// packet normalized.
    pub fn new(frames: Vec<FrameId>, pair_packets: Vec<WavePacket>) -> Result<Self> {
        for p in &pair_packets {
            p.ensure_normalized()?;
        }
        Self::new_unnormalized(frames, pair_packets)
    }

    /// Like [`FrameChain::new`] without the per-pair normalization check, for
    /// degenerate inputs such as zero packets.
    pub fn new_unnormalized(frames: Vec<FrameId>, pair_packets: Vec<WavePacket>) -> Result<Self> {
        if pair_packets.is_empty() {
            return Err(Error::EmptySelection);
        }
        if frames.len() != pair_packets.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: pair_packets.len() + 1,
                actual: frames.len(),
            });
        }
        Ok(Self { frames, pair_packets })
    }

    /// Frames named `Q1 … Qn` around the given pair packets.
    pub fn from_packets(pair_packets: Vec<WavePacket>) -> Result<Self> {
        let frames = (1..=pair_packets.len() + 1).map(|j| FrameId::new(format!("Q{j}"))).collect();
        Self::new(frames, pair_packets)
    }

    pub fn frames(&self) -> &[FrameId] {
        &self.frames
    }

    pub fn pair_packets(&self) -> &[WavePacket] {
        &self.pair_packets
    }

    pub fn masses(&self) -> Vec<f64> {
        self.pair_packets.iter().map(WavePacket::mass).collect()
    }

    /// Number of frames `n`.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn with_packets(&self, pair_packets: Vec<WavePacket>) -> Self {
        Self {
            frames: self.frames.clone(),
            pair_packets,
        }
    }
}

/// `∫|Ψ_outer(x)|²dx` with `Ψ_outer` multiplied by the plain integral of each
/// inner packet over that packet's own coordinate.
pub fn nested_integral(outer: &WavePacket, inners: &[WavePacket]) -> f64 {
    let factor: Complex64 = inners
        .iter()
        .map(|p| p.amplitudes().iter().sum::<Complex64>() * p.grid().dx())
        .product();
    outer.norm_sqr() * factor.norm_sqr()
}

/// Nested norm of the chain: the outermost pair (`Q_n` relative to
/// `Q_{n−1}`) is modulus-squared and integrated, the inner pairs are
/// integrated without squaring. Equals 1 for a two-frame chain.
pub fn nested_norm(chain: &FrameChain) -> f64 {
    let (outer, inners) = chain.pair_packets.split_last().expect("chain has at least one pair");
    nested_integral(outer, inners)
}

/// Evolves every pair packet under its own free Hamiltonian.
pub fn evolve_chain(chain: &FrameChain, dt: f64, steps: usize) -> Result<FrameChain> {
    let packets = chain
        .pair_packets
        .par_iter()
        .map(|p| evolve_free(p, dt, steps))
        .collect::<Result<Vec<_>>>()?;
    Ok(chain.with_packets(packets))
}

/// End-to-end amplitude `Z` of a chain.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeAmplitude {
    packet: WavePacket,
}

impl RelativeAmplitude {
    pub fn new(packet: WavePacket) -> Self {
        Self { packet }
    }

    pub fn packet(&self) -> &WavePacket {
        &self.packet
    }
}

/// Convolution `Z(X) = ∫…∫ Ψ_1(x_1)…Ψ_{n−1}(X − Σx_j) dx` of the pair packets,
/// sampled on the common grid. The result carries the reduced mass.
pub fn compose_relative_amplitude(chain: &FrameChain) -> Result<RelativeAmplitude> {
    compose_packets(&chain.pair_packets)
}

pub fn compose_packets(packets: &[WavePacket]) -> Result<RelativeAmplitude> {
    let (first, rest) = packets.split_first().ok_or(Error::EmptySelection)?;
    if rest.is_empty() {
        return Ok(RelativeAmplitude::new(first.clone()));
    }
    let grid = *first.grid();
    for p in rest {
        if !p.grid().same_as(&grid) {
            return Err(Error::GridMismatch(format!(
                "pair packets live on different grids: [{}, {}]×{} vs [{}, {}]×{}",
                grid.x_min(),
                grid.x_max(),
                grid.n_points(),
                p.grid().x_min(),
                p.grid().x_max(),
                p.grid().n_points()
            )));
        }
        if p.hbar() != first.hbar() {
            return Err(invalid("hbar", "pair packets use different action units"));
        }
    }
    let dx = grid.dx();
    let mut spectrum = fft(first.amplitudes());
    for p in rest {
        // each convolution adds one x_min offset; shift it back onto the grid
        for ((a, b), k) in spectrum.iter_mut().zip(fft(p.amplitudes())).zip(grid.wavenumbers()) {
            *a *= b * Complex64::from_polar(dx, -k * grid.x_min());
        }
    }
    let inverse_mass: f64 = packets.iter().map(|p| 1.0 / p.mass()).sum();
    let packet = WavePacket::new(grid, ifft(&spectrum), 1.0 / inverse_mass, first.hbar())?;
    Ok(RelativeAmplitude::new(packet))
}

/// Grid-max modulus of
/// `Σ_p (iℏ)^p ∂_tΨ_p − Σ_p (−ℏ²/2m_p)^p ∂²_xΨ_p`, `p = 1 … n−1`.
///
/// The time derivative is a centred difference over `±dt`; the space
/// derivative is spectral. For a two-frame chain this is the Schrödinger
/// residual of the single pair.
pub fn constraint_residual(chain: &FrameChain, dt: f64) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let grid = *chain.pair_packets[0].grid();
    for p in &chain.pair_packets[1..] {
        if !p.grid().same_as(&grid) {
            return Err(Error::GridMismatch("pair packets live on different grids".into()));
        }
    }
    let forward = evolve_chain(chain, dt, 1)?;
    let backward = evolve_chain(chain, -dt, 1)?;
    let mut residual = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for (p, packet) in chain.pair_packets.iter().enumerate() {
        let power = (p + 1) as i32;
        let time_coeff = Complex64::new(0.0, packet.hbar()).powi(power);
        let space_coeff = (-packet.hbar() * packet.hbar() / (2.0 * packet.mass())).powi(power);
        let plus = forward.pair_packets[p].amplitudes();
        let minus = backward.pair_packets[p].amplitudes();
        let laplacian = packet.second_derivative();
        for i in 0..residual.len() {
            let dpsi_dt = (plus[i] - minus[i]) / (2.0 * dt);
            residual[i] += time_coeff * dpsi_dt - space_coeff * laplacian[i];
        }
    }
    Ok(residual.iter().map(|r| r.norm()).fold(0.0, f64::max))
}

/// Least-squares `k` in `∂_tZ = k ∂²_xZ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionFit {
    pub k_re: f64,
    pub k_im: f64,
    /// `‖∂_tZ − k∂²_xZ‖ / ‖∂_tZ‖` over the interior snapshots.
    pub residual: f64,
}

impl DiffusionFit {
    pub fn k(&self) -> Complex64 {
        Complex64::new(self.k_re, self.k_im)
    }
}

/// Fits `k` using centred differences on the interior snapshots and spectral
/// second derivatives.
pub fn fit_diffusion_constant(history: &[RelativeAmplitude], times: &[f64]) -> Result<DiffusionFit> {
    if history.len() < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 snapshots, got {}",
            history.len()
        )));
    }
    if times.len() != history.len() {
        return Err(Error::DimensionMismatch {
            expected: history.len(),
            actual: times.len(),
        });
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("times", "must be finite and strictly increasing"));
    }
    let grid = *history[0].packet.grid();
    if history.iter().any(|z| !z.packet.grid().same_as(&grid)) {
        return Err(Error::GridMismatch("snapshots live on different grids".into()));
    }

    let mut derivatives = Vec::with_capacity(history.len() - 2);
    let mut laplacians = Vec::with_capacity(history.len() - 2);
    for i in 1..history.len() - 1 {
        let h = times[i + 1] - times[i - 1];
        let next = history[i + 1].packet.amplitudes();
        let prev = history[i - 1].packet.amplitudes();
        derivatives.push(next.iter().zip(prev).map(|(a, b)| (a - b) / h).collect::<Vec<_>>());
        laplacians.push(history[i].packet.second_derivative());
    }

    let dt_norm: f64 = derivatives.iter().flatten().map(|d| d.norm_sqr()).sum();
    if dt_norm == 0.0 {
        return Err(Error::StaticHistory);
    }
    let lap_norm: f64 = laplacians.iter().flatten().map(|l| l.norm_sqr()).sum();
    if lap_norm == 0.0 {
        return Err(Error::Precondition("second derivative vanishes on every snapshot".into()));
    }
    let cross: Complex64 = laplacians
        .iter()
        .flatten()
        .zip(derivatives.iter().flatten())
        .map(|(l, d)| l.conj() * d)
        .sum();
    let k = cross / lap_norm;
    let misfit: f64 = laplacians
        .iter()
        .flatten()
        .zip(derivatives.iter().flatten())
        .map(|(l, d)| (d - k * l).norm_sqr())
        .sum();
    Ok(DiffusionFit {
        k_re: k.re,
        k_im: k.im,
        residual: (misfit / dt_norm).sqrt(),
    })
}

/// Composes the chain at `steps + 1` equally spaced times `0, dt, …` and fits
/// the diffusion constant of `Z`.
pub fn chain_diffusion_fit(chain: &FrameChain, dt: f64, steps: usize) -> Result<DiffusionFit> {
    let mut history = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut current = chain.clone();
    for s in 0..=steps {
        if s > 0 {
            current = evolve_chain(&current, dt, 1)?;
        }
        history.push(compose_relative_amplitude(&current)?);
        times.push(s as f64 * dt);
    }
    fit_diffusion_constant(&history, &times)
}
