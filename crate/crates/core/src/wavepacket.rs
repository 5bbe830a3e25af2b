//! Free-particle wave packets on a periodic 1-D grid.
//!
//! Evolution is spectral: each Fourier mode `k` picks up the phase
//! `exp(−iℏk²dt/2m)` per step, which is exact for the free Hamiltonian. The
//! double-slit screen is read out with the single-FFT Fresnel transform,
//! the exact free propagator evaluated on a rescaled output grid, so the far
//! field can be reached without a grid that spans the whole screen.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{invalid, Error, Result};
use crate::transforms::{debroglie_product, dilation_factor, reduced_wavelength, HBAR};

/// Discrete norm tolerance for freshly prepared packets.
pub const PACKET_NORM_TOL: f64 = 1e-10;

/// Screen samples per fringe the Fresnel readout is padded to reach.
const SCREEN_SAMPLES_PER_FRINGE: f64 = 32.0;

/// Uniform periodic grid. Sample `i` sits at `x_min + i·dx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<RawGrid> for Grid1D {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        Grid1D::new(r.x_min, r.x_max, r.n_points)
    }
}

impl From<Grid1D> for RawGrid {
    fn from(g: Grid1D) -> Self {
        RawGrid {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
        }
    }
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(invalid("x_max", format!("need x_max > x_min, got [{x_min}, {x_max}]")));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(invalid("n_points", format!("must be a power of two ≥ 2, got {n_points}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid of `n_points` samples with spacing `dx`, centred on zero.
    pub fn centered(dx: f64, n_points: usize) -> Result<Self> {
        let half = dx * n_points as f64 / 2.0;
        Self::new(-half, half, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / self.length();
        (0..n)
            .map(|j| if j < n / 2 { j as f64 * dk } else { (j - n) as f64 * dk })
            .collect()
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.dx()
    }

    /// The same sample count with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.x_min * factor, self.x_max * factor, self.n_points)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.length()
            && (self.x_max - other.x_max).abs() <= 1e-12 * self.length()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WavePacket {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
    mass: f64,
    hbar: f64,
}

impl WavePacket {
    /// Wraps raw amplitudes. Normalization is not enforced here.
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>, mass: f64, hbar: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points,
                actual: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("wave packet amplitudes"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("mass", format!("must be positive, got {mass}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(invalid("hbar", format!("must be positive, got {hbar}")));
        }
        Ok(Self {
            grid,
            amplitudes,
            mass,
            hbar,
        })
    }

    pub fn zeros(grid: Grid1D, mass: f64, hbar: f64) -> Result<Self> {
        Self::new(grid, vec![Complex64::new(0.0, 0.0); grid.n_points], mass, hbar)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `Σ|ψᵢ|²·dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= PACKET_NORM_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    /// `⟨x⟩` of the density `|ψ|²` (normalized by its own norm).
    pub fn mean_position(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            num += self.grid.x(i) * w;
            den += w;
        }
        num / den
    }

    /// Standard deviation of `|ψ|²` in position.
    pub fn position_std(&self) -> f64 {
        let mean = self.mean_position();
        let (mut num, mut den) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            let d = self.grid.x(i) - mean;
            num += d * d * w;
            den += w;
        }
        (num / den).sqrt()
    }

    /// Spectral moment `⟨kᵖ⟩` of `|ψ̂(k)|²`.
    pub fn wavenumber_moment(&self, power: i32) -> f64 {
        let spectrum = fft(&self.amplitudes);
        let (mut num, mut den) = (0.0, 0.0);
        for (k, a) in self.grid.wavenumbers().iter().zip(&spectrum) {
            let w = a.norm_sqr();
            num += k.powi(power) * w;
            den += w;
        }
        num / den
    }

    /// `⟨p⟩ = ℏ⟨k⟩`.
    pub fn mean_momentum(&self) -> f64 {
        self.hbar * self.wavenumber_moment(1)
    }

    /// Spectral `∂²ψ/∂x²`.
    pub fn second_derivative(&self) -> Vec<Complex64> {
        let mut spectrum = fft(&self.amplitudes);
        for (a, k) in spectrum.iter_mut().zip(self.grid.wavenumbers()) {
            *a *= -k * k;
        }
        ifft(&spectrum)
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        Self {
            grid: self.grid,
            amplitudes,
            mass: self.mass,
            hbar: self.hbar,
        }
    }
}

pub(crate) fn fft(data: &[Complex64]) -> Vec<Complex64> {
    let mut buf = data.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse FFT including the `1/n` factor.
pub(crate) fn ifft(data: &[Complex64]) -> Vec<Complex64> {
    let mut buf = data.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for a in &mut buf {
        *a *= scale;
    }
    buf
}

/// Probability mass of a Gaussian density (std `sigma0`, centre `x0`) lying
/// outside `[x_min, x_max]`.
fn gaussian_clipped_mass(grid: &Grid1D, x0: f64, sigma0: f64) -> f64 {
    let s = sigma0 * std::f64::consts::SQRT_2;
    0.5 * erfc((x0 - grid.x_min) / s) + 0.5 * erfc((grid.x_max - x0) / s)
}

/// `ψ(x) ∝ exp(−(x−x0)²/(4σ0²) + ik0x)`, so `|ψ|²` has standard deviation
/// `σ0`, normalized on the grid.
pub fn init_gaussian(grid: Grid1D, x0: f64, sigma0: f64, k0: f64, mass: f64, hbar: f64) -> Result<WavePacket> {
    let dx = grid.dx();
    if !(sigma0.is_finite() && sigma0 >= 4.0 * dx) {
        return Err(Error::Precondition(format!(
            "sigma0 = {sigma0} is under-resolved; need sigma0 ≥ 4·dx = {}",
            4.0 * dx
        )));
    }
    if x0 - 6.0 * sigma0 < grid.x_min || x0 + 6.0 * sigma0 > grid.x_max {
        return Err(Error::Precondition(format!(
            "packet at x0 = {x0} with sigma0 = {sigma0} is closer than 6σ to the grid boundary"
        )));
    }
    let clipped = gaussian_clipped_mass(&grid, x0, sigma0);
    if clipped > 1e-10 {
        return Err(Error::Precondition(format!(
            "boundary clips {clipped:e} of the probability mass"
        )));
    }
    if k0.abs() >= grid.nyquist() {
        return Err(Error::Precondition(format!(
            "k0 = {k0} exceeds the grid Nyquist wavenumber {}",
            grid.nyquist()
        )));
    }
    let amplitudes: Vec<Complex64> = grid
        .positions()
        .iter()
        .map(|&x| {
            let u = (x - x0) / sigma0;
            Complex64::from_polar((-0.25 * u * u).exp(), k0 * x)
        })
        .collect();
    let packet = WavePacket::new(grid, amplitudes, mass, hbar)?;
    let n = packet.norm_sqr().sqrt();
    let amps = packet.amplitudes.iter().map(|a| a / n).collect();
    Ok(packet.with_amplitudes(amps))
}

/// Closed-form standard deviation of a free Gaussian:
/// `σ(t) = σ0·√(1 + (ℏt/(2mσ0²))²)`.
pub fn gaussian_width(sigma0: f64, mass: f64, hbar: f64, t: f64) -> f64 {
    let tau = hbar * t / (2.0 * mass * sigma0 * sigma0);
    sigma0 * (1.0 + tau * tau).sqrt()
}

/// Largest per-step phase advance `ℏ k²_max |dt| / 2m` over the grid modes.
pub fn max_phase_step(grid: &Grid1D, mass: f64, hbar: f64, dt: f64) -> f64 {
    let k = grid.nyquist();
    hbar * k * k * dt.abs() / (2.0 * mass)
}

/// Advances the packet by `steps` steps of `dt` (negative `dt` runs backwards).
pub fn evolve_free(p: &WavePacket, dt: f64, steps: usize) -> Result<WavePacket> {
    if !dt.is_finite() {
        return Err(Error::NonFinite("dt"));
    }
    let phase = max_phase_step(&p.grid, p.mass, p.hbar, dt);
    if phase >= PI {
        return Err(Error::Precondition(format!(
            "time step aliases: max phase advance per step {phase} ≥ π"
        )));
    }
    if steps == 0 {
        return Ok(p.clone());
    }
    let c = p.hbar * dt / (2.0 * p.mass);
    let propagator: Vec<Complex64> = p
        .grid
        .wavenumbers()
        .iter()
        .map(|k| Complex64::from_polar(1.0, -c * k * k))
        .collect();
    let mut spectrum = fft(&p.amplitudes);
    spectrum
        .par_iter_mut()
        .zip(propagator.par_iter())
        .with_min_len(1024)
        .for_each(|(a, u)| {
            for _ in 0..steps {
                *a *= u;
            }
        });
    Ok(p.with_amplitudes(ifft(&spectrum)))
}

/// Samples of the freely propagated amplitude on a rescaled screen grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreenAmplitude {
    /// Screen positions, ascending, centred on zero.
    pub x: Vec<f64>,
    pub amplitude: Vec<Complex64>,
}

/// Exact free propagation over time `t` evaluated by a single FFT:
///
/// `ψ(x,t) = √(α/2πi)·e^{iαx²/2} ∫ e^{−iαxx'} e^{iαx'²/2} ψ(x') dx'`, `α = m/(ℏt)`.
///
/// The input is zero-padded to `out_len` samples; the output spacing is
/// `2π/(α·out_len·dx)`. No periodic wrap-around occurs, unlike
/// [`evolve_free`].
pub fn fresnel_propagate(p: &WavePacket, t: f64, out_len: usize) -> Result<ScreenAmplitude> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("propagation time must be positive, got {t}")));
    }
    let n = p.grid.n_points;
    if out_len < n || !out_len.is_power_of_two() {
        return Err(invalid("out_len", "must be a power of two ≥ the grid size"));
    }
    let alpha = p.mass / (p.hbar * t);
    let dx = p.grid.dx();
    // the chirp only has to be resolved where the packet has support
    let peak = p.amplitudes.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let x_edge = p
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 1e-30 * peak)
        .map(|(i, _)| p.grid.x(i).abs())
        .fold(0.0, f64::max);
    if alpha * x_edge * dx >= PI {
        return Err(Error::Precondition(
            "Fresnel chirp is undersampled on the source grid".to_string(),
        ));
    }
    let mut g = vec![Complex64::new(0.0, 0.0); out_len];
    for (i, a) in p.amplitudes.iter().enumerate() {
        let x = p.grid.x(i);
        g[i] = a * Complex64::from_polar(1.0, 0.5 * alpha * x * x);
    }
    let spectrum = fft(&g);
    let dx_out = 2.0 * PI / (alpha * out_len as f64 * dx);
    let prefactor = Complex64::from_polar((alpha / (2.0 * PI)).sqrt() * dx, -PI / 4.0);
    let half = (out_len / 2) as i64;
    let mut x = Vec::with_capacity(out_len);
    let mut amplitude = Vec::with_capacity(out_len);
    for j in -half..half {
        let xs = j as f64 * dx_out;
        let idx = j.rem_euclid(out_len as i64) as usize;
        let phase = 0.5 * alpha * xs * xs - alpha * xs * p.grid.x_min;
        x.push(xs);
        amplitude.push(prefactor * Complex64::from_polar(1.0, phase) * spectrum[idx]);
    }
    Ok(ScreenAmplitude { x, amplitude })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitConfig {
    /// Centre-to-centre distance `d`, m.
    pub slit_separation: f64,
    /// Slit width `w`, m.
    pub slit_width: f64,
    /// Slit-to-screen distance `L`, m.
    pub screen_distance: f64,
    /// Longitudinal packet speed `v`, m/s.
    pub packet_speed: f64,
}

impl SlitConfig {
    pub fn new(slit_separation: f64, slit_width: f64, screen_distance: f64, packet_speed: f64) -> Result<Self> {
        let c = Self {
            slit_separation,
            slit_width,
            screen_distance,
            packet_speed,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slit_width.is_finite() && self.slit_width > 0.0) {
            return Err(invalid("slit_width", "must be positive"));
        }
        if !(self.slit_separation.is_finite() && self.slit_separation > self.slit_width) {
            return Err(invalid("slit_separation", "must exceed the slit width"));
        }
        if !(self.screen_distance.is_finite() && self.screen_distance > 0.0) {
            return Err(invalid("screen_distance", "must be positive"));
        }
        if !(self.packet_speed.is_finite() && self.packet_speed > 0.0) {
            return Err(invalid("packet_speed", "must be positive"));
        }
        Ok(())
    }

    /// Every length multiplied by `factor`, speed multiplied by `factor`
    /// (propagation time `L/v` unchanged).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            slit_separation: self.slit_separation * factor,
            slit_width: self.slit_width * factor,
            screen_distance: self.screen_distance * factor,
            packet_speed: self.packet_speed * factor,
        }
    }

    pub fn propagation_time(&self) -> f64 {
        self.screen_distance / self.packet_speed
    }
}

/// Matter wavelength `2πℏ/(mv)` that sets the fringe period.
pub fn matter_wavelength(mass: f64, speed: f64, hbar: f64) -> Result<f64> {
    Ok(2.0 * PI * reduced_wavelength(mass, speed, hbar)?)
}

/// Fraunhofer fringe period `λL/d`.
pub fn fraunhofer_spacing(config: &SlitConfig, mass: f64, hbar: f64) -> Result<f64> {
    Ok(matter_wavelength(mass, config.packet_speed, hbar)? * config.screen_distance / config.slit_separation)
}

/// Transverse amplitude just behind the slits: two apertures of width `w`
/// centred at `±d/2` with error-function edges of width `w/10`.
pub fn slit_aperture(grid: Grid1D, config: &SlitConfig, mass: f64, hbar: f64) -> Result<WavePacket> {
    config.validate()?;
    let (d, w) = (config.slit_separation, config.slit_width);
    let edge = w / 10.0;
    let reach = 0.5 * d + 0.5 * w + 8.0 * edge;
    if grid.x_min > -reach || grid.x_max < reach {
        return Err(Error::Precondition(format!(
            "grid [{}, {}] does not contain the slits (±{reach})",
            grid.x_min, grid.x_max
        )));
    }
    let s = edge * std::f64::consts::SQRT_2;
    let slit = |x: f64, c: f64| 0.5 * (erf((x - c + 0.5 * w) / s) - erf((x - c - 0.5 * w) / s));
    let amplitudes = grid
        .positions()
        .iter()
        .map(|&x| Complex64::new(slit(x, -0.5 * d) + slit(x, 0.5 * d), 0.0))
        .collect();
    let packet = WavePacket::new(grid, amplitudes, mass, hbar)?;
    let n = packet.norm_sqr().sqrt();
    let amps = packet.amplitudes.iter().map(|a| a / n).collect();
    Ok(packet.with_amplitudes(amps))
}

/// Intensity on the screen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenPattern {
    pub x: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Matter wavelength `2πℏ/(mv)`, m.
    pub wavelength: f64,
    /// `T = L/v`, s.
    pub propagation_time: f64,
}

impl ScreenPattern {
    /// Peak-to-peak fringe period, from the central maximum and its two
    /// neighbours (parabolic sub-sample refinement).
    pub fn fringe_spacing(&self) -> Result<f64> {
        let n = self.intensity.len();
        if n < 3 {
            return Err(Error::Precondition("screen pattern too short".into()));
        }
        let mut peaks = Vec::new();
        for i in 1..n - 1 {
            let (l, c, r) = (self.intensity[i - 1], self.intensity[i], self.intensity[i + 1]);
            if c > l && c >= r {
                let denom = l - 2.0 * c + r;
                let shift = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
                let h = self.x[i + 1] - self.x[i];
                peaks.push((self.x[i] + shift * h, c));
            }
        }
        let (centre, _) = peaks
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .ok_or_else(|| Error::Precondition("no interference maxima on the screen".into()))?;
        if centre == 0 || centre + 1 >= peaks.len() {
            return Err(Error::Precondition("central maximum has no neighbours on the screen".into()));
        }
        Ok(0.5 * (peaks[centre + 1].0 - peaks[centre - 1].0))
    }

    /// `x_meters,intensity` rows at 17 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_meters,intensity\n");
        for (x, i) in self.x.iter().zip(&self.intensity) {
            out.push_str(&format!("{x:.16e},{i:.16e}\n"));
        }
        out
    }
}

/// Double-slit run with SI ℏ.
pub fn double_slit(config: &SlitConfig, mass: f64, grid: Grid1D) -> Result<ScreenPattern> {
    double_slit_with(config, mass, grid, HBAR)
}

/// Propagates the slit aperture for `T = L/v` and returns `|ψ|²` on the
/// screen within four single-slit lobes of the axis.
///
/// Preconditions: the matter wavelength is resolved (`λ ≥ 8·dx`) and the
/// screen is in the far field (`L ≥ 10·d²/λ`).
pub fn double_slit_with(config: &SlitConfig, mass: f64, grid: Grid1D, hbar: f64) -> Result<ScreenPattern> {
    config.validate()?;
    let wavelength = matter_wavelength(mass, config.packet_speed, hbar)?;
    let dx = grid.dx();
    if wavelength < 8.0 * dx * (1.0 - 1e-9) {
        return Err(Error::Precondition(format!(
            "de Broglie wavelength {wavelength:e} m is not resolved: need λ ≥ 8·dx = {:e} m",
            8.0 * dx
        )));
    }
    let d = config.slit_separation;
    let fresnel_distance = d * d / wavelength;
    if config.screen_distance < 10.0 * fresnel_distance {
        return Err(Error::Precondition(format!(
            "screen at L = {} m is not in the far field: need L ≥ 10·d²/λ = {:e} m",
            config.screen_distance,
            10.0 * fresnel_distance
        )));
    }
    let aperture = slit_aperture(grid, config, mass, hbar)?;
    let t = config.propagation_time();

    // pad so that a fringe spans at least SCREEN_SAMPLES_PER_FRINGE samples
    let min_len = (SCREEN_SAMPLES_PER_FRINGE * d / dx).ceil() as usize;
    let out_len = min_len.max(grid.n_points).next_power_of_two();
    let screen = fresnel_propagate(&aperture, t, out_len)?;

    let half_width = 4.0 * wavelength * config.screen_distance / config.slit_width;
    let (x, intensity) = screen
        .x
        .iter()
        .zip(&screen.amplitude)
        .filter(|(x, _)| x.abs() <= half_width)
        .map(|(x, a)| (*x, a.norm_sqr()))
        .unzip();
    Ok(ScreenPattern {
        x,
        intensity,
        wavelength,
        propagation_time: t,
    })
}

/// Lab-frame and swapped-frame double-slit runs side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSwapReport {
    pub m_s: f64,
    pub m_a: f64,
    /// `√(m_S/m_A)`.
    pub dilation_factor: f64,
    pub lab_spacing: f64,
    pub swapped_spacing: f64,
    /// `lab_spacing · √(m_S/m_A)`.
    pub expected_swapped_spacing: f64,
    pub spacing_relative_error: f64,
    /// `m_S · v · ℏ/(m_S v)` in the lab frame.
    pub lab_debroglie_product: f64,
    /// `m_A · v' · ℏ/(m_A v')` in the swapped frame.
    pub swapped_debroglie_product: f64,
    /// Reduced wavelength of the swapped description, `ℏ/(m_A v')`.
    pub swapped_reduced_wavelength: f64,
    /// `ℏ/(m_A v)`: the swapped wavelength if lengths were not dilated.
    pub undilated_reduced_wavelength: f64,
    pub lab: ScreenPattern,
    pub swapped: ScreenPattern,
}

/// Runs the lab description of S (mass `m_S`) and the description with every
/// length re-expressed through the `√(m_S/m_A)` dilation and the mass replaced
/// by `m_A`.
///
/// The propagation time `T = L/v` is shared by both descriptions, so the
/// speed is re-expressed as `v' = L'/T = v·√(m_S/m_A)`.
pub fn frame_swapped_run(config: &SlitConfig, m_s: f64, m_a: f64, grid: Grid1D) -> Result<FrameSwapReport> {
    frame_swapped_run_with(config, m_s, m_a, grid, HBAR)
}

pub fn frame_swapped_run_with(
    config: &SlitConfig,
    m_s: f64,
    m_a: f64,
    grid: Grid1D,
    hbar: f64,
) -> Result<FrameSwapReport> {
    let factor = dilation_factor(m_s, m_a)?;
    let lab = double_slit_with(config, m_s, grid, hbar)?;

    let swapped_config = config.scaled(factor);
    let swapped_grid = grid.scaled(factor)?;
    let swapped = double_slit_with(&swapped_config, m_a, swapped_grid, hbar)?;

    let lab_spacing = lab.fringe_spacing()?;
    let swapped_spacing = swapped.fringe_spacing()?;
    let expected_swapped_spacing = lab_spacing * factor;

    let v = config.packet_speed;
    let v_swapped = swapped_config.packet_speed;
    let lab_lambda = reduced_wavelength(m_s, v, hbar)?;
    let swapped_lambda = reduced_wavelength(m_a, v_swapped, hbar)?;

    Ok(FrameSwapReport {
        m_s,
        m_a,
        dilation_factor: factor,
        lab_spacing,
        swapped_spacing,
        expected_swapped_spacing,
        spacing_relative_error: (swapped_spacing - expected_swapped_spacing).abs() / expected_swapped_spacing,
        lab_debroglie_product: debroglie_product(m_s, v, lab_lambda),
        swapped_debroglie_product: debroglie_product(m_a, v_swapped, swapped_lambda),
        swapped_reduced_wavelength: swapped_lambda,
        undilated_reduced_wavelength: reduced_wavelength(m_a, v, hbar)?,
        lab,
        swapped,
    })
}
