//! Kinematics between quantum reference frames.
//!
//! Lengths measured by a frame of mass `m_A` and re-expressed in a frame of
//! mass `m_S` scale by `√(m_S / m_A)`. The de Broglie product `m·v·λ` stays
//! equal to ℏ in both frames. The quantum interval and the δ factor are the
//! energy-time counterparts of the Minkowski interval and the Lorentz γ.
//!
//! Everything is computed in SI units. [`NaturalUnits`] rescales actions and
//! energies so that ℏ = 1.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Electron rest mass, kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Planck time, s.
pub const PLANCK_TIME: f64 = 5.391_247e-44;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub m_s: f64,
    pub m_a: f64,
    /// Relative quantum energy, J.
    pub e_q: f64,
    /// Time, s.
    pub t: f64,
    /// Action constant in `E_q t / h`. Defaults to ℏ; the δ factor is written
    /// with `h` although the surrounding relations use ℏ.
    pub h: f64,
}

impl TransformParams {
    pub fn new(m_s: f64, m_a: f64, e_q: f64, t: f64) -> Result<Self> {
        Self::with_action(m_s, m_a, e_q, t, HBAR)
    }

    pub fn with_action(m_s: f64, m_a: f64, e_q: f64, t: f64, h: f64) -> Result<Self> {
        positive("m_s", m_s)?;
        positive("m_a", m_a)?;
        positive("h", h)?;
        if !e_q.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite("energy or time"));
        }
        Ok(Self { m_s, m_a, e_q, t, h })
    }

    /// `E_q · t / h`, the quantum analogue of `v / c`.
    pub fn ratio(&self) -> f64 {
        self.e_q * self.t / self.h
    }
}

/// Factor `√(m_S / m_A)` by which lengths in A's frame are re-expressed in S's.
pub fn dilation_factor(m_s: f64, m_a: f64) -> Result<f64> {
    positive("m_s", m_s)?;
    positive("m_a", m_a)?;
    Ok((m_s / m_a).sqrt())
}

/// Separation `Δx` in A's coordinates seen from S: `Δx · √(m_S / m_A)`.
pub fn dilate_length(dx: f64, m_s: f64, m_a: f64) -> Result<f64> {
    Ok(dx * dilation_factor(m_s, m_a)?)
}

/// `m · v · λ`.
pub fn debroglie_product(m: f64, v: f64, lambda: f64) -> f64 {
    m * v * lambda
}

/// Reduced de Broglie wavelength `ℏ / (m v)`.
pub fn reduced_wavelength(m: f64, v: f64, hbar: f64) -> Result<f64> {
    positive("m", m)?;
    positive("v", v)?;
    positive("hbar", hbar)?;
    Ok(hbar / (m * v))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeBroglieSwap {
    /// `ℏ / (m_S v)`: S as described by A.
    pub lambda_forward: f64,
    /// `ℏ / (m_A v)`: A as described by S.
    pub lambda_backward: f64,
    pub product_forward: f64,
    pub product_backward: f64,
    /// `λ_backward` expressed in A's dilated coordinates, `λ_backward · √(m_A/m_S)`.
    pub magnified_backward: f64,
}

/// De Broglie wavelengths in both directions of a frame swap at a shared
/// relative speed `v`.
pub fn frame_swap_debroglie(m_s: f64, m_a: f64, v: f64) -> Result<DeBroglieSwap> {
    frame_swap_debroglie_with(m_s, m_a, v, HBAR)
}

pub fn frame_swap_debroglie_with(m_s: f64, m_a: f64, v: f64, hbar: f64) -> Result<DeBroglieSwap> {
    let lambda_forward = reduced_wavelength(m_s, v, hbar)?;
    let lambda_backward = reduced_wavelength(m_a, v, hbar)?;
    let magnified_backward = lambda_backward / dilate_length(1.0, m_s, m_a)?;
    Ok(DeBroglieSwap {
        lambda_forward,
        lambda_backward,
        product_forward: debroglie_product(m_s, v, lambda_forward),
        product_backward: debroglie_product(m_a, v, lambda_backward),
        magnified_backward,
    })
}

/// Two quantum observations separated by `dt`, at energies `j1`, `j2`.
/// The associated lengths are `λ_i = 1/J_i` (ℏ⁻¹ playing the role of c).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumInterval {
    pub dt: f64,
    pub j1: f64,
    pub j2: f64,
}

impl QuantumInterval {
    pub fn new(dt: f64, j1: f64, j2: f64) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::NonFinite("dt"));
        }
        positive("j1", j1)?;
        positive("j2", j2)?;
        Ok(Self { dt, j1, j2 })
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (1.0 / self.j1, 1.0 / self.j2)
    }
}

/// `ν = ((Δt)² + (Δλ / (λ₁λ₂))²)^½`.
///
/// With `λ_i = 1/J_i`, `Δλ / (λ₁λ₂)` collapses to `J₁ − J₂`; that form is
/// used to avoid the round-off of the reciprocals.
pub fn quantum_interval(q: &QuantumInterval) -> f64 {
    q.dt.hypot(q.j1 - q.j2)
}

fn lorentz_like(x: f64, name: &'static str) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if x.abs() >= 1.0 {
        return Err(Error::Singular { name, value: x.abs() });
    }
    Ok(1.0 / (1.0 - x * x).sqrt())
}

/// Lorentz factor `1/√(1 − v²/c²)`.
pub fn gamma_factor(v: f64, c: f64) -> Result<f64> {
    positive("c", c)?;
    lorentz_like(v / c, "v/c")
}

/// `δ = 1/√(1 − (E_q t / h)²)`.
pub fn delta_factor(p: &TransformParams) -> Result<f64> {
    lorentz_like(p.ratio(), "E_q t/h")
}

/// Displacement along the five measurement parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveDisplacement {
    pub da: f64,
    pub db: f64,
    pub dc: f64,
    pub dd: f64,
    pub de: f64,
}

impl FiveDisplacement {
    pub fn new(components: [f64; 5]) -> Result<Self> {
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("five-displacement"));
        }
        let [da, db, dc, dd, de] = components;
        Ok(Self { da, db, dc, dd, de })
    }

    pub fn components(&self) -> [f64; 5] {
        [self.da, self.db, self.dc, self.dd, self.de]
    }
}

/// All-plus flat 5-interval.
pub fn flat_5_interval(d: &FiveDisplacement) -> f64 {
    d.components().iter().fold(0.0_f64, |acc, &c| acc.hypot(c))
}

/// Rescaling between SI and units with ℏ = 1.
///
/// Only the action scale changes; lengths and times keep their SI values, so
/// an energy `E` in natural units is `E · (time unit) / ℏ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaturalUnits {
    pub hbar: f64,
}

impl Default for NaturalUnits {
    fn default() -> Self {
        Self { hbar: HBAR }
    }
}

impl NaturalUnits {
    pub fn action_to_natural(&self, action_si: f64) -> f64 {
        action_si / self.hbar
    }

    pub fn action_to_si(&self, action_natural: f64) -> f64 {
        action_natural * self.hbar
    }

    /// Energy in units of ℏ per second.
    pub fn energy_to_natural(&self, energy_si: f64) -> f64 {
        energy_si / self.hbar
    }

    pub fn energy_to_si(&self, energy_natural: f64) -> f64 {
        energy_natural * self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn equal_masses_leave_lengths_unchanged() {
        assert_eq!(dilate_length(1.7, 3.0, 3.0).unwrap(), 1.7);
    }

    #[test]
    fn quarter_mass_ratio_halves_length() {
        assert_abs_diff_eq!(dilate_length(1.0, 1.0, 4.0).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn electron_against_one_kilogram() {
        let d = dilate_length(1.0, 9.109e-31, 1.0).unwrap();
        assert_relative_eq!(d, 9.544e-16, max_relative = 1e-4);
    }

    #[test]
    fn nonpositive_mass_is_rejected() {
        assert!(dilate_length(1.0, 0.0, 1.0).is_err());
        assert!(dilate_length(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn dilation_composes_over_three_masses() {
        let (m1, m2, m3) = (2.0, 7.5, 0.3);
        let two_step = dilate_length(dilate_length(1.25, m1, m2).unwrap(), m2, m3).unwrap();
        let direct = dilate_length(1.25, m1, m3).unwrap();
        assert_relative_eq!(two_step, direct, max_relative = 1e-15);
    }

    #[test]
    fn debroglie_product_definitional_inverse() {
        let (m, v) = (ELECTRON_MASS, 1.0e6);
        let lambda = HBAR / (m * v);
        assert_relative_eq!(debroglie_product(m, v, lambda), HBAR, max_relative = 1e-15);
        assert_eq!(debroglie_product(1.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn electron_debroglie_product() {
        let p = debroglie_product(ELECTRON_MASS, 1.0e6, 1.157e-10);
        assert_relative_eq!(p, 1.054e-34, max_relative = 1e-3);
    }

    #[test]
    fn frame_swap_symmetric_for_equal_masses() {
        let s = frame_swap_debroglie(2.0, 2.0, 3.0).unwrap();
        assert_eq!(s.lambda_forward, s.lambda_backward);
    }

    #[test]
    fn frame_swap_magnification() {
        let s = frame_swap_debroglie(1.0, 1.0e4, 5.0).unwrap();
        assert_relative_eq!(s.lambda_backward, s.lambda_forward * 1e-4, max_relative = 1e-14);
        assert_relative_eq!(s.magnified_backward, s.lambda_forward * 1e-2, max_relative = 1e-14);
        assert_relative_eq!(s.product_forward, HBAR, max_relative = 1e-15);
        assert_relative_eq!(s.product_backward, HBAR, max_relative = 1e-15);
    }

    #[test]
    fn frame_swap_rejects_nonpositive_speed() {
        assert!(frame_swap_debroglie(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn interval_examples() {
        assert_eq!(quantum_interval(&QuantumInterval::new(-2.5, 4.0, 4.0).unwrap()), 2.5);
        assert_eq!(quantum_interval(&QuantumInterval::new(3.0, 5.0, 1.0).unwrap()), 5.0);
        assert_eq!(quantum_interval(&QuantumInterval::new(0.0, 2.0, 2.0).unwrap()), 0.0);
    }

    #[test]
    fn interval_reciprocal_route_agrees() {
        // Δλ/(λ₁λ₂) computed literally from the wavelengths.
        let q = QuantumInterval::new(3.0, 5.0, 1.0).unwrap();
        let (l1, l2) = q.lambdas();
        let dl = l2 - l1;
        assert_abs_diff_eq!(dl / (l1 * l2), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn interval_rejects_nonpositive_energy() {
        assert!(QuantumInterval::new(1.0, 0.0, 1.0).is_err());
        assert!(QuantumInterval::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_factor(0.0, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(gamma_factor(0.6, 1.0).unwrap(), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma_factor(0.99, 1.0).unwrap(), 7.0888, epsilon = 1e-4);
        assert!(matches!(gamma_factor(1.0, 1.0), Err(Error::Singular { .. })));
        assert!(matches!(gamma_factor(-1.5, 1.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn delta_values() {
        let p = TransformParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(delta_factor(&p).unwrap(), 1.0);
        let p = TransformParams::with_action(1.0, 1.0, 0.6, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(delta_factor(&p).unwrap(), 1.25, epsilon = 1e-15);
        let p = TransformParams::with_action(1.0, 1.0, 2.0, 0.5, 1.0).unwrap();
        assert!(matches!(delta_factor(&p), Err(Error::Singular { .. })));
    }

    #[test]
    fn delta_defaults_to_hbar() {
        let p = TransformParams::new(1.0, 1.0, 0.6 * HBAR, 1.0).unwrap();
        assert_abs_diff_eq!(delta_factor(&p).unwrap(), 1.25, epsilon = 1e-12);
    }

    #[test]
    fn five_interval_examples() {
        assert_eq!(flat_5_interval(&FiveDisplacement::new([0.0; 5]).unwrap()), 0.0);
        assert_eq!(flat_5_interval(&FiveDisplacement::new([3.0, 4.0, 0.0, 0.0, 0.0]).unwrap()), 5.0);
        assert!(FiveDisplacement::new([f64::NAN, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn natural_units_round_trip() {
        let u = NaturalUnits::default();
        assert_relative_eq!(u.action_to_natural(HBAR), 1.0, max_relative = 1e-15);
        assert_relative_eq!(u.action_to_si(u.action_to_natural(3.3e-34)), 3.3e-34, max_relative = 1e-15);
        assert_relative_eq!(u.energy_to_si(u.energy_to_natural(1e-20)), 1e-20, max_relative = 1e-15);
    }
}
