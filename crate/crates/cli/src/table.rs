//! Tabulated frame transformations over a sweep of mass pairs and energies.

use qrel_core::transforms::{
    delta_factor, dilation_factor, frame_swap_debroglie_with, gamma_factor, TransformParams, HBAR, SPEED_OF_LIGHT,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn unit() -> f64 {
    1.0
}

fn hbar_si() -> f64 {
    HBAR
}

/// Sweep definition. Energies are paired with `time` and `action` to form
/// the ratio `E_q·t/h`; the de Broglie columns use `speed` and `hbar`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRequest {
    pub mass_pairs: Vec<[f64; 2]>,
    pub energies: Vec<f64>,
    #[serde(default = "unit")]
    pub time: f64,
    #[serde(default = "unit")]
    pub action: f64,
    #[serde(default = "unit")]
    pub speed: f64,
    #[serde(default = "hbar_si")]
    pub hbar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub m_s: f64,
    pub m_a: f64,
    pub dilation: f64,
    pub lambda_forward: f64,
    pub lambda_backward: f64,
    pub product_forward: f64,
    pub product_backward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub e_q: f64,
    /// `E_q·t/h`.
    pub ratio: f64,
    pub delta: f64,
    /// Lorentz factor at `v/c` equal to the same ratio.
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformTable {
    pub pairs: Vec<PairRow>,
    pub energies: Vec<EnergyRow>,
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {x}")))
    }
}

pub fn transform_table(req: &TableRequest) -> CliResult<TransformTable> {
    positive("time", req.time)?;
    positive("action", req.action)?;
    positive("speed", req.speed)?;
    positive("hbar", req.hbar)?;
    let mut pairs = Vec::with_capacity(req.mass_pairs.len());
    for (i, &[m_s, m_a]) in req.mass_pairs.iter().enumerate() {
        positive(&format!("mass_pairs[{i}][0]"), m_s)?;
        positive(&format!("mass_pairs[{i}][1]"), m_a)?;
        let swap = frame_swap_debroglie_with(m_s, m_a, req.speed, req.hbar)?;
        pairs.push(PairRow {
            m_s,
            m_a,
            dilation: dilation_factor(m_s, m_a)?,
            lambda_forward: swap.lambda_forward,
            lambda_backward: swap.lambda_backward,
            product_forward: swap.product_forward,
            product_backward: swap.product_backward,
        });
    }
    let mut energies = Vec::with_capacity(req.energies.len());
    for (i, &e_q) in req.energies.iter().enumerate() {
        if !(e_q.is_finite() && e_q >= 0.0) {
            return Err(CliError::Config(format!("energies[{i}] must be nonnegative, got {e_q}")));
        }
        let params = TransformParams::with_action(1.0, 1.0, e_q, req.time, req.action)?;
        let ratio = params.ratio();
        energies.push(EnergyRow {
            e_q,
            ratio,
            delta: delta_factor(&params)?,
            gamma: gamma_factor(ratio * SPEED_OF_LIGHT, SPEED_OF_LIGHT)?,
        });
    }
    Ok(TransformTable { pairs, energies })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(mass_pairs: Vec<[f64; 2]>, energies: Vec<f64>) -> TableRequest {
        TableRequest {
            mass_pairs,
            energies,
            time: 1.0,
            action: 1.0,
            speed: 1.0,
            hbar: HBAR,
        }
    }

    #[test]
    fn identity_pair_and_zero_energy() {
        let t = transform_table(&request(vec![[1.0, 1.0]], vec![0.0])).unwrap();
        assert_eq!(t.pairs[0].dilation, 1.0);
        assert_eq!(t.energies[0].delta, 1.0);
    }

    #[test]
    fn quarter_mass_ratio_halves_lengths() {
        let t = transform_table(&request(vec![[1.0, 4.0]], vec![])).unwrap();
        assert_eq!(t.pairs[0].dilation, 0.5);
        assert!((t.pairs[0].product_backward - HBAR).abs() / HBAR < 1e-12);
    }

    #[test]
    fn ratio_point_six_gives_five_quarters() {
        let t = transform_table(&request(vec![], vec![0.6])).unwrap();
        assert!((t.energies[0].delta - 1.25).abs() < 1e-12);
        assert!((t.energies[0].gamma - 1.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_entries() {
        assert!(matches!(transform_table(&request(vec![[0.0, 1.0]], vec![])), Err(CliError::Config(_))));
        assert!(matches!(transform_table(&request(vec![], vec![-1.0])), Err(CliError::Config(_))));
        assert!(matches!(transform_table(&request(vec![], vec![1.0])), Err(CliError::Precondition(_))));
    }
}
