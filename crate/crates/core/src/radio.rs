//! First-order radio energy model.
//!
//! Transmitting `k` bits over `d` meters costs `k*E_elec + k*eps_fs*d^2`
//! below the crossover distance `d0` and `k*E_elec + k*eps_mp*d^4` at or
//! beyond it. Receiving costs `k*E_elec`; aggregating `n` frames costs
//! `k*E_DA*n`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioParams {
    /// Electronics energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier energy, J/bit/m^2.
    pub eps_fs: f64,
    /// Multipath amplifier energy, J/bit/m^4.
    pub eps_mp: f64,
    /// Aggregation energy, J/bit/signal.
    pub e_da: f64,
    /// Crossover distance between the d^2 and d^4 regimes, m.
    pub d0: f64,
    pub msg_bits: u64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            e_elec: 5e-9,
            eps_fs: 10e-12,
            eps_mp: 0.0013e-12,
            e_da: 5e-9,
            d0: 70.0,
            msg_bits: 4000,
        }
    }
}

impl RadioParams {
    /// `sqrt(eps_fs / eps_mp)`, where the two amplifier laws meet.
    pub fn canonical_crossover(&self) -> f64 {
        (self.eps_fs / self.eps_mp).sqrt()
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (name, v) in [
            ("e_elec", self.e_elec),
            ("eps_fs", self.eps_fs),
            ("eps_mp", self.eps_mp),
            ("e_da", self.e_da),
            ("d0", self.d0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::invalid(
                    format!("{prefix}.{name}"),
                    format!("{v} must be > 0"),
                ));
            }
        }
        if self.msg_bits == 0 {
            return Err(SimError::invalid(
                format!("{prefix}.msg_bits"),
                "must be > 0",
            ));
        }
        Ok(())
    }
}

pub fn tx_cost(params: &RadioParams, bits: u64, d: f64) -> f64 {
    let k = bits as f64;
    let amp = if d < params.d0 {
        params.eps_fs * d * d
    } else {
        params.eps_mp * d.powi(4)
    };
    k * params.e_elec + k * amp
}

pub fn rx_cost(params: &RadioParams, bits: u64) -> f64 {
    bits as f64 * params.e_elec
}

/// `n_signals` counts every frame folded into the aggregate, including the
/// cluster head's own.
pub fn aggregation_cost(params: &RadioParams, bits: u64, n_signals: usize) -> f64 {
    bits as f64 * params.e_da * n_signals as f64
}
