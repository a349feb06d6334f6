use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spectral efficiency of every user (bit/s/Hz) and their sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeReport {
    pub per_user_se: Vec<f64>,
    pub capacity: f64,
    pub prefactor: f64,
}

/// `prefactor * mean(log2(1 + gamma))` per user; `samples[k]` holds user
/// `k`'s SINR samples.
pub fn se_with_prefactor(samples: &[Vec<f64>], prefactor: f64) -> Result<SeReport> {
    if samples.is_empty() || samples.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySamples);
    }
    let per_user_se: Vec<f64> = samples
        .iter()
        .map(|s| prefactor * s.iter().map(|g| (1.0 + g).log2()).sum::<f64>() / s.len() as f64)
        .collect();
    let capacity = per_user_se.iter().sum();
    Ok(SeReport {
        per_user_se,
        capacity,
        prefactor,
    })
}

/// SE with the `1 - tau_p / tau_u` pre-log factor.
pub fn se_per_user(samples: &[Vec<f64>], tau_p: usize, tau_u: usize) -> Result<SeReport> {
    se_with_prefactor(samples, 1.0 - tau_p as f64 / tau_u as f64)
}
