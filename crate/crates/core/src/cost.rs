//! Complex-multiplication counts per channel use and fronthaul load per
//! coherence block.
//!
//! Per-block work (Gram matrices, inversions, factorizations) is amortized
//! over the `tau_u` data channel uses and added to the `K M` per-use
//! detection cost. Reported counts round the amortized value up.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combining::{Mode, Scheme};
use crate::error::{Error, Result};
use crate::scenario::{Architecture, SystemConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodType {
    /// Centralized processing (HCF, CF or cellular).
    Centralized,
    /// Local per-AP processing in CF.
    DistributedCf,
    /// Local per-node processing in HCF.
    Hierarchical,
}

impl MethodType {
    pub fn for_system(architecture: Architecture, mode: Mode) -> Result<Self> {
        match (architecture, mode) {
            (_, Mode::Centralized) => Ok(MethodType::Centralized),
            (Architecture::Hcf, Mode::Hierarchical) => Ok(MethodType::Hierarchical),
            (Architecture::Cf, Mode::Hierarchical) => Ok(MethodType::DistributedCf),
            (Architecture::Cellular, Mode::Hierarchical) => Err(Error::Unsupported(
                "cellular systems have no distributed processing".into(),
            )),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MethodType::Centralized => "Centralized HCF/CF & Cellular",
            MethodType::DistributedCf => "Distributed CF",
            MethodType::Hierarchical => "HCF",
        }
    }
}

impl FromStr for MethodType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "centralized" => Ok(MethodType::Centralized),
            "distributed" | "distributed_cf" | "local" => Ok(MethodType::DistributedCf),
            "hierarchical" | "hier" | "hcf" => Ok(MethodType::Hierarchical),
            other => Err(Error::Config(format!("unknown method type {other:?}"))),
        }
    }
}

impl fmt::Display for MethodType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Dimensions entering the cost formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostParams {
    pub m: u64,
    pub k: u64,
    pub n_a: u64,
    pub n_b: u64,
    pub l: u64,
    pub tau_p: u64,
    pub tau_u: u64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            m: 384,
            k: 16,
            n_a: 4,
            n_b: 96,
            l: 72,
            tau_p: 8,
            tau_u: 192,
        }
    }
}

impl From<&SystemConfig> for CostParams {
    fn from(c: &SystemConfig) -> Self {
        CostParams {
            m: c.m as u64,
            k: c.k as u64,
            n_a: c.n_a as u64,
            n_b: c.n_b as u64,
            l: c.l as u64,
            tau_p: c.tau_p as u64,
            tau_u: c.tau_u as u64,
        }
    }
}

/// Multiplication count as `per_block / tau_u + per_use`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Complexity {
    pub per_block: u128,
    pub per_use: u128,
    pub tau_u: u128,
}

impl Complexity {
    pub fn exact(&self) -> f64 {
        self.per_block as f64 / self.tau_u as f64 + self.per_use as f64
    }

    /// Amortized count rounded up to an integer.
    pub fn reported(&self) -> u64 {
        (self.per_block.div_ceil(self.tau_u) + self.per_use) as u64
    }
}

pub fn complexity(method: MethodType, scheme: Scheme, p: &CostParams) -> Result<Complexity> {
    if p.tau_u == 0 {
        return Err(Error::Domain("tau_u must be positive".into()));
    }
    if matches!(method, MethodType::DistributedCf) && p.n_a == 0 {
        return Err(Error::Domain("local processing needs N_a > 0".into()));
    }
    let (m, k, n_a, n_b, l) = (p.m as u128, p.k as u128, p.n_a as u128, p.n_b as u128, p.l as u128);
    let detection = k * m;
    let per_block = match (method, scheme) {
        (_, Scheme::MR) => 0,
        (MethodType::Centralized, Scheme::ZF) => 2 * k * k * m + k * k * k,
        (MethodType::Centralized, Scheme::MMSE) => m * m * m + 2 * k * m * m,
        // K^3 M / N_a: one K x K inversion per AP
        (MethodType::DistributedCf, Scheme::ZF) => 2 * k * k * m + k * k * k * m / n_a,
        (MethodType::DistributedCf, Scheme::MMSE) => m * n_a * n_a + 2 * k * m * n_a,
        (MethodType::Hierarchical, Scheme::ZF) => 2 * k * k * m + k * k * k * (l + 1),
        (MethodType::Hierarchical, Scheme::MMSE) => {
            l * (n_a * n_a * n_a + 2 * k * n_a * n_a) + (n_b * n_b * n_b + 2 * k * n_b * n_b)
        }
    };
    Ok(Complexity {
        per_block,
        per_use: detection,
        tau_u: p.tau_u as u128,
    })
}

/// Reported (rounded-up) multiplications per channel use.
pub fn complexity_count(method: MethodType, scheme: Scheme, p: &CostParams) -> Result<u64> {
    Ok(complexity(method, scheme, p)?.reported())
}

/// Complex scalars sent between the distributed sites and the central unit
/// per coherence block.
pub fn fronthaul_overhead(architecture: Architecture, mode: Mode, p: &CostParams) -> u64 {
    match (architecture, mode) {
        (Architecture::Cellular, _) => 0,
        // pilot and data samples of every eAP antenna
        (Architecture::Hcf, Mode::Centralized) => p.l * p.n_a * (p.tau_p + p.tau_u),
        // one soft estimate per user per eAP per data channel use
        (Architecture::Hcf, Mode::Hierarchical) => p.k * p.l * p.tau_u,
        (Architecture::Cf, Mode::Centralized) => p.m * (p.tau_p + p.tau_u),
        (Architecture::Cf, Mode::Hierarchical) => p.m * p.tau_u,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub architecture: Architecture,
    pub mode: Mode,
    pub scheme: Scheme,
    /// Amortized multiplications per channel use, unrounded.
    pub complexity_mults: f64,
    pub complexity_reported: u64,
    pub fronthaul_scalars: u64,
}

pub fn cost_report(architecture: Architecture, mode: Mode, scheme: Scheme, p: &CostParams) -> Result<CostReport> {
    let c = complexity(MethodType::for_system(architecture, mode)?, scheme, p)?;
    Ok(CostReport {
        architecture,
        mode,
        scheme,
        complexity_mults: c.exact(),
        complexity_reported: c.reported(),
        fronthaul_scalars: fronthaul_overhead(architecture, mode, p),
    })
}

/// The 3x3 complexity table: rows are method types, columns MR/ZF/MMSE.
pub fn complexity_table(p: &CostParams) -> Result<Vec<(MethodType, [u64; 3])>> {
    [MethodType::Centralized, MethodType::DistributedCf, MethodType::Hierarchical]
        .into_iter()
        .map(|method| {
            let mut row = [0u64; 3];
            for (slot, scheme) in row.iter_mut().zip([Scheme::MR, Scheme::ZF, Scheme::MMSE]) {
                *slot = complexity_count(method, scheme, p)?;
            }
            Ok((method, row))
        })
        .collect()
}
