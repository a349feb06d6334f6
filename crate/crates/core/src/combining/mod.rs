//! Receive combiners and uplink power control.

mod centralized;
mod hierarchical;
mod power;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_condition, CMatrix, HermitianSolver};

pub use centralized::{centralized_combiner, CentralizedCombiner};
pub use hierarchical::{hierarchical_combiners, HierarchicalCombiner};
pub use power::{maxmin_power_control, MaxMinOptions, PowerCoefficients, SinrCoefficients};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    MR,
    ZF,
    MMSE,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::MR => "MR",
            Scheme::ZF => "ZF",
            Scheme::MMSE => "MMSE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Centralized,
    Hierarchical,
}

/// Gram matrices worse conditioned than this make ZF meaningless.
pub const MAX_CONDITION: f64 = 1e12;

/// Detection vectors for every user.
#[derive(Clone, Debug, PartialEq)]
pub enum CombinerSet {
    /// Column `k` of `d` (`M x K`) is `d_k` over all stacked antennas.
    Centralized { scheme: Scheme, d: CMatrix },
    /// `nodes[n]` is `antennas_n x K`; column `k` is `v_kn`.
    Hierarchical { scheme: Scheme, nodes: Vec<CMatrix> },
}

impl CombinerSet {
    pub fn scheme(&self) -> Scheme {
        match self {
            CombinerSet::Centralized { scheme, .. } | CombinerSet::Hierarchical { scheme, .. } => *scheme,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            CombinerSet::Centralized { .. } => Mode::Centralized,
            CombinerSet::Hierarchical { .. } => Mode::Hierarchical,
        }
    }
}

/// `H (H^H H)^{-1}`, the ZF pseudo-inverse with `D^H H = I`.
fn zero_forcing(h: &CMatrix) -> Result<CMatrix> {
    let (m, k) = h.shape();
    if k > m {
        return Err(Error::Unsupported(format!("ZF needs K <= antennas, got K = {k} > {m}")));
    }
    let gram = h.adjoint() * h;
    let cond = hermitian_condition(&gram);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::DegenerateDrop(format!("ZF Gram condition number {cond:e}")));
    }
    let solver = HermitianSolver::new(gram).map_err(|e| Error::DegenerateDrop(e.to_string()))?;
    Ok(h * solver.inverse())
}
