//! Correlated Rayleigh sampling, pilot observations and linear MMSE
//! estimation under pilot contamination.
//!
//! Pilot sequences are never materialised. The despread observation of the
//! users on pilot `p` at node `n` is
//! `psi = sqrt(p_u) * tau_p * sum_{k in P} h_k + n`, `n ~ CN(0, tau_p sigma^2 I)`,
//! whose covariance is `tau_p * Gamma`. With this scaling the estimator
//! `h_hat = sqrt(p_u) R Gamma^{-1} psi` has covariance
//! `p_u tau_p R Gamma^{-1} R`.

use rand::Rng;

use super::pilots::PilotAssignment;
use crate::error::{Error, Result};
use crate::linalg::{col, complex_normal_vector, hermitian_sqrt, matmul, psd_factor, BlockDiag, CMatrix, CVector, HermitianSolver, C64};
use crate::scenario::Drop;

/// Draws `h = R^{1/2} w` with `w ~ CN(0, I)`.
pub fn sample_channel<R: Rng + ?Sized>(r: &CMatrix, rng: &mut R) -> Result<CVector> {
    let root = hermitian_sqrt(r)?;
    Ok(&root * complex_normal_vector(r.nrows(), rng))
}

/// `Gamma = p_u tau_p sum_{k in cohort} R_k + sigma^2 I` at one node.
pub fn pilot_covariance(drop: &Drop, node: usize, cohort: &[usize], p_u: f64, tau_p: usize, sigma2: f64) -> CMatrix {
    let n = drop.layout.nodes[node].antennas;
    let mut gamma = CMatrix::identity(n, n) * C64::new(sigma2, 0.0);
    let scale = C64::new(p_u * tau_p as f64, 0.0);
    for &k in cohort {
        gamma += &drop.r[k][node] * scale;
    }
    gamma
}

/// Stacks per-node blocks vertically (node 0 on top).
pub fn stack_nodes(blocks: &[CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let mut out = CMatrix::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        out.rows_mut(off, b.nrows()).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Pilot observations for channels `h` (one `antennas x K` matrix per
/// node). Returns one `antennas x tau_p` matrix per node, column `p` being
/// the observation of pilot `p`. `sigma2 = 0` gives noise-free observations.
pub fn pilot_observation<R: Rng + ?Sized>(
    h: &[CMatrix],
    assignment: &PilotAssignment,
    p_u: f64,
    sigma2: f64,
    rng: &mut R,
) -> Vec<CMatrix> {
    let tau_p = assignment.tau_p();
    let signal = C64::new(p_u.sqrt() * tau_p as f64, 0.0);
    let noise = (tau_p as f64 * sigma2).sqrt();
    h.iter()
        .map(|h_node| {
            let n = h_node.nrows();
            let mut psi = CMatrix::zeros(n, tau_p);
            for p in 0..tau_p {
                let mut column = psi.column_mut(p);
                for &k in assignment.users_on(p) {
                    column += h_node.column(k) * signal;
                }
                if noise > 0.0 {
                    column += complex_normal_vector(n, rng) * C64::new(noise, 0.0);
                }
            }
            psi
        })
        .collect()
}

/// One small-scale realization.
#[derive(Clone, Debug)]
pub struct ChannelState {
    /// True channels, `antennas x K` per node.
    pub h: Vec<CMatrix>,
    /// Observations, `antennas x tau_p` per node.
    pub psi: Vec<CMatrix>,
    /// Estimates, `antennas x K` per node.
    pub h_hat: Vec<CMatrix>,
}

impl ChannelState {
    pub fn h_hat(&self, k: usize, node: usize) -> &[C64] {
        col(&self.h_hat[node], k)
    }

    pub fn h(&self, k: usize, node: usize) -> &[C64] {
        col(&self.h[node], k)
    }

    /// `M x K` matrix of stacked estimates.
    pub fn stacked_h_hat(&self) -> CMatrix {
        stack_nodes(&self.h_hat)
    }

    pub fn stacked_h(&self) -> CMatrix {
        stack_nodes(&self.h)
    }
}

/// Everything about estimation that depends only on a drop: covariance factors
/// for sampling, the estimator matrices `sqrt(p_u) R Gamma^{-1}` and the
/// error covariances `Theta`. One factorisation of `Gamma` per
/// (pilot, node).
pub struct ChannelStatistics {
    assignment: PilotAssignment,
    antennas: Vec<usize>,
    p_u: f64,
    sigma2: f64,
    factor_r: Vec<Vec<CMatrix>>,
    estimator: Vec<Vec<CMatrix>>,
    theta: Vec<BlockDiag>,
}

impl ChannelStatistics {
    pub fn new(drop: &Drop, assignment: &PilotAssignment, p_u: f64, sigma2: f64) -> Result<Self> {
        let k_users = drop.users();
        if assignment.users() != k_users {
            return Err(Error::Dimension(format!(
                "pilot assignment covers {} users, drop has {k_users}",
                assignment.users()
            )));
        }
        let tau_p = assignment.tau_p();
        let n_nodes = drop.nodes();
        let factor_r = drop
            .r
            .iter()
            .map(|row| row.iter().map(psd_factor).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;

        let pu_tau = C64::new(p_u * tau_p as f64, 0.0);
        let sqrt_pu = C64::new(p_u.sqrt(), 0.0);
        let mut estimator = vec![Vec::with_capacity(n_nodes); k_users];
        let mut theta_blocks = vec![Vec::with_capacity(n_nodes); k_users];
        for node in 0..n_nodes {
            let mut per_user: Vec<Option<(CMatrix, CMatrix)>> = vec![None; k_users];
            for p in assignment.used_pilots() {
                let cohort = assignment.users_on(p);
                let gamma = pilot_covariance(drop, node, cohort, p_u, tau_p, sigma2);
                let gamma_inv = HermitianSolver::new(gamma)
                    .map_err(|_| Error::Numeric(format!("pilot covariance of pilot {p} at node {node} is singular")))?
                    .inverse();
                for &k in cohort {
                    let r = &drop.r[k][node];
                    // Gamma^{-1} R; its adjoint is R Gamma^{-1}
                    let g_inv_r = matmul(&gamma_inv, r);
                    let w = g_inv_r.adjoint() * sqrt_pu;
                    let mut th = r - matmul(r, &g_inv_r) * pu_tau;
                    th = (&th + th.adjoint()) * C64::new(0.5, 0.0);
                    per_user[k] = Some((w, th));
                }
            }
            for (k, entry) in per_user.into_iter().enumerate() {
                let (w, th) = entry.expect("every user has a pilot");
                estimator[k].push(w);
                theta_blocks[k].push(th);
            }
        }
        Ok(ChannelStatistics {
            assignment: assignment.clone(),
            antennas: drop.layout.antenna_counts(),
            p_u,
            sigma2,
            factor_r,
            estimator,
            theta: theta_blocks.into_iter().map(BlockDiag::new).collect(),
        })
    }

    pub fn users(&self) -> usize {
        self.estimator.len()
    }

    pub fn antennas(&self) -> &[usize] {
        &self.antennas
    }

    pub fn assignment(&self) -> &PilotAssignment {
        &self.assignment
    }

    /// `sqrt(p_u) R_kn Gamma_kn^{-1}`
    pub fn estimator(&self, k: usize, node: usize) -> &CMatrix {
        &self.estimator[k][node]
    }

    pub fn theta(&self, k: usize, node: usize) -> &CMatrix {
        &self.theta[k].blocks()[node]
    }

    /// `Theta_k = diag(Theta_k0, ..., Theta_kL)` over the stacked antennas.
    pub fn theta_stacked(&self, k: usize) -> &BlockDiag {
        &self.theta[k]
    }

    pub fn theta_all(&self) -> &[BlockDiag] {
        &self.theta
    }

    pub fn sample_channels<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<CMatrix> {
        let k_users = self.users();
        self.antennas
            .iter()
            .enumerate()
            .map(|(node, &n)| {
                let mut h = CMatrix::zeros(n, k_users);
                for k in 0..k_users {
                    let f = &self.factor_r[k][node];
                    let w = complex_normal_vector(f.ncols(), rng);
                    h.column_mut(k).copy_from(&(f * w));
                }
                h
            })
            .collect()
    }

    /// Applies the MMSE estimator to observations from [`pilot_observation`].
    pub fn estimate(&self, psi: &[CMatrix]) -> Result<Vec<CMatrix>> {
        if psi.len() != self.antennas.len() {
            return Err(Error::Dimension(format!(
                "observations for {} nodes, expected {}",
                psi.len(),
                self.antennas.len()
            )));
        }
        let k_users = self.users();
        psi.iter()
            .enumerate()
            .map(|(node, psi_node)| {
                let n = self.antennas[node];
                if psi_node.nrows() != n || psi_node.ncols() != self.assignment.tau_p() {
                    return Err(Error::Dimension(format!("observation block at node {node}")));
                }
                let mut h_hat = CMatrix::zeros(n, k_users);
                for k in 0..k_users {
                    let p = self.assignment.pilot_of(k);
                    h_hat
                        .column_mut(k)
                        .copy_from(&(&self.estimator[k][node] * psi_node.column(p)));
                }
                Ok(h_hat)
            })
            .collect()
    }

    /// Draws channels, observes pilots and estimates.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ChannelState> {
        let h = self.sample_channels(rng);
        let psi = pilot_observation(&h, &self.assignment, self.p_u, self.sigma2, rng);
        let h_hat = self.estimate(&psi)?;
        Ok(ChannelState { h, psi, h_hat })
    }
}

/// Estimates and their error covariances for given observations.
pub struct Estimates {
    /// `antennas x K` per node.
    pub h_hat: Vec<CMatrix>,
    /// `theta[k][node]`
    pub theta: Vec<Vec<CMatrix>>,
}

pub fn mmse_estimate(
    psi: &[CMatrix],
    drop: &Drop,
    assignment: &PilotAssignment,
    p_u: f64,
    sigma2: f64,
) -> Result<Estimates> {
    let stats = ChannelStatistics::new(drop, assignment, p_u, sigma2)?;
    let h_hat = stats.estimate(psi)?;
    let theta = stats.theta.iter().map(|bd| bd.blocks().to_vec()).collect();
    Ok(Estimates { h_hat, theta })
}
