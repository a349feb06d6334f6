use std::f64::consts::PI;

use rand::Rng;

use super::config::SystemConfig;
use super::pathloss::PathLossModel;
use super::scattering::local_scattering_covariance;
use crate::error::Result;
use crate::linalg::CMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Co-located array at the area centre (cBS, or the cellular BS).
    Central,
    /// Distributed site (eAP in HCF, AP in CF).
    Edge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub position: [f64; 2],
    pub antennas: usize,
    /// Broadside direction of the ULA, radians.
    pub orientation: f64,
}

/// Node and user positions of one drop. The central node, when present, is
/// always first; stacked channel vectors follow the same node order.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub nodes: Vec<Node>,
    pub users: Vec<[f64; 2]>,
}

impl Layout {
    pub fn antenna_counts(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.antennas).collect()
    }

    pub fn total_antennas(&self) -> usize {
        self.nodes.iter().map(|n| n.antennas).sum()
    }
}

fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    [r * theta.cos(), r * theta.sin()]
}

/// Places the cBS at the origin and everything else uniformly in the disc.
pub fn build_layout<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Result<Layout> {
    config.validate()?;
    let mut nodes = Vec::with_capacity(config.node_count());
    if config.n_b > 0 {
        nodes.push(Node {
            kind: NodeKind::Central,
            position: [0.0, 0.0],
            antennas: config.n_b,
            orientation: 2.0 * PI * rng.random::<f64>(),
        });
    }
    for _ in 0..config.l {
        let position = uniform_in_disc(config.cell_radius_m, rng);
        nodes.push(Node {
            kind: NodeKind::Edge,
            position,
            antennas: config.n_a,
            orientation: 2.0 * PI * rng.random::<f64>(),
        });
    }
    let users = (0..config.k)
        .map(|_| uniform_in_disc(config.cell_radius_m, rng))
        .collect();
    Ok(Layout { nodes, users })
}

/// One large-scale realization: positions, shadowing, correlation matrices.
#[derive(Clone, Debug)]
pub struct Drop {
    pub layout: Layout,
    /// `beta[k][n]`, linear gain between user `k` and node `n`.
    pub beta: Vec<Vec<f64>>,
    pub shadow_db: Vec<Vec<f64>>,
    /// `r[k][n]`, spatial correlation of user `k` at node `n`.
    pub r: Vec<Vec<CMatrix>>,
}

/// Users closer than this to a node are evaluated at this distance; the
/// path-loss model is flat there anyway.
const MIN_DISTANCE_M: f64 = 1e-3;

impl Drop {
    pub fn generate<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Result<Drop> {
        let layout = build_layout(config, rng)?;
        Drop::from_layout(config, layout, rng)
    }

    /// Draws shadowing for a fixed layout and builds every `R[k][n]`.
    pub fn from_layout<R: Rng + ?Sized>(config: &SystemConfig, layout: Layout, rng: &mut R) -> Result<Drop> {
        let model = PathLossModel {
            l0_db: config.l0_db,
            d0_m: config.d0_m,
            d1_m: config.d1_m,
        };
        let asd = config.asd_rad();
        let k = layout.users.len();
        let mut beta = Vec::with_capacity(k);
        let mut shadow_db = Vec::with_capacity(k);
        let mut r = Vec::with_capacity(k);
        for user in &layout.users {
            let mut b_row = Vec::with_capacity(layout.nodes.len());
            let mut s_row = Vec::with_capacity(layout.nodes.len());
            let mut r_row = Vec::with_capacity(layout.nodes.len());
            for node in &layout.nodes {
                let dx = user[0] - node.position[0];
                let dy = user[1] - node.position[1];
                let dist = dx.hypot(dy).max(MIN_DISTANCE_M);
                let (b, x) = model.large_scale_coefficient(dist, config.shadowing_std_db, rng)?;
                let angle = dy.atan2(dx) - node.orientation;
                r_row.push(local_scattering_covariance(b, angle, asd, node.antennas));
                b_row.push(b);
                s_row.push(x);
            }
            beta.push(b_row);
            shadow_db.push(s_row);
            r.push(r_row);
        }
        Ok(Drop {
            layout,
            beta,
            shadow_db,
            r,
        })
    }

    pub fn users(&self) -> usize {
        self.layout.users.len()
    }

    pub fn nodes(&self) -> usize {
        self.layout.nodes.len()
    }
}
