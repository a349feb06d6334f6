use super::{zero_forcing, CombinerSet, Scheme};
use crate::error::{Error, Result};
use crate::linalg::{BlockDiag, CMatrix, HermitianSolver, C64};

/// Per-node (local) combiner builder for one drop.
///
/// Every node combines with its own estimates only. For MMSE the
/// error-plus-noise part `p_u sum_k eta_k Theta_kn + sigma^2 I` of each
/// node's matrix is assembled once per drop.
pub struct HierarchicalCombiner {
    scheme: Scheme,
    eta: Vec<f64>,
    p_u: f64,
    regularizers: Vec<CMatrix>,
}

impl HierarchicalCombiner {
    /// `theta[k]` holds user `k`'s error covariances, one block per node.
    pub fn new(theta: &[BlockDiag], eta: &[f64], p_u: f64, sigma2: f64, scheme: Scheme) -> Result<Self> {
        if theta.len() != eta.len() {
            return Err(Error::Dimension(format!("{} error covariances for {} users", theta.len(), eta.len())));
        }
        let first = theta.first().ok_or_else(|| Error::Dimension("no users".into()))?;
        let k = eta.len();
        if scheme == Scheme::ZF {
            if let Some(small) = first.blocks().iter().map(|b| b.nrows()).find(|&n| n < k) {
                return Err(Error::Unsupported(format!(
                    "local ZF needs K <= antennas per node; a node has {small} antennas for K = {k}"
                )));
            }
        }
        let regularizers = match scheme {
            Scheme::MMSE => (0..first.blocks().len())
                .map(|node| {
                    let n = first.blocks()[node].nrows();
                    let mut reg = CMatrix::identity(n, n) * C64::new(sigma2, 0.0);
                    for (th, &e) in theta.iter().zip(eta) {
                        reg += &th.blocks()[node] * C64::new(p_u * e, 0.0);
                    }
                    reg
                })
                .collect(),
            _ => Vec::new(),
        };
        Ok(HierarchicalCombiner {
            scheme,
            eta: eta.to_vec(),
            p_u,
            regularizers,
        })
    }

    /// Combiners from per-node estimates (`antennas_n x K` each).
    pub fn build(&self, h_hat: &[CMatrix]) -> Result<CombinerSet> {
        let nodes = match self.scheme {
            Scheme::MR => h_hat.to_vec(),
            Scheme::ZF => h_hat.iter().map(zero_forcing).collect::<Result<Vec<_>>>()?,
            Scheme::MMSE => {
                if h_hat.len() != self.regularizers.len() {
                    return Err(Error::Dimension(format!(
                        "estimates for {} nodes, expected {}",
                        h_hat.len(),
                        self.regularizers.len()
                    )));
                }
                h_hat
                    .iter()
                    .zip(&self.regularizers)
                    .map(|(h, reg)| {
                        let mut scaled = h.clone();
                        for (j, &e) in self.eta.iter().enumerate() {
                            scaled.column_mut(j).scale_mut(self.p_u * e);
                        }
                        let a = reg + scaled * h.adjoint();
                        Ok(HermitianSolver::new(a)?.solve(h))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(CombinerSet::Hierarchical {
            scheme: self.scheme,
            nodes,
        })
    }
}

pub fn hierarchical_combiners(
    h_hat: &[CMatrix],
    theta: &[BlockDiag],
    eta: &[f64],
    p_u: f64,
    sigma2: f64,
    scheme: Scheme,
) -> Result<CombinerSet> {
    HierarchicalCombiner::new(theta, eta, p_u, sigma2, scheme)?.build(h_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_normal, frobenius};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(sizes: &[usize], k: usize, rng: &mut ChaCha8Rng) -> (Vec<CMatrix>, Vec<BlockDiag>) {
        let h = sizes
            .iter()
            .map(|&n| CMatrix::from_fn(n, k, |_, _| complex_normal(rng)))
            .collect();
        let theta = (0..k)
            .map(|_| {
                BlockDiag::new(
                    sizes
                        .iter()
                        .map(|&n| {
                            let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng) * 0.2);
                            &g * g.adjoint()
                        })
                        .collect(),
                )
            })
            .collect();
        (h, theta)
    }

    fn nodes_of(set: &CombinerSet) -> &[CMatrix] {
        match set {
            CombinerSet::Hierarchical { nodes, .. } => nodes,
            _ => panic!("not hierarchical"),
        }
    }

    #[test]
    fn mr_everywhere_is_the_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (h, theta) = instance(&[6, 2, 2], 3, &mut rng);
        let set = hierarchical_combiners(&h, &theta, &[1.0; 3], 0.2, 0.1, Scheme::MR).unwrap();
        assert_eq!(nodes_of(&set), &h[..]);
    }

    #[test]
    fn local_zf_inverts_per_node() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (h, theta) = instance(&[8, 4, 5], 4, &mut rng);
        let set = hierarchical_combiners(&h, &theta, &[1.0; 4], 0.2, 0.1, Scheme::ZF).unwrap();
        for (v, hn) in nodes_of(&set).iter().zip(&h) {
            let prod = v.adjoint() * hn;
            let worst = (prod - CMatrix::identity(4, 4)).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "{worst}");
        }
    }

    #[test]
    fn local_zf_with_default_split_is_unsupported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (h, theta) = instance(&[96, 4, 4], 16, &mut rng);
        let err = hierarchical_combiners(&h, &theta, &[1.0; 16], 0.2, 0.1, Scheme::ZF).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn local_mmse_matches_independent_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (h, theta) = instance(&[5, 3], 3, &mut rng);
        let eta = [0.9, 0.4, 1.0];
        let (p_u, sigma2) = (0.2, 0.03);
        let set = hierarchical_combiners(&h, &theta, &eta, p_u, sigma2, Scheme::MMSE).unwrap();
        for (node, v) in nodes_of(&set).iter().enumerate() {
            let n = h[node].nrows();
            // regularised normal equations assembled entry by entry
            let a = CMatrix::from_fn(n, n, |i, j| {
                let mut s = if i == j { C64::new(sigma2, 0.0) } else { C64::new(0.0, 0.0) };
                for (u, &e) in eta.iter().enumerate() {
                    let hh = h[node][(i, u)] * h[node][(j, u)].conj();
                    s += (hh + theta[u].blocks()[node][(i, j)]) * (p_u * e);
                }
                s
            });
            let dense = a.lu().solve(&h[node]).unwrap();
            assert!(frobenius(&(v - &dense)) < 1e-8 * frobenius(&dense));
        }
    }
}
