use super::{zero_forcing, CombinerSet, Scheme};
use crate::error::{Error, Result};
use crate::linalg::{BlockDiag, BlockDiagSolver, CMatrix, C64};

/// Centralized combiner builder for one drop.
///
/// MMSE needs `[p_u sum_k eta_k (h_k h_k^H + Theta_k) + sigma^2 I]^{-1} h_k`.
/// The error part `B = sum_k eta_k Theta_k + (sigma^2 / p_u) I` is
/// block-diagonal and fixed for the drop, so it is factored once here and
/// the rank-K estimate part is handled per realization with the Woodbury
/// identity `(B + H E H^H)^{-1} H = B^{-1} H (I + E H^H B^{-1} H)^{-1}`.
pub struct CentralizedCombiner {
    scheme: Scheme,
    eta: Vec<f64>,
    p_u: f64,
    regularizer: Option<BlockDiagSolver>,
}

impl CentralizedCombiner {
    pub fn new(theta: &[BlockDiag], eta: &[f64], p_u: f64, sigma2: f64, scheme: Scheme) -> Result<Self> {
        if theta.len() != eta.len() {
            return Err(Error::Dimension(format!("{} error covariances for {} users", theta.len(), eta.len())));
        }
        let regularizer = match scheme {
            Scheme::MMSE => {
                let mut b = theta
                    .first()
                    .ok_or_else(|| Error::Dimension("no users".into()))?
                    .zeros_like();
                for (th, &e) in theta.iter().zip(eta) {
                    b.add_scaled(th, e);
                }
                b.add_identity(sigma2 / p_u);
                Some(b.factor()?)
            }
            _ => None,
        };
        Ok(CentralizedCombiner {
            scheme,
            eta: eta.to_vec(),
            p_u,
            regularizer,
        })
    }

    /// Combiners for stacked estimates `h_hat` (`M x K`).
    pub fn build(&self, h_hat: &CMatrix) -> Result<CombinerSet> {
        if h_hat.ncols() != self.eta.len() {
            return Err(Error::Dimension(format!("{} estimate columns for {} users", h_hat.ncols(), self.eta.len())));
        }
        let d = match self.scheme {
            Scheme::MR => h_hat.clone(),
            Scheme::ZF => zero_forcing(h_hat)?,
            Scheme::MMSE => {
                let solver = self.regularizer.as_ref().expect("MMSE regularizer");
                let y = solver.solve(h_hat);
                let mut t = h_hat.adjoint() * &y;
                for (i, &e) in self.eta.iter().enumerate() {
                    t.row_mut(i).scale_mut(e);
                    t[(i, i)] += C64::new(1.0, 0.0);
                }
                let t_inv = t
                    .lu()
                    .try_inverse()
                    .ok_or_else(|| Error::Numeric("singular MMSE capacitance matrix".into()))?;
                y * t_inv * C64::new(1.0 / self.p_u, 0.0)
            }
        };
        Ok(CombinerSet::Centralized { scheme: self.scheme, d })
    }
}

/// Builds the centralized combiner set in one call.
pub fn centralized_combiner(
    h_hat: &CMatrix,
    theta: &[BlockDiag],
    eta: &[f64],
    p_u: f64,
    sigma2: f64,
    scheme: Scheme,
) -> Result<CombinerSet> {
    CentralizedCombiner::new(theta, eta, p_u, sigma2, scheme)?.build(h_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{col, complex_normal, dot_h, frobenius, norm_sqr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_instance(sizes: &[usize], k: usize, rng: &mut ChaCha8Rng) -> (CMatrix, Vec<BlockDiag>) {
        let m: usize = sizes.iter().sum();
        let h = CMatrix::from_fn(m, k, |_, _| complex_normal(rng));
        let theta = (0..k)
            .map(|_| {
                BlockDiag::new(
                    sizes
                        .iter()
                        .map(|&n| {
                            let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng) * 0.3);
                            &g * g.adjoint()
                        })
                        .collect(),
                )
            })
            .collect();
        (h, theta)
    }

    fn d_of(set: &CombinerSet) -> &CMatrix {
        match set {
            CombinerSet::Centralized { d, .. } => d,
            _ => panic!("not centralized"),
        }
    }

    #[test]
    fn mr_is_the_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (h, theta) = random_instance(&[4, 2, 2], 3, &mut rng);
        let set = centralized_combiner(&h, &theta, &[1.0; 3], 0.2, 0.1, Scheme::MR).unwrap();
        assert_eq!(d_of(&set), &h);
        assert_eq!(set.scheme(), Scheme::MR);
    }

    #[test]
    fn zf_inverts_the_estimates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (h, theta) = random_instance(&[4, 3, 3], 5, &mut rng);
        let set = centralized_combiner(&h, &theta, &[1.0; 5], 0.2, 0.1, Scheme::ZF).unwrap();
        let prod = d_of(&set).adjoint() * &h;
        let eye = CMatrix::identity(5, 5);
        let worst = (prod - eye).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn zf_rejects_more_users_than_antennas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (h, theta) = random_instance(&[2, 1], 4, &mut rng);
        let err = centralized_combiner(&h, &theta, &[1.0; 4], 0.2, 0.1, Scheme::ZF).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn zf_flags_collinear_estimates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut h, theta) = random_instance(&[3, 3], 2, &mut rng);
        let c0 = h.column(0).into_owned();
        h.set_column(1, &(c0 * C64::new(2.0, -1.0)));
        let err = centralized_combiner(&h, &theta, &[1.0; 2], 0.2, 0.1, Scheme::ZF).unwrap_err();
        assert!(matches!(err, Error::DegenerateDrop(_)));
    }

    #[test]
    fn single_user_mmse_without_error_is_matched_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (h, theta) = random_instance(&[3, 2], 1, &mut rng);
        let zero_theta = vec![theta[0].zeros_like()];
        let set = centralized_combiner(&h, &zero_theta, &[1.0], 0.2, 0.1, Scheme::MMSE).unwrap();
        let d = col(d_of(&set), 0);
        let hk = col(&h, 0);
        let cos = dot_h(d, hk).norm() / (norm_sqr(d) * norm_sqr(hk)).sqrt();
        assert!(cos > 1.0 - 1e-10);
    }

    #[test]
    fn woodbury_mmse_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sizes = [6, 4, 4, 2];
        let k = 4;
        let (h, theta) = random_instance(&sizes, k, &mut rng);
        let eta = [1.0, 0.3, 0.0, 0.8];
        let (p_u, sigma2) = (0.2, 0.05);
        let set = centralized_combiner(&h, &theta, &eta, p_u, sigma2, Scheme::MMSE).unwrap();

        let m: usize = sizes.iter().sum();
        let mut a = CMatrix::identity(m, m) * C64::new(sigma2, 0.0);
        for (j, th) in theta.iter().enumerate() {
            let hj = h.column(j);
            a += (hj * hj.adjoint() + th.to_dense()) * C64::new(p_u * eta[j], 0.0);
        }
        let dense = a.lu().solve(&h).unwrap();
        let d = d_of(&set);
        assert!(frobenius(&(d - &dense)) < 1e-10 * frobenius(&dense));
    }
}
