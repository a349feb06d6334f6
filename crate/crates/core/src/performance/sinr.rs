use crate::combining::{CombinerSet, SinrCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{adjoint_matmul, col, norm_sqr, BlockDiag, CMatrix, C64, ZERO};

/// Terms of one user's effective SINR, all in units of `p_u` (noise enters
/// as `sigma^2 / p_u`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrBreakdown {
    pub signal: f64,
    pub est_error_term: f64,
    pub interference_term: f64,
    pub noise_term: f64,
    pub sinr: f64,
}

impl SinrBreakdown {
    fn new(signal: f64, est_error_term: f64, interference_term: f64, noise_term: f64) -> Self {
        let est_error_term = est_error_term.max(0.0);
        let interference_term = interference_term.max(0.0);
        let denom = est_error_term + interference_term + noise_term;
        SinrBreakdown {
            signal,
            est_error_term,
            interference_term,
            noise_term,
            sinr: signal / denom,
        }
    }
}

fn check_users(what: &str, got: usize, k: usize) -> Result<()> {
    if got != k {
        return Err(Error::Dimension(format!("{what}: {got} entries for {k} users")));
    }
    Ok(())
}

/// Instantaneous SINR of centralized combining:
///
/// ```text
/// gamma_k = eta_k |d_k^H h_k|^2 /
///     d_k^H (sum_{k' != k} eta_k' h_k' h_k'^H + sum_k' eta_k' Theta_k' + sigma^2/p_u I) d_k
/// ```
///
/// `d` and `h_hat` are `M x K`; `theta[k]` is block-diagonal over the nodes.
pub fn sinr_centralized(
    d: &CMatrix,
    h_hat: &CMatrix,
    theta: &[BlockDiag],
    eta: &[f64],
    p_u: f64,
    sigma2: f64,
) -> Result<Vec<SinrBreakdown>> {
    let aggregate = error_aggregate(theta, eta)?;
    sinr_centralized_with(d, h_hat, theta, &aggregate, eta, p_u, sigma2)
}

/// `sum_k eta_k Theta_k`, shared by every user's SINR denominator.
pub fn error_aggregate(theta: &[BlockDiag], eta: &[f64]) -> Result<BlockDiag> {
    check_users("power coefficients", eta.len(), theta.len())?;
    let mut aggregate = theta
        .first()
        .ok_or_else(|| Error::Dimension("no users".into()))?
        .zeros_like();
    for (th, &e) in theta.iter().zip(eta) {
        aggregate.add_scaled(th, e);
    }
    Ok(aggregate)
}

/// [`sinr_centralized`] with a precomputed [`error_aggregate`].
pub fn sinr_centralized_with(
    d: &CMatrix,
    h_hat: &CMatrix,
    theta: &[BlockDiag],
    aggregate: &BlockDiag,
    eta: &[f64],
    p_u: f64,
    sigma2: f64,
) -> Result<Vec<SinrBreakdown>> {
    let k = h_hat.ncols();
    check_users("combiners", d.ncols(), k)?;
    check_users("error covariances", theta.len(), k)?;
    check_users("power coefficients", eta.len(), k)?;
    if d.nrows() != h_hat.nrows() || aggregate.dim() != d.nrows() {
        return Err(Error::Dimension(format!("combiner length {} vs {}", d.nrows(), h_hat.nrows())));
    }
    let gram = adjoint_matmul(d, h_hat);
    let all_errors = aggregate.quad_forms(d);
    let noise_scale = sigma2 / p_u;
    Ok((0..k)
        .map(|u| {
            let du = col(d, u);
            let own_error = eta[u] * theta[u].quad_form(du);
            let all_error = all_errors[u];
            let leakage: f64 = (0..k)
                .filter(|&j| j != u)
                .map(|j| eta[j] * gram[(u, j)].norm_sqr())
                .sum();
            SinrBreakdown::new(
                eta[u] * gram[(u, u)].norm_sqr(),
                own_error,
                leakage + all_error - own_error,
                noise_scale * norm_sqr(du),
            )
        })
        .collect())
}

/// Decomposition of the centralized SINR into power-independent
/// coefficients, for power control with fixed combiners.
pub fn centralized_coefficients(
    d: &CMatrix,
    h_hat: &CMatrix,
    theta: &[BlockDiag],
    p_u: f64,
    sigma2: f64,
) -> Result<SinrCoefficients> {
    let k = h_hat.ncols();
    check_users("combiners", d.ncols(), k)?;
    check_users("error covariances", theta.len(), k)?;
    let gram = d.adjoint() * h_hat;
    let mut c = SinrCoefficients {
        gain: Vec::with_capacity(k),
        interference: Vec::with_capacity(k),
        error: Vec::with_capacity(k),
        noise: Vec::with_capacity(k),
    };
    for u in 0..k {
        let du = col(d, u);
        c.gain.push(gram[(u, u)].norm_sqr());
        c.interference.push((0..k).map(|j| gram[(u, j)].norm_sqr()).collect());
        c.error.push(theta.iter().map(|th| th.quad_form(du)).collect());
        c.noise.push(sigma2 / p_u * norm_sqr(du));
    }
    Ok(c)
}

/// Fewest inner realizations accepted when estimating LSFD moments.
pub const DEFAULT_MIN_INNER_SAMPLES: usize = 50;

/// Running sample moments of local combiner outputs over the small-scale
/// realizations of one drop, as needed by large-scale fading decoding.
#[derive(Clone, Debug)]
pub struct LsfdMoments {
    users: usize,
    nodes: usize,
    count: usize,
    /// `sum v_kn^H h_kn`, indexed `k * nodes + n`.
    gain: Vec<C64>,
    /// `sum_n |v_kn^H h_k'n|^2`, indexed `k * users + k'`.
    second: Vec<f64>,
    /// `sum_n v_kn^H Theta_k'n v_kn`, indexed `k * users + k'`.
    error: Vec<f64>,
    /// `sum_n ||v_kn||^2`
    norm: Vec<f64>,
}

impl LsfdMoments {
    pub fn new(users: usize, nodes: usize) -> Self {
        LsfdMoments {
            users,
            nodes,
            count: 0,
            gain: vec![ZERO; users * nodes],
            second: vec![0.0; users * users],
            error: vec![0.0; users * users],
            norm: vec![0.0; users],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Adds one realization: local combiners, the matching per-node
    /// estimates and the drop's error covariances.
    pub fn accumulate(&mut self, combiners: &CombinerSet, h_hat: &[CMatrix], theta: &[BlockDiag]) -> Result<()> {
        let CombinerSet::Hierarchical { nodes: v, .. } = combiners else {
            return Err(Error::Dimension("LSFD moments need hierarchical combiners".into()));
        };
        if v.len() != self.nodes || h_hat.len() != self.nodes {
            return Err(Error::Dimension(format!(
                "{} combiner nodes / {} estimate nodes, expected {}",
                v.len(),
                h_hat.len(),
                self.nodes
            )));
        }
        check_users("error covariances", theta.len(), self.users)?;
        let k = self.users;
        for n in 0..self.nodes {
            let gram = v[n].adjoint() * &h_hat[n];
            for u in 0..k {
                let vu = col(&v[n], u);
                self.gain[u * self.nodes + n] += gram[(u, u)];
                self.norm[u] += norm_sqr(vu);
                for j in 0..k {
                    self.second[u * k + j] += gram[(u, j)].norm_sqr();
                    self.error[u * k + j] += crate::linalg::quad_form(&theta[j].blocks()[n], vu);
                }
            }
        }
        self.count += 1;
        Ok(())
    }

    /// Sample mean of `v_kn^H h_kn`.
    pub fn mean_gain(&self, k: usize, node: usize) -> C64 {
        self.gain[k * self.nodes + node] / self.count as f64
    }

    /// LSFD SINR decomposition from the accumulated moments.
    pub fn coefficients(&self, p_u: f64, sigma2: f64, min_samples: usize) -> Result<SinrCoefficients> {
        if self.count < min_samples.max(1) {
            return Err(Error::InsufficientSamples {
                required: min_samples.max(1),
                got: self.count,
            });
        }
        let k = self.users;
        let inv = 1.0 / self.count as f64;
        let mut c = SinrCoefficients {
            gain: Vec::with_capacity(k),
            interference: Vec::with_capacity(k),
            error: Vec::with_capacity(k),
            noise: Vec::with_capacity(k),
        };
        for u in 0..k {
            let means = (0..self.nodes).map(|n| self.mean_gain(u, n));
            let coherent = means.clone().fold(ZERO, |a, b| a + b).norm_sqr();
            let per_node: f64 = means.map(|m| m.norm_sqr()).sum();
            // beamforming-gain uncertainty: sum_n (E|v^H h|^2 - |E v^H h|^2) >= 0
            let uncertainty = (self.second[u * k + u] * inv - per_node).max(0.0);
            c.gain.push(coherent);
            c.interference.push((0..k).map(|j| self.second[u * k + j] * inv).collect());
            c.error.push(
                (0..k)
                    .map(|j| self.error[u * k + j] * inv + if j == u { uncertainty } else { 0.0 })
                    .collect(),
            );
            c.noise.push(sigma2 / p_u * self.norm[u] * inv);
        }
        Ok(c)
    }
}

/// LSFD effective SINR with every expectation replaced by its inner-loop
/// sample mean. The four denominator lines are: total second moments over
/// all users, minus the squared per-node coherent gains, plus the
/// estimation-error quadratic forms, plus noise.
pub fn sinr_hierarchical(
    moments: &LsfdMoments,
    eta: &[f64],
    p_u: f64,
    sigma2: f64,
    min_samples: usize,
) -> Result<Vec<SinrBreakdown>> {
    check_users("power coefficients", eta.len(), moments.users)?;
    let c = moments.coefficients(p_u, sigma2, min_samples)?;
    let k = moments.users;
    let inv = 1.0 / moments.count as f64;
    Ok((0..k)
        .map(|u| {
            let total_second: f64 = (0..k).map(|j| eta[j] * moments.second[u * k + j] * inv).sum();
            let per_node: f64 = (0..moments.nodes).map(|n| moments.mean_gain(u, n).norm_sqr()).sum();
            let error: f64 = (0..k).map(|j| eta[j] * moments.error[u * k + j] * inv).sum();
            SinrBreakdown::new(eta[u] * c.gain[u], error, total_second - eta[u] * per_node, c.noise[u])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combining::{hierarchical_combiners, Scheme};
    use crate::linalg::{complex_normal, dot_h};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn psd(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng) * scale);
        &g * g.adjoint()
    }

    #[test]
    fn single_user_perfect_csi_is_matched_filter_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = CMatrix::from_fn(6, 1, |_, _| complex_normal(&mut rng));
        let theta = vec![BlockDiag::new(vec![CMatrix::zeros(4, 4), CMatrix::zeros(2, 2)])];
        let (eta, p_u, sigma2) = (0.7, 0.2, 0.01);
        let b = sinr_centralized(&h, &h, &theta, &[eta], p_u, sigma2).unwrap();
        let expect = eta * p_u * norm_sqr(col(&h, 0)) / sigma2;
        assert!((b[0].sinr / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sinr_is_scale_invariant_in_the_combiner() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (m, k) = (7, 3);
        let h = CMatrix::from_fn(m, k, |_, _| complex_normal(&mut rng));
        let d = CMatrix::from_fn(m, k, |_, _| complex_normal(&mut rng));
        let theta: Vec<_> = (0..k)
            .map(|_| BlockDiag::new(vec![psd(4, 0.2, &mut rng), psd(3, 0.2, &mut rng)]))
            .collect();
        let eta = [1.0, 0.5, 0.25];
        let a = sinr_centralized(&d, &h, &theta, &eta, 0.2, 0.1).unwrap();
        let scaled = &d * C64::new(7.3, 0.0);
        let b = sinr_centralized(&scaled, &h, &theta, &eta, 0.2, 0.1).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.sinr / y.sinr - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coefficients_reproduce_the_direct_sinr() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (m, k) = (6, 4);
        let h = CMatrix::from_fn(m, k, |_, _| complex_normal(&mut rng));
        let d = CMatrix::from_fn(m, k, |_, _| complex_normal(&mut rng));
        let theta: Vec<_> = (0..k)
            .map(|_| BlockDiag::new(vec![psd(2, 0.3, &mut rng), psd(4, 0.3, &mut rng)]))
            .collect();
        let eta: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let direct = sinr_centralized(&d, &h, &theta, &eta, 0.2, 0.05).unwrap();
        let coeffs = centralized_coefficients(&d, &h, &theta, 0.2, 0.05).unwrap();
        for (x, y) in direct.iter().zip(coeffs.sinr(&eta)) {
            assert!((x.sinr / y - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn breakdown_terms_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = CMatrix::from_fn(5, 2, |_, _| complex_normal(&mut rng));
        let theta: Vec<_> = (0..2).map(|_| BlockDiag::new(vec![psd(5, 0.3, &mut rng)])).collect();
        for b in sinr_centralized(&h, &h, &theta, &[1.0, 1.0], 0.2, 0.1).unwrap() {
            assert!(b.signal >= 0.0 && b.est_error_term >= 0.0 && b.interference_term >= 0.0);
            let ratio = b.signal / (b.est_error_term + b.interference_term + b.noise_term);
            assert!((b.sinr / ratio - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lsfd_with_exact_moments_and_no_interference_is_matched_filter_snr() {
        // one node, one user, perfect CSI: every sample mean equals the true value
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = vec![CMatrix::from_fn(8, 1, |_, _| complex_normal(&mut rng))];
        let theta = vec![BlockDiag::new(vec![CMatrix::zeros(8, 8)])];
        let set = hierarchical_combiners(&h, &theta, &[1.0], 0.2, 0.1, Scheme::MR).unwrap();
        let mut mom = LsfdMoments::new(1, 1);
        for _ in 0..50 {
            mom.accumulate(&set, &h, &theta).unwrap();
        }
        let (p_u, sigma2, eta) = (0.2, 0.1, 0.6);
        let xi = sinr_hierarchical(&mom, &[eta], p_u, sigma2, 50).unwrap()[0].sinr;
        let expect = eta * p_u * norm_sqr(col(&h[0], 0)) / sigma2;
        assert!((xi / expect - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lsfd_single_sample_is_the_plug_in_ratio_but_is_guarded() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sizes = [4, 2];
        let k = 2;
        let h: Vec<CMatrix> = sizes.iter().map(|&n| CMatrix::from_fn(n, k, |_, _| complex_normal(&mut rng))).collect();
        let theta: Vec<_> = (0..k)
            .map(|_| BlockDiag::new(sizes.iter().map(|&n| psd(n, 0.2, &mut rng)).collect()))
            .collect();
        let set = hierarchical_combiners(&h, &theta, &[1.0; 2], 0.2, 0.1, Scheme::MR).unwrap();
        let mut mom = LsfdMoments::new(k, 2);
        mom.accumulate(&set, &h, &theta).unwrap();
        assert!(matches!(
            sinr_hierarchical(&mom, &[1.0; 2], 0.2, 0.1, DEFAULT_MIN_INNER_SAMPLES),
            Err(Error::InsufficientSamples { required: 50, got: 1 })
        ));
        let xi = sinr_hierarchical(&mom, &[1.0; 2], 0.2, 0.1, 1).unwrap();
        // plug-in: |sum_n a_n|^2 / (sum_k' sum_n |v^H h_k'|^2 - sum_n |a_n|^2 + err + noise)
        let CombinerSet::Hierarchical { nodes: v, .. } = &set else { unreachable!() };
        for u in 0..k {
            let a: Vec<C64> = (0..2).map(|n| dot_h(col(&v[n], u), col(&h[n], u))).collect();
            let num = (a[0] + a[1]).norm_sqr();
            let mut den = 0.0;
            for j in 0..k {
                for n in 0..2 {
                    den += dot_h(col(&v[n], u), col(&h[n], j)).norm_sqr();
                    den += crate::linalg::quad_form(&theta[j].blocks()[n], col(&v[n], u));
                }
            }
            den -= a[0].norm_sqr() + a[1].norm_sqr();
            den += 0.1 / 0.2 * (norm_sqr(col(&v[0], u)) + norm_sqr(col(&v[1], u)));
            assert!((xi[u].sinr / (num / den) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lsfd_coefficients_agree_with_breakdown() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sizes = [3, 2, 2];
        let k = 3;
        let theta: Vec<_> = (0..k)
            .map(|_| BlockDiag::new(sizes.iter().map(|&n| psd(n, 0.2, &mut rng)).collect()))
            .collect();
        let mut mom = LsfdMoments::new(k, 3);
        for _ in 0..60 {
            let h: Vec<CMatrix> = sizes.iter().map(|&n| CMatrix::from_fn(n, k, |_, _| complex_normal(&mut rng))).collect();
            let set = hierarchical_combiners(&h, &theta, &[1.0; 3], 0.2, 0.1, Scheme::MMSE).unwrap();
            mom.accumulate(&set, &h, &theta).unwrap();
        }
        let eta = [0.3, 1.0, 0.7];
        let direct = sinr_hierarchical(&mom, &eta, 0.2, 0.1, 50).unwrap();
        let via = mom.coefficients(0.2, 0.1, 50).unwrap().sinr(&eta);
        for (a, b) in direct.iter().zip(via) {
            assert!((a.sinr / b - 1.0).abs() < 1e-10);
        }
    }
}
