//! Max-min fair uplink power control for fixed combiners.
//!
//! With combiners held fixed, every SINR is a ratio of linear functions of
//! the power coefficients:
//!
//! ```text
//! gamma_k(eta) = eta_k A_k / (sum_{k' != k} eta_k' B_kk' + sum_k' eta_k' C_kk' + D_k)
//! ```
//!
//! For a target `t`, `eta -> t I(eta) / A` is a standard interference
//! function, so iterating it from zero converges to the least power vector
//! meeting `t` whenever one exists. The largest feasible `t` with
//! `eta <= 1` is found by bisection.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PowerCoefficients {
    pub eta: Vec<f64>,
}

impl PowerCoefficients {
    pub fn full(k: usize) -> Self {
        PowerCoefficients { eta: vec![1.0; k] }
    }
}

/// Nonnegative gain/interference decomposition of every user's SINR.
#[derive(Clone, Debug, PartialEq)]
pub struct SinrCoefficients {
    /// Coherent gain `A_k`.
    pub gain: Vec<f64>,
    /// `B[k][k']`, interference from user `k'`; the diagonal is ignored.
    pub interference: Vec<Vec<f64>>,
    /// `C[k][k']`, error-type terms scaled by every user's power, self included.
    pub error: Vec<Vec<f64>>,
    /// Power-independent noise term `D_k`.
    pub noise: Vec<f64>,
}

impl SinrCoefficients {
    pub fn users(&self) -> usize {
        self.gain.len()
    }

    /// `sum_{k' != k} eta_k' B_kk' + sum_k' eta_k' C_kk'`
    pub fn interference_power(&self, k: usize, eta: &[f64]) -> f64 {
        let b = &self.interference[k];
        let c = &self.error[k];
        eta.iter()
            .enumerate()
            .map(|(j, &e)| e * (c[j] + if j == k { 0.0 } else { b[j] }))
            .sum()
    }

    pub fn sinr(&self, eta: &[f64]) -> Vec<f64> {
        (0..self.users())
            .map(|k| eta[k] * self.gain[k] / (self.interference_power(k, eta) + self.noise[k]))
            .collect()
    }

    fn check(&self) -> Result<()> {
        let k = self.users();
        let square = |m: &Vec<Vec<f64>>| m.len() == k && m.iter().all(|r| r.len() == k);
        if !square(&self.interference) || !square(&self.error) || self.noise.len() != k {
            return Err(Error::Dimension(format!("SINR coefficients for {k} users")));
        }
        let values = self
            .gain
            .iter()
            .chain(&self.noise)
            .chain(self.interference.iter().flatten())
            .chain(self.error.iter().flatten());
        for &v in values {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("SINR coefficient {v} is not a finite nonnegative value")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxMinOptions {
    /// Relative width of the final bisection bracket.
    pub tol: f64,
    pub max_bisections: usize,
    pub max_fixed_point: usize,
}

impl Default for MaxMinOptions {
    fn default() -> Self {
        MaxMinOptions {
            tol: 1e-4,
            max_bisections: 64,
            max_fixed_point: 500,
        }
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Least power vector reaching SINR `target` for everyone, if it fits in the box.
fn feasible_powers(coeffs: &SinrCoefficients, target: f64, max_iter: usize) -> Option<Vec<f64>> {
    let k = coeffs.users();
    let mut eta = vec![0.0; k];
    let mut next = vec![0.0; k];
    for _ in 0..max_iter {
        for (u, slot) in next.iter_mut().enumerate() {
            *slot = target * (coeffs.interference_power(u, &eta) + coeffs.noise[u]) / coeffs.gain[u];
        }
        if next.iter().any(|&e| e > 1.0) {
            return None;
        }
        let shift = next.iter().zip(&eta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = next.iter().copied().fold(0.0, f64::max);
        std::mem::swap(&mut eta, &mut next);
        if shift <= 1e-12 * scale {
            return Some(eta);
        }
    }
    None
}

/// Rescales so the strongest user transmits at full power; this never lowers
/// any SINR.
fn normalize(mut eta: Vec<f64>) -> Vec<f64> {
    let top = eta.iter().copied().fold(0.0, f64::max);
    if top > 0.0 {
        eta.iter_mut().for_each(|e| *e /= top);
    }
    eta
}

pub fn maxmin_power_control(coeffs: &SinrCoefficients, opts: &MaxMinOptions) -> Result<PowerCoefficients> {
    coeffs.check()?;
    let k = coeffs.users();
    let full = PowerCoefficients::full(k);
    if k <= 1 || coeffs.gain.contains(&0.0) {
        // a single user, or someone who cannot be served at all
        return Ok(full);
    }
    let mut best = full.eta;
    let mut lo = min_of(&coeffs.sinr(&best));
    // each user's SINR is capped by its value with everyone else silent
    let mut hi = (0..k)
        .map(|u| coeffs.gain[u] / (coeffs.error[u][u] + coeffs.noise[u]))
        .fold(f64::INFINITY, f64::min);
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::Convergence(format!("unusable SINR bracket [{lo}, {hi}]")));
    }
    for _ in 0..opts.max_bisections {
        if hi - lo <= opts.tol * lo {
            break;
        }
        let target = 0.5 * (lo + hi);
        match feasible_powers(coeffs, target, opts.max_fixed_point) {
            Some(eta) => {
                let eta = normalize(eta);
                lo = min_of(&coeffs.sinr(&eta)).max(target);
                best = eta;
            }
            None => hi = target,
        }
    }
    if hi - lo > opts.tol * lo {
        return Err(Error::Convergence(format!(
            "bracket [{lo:e}, {hi:e}] still wider than {} after {} bisections",
            opts.tol, opts.max_bisections
        )));
    }
    Ok(PowerCoefficients { eta: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(k: usize, rng: &mut ChaCha8Rng) -> SinrCoefficients {
        let mut mat = || (0..k).map(|_| (0..k).map(|_| rng.random::<f64>() * 0.2).collect()).collect();
        let interference = mat();
        let error = mat();
        SinrCoefficients {
            gain: (0..k).map(|_| 0.5 + rng.random::<f64>() * 3.0).collect(),
            interference,
            error,
            noise: (0..k).map(|_| 0.05 + rng.random::<f64>() * 0.3).collect(),
        }
    }

    #[test]
    fn single_user_transmits_at_full_power() {
        let c = SinrCoefficients {
            gain: vec![2.0],
            interference: vec![vec![0.0]],
            error: vec![vec![0.1]],
            noise: vec![0.5],
        };
        let p = maxmin_power_control(&c, &MaxMinOptions::default()).unwrap();
        assert_eq!(p.eta, vec![1.0]);
    }

    #[test]
    fn symmetric_pair_is_equalized() {
        let c = SinrCoefficients {
            gain: vec![3.0, 3.0],
            interference: vec![vec![0.0, 0.4], vec![0.4, 0.0]],
            error: vec![vec![0.1, 0.05], vec![0.05, 0.1]],
            noise: vec![0.2, 0.2],
        };
        let p = maxmin_power_control(&c, &MaxMinOptions::default()).unwrap();
        assert!((p.eta[0] - p.eta[1]).abs() < 1e-6);
        let g = c.sinr(&p.eta);
        assert!((g[0] - g[1]).abs() < 1e-6);
    }

    #[test]
    fn matches_grid_search_on_two_users() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let c = random_coeffs(2, &mut rng);
            let p = maxmin_power_control(&c, &MaxMinOptions::default()).unwrap();
            let got = min_of(&c.sinr(&p.eta));
            let mut grid_best: f64 = 0.0;
            for i in 1..=100 {
                for j in 1..=100 {
                    let eta = [i as f64 / 100.0, j as f64 / 100.0];
                    grid_best = grid_best.max(min_of(&c.sinr(&eta)));
                }
            }
            assert!(got >= grid_best * 0.99, "{got} vs grid {grid_best}");
        }
    }

    #[test]
    fn optimum_has_a_full_power_user_and_equal_sinrs() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..20 {
            let c = random_coeffs(6, &mut rng);
            let p = maxmin_power_control(&c, &MaxMinOptions::default()).unwrap();
            assert!(p.eta.iter().all(|&e| (0.0..=1.0).contains(&e)));
            assert!(p.eta.iter().any(|&e| e == 1.0));
            let at_cap = p.eta.iter().filter(|&&e| e > 1.0 - 1e-9).count();
            let g = c.sinr(&p.eta);
            let (lo, hi) = (min_of(&g), g.iter().copied().fold(0.0, f64::max));
            if at_cap <= 1 {
                assert!(hi - lo <= 0.01 * lo, "spread {lo} .. {hi}");
            }
            assert!(lo >= min_of(&c.sinr(&[1.0; 6])) - 1e-12);
        }
    }

    #[test]
    fn negative_coefficients_are_rejected() {
        let mut c = random_coeffs(2, &mut ChaCha8Rng::seed_from_u64(1));
        c.noise[1] = -1.0;
        assert!(matches!(
            maxmin_power_control(&c, &MaxMinOptions::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn too_few_bisections_is_a_convergence_error() {
        let c = random_coeffs(3, &mut ChaCha8Rng::seed_from_u64(2));
        let opts = MaxMinOptions {
            max_bisections: 1,
            ..MaxMinOptions::default()
        };
        assert!(matches!(maxmin_power_control(&c, &opts), Err(Error::Convergence(_))));
    }
}
