//! Three-slope COST-Hata path loss and log-normal shadowing.
//!
//! Distances are in metres at the interface and converted to kilometres
//! inside the logarithms, which is the convention the 140.72 dB intercept
//! belongs to.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossModel {
    pub l0_db: f64,
    pub d0_m: f64,
    pub d1_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            l0_db: 140.72,
            d0_m: 10.0,
            d1_m: 50.0,
        }
    }
}

impl PathLossModel {
    /// Path gain in dB (a negative number) at distance `d_m`.
    pub fn path_loss_db(&self, d_m: f64) -> Result<f64> {
        if !(d_m > 0.0) || !d_m.is_finite() {
            return Err(Error::Domain(format!("path loss needs d > 0, got {d_m}")));
        }
        let d = d_m / 1e3;
        let d0 = self.d0_m / 1e3;
        let d1 = self.d1_m / 1e3;
        let pl = if d_m > self.d1_m {
            -self.l0_db - 35.0 * d.log10()
        } else if d_m > self.d0_m {
            -self.l0_db - 10.0 * (d1.powf(1.5) * d * d).log10()
        } else {
            -self.l0_db - 10.0 * (d1.powf(1.5) * d0 * d0).log10()
        };
        Ok(pl)
    }

    /// Draws shadowing `X ~ N(0, std^2)` dB and returns `(10^((PL + X)/10), X)`.
    pub fn large_scale_coefficient<R: Rng + ?Sized>(
        &self,
        d_m: f64,
        shadowing_std_db: f64,
        rng: &mut R,
    ) -> Result<(f64, f64)> {
        let pl = self.path_loss_db(d_m)?;
        let shadow = if shadowing_std_db > 0.0 {
            Normal::new(0.0, shadowing_std_db)
                .map_err(|e| Error::Domain(e.to_string()))?
                .sample(rng)
        } else {
            0.0
        };
        Ok((db_to_linear(pl + shadow), shadow))
    }
}

/// Path loss with the default breakpoints (10 m / 50 m, 140.72 dB).
pub fn path_loss_db(d_m: f64) -> Result<f64> {
    PathLossModel::default().path_loss_db(d_m)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_kilometre_is_the_intercept() {
        assert!((path_loss_db(1000.0).unwrap() + 140.72).abs() < 1e-12);
    }

    #[test]
    fn breakpoint_d1_branches_agree() {
        let expect = -140.72 - 35.0 * 0.05f64.log10();
        assert!((path_loss_db(50.0).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn continuity_at_both_breakpoints() {
        // neighbouring branches written out independently, evaluated at the breakpoint itself
        let (l0, d0, d1) = (140.72, 0.01f64, 0.05f64);
        let flat = -l0 - 10.0 * (d1.powf(1.5) * d0 * d0).log10();
        let mid_at_d0 = -l0 - 10.0 * (d1.powf(1.5) * d0 * d0).log10();
        let mid_at_d1 = -l0 - 10.0 * (d1.powf(1.5) * d1 * d1).log10();
        let top_at_d1 = -l0 - 35.0 * d1.log10();
        assert!((flat - mid_at_d0).abs() < 1e-9);
        assert!((mid_at_d1 - top_at_d1).abs() < 1e-9);

        // one-sided limits close linearly in eps (slopes are below 1 dB/m here)
        for bp in [10.0, 50.0] {
            for eps in [1e-3, 1e-6, 1e-9] {
                let lo = path_loss_db(bp - eps).unwrap();
                let hi = path_loss_db(bp + eps).unwrap();
                assert!((lo - hi).abs() <= 2.0 * eps + 1e-9, "bp {bp}, eps {eps}: {lo} vs {hi}");
            }
        }
    }

    #[test]
    fn clamped_below_d0() {
        assert_eq!(path_loss_db(5.0).unwrap(), path_loss_db(10.0).unwrap());
        assert_eq!(path_loss_db(0.01).unwrap(), path_loss_db(10.0).unwrap());
    }

    #[test]
    fn non_positive_distance_is_a_domain_error() {
        assert!(matches!(path_loss_db(0.0), Err(Error::Domain(_))));
        assert!(matches!(path_loss_db(-3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn monotone_without_shadowing() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = PathLossModel::default();
        let mut prev = f64::INFINITY;
        for i in 1..5000 {
            let d = i as f64 * 0.7;
            let (beta, x) = model.large_scale_coefficient(d, 0.0, &mut rng).unwrap();
            assert_eq!(x, 0.0);
            assert!(beta <= prev);
            prev = beta;
        }
    }

    #[test]
    fn zero_shadowing_at_one_km() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (beta, _) = PathLossModel::default()
            .large_scale_coefficient(1000.0, 0.0, &mut rng)
            .unwrap();
        assert!((beta / 10f64.powf(-14.072) - 1.0).abs() < 1e-12);
        // +8 dB of shadowing scales beta by exactly 10^0.8
        assert!((db_to_linear(-140.72 + 8.0) / beta / 10f64.powf(0.8) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shadowing_has_zero_mean_in_db() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = PathLossModel::default();
        let n = 100_000;
        let pl = model.path_loss_db(300.0).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let (beta, x) = model.large_scale_coefficient(300.0, 8.0, &mut rng).unwrap();
            let resid = 10.0 * beta.log10() - pl;
            assert!((resid - x).abs() < 1e-9);
            sum += resid;
            sum_sq += resid * resid;
        }
        let mean = sum / n as f64;
        let std = (sum_sq / n as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((std - 8.0).abs() < 0.1, "std {std}");
    }
}
