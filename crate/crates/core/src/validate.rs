//! Fast analytic self-checks behind `hcfsim validate`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{pilot_covariance, ChannelStatistics, PilotAssignment};
use crate::combining::{centralized_combiner, maxmin_power_control, MaxMinOptions, Mode, Scheme, SinrCoefficients};
use crate::cost::{complexity_table, fronthaul_overhead, CostParams};
use crate::harness::percentile;
use crate::linalg::{complex_normal, frobenius, BlockDiag, CMatrix};
use crate::scenario::{Architecture, Drop, PathLossModel, SystemConfig};

/// Reference complexity table for the default dimensions, rows
/// centralized / distributed CF / HCF, columns MR / ZF / MMSE.
pub const REFERENCE_COMPLEXITY: [[u64; 3]; 3] = [[6144, 7189, 325_632], [6144, 9216, 6432], [6144, 8726, 12_504]];

/// Reference fronthaul loads: HCF centralized, HCF hierarchical, CF centralized.
pub const REFERENCE_FRONTHAUL: [u64; 3] = [57_600, 221_184, 76_800];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn complexity_check() -> Check {
    match complexity_table(&CostParams::default()) {
        Ok(table) => {
            let got: Vec<[u64; 3]> = table.iter().map(|(_, row)| *row).collect();
            let mismatches: Vec<String> = got
                .iter()
                .zip(&REFERENCE_COMPLEXITY)
                .flat_map(|(g, r)| g.iter().zip(r))
                .filter(|(g, r)| g != r)
                .map(|(g, r)| format!("{g} != {r}"))
                .collect();
            check(
                "complexity table",
                mismatches.is_empty(),
                if mismatches.is_empty() {
                    format!("{got:?}")
                } else {
                    mismatches.join(", ")
                },
            )
        }
        Err(e) => check("complexity table", false, e.to_string()),
    }
}

fn fronthaul_check() -> Check {
    let p = CostParams::default();
    let got = [
        fronthaul_overhead(Architecture::Hcf, Mode::Centralized, &p),
        fronthaul_overhead(Architecture::Hcf, Mode::Hierarchical, &p),
        fronthaul_overhead(Architecture::Cf, Mode::Centralized, &p),
    ];
    check("fronthaul overhead", got == REFERENCE_FRONTHAUL, format!("{got:?}"))
}

fn path_loss_check() -> Check {
    let m = PathLossModel::default();
    let gaps: Vec<f64> = [m.d0_m, m.d1_m]
        .iter()
        .map(|&bp| {
            let below = m.path_loss_db(bp * (1.0 - 1e-12)).unwrap_or(f64::NAN);
            let above = m.path_loss_db(bp * (1.0 + 1e-12)).unwrap_or(f64::NAN);
            (below - above).abs()
        })
        .collect();
    check(
        "path-loss continuity",
        gaps.iter().all(|&g| g < 1e-9),
        format!("jumps {gaps:?} dB"),
    )
}

fn small_drop(seed: u64) -> (SystemConfig, Drop, PilotAssignment) {
    let cfg = SystemConfig {
        m: 16,
        n_b: 8,
        l: 2,
        n_a: 4,
        k: 4,
        tau_p: 2,
        cell_radius_m: 300.0,
        ..SystemConfig::default()
    };
    let drop = Drop::generate(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).expect("valid config");
    let a = PilotAssignment::new(cfg.k, cfg.tau_p, cfg.pilot_policy);
    (cfg, drop, a)
}

fn theta_identity_check() -> Check {
    let (cfg, drop, assignment) = small_drop(11);
    let sigma2 = cfg.noise_power_w();
    let stats = match ChannelStatistics::new(&drop, &assignment, cfg.p_u, sigma2) {
        Ok(s) => s,
        Err(e) => return check("error covariance identity", false, e.to_string()),
    };
    let mut worst = 0.0f64;
    for k in 0..cfg.k {
        for node in 0..drop.nodes() {
            let cohort = assignment.cohort(k);
            let gamma = pilot_covariance(&drop, node, cohort, cfg.p_u, cfg.tau_p, sigma2);
            let w = stats.estimator(k, node);
            let cov = w * gamma * w.adjoint() * nalgebra::Complex::new(cfg.tau_p as f64, 0.0);
            let r = &drop.r[k][node];
            let rel = frobenius(&(cov + stats.theta(k, node) - r)) / frobenius(r);
            worst = worst.max(rel);
        }
    }
    check("error covariance identity", worst < 1e-10, format!("max relative defect {worst:.2e}"))
}

fn zf_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (m, k) = (12, 4);
    let h = CMatrix::from_fn(m, k, |_, _| complex_normal(&mut rng));
    let theta: Vec<BlockDiag> = (0..k).map(|_| BlockDiag::new(vec![CMatrix::zeros(m, m)])).collect();
    match centralized_combiner(&h, &theta, &[1.0; 4], 1.0, 1.0, Scheme::ZF) {
        Ok(crate::combining::CombinerSet::Centralized { d, .. }) => {
            let defect = frobenius(&(d.adjoint() * &h - CMatrix::identity(k, k)));
            check("ZF annihilation", defect < 1e-9, format!("||D^H H - I|| = {defect:.2e}"))
        }
        Ok(_) => check("ZF annihilation", false, "unexpected combiner layout".into()),
        Err(e) => check("ZF annihilation", false, e.to_string()),
    }
}

fn maxmin_check() -> Check {
    let c = SinrCoefficients {
        gain: vec![2.0, 1.0],
        interference: vec![vec![0.0, 0.3], vec![0.5, 0.0]],
        error: vec![vec![0.05, 0.02], vec![0.01, 0.04]],
        noise: vec![0.2, 0.1],
    };
    let Ok(p) = maxmin_power_control(&c, &MaxMinOptions::default()) else {
        return check("max-min power control", false, "did not converge".into());
    };
    let achieved = c.sinr(&p.eta).into_iter().fold(f64::INFINITY, f64::min);
    let steps = 400;
    let mut best = 0.0f64;
    for i in 0..=steps {
        for j in 0..=steps {
            let eta = [i as f64 / steps as f64, j as f64 / steps as f64];
            best = best.max(c.sinr(&eta).into_iter().fold(f64::INFINITY, f64::min));
        }
    }
    let rel = (achieved - best).abs() / best;
    check(
        "max-min power control",
        rel < 0.01 && achieved >= best * (1.0 - 1e-3),
        format!("min SINR {achieved:.6} vs grid {best:.6}"),
    )
}

fn percentile_check() -> Check {
    let v = [1.0, 2.0, 3.0, 4.0];
    let got = percentile(&v, 5.0).unwrap_or(f64::NAN);
    check("percentile", (got - 1.15).abs() < 1e-12, format!("5th percentile {got}"))
}

/// Runs every check; all of them take well under a second.
pub fn run_checks() -> Vec<Check> {
    vec![
        complexity_check(),
        fronthaul_check(),
        path_loss_check(),
        theta_identity_check(),
        zf_check(),
        maxmin_check(),
        percentile_check(),
    ]
}
