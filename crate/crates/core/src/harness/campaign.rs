use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{CampaignSpec, Variant};
use super::stats::percentile;
use crate::channel::{ChannelStatistics, PilotAssignment};
use crate::combining::{
    maxmin_power_control, CentralizedCombiner, CombinerSet, HierarchicalCombiner, MaxMinOptions, Mode, Scheme,
    SinrCoefficients,
};
use crate::cost::{cost_report, CostParams, CostReport};
use crate::error::{Error, Result};
use crate::linalg::{BlockDiag, CMatrix};
use crate::performance::{
    centralized_coefficients, error_aggregate, se_with_prefactor, sinr_centralized, sinr_centralized_with,
    sinr_hierarchical, LsfdMoments,
};
use crate::scenario::{Drop, SystemConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct VariantResult {
    pub variant: Variant,
    pub config: SystemConfig,
    /// `per_user_se[drop][user]`
    pub per_user_se: Vec<Vec<f64>>,
    /// Sum SE of each drop.
    pub capacity: Vec<f64>,
    /// 5th percentile of the pooled per-user SE.
    pub se_95_likely: f64,
    pub median_capacity: f64,
    pub mean_se: f64,
    pub mean_capacity: f64,
    pub cost: CostReport,
    pub resampled_drops: usize,
}

impl VariantResult {
    pub fn pooled_se(&self) -> Vec<f64> {
        self.per_user_se.iter().flatten().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub resampled_drops: usize,
    pub runtime_s: f64,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignResult {
    pub spec: CampaignSpec,
    pub variants: Vec<VariantResult>,
    pub diagnostics: Diagnostics,
}

impl CampaignResult {
    pub fn variant(&self, name: &str) -> Option<&VariantResult> {
        self.variants.iter().find(|v| v.variant.name == name)
    }
}

// Substreams: a drop seed is derived from (campaign seed, scenario key,
// drop index, attempt). Stream 0 of that seed draws the layout and
// shadowing; stream b + 1 draws inner realization b.

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn drop_seed(seed: u64, scenario: u64, drop: usize, attempt: usize) -> u64 {
    [scenario, drop as u64, attempt as u64]
        .into_iter()
        .fold(splitmix(seed), |h, part| splitmix(h ^ splitmix(part)))
}

fn inner_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64 + 1);
    rng
}

struct PreparedDrop {
    seed: u64,
    stats: ChannelStatistics,
}

impl PreparedDrop {
    fn new(cfg: &SystemConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let drop = Drop::generate(cfg, &mut rng)?;
        let assignment = PilotAssignment::new(cfg.k, cfg.tau_p, cfg.pilot_policy);
        let stats = ChannelStatistics::new(&drop, &assignment, cfg.p_u, cfg.noise_power_w())?;
        Ok(PreparedDrop { seed, stats })
    }
}

struct Evaluator<'a> {
    cfg: &'a SystemConfig,
    variant: &'a Variant,
    n_inner: usize,
    min_inner: usize,
}

impl Evaluator<'_> {
    fn sigma2(&self) -> f64 {
        self.cfg.noise_power_w()
    }

    fn moments(&self, d: &PreparedDrop, eta: &[f64]) -> Result<LsfdMoments> {
        let theta = d.stats.theta_all();
        let builder = HierarchicalCombiner::new(theta, eta, self.cfg.p_u, self.sigma2(), self.variant.scheme)?;
        let mut moments = LsfdMoments::new(self.cfg.k, d.stats.antennas().len());
        for b in 0..self.n_inner {
            let state = d.stats.realize(&mut inner_rng(d.seed, b))?;
            moments.accumulate(&builder.build(&state.h_hat)?, &state.h_hat, theta)?;
        }
        Ok(moments)
    }

    fn maxmin(&self, coeffs: &SinrCoefficients) -> Result<Vec<f64>> {
        Ok(maxmin_power_control(coeffs, &MaxMinOptions::default())?.eta)
    }

    /// Centralized SINRs of one realization. With power control the powers
    /// are equalized for this realization's full-power combiners; MMSE is
    /// then rebuilt for the new powers.
    fn centralized_sinr(
        &self,
        builder: &CentralizedCombiner,
        h_hat: &CMatrix,
        theta: &[BlockDiag],
        full_aggregate: &BlockDiag,
    ) -> Result<Vec<f64>> {
        let (p_u, sigma2) = (self.cfg.p_u, self.sigma2());
        let CombinerSet::Centralized { d, .. } = builder.build(h_hat)? else {
            unreachable!("centralized builder");
        };
        if !self.variant.power_control {
            let full = vec![1.0; self.cfg.k];
            return Ok(sinr_centralized_with(&d, h_hat, theta, full_aggregate, &full, p_u, sigma2)?
                .into_iter()
                .map(|g| g.sinr)
                .collect());
        }
        let coeffs = centralized_coefficients(&d, h_hat, theta, p_u, sigma2)?;
        let eta = self.maxmin(&coeffs)?;
        if self.variant.scheme != Scheme::MMSE {
            return Ok(coeffs.sinr(&eta));
        }
        let CombinerSet::Centralized { d, .. } =
            CentralizedCombiner::new(theta, &eta, p_u, sigma2, Scheme::MMSE)?.build(h_hat)?
        else {
            unreachable!("centralized builder");
        };
        Ok(sinr_centralized(&d, h_hat, theta, &eta, p_u, sigma2)?
            .into_iter()
            .map(|g| g.sinr)
            .collect())
    }

    /// Per-user SE for one drop.
    fn evaluate(&self, d: &PreparedDrop) -> Result<Vec<f64>> {
        let k = self.cfg.k;
        let full = vec![1.0; k];
        let theta = d.stats.theta_all();
        let samples = match self.variant.mode {
            Mode::Centralized => {
                let builder = CentralizedCombiner::new(theta, &full, self.cfg.p_u, self.sigma2(), self.variant.scheme)?;
                let aggregate = error_aggregate(theta, &full)?;
                let mut samples = vec![Vec::with_capacity(self.n_inner); k];
                for b in 0..self.n_inner {
                    let state = d.stats.realize(&mut inner_rng(d.seed, b))?;
                    let sinr = self.centralized_sinr(&builder, &state.stacked_h_hat(), theta, &aggregate)?;
                    for (s, g) in samples.iter_mut().zip(sinr) {
                        s.push(g);
                    }
                }
                samples
            }
            Mode::Hierarchical => {
                // per-drop powers from the full-power LSFD decomposition
                let eta = if self.variant.power_control {
                    let moments = self.moments(d, &full)?;
                    self.maxmin(&moments.coefficients(self.cfg.p_u, self.sigma2(), self.min_inner)?)?
                } else {
                    full
                };
                let moments = self.moments(d, &eta)?;
                sinr_hierarchical(&moments, &eta, self.cfg.p_u, self.sigma2(), self.min_inner)?
                    .into_iter()
                    .map(|g| vec![g.sinr])
                    .collect()
            }
        };
        Ok(se_with_prefactor(&samples, self.cfg.prefactor())?.per_user_se)
    }
}

/// Per-user SE of one variant on the drop generated from `seed`.
pub fn simulate_variant_drop(
    cfg: &SystemConfig,
    variant: &Variant,
    seed: u64,
    n_inner: usize,
    min_inner: usize,
) -> Result<Vec<f64>> {
    let prepared = PreparedDrop::new(cfg, seed)?;
    Evaluator {
        cfg,
        variant,
        n_inner,
        min_inner,
    }
    .evaluate(&prepared)
}

/// SE per variant of one group, plus how many extra drops each needed.
type UnitOutcome = Vec<(Vec<f64>, usize)>;

fn run_unit(spec: &CampaignSpec, group: &[usize], key: u64, drop: usize) -> Result<UnitOutcome> {
    let cfg = spec.variants[group[0]].system(&spec.base);
    let mut out: Vec<Option<(Vec<f64>, usize)>> = vec![None; group.len()];
    for attempt in 0..=spec.resample_budget() {
        if out.iter().all(Option::is_some) {
            break;
        }
        let prepared = PreparedDrop::new(&cfg, drop_seed(spec.seed, key, drop, attempt))?;
        for (slot, &vi) in out.iter_mut().zip(group) {
            if slot.is_some() {
                continue;
            }
            let eval = Evaluator {
                cfg: &cfg,
                variant: &spec.variants[vi],
                n_inner: spec.n_inner,
                min_inner: spec.min_inner_samples,
            };
            match eval.evaluate(&prepared) {
                Ok(se) => *slot = Some((se, attempt)),
                Err(Error::DegenerateDrop(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.into_iter()
        .zip(group)
        .map(|(slot, &vi)| {
            slot.ok_or_else(|| {
                Error::Campaign(format!(
                    "variant {:?}: drop {drop} stayed degenerate after {} resamples",
                    spec.variants[vi].name,
                    spec.resample_budget()
                ))
            })
        })
        .collect()
}

/// Runs every variant in the current rayon pool. Results depend only on the
/// spec, not on the number of workers.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignResult> {
    spec.validate()?;
    let start = Instant::now();

    let mut groups: Vec<(u64, Vec<usize>)> = Vec::new();
    for (i, v) in spec.variants.iter().enumerate() {
        let key = v.scenario_key(&spec.base);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => groups.push((key, vec![i])),
        }
    }
    let units: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|g| (0..spec.n_drops).map(move |d| (g, d)))
        .collect();
    let outcomes: Vec<UnitOutcome> = units
        .par_iter()
        .map(|&(g, d)| run_unit(spec, &groups[g].1, groups[g].0, d))
        .collect::<Result<_>>()?;

    let mut per_variant: Vec<Vec<(Vec<f64>, usize)>> = vec![Vec::with_capacity(spec.n_drops); spec.variants.len()];
    for (&(g, _), outcome) in units.iter().zip(outcomes) {
        for (&vi, entry) in groups[g].1.iter().zip(outcome) {
            per_variant[vi].push(entry);
        }
    }

    let budget = spec.resample_budget();
    let mut variants = Vec::with_capacity(spec.variants.len());
    for (variant, drops) in spec.variants.iter().zip(per_variant) {
        let resampled_drops: usize = drops.iter().map(|(_, a)| a).sum();
        if resampled_drops > budget {
            return Err(Error::Campaign(format!(
                "variant {:?} resampled {resampled_drops} drops, budget is {budget}",
                variant.name
            )));
        }
        let per_user_se: Vec<Vec<f64>> = drops.into_iter().map(|(se, _)| se).collect();
        let capacity: Vec<f64> = per_user_se.iter().map(|se| se.iter().sum()).collect();
        let pooled: Vec<f64> = per_user_se.iter().flatten().copied().collect();
        let config = variant.system(&spec.base);
        variants.push(VariantResult {
            se_95_likely: percentile(&pooled, 5.0)?,
            median_capacity: percentile(&capacity, 50.0)?,
            mean_se: pooled.iter().sum::<f64>() / pooled.len() as f64,
            mean_capacity: capacity.iter().sum::<f64>() / capacity.len() as f64,
            cost: cost_report(variant.architecture, variant.mode, variant.scheme, &CostParams::from(&config))?,
            variant: variant.clone(),
            config,
            per_user_se,
            capacity,
            resampled_drops,
        });
    }
    Ok(CampaignResult {
        spec: spec.clone(),
        diagnostics: Diagnostics {
            resampled_drops: variants.iter().map(|v| v.resampled_drops).sum(),
            runtime_s: start.elapsed().as_secs_f64(),
            workers: rayon::current_num_threads(),
        },
        variants,
    })
}

/// [`run_campaign`] on a dedicated pool of `workers` threads.
pub fn run_campaign_with_workers(spec: &CampaignSpec, workers: usize) -> Result<CampaignResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Campaign(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_campaign(spec))
}
