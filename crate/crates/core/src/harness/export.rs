use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::campaign::{CampaignResult, VariantResult};
use super::spec::Split;
use super::stats::empirical_cdf;
use crate::combining::{Mode, Scheme};
use crate::cost::CostReport;
use crate::error::{Error, Result};
use crate::scenario::{Architecture, SystemConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSummary {
    pub name: String,
    pub architecture: Architecture,
    pub mode: Mode,
    pub scheme: Scheme,
    pub power_control: bool,
    pub split: Split,
    pub se_95_likely: f64,
    pub median_capacity: f64,
    pub mean_se: f64,
    pub mean_capacity: f64,
    pub se_samples: usize,
    pub capacity_samples: usize,
    pub resampled_drops: usize,
    pub cost: CostReport,
    pub se_cdf_file: String,
    pub capacity_cdf_file: String,
}

/// Contents of `summary.json`. Wall-clock time is left out so re-running a
/// campaign reproduces the file byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSummary {
    pub seed: u64,
    pub n_drops: usize,
    pub n_inner: usize,
    pub config: SystemConfig,
    pub resampled_drops: usize,
    pub variants: Vec<VariantSummary>,
}

impl CampaignSummary {
    pub fn from_result(result: &CampaignResult) -> Self {
        CampaignSummary {
            seed: result.spec.seed,
            n_drops: result.spec.n_drops,
            n_inner: result.spec.n_inner,
            config: result.spec.base.clone(),
            resampled_drops: result.diagnostics.resampled_drops,
            variants: result.variants.iter().map(variant_summary).collect(),
        }
    }
}

fn variant_summary(v: &VariantResult) -> VariantSummary {
    let stem = sanitize_name(&v.variant.name);
    VariantSummary {
        name: v.variant.name.clone(),
        architecture: v.variant.architecture,
        mode: v.variant.mode,
        scheme: v.variant.scheme,
        power_control: v.variant.power_control,
        split: Split {
            n_b: v.config.n_b,
            l: v.config.l,
            n_a: v.config.n_a,
        },
        se_95_likely: v.se_95_likely,
        median_capacity: v.median_capacity,
        mean_se: v.mean_se,
        mean_capacity: v.mean_capacity,
        se_samples: v.per_user_se.iter().map(Vec::len).sum(),
        capacity_samples: v.capacity.len(),
        resampled_drops: v.resampled_drops,
        cost: v.cost.clone(),
        se_cdf_file: format!("cdf_{stem}_se.csv"),
        capacity_cdf_file: format!("cdf_{stem}_capacity.csv"),
    }
}

/// File-name-safe form of a variant name: `%` becomes `pct`, anything other
/// than ASCII alphanumerics, `-` and `_` becomes `_`.
pub fn sanitize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        match c {
            '%' => out.push_str("pct"),
            c if c.is_ascii_alphanumeric() || c == '-' || c == '_' => out.push(c),
            _ => out.push('_'),
        }
    }
    out
}

/// Writes `value,cdf` rows in ascending order.
pub fn write_cdf(path: &Path, samples: &[f64]) -> Result<()> {
    let mut text = String::from("value,cdf\n");
    for (x, c) in empirical_cdf(samples)? {
        writeln!(text, "{x},{c}").expect("writing to a string");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `summary.json` and two CDF tables per variant into `dir`.
/// CSVs go first, so a failure on the summary still leaves the samples.
pub fn export_results(result: &CampaignResult, dir: &Path) -> Result<CampaignSummary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let summary = CampaignSummary::from_result(result);
    for (v, s) in result.variants.iter().zip(&summary.variants) {
        write_cdf(&dir.join(&s.se_cdf_file), &v.pooled_se())?;
        write_cdf(&dir.join(&s.capacity_cdf_file), &v.capacity)?;
    }
    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

pub fn read_summary(path: &Path) -> Result<CampaignSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
