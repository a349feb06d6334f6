use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::combining::{Mode, Scheme};
use crate::error::{Error, Result};
use crate::scenario::{default_split, Architecture, SystemConfig};

/// Antenna split `N_b + L N_a = M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Split {
    #[serde(rename = "N_b")]
    pub n_b: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N_a")]
    pub n_a: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    pub architecture: Architecture,
    /// Defaults to the architecture's standard split of the base `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub scheme: Scheme,
    #[serde(default)]
    pub power_control: bool,
}

fn default_mode() -> Mode {
    Mode::Centralized
}

impl Variant {
    pub fn new(name: &str, architecture: Architecture, mode: Mode, scheme: Scheme) -> Self {
        Variant {
            name: name.to_string(),
            architecture,
            split: None,
            mode,
            scheme,
            power_control: false,
        }
    }

    pub fn with_split(mut self, n_b: usize, l: usize, n_a: usize) -> Self {
        self.split = Some(Split { n_b, l, n_a });
        self
    }

    pub fn with_power_control(mut self) -> Self {
        self.power_control = true;
        self
    }

    pub fn split_for(&self, base: &SystemConfig) -> Split {
        self.split.unwrap_or_else(|| {
            let (n_b, l, n_a) = default_split(self.architecture, base.m, base.n_a);
            Split { n_b, l, n_a }
        })
    }

    /// The base configuration specialised to this variant.
    pub fn system(&self, base: &SystemConfig) -> SystemConfig {
        let s = self.split_for(base);
        base.clone().with_split(self.architecture, s.n_b, s.l, s.n_a)
    }

    /// Identifier of the drops this variant sees. Variants with equal keys
    /// are evaluated on the same drops and realizations.
    pub(crate) fn scenario_key(&self, base: &SystemConfig) -> u64 {
        let s = self.split_for(base);
        let text = format!("{}/{}/{}/{}", self.architecture.label(), s.n_b, s.l, s.n_a);
        fnv1a(text.as_bytes())
    }

    fn check(&self, base: &SystemConfig, min_inner: usize, n_inner: usize) -> Result<()> {
        let cfg = self.system(base);
        cfg.validate()
            .map_err(|e| Error::Config(format!("variant {:?}: {e}", self.name)))?;
        let fail = |msg: String| Err(Error::Config(format!("variant {:?}: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return fail("empty name".into());
        }
        match (self.architecture, self.mode, self.scheme) {
            (Architecture::Cellular, Mode::Hierarchical, _) => {
                return fail("cellular has no hierarchical mode".into());
            }
            (_, Mode::Centralized, Scheme::ZF) if cfg.k > cfg.m => {
                return fail(format!("ZF requires K <= M, got K = {} and M = {}", cfg.k, cfg.m));
            }
            (_, Mode::Hierarchical, Scheme::ZF) => {
                let smallest = [(cfg.n_b > 0).then_some(cfg.n_b), (cfg.l > 0).then_some(cfg.n_a)]
                    .into_iter()
                    .flatten()
                    .min()
                    .unwrap_or(0);
                if cfg.k > smallest {
                    return fail(format!(
                        "hierarchical ZF requires K <= antennas at every node, got K = {} and {smallest}",
                        cfg.k
                    ));
                }
            }
            _ => {}
        }
        if self.mode == Mode::Hierarchical && n_inner < min_inner {
            return fail(format!(
                "hierarchical mode needs n_inner >= {min_inner} for its sample moments, got {n_inner}"
            ));
        }
        Ok(())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A full simulation campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSpec {
    pub base: SystemConfig,
    pub variants: Vec<Variant>,
    pub n_drops: usize,
    /// Small-scale realizations per drop.
    pub n_inner: usize,
    /// Hierarchical variants refuse fewer inner realizations than this.
    pub min_inner_samples: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        CampaignSpec {
            base: SystemConfig::default(),
            variants: CampaignSpec::default_variants(),
            n_drops: 500,
            n_inner: 100,
            min_inner_samples: crate::performance::DEFAULT_MIN_INNER_SAMPLES,
            output_dir: PathBuf::from("results"),
            seed: 1,
        }
    }
}

impl CampaignSpec {
    pub fn default_variants() -> Vec<Variant> {
        use Architecture::{Cf, Hcf};
        use Mode::{Centralized, Hierarchical};
        vec![
            Variant::new("HCF-MR", Hcf, Centralized, Scheme::MR),
            Variant::new("HCF-ZF", Hcf, Centralized, Scheme::ZF),
            Variant::new("HCF-MMSE", Hcf, Centralized, Scheme::MMSE),
            Variant::new("HCF-ZF-PC", Hcf, Centralized, Scheme::ZF).with_power_control(),
            Variant::new("HCF-ZF-50%", Hcf, Centralized, Scheme::ZF).with_split(192, 48, 4),
            Variant::new("HCF-LSFD-MR", Hcf, Hierarchical, Scheme::MR),
            Variant::new("HCF-LSFD-MMSE", Hcf, Hierarchical, Scheme::MMSE),
            Variant::new("CF-MR", Cf, Centralized, Scheme::MR),
            Variant::new("CF-ZF", Cf, Centralized, Scheme::ZF),
            Variant::new("CF-MMSE", Cf, Centralized, Scheme::MMSE),
        ]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CampaignSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CampaignSpec::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_drops == 0 || self.n_inner == 0 {
            return Err(Error::Config(format!(
                "n_drops = {} and n_inner = {} must be at least 1",
                self.n_drops, self.n_inner
            )));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("no variants".into()));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if self.variants[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Config(format!("duplicate variant name {:?}", v.name)));
            }
            v.check(&self.base, self.min_inner_samples, self.n_inner)?;
        }
        let mut names: Vec<String> = self.variants.iter().map(|v| super::sanitize_name(&v.name)).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("two variant names map to the same output file".into()));
        }
        Ok(())
    }

    /// Resampled drops tolerated per variant: 1% of the drops, at least one.
    pub fn resample_budget(&self) -> usize {
        self.n_drops.div_ceil(100)
    }
}
