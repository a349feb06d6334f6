use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "HCF")]
    Hcf,
    #[serde(rename = "CF")]
    Cf,
    Cellular,
}

impl Architecture {
    pub fn label(self) -> &'static str {
        match self {
            Architecture::Hcf => "HCF",
            Architecture::Cf => "CF",
            Architecture::Cellular => "Cellular",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotPolicy {
    /// User `k` gets pilot `k mod tau_p`.
    #[default]
    Modulo,
}

/// Which pre-log factor multiplies the ergodic rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorConvention {
    /// `1 - tau_p / tau_u`
    #[default]
    PilotOverData,
    /// `1 - tau_p / tau_c`
    PilotOverBlock,
    /// `tau_u / tau_c`
    DataFraction,
}

/// Network, frame, radio and propagation parameters of one system.
///
/// Field names follow the config-file schema (`M`, `N_b`, `L`, `N_a`, `K`
/// are upper-case there).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub architecture: Architecture,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N_b")]
    pub n_b: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N_a")]
    pub n_a: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub tau_c: usize,
    pub tau_p: usize,
    pub tau_u: usize,
    /// UE transmit power in W.
    pub p_u: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub cell_radius_m: f64,
    pub asd_deg: f64,
    pub shadowing_std_db: f64,
    /// Path-loss intercept at 1 km.
    pub l0_db: f64,
    pub d0_m: f64,
    pub d1_m: f64,
    /// Recorded for provenance; `l0_db` already folds these in.
    pub carrier_ghz: f64,
    pub ap_height_m: f64,
    pub ue_height_m: f64,
    pub pilot_policy: PilotPolicy,
    pub prefactor_convention: PrefactorConvention,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            architecture: Architecture::Hcf,
            m: 384,
            n_b: 96,
            l: 72,
            n_a: 4,
            k: 16,
            tau_c: 200,
            tau_p: 8,
            tau_u: 192,
            p_u: 0.2,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            bandwidth_hz: 5e6,
            cell_radius_m: 2000.0,
            asd_deg: 30.0,
            shadowing_std_db: 8.0,
            l0_db: 140.72,
            d0_m: 10.0,
            d1_m: 50.0,
            carrier_ghz: 1.9,
            ap_height_m: 15.0,
            ue_height_m: 1.65,
            pilot_policy: PilotPolicy::Modulo,
            prefactor_convention: PrefactorConvention::PilotOverData,
            seed: 1,
        }
    }
}

impl SystemConfig {
    /// Default parameters with the antenna budget split for `architecture`:
    /// HCF puts a quarter at the cBS, CF spreads everything over 4-antenna
    /// APs, cellular puts everything at one site.
    pub fn for_architecture(architecture: Architecture) -> Self {
        let base = SystemConfig::default();
        let (n_b, l, n_a) = default_split(architecture, base.m, base.n_a);
        base.with_split(architecture, n_b, l, n_a)
    }

    pub fn with_split(mut self, architecture: Architecture, n_b: usize, l: usize, n_a: usize) -> Self {
        self.architecture = architecture;
        self.n_b = n_b;
        self.l = l;
        self.n_a = n_a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.m == 0 || self.k == 0 {
            return fail(format!("M = {} and K = {} must be positive", self.m, self.k));
        }
        if self.tau_c == 0 || self.tau_p == 0 || self.tau_u == 0 {
            return fail("tau_c, tau_p and tau_u must be positive".into());
        }
        if self.tau_p + self.tau_u > self.tau_c {
            return fail(format!(
                "tau_p + tau_u = {} exceeds tau_c = {}",
                self.tau_p + self.tau_u,
                self.tau_c
            ));
        }
        if self.n_b + self.l * self.n_a != self.m {
            return fail(format!(
                "N_b + L*N_a = {} + {}*{} != M = {}",
                self.n_b, self.l, self.n_a, self.m
            ));
        }
        if self.l > 0 && self.n_a == 0 {
            return fail("eAPs need at least one antenna".into());
        }
        match self.architecture {
            Architecture::Cellular if self.l != 0 || self.n_b != self.m => {
                return fail("cellular requires L = 0 and N_b = M".into());
            }
            Architecture::Cf if self.n_b != 0 => return fail("CF requires N_b = 0".into()),
            Architecture::Hcf if self.n_b == 0 || self.l == 0 => {
                return fail("HCF requires both a cBS (N_b > 0) and eAPs (L > 0)".into());
            }
            _ => {}
        }
        let positive = [
            ("p_u", self.p_u),
            ("bandwidth_hz", self.bandwidth_hz),
            ("cell_radius_m", self.cell_radius_m),
            ("d0_m", self.d0_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.asd_deg >= 0.0 && self.shadowing_std_db >= 0.0) {
            return fail("asd_deg and shadowing_std_db must be nonnegative".into());
        }
        if !(self.d1_m > self.d0_m) {
            return fail(format!("breakpoints need d0 < d1, got {} / {}", self.d0_m, self.d1_m));
        }
        if self.prefactor() < 0.0 {
            return fail(format!(
                "pre-log factor is negative for tau_p = {}, tau_u = {}",
                self.tau_p, self.tau_u
            ));
        }
        Ok(())
    }

    /// Receiver noise power in W.
    pub fn noise_power_w(&self) -> f64 {
        let dbm = self.noise_psd_dbm_hz + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db;
        10f64.powf((dbm - 30.0) / 10.0)
    }

    pub fn asd_rad(&self) -> f64 {
        self.asd_deg.to_radians()
    }

    /// Number of antenna sites: the cBS (if present) plus the eAPs.
    pub fn node_count(&self) -> usize {
        usize::from(self.n_b > 0) + self.l
    }

    pub fn prefactor(&self) -> f64 {
        let (p, u, c) = (self.tau_p as f64, self.tau_u as f64, self.tau_c as f64);
        match self.prefactor_convention {
            PrefactorConvention::PilotOverData => 1.0 - p / u,
            PrefactorConvention::PilotOverBlock => 1.0 - p / c,
            PrefactorConvention::DataFraction => u / c,
        }
    }
}

pub fn default_split(architecture: Architecture, m: usize, n_a: usize) -> (usize, usize, usize) {
    match architecture {
        Architecture::Hcf => {
            let n_b = m / 4;
            (n_b, (m - n_b) / n_a, n_a)
        }
        Architecture::Cf => (0, m / n_a, n_a),
        Architecture::Cellular => (m, 0, n_a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_hcf() {
        let c = SystemConfig::default();
        c.validate().unwrap();
        assert_eq!(c.n_b + c.l * c.n_a, 384);
        assert_eq!(c.node_count(), 73);
    }

    #[test]
    fn noise_power_is_minus_98_dbm() {
        let dbm = 10.0 * (SystemConfig::default().noise_power_w() * 1e3).log10();
        assert!((dbm - (-98.0103)).abs() < 1e-3, "{dbm}");
    }

    #[test]
    fn architecture_splits() {
        let cf = SystemConfig::for_architecture(Architecture::Cf);
        assert_eq!((cf.n_b, cf.l, cf.n_a), (0, 96, 4));
        cf.validate().unwrap();
        let cell = SystemConfig::for_architecture(Architecture::Cellular);
        assert_eq!((cell.n_b, cell.l), (384, 0));
        cell.validate().unwrap();
    }

    #[test]
    fn rejects_broken_antenna_budget() {
        let c = SystemConfig {
            n_b: 100,
            ..SystemConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = SystemConfig {
            tau_u: 195,
            ..SystemConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SystemConfig::default().with_split(Architecture::Cf, 96, 72, 4);
        assert!(c.validate().is_err());
    }

    #[test]
    fn prefactor_conventions() {
        let mut c = SystemConfig::default();
        assert!((c.prefactor() - (1.0 - 8.0 / 192.0)).abs() < 1e-15);
        c.prefactor_convention = PrefactorConvention::PilotOverBlock;
        assert!((c.prefactor() - 0.96).abs() < 1e-15);
        c.prefactor_convention = PrefactorConvention::DataFraction;
        assert!((c.prefactor() - 0.96).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<SystemConfig>(r#"{"M": 384, "bogus": 1}"#);
        assert!(err.is_err());
        let ok: SystemConfig = serde_json::from_str(r#"{"K": 4, "architecture": "CF", "N_b": 0, "L": 96}"#).unwrap();
        assert_eq!(ok.k, 4);
        assert_eq!(ok.architecture, Architecture::Cf);
    }
}
