//! TOML experiment configuration.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cazac::{resolve_family, CazacFamily, FamilyTag};
use crate::channel::{ChannelConfig, PulseShapeConfig, VEH_A_DELAYS_NS, VEH_A_POWERS_DB};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::receiver::{SensingRegion, TurboMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Monte-Carlo trial count; each experiment falls back to its own default.
    pub trials: Option<usize>,
    pub out: PathBuf,
    pub grid: GridSection,
    pub waveform: WaveformSection,
    pub channel: ChannelSection,
    pub isac: IsacSection,
    pub rach: RachSection,
    pub verify: VerifySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: None,
            out: PathBuf::from("out"),
            grid: GridSection::default(),
            waveform: WaveformSection::default(),
            channel: ChannelSection::default(),
            isac: IsacSection::default(),
            rach: RachSection::default(),
            verify: VerifySection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads and parses a config file. A missing or unreadable file is a
    /// configuration error.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn grid_params(&self) -> Result<GridParams> {
        GridParams::new(self.grid.m, self.grid.n, self.grid.nu_p)
    }

    /// `trials`, or `default` when unset. Zero is rejected.
    pub fn trials_or(&self, default: usize) -> Result<usize> {
        match self.trials.unwrap_or(default) {
            0 => Err(Error::EmptyTrialSet),
            t => Ok(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub m: usize,
    pub n: usize,
    /// Doppler period in Hz.
    pub nu_p: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { m: 31, n: 37, nu_p: 30_000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    GeneralQuadratic,
    ZadoffChu,
    Gaussian,
    Wiener,
}

impl FamilyName {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GeneralQuadratic => "general_quadratic",
            Self::ZadoffChu => "zadoff_chu",
            Self::Gaussian => "gaussian",
            Self::Wiener => "wiener",
        }
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general_quadratic" => Ok(Self::GeneralQuadratic),
            "zadoff_chu" | "zc" => Ok(Self::ZadoffChu),
            "gaussian" => Ok(Self::Gaussian),
            "wiener" => Ok(Self::Wiener),
            other => Err(Error::Config(format!("unknown waveform family {other:?}"))),
        }
    }
}

/// Waveform for the ambiguity experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformSection {
    pub family: FamilyName,
    /// Zadoff-Chu root.
    pub u: i64,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self { family: FamilyName::ZadoffChu, u: 14, alpha: 7, beta: 7, gamma: 0 }
    }
}

impl WaveformSection {
    pub fn tag(&self) -> FamilyTag {
        match self.family {
            FamilyName::GeneralQuadratic => {
                FamilyTag::GeneralQuadratic { alpha: self.alpha, beta: self.beta, gamma: self.gamma }
            }
            FamilyName::ZadoffChu => FamilyTag::ZadoffChu { u: self.u },
            FamilyName::Gaussian => FamilyTag::Gaussian { alpha: self.alpha, beta: self.beta },
            FamilyName::Wiener => FamilyTag::Wiener { alpha: self.alpha },
        }
    }

    pub fn resolve(&self, grid: &GridParams) -> Result<CazacFamily> {
        resolve_family(self.tag(), grid)
    }
}

/// Multipath profile and pulse shaping, shared by the ISAC and RACH runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub delays_ns: Vec<f64>,
    pub powers_db: Vec<f64>,
    pub equal_power: bool,
    pub beta_tau: f64,
    pub beta_nu: f64,
    pub tap_halfwidth: usize,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let ps = PulseShapeConfig::default();
        Self {
            delays_ns: VEH_A_DELAYS_NS.to_vec(),
            powers_db: VEH_A_POWERS_DB.to_vec(),
            equal_power: false,
            beta_tau: ps.beta_tau,
            beta_nu: ps.beta_nu,
            tap_halfwidth: ps.tap_halfwidth,
        }
    }
}

impl ChannelSection {
    pub fn channel_config(&self, nu_max: f64) -> Result<ChannelConfig> {
        let cfg = ChannelConfig {
            delays_ns: self.delays_ns.clone(),
            powers_db: self.powers_db.clone(),
            nu_max,
            equal_power: self.equal_power,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn pulse_shape(&self) -> Result<PulseShapeConfig> {
        let ps = PulseShapeConfig { beta_tau: self.beta_tau, beta_nu: self.beta_nu, tap_halfwidth: self.tap_halfwidth };
        ps.validate()?;
        Ok(ps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurboModeName {
    Readoff,
    DecisionDirected,
}

impl FromStr for TurboModeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "readoff" => Ok(Self::Readoff),
            "decision_directed" => Ok(Self::DecisionDirected),
            other => Err(Error::Config(format!("unknown turbo mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsacSection {
    pub nu_max: f64,
    /// Zadoff-Chu root of the spread pilot.
    pub pilot_root: i64,
    pub rho_d_db: f64,
    pub pdr_db: Vec<f64>,
    pub iterations: usize,
    pub k_min: i64,
    pub k_max: i64,
    pub l_max: i64,
    pub turbo_mode: TurboModeName,
    pub ls_k_lo: i64,
    pub ls_k_hi: i64,
    pub ls_l_lo: i64,
    pub ls_l_hi: i64,
    pub soft_feedback: bool,
}

impl Default for IsacSection {
    fn default() -> Self {
        Self {
            nu_max: 6000.0,
            pilot_root: 11,
            rho_d_db: 25.0,
            pdr_db: vec![0.0, 5.0, 10.0],
            iterations: 5,
            k_min: -1,
            k_max: 4,
            l_max: 5,
            turbo_mode: TurboModeName::DecisionDirected,
            ls_k_lo: -2,
            ls_k_hi: 5,
            ls_l_lo: -10,
            ls_l_hi: 10,
            soft_feedback: false,
        }
    }
}

impl IsacSection {
    pub fn region(&self) -> Result<SensingRegion> {
        SensingRegion::with_k_min(self.k_min, self.k_max, self.l_max)
    }

    pub fn mode(&self) -> Result<TurboMode> {
        Ok(match self.turbo_mode {
            TurboModeName::Readoff => TurboMode::Readoff,
            TurboModeName::DecisionDirected => {
                if self.ls_k_lo > self.ls_k_hi || self.ls_l_lo > self.ls_l_hi {
                    return Err(Error::Config("empty least-squares window".into()));
                }
                TurboMode::DecisionDirected {
                    k_lo: self.ls_k_lo,
                    k_hi: self.ls_k_hi,
                    l_lo: self.ls_l_lo,
                    l_hi: self.ls_l_hi,
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RachSection {
    pub nu_max: f64,
    pub snr_db: Vec<f64>,
    pub k_active: usize,
    pub dictionary_size: usize,
    pub pfa: f64,
    pub families: Vec<FamilyName>,
    /// Beta of the Gaussian dictionary.
    pub gaussian_beta: i64,
    pub seeds: usize,
    pub k_min: i64,
    pub k_max: i64,
    pub l_max: i64,
    /// Noise-only frames for threshold calibration; 0 keeps the analytic threshold.
    pub calibration_trials: usize,
}

impl Default for RachSection {
    fn default() -> Self {
        Self {
            nu_max: 815.0,
            snr_db: vec![-25.0, -20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            k_active: 5,
            dictionary_size: 16,
            pfa: 1e-3,
            families: vec![FamilyName::ZadoffChu, FamilyName::Gaussian, FamilyName::Wiener],
            gaussian_beta: 3,
            seeds: 3,
            k_min: -1,
            k_max: 4,
            l_max: 2,
            calibration_trials: 0,
        }
    }
}

impl RachSection {
    pub fn region(&self) -> Result<SensingRegion> {
        SensingRegion::with_k_min(self.k_min, self.k_max, self.l_max)
    }

    /// Entry `a` (1-based) of each family has `alpha = a`.
    pub fn family_tag(&self, family: FamilyName, a: i64) -> Result<FamilyTag> {
        Ok(match family {
            FamilyName::ZadoffChu => FamilyTag::ZadoffChu { u: 2 * a },
            FamilyName::Gaussian => FamilyTag::Gaussian { alpha: a, beta: self.gaussian_beta },
            FamilyName::Wiener => FamilyTag::Wiener { alpha: a },
            FamilyName::GeneralQuadratic => {
                return Err(Error::Config("RACH dictionaries use zadoff_chu, gaussian or wiener".into()))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// Negative control: perturbs one cell of the transform under test.
    pub corrupt_dzt: bool,
    pub unbiasedness_trials_small: usize,
    pub unbiasedness_trials_large: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { corrupt_dzt: false, unbiasedness_trials_small: 20_000, unbiasedness_trials_large: 200 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trip_and_overrides() {
        let cfg = ExperimentConfig::from_toml_str(
            "seed = 9\ntrials = 4\n[grid]\nm = 3\nn = 5\n[isac]\npdr_db = [1.0]\nturbo_mode = \"readoff\"\n[rach]\nfamilies = [\"wiener\"]\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.grid.m, 3);
        assert_eq!(cfg.grid.nu_p, 30_000.0);
        assert_eq!(cfg.isac.turbo_mode, TurboModeName::Readoff);
        assert_eq!(cfg.rach.families, vec![FamilyName::Wiener]);
        assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(ExperimentConfig::from_toml_str("sede = 1"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("[grid]\nq = 1"), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.grid.m = 4;
        assert!(matches!(cfg.grid_params(), Err(Error::EvenDimension { .. })));
        cfg.trials = Some(0);
        assert!(matches!(cfg.trials_or(10), Err(Error::EmptyTrialSet)));
        assert!("zc".parse::<FamilyName>().is_ok());
        assert!("chirp".parse::<FamilyName>().is_err());
    }

    #[test]
    fn default_waveform_is_zc14() {
        let cfg = ExperimentConfig::default();
        let fam = cfg.waveform.resolve(&cfg.grid_params().unwrap()).unwrap();
        assert_eq!((fam.resolved.alpha, fam.resolved.beta), (7, 7));
    }
}
