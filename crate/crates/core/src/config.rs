//! Engine configuration and the data files it references.
//!
//! Every file is validated here, at load time. Paths inside the config are
//! resolved relative to the config file; omitted paths fall back to the data
//! files bundled with the crate.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::appraisal::AppraisalParams;
use crate::behavior::BehaviorCatalog;
use crate::circumplex::SectorTable;
use crate::error::ConfigError;
use crate::motivation::{MotiveTable, DEFAULT_IDLE_TICKS};
use crate::percepts::{
    IntensityComposer, IntensityModel, PerceptCatalog, VisualWeights, ZoneCutoffs,
};

pub const BUILTIN_PERCEPT_CATALOG: &str = include_str!("../data/percept_catalog.json");
pub const BUILTIN_BEHAVIOR_CATALOG: &str = include_str!("../data/behavior_catalog.json");
pub const BUILTIN_MOTIVES: &str = include_str!("../data/motives.json");
pub const BUILTIN_SECTORS: &str = include_str!("../data/emotion_sectors.v1.json");

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensitySettings {
    #[serde(default)]
    pub composer: IntensityComposer,
    #[serde(default)]
    pub weights: VisualWeights,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataFiles {
    pub percept_catalog: Option<PathBuf>,
    pub behavior_catalog: Option<PathBuf>,
    pub motive_params: Option<PathBuf>,
    pub emotion_sectors: Option<PathBuf>,
}

fn default_tick_hz() -> f64 {
    10.0
}
fn default_neutral_radius() -> f64 {
    0.15
}
fn default_seed() -> u64 {
    42
}
fn default_presence_hold() -> u64 {
    20
}
fn default_idle_ticks() -> u64 {
    DEFAULT_IDLE_TICKS
}
fn default_distance() -> f64 {
    2.0
}

/// The engine config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default = "default_tick_hz")]
    pub tick_hz: f64,
    #[serde(default)]
    pub zones: ZoneCutoffs,
    #[serde(default)]
    pub intensity: IntensitySettings,
    #[serde(default)]
    pub appraisal: AppraisalParams,
    #[serde(default = "default_neutral_radius")]
    pub neutral_radius: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Ticks a person counts as present after their last percept.
    #[serde(default = "default_presence_hold")]
    pub presence_hold_ticks: u64,
    /// Empty ticks before SelfEntertainment triggers.
    #[serde(default = "default_idle_ticks")]
    pub self_entertainment_after_ticks: u64,
    /// Partner distance assumed before any percept reports one.
    #[serde(default = "default_distance")]
    pub default_distance_m: f64,
    #[serde(default)]
    pub files: DataFiles,
    /// Accept a sector table that differs from the reference one.
    #[serde(default)]
    pub allow_modified_sectors: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tick_hz > 0.0 && self.tick_hz.is_finite()) {
            return Err(ConfigError::invalid(
                "tick_hz",
                format!("must be positive, got {}", self.tick_hz),
            ));
        }
        self.zones.validate()?;
        self.appraisal.validate()?;
        if !(0.0..=std::f64::consts::SQRT_2).contains(&self.neutral_radius) {
            return Err(ConfigError::invalid(
                "neutral_radius",
                format!("must lie in [0, sqrt 2], got {}", self.neutral_radius),
            ));
        }
        if self.presence_hold_ticks == 0 {
            return Err(ConfigError::invalid(
                "presence_hold_ticks",
                "must be at least 1",
            ));
        }
        if self.self_entertainment_after_ticks == 0 {
            return Err(ConfigError::invalid(
                "self_entertainment_after_ticks",
                "must be at least 1",
            ));
        }
        if !(self.default_distance_m >= 0.0 && self.default_distance_m.is_finite()) {
            return Err(ConfigError::invalid(
                "default_distance_m",
                "must be a nonnegative distance",
            ));
        }
        Ok(())
    }

    pub fn intensity_model(&self) -> IntensityModel {
        IntensityModel {
            cutoffs: self.zones,
            composer: self.intensity.composer,
            weights: self.intensity.weights,
        }
    }
}

/// A validated config together with every data file it references.
#[derive(Clone, Debug)]
pub struct Setup {
    pub config: EngineConfig,
    pub percepts: PerceptCatalog,
    pub behaviors: BehaviorCatalog,
    pub motives: MotiveTable,
    pub sectors: SectorTable,
    /// Digest of the sector table, shared with observers at handshake.
    pub sectors_digest: String,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn resolve(
    base: &Path,
    file: &Option<PathBuf>,
    builtin: &'static str,
) -> Result<String, ConfigError> {
    match file {
        Some(p) if p.is_absolute() => read(p),
        Some(p) => read(&base.join(p)),
        None => Ok(builtin.to_string()),
    }
}

impl Setup {
    pub fn builtin() -> Setup {
        Setup::from_config(EngineConfig::default(), Path::new(".")).expect("bundled data is valid")
    }

    pub fn load(path: &Path) -> Result<Setup, ConfigError> {
        Setup::load_with(path, false)
    }

    /// Like [`Setup::load`]; `allow_modified_sectors` forces the sector
    /// override on regardless of the file's setting.
    pub fn load_with(path: &Path, allow_modified_sectors: bool) -> Result<Setup, ConfigError> {
        let text = read(path)?;
        let mut config: EngineConfig = serde_json::from_str(&text)
            .map_err(|e| ConfigError::parse(format!("config {}", path.display()), e))?;
        config.allow_modified_sectors |= allow_modified_sectors;
        let base = path.parent().unwrap_or(Path::new("."));
        Setup::from_config(config, base)
    }

    pub fn from_config(config: EngineConfig, base_dir: &Path) -> Result<Setup, ConfigError> {
        config.validate()?;
        let files = &config.files;
        let percepts = PerceptCatalog::from_json(&resolve(
            base_dir,
            &files.percept_catalog,
            BUILTIN_PERCEPT_CATALOG,
        )?)?;
        let behaviors = BehaviorCatalog::from_json(&resolve(
            base_dir,
            &files.behavior_catalog,
            BUILTIN_BEHAVIOR_CATALOG,
        )?)?;
        let motives =
            MotiveTable::from_json(&resolve(base_dir, &files.motive_params, BUILTIN_MOTIVES)?)?;
        let sectors = SectorTable::from_json(
            &resolve(base_dir, &files.emotion_sectors, BUILTIN_SECTORS)?,
            config.allow_modified_sectors,
        )?;
        let pairs: Vec<_> = sectors
            .sectors()
            .iter()
            .map(|s| (s.word, s.center_deg))
            .collect();
        let sectors_digest = crate::circumplex::table_digest(&pairs);
        Ok(Setup {
            config,
            percepts,
            behaviors,
            motives,
            sectors,
            sectors_digest,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Setup {
        self.config.seed = seed;
        self
    }
}
