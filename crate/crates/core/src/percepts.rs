//! Symbolic percept vocabulary, proxemic zones and per-percept stimulus intensity.
//!
//! Percepts arrive pre-symbolized (no camera or skeleton processing happens
//! here). Each percept carries an empirical intensity tag in `[0, 1]`, a
//! normalized movement speed and the interlocutor's distance. The distance is
//! classified into one of Hall's four proxemic zones, and the zone decides how
//! the stimulus intensity and the zone intensity are blended into the
//! *overall intensity* that drives arousal.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// The kinds of stimuli the engine understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PerceptKind {
    FacialExpression,
    HandGesture,
    HeadGesture,
    BodyPosture,
    PresenceDetected,
    FaceDetected,
    SkeletonAvailable,
    GreetingBack,
    LookingForward,
    LookingAway,
    Command,
    NoStimulus,
}

impl PerceptKind {
    pub const ALL: [PerceptKind; 12] = [
        PerceptKind::FacialExpression,
        PerceptKind::HandGesture,
        PerceptKind::HeadGesture,
        PerceptKind::BodyPosture,
        PerceptKind::PresenceDetected,
        PerceptKind::FaceDetected,
        PerceptKind::SkeletonAvailable,
        PerceptKind::GreetingBack,
        PerceptKind::LookingForward,
        PerceptKind::LookingAway,
        PerceptKind::Command,
        PerceptKind::NoStimulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PerceptKind::FacialExpression => "FacialExpression",
            PerceptKind::HandGesture => "HandGesture",
            PerceptKind::HeadGesture => "HeadGesture",
            PerceptKind::BodyPosture => "BodyPosture",
            PerceptKind::PresenceDetected => "PresenceDetected",
            PerceptKind::FaceDetected => "FaceDetected",
            PerceptKind::SkeletonAvailable => "SkeletonAvailable",
            PerceptKind::GreetingBack => "GreetingBack",
            PerceptKind::LookingForward => "LookingForward",
            PerceptKind::LookingAway => "LookingAway",
            PerceptKind::Command => "Command",
            PerceptKind::NoStimulus => "NoStimulus",
        }
    }

    pub fn from_name(name: &str) -> Option<PerceptKind> {
        PerceptKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// True for percepts that imply a person is in front of the robot.
    ///
    /// Commands may come from a remote operator and do not count.
    pub fn is_human_related(self) -> bool {
        !matches!(self, PerceptKind::Command | PerceptKind::NoStimulus)
    }
}

impl fmt::Display for PerceptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Opaque identifier of an interaction partner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartnerId(pub String);

impl PartnerId {
    pub fn new(id: impl Into<String>) -> Self {
        PartnerId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for PartnerId {
    fn default() -> Self {
        PartnerId::new("partner")
    }
}

impl fmt::Display for PartnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A percept as delivered by a scenario file or a live injection.
///
/// Intensity and speed are already resolved against the percept catalog.
/// Distance and partner may be omitted; the engine then carries over the
/// last known values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptInput {
    pub kind: PerceptKind,
    pub base_intensity: f64,
    pub movement_speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner_id: Option<PartnerId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

impl PerceptInput {
    pub fn new(kind: PerceptKind, base_intensity: f64, movement_speed: f64) -> Self {
        PerceptInput {
            kind,
            base_intensity,
            movement_speed,
            distance_m: None,
            partner_id: None,
            command: None,
        }
    }

    pub fn at(mut self, distance_m: f64) -> Self {
        self.distance_m = Some(distance_m);
        self
    }

    pub fn from_partner(mut self, partner: impl Into<String>) -> Self {
        self.partner_id = Some(PartnerId::new(partner));
        self
    }

    pub fn with_command(mut self, name: impl Into<String>) -> Self {
        self.command = Some(name.into());
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.base_intensity) {
            return Err(format!(
                "base_intensity {} outside [0, 1]",
                self.base_intensity
            ));
        }
        if !(0.0..=1.0).contains(&self.movement_speed) {
            return Err(format!(
                "movement_speed {} outside [0, 1]",
                self.movement_speed
            ));
        }
        if let Some(d) = self.distance_m {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(format!(
                    "distance_m {d} must be a finite nonnegative number"
                ));
            }
        }
        Ok(())
    }
}

/// One fully resolved, timestamped stimulus.
#[derive(Clone, Debug, PartialEq)]
pub struct Percept {
    pub kind: PerceptKind,
    pub base_intensity: f64,
    pub movement_speed: f64,
    pub distance_m: f64,
    pub partner_id: PartnerId,
    pub tick: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Zone {
    Intimate,
    Personal,
    Social,
    Public,
}

impl Zone {
    /// Closeness rank; a smaller rank is more intimate.
    pub fn rank(self) -> u8 {
        match self {
            Zone::Intimate => 0,
            Zone::Personal => 1,
            Zone::Social => 2,
            Zone::Public => 3,
        }
    }

    /// Blend weights for this zone.
    pub fn profile(self) -> ProxemicZone {
        let (stimulus_weight, zone_intensity_weight, zone_intensity) = match self {
            Zone::Intimate => (0.0, 1.0, 1.0),
            Zone::Personal => (0.5, 0.5, 1.0),
            Zone::Social => (1.0, 0.0, 1.0),
            Zone::Public => (0.25, 0.0, 0.0),
        };
        ProxemicZone {
            zone: self,
            stimulus_weight,
            zone_intensity_weight,
            zone_intensity,
        }
    }
}

/// A zone together with its intensity blend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxemicZone {
    pub zone: Zone,
    pub stimulus_weight: f64,
    pub zone_intensity_weight: f64,
    pub zone_intensity: f64,
}

/// Upper bounds (exclusive, meters) of the three inner zones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneCutoffs {
    pub intimate_m: f64,
    pub personal_m: f64,
    pub social_m: f64,
}

impl Default for ZoneCutoffs {
    fn default() -> Self {
        ZoneCutoffs {
            intimate_m: 0.45,
            personal_m: 1.2,
            social_m: 3.6,
        }
    }
}

impl ZoneCutoffs {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ok = self.intimate_m > 0.0
            && self.intimate_m < self.personal_m
            && self.personal_m < self.social_m
            && self.social_m.is_finite();
        if ok {
            Ok(())
        } else {
            Err(ConfigError::invalid(
                "zones",
                format!(
                    "cutoffs must satisfy 0 < intimate < personal < social < inf, got {} / {} / {}",
                    self.intimate_m, self.personal_m, self.social_m
                ),
            ))
        }
    }

    /// Half-open classification: `[0, intimate)`, `[intimate, personal)`, ...
    pub fn classify(&self, distance_m: f64) -> Zone {
        if distance_m < self.intimate_m {
            Zone::Intimate
        } else if distance_m < self.personal_m {
            Zone::Personal
        } else if distance_m < self.social_m {
            Zone::Social
        } else {
            Zone::Public
        }
    }
}

pub fn classify_zone(distance_m: f64, cutoffs: &ZoneCutoffs) -> ProxemicZone {
    cutoffs.classify(distance_m).profile()
}

/// Zone-blended overall intensity of a single percept.
pub fn overall_intensity(base_intensity: f64, zone: &ProxemicZone) -> f64 {
    let v =
        zone.stimulus_weight * base_intensity + zone.zone_intensity_weight * zone.zone_intensity;
    v.clamp(0.0, 1.0)
}

/// Numeric proximity score for the weighted-sum composer.
pub fn proximity_score(zone: Zone) -> f64 {
    match zone {
        Zone::Intimate => 1.0,
        Zone::Personal => 0.66,
        Zone::Social => 0.33,
        Zone::Public => 0.0,
    }
}

/// Weights for the weighted-sum visual arousal input. Construction checks
/// that they are nonnegative and sum to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct VisualWeights {
    features: f64,
    proximity: f64,
    speed: f64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    w1: f64,
    w2: f64,
    w3: f64,
}

impl TryFrom<RawWeights> for VisualWeights {
    type Error = ConfigError;

    fn try_from(raw: RawWeights) -> Result<Self, Self::Error> {
        VisualWeights::new(raw.w1, raw.w2, raw.w3)
    }
}

impl From<VisualWeights> for RawWeights {
    fn from(w: VisualWeights) -> Self {
        RawWeights {
            w1: w.features,
            w2: w.proximity,
            w3: w.speed,
        }
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

impl VisualWeights {
    pub fn new(features: f64, proximity: f64, speed: f64) -> Result<Self, ConfigError> {
        let all = [features, proximity, speed];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ConfigError::invalid(
                "intensity.weights",
                format!("weights must be nonnegative, got {all:?}"),
            ));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(ConfigError::invalid(
                "intensity.weights",
                format!("weights must sum to 1, got {sum}"),
            ));
        }
        Ok(VisualWeights {
            features,
            proximity,
            speed,
        })
    }

    pub fn equal() -> Self {
        let third = 1.0 / 3.0;
        VisualWeights {
            features: third,
            proximity: third,
            speed: third,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.features, self.proximity, self.speed]
    }
}

impl Default for VisualWeights {
    fn default() -> Self {
        VisualWeights::equal()
    }
}

/// Weighted sum of recognised-feature intensity, proximity and movement speed.
pub fn visual_arousal_input(
    features: f64,
    proximity: f64,
    speed: f64,
    weights: &VisualWeights,
) -> f64 {
    let v = weights.features * features + weights.proximity * proximity + weights.speed * speed;
    v.clamp(0.0, 1.0)
}

/// Which rule turns a percept into the overall intensity fed to arousal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntensityComposer {
    #[default]
    ZoneBlend,
    WeightedSum,
}

/// Combines per-percept intensities into one value per tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntensityModel {
    pub cutoffs: ZoneCutoffs,
    pub composer: IntensityComposer,
    pub weights: VisualWeights,
}

impl IntensityModel {
    pub fn percept_intensity(&self, percept: &Percept) -> f64 {
        let zone = classify_zone(percept.distance_m, &self.cutoffs);
        match self.composer {
            IntensityComposer::ZoneBlend => overall_intensity(percept.base_intensity, &zone),
            IntensityComposer::WeightedSum => visual_arousal_input(
                percept.base_intensity,
                proximity_score(zone.zone),
                percept.movement_speed,
                &self.weights,
            ),
        }
    }

    /// Strongest stimulus of the tick; zero when nothing was perceived.
    pub fn tick_intensity(&self, percepts: &[Percept]) -> f64 {
        percepts
            .iter()
            .map(|p| self.percept_intensity(p))
            .fold(0.0, f64::max)
    }
}

/// One entry of the percept catalog file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub kind: PerceptKind,
    pub name: String,
    pub base_intensity: f64,
    pub default_movement_speed: f64,
}

/// Named percept templates with their empirical intensity tags.
#[derive(Clone, Debug, PartialEq)]
pub struct PerceptCatalog {
    entries: Vec<CatalogEntry>,
}

impl PerceptCatalog {
    pub fn new(entries: Vec<CatalogEntry>) -> Result<Self, ConfigError> {
        let mut names = HashSet::new();
        for (i, e) in entries.iter().enumerate() {
            let field = format!("percept_catalog[{i}] ({})", e.name);
            if e.name.is_empty() {
                return Err(ConfigError::invalid(field, "name must not be empty"));
            }
            if !names.insert(e.name.as_str()) {
                return Err(ConfigError::invalid(field, "duplicate name"));
            }
            if !(0.0..=1.0).contains(&e.base_intensity) {
                return Err(ConfigError::invalid(field, "base_intensity outside [0, 1]"));
            }
            if !(0.0..=1.0).contains(&e.default_movement_speed) {
                return Err(ConfigError::invalid(
                    field,
                    "default_movement_speed outside [0, 1]",
                ));
            }
        }
        for kind in PerceptKind::ALL {
            if !entries.iter().any(|e| e.kind == kind) {
                return Err(ConfigError::invalid(
                    "percept_catalog",
                    format!("no entry for percept kind {kind}"),
                ));
            }
        }
        Ok(PerceptCatalog { entries })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let entries: Vec<CatalogEntry> =
            serde_json::from_str(text).map_err(|e| ConfigError::parse("percept catalog", e))?;
        PerceptCatalog::new(entries)
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Looks up a catalog entry name first, then falls back to the default
    /// (first listed) entry of a kind name.
    pub fn lookup(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name).or_else(|| {
            let kind = PerceptKind::from_name(name)?;
            self.default_for(kind)
        })
    }

    pub fn default_for(&self, kind: PerceptKind) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.kind == kind)
    }

    pub fn input(&self, name: &str) -> Option<PerceptInput> {
        self.lookup(name)
            .map(|e| PerceptInput::new(e.kind, e.base_intensity, e.default_movement_speed))
    }
}
