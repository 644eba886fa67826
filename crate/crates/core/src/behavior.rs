//! Behavior catalog and seeded selection.
//!
//! A behavior is a gesture, a facial expression and an utterance played
//! together for a number of ticks. Each of the 29 emotion labels maps to a
//! list of behaviors; some motives override the emotion mapping with their
//! own list (a greeting, attention seeking, idle activities).

use std::collections::BTreeMap;
use std::num::NonZeroU32;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circumplex::Emotion;
use crate::error::ConfigError;
use crate::motivation::MotiveKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorTriple {
    pub gesture_id: String,
    pub facial_expression_id: String,
    pub utterance: String,
    pub duration_ticks: NonZeroU32,
}

impl BehaviorTriple {
    /// Identifier used in traces.
    pub fn id(&self) -> String {
        format!("{}+{}", self.gesture_id, self.facial_expression_id)
    }

    pub fn duration(&self) -> u64 {
        u64::from(self.duration_ticks.get())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BehaviorCatalog {
    by_label: BTreeMap<Emotion, Vec<BehaviorTriple>>,
    overrides: BTreeMap<MotiveKind, Vec<BehaviorTriple>>,
}

const OVERRIDES_KEY: &str = "motive_overrides";

fn parse_list(path: &str, value: Value) -> Result<Vec<BehaviorTriple>, ConfigError> {
    let Value::Array(items) = value else {
        return Err(ConfigError::invalid(path, "expected a list of behaviors"));
    };
    if items.is_empty() {
        return Err(ConfigError::invalid(path, "list must not be empty"));
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let entry_path = format!("{path}[{i}]");
            let triple: BehaviorTriple = serde_json::from_value(item)
                .map_err(|e| ConfigError::invalid(&entry_path, e.to_string()))?;
            for (field, v) in [
                ("gesture_id", &triple.gesture_id),
                ("facial_expression_id", &triple.facial_expression_id),
                ("utterance", &triple.utterance),
            ] {
                if v.trim().is_empty() {
                    return Err(ConfigError::invalid(
                        format!("{entry_path}.{field}"),
                        "must not be empty",
                    ));
                }
            }
            Ok(triple)
        })
        .collect()
}

impl BehaviorCatalog {
    pub fn new(
        by_label: BTreeMap<Emotion, Vec<BehaviorTriple>>,
        overrides: BTreeMap<MotiveKind, Vec<BehaviorTriple>>,
    ) -> Result<Self, ConfigError> {
        for label in Emotion::all() {
            if by_label.get(&label).is_none_or(Vec::is_empty) {
                return Err(ConfigError::invalid(
                    format!("behavior catalog.{label}"),
                    "every emotion label needs at least one behavior",
                ));
            }
        }
        if let Some((motive, _)) = overrides.iter().find(|(_, v)| v.is_empty()) {
            return Err(ConfigError::invalid(
                format!("behavior catalog.{OVERRIDES_KEY}.{motive}"),
                "list must not be empty",
            ));
        }
        Ok(BehaviorCatalog {
            by_label,
            overrides,
        })
    }

    /// Parses the catalog file. Syntax errors carry line and column; content
    /// errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let top: BTreeMap<String, Value> =
            serde_json::from_str(text).map_err(|e| ConfigError::parse("behavior catalog", e))?;
        let mut by_label = BTreeMap::new();
        let mut overrides = BTreeMap::new();
        for (key, value) in top {
            if key == OVERRIDES_KEY {
                let Value::Object(map) = value else {
                    return Err(ConfigError::invalid(
                        OVERRIDES_KEY,
                        "expected an object keyed by motive",
                    ));
                };
                for (motive_name, list) in map {
                    let path = format!("{OVERRIDES_KEY}.{motive_name}");
                    let motive = MotiveKind::from_name(&motive_name)
                        .ok_or_else(|| ConfigError::invalid(&path, "unknown motive"))?;
                    overrides.insert(motive, parse_list(&path, list)?);
                }
            } else {
                let label = Emotion::from_name(&key)
                    .ok_or_else(|| ConfigError::invalid(&key, "unknown emotion label"))?;
                by_label.insert(label, parse_list(&key, value)?);
            }
        }
        BehaviorCatalog::new(by_label, overrides)
    }

    pub fn entries(&self, label: Emotion) -> &[BehaviorTriple] {
        self.by_label
            .get(&label)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn override_for(&self, motive: MotiveKind) -> Option<&[BehaviorTriple]> {
        self.overrides.get(&motive).map(Vec::as_slice)
    }

    /// Candidate list: the motive override if one exists, else the label's list.
    pub fn candidates(&self, label: Emotion, motive: Option<MotiveKind>) -> &[BehaviorTriple] {
        motive
            .and_then(|m| self.override_for(m))
            .unwrap_or_else(|| self.entries(label))
    }
}

/// Owns the seeded random stream used for behavior choice.
#[derive(Clone, Debug)]
pub struct BehaviorSelector {
    rng: ChaCha8Rng,
}

impl BehaviorSelector {
    pub fn new(seed: u64) -> Self {
        BehaviorSelector {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform choice among the candidates for `(label, motive)`.
    pub fn choose<'c>(
        &mut self,
        catalog: &'c BehaviorCatalog,
        label: Emotion,
        motive: Option<MotiveKind>,
    ) -> &'c BehaviorTriple {
        let list = catalog.candidates(label, motive);
        &list[self.rng.random_range(0..list.len())]
    }
}

/// One-shot selection from a fresh stream seeded with `seed`.
pub fn select_behavior(
    label: Emotion,
    motive: Option<MotiveKind>,
    catalog: &BehaviorCatalog,
    seed: u64,
) -> &BehaviorTriple {
    BehaviorSelector::new(seed).choose(catalog, label, motive)
}
