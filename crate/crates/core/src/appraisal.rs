//! Arousal and valence.
//!
//! Arousal follows the tick's overall stimulus intensity: it jumps to
//! `weight * intensity` whenever the intensity changes and decays by a fixed
//! step while the stimulus stays the same. Valence chases the fused motive
//! satisfaction with a per-tick rate cap and never overshoots it.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Two intensities closer than this count as unchanged.
pub const INTENSITY_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppraisalParams {
    pub arousal_step: f64,
    pub arousal_weight: f64,
    /// Maximum change of valence per tick.
    pub valence_weight: f64,
}

impl Default for AppraisalParams {
    fn default() -> Self {
        AppraisalParams {
            arousal_step: 0.25,
            arousal_weight: 1.0,
            valence_weight: 0.05,
        }
    }
}

impl AppraisalParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("arousal_step", self.arousal_step),
            ("arousal_weight", self.arousal_weight),
            ("valence_weight", self.valence_weight),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::invalid(
                    format!("appraisal.{name}"),
                    format!("must be strictly positive, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// The (valence, arousal) point and the intensity it was last appraised from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct AppraisalState {
    pub arousal: f64,
    pub valence: f64,
    pub last_overall_intensity: f64,
    pub tick: u64,
}

pub fn update_arousal(
    prev: &AppraisalState,
    overall_intensity: f64,
    params: &AppraisalParams,
) -> f64 {
    let a = if (overall_intensity - prev.last_overall_intensity).abs() <= INTENSITY_EPSILON {
        prev.arousal - params.arousal_step
    } else {
        params.arousal_weight * overall_intensity
    };
    a.clamp(-1.0, 1.0)
}

pub fn update_valence(prev: f64, satisfaction: f64, params: &AppraisalParams) -> f64 {
    let step = (satisfaction - prev).abs().min(params.valence_weight);
    let v = if satisfaction > prev {
        prev + step
    } else {
        prev - step
    };
    v.clamp(-1.0, 1.0)
}

impl AppraisalState {
    /// Arousal first, then valence, as one tick transition.
    pub fn advance(
        &self,
        overall_intensity: f64,
        satisfaction: f64,
        params: &AppraisalParams,
    ) -> AppraisalState {
        AppraisalState {
            arousal: update_arousal(self, overall_intensity, params),
            valence: update_valence(self.valence, satisfaction, params),
            last_overall_intensity: overall_intensity,
            tick: self.tick + 1,
        }
    }
}
