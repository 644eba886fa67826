//! Deterministic emotion appraisal for human-robot interaction.
//!
//! Symbolic percepts drive a hierarchy of motives; the winning motive's
//! satisfaction sets valence, stimulus intensity sets arousal, and the
//! resulting point on the valence/arousal plane is mapped to one of 28
//! circumplex emotion words (or neutral). A behavior (gesture, facial
//! expression, utterance) is then selected for the emotion and motive.
//!
//! [`engine::Engine`] runs the whole pipeline one tick at a time;
//! [`scenario`] replays scripted percept streams into CSV traces.
//!
//! ```
//! use std::sync::Arc;
//! use hri_affect::{Engine, PerceptInput, PerceptKind, Setup};
//!
//! let mut engine = Engine::new(Arc::new(Setup::builtin()));
//! let record = engine.step(&[PerceptInput::new(PerceptKind::PresenceDetected, 0.2, 0.1).at(2.0)]);
//! assert_eq!(record.active_motive_name(), "Greeting");
//! ```

pub mod appraisal;
pub mod behavior;
pub mod circumplex;
pub mod config;
pub mod engine;
pub mod error;
pub mod motivation;
pub mod percepts;
pub mod scenario;

pub use appraisal::{AppraisalParams, AppraisalState};
pub use behavior::{BehaviorCatalog, BehaviorSelector, BehaviorTriple};
pub use circumplex::{Emotion, EmotionReading, EmotionWord, SectorTable};
pub use config::{EngineConfig, Setup};
pub use engine::{Engine, TraceRecord};
pub use error::{ConfigError, RunError, ScenarioError};
pub use motivation::{FusionOutput, MotiveBank, MotiveKind, MotiveParams, MotiveTable, Situation};
pub use percepts::{PartnerId, Percept, PerceptCatalog, PerceptInput, PerceptKind, Zone};
pub use scenario::{Scenario, ScenarioEvent};
