//! Hierarchical motive system.
//!
//! Six event-based motives are evaluated every tick from a [`Situation`]
//! (the facts the engine derives from the tick's percepts). Each motive keeps
//! a satisfaction value `S` in `[-1, 1]` and exposes a binary activation that
//! is open only while it is triggered and `s_min < S < s_max`. Fusion then
//! applies inhibition down the priority chain: the highest-priority activated
//! motive wins, every motive below it is inhibited, and only the winner's
//! satisfaction is passed on to valence.
//!
//! A motive whose gate closes while still triggered is latched inactive until
//! its trigger drops and re-occurs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::percepts::{PartnerId, Zone};

/// Satisfaction values this close to a threshold are snapped onto it, so
/// accumulated step sizes cross the threshold on the arithmetically exact tick.
const SNAP_TOLERANCE: f64 = 1e-9;

/// Satisfaction reported once a motive's goal is reached outright.
pub const SATISFIED: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MotiveKind {
    ObeyHumans,
    SelfPreservation,
    CaptureSkeleton,
    Greeting,
    Interact,
    SelfEntertainment,
}

impl MotiveKind {
    pub const ALL: [MotiveKind; 6] = [
        MotiveKind::ObeyHumans,
        MotiveKind::SelfPreservation,
        MotiveKind::CaptureSkeleton,
        MotiveKind::Greeting,
        MotiveKind::Interact,
        MotiveKind::SelfEntertainment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MotiveKind::ObeyHumans => "ObeyHumans",
            MotiveKind::SelfPreservation => "SelfPreservation",
            MotiveKind::CaptureSkeleton => "CaptureSkeleton",
            MotiveKind::Greeting => "Greeting",
            MotiveKind::Interact => "Interact",
            MotiveKind::SelfEntertainment => "SelfEntertainment",
        }
    }

    pub fn from_name(name: &str) -> Option<MotiveKind> {
        MotiveKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for MotiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Default number of empty ticks before SelfEntertainment triggers.
pub const DEFAULT_IDLE_TICKS: u64 = 50;

/// Name written to traces when no motive is active.
pub const NO_ACTIVE_MOTIVE: &str = "NoActiveMotive";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MotiveType {
    #[default]
    EventBased,
}

/// Per-motive thresholds and step sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotiveParams {
    pub name: MotiveKind,
    #[serde(default)]
    pub motive_type: MotiveType,
    pub s_max: Option<f64>,
    pub s_min: Option<f64>,
    pub pos_step: f64,
    pub neg_step: f64,
    pub priority: u32,
    /// Satisfaction a motive starts from when its trigger fires.
    pub unsatisfied: f64,
}

impl MotiveParams {
    /// Default thresholds and steps, priority, and baseline for `kind`.
    pub fn defaults(kind: MotiveKind) -> Self {
        let (s_min, unsatisfied) = match kind {
            MotiveKind::SelfPreservation => (None, -0.8),
            MotiveKind::CaptureSkeleton => (None, -0.5),
            _ => (Some(-0.8), -0.5),
        };
        MotiveParams {
            name: kind,
            motive_type: MotiveType::EventBased,
            s_max: Some(0.9),
            s_min,
            pos_step: 0.003,
            neg_step: -0.02,
            priority: MotiveKind::ALL.iter().position(|k| *k == kind).unwrap() as u32,
            unsatisfied,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |detail: String| {
            Err(ConfigError::invalid(
                format!("motive {}", self.name),
                detail,
            ))
        };
        for (label, v) in [("s_max", self.s_max), ("s_min", self.s_min)] {
            if let Some(v) = v {
                if !(-1.0..=1.0).contains(&v) {
                    return fail(format!("{label} {v} outside [-1, 1]"));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.s_min, self.s_max) {
            if lo >= hi {
                return fail(format!("s_min {lo} must be below s_max {hi}"));
            }
        }
        if !(self.pos_step > 0.0 && self.pos_step.is_finite()) {
            return fail(format!("pos_step {} must be positive", self.pos_step));
        }
        if !(self.neg_step < 0.0 && self.neg_step.is_finite()) {
            return fail(format!("neg_step {} must be negative", self.neg_step));
        }
        if !self.within_gate(self.unsatisfied) {
            return fail(format!(
                "unsatisfied baseline {} lies outside the activity gate",
                self.unsatisfied
            ));
        }
        Ok(())
    }

    fn within_gate(&self, s: f64) -> bool {
        self.s_min.is_none_or(|lo| lo < s) && self.s_max.is_none_or(|hi| s < hi)
    }
}

/// The activity gate: active iff triggered and strictly between the
/// thresholds. A missing threshold is unbounded.
pub fn activity(satisfaction: f64, params: &MotiveParams, triggered: bool) -> bool {
    triggered && params.within_gate(satisfaction)
}

/// The full motive parameter table, one entry per motive.
#[derive(Clone, Debug, PartialEq)]
pub struct MotiveTable {
    params: Vec<MotiveParams>,
}

impl MotiveTable {
    pub fn new(mut params: Vec<MotiveParams>) -> Result<Self, ConfigError> {
        for p in &params {
            p.validate()?;
        }
        for kind in MotiveKind::ALL {
            match params.iter().filter(|p| p.name == kind).count() {
                1 => {}
                0 => {
                    return Err(ConfigError::invalid(
                        format!("motive {kind}"),
                        "missing from parameter table",
                    ))
                }
                _ => {
                    return Err(ConfigError::invalid(
                        format!("motive {kind}"),
                        "listed more than once",
                    ))
                }
            }
        }
        params.sort_by_key(|p| p.priority);
        if let Some(w) = params.windows(2).find(|w| w[0].priority == w[1].priority) {
            return Err(ConfigError::invalid(
                format!("motive {}", w[1].name),
                format!("priority {} already used by {}", w[1].priority, w[0].name),
            ));
        }
        Ok(MotiveTable { params })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let params: Vec<MotiveParams> = serde_json::from_str(text)
            .map_err(|e| ConfigError::parse("motive parameter file", e))?;
        MotiveTable::new(params)
    }

    /// Sorted by priority, highest priority first.
    pub fn params(&self) -> &[MotiveParams] {
        &self.params
    }

    pub fn get(&self, kind: MotiveKind) -> &MotiveParams {
        self.params
            .iter()
            .find(|p| p.name == kind)
            .expect("table covers every motive")
    }
}

impl Default for MotiveTable {
    fn default() -> Self {
        MotiveTable::new(
            MotiveKind::ALL
                .into_iter()
                .map(MotiveParams::defaults)
                .collect(),
        )
        .expect("default table is valid")
    }
}

/// What the engine knows about the world on one tick.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Situation {
    pub tick: u64,
    /// A human-related percept arrived recently enough.
    pub human_present: bool,
    /// A human-related percept arrived on this very tick.
    pub human_percept_now: bool,
    pub partner: Option<PartnerId>,
    pub partner_zone: Option<Zone>,
    pub face_detected: bool,
    pub skeleton_available: bool,
    pub greeting_back: bool,
    pub looking_forward: bool,
    pub looking_away: bool,
    pub command_pending: bool,
    pub command_executed: bool,
    /// Consecutive ticks (including this one) without a human-related percept.
    pub idle_ticks: u64,
}

/// Observable signals of one motive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MotiveState {
    pub satisfaction: f64,
    /// Gate output before inhibition.
    pub activation: bool,
    /// Output after inhibition; true only for the fusion winner.
    pub activity: bool,
    pub target_rating: f64,
    pub inhibited: bool,
    pub triggered: bool,
    pub latched: bool,
    /// Greeting only: partners for which the motive has fired.
    pub first_time_flags: BTreeMap<PartnerId, bool>,
}

impl Default for MotiveState {
    fn default() -> Self {
        MotiveState {
            satisfaction: 0.0,
            activation: false,
            activity: false,
            target_rating: 0.0,
            inhibited: false,
            triggered: false,
            latched: false,
            first_time_flags: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Motive {
    params: MotiveParams,
    state: MotiveState,
    /// Greeting: partner currently awaiting a greeting back.
    awaiting: Option<PartnerId>,
    /// SelfEntertainment: empty ticks before the motive triggers.
    idle_threshold: u64,
}

impl Motive {
    pub fn new(params: MotiveParams) -> Self {
        Motive {
            params,
            state: MotiveState::default(),
            awaiting: None,
            idle_threshold: DEFAULT_IDLE_TICKS,
        }
    }

    pub fn with_idle_threshold(mut self, ticks: u64) -> Self {
        self.idle_threshold = ticks;
        self
    }

    /// A motive already inside a triggered episode with the given satisfaction.
    pub fn engaged(params: MotiveParams, satisfaction: f64) -> Self {
        let mut m = Motive::new(params);
        m.state.satisfaction = satisfaction;
        m.state.triggered = true;
        m
    }

    pub fn kind(&self) -> MotiveKind {
        self.params.name
    }

    pub fn params(&self) -> &MotiveParams {
        &self.params
    }

    pub fn state(&self) -> &MotiveState {
        &self.state
    }

    /// Advances satisfaction and activation for one tick. Inhibition is left
    /// to [`fuse`].
    pub fn update(&mut self, sit: &Situation) {
        let was_triggered = self.state.triggered;
        let triggered = match self.kind() {
            MotiveKind::ObeyHumans => self.step_obey_humans(sit, was_triggered),
            MotiveKind::SelfPreservation => self.step_self_preservation(sit, was_triggered),
            MotiveKind::CaptureSkeleton => self.step_capture_skeleton(sit, was_triggered),
            MotiveKind::Greeting => self.step_greeting(sit, was_triggered),
            MotiveKind::Interact => self.step_interact(sit, was_triggered),
            MotiveKind::SelfEntertainment => self.step_self_entertainment(sit, was_triggered),
        };
        self.finish(triggered);
    }

    fn finish(&mut self, triggered: bool) {
        let s = self.snap(self.state.satisfaction);
        self.state.satisfaction = s;
        if !triggered {
            self.state.latched = false;
        }
        let effective = triggered && !self.state.latched;
        let open = activity(s, &self.params, effective);
        if effective && !open {
            self.state.latched = true;
        }
        self.state.triggered = triggered;
        self.state.activation = open;
        let ceiling = self.params.s_max.unwrap_or(1.0);
        self.state.target_rating = ((ceiling - s).abs() / 2.0).clamp(0.0, 1.0);
    }

    fn snap(&self, s: f64) -> f64 {
        let mut s = s.clamp(-1.0, 1.0);
        for t in [self.params.s_min, self.params.s_max].into_iter().flatten() {
            if (s - t).abs() < SNAP_TOLERANCE {
                s = t;
            }
        }
        s
    }

    fn add(&mut self, delta: f64) {
        self.state.satisfaction = (self.state.satisfaction + delta).clamp(-1.0, 1.0);
    }

    fn step_obey_humans(&mut self, sit: &Situation, was: bool) -> bool {
        if sit.command_executed {
            self.state.satisfaction = SATISFIED;
            return false;
        }
        let triggered = sit.command_pending;
        if triggered && !was {
            self.state.satisfaction = self.params.unsatisfied;
        }
        triggered
    }

    fn step_self_preservation(&mut self, sit: &Situation, was: bool) -> bool {
        let triggered = sit.human_present && sit.partner_zone == Some(Zone::Intimate);
        if triggered {
            if was {
                self.add(self.params.neg_step);
            } else {
                self.state.satisfaction = self.params.unsatisfied;
            }
        } else if was {
            self.state.satisfaction = SATISFIED;
        }
        triggered
    }

    fn step_capture_skeleton(&mut self, sit: &Situation, was: bool) -> bool {
        if sit.skeleton_available {
            self.state.satisfaction = SATISFIED;
            return false;
        }
        let triggered = sit.face_detected;
        if triggered {
            if was {
                self.add(self.params.neg_step);
            } else {
                self.state.satisfaction = self.params.unsatisfied;
            }
        }
        triggered
    }

    fn step_greeting(&mut self, sit: &Situation, _was: bool) -> bool {
        let partner = match (&sit.partner, sit.human_present) {
            (Some(p), true) => p,
            _ => {
                self.awaiting = None;
                return false;
            }
        };
        if self.awaiting.as_ref() != Some(partner) {
            self.awaiting = None;
        }
        if !self.state.first_time_flags.contains_key(partner) {
            self.state.first_time_flags.insert(partner.clone(), true);
            self.awaiting = Some(partner.clone());
            self.state.satisfaction = self.params.unsatisfied;
        }
        if self.awaiting.is_some() && sit.greeting_back {
            self.awaiting = None;
            self.state.satisfaction = SATISFIED;
        }
        self.awaiting.is_some()
    }

    fn step_interact(&mut self, sit: &Situation, was: bool) -> bool {
        let triggered = sit.human_present;
        if triggered && !was {
            self.state.satisfaction = self.params.unsatisfied;
            self.state.latched = false;
        }
        if triggered && !self.state.latched {
            if sit.looking_forward {
                self.add(self.params.pos_step);
            }
            if sit.looking_away {
                self.add(self.params.neg_step);
            }
        }
        triggered
    }

    fn step_self_entertainment(&mut self, sit: &Situation, _was: bool) -> bool {
        if sit.human_percept_now {
            self.state.satisfaction = SATISFIED;
            return false;
        }
        let triggered = sit.idle_ticks >= self.idle_threshold;
        if triggered && !self.state.triggered {
            self.state.satisfaction = self.params.unsatisfied;
        }
        triggered
    }
}

/// Result of winner-takes-all fusion for one tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionOutput {
    /// `None` is the NoActiveMotive state.
    pub winner: Option<MotiveKind>,
    pub satisfaction: f64,
}

impl FusionOutput {
    pub fn motive_name(&self) -> &'static str {
        self.winner.map_or(NO_ACTIVE_MOTIVE, MotiveKind::name)
    }
}

/// Applies inhibition over `motives` (highest priority first) and picks the
/// winner. With no activated motive, `held` is passed through unchanged.
pub fn fuse(motives: &mut [Motive], held: f64) -> FusionOutput {
    let mut winner: Option<usize> = None;
    for (i, m) in motives.iter_mut().enumerate() {
        m.state.inhibited = winner.is_some();
        m.state.activity = m.state.activation && !m.state.inhibited;
        if m.state.activity {
            winner = Some(i);
        }
    }
    match winner {
        Some(i) => FusionOutput {
            winner: Some(motives[i].kind()),
            satisfaction: motives[i].state.satisfaction,
        },
        None => FusionOutput {
            winner: None,
            satisfaction: held,
        },
    }
}

/// Compact per-motive view broadcast to observers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotiveSnapshot {
    pub name: MotiveKind,
    #[serde(rename = "S")]
    pub satisfaction: f64,
    pub a: u8,
    pub inhibited: bool,
}

/// All motives in priority order plus the fused output carried across ticks.
#[derive(Clone, Debug, PartialEq)]
pub struct MotiveBank {
    motives: Vec<Motive>,
    last: FusionOutput,
}

impl MotiveBank {
    pub fn new(table: &MotiveTable, idle_threshold: u64) -> Self {
        let motives = table
            .params()
            .iter()
            .cloned()
            .map(|p| Motive::new(p).with_idle_threshold(idle_threshold))
            .collect();
        MotiveBank {
            motives,
            last: FusionOutput {
                winner: None,
                satisfaction: 0.0,
            },
        }
    }

    pub fn update(&mut self, sit: &Situation) -> FusionOutput {
        for m in &mut self.motives {
            m.update(sit);
        }
        self.last = fuse(&mut self.motives, self.last.satisfaction);
        self.last
    }

    pub fn last(&self) -> FusionOutput {
        self.last
    }

    pub fn motives(&self) -> &[Motive] {
        &self.motives
    }

    pub fn get(&self, kind: MotiveKind) -> &Motive {
        self.motives
            .iter()
            .find(|m| m.kind() == kind)
            .expect("bank holds every motive")
    }

    pub fn snapshot(&self) -> Vec<MotiveSnapshot> {
        self.motives
            .iter()
            .map(|m| MotiveSnapshot {
                name: m.kind(),
                satisfaction: m.state.satisfaction,
                a: m.state.activity as u8,
                inhibited: m.state.inhibited,
            })
            .collect()
    }
}
