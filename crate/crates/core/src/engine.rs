//! The deterministic tick engine.
//!
//! Every tick runs the same pipeline: resolve percepts and update the scene,
//! compute the overall intensity, update and fuse the motives, advance
//! arousal then valence, map the emotion, dispatch a behavior if due, and
//! emit one [`TraceRecord`]. The engine is a pure function of its state and
//! the percepts handed to [`Engine::step`].

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::appraisal::AppraisalState;
use crate::behavior::BehaviorSelector;
use crate::circumplex::{map_emotion, Emotion};
use crate::config::Setup;
use crate::motivation::{
    FusionOutput, MotiveBank, MotiveKind, MotiveSnapshot, Situation, NO_ACTIVE_MOTIVE,
};
use crate::percepts::{IntensityModel, PartnerId, Percept, PerceptInput, PerceptKind};

/// One tick of observable engine state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub tick: u64,
    #[serde(serialize_with = "motive_name")]
    pub active_motive: Option<MotiveKind>,
    #[serde(rename = "S")]
    pub satisfaction: f64,
    #[serde(rename = "A")]
    pub arousal: f64,
    #[serde(rename = "V")]
    pub valence: f64,
    pub theta: Option<f64>,
    pub radius: f64,
    pub emotion: Emotion,
    pub behavior: Option<String>,
}

fn motive_name<S: serde::Serializer>(m: &Option<MotiveKind>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.map_or(NO_ACTIVE_MOTIVE, MotiveKind::name))
}

impl TraceRecord {
    pub const CSV_HEADER: [&'static str; 9] = [
        "tick",
        "active_motive",
        "S",
        "A",
        "V",
        "theta",
        "radius",
        "emotion",
        "behavior",
    ];

    pub fn active_motive_name(&self) -> &'static str {
        self.active_motive
            .map_or(NO_ACTIVE_MOTIVE, MotiveKind::name)
    }

    /// Fixed-precision fields in CSV column order.
    pub fn csv_fields(&self) -> [String; 9] {
        [
            self.tick.to_string(),
            self.active_motive_name().to_string(),
            format!("{:.6}", self.satisfaction),
            format!("{:.6}", self.arousal),
            format!("{:.6}", self.valence),
            self.theta.map(|t| format!("{t:.4}")).unwrap_or_default(),
            format!("{:.6}", self.radius),
            self.emotion.name().to_string(),
            self.behavior.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Debug)]
struct Running {
    id: String,
    until: u64,
}

#[derive(Clone, Debug)]
struct PendingCommand {
    name: String,
    /// Tick at which the dispatched command behavior completes.
    done_at: Option<u64>,
}

/// What the engine remembers about the world between ticks.
#[derive(Clone, Debug, Default)]
struct Scene {
    partner: Option<PartnerId>,
    distance_m: Option<f64>,
    last_human_tick: Option<u64>,
    face: bool,
    skeleton: bool,
    idle_ticks: u64,
    commands: VecDeque<PendingCommand>,
}

pub struct Engine {
    setup: Arc<Setup>,
    intensity: IntensityModel,
    tick: u64,
    scene: Scene,
    bank: MotiveBank,
    appraisal: AppraisalState,
    selector: BehaviorSelector,
    running: Option<Running>,
    last_winner: Option<Option<MotiveKind>>,
    last_dispatched_label: Option<Emotion>,
    greeted: BTreeSet<PartnerId>,
    greetings: Vec<(u64, PartnerId)>,
    executed_commands: Vec<(u64, String)>,
}

impl Engine {
    pub fn new(setup: Arc<Setup>) -> Engine {
        let cfg = &setup.config;
        Engine {
            intensity: cfg.intensity_model(),
            bank: MotiveBank::new(&setup.motives, cfg.self_entertainment_after_ticks),
            selector: BehaviorSelector::new(cfg.seed),
            setup,
            tick: 0,
            scene: Scene::default(),
            appraisal: AppraisalState::default(),
            running: None,
            last_winner: None,
            last_dispatched_label: None,
            greeted: BTreeSet::new(),
            greetings: Vec::new(),
            executed_commands: Vec::new(),
        }
    }

    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    /// The tick the next call to [`Engine::step`] will process.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn motives(&self) -> &MotiveBank {
        &self.bank
    }

    pub fn motive_snapshot(&self) -> Vec<MotiveSnapshot> {
        self.bank.snapshot()
    }

    pub fn appraisal(&self) -> &AppraisalState {
        &self.appraisal
    }

    /// Every greeting emission as `(tick, partner)`.
    pub fn greetings(&self) -> &[(u64, PartnerId)] {
        &self.greetings
    }

    /// Every acknowledged command as `(tick, name)`.
    pub fn executed_commands(&self) -> &[(u64, String)] {
        &self.executed_commands
    }

    fn resolve(&mut self, inputs: &[PerceptInput]) -> Vec<Percept> {
        let default_distance = self.setup.config.default_distance_m;
        inputs
            .iter()
            .map(|input| {
                let distance_m = input
                    .distance_m
                    .or(self.scene.distance_m)
                    .unwrap_or(default_distance);
                let partner_id = input
                    .partner_id
                    .clone()
                    .or_else(|| self.scene.partner.clone())
                    .unwrap_or_default();
                if input.kind.is_human_related() {
                    self.scene.distance_m = Some(distance_m);
                    if self.scene.partner.as_ref() != Some(&partner_id) {
                        self.scene.face = false;
                        self.scene.skeleton = false;
                        self.scene.partner = Some(partner_id.clone());
                    }
                }
                Percept {
                    kind: input.kind,
                    base_intensity: input.base_intensity,
                    movement_speed: input.movement_speed,
                    distance_m,
                    partner_id,
                    tick: self.tick,
                }
            })
            .collect()
    }

    fn observe(&mut self, inputs: &[PerceptInput], percepts: &[Percept]) -> Situation {
        let tick = self.tick;
        let has = |k: PerceptKind| percepts.iter().any(|p| p.kind == k);
        let human_now = percepts.iter().any(|p| p.kind.is_human_related());
        if human_now {
            self.scene.last_human_tick = Some(tick);
            self.scene.idle_ticks = 0;
        } else {
            self.scene.idle_ticks += 1;
        }
        let hold = self.setup.config.presence_hold_ticks;
        let present = self.scene.last_human_tick.is_some_and(|t| tick - t < hold);
        if !present {
            self.scene.face = false;
            self.scene.skeleton = false;
        }
        if has(PerceptKind::FaceDetected) {
            self.scene.face = true;
        }
        if has(PerceptKind::SkeletonAvailable) {
            self.scene.skeleton = true;
        }
        for input in inputs.iter().filter(|i| i.kind == PerceptKind::Command) {
            self.scene.commands.push_back(PendingCommand {
                name: input
                    .command
                    .clone()
                    .unwrap_or_else(|| "command".to_string()),
                done_at: None,
            });
        }
        let executed = match self.scene.commands.front() {
            Some(PendingCommand {
                done_at: Some(done),
                ..
            }) if tick >= *done => {
                let cmd = self.scene.commands.pop_front().expect("front exists");
                self.executed_commands.push((tick, cmd.name));
                true
            }
            _ => false,
        };
        let zone = self
            .scene
            .distance_m
            .filter(|_| present)
            .map(|d| self.setup.config.zones.classify(d));
        Situation {
            tick,
            human_present: present,
            human_percept_now: human_now,
            partner: self.scene.partner.clone().filter(|_| present),
            partner_zone: zone,
            face_detected: self.scene.face,
            skeleton_available: self.scene.skeleton,
            greeting_back: has(PerceptKind::GreetingBack),
            looking_forward: has(PerceptKind::LookingForward),
            looking_away: has(PerceptKind::LookingAway),
            command_pending: !self.scene.commands.is_empty(),
            command_executed: executed,
            idle_ticks: self.scene.idle_ticks,
        }
    }

    fn dispatch(&mut self, fusion: FusionOutput, emotion: Emotion, partner: Option<&PartnerId>) {
        let tick = self.tick;
        if self.running.as_ref().is_some_and(|r| tick >= r.until) {
            self.running = None;
        }
        let motive_changed = self.last_winner != Some(fusion.winner);
        let label_changed = self.last_dispatched_label != Some(emotion);
        self.last_winner = Some(fusion.winner);
        if !(motive_changed || (self.running.is_none() && label_changed)) {
            return;
        }
        let override_motive = match fusion.winner {
            Some(MotiveKind::Greeting) => match partner {
                Some(p) if !self.greeted.contains(p) => Some(MotiveKind::Greeting),
                _ => None,
            },
            other => other,
        };
        let setup = Arc::clone(&self.setup);
        let triple = self
            .selector
            .choose(&setup.behaviors, emotion, override_motive);
        let overridden = override_motive.is_some_and(|m| setup.behaviors.override_for(m).is_some());
        if overridden && override_motive == Some(MotiveKind::Greeting) {
            let p = partner
                .expect("greeting override requires a partner")
                .clone();
            self.greeted.insert(p.clone());
            self.greetings.push((tick, p));
        }
        if fusion.winner == Some(MotiveKind::ObeyHumans) {
            if let Some(cmd) = self.scene.commands.front_mut() {
                cmd.done_at.get_or_insert(tick + triple.duration());
            }
        }
        self.running = Some(Running {
            id: triple.id(),
            until: tick + triple.duration(),
        });
        self.last_dispatched_label = Some(emotion);
    }

    /// Advances one tick with the percepts that arrived for it.
    pub fn step(&mut self, inputs: &[PerceptInput]) -> TraceRecord {
        let percepts = self.resolve(inputs);
        let situation = self.observe(inputs, &percepts);

        let intensity = self.intensity.tick_intensity(&percepts);
        let fusion = self.bank.update(&situation);
        self.appraisal =
            self.appraisal
                .advance(intensity, fusion.satisfaction, &self.setup.config.appraisal);
        let reading = map_emotion(
            self.appraisal.valence,
            self.appraisal.arousal,
            &self.setup.sectors,
            self.setup.config.neutral_radius,
        );
        self.dispatch(fusion, reading.emotion, situation.partner.as_ref());

        let record = TraceRecord {
            tick: self.tick,
            active_motive: fusion.winner,
            satisfaction: fusion.satisfaction,
            arousal: self.appraisal.arousal,
            valence: self.appraisal.valence,
            theta: reading.theta_deg,
            radius: reading.radius,
            emotion: reading.emotion,
            behavior: self.running.as_ref().map(|r| r.id.clone()),
        };
        self.tick += 1;
        record
    }
}
