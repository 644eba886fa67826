//! Wire format of the live protocol: JSON text frames.
//!
//! Inbound:
//! - `{"type":"inject","percept":{"kind":..., "base_intensity"?, "movement_speed"?, "distance_m"?, "partner_id"?}}`
//! - `{"type":"command","name":"..."}`
//!
//! Outbound:
//! - `{"type":"hello", ...}` once per connection
//! - `{"type":"state", <trace record fields>, "motives":[{name,S,a,inhibited}]}` every tick
//! - `{"type":"error","detail":"..."}` in reply to a bad message

use hri_affect::circumplex::{EmotionSector, SECTOR_FILE_VERSION};
use hri_affect::motivation::{MotiveKind, MotiveSnapshot};
use hri_affect::percepts::{CatalogEntry, PerceptCatalog, PerceptInput, PerceptKind};
use hri_affect::scenario::PerceptSeed;
use hri_affect::{Emotion, Setup, TraceRecord};
use serde::de::DeserializeSeed;
use serde::Serialize;
use serde_json::{Map, Value};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ProtocolError(pub String);

impl ProtocolError {
    fn new(msg: impl Into<String>) -> Self {
        ProtocolError(msg.into())
    }
}

/// A validated client message.
#[derive(Clone, Debug, PartialEq)]
pub enum Inbound {
    Inject(PerceptInput),
    Command(String),
}

fn take_only(
    mut obj: Map<String, Value>,
    field: &str,
    msg_type: &str,
) -> Result<Value, ProtocolError> {
    let value = obj.remove(field).ok_or_else(|| {
        ProtocolError::new(format!("`{msg_type}` message needs a `{field}` field"))
    })?;
    if let Some(extra) = obj.keys().next() {
        return Err(ProtocolError::new(format!(
            "unexpected field `{extra}` in `{msg_type}` message"
        )));
    }
    Ok(value)
}

impl Inbound {
    /// Parses and validates one text frame. Percept kinds resolve against
    /// the catalog exactly as in scenario files.
    pub fn parse(text: &str, catalog: &PerceptCatalog) -> Result<Inbound, ProtocolError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| ProtocolError::new(format!("invalid JSON: {e}")))?;
        let Value::Object(mut obj) = value else {
            return Err(ProtocolError::new("message must be a JSON object"));
        };
        let msg_type = match obj.remove("type") {
            Some(Value::String(t)) => t,
            Some(_) => return Err(ProtocolError::new("`type` must be a string")),
            None => return Err(ProtocolError::new("message has no `type`")),
        };
        match msg_type.as_str() {
            "inject" => {
                let percept = take_only(obj, "percept", "inject")?;
                PerceptSeed(catalog)
                    .deserialize(percept)
                    .map(Inbound::Inject)
                    .map_err(|e| ProtocolError::new(format!("bad percept: {e}")))
            }
            "command" => match take_only(obj, "name", "command")? {
                Value::String(name) if !name.trim().is_empty() => Ok(Inbound::Command(name)),
                _ => Err(ProtocolError::new(
                    "command `name` must be a nonempty string",
                )),
            },
            other => Err(ProtocolError::new(format!(
                "unknown message type `{other}`"
            ))),
        }
    }

    /// The percept this message contributes to the next tick.
    pub fn into_percept(self, catalog: &PerceptCatalog) -> PerceptInput {
        match self {
            Inbound::Inject(p) => p,
            Inbound::Command(name) => catalog
                .input(PerceptKind::Command.name())
                .unwrap_or_else(|| PerceptInput::new(PerceptKind::Command, 0.0, 0.0))
                .with_command(name),
        }
    }
}

/// Handshake sent once on connect: everything an observer needs to render
/// and validate state frames without its own copy of the engine data.
#[derive(Clone, Debug, Serialize)]
pub struct Hello {
    pub protocol_version: u32,
    pub engine_version: String,
    pub tick_hz: f64,
    pub neutral_radius: f64,
    pub sector_file_version: u32,
    pub sectors_digest: String,
    pub sectors: Vec<EmotionSector>,
    pub percept_catalog: Vec<CatalogEntry>,
    /// Motive names in priority order.
    pub motives: Vec<&'static str>,
    pub emotions: Vec<Emotion>,
}

impl Hello {
    pub fn new(setup: &Setup) -> Hello {
        Hello {
            protocol_version: PROTOCOL_VERSION,
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            tick_hz: setup.config.tick_hz,
            neutral_radius: setup.config.neutral_radius,
            sector_file_version: SECTOR_FILE_VERSION,
            sectors_digest: setup.sectors_digest.clone(),
            sectors: setup.sectors.sectors().to_vec(),
            percept_catalog: setup.percepts.entries().to_vec(),
            motives: setup
                .motives
                .params()
                .iter()
                .map(|p| p.name.name())
                .collect(),
            emotions: Emotion::all().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateFrame {
    #[serde(flatten)]
    pub record: TraceRecord,
    pub motives: Vec<MotiveSnapshot>,
}

impl StateFrame {
    pub fn active(&self, kind: MotiveKind) -> bool {
        self.motives.iter().any(|m| m.name == kind && m.a == 1)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outbound {
    Hello(Hello),
    State(StateFrame),
    Error { detail: String },
}

impl Outbound {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("outbound messages serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> PerceptCatalog {
        Setup::builtin().percepts
    }

    #[test]
    fn parses_inject_and_command() {
        let c = catalog();
        let m = Inbound::parse(
            r#"{"type":"inject","percept":{"kind":"wave_both_hands","distance_m":2.0,"partner_id":"ana"}}"#,
            &c,
        )
        .unwrap();
        let Inbound::Inject(p) = m else { panic!() };
        assert_eq!(p.kind, PerceptKind::HandGesture);
        assert_eq!(p.base_intensity, 0.7);
        assert_eq!(p.distance_m, Some(2.0));

        let m = Inbound::parse(r#"{"type":"command","name":"sit"}"#, &c).unwrap();
        assert_eq!(m, Inbound::Command("sit".into()));
        let p = m.into_percept(&c);
        assert_eq!(p.kind, PerceptKind::Command);
        assert_eq!(p.command.as_deref(), Some("sit"));
    }

    #[test]
    fn rejects_bad_messages_with_a_reason() {
        let c = catalog();
        for (text, needle) in [
            ("not json", "invalid JSON"),
            ("[1]", "JSON object"),
            (r#"{"percept":{}}"#, "no `type`"),
            (r#"{"type":"dance"}"#, "unknown message type"),
            (r#"{"type":"inject"}"#, "needs a `percept`"),
            (
                r#"{"type":"inject","percept":{"kind":"Telepathy"}}"#,
                "unknown percept kind",
            ),
            (
                r#"{"type":"inject","percept":{"kind":"smile","base_intensity":3}}"#,
                "base_intensity",
            ),
            (
                r#"{"type":"inject","percept":{"kind":"smile"},"extra":1}"#,
                "unexpected field",
            ),
            (r#"{"type":"command","name":""}"#, "nonempty"),
        ] {
            let err = Inbound::parse(text, &c).unwrap_err().to_string();
            assert!(err.contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn state_frame_flattens_the_record() {
        let setup = std::sync::Arc::new(Setup::builtin());
        let mut engine = hri_affect::Engine::new(setup);
        let record = engine.step(&[]);
        let frame = Outbound::State(StateFrame {
            record,
            motives: engine.motive_snapshot(),
        });
        let v: Value = serde_json::from_str(&frame.to_json()).unwrap();
        assert_eq!(v["type"], "state");
        for key in [
            "tick",
            "active_motive",
            "S",
            "A",
            "V",
            "theta",
            "radius",
            "emotion",
            "behavior",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["motives"].as_array().unwrap().len(), 6);
        let m = &v["motives"][0];
        for key in ["name", "S", "a", "inhibited"] {
            assert!(m.get(key).is_some(), "missing motives[].{key}");
        }
    }

    #[test]
    fn hello_carries_catalog_and_sectors() {
        let setup = Setup::builtin();
        let v: Value =
            serde_json::from_str(&Outbound::Hello(Hello::new(&setup)).to_json()).unwrap();
        assert_eq!(v["type"], "hello");
        assert_eq!(v["sectors"].as_array().unwrap().len(), 28);
        assert_eq!(v["emotions"].as_array().unwrap().len(), 29);
        assert_eq!(
            v["sectors_digest"],
            hri_affect::circumplex::REFERENCE_TABLE_DIGEST
        );
        assert_eq!(v["motives"][0], "ObeyHumans");
        assert!(v["percept_catalog"]
            .as_array()
            .unwrap()
            .iter()
            .any(|e| e["name"] == "wave_both_hands"));
    }
}
