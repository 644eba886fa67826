//! Scenario files, replay, and CSV traces.
//!
//! A scenario is a JSON array of `{tick, percepts: [...]}` events with
//! strictly increasing ticks. Percept `kind` is either a percept kind name
//! (`"HandGesture"`) or a named catalog entry (`"wave_both_hands"`); the
//! catalog supplies intensity and speed unless the percept overrides them.
//! Parsing is catalog-aware so that an unknown kind is reported with the
//! line it appears on.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::de::{self, DeserializeSeed, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::config::Setup;
use crate::engine::{Engine, TraceRecord};
use crate::error::{RunError, ScenarioError};
use crate::percepts::{PartnerId, PerceptCatalog, PerceptInput};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEvent {
    pub tick: u64,
    pub percepts: Vec<PerceptInput>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    pub events: Vec<ScenarioEvent>,
}

impl Scenario {
    pub fn parse(text: &str, catalog: &PerceptCatalog) -> Result<Scenario, ScenarioError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let events = ScenarioSeed(catalog).deserialize(&mut de)?;
        de.end()?;
        Ok(Scenario { events })
    }

    pub fn load(path: &Path, catalog: &PerceptCatalog) -> Result<Scenario, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Scenario::parse(&text, catalog)
    }

    /// Serializes with every percept field explicit, so the file replays
    /// identically regardless of catalog defaults.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.events).expect("scenario serializes")
    }

    /// Ticks covered by a replay: `0..=last event tick`.
    pub fn duration(&self) -> u64 {
        self.events.last().map_or(0, |e| e.tick + 1)
    }
}

/// Replays `scenario` through `engine`, one record per tick.
pub fn replay(engine: &mut Engine, scenario: &Scenario) -> Vec<TraceRecord> {
    let mut events = scenario.events.iter().peekable();
    let mut out = Vec::with_capacity(scenario.duration() as usize);
    for tick in 0..scenario.duration() {
        let percepts = match events.peek() {
            Some(ev) if ev.tick == tick => &events.next().expect("peeked").percepts[..],
            _ => &[],
        };
        out.push(engine.step(percepts));
    }
    out
}

pub fn write_trace<W: Write>(records: &[TraceRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TraceRecord::CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()
}

pub fn trace_to_string(records: &[TraceRecord]) -> String {
    let mut buf = Vec::new();
    write_trace(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("trace is utf-8")
}

/// Loads config and scenario, replays, and writes the CSV trace.
/// Returns the number of records written.
pub fn run_scenario(
    scenario_path: &Path,
    config_path: Option<&Path>,
    out_path: &Path,
    seed: Option<u64>,
    allow_modified_sectors: bool,
) -> Result<usize, RunError> {
    let mut setup = match config_path {
        Some(p) => Setup::load_with(p, allow_modified_sectors)?,
        None => Setup::builtin(),
    };
    if let Some(seed) = seed {
        setup = setup.with_seed(seed);
    }
    let scenario = Scenario::load(scenario_path, &setup.percepts)?;
    let mut engine = Engine::new(Arc::new(setup));
    let records = replay(&mut engine, &scenario);
    let output_err = |source| RunError::Output {
        path: out_path.to_path_buf(),
        source,
    };
    let file = fs::File::create(out_path).map_err(output_err)?;
    write_trace(&records, std::io::BufWriter::new(file)).map_err(output_err)?;
    Ok(records.len())
}

struct ScenarioSeed<'a>(&'a PerceptCatalog);

impl<'de> DeserializeSeed<'de> for ScenarioSeed<'_> {
    type Value = Vec<ScenarioEvent>;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for ScenarioSeed<'_> {
    type Value = Vec<ScenarioEvent>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an array of scenario events")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut events: Vec<ScenarioEvent> = Vec::new();
        while let Some(ev) = seq.next_element_seed(EventSeed(self.0))? {
            if let Some(prev) = events.last() {
                if ev.tick <= prev.tick {
                    return Err(de::Error::custom(format!(
                        "event ticks must be strictly increasing, got {} after {}",
                        ev.tick, prev.tick
                    )));
                }
            }
            events.push(ev);
        }
        Ok(events)
    }
}

struct EventSeed<'a>(&'a PerceptCatalog);

impl<'de> DeserializeSeed<'de> for EventSeed<'_> {
    type Value = ScenarioEvent;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for EventSeed<'_> {
    type Value = ScenarioEvent;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an event object {tick, percepts}")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        let mut tick = None;
        let mut percepts = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "tick" => tick = Some(map.next_value::<u64>()?),
                "percepts" => percepts = Some(map.next_value_seed(PerceptListSeed(self.0))?),
                other => return Err(de::Error::unknown_field(other, &["tick", "percepts"])),
            }
        }
        Ok(ScenarioEvent {
            tick: tick.ok_or_else(|| de::Error::missing_field("tick"))?,
            percepts: percepts.unwrap_or_default(),
        })
    }
}

struct PerceptListSeed<'a>(&'a PerceptCatalog);

impl<'de> DeserializeSeed<'de> for PerceptListSeed<'_> {
    type Value = Vec<PerceptInput>;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for PerceptListSeed<'_> {
    type Value = Vec<PerceptInput>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an array of percepts")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut out = Vec::new();
        while let Some(p) = seq.next_element_seed(PerceptSeed(self.0))? {
            out.push(p);
        }
        Ok(out)
    }
}

/// Deserializes one percept object against a catalog.
pub struct PerceptSeed<'a>(pub &'a PerceptCatalog);

const PERCEPT_FIELDS: &[&str] = &[
    "kind",
    "base_intensity",
    "movement_speed",
    "distance_m",
    "partner_id",
    "command",
];

impl<'de> DeserializeSeed<'de> for PerceptSeed<'_> {
    type Value = PerceptInput;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for PerceptSeed<'_> {
    type Value = PerceptInput;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a percept object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        let mut template: Option<PerceptInput> = None;
        let mut base_intensity = None;
        let mut movement_speed = None;
        let mut distance_m = None;
        let mut partner_id = None;
        let mut command = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "kind" => {
                    let name = map.next_value::<String>()?;
                    let found = self.0.input(&name).ok_or_else(|| {
                        de::Error::custom(format!("unknown percept kind `{name}`"))
                    })?;
                    template = Some(found);
                }
                "base_intensity" => base_intensity = Some(map.next_value::<f64>()?),
                "movement_speed" => movement_speed = Some(map.next_value::<f64>()?),
                "distance_m" => distance_m = Some(map.next_value::<f64>()?),
                "partner_id" => partner_id = Some(map.next_value::<PartnerId>()?),
                "command" => command = Some(map.next_value::<String>()?),
                other => return Err(de::Error::unknown_field(other, PERCEPT_FIELDS)),
            }
        }
        let mut p = template.ok_or_else(|| de::Error::missing_field("kind"))?;
        if let Some(v) = base_intensity {
            p.base_intensity = v;
        }
        if let Some(v) = movement_speed {
            p.movement_speed = v;
        }
        p.distance_m = distance_m;
        p.partner_id = partner_id;
        p.command = command;
        p.validate().map_err(de::Error::custom)?;
        Ok(p)
    }
}
