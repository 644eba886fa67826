//! Circumplex emotion sectors.
//!
//! Each of the 28 emotion words sits at a fixed angle on the valence/arousal
//! circle. A word owns the arc between the circular midpoints to its two
//! neighbours, so the 28 arcs tile `[0, 360)` exactly. Arcs are half-open
//! `[start, end)`: a boundary angle belongs to the counterclockwise-next
//! sector. Points closer to the origin than the neutral radius are Neutral.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionWord {
    Happy,
    Delighted,
    Excited,
    Astonished,
    Aroused,
    Tense,
    Alarmed,
    Angry,
    Afraid,
    Annoyed,
    Distressed,
    Frustrated,
    Miserable,
    Sad,
    Gloomy,
    Depressed,
    Bored,
    Droopy,
    Tired,
    Sleepy,
    Calm,
    Relaxed,
    Satisfied,
    AtEase,
    Content,
    Serene,
    Glad,
    Pleased,
}

/// The reference angles, in degrees, of the 28 circumplex words.
pub const CIRCUMPLEX_DEGREES: [(EmotionWord, f64); 28] = [
    (EmotionWord::Happy, 7.8),
    (EmotionWord::Delighted, 24.9),
    (EmotionWord::Excited, 48.6),
    (EmotionWord::Astonished, 69.8),
    (EmotionWord::Aroused, 73.8),
    (EmotionWord::Tense, 92.8),
    (EmotionWord::Alarmed, 96.5),
    (EmotionWord::Angry, 99.0),
    (EmotionWord::Afraid, 116.0),
    (EmotionWord::Annoyed, 123.0),
    (EmotionWord::Distressed, 138.0),
    (EmotionWord::Frustrated, 141.0),
    (EmotionWord::Miserable, 188.7),
    (EmotionWord::Sad, 207.5),
    (EmotionWord::Gloomy, 209.0),
    (EmotionWord::Depressed, 211.0),
    (EmotionWord::Bored, 242.0),
    (EmotionWord::Droopy, 256.7),
    (EmotionWord::Tired, 267.7),
    (EmotionWord::Sleepy, 271.9),
    (EmotionWord::Calm, 316.2),
    (EmotionWord::Relaxed, 318.0),
    (EmotionWord::Satisfied, 319.0),
    (EmotionWord::AtEase, 321.0),
    (EmotionWord::Content, 323.0),
    (EmotionWord::Serene, 328.6),
    (EmotionWord::Glad, 349.0),
    (EmotionWord::Pleased, 353.2),
];

/// SHA-256 of the canonical form of [`CIRCUMPLEX_DEGREES`]; see [`table_digest`].
pub const REFERENCE_TABLE_DIGEST: &str =
    "6df06980aae0945f1ff399c14746dd7af37deb2378b89063bb2fdbe0dde4f5aa";

/// Format version of the shipped sector data file.
pub const SECTOR_FILE_VERSION: u32 = 1;

impl EmotionWord {
    pub const ALL: [EmotionWord; 28] = {
        let mut out = [EmotionWord::Happy; 28];
        let mut i = 0;
        while i < 28 {
            out[i] = CIRCUMPLEX_DEGREES[i].0;
            i += 1;
        }
        out
    };

    pub fn name(self) -> &'static str {
        use EmotionWord::*;
        match self {
            Happy => "happy",
            Delighted => "delighted",
            Excited => "excited",
            Astonished => "astonished",
            Aroused => "aroused",
            Tense => "tense",
            Alarmed => "alarmed",
            Angry => "angry",
            Afraid => "afraid",
            Annoyed => "annoyed",
            Distressed => "distressed",
            Frustrated => "frustrated",
            Miserable => "miserable",
            Sad => "sad",
            Gloomy => "gloomy",
            Depressed => "depressed",
            Bored => "bored",
            Droopy => "droopy",
            Tired => "tired",
            Sleepy => "sleepy",
            Calm => "calm",
            Relaxed => "relaxed",
            Satisfied => "satisfied",
            AtEase => "at_ease",
            Content => "content",
            Serene => "serene",
            Glad => "glad",
            Pleased => "pleased",
        }
    }

    pub fn reference_degree(self) -> f64 {
        CIRCUMPLEX_DEGREES
            .iter()
            .find(|(w, _)| *w == self)
            .map(|(_, d)| *d)
            .expect("every word has a reference angle")
    }
}

/// One of the 28 words, or the neutral core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Emotion {
    Word(EmotionWord),
    Neutral,
}

impl Emotion {
    /// The 29 labels: all words followed by Neutral.
    pub fn all() -> impl Iterator<Item = Emotion> {
        EmotionWord::ALL
            .into_iter()
            .map(Emotion::Word)
            .chain(std::iter::once(Emotion::Neutral))
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Word(w) => w.name(),
            Emotion::Neutral => "neutral",
        }
    }

    pub fn from_name(name: &str) -> Option<Emotion> {
        Emotion::all().find(|e| e.name() == name)
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Emotion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Emotion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Emotion::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown emotion label `{name}`")))
    }
}

/// Puts any finite angle into `[0, 360)`.
pub fn normalize_degrees(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Midpoint of the counterclockwise arc from `from` to `to`.
fn circular_midpoint(from: f64, to: f64) -> f64 {
    if to > from {
        (from + to) / 2.0
    } else {
        normalize_degrees((from + to + 360.0) / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmotionSector {
    pub word: EmotionWord,
    pub center_deg: f64,
    pub arc_start_deg: f64,
    pub arc_end_deg: f64,
}

impl EmotionSector {
    pub fn wraps(&self) -> bool {
        self.arc_end_deg < self.arc_start_deg
    }

    pub fn contains(&self, theta_deg: f64) -> bool {
        if self.wraps() {
            theta_deg >= self.arc_start_deg || theta_deg < self.arc_end_deg
        } else {
            self.arc_start_deg <= theta_deg && theta_deg < self.arc_end_deg
        }
    }

    pub fn arc_length(&self) -> f64 {
        if self.wraps() {
            360.0 - self.arc_start_deg + self.arc_end_deg
        } else {
            self.arc_end_deg - self.arc_start_deg
        }
    }

    /// 1 at the center, falling linearly to 0 at either arc end.
    pub fn membership(&self, theta_deg: f64) -> f64 {
        let after = normalize_degrees(theta_deg - self.center_deg);
        let half = if after < 180.0 {
            normalize_degrees(self.arc_end_deg - self.center_deg)
        } else {
            normalize_degrees(self.center_deg - self.arc_start_deg)
        };
        let off = if after < 180.0 { after } else { 360.0 - after };
        if half <= 0.0 {
            return 0.0;
        }
        (1.0 - off / half).clamp(0.0, 1.0)
    }
}

/// The 28 sectors ordered by arc start.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorTable {
    sectors: Vec<EmotionSector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorEntry {
    pub word: EmotionWord,
    pub degree: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorFile {
    pub version: u32,
    pub sectors: Vec<SectorEntry>,
}

/// Canonical digest of a (word, degree) table: one `word=degree` line per
/// entry in ascending degree order, hashed with SHA-256.
pub fn table_digest(pairs: &[(EmotionWord, f64)]) -> String {
    let mut ordered = pairs.to_vec();
    ordered.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut hasher = Sha256::new();
    for (word, degree) in &ordered {
        hasher.update(format!("{}={}\n", word.name(), degree).as_bytes());
    }
    hex::encode(hasher.finalize())
}

pub fn build_sectors(pairs: &[(EmotionWord, f64)]) -> Result<SectorTable, ConfigError> {
    let mut words = HashSet::new();
    for (word, degree) in pairs {
        if !(0.0..360.0).contains(degree) {
            return Err(ConfigError::invalid(
                format!("sector {}", word.name()),
                format!("degree {degree} outside [0, 360)"),
            ));
        }
        if !words.insert(*word) {
            return Err(ConfigError::invalid(
                format!("sector {}", word.name()),
                "word listed twice",
            ));
        }
    }
    if pairs.len() != EmotionWord::ALL.len() {
        return Err(ConfigError::invalid(
            "sectors",
            format!(
                "expected {} entries, got {}",
                EmotionWord::ALL.len(),
                pairs.len()
            ),
        ));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    if let Some(w) = sorted.windows(2).find(|w| w[0].1 == w[1].1) {
        return Err(ConfigError::invalid(
            format!("sector {}", w[1].0.name()),
            format!("degree {} duplicates {}", w[1].1, w[0].0.name()),
        ));
    }
    let n = sorted.len();
    let mut sectors: Vec<EmotionSector> = (0..n)
        .map(|i| {
            let prev = sorted[(i + n - 1) % n].1;
            let (word, center) = sorted[i];
            let next = sorted[(i + 1) % n].1;
            EmotionSector {
                word,
                center_deg: center,
                arc_start_deg: circular_midpoint(prev, center),
                arc_end_deg: circular_midpoint(center, next),
            }
        })
        .collect();
    sectors.sort_by(|a, b| a.arc_start_deg.total_cmp(&b.arc_start_deg));
    Ok(SectorTable { sectors })
}

impl SectorTable {
    pub fn reference() -> SectorTable {
        build_sectors(&CIRCUMPLEX_DEGREES).expect("reference table is well formed")
    }

    /// Parses the versioned sector file. Unless `allow_modified` is set, the
    /// table must digest to [`REFERENCE_TABLE_DIGEST`].
    pub fn from_json(text: &str, allow_modified: bool) -> Result<SectorTable, ConfigError> {
        let file: SectorFile =
            serde_json::from_str(text).map_err(|e| ConfigError::parse("sector file", e))?;
        if file.version != SECTOR_FILE_VERSION {
            return Err(ConfigError::invalid(
                "sector file version",
                format!("expected {SECTOR_FILE_VERSION}, got {}", file.version),
            ));
        }
        let pairs: Vec<_> = file.sectors.iter().map(|e| (e.word, e.degree)).collect();
        let digest = table_digest(&pairs);
        if digest != REFERENCE_TABLE_DIGEST && !allow_modified {
            return Err(ConfigError::SectorDigest {
                expected: REFERENCE_TABLE_DIGEST.to_string(),
                actual: digest,
            });
        }
        build_sectors(&pairs)
    }

    /// The table in data-file form, entries in ascending degree order.
    pub fn to_file(&self) -> SectorFile {
        let mut sectors: Vec<_> = self
            .sectors
            .iter()
            .map(|s| SectorEntry {
                word: s.word,
                degree: s.center_deg,
            })
            .collect();
        sectors.sort_by(|a, b| a.degree.total_cmp(&b.degree));
        SectorFile {
            version: SECTOR_FILE_VERSION,
            sectors,
        }
    }

    pub fn sectors(&self) -> &[EmotionSector] {
        &self.sectors
    }

    pub fn get(&self, word: EmotionWord) -> Option<&EmotionSector> {
        self.sectors.iter().find(|s| s.word == word)
    }

    /// The sector owning `theta_deg`; total over `[0, 360)`.
    pub fn lookup(&self, theta_deg: f64) -> &EmotionSector {
        let theta = normalize_degrees(theta_deg);
        let idx = self.sectors.partition_point(|s| s.arc_start_deg <= theta);
        // Before the first start, the angle falls in the sector wrapping past 0.
        let i = if idx == 0 {
            self.sectors.len() - 1
        } else {
            idx - 1
        };
        &self.sectors[i]
    }
}

/// Returned by [`theta`] for the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("angle undefined at the origin of the valence/arousal plane")]
pub struct AngleUndefined;

/// Angle of the point `(valence, arousal)` in degrees, in `[0, 360)`.
pub fn theta(valence: f64, arousal: f64) -> Result<f64, AngleUndefined> {
    if valence == 0.0 && arousal == 0.0 {
        return Err(AngleUndefined);
    }
    Ok(normalize_degrees(arousal.atan2(valence).to_degrees()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmotionReading {
    pub emotion: Emotion,
    pub theta_deg: Option<f64>,
    pub radius: f64,
    /// Closeness to the sector's reference angle; 0 for Neutral.
    pub membership: f64,
}

pub fn map_emotion(
    valence: f64,
    arousal: f64,
    table: &SectorTable,
    neutral_radius: f64,
) -> EmotionReading {
    let radius = valence.hypot(arousal);
    let theta_deg = theta(valence, arousal).ok();
    match theta_deg {
        Some(t) if radius >= neutral_radius => {
            let sector = table.lookup(t);
            EmotionReading {
                emotion: Emotion::Word(sector.word),
                theta_deg,
                radius,
                membership: sector.membership(t),
            }
        }
        _ => EmotionReading {
            emotion: Emotion::Neutral,
            theta_deg,
            radius,
            membership: 0.0,
        },
    }
}

/// Maps an angle directly, bypassing the neutral check.
pub fn emotion_at(theta_deg: f64, table: &SectorTable) -> EmotionWord {
    table.lookup(theta_deg).word
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn happy_arc_and_wrap() {
        let t = SectorTable::reference();
        let happy = t.get(EmotionWord::Happy).unwrap();
        assert!((happy.arc_start_deg - 0.5).abs() < 1e-9);
        assert!((happy.arc_end_deg - 16.35).abs() < 1e-9);
        let pleased = t.get(EmotionWord::Pleased).unwrap();
        assert!(pleased.wraps());
        assert!((pleased.arc_end_deg - 0.5).abs() < 1e-9);
        let excited = t.get(EmotionWord::Excited).unwrap();
        assert!((excited.arc_start_deg - 36.75).abs() < 1e-9);
    }

    #[test]
    fn theta_axes() {
        assert_eq!(theta(1.0, 0.0), Ok(0.0));
        assert_eq!(theta(0.0, 1.0), Ok(90.0));
        assert_eq!(theta(-1.0, 0.0), Ok(180.0));
        assert_eq!(theta(0.0, -1.0), Ok(270.0));
        assert_eq!(theta(0.0, 0.0), Err(AngleUndefined));
    }

    #[test]
    fn mapping_examples() {
        let t = SectorTable::reference();
        assert_eq!(emotion_at(127.52, &t), EmotionWord::Annoyed);
        assert_eq!(emotion_at(45.0, &t), EmotionWord::Excited);
        let r = map_emotion(0.99, 0.1356, &t, 0.15);
        assert_eq!(r.emotion, Emotion::Word(EmotionWord::Happy));
        assert!((r.theta_deg.unwrap() - 7.8).abs() < 0.01);
        assert_eq!(map_emotion(0.01, 0.01, &t, 0.15).emotion, Emotion::Neutral);
        let origin = map_emotion(0.0, 0.0, &t, 0.15);
        assert_eq!(origin.emotion, Emotion::Neutral);
        assert_eq!(origin.theta_deg, None);
    }

    #[test]
    fn corner_points_keep_their_angle_label() {
        let t = SectorTable::reference();
        let r = map_emotion(-1.0, -1.0, &t, 0.15);
        assert!(r.radius > 1.0);
        assert_eq!(r.emotion, Emotion::Word(emotion_at(225.0, &t)));
    }

    #[test]
    fn boundary_belongs_to_next_sector() {
        let t = SectorTable::reference();
        assert_eq!(emotion_at(0.5, &t), EmotionWord::Happy);
        assert_eq!(emotion_at(0.4999, &t), EmotionWord::Pleased);
        assert_eq!(emotion_at(36.75, &t), EmotionWord::Excited);
    }

    #[test]
    fn file_form_round_trips() {
        let text = serde_json::to_string(&SectorTable::reference().to_file()).unwrap();
        assert_eq!(
            SectorTable::from_json(&text, false).unwrap(),
            SectorTable::reference()
        );
    }

    #[test]
    fn reference_digest_is_pinned() {
        assert_eq!(table_digest(&CIRCUMPLEX_DEGREES), REFERENCE_TABLE_DIGEST);
    }

    #[test]
    fn rejects_malformed_tables() {
        let mut dup = CIRCUMPLEX_DEGREES.to_vec();
        dup[1].1 = 7.8;
        let err = build_sectors(&dup).unwrap_err().to_string();
        assert!(err.contains("duplicates"), "{err}");

        let short = &CIRCUMPLEX_DEGREES[..27];
        assert!(build_sectors(short).is_err());
    }

    #[test]
    fn modified_file_needs_override() {
        let mut file = SectorFile {
            version: 1,
            sectors: CIRCUMPLEX_DEGREES
                .iter()
                .map(|(word, degree)| SectorEntry {
                    word: *word,
                    degree: *degree,
                })
                .collect(),
        };
        let text = serde_json::to_string(&file).unwrap();
        assert!(SectorTable::from_json(&text, false).is_ok());

        file.sectors[0].degree = 8.0;
        let text = serde_json::to_string(&file).unwrap();
        assert!(matches!(
            SectorTable::from_json(&text, false),
            Err(ConfigError::SectorDigest { .. })
        ));
        let t = SectorTable::from_json(&text, true).unwrap();
        assert_eq!(t.get(EmotionWord::Happy).unwrap().center_deg, 8.0);
    }

    #[test]
    fn membership_peaks_at_center() {
        let t = SectorTable::reference();
        let s = t.get(EmotionWord::Annoyed).unwrap();
        assert_eq!(s.membership(123.0), 1.0);
        assert!(s.membership(127.52) < 1.0 && s.membership(127.52) > 0.0);
        let pleased = t.get(EmotionWord::Pleased).unwrap();
        assert!(pleased.membership(0.0) > 0.0);
    }

    proptest! {
        #[test]
        fn lookup_agrees_with_contains(theta in 0.0f64..360.0) {
            let t = SectorTable::reference();
            let hits: Vec<_> = t.sectors().iter().filter(|s| s.contains(theta)).collect();
            prop_assert_eq!(hits.len(), 1);
            prop_assert_eq!(hits[0].word, t.lookup(theta).word);
        }

        #[test]
        fn adding_full_turns_changes_nothing(theta in 0.0f64..360.0, turns in 1i32..4) {
            let t = SectorTable::reference();
            let shifted = theta + 360.0 * turns as f64;
            // rounding in the shift may move theta by ~1e-13; stay off boundaries
            prop_assume!(t.sectors().iter().all(|s| (s.arc_start_deg - theta).abs() > 1e-6));
            prop_assert_eq!(emotion_at(shifted, &t), emotion_at(theta, &t));
        }
    }
}
