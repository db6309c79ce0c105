//! Corpus file formats.
//!
//! The canonical format is UTF-8 JSON Lines, one utterance per line:
//!
//! ```text
//! {"utterance_id":"u1","transcription_id":"t1","transcription_text":"누가 가입했대요","intent":"statement","wh_particle":"who","gold_translation":"I heard somebody is joining in.","audio_ref":"wav/u1.wav","speaker":"F"}
//! ```
//!
//! `audio_ref` and `speaker` are optional (absent or `null`); every other
//! field is a required non-empty string. Unknown fields are rejected. CSV and
//! TSV with a header row of the same field names are accepted too.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Read, Write};

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::{
    canonical_text, stats, validate_corpus, Corpus, Intent, Transcription, UtteranceRecord,
    WhParticle, MAX_UTTERANCES_PER_TRANSCRIPTION,
};

const REQUIRED: [&str; 6] = [
    "utterance_id",
    "transcription_id",
    "transcription_text",
    "intent",
    "wh_particle",
    "gold_translation",
];
const OPTIONAL: [&str; 2] = ["audio_ref", "speaker"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    JsonLines,
    Csv,
    Tsv,
}

impl CorpusFormat {
    /// Guess from a file extension; JSON Lines otherwise.
    pub fn from_path(path: &std::path::Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => CorpusFormat::Csv,
            Some("tsv") => CorpusFormat::Tsv,
            _ => CorpusFormat::JsonLines,
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed reading corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: field '{field}': {message}")]
    BadField {
        line: usize,
        field: String,
        message: String,
    },
    #[error("line {line}: field '{field}': unknown label '{value}'")]
    UnknownLabel {
        line: usize,
        field: String,
        value: String,
    },
    #[error(
        "line {line}: duplicate utterance_id '{utterance_id}' (first seen on line {first_line})"
    )]
    DuplicateUtteranceId {
        line: usize,
        utterance_id: String,
        first_line: usize,
    },
    #[error("line {line}: transcription '{transcription_id}' already has a '{intent}' utterance (line {first_line})")]
    DuplicateIntent {
        line: usize,
        transcription_id: String,
        intent: Intent,
        first_line: usize,
    },
    #[error("line {line}: transcription '{transcription_id}' text differs from line {first_line}")]
    TranscriptionConflict {
        line: usize,
        transcription_id: String,
        first_line: usize,
    },
    #[error("line {line}: transcription '{transcription_id}' exceeds {MAX_UTTERANCES_PER_TRANSCRIPTION} utterances")]
    TooManyUtterances {
        line: usize,
        transcription_id: String,
    },
    #[error("invalid corpus: {0}")]
    Invalid(String),
}

/// A record as read, before label parsing: field name to optional string.
struct RawRecord {
    line: usize,
    fields: HashMap<String, Option<String>>,
}

impl RawRecord {
    fn required(&self, field: &str) -> Result<&str, CorpusError> {
        match self.fields.get(field) {
            Some(Some(v)) if !v.trim().is_empty() => Ok(v),
            Some(Some(_)) => Err(CorpusError::BadField {
                line: self.line,
                field: field.into(),
                message: "must not be empty".into(),
            }),
            _ => Err(CorpusError::BadField {
                line: self.line,
                field: field.into(),
                message: "missing required field".into(),
            }),
        }
    }

    fn optional(&self, field: &str) -> Option<String> {
        self.fields
            .get(field)
            .cloned()
            .flatten()
            .filter(|s| !s.is_empty())
    }
}

fn read_json_lines(source: impl BufRead) -> Result<Vec<RawRecord>, CorpusError> {
    let mut out = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: format!("invalid JSON: {e}"),
        })?;
        let Value::Object(obj) = value else {
            return Err(CorpusError::Malformed {
                line: line_no,
                message: "record must be a JSON object".into(),
            });
        };
        out.push(raw_from_object(line_no, obj)?);
    }
    Ok(out)
}

fn raw_from_object(line: usize, obj: Map<String, Value>) -> Result<RawRecord, CorpusError> {
    let mut fields = HashMap::new();
    for (k, v) in obj {
        if !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str()) {
            return Err(CorpusError::BadField {
                line,
                field: k,
                message: "unknown field".into(),
            });
        }
        let v = match v {
            Value::String(s) => Some(s),
            Value::Null => None,
            _ => {
                return Err(CorpusError::BadField {
                    line,
                    field: k,
                    message: "must be a string".into(),
                })
            }
        };
        fields.insert(k, v);
    }
    Ok(RawRecord { line, fields })
}

fn read_delimited(source: impl Read, delimiter: u8) -> Result<Vec<RawRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    for h in &headers {
        if !REQUIRED.contains(&h) && !OPTIONAL.contains(&h) {
            return Err(CorpusError::BadField {
                line: 1,
                field: h.into(),
                message: "unknown column".into(),
            });
        }
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CorpusError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields = headers
            .iter()
            .zip(row.iter())
            .map(|(h, v)| (h.to_string(), Some(v.to_string())))
            .collect();
        out.push(RawRecord { line, fields });
    }
    Ok(out)
}

/// Read, validate and index a corpus. Identical bytes give identical corpora.
pub fn ingest_corpus(source: impl BufRead, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let raw = match format {
        CorpusFormat::JsonLines => read_json_lines(source)?,
        CorpusFormat::Csv => read_delimited(source, b',')?,
        CorpusFormat::Tsv => read_delimited(source, b'\t')?,
    };

    let mut transcriptions: BTreeMap<String, (Transcription, usize)> = BTreeMap::new();
    let mut seen_ids: HashMap<String, usize> = HashMap::new();
    let mut seen_intents: HashMap<(String, Intent), usize> = HashMap::new();
    let mut group_sizes: HashMap<String, usize> = HashMap::new();
    let mut utterances = Vec::with_capacity(raw.len());

    for rec in &raw {
        let line = rec.line;
        let utterance_id = rec.required("utterance_id")?.to_string();
        let transcription_id = rec.required("transcription_id")?.to_string();
        let text = canonical_text(rec.required("transcription_text")?);
        let intent_label = rec.required("intent")?;
        let intent: Intent = intent_label
            .parse()
            .map_err(|_| CorpusError::UnknownLabel {
                line,
                field: "intent".into(),
                value: intent_label.into(),
            })?;
        let particle_label = rec.required("wh_particle")?;
        let wh_particle: WhParticle =
            particle_label
                .parse()
                .map_err(|_| CorpusError::UnknownLabel {
                    line,
                    field: "wh_particle".into(),
                    value: particle_label.into(),
                })?;
        let gold_translation = canonical_text(rec.required("gold_translation")?);

        if let Some(&first_line) = seen_ids.get(&utterance_id) {
            return Err(CorpusError::DuplicateUtteranceId {
                line,
                utterance_id,
                first_line,
            });
        }
        seen_ids.insert(utterance_id.clone(), line);

        if let Some(&first_line) = seen_intents.get(&(transcription_id.clone(), intent)) {
            return Err(CorpusError::DuplicateIntent {
                line,
                transcription_id,
                intent,
                first_line,
            });
        }
        seen_intents.insert((transcription_id.clone(), intent), line);

        match transcriptions.get(&transcription_id) {
            Some((t, first_line)) if t.text != text => {
                return Err(CorpusError::TranscriptionConflict {
                    line,
                    transcription_id,
                    first_line: *first_line,
                });
            }
            Some(_) => {}
            None => {
                transcriptions.insert(
                    transcription_id.clone(),
                    (
                        Transcription {
                            transcription_id: transcription_id.clone(),
                            text,
                        },
                        line,
                    ),
                );
            }
        }

        let size = group_sizes.entry(transcription_id.clone()).or_default();
        *size += 1;
        if *size > MAX_UTTERANCES_PER_TRANSCRIPTION {
            return Err(CorpusError::TooManyUtterances {
                line,
                transcription_id,
            });
        }

        utterances.push(UtteranceRecord {
            utterance_id,
            transcription_id,
            audio_ref: rec.optional("audio_ref"),
            speaker: rec.optional("speaker"),
            intent,
            wh_particle,
            gold_translation,
        });
    }

    let corpus = Corpus::from_parts(transcriptions.into_values().map(|(t, _)| t), utterances);
    if let Some(v) = validate_corpus(&corpus).into_iter().next() {
        return Err(CorpusError::Invalid(v.to_string()));
    }
    Ok(corpus)
}

#[derive(Serialize)]
struct WireUtterance<'a> {
    utterance_id: &'a str,
    transcription_id: &'a str,
    transcription_text: &'a str,
    intent: Intent,
    wh_particle: WhParticle,
    gold_translation: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    audio_ref: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speaker: Option<&'a str>,
}

/// Write `corpus` in the canonical JSON Lines format, utterances in order.
pub fn serialize_corpus(corpus: &Corpus, mut out: impl Write) -> std::io::Result<()> {
    for u in corpus.utterances() {
        let text = corpus
            .transcription(&u.transcription_id)
            .map(|t| t.text.as_str())
            .unwrap_or("");
        let wire = WireUtterance {
            utterance_id: &u.utterance_id,
            transcription_id: &u.transcription_id,
            transcription_text: text,
            intent: u.intent,
            wh_particle: u.wh_particle,
            gold_translation: &u.gold_translation,
            audio_ref: u.audio_ref.as_deref(),
            speaker: u.speaker.as_deref(),
        };
        serde_json::to_writer(&mut out, &wire)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Column names of an upstream delimited release. A `None` id column means
/// ids are synthesized: transcriptions are keyed by their normalized text in
/// order of first appearance (`T00001`, ...) and utterances by row (`U00001`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub utterance_id: Option<String>,
    pub transcription_id: Option<String>,
    pub transcription_text: String,
    pub intent: String,
    pub wh_particle: String,
    pub gold_translation: String,
    pub audio_ref: Option<String>,
    pub speaker: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            utterance_id: Some("utterance_id".into()),
            transcription_id: Some("transcription_id".into()),
            transcription_text: "transcription_text".into(),
            intent: "intent".into(),
            wh_particle: "wh_particle".into(),
            gold_translation: "gold_translation".into(),
            audio_ref: Some("audio_ref".into()),
            speaker: Some("speaker".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConversionReport {
    pub records: usize,
    pub transcriptions: usize,
    /// Number of transcriptions with exactly `k` utterances, keyed by `k`.
    pub utterances_per_transcription: BTreeMap<usize, u64>,
}

/// Convert an upstream delimited file into the canonical format. Intent and
/// particle labels go through the lenient alias tables. The output is
/// re-ingested before returning, so a successful conversion is a valid corpus.
pub fn convert_delimited(
    source: impl Read,
    delimiter: u8,
    columns: &ColumnMap,
    out: impl Write,
) -> Result<(Corpus, ConversionReport), CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::BadField {
                line: 1,
                field: name.into(),
                message: "column not found in header".into(),
            })
    };
    let opt_col = |name: &Option<String>| -> Result<Option<usize>, CorpusError> {
        name.as_deref().map(col).transpose()
    };
    let c_uid = opt_col(&columns.utterance_id)?;
    let c_tid = opt_col(&columns.transcription_id)?;
    let c_text = col(&columns.transcription_text)?;
    let c_intent = col(&columns.intent)?;
    let c_particle = col(&columns.wh_particle)?;
    let c_gold = col(&columns.gold_translation)?;
    let c_audio = opt_col(&columns.audio_ref)?;
    let c_speaker = opt_col(&columns.speaker)?;

    let mut text_ids: HashMap<String, String> = HashMap::new();
    let mut canonical = Vec::new();
    for (row_idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CorpusError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(row_idx + 2);
        let get = |i: usize| row.get(i).unwrap_or("").trim().to_string();
        let text = canonical_text(&get(c_text));
        let intent_raw = get(c_intent);
        let intent = Intent::parse_alias(&intent_raw).ok_or(CorpusError::UnknownLabel {
            line,
            field: columns.intent.clone(),
            value: intent_raw,
        })?;
        let particle_raw = get(c_particle);
        let particle = WhParticle::parse_alias(&particle_raw).ok_or(CorpusError::UnknownLabel {
            line,
            field: columns.wh_particle.clone(),
            value: particle_raw,
        })?;
        let tid = match c_tid {
            Some(i) => get(i),
            None => {
                let next = format!("T{:05}", text_ids.len() + 1);
                text_ids.entry(text.clone()).or_insert(next).clone()
            }
        };
        let uid = match c_uid {
            Some(i) => get(i),
            None => format!("U{:05}", row_idx + 1),
        };
        let mut obj = Map::new();
        obj.insert("utterance_id".into(), Value::String(uid));
        obj.insert("transcription_id".into(), Value::String(tid));
        obj.insert("transcription_text".into(), Value::String(text));
        obj.insert("intent".into(), Value::String(intent.label().into()));
        obj.insert("wh_particle".into(), Value::String(particle.label().into()));
        obj.insert("gold_translation".into(), Value::String(get(c_gold)));
        if let Some(i) = c_audio {
            obj.insert("audio_ref".into(), Value::String(get(i)));
        }
        if let Some(i) = c_speaker {
            obj.insert("speaker".into(), Value::String(get(i)));
        }
        canonical.push(raw_from_object(line, obj)?);
    }

    // Round-trip through the strict reader so conversion cannot emit
    // anything ingestion would reject.
    let mut buf = Vec::new();
    for rec in &canonical {
        let mut obj = Map::new();
        let mut keys: Vec<_> = rec.fields.keys().collect();
        keys.sort();
        for k in keys {
            let v = rec.fields[k]
                .clone()
                .map(Value::String)
                .unwrap_or(Value::Null);
            obj.insert(k.clone(), v);
        }
        serde_json::to_writer(&mut buf, &obj).map_err(std::io::Error::from)?;
        buf.push(b'\n');
    }
    let corpus = ingest_corpus(buf.as_slice(), CorpusFormat::JsonLines)?;
    serialize_corpus(&corpus, out)?;
    let s = stats::corpus_stats(&corpus);
    let report = ConversionReport {
        records: corpus.len(),
        transcriptions: corpus.transcription_count(),
        utterances_per_transcription: s.utterances_per_transcription,
    };
    Ok((corpus, report))
}
