//! Score wire format: UTF-8 JSON Lines, one record per (system, set, candidate).
//!
//! ```text
//! {"system_id":"whisper-medium-direct","set_id":"u1","candidate_id":"u3","token_logprobs":[-0.1,-0.7]}
//! ```
//!
//! `token_texts` (array of strings, same length as `token_logprobs`) may be
//! present for debugging. Log-probabilities are natural-log and must be
//! finite and at most `LOGPROB_SLACK`. A line with `"record_type":"header"`
//! carries adapter provenance and is kept verbatim; score lines may carry
//! `"record_type":"score"` or omit the field.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::ScoreError;

/// Largest accepted log-probability; anything above is not a probability.
pub const LOGPROB_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub system_id: String,
    pub set_id: String,
    pub candidate_id: String,
    pub token_logprobs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_texts: Option<Vec<String>>,
}

/// Adapter header line: the full scorer configuration, echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreHeader {
    pub system_id: Option<String>,
    pub fields: Map<String, Value>,
}

impl ScoreHeader {
    /// Looks up `key` at the top level, then inside a `config` object.
    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.fields
            .get(key)
            .or_else(|| self.fields.get("config").and_then(|c| c.get(key)))
            .and_then(Value::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreFile {
    pub headers: Vec<ScoreHeader>,
    pub records: Vec<ScoreRecord>,
}

impl ScoreFile {
    pub fn header_for(&self, system_id: &str) -> Option<&ScoreHeader> {
        self.headers
            .iter()
            .find(|h| h.system_id.as_deref() == Some(system_id))
            .or_else(|| {
                (self.headers.len() == 1 && self.headers[0].system_id.is_none())
                    .then(|| &self.headers[0])
            })
    }

    /// Distinct system ids in first-appearance order.
    pub fn system_ids(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.system_id) {
                out.push(r.system_id.clone());
            }
        }
        out
    }
}

fn check_record(line: usize, r: &ScoreRecord) -> Result<(), ScoreError> {
    let bad = |message: String| ScoreError::BadRecord { line, message };
    if r.token_logprobs.is_empty() {
        return Err(bad("token_logprobs must not be empty".into()));
    }
    for (i, &lp) in r.token_logprobs.iter().enumerate() {
        if !lp.is_finite() {
            return Err(bad(format!("token_logprobs[{i}] is not finite")));
        }
        if lp > LOGPROB_SLACK {
            return Err(bad(format!("token_logprobs[{i}] = {lp} is positive")));
        }
    }
    if let Some(t) = &r.token_texts {
        if t.len() != r.token_logprobs.len() {
            return Err(bad(format!(
                "token_texts has {} entries but token_logprobs has {}",
                t.len(),
                r.token_logprobs.len()
            )));
        }
    }
    Ok(())
}

/// Parse a score file. Rejects duplicate (system, set, candidate) triples.
pub fn read_scores(source: impl BufRead) -> Result<ScoreFile, ScoreError> {
    let mut file = ScoreFile::default();
    let mut seen: HashMap<(String, String, String), usize> = HashMap::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| ScoreError::BadRecord {
            line: line_no,
            message: format!("invalid JSON: {e}"),
        })?;
        let Value::Object(mut obj) = value else {
            return Err(ScoreError::BadRecord {
                line: line_no,
                message: "record must be a JSON object".into(),
            });
        };
        match obj.remove("record_type") {
            Some(Value::String(t)) if t == "header" => {
                let system_id = obj
                    .get("system_id")
                    .and_then(Value::as_str)
                    .map(String::from);
                file.headers.push(ScoreHeader {
                    system_id,
                    fields: obj,
                });
                continue;
            }
            None => {}
            Some(Value::String(t)) if t == "score" => {}
            Some(other) => {
                return Err(ScoreError::BadRecord {
                    line: line_no,
                    message: format!("unknown record_type {other}"),
                })
            }
        }
        let rec: ScoreRecord =
            serde_json::from_value(Value::Object(obj)).map_err(|e| ScoreError::BadRecord {
                line: line_no,
                message: e.to_string(),
            })?;
        check_record(line_no, &rec)?;
        let key = (
            rec.system_id.clone(),
            rec.set_id.clone(),
            rec.candidate_id.clone(),
        );
        if let Some(&first_line) = seen.get(&key) {
            return Err(ScoreError::DuplicateRecord {
                line: line_no,
                first_line,
                system_id: key.0,
                set_id: key.1,
                candidate_id: key.2,
            });
        }
        seen.insert(key, line_no);
        file.records.push(rec);
    }
    Ok(file)
}

pub fn write_scores(file: &ScoreFile, mut out: impl Write) -> std::io::Result<()> {
    for h in &file.headers {
        let mut obj = Map::new();
        obj.insert("record_type".into(), Value::String("header".into()));
        for (k, v) in &h.fields {
            obj.insert(k.clone(), v.clone());
        }
        serde_json::to_writer(&mut out, &obj)?;
        out.write_all(b"\n")?;
    }
    for r in &file.records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
