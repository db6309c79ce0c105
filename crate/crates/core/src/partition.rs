//! Question-mark experiments: intent-conditioned augmentation, stripping, and
//! the ambiguous/unambiguous split of contrastive sets.
//!
//! A set is unambiguous when the punctuation class of its gold intent is not
//! shared by any alternative, i.e. a correctly punctuated transcription alone
//! identifies the gold translation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ContrastiveSet, Intent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctClass {
    Question,
    NonQuestion,
}

impl PunctClass {
    pub fn label(self) -> &'static str {
        match self {
            PunctClass::Question => "question",
            PunctClass::NonQuestion => "non_question",
        }
    }
}

impl FromStr for PunctClass {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "question" => Ok(PunctClass::Question),
            "non_question" => Ok(PunctClass::NonQuestion),
            other => Err(PartitionError::UnknownClass(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambiguity {
    Ambiguous,
    Unambiguous,
}

impl Ambiguity {
    pub fn label(self) -> &'static str {
        match self {
            Ambiguity::Ambiguous => "ambiguous",
            Ambiguity::Unambiguous => "unambiguous",
        }
    }
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("cannot punctuate an empty transcription")]
    EmptyText,
    #[error("unknown punctuation class '{0}' (expected 'question' or 'non_question')")]
    UnknownClass(String),
    #[error("unknown intent '{0}' in punctuation map")]
    UnknownIntent(String),
    #[error("punctuation map is missing intents: {0}")]
    Incomplete(String),
    #[error("punctuation map is not valid TOML: {0}")]
    Parse(String),
}

/// Total mapping from intent to punctuation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntentPunctuationMap {
    classes: [PunctClass; Intent::COUNT],
}

impl Default for IntentPunctuationMap {
    /// Yes/no, wh- and rhetorical questions take a question mark; statements,
    /// commands, requests and rhetorical commands do not.
    fn default() -> Self {
        let mut classes = [PunctClass::NonQuestion; Intent::COUNT];
        for i in [
            Intent::YesNoQuestion,
            Intent::WhQuestion,
            Intent::RhetoricalQuestion,
        ] {
            classes[i.index()] = PunctClass::Question;
        }
        IntentPunctuationMap { classes }
    }
}

impl IntentPunctuationMap {
    pub fn from_fn(f: impl Fn(Intent) -> PunctClass) -> Self {
        let mut classes = [PunctClass::NonQuestion; Intent::COUNT];
        for i in Intent::ALL {
            classes[i.index()] = f(i);
        }
        IntentPunctuationMap { classes }
    }

    pub fn class(&self, intent: Intent) -> PunctClass {
        self.classes[intent.index()]
    }

    pub fn with(mut self, intent: Intent, class: PunctClass) -> Self {
        self.classes[intent.index()] = class;
        self
    }

    /// Every map that keeps the major intents at their default classes and
    /// assigns the four minor intents freely (16 maps, default first).
    pub fn minor_variants() -> Vec<IntentPunctuationMap> {
        let minor: Vec<Intent> = Intent::ALL.into_iter().filter(|i| !i.is_major()).collect();
        let base = IntentPunctuationMap::default();
        let mut out = vec![base];
        for bits in 0u32..(1 << minor.len()) {
            let m = minor.iter().enumerate().fold(base, |m, (k, &i)| {
                let class = if bits & (1 << k) != 0 {
                    PunctClass::Question
                } else {
                    PunctClass::NonQuestion
                };
                m.with(i, class)
            });
            if m != base {
                out.push(m);
            }
        }
        out
    }

    /// `intent = "class"` lines, all seven intents in enumeration order.
    pub fn to_toml(&self) -> String {
        Intent::ALL
            .iter()
            .map(|i| format!("{} = \"{}\"\n", i.label(), self.class(*i).label()))
            .collect()
    }

    /// Parse a configuration file of `intent = "question" | "non_question"`
    /// pairs. All seven intents must be present.
    pub fn from_toml(src: &str) -> Result<Self, PartitionError> {
        let table: BTreeMap<String, String> =
            toml::from_str(src).map_err(|e| PartitionError::Parse(e.to_string()))?;
        let mut found: [Option<PunctClass>; Intent::COUNT] = [None; Intent::COUNT];
        for (k, v) in &table {
            let intent: Intent = k
                .parse()
                .map_err(|_| PartitionError::UnknownIntent(k.clone()))?;
            found[intent.index()] = Some(v.parse()?);
        }
        let missing: Vec<&str> = Intent::ALL
            .iter()
            .filter(|i| found[i.index()].is_none())
            .map(|i| i.label())
            .collect();
        if !missing.is_empty() {
            return Err(PartitionError::Incomplete(missing.join(", ")));
        }
        Ok(IntentPunctuationMap::from_fn(|i| found[i.index()].unwrap()))
    }
}

impl Serialize for IntentPunctuationMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(Intent::COUNT))?;
        for i in Intent::ALL {
            m.serialize_entry(i.label(), &self.class(i))?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for IntentPunctuationMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<Intent, PunctClass> = BTreeMap::deserialize(d)?;
        if raw.len() != Intent::COUNT {
            return Err(serde::de::Error::custom(
                "punctuation map must cover all seven intents",
            ));
        }
        Ok(IntentPunctuationMap::from_fn(|i| raw[&i]))
    }
}

pub fn punctuation_class(intent: Intent, map: &IntentPunctuationMap) -> PunctClass {
    map.class(intent)
}

fn is_question_mark(c: char) -> bool {
    c == '?' || c == '？'
}

/// Append `?` when the intent's class is question and the text does not
/// already end in a question mark. Idempotent.
pub fn augment_transcription(
    text: &str,
    intent: Intent,
    map: &IntentPunctuationMap,
) -> Result<String, PartitionError> {
    if text.trim().is_empty() {
        return Err(PartitionError::EmptyText);
    }
    let ends_with_mark = text.trim_end().chars().last().is_some_and(is_question_mark);
    if map.class(intent) == PunctClass::Question && !ends_with_mark {
        Ok(format!("{}?", text.trim_end()))
    } else {
        Ok(text.to_string())
    }
}

/// Remove every ASCII and fullwidth question mark, then trim trailing
/// whitespace. Idempotent.
pub fn strip_question_marks(text: &str) -> String {
    let mut s: String = text.chars().filter(|&c| !is_question_mark(c)).collect();
    s.truncate(s.trim_end().len());
    s
}

/// Unambiguous iff the gold class is not shared by any alternative. Sets with
/// no alternatives are unambiguous.
pub fn classify_set(set: &ContrastiveSet, map: &IntentPunctuationMap) -> Ambiguity {
    classify_intents(
        set.gold.intent,
        set.alternatives.iter().map(|c| c.intent),
        map,
    )
}

pub fn classify_intents(
    gold: Intent,
    alternatives: impl IntoIterator<Item = Intent>,
    map: &IntentPunctuationMap,
) -> Ambiguity {
    let gold_class = map.class(gold);
    if alternatives.into_iter().any(|a| map.class(a) == gold_class) {
        Ambiguity::Ambiguous
    } else {
        Ambiguity::Unambiguous
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCounts {
    pub ambiguous: u64,
    pub unambiguous: u64,
}

impl PartitionCounts {
    pub fn total(&self) -> u64 {
        self.ambiguous + self.unambiguous
    }
}

pub fn partition_counts(sets: &[ContrastiveSet], map: &IntentPunctuationMap) -> PartitionCounts {
    let mut c = PartitionCounts::default();
    for s in sets {
        match classify_set(s, map) {
            Ambiguity::Ambiguous => c.ambiguous += 1,
            Ambiguity::Unambiguous => c.unambiguous += 1,
        }
    }
    c
}
