use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use super::{is_nfc, Corpus, Intent, MAX_UTTERANCES_PER_TRANSCRIPTION};

/// One broken corpus invariant, naming the records involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyTranscriptionText {
        transcription_id: String,
    },
    NonNfcTranscriptionText {
        transcription_id: String,
    },
    EmptyTranslation {
        utterance_id: String,
    },
    NonNfcTranslation {
        utterance_id: String,
    },
    DuplicateUtteranceId {
        utterance_id: String,
        occurrences: usize,
    },
    DuplicateIntent {
        transcription_id: String,
        intent: Intent,
        utterance_ids: Vec<String>,
    },
    UnknownTranscription {
        utterance_id: String,
        transcription_id: String,
    },
    OrphanTranscription {
        transcription_id: String,
    },
    TooManyUtterances {
        transcription_id: String,
        count: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyTranscriptionText { transcription_id } => {
                write!(f, "transcription '{transcription_id}' has empty text")
            }
            Violation::NonNfcTranscriptionText { transcription_id } => {
                write!(f, "transcription '{transcription_id}' is not NFC-normalized")
            }
            Violation::EmptyTranslation { utterance_id } => {
                write!(f, "utterance '{utterance_id}' has an empty gold translation")
            }
            Violation::NonNfcTranslation { utterance_id } => {
                write!(f, "utterance '{utterance_id}' translation is not NFC-normalized")
            }
            Violation::DuplicateUtteranceId {
                utterance_id,
                occurrences,
            } => write!(f, "utterance id '{utterance_id}' occurs {occurrences} times"),
            Violation::DuplicateIntent {
                transcription_id,
                intent,
                utterance_ids,
            } => write!(
                f,
                "transcription '{transcription_id}' has several '{intent}' utterances: {}",
                utterance_ids.join(", ")
            ),
            Violation::UnknownTranscription {
                utterance_id,
                transcription_id,
            } => write!(
                f,
                "utterance '{utterance_id}' references unknown transcription '{transcription_id}'"
            ),
            Violation::OrphanTranscription { transcription_id } => {
                write!(f, "transcription '{transcription_id}' has no utterances")
            }
            Violation::TooManyUtterances {
                transcription_id,
                count,
            } => write!(
                f,
                "transcription '{transcription_id}' has {count} utterances (at most {MAX_UTTERANCES_PER_TRANSCRIPTION})"
            ),
        }
    }
}

/// Every invariant violation in `corpus`; empty iff the corpus is valid.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();

    for t in corpus.transcriptions() {
        if t.text.trim().is_empty() {
            out.push(Violation::EmptyTranscriptionText {
                transcription_id: t.transcription_id.clone(),
            });
        } else if !is_nfc(&t.text) {
            out.push(Violation::NonNfcTranscriptionText {
                transcription_id: t.transcription_id.clone(),
            });
        }
    }

    let mut id_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for u in corpus.utterances() {
        *id_counts.entry(&u.utterance_id).or_default() += 1;
        if u.gold_translation.trim().is_empty() {
            out.push(Violation::EmptyTranslation {
                utterance_id: u.utterance_id.clone(),
            });
        } else if !is_nfc(&u.gold_translation) {
            out.push(Violation::NonNfcTranslation {
                utterance_id: u.utterance_id.clone(),
            });
        }
        if corpus.transcription(&u.transcription_id).is_none() {
            out.push(Violation::UnknownTranscription {
                utterance_id: u.utterance_id.clone(),
                transcription_id: u.transcription_id.clone(),
            });
        }
    }
    for (id, n) in id_counts {
        if n > 1 {
            out.push(Violation::DuplicateUtteranceId {
                utterance_id: id.to_string(),
                occurrences: n,
            });
        }
    }

    let groups = corpus.by_transcription();
    for (tid, members) in &groups {
        let mut by_intent: HashMap<Intent, Vec<String>> = HashMap::new();
        for u in members {
            by_intent
                .entry(u.intent)
                .or_default()
                .push(u.utterance_id.clone());
        }
        for intent in Intent::ALL {
            if let Some(ids) = by_intent.remove(&intent) {
                if ids.len() > 1 {
                    out.push(Violation::DuplicateIntent {
                        transcription_id: tid.to_string(),
                        intent,
                        utterance_ids: ids,
                    });
                }
            }
        }
        if members.len() > MAX_UTTERANCES_PER_TRANSCRIPTION {
            out.push(Violation::TooManyUtterances {
                transcription_id: tid.to_string(),
                count: members.len(),
            });
        }
    }
    for t in corpus.transcriptions() {
        if !groups.contains_key(t.transcription_id.as_str()) {
            out.push(Violation::OrphanTranscription {
                transcription_id: t.transcription_id.clone(),
            });
        }
    }

    out
}
