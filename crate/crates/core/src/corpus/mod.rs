//! Corpus of recorded wh-phrase utterances and the contrastive sets built
//! from it.
//!
//! Utterances that share a transcription are prosodic variants of the same
//! words. Every utterance becomes the gold member of one contrastive set whose
//! alternatives are the other utterances of its transcription.

mod io;
mod labels;
mod sets;
mod stats;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

pub use io::{
    convert_delimited, ingest_corpus, serialize_corpus, ColumnMap, ConversionReport, CorpusError,
    CorpusFormat,
};
pub use labels::{Intent, UnknownLabel, WhParticle};
pub use sets::{build_contrastive_sets, Candidate, ContrastiveSet};
pub use stats::{corpus_stats, CorpusStats};
pub use validate::{validate_corpus, Violation};

/// Most utterances one transcription may carry (one gold plus three alternatives).
pub const MAX_UTTERANCES_PER_TRANSCRIPTION: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcription {
    pub transcription_id: String,
    /// NFC-normalized Hangul text, without terminal punctuation in gold form.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtteranceRecord {
    pub utterance_id: String,
    pub transcription_id: String,
    pub audio_ref: Option<String>,
    pub speaker: Option<String>,
    pub intent: Intent,
    pub wh_particle: WhParticle,
    pub gold_translation: String,
}

/// An immutable corpus. Built by [`ingest_corpus`], which guarantees every
/// invariant; [`Corpus::from_parts`] skips the checks so that
/// [`validate_corpus`] has something to report on.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    transcriptions: BTreeMap<String, Transcription>,
    utterances: Vec<UtteranceRecord>,
}

impl Corpus {
    pub fn from_parts(
        transcriptions: impl IntoIterator<Item = Transcription>,
        utterances: Vec<UtteranceRecord>,
    ) -> Corpus {
        let transcriptions = transcriptions
            .into_iter()
            .map(|t| (t.transcription_id.clone(), t))
            .collect();
        Corpus {
            transcriptions,
            utterances,
        }
    }

    pub fn transcriptions(&self) -> impl Iterator<Item = &Transcription> {
        self.transcriptions.values()
    }

    pub fn transcription(&self, id: &str) -> Option<&Transcription> {
        self.transcriptions.get(id)
    }

    /// Utterances in ingestion order.
    pub fn utterances(&self) -> &[UtteranceRecord] {
        &self.utterances
    }

    pub fn utterance(&self, id: &str) -> Option<&UtteranceRecord> {
        self.utterances.iter().find(|u| u.utterance_id == id)
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn transcription_count(&self) -> usize {
        self.transcriptions.len()
    }

    /// Utterances grouped by transcription id, each group in ingestion order.
    pub fn by_transcription(&self) -> BTreeMap<&str, Vec<&UtteranceRecord>> {
        let mut groups: BTreeMap<&str, Vec<&UtteranceRecord>> = BTreeMap::new();
        for u in &self.utterances {
            groups
                .entry(u.transcription_id.as_str())
                .or_default()
                .push(u);
        }
        groups
    }
}

pub(crate) fn canonical_text(s: &str) -> String {
    s.trim().nfc().collect()
}

pub(crate) fn is_nfc(s: &str) -> bool {
    unicode_normalization::is_nfc(s)
}
