use serde::{Deserialize, Serialize};

use super::{Corpus, Intent, UtteranceRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// Equal to the id of the utterance that supplied the translation.
    pub candidate_id: String,
    pub translation_text: String,
    pub intent: Intent,
    pub source_utterance_id: String,
}

impl Candidate {
    fn from_utterance(u: &UtteranceRecord) -> Candidate {
        Candidate {
            candidate_id: u.utterance_id.clone(),
            translation_text: u.gold_translation.clone(),
            intent: u.intent,
            source_utterance_id: u.utterance_id.clone(),
        }
    }
}

/// A gold translation plus the translations of the other prosodic readings of
/// the same transcription. This is also the line format written by
/// `build-sets` for scorer adapters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContrastiveSet {
    /// Equal to the gold utterance id.
    pub set_id: String,
    pub gold_utterance_id: String,
    pub transcription_id: String,
    pub transcription_text: String,
    /// Audio of the gold utterance; adapters condition on it.
    pub audio_ref: Option<String>,
    pub gold: Candidate,
    /// Ordered by intent enumeration order.
    pub alternatives: Vec<Candidate>,
}

impl ContrastiveSet {
    /// 1 + number of alternatives.
    pub fn size(&self) -> usize {
        1 + self.alternatives.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn candidates(&self) -> impl Iterator<Item = &Candidate> {
        std::iter::once(&self.gold).chain(self.alternatives.iter())
    }

    pub fn candidate(&self, id: &str) -> Option<&Candidate> {
        self.candidates().find(|c| c.candidate_id == id)
    }

    pub fn alternative_intents(&self) -> Vec<Intent> {
        self.alternatives.iter().map(|c| c.intent).collect()
    }
}

/// One set per utterance, in corpus order. Transcriptions with a single
/// utterance yield singleton sets (no alternatives) rather than errors.
pub fn build_contrastive_sets(corpus: &Corpus) -> Vec<ContrastiveSet> {
    let groups = corpus.by_transcription();
    corpus
        .utterances()
        .iter()
        .map(|gold| {
            let mut alternatives: Vec<Candidate> = groups
                .get(gold.transcription_id.as_str())
                .into_iter()
                .flatten()
                .filter(|u| u.utterance_id != gold.utterance_id)
                .map(|u| Candidate::from_utterance(u))
                .collect();
            alternatives.sort_by(|a, b| {
                a.intent
                    .cmp(&b.intent)
                    .then_with(|| a.candidate_id.cmp(&b.candidate_id))
            });
            ContrastiveSet {
                set_id: gold.utterance_id.clone(),
                gold_utterance_id: gold.utterance_id.clone(),
                transcription_id: gold.transcription_id.clone(),
                transcription_text: corpus
                    .transcription(&gold.transcription_id)
                    .map(|t| t.text.clone())
                    .unwrap_or_default(),
                audio_ref: gold.audio_ref.clone(),
                gold: Candidate::from_utterance(gold),
                alternatives,
            }
        })
        .collect()
}
