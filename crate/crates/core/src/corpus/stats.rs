use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Corpus, Intent, WhParticle, MAX_UTTERANCES_PER_TRANSCRIPTION};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_utterances: u64,
    pub distinct_transcriptions: u64,
    pub per_intent: BTreeMap<Intent, u64>,
    pub per_particle: BTreeMap<WhParticle, u64>,
    /// Number of transcriptions carrying exactly `k` utterances, keyed by `k`.
    pub utterances_per_transcription: BTreeMap<usize, u64>,
}

impl CorpusStats {
    pub fn intent(&self, i: Intent) -> u64 {
        self.per_intent.get(&i).copied().unwrap_or(0)
    }

    pub fn particle(&self, p: WhParticle) -> u64 {
        self.per_particle.get(&p).copied().unwrap_or(0)
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut per_intent: BTreeMap<Intent, u64> = Intent::ALL.iter().map(|&i| (i, 0)).collect();
    let mut per_particle: BTreeMap<WhParticle, u64> =
        WhParticle::ALL.iter().map(|&p| (p, 0)).collect();
    for u in corpus.utterances() {
        *per_intent.get_mut(&u.intent).unwrap() += 1;
        *per_particle.get_mut(&u.wh_particle).unwrap() += 1;
    }

    let mut utterances_per_transcription: BTreeMap<usize, u64> = (1
        ..=MAX_UTTERANCES_PER_TRANSCRIPTION)
        .map(|k| (k, 0))
        .collect();
    for members in corpus.by_transcription().values() {
        *utterances_per_transcription
            .entry(members.len())
            .or_default() += 1;
    }

    CorpusStats {
        total_utterances: corpus.len() as u64,
        distinct_transcriptions: corpus.transcription_count() as u64,
        per_intent,
        per_particle,
        utterances_per_transcription,
    }
}
