//! Deterministic fixtures: the three-reading example transcription, seeded
//! synthetic corpora, and mock score files with known outcomes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::corpus::{
    ContrastiveSet, Corpus, Intent, Transcription, UtteranceRecord, WhParticle,
    MAX_UTTERANCES_PER_TRANSCRIPTION,
};
use crate::scoring::{ScoreFile, ScoreHeader, ScoreRecord};

/// One transcription read as a statement, a yes/no question and a wh-question.
pub fn figure1_corpus() -> Corpus {
    let utt = |id: &str, intent, translation: &str| UtteranceRecord {
        utterance_id: id.into(),
        transcription_id: "t1".into(),
        audio_ref: Some(format!("audio/{id}.wav")),
        speaker: None,
        intent,
        wh_particle: WhParticle::Who,
        gold_translation: translation.into(),
    };
    Corpus::from_parts(
        [Transcription {
            transcription_id: "t1".into(),
            text: "누가 가입했대요".into(),
        }],
        vec![
            utt("u1", Intent::Statement, "I heard somebody is joining in."),
            utt("u2", Intent::YesNoQuestion, "Has somebody joined in?"),
            utt("u3", Intent::WhQuestion, "Who joined in?"),
        ],
    )
}

const STEMS: [&str; 8] = [
    "가입했대요",
    "갔어요",
    "왔어요",
    "먹었어요",
    "샀대요",
    "봤어요",
    "만났대요",
    "들었어요",
];

fn translation(intent: Intent, particle: WhParticle, k: usize) -> String {
    let p = particle.label().replace('_', " ");
    match intent {
        Intent::Statement => format!("I heard some {p} thing {k} happened."),
        Intent::YesNoQuestion => format!("Did some {p} thing {k} happen?"),
        Intent::WhQuestion => format!("{p} did thing {k} happen?"),
        Intent::RhetoricalQuestion => format!("Who cares {p} thing {k} happened?"),
        Intent::Command => format!("Do thing {k} {p}."),
        Intent::Request => format!("Please do thing {k} {p}."),
        Intent::RhetoricalCommand => format!("Go on, do thing {k} {p} then."),
    }
}

/// A seeded corpus of `transcriptions` transcriptions with 1–4 utterances
/// each and pairwise-distinct intents. The first seven transcriptions cover
/// every intent and every group size, so any `transcriptions >= 7` corpus
/// contains all seven intents and sets of sizes 1 through 4.
pub fn synthetic_corpus(transcriptions: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ts = Vec::with_capacity(transcriptions);
    let mut us = Vec::new();
    for t in 0..transcriptions {
        let tid = format!("t{t:04}");
        let particle = *WhParticle::ALL.choose(&mut rng).unwrap();
        let size = match t {
            0..=3 => t + 1,
            _ => rng.gen_range(1..=MAX_UTTERANCES_PER_TRANSCRIPTION),
        };
        let mut intents = Intent::ALL.to_vec();
        intents.shuffle(&mut rng);
        if t < 7 {
            // Put intent t first so the leading transcriptions cover all seven.
            let pos = intents.iter().position(|&i| i.index() == t).unwrap();
            intents.swap(0, pos);
        }
        ts.push(Transcription {
            transcription_id: tid.clone(),
            text: format!("{} {}", particle.hangul(), STEMS[t % STEMS.len()]),
        });
        for (j, &intent) in intents.iter().take(size).enumerate() {
            us.push(UtteranceRecord {
                utterance_id: format!("u{t:04}_{j}"),
                transcription_id: tid.clone(),
                audio_ref: Some(format!("audio/u{t:04}_{j}.wav")),
                speaker: Some(if (t + j) % 2 == 0 { "F" } else { "M" }.into()),
                intent,
                wh_particle: particle,
                gold_translation: translation(intent, particle, t),
            });
        }
    }
    Corpus::from_parts(ts, us)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockPolicy {
    /// Gold strictly highest mean.
    Oracle,
    /// Gold strictly lowest mean.
    Adversarial,
    /// Per-candidate log-probabilities from a seeded generator.
    SeededRandom(u64),
}

impl MockPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            MockPolicy::Oracle => "oracle",
            MockPolicy::Adversarial => "adversarial",
            MockPolicy::SeededRandom(_) => "seeded_random",
        }
    }
}

/// A score file for `sets` with a leading header record. Fully determined by
/// the sets, the system id and the policy.
pub fn mock_scores(sets: &[ContrastiveSet], system_id: &str, policy: MockPolicy) -> ScoreFile {
    let mut fields = Map::new();
    fields.insert("system_id".into(), Value::String(system_id.into()));
    let mut config = json!({"kind": "mock", "mock_policy": policy.label()});
    if let MockPolicy::SeededRandom(seed) = policy {
        config["seed"] = json!(seed);
    }
    fields.insert("config".into(), config);
    let header = ScoreHeader {
        system_id: Some(system_id.into()),
        fields,
    };

    let mut rng = match policy {
        MockPolicy::SeededRandom(seed) => ChaCha8Rng::seed_from_u64(seed),
        _ => ChaCha8Rng::seed_from_u64(0),
    };
    let mut records = Vec::new();
    for set in sets {
        for (rank, c) in set.candidates().enumerate() {
            let n_tokens = 2 + c.translation_text.split_whitespace().count().min(6);
            let token_logprobs = match policy {
                MockPolicy::Oracle if rank == 0 => vec![-0.25; n_tokens],
                MockPolicy::Oracle => vec![-1.0 - 0.5 * rank as f64; n_tokens],
                MockPolicy::Adversarial if rank == 0 => vec![-4.0; n_tokens],
                MockPolicy::Adversarial => vec![-1.0 - 0.25 * rank as f64; n_tokens],
                MockPolicy::SeededRandom(_) => {
                    (0..n_tokens).map(|_| -rng.gen_range(0.0..5.0)).collect()
                }
            };
            records.push(ScoreRecord {
                system_id: system_id.into(),
                set_id: set.set_id.clone(),
                candidate_id: c.candidate_id.clone(),
                token_logprobs,
                token_texts: None,
            });
        }
    }
    ScoreFile {
        headers: vec![header],
        records,
    }
}
