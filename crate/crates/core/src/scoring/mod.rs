//! Length-normalized candidate scoring and per-set ranking.
//!
//! A candidate's score is the mean of its target-token log-probabilities. The
//! gold candidate counts as identified only when its score is strictly higher
//! than every alternative's; any tie goes against the system.

mod wire;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ContrastiveSet, Intent};
use crate::partition::{classify_set, Ambiguity, IntentPunctuationMap};
use crate::scalar::{compensated_sum, Scalar};

pub use wire::{read_scores, write_scores, ScoreFile, ScoreHeader, ScoreRecord, LOGPROB_SLACK};

/// Tie policy echoed into report configuration blocks.
pub const TIE_POLICY: &str = "ties_count_as_incorrect";

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("failed reading scores: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("line {line}: duplicate record for system '{system_id}', set '{set_id}', candidate '{candidate_id}' (first on line {first_line})")]
    DuplicateRecord {
        line: usize,
        first_line: usize,
        system_id: String,
        set_id: String,
        candidate_id: String,
    },
    #[error("cannot score an empty token sequence")]
    EmptySequence,
    #[error("token log-probability at position {0} is not finite")]
    NonFinite(usize),
    #[error("system '{system_id}': missing score records for {}", format_pairs(.missing))]
    MissingRecords {
        system_id: String,
        missing: Vec<(String, String)>,
    },
    #[error("system '{system_id}': score records do not match any set candidate: {}", format_pairs(.unexpected))]
    UnexpectedRecords {
        system_id: String,
        unexpected: Vec<(String, String)>,
    },
    #[error("records belong to system '{found}', expected '{expected}'")]
    WrongSystem { expected: String, found: String },
    #[error("no score records for system '{0}'")]
    UnknownSystem(String),
}

/// (set id, candidate id)
type Pair = (String, String);

fn format_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(s, c)| format!("(set {s}, candidate {c})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Mean of the token log-probabilities, summed with compensation.
pub fn normalized_score<T: Scalar>(token_logprobs: &[T]) -> Result<T, ScoreError> {
    if token_logprobs.is_empty() {
        return Err(ScoreError::EmptySequence);
    }
    if let Some(i) = token_logprobs.iter().position(|x| !x.is_finite()) {
        return Err(ScoreError::NonFinite(i));
    }
    let n = T::from_count(token_logprobs.len() as u64);
    Ok(compensated_sum(token_logprobs.iter().copied()) / n)
}

/// Token log-probabilities of one system, indexed by set then candidate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemScores {
    system_id: String,
    by_set: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

impl SystemScores {
    pub fn from_records<'a>(
        system_id: &str,
        records: impl IntoIterator<Item = &'a ScoreRecord>,
    ) -> Result<SystemScores, ScoreError> {
        let mut by_set: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
        for r in records {
            if r.system_id != system_id {
                return Err(ScoreError::WrongSystem {
                    expected: system_id.into(),
                    found: r.system_id.clone(),
                });
            }
            let slot = by_set.entry(r.set_id.clone()).or_default();
            if slot
                .insert(r.candidate_id.clone(), r.token_logprobs.clone())
                .is_some()
            {
                return Err(ScoreError::DuplicateRecord {
                    line: 0,
                    first_line: 0,
                    system_id: system_id.into(),
                    set_id: r.set_id.clone(),
                    candidate_id: r.candidate_id.clone(),
                });
            }
        }
        Ok(SystemScores {
            system_id: system_id.into(),
            by_set,
        })
    }

    /// The records of `system_id` inside a score file.
    pub fn from_file(file: &ScoreFile, system_id: &str) -> Result<SystemScores, ScoreError> {
        let scores = Self::from_records(
            system_id,
            file.records.iter().filter(|r| r.system_id == system_id),
        )?;
        if scores.by_set.is_empty() {
            return Err(ScoreError::UnknownSystem(system_id.into()));
        }
        Ok(scores)
    }

    pub fn system_id(&self) -> &str {
        &self.system_id
    }

    pub fn get(&self, set_id: &str, candidate_id: &str) -> Option<&[f64]> {
        self.by_set
            .get(set_id)?
            .get(candidate_id)
            .map(Vec::as_slice)
    }

    fn set_records(&self, set_id: &str) -> impl Iterator<Item = &String> {
        self.by_set.get(set_id).into_iter().flat_map(|m| m.keys())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CandidateScore<T> {
    pub candidate_id: String,
    pub intent: Intent,
    pub is_gold: bool,
    pub score: T,
}

/// Ranking result of one set under one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SetOutcome<T> {
    pub set_id: String,
    pub system_id: String,
    /// Gold first, then alternatives in intent order.
    pub candidates: Vec<CandidateScore<T>>,
    pub predicted_candidate_id: String,
    pub gold_candidate_id: String,
    pub correct: bool,
    pub gold_intent: Intent,
    pub predicted_intent: Intent,
    pub ambiguity: Ambiguity,
    pub singleton: bool,
}

impl<T: Scalar> SetOutcome<T> {
    pub fn alternative_intents(&self) -> impl Iterator<Item = Intent> + '_ {
        self.candidates
            .iter()
            .filter(|c| !c.is_gold)
            .map(|c| c.intent)
    }
}

fn check_set_records(set: &ContrastiveSet, scores: &SystemScores) -> (Vec<Pair>, Vec<Pair>) {
    let missing = set
        .candidates()
        .filter(|c| scores.get(&set.set_id, &c.candidate_id).is_none())
        .map(|c| (set.set_id.clone(), c.candidate_id.clone()))
        .collect();
    let unexpected = scores
        .set_records(&set.set_id)
        .filter(|cid| set.candidate(cid).is_none())
        .map(|cid| (set.set_id.clone(), cid.clone()))
        .collect();
    (missing, unexpected)
}

/// Rank the candidates of `set`. The gold is predicted iff its score is
/// strictly greater than every alternative's; otherwise the best-scoring
/// alternative is predicted, ties broken by intent enumeration order.
pub fn evaluate_set<T: Scalar>(
    set: &ContrastiveSet,
    scores: &SystemScores,
    map: &IntentPunctuationMap,
) -> Result<SetOutcome<T>, ScoreError> {
    let (missing, unexpected) = check_set_records(set, scores);
    if !missing.is_empty() {
        return Err(ScoreError::MissingRecords {
            system_id: scores.system_id.clone(),
            missing,
        });
    }
    if !unexpected.is_empty() {
        return Err(ScoreError::UnexpectedRecords {
            system_id: scores.system_id.clone(),
            unexpected,
        });
    }
    rank(set, scores, map)
}

fn rank<T: Scalar>(
    set: &ContrastiveSet,
    scores: &SystemScores,
    map: &IntentPunctuationMap,
) -> Result<SetOutcome<T>, ScoreError> {
    let mut candidates = Vec::with_capacity(set.size());
    for c in set.candidates() {
        let lps: Vec<T> = scores
            .get(&set.set_id, &c.candidate_id)
            .expect("completeness checked")
            .iter()
            .map(|&x| T::from_f64(x).unwrap_or_else(T::nan))
            .collect();
        candidates.push(CandidateScore {
            candidate_id: c.candidate_id.clone(),
            intent: c.intent,
            is_gold: c.candidate_id == set.gold.candidate_id,
            score: normalized_score(&lps)?,
        });
    }

    let gold = &candidates[0];
    let best_alt = candidates[1..]
        .iter()
        .fold(None::<&CandidateScore<T>>, |best, c| match best {
            None => Some(c),
            Some(b) if c.score > b.score || (c.score == b.score && c.intent < b.intent) => Some(c),
            Some(b) => Some(b),
        });
    let predicted = match best_alt {
        Some(alt) if alt.score >= gold.score => alt,
        _ => gold,
    };

    Ok(SetOutcome {
        set_id: set.set_id.clone(),
        system_id: scores.system_id.clone(),
        predicted_candidate_id: predicted.candidate_id.clone(),
        predicted_intent: predicted.intent,
        gold_candidate_id: gold.candidate_id.clone(),
        gold_intent: gold.intent,
        correct: predicted.is_gold,
        ambiguity: classify_set(set, map),
        singleton: set.is_singleton(),
        candidates,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Set ids excluded from evaluation; their records may be absent.
    pub skip: BTreeSet<String>,
    /// Worker threads; 0 or 1 evaluates sequentially.
    pub jobs: usize,
}

/// Evaluate every non-skipped set. All missing (set, candidate) pairs are
/// reported together. Output is sorted by set id and does not depend on the
/// input order or the number of workers.
pub fn evaluate_system<T: Scalar>(
    sets: &[ContrastiveSet],
    scores: &SystemScores,
    map: &IntentPunctuationMap,
    options: &EvalOptions,
) -> Result<Vec<SetOutcome<T>>, ScoreError> {
    let active: Vec<&ContrastiveSet> = sets
        .iter()
        .filter(|s| !options.skip.contains(&s.set_id))
        .collect();

    let mut missing = Vec::new();
    let mut unexpected = Vec::new();
    for s in &active {
        let (m, u) = check_set_records(s, scores);
        missing.extend(m);
        unexpected.extend(u);
    }
    let known: BTreeSet<&str> = sets.iter().map(|s| s.set_id.as_str()).collect();
    for (set_id, cands) in &scores.by_set {
        if !known.contains(set_id.as_str()) {
            unexpected.extend(cands.keys().map(|c| (set_id.clone(), c.clone())));
        }
    }
    missing.sort();
    unexpected.sort();
    if !missing.is_empty() {
        return Err(ScoreError::MissingRecords {
            system_id: scores.system_id.clone(),
            missing,
        });
    }
    if !unexpected.is_empty() {
        return Err(ScoreError::UnexpectedRecords {
            system_id: scores.system_id.clone(),
            unexpected,
        });
    }

    let mut outcomes: Vec<SetOutcome<T>> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            active
                .par_iter()
                .map(|s| rank(s, scores, map))
                .collect::<Result<_, _>>()
        })?
    } else {
        active
            .iter()
            .map(|s| rank(s, scores, map))
            .collect::<Result<_, _>>()?
    };
    outcomes.sort_by(|a, b| a.set_id.cmp(&b.set_id));
    Ok(outcomes)
}
