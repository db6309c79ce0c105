//! File-level glue used by the command-line tool: load inputs, run an
//! evaluation per system, and read or write the intermediate artifacts.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{
    build_contrastive_sets, ingest_corpus, serialize_corpus, ContrastiveSet, Corpus, CorpusError,
    CorpusFormat,
};
use crate::metrics::{profiles, PartitionFilter, SingletonPolicy};
use crate::partition::{
    augment_transcription, classify_set, partition_counts, Ambiguity, IntentPunctuationMap,
    PartitionCounts, PartitionError,
};
use crate::report::{
    baseline_table, build_report, BaselineTable, EvaluationReport, ReportConfig, ReportError,
    SystemInfo,
};
use crate::scalar::Scalar;
use crate::scoring::{
    evaluate_system, read_scores, EvalOptions, ScoreError, ScoreFile, SetOutcome, SystemScores,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("scoring: {0}")]
    Scoring(#[from] ScoreError),
    #[error("partition: {0}")]
    Partition(#[from] PartitionError),
    #[error("report: {0}")]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("outcomes line {line}: {message}")]
    Outcomes { line: usize, message: String },
    #[error("score file has no records")]
    NoSystems,
}

fn open(path: &Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })
}

/// Ingest a corpus, choosing the format from the file extension.
pub fn load_corpus(path: &Path) -> Result<Corpus, PipelineError> {
    Ok(ingest_corpus(open(path)?, CorpusFormat::from_path(path))?)
}

pub fn load_scores(path: &Path) -> Result<ScoreFile, PipelineError> {
    Ok(read_scores(open(path)?)?)
}

/// Default map when `path` is `None`.
pub fn load_punct_map(path: Option<&Path>) -> Result<IntentPunctuationMap, PipelineError> {
    let Some(path) = path else {
        return Ok(IntentPunctuationMap::default());
    };
    let src = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(IntentPunctuationMap::from_toml(&src)?)
}

/// `sha256:` plus the hex digest of the canonical JSON Lines serialization.
/// Independent of the input format and of record order within the file as
/// long as the utterance order is the same.
pub fn corpus_fingerprint(corpus: &Corpus) -> String {
    let mut buf = Vec::new();
    serialize_corpus(corpus, &mut buf).expect("writing to memory");
    format!("sha256:{}", hex::encode(Sha256::digest(&buf)))
}

/// One line of `build-sets` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetLine {
    #[serde(flatten)]
    pub set: ContrastiveSet,
    pub ambiguity: Ambiguity,
    pub singleton: bool,
    /// Transcription with a `?` appended when the gold intent's class is question.
    pub augmented_transcription: String,
}

pub fn set_lines(
    sets: &[ContrastiveSet],
    map: &IntentPunctuationMap,
) -> Result<Vec<SetLine>, PipelineError> {
    sets.iter()
        .map(|s| {
            Ok(SetLine {
                ambiguity: classify_set(s, map),
                singleton: s.is_singleton(),
                augmented_transcription: augment_transcription(
                    &s.transcription_text,
                    s.gold.intent,
                    map,
                )?,
                set: s.clone(),
            })
        })
        .collect()
}

pub fn write_jsonl<S: Serialize>(items: &[S], mut out: impl Write) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<S: Serialize>(value: &S, mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
}

fn header_value(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// System description from the score file header, if any.
pub fn system_info(file: &ScoreFile, system_id: &str) -> SystemInfo {
    let mut info = SystemInfo::new(system_id);
    if let Some(h) = file.header_for(system_id) {
        let get = |key: &str| {
            h.fields
                .get(key)
                .or_else(|| h.fields.get("config").and_then(|c| c.get(key)))
                .and_then(header_value)
        };
        info.kind = get("kind");
        info.model_size = get("model_size");
        info.punctuation_mode = get("punctuation_mode");
        info.header = Some(h.fields.clone());
    }
    info
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvaluateOptions {
    pub map: IntentPunctuationMap,
    pub singletons: SingletonPolicy,
    pub skip: BTreeSet<String>,
    pub jobs: usize,
    /// Systems to evaluate; all systems in the score file when empty.
    pub systems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemRun<T> {
    pub report: EvaluationReport<T>,
    pub outcomes: Vec<SetOutcome<T>>,
}

/// Evaluate each system of a score file against the corpus.
pub fn run_evaluate<T: Scalar>(
    corpus: &Corpus,
    scores: &ScoreFile,
    opts: &EvaluateOptions,
) -> Result<Vec<SystemRun<T>>, PipelineError> {
    let systems = if opts.systems.is_empty() {
        scores.system_ids()
    } else {
        opts.systems.clone()
    };
    if systems.is_empty() {
        return Err(PipelineError::NoSystems);
    }
    let sets = build_contrastive_sets(corpus);
    let fingerprint = corpus_fingerprint(corpus);
    let eval = EvalOptions {
        skip: opts.skip.clone(),
        jobs: opts.jobs,
    };
    let mut runs = Vec::with_capacity(systems.len());
    for id in systems {
        let s = SystemScores::from_file(scores, &id)?;
        let outcomes = evaluate_system::<T>(&sets, &s, &opts.map, &eval)?;
        let mut config = ReportConfig::new::<T>(opts.map, opts.singletons);
        config.skipped_sets = opts.skip.iter().cloned().collect();
        let report = build_report(
            &outcomes,
            system_info(scores, &id),
            fingerprint.clone(),
            config,
        )?;
        runs.push(SystemRun { report, outcomes });
    }
    Ok(runs)
}

pub fn write_outcomes<T: Scalar>(
    outcomes: &[SetOutcome<T>],
    out: impl Write,
) -> std::io::Result<()> {
    write_jsonl(outcomes, out)
}

pub fn read_outcomes<T: Scalar>(source: impl BufRead) -> Result<Vec<SetOutcome<T>>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.map_err(|e| PipelineError::Outcomes {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| PipelineError::Outcomes {
                line: i + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(out)
}

pub fn read_report<T: Scalar>(path: &Path) -> Result<EvaluationReport<T>, PipelineError> {
    serde_json::from_reader(open(path)?).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e.into(),
    })
}

pub fn load_outcomes<T: Scalar>(path: &Path) -> Result<Vec<SetOutcome<T>>, PipelineError> {
    read_outcomes(open(path)?)
}

/// Rebuild a report from its outcomes and configuration echo. Returns the
/// rebuilt report; equality with `report` means every number re-derives.
pub fn rebuild_report<T: Scalar>(
    report: &EvaluationReport<T>,
    outcomes: &[SetOutcome<T>],
) -> Result<EvaluationReport<T>, PipelineError> {
    let mut rebuilt = build_report(
        outcomes,
        report.system.clone(),
        report.corpus_fingerprint.clone(),
        report.config.clone(),
    )?;
    rebuilt.generated_at_unix = report.generated_at_unix;
    Ok(rebuilt)
}

/// Closed-form baselines for every partition, without any scores.
pub fn run_baselines<T: Scalar>(
    corpus: &Corpus,
    map: IntentPunctuationMap,
    singletons: SingletonPolicy,
    partitions: &[PartitionFilter],
) -> BaselineTable<T> {
    let sets = build_contrastive_sets(corpus);
    baseline_table(
        &profiles(&sets, &map),
        partitions,
        singletons,
        map,
        corpus_fingerprint(corpus),
    )
}

/// Partition sizes under one candidate map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCandidate {
    pub map: IntentPunctuationMap,
    pub counts: PartitionCounts,
    /// |ambiguous - target ambiguous| + |unambiguous - target unambiguous|.
    pub distance: Option<u64>,
}

/// Partition counts under every map that varies only the minor intents,
/// closest to `target` first (stable, so the default map wins ties).
pub fn search_maps(sets: &[ContrastiveSet], target: Option<PartitionCounts>) -> Vec<MapCandidate> {
    let mut out: Vec<MapCandidate> = IntentPunctuationMap::minor_variants()
        .into_iter()
        .map(|map| {
            let counts = partition_counts(sets, &map);
            let distance = target.map(|t| {
                counts.ambiguous.abs_diff(t.ambiguous) + counts.unambiguous.abs_diff(t.unambiguous)
            });
            MapCandidate {
                map,
                counts,
                distance,
            }
        })
        .collect();
    if target.is_some() {
        out.sort_by_key(|c| c.distance);
    }
    out
}
