//! Contrastive evaluation of speech-to-text translation systems on
//! prosody-dependent Korean wh-phrases.
//!
//! The pipeline: ingest a corpus, build one contrastive set per utterance,
//! read externally produced token log-probabilities, rank each set's
//! candidates by length-normalized score, then aggregate the outcomes into
//! accuracy, per-intent precision/recall/F1, confusion matrices and random
//! baselines, overall and split by punctuation ambiguity.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the command-line tool uses.

pub mod corpus;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod scoring;
pub mod synth;

pub use scalar::Scalar;

pub type SetOutcome = scoring::SetOutcome<f64>;
pub type IntentPrf = metrics::IntentPrf<f64>;
pub type ConfusionMatrix = metrics::ConfusionMatrix<f64>;
pub type BaselineResult = metrics::BaselineResult<f64>;
pub type EvaluationReport = report::EvaluationReport<f64>;
