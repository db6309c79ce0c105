//! Aggregation of set outcomes: accuracy, per-intent precision/recall/F1,
//! confusion matrices and closed-form random baselines.
//!
//! Counts are kept as integers and baselines as exact rationals; floating
//! point only appears in the final division, so results never depend on the
//! order in which outcomes are reduced.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ContrastiveSet, Intent};
use crate::partition::{classify_set, Ambiguity, IntentPunctuationMap};
use crate::scalar::Scalar;
use crate::scoring::SetOutcome;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no sets selected by {0}")]
    EmptySelection(Selection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionFilter {
    All,
    Ambiguous,
    Unambiguous,
}

impl PartitionFilter {
    pub const ALL: [PartitionFilter; 3] = [
        PartitionFilter::All,
        PartitionFilter::Ambiguous,
        PartitionFilter::Unambiguous,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PartitionFilter::All => "all",
            PartitionFilter::Ambiguous => "ambiguous",
            PartitionFilter::Unambiguous => "unambiguous",
        }
    }

    pub fn admits(self, a: Ambiguity) -> bool {
        match self {
            PartitionFilter::All => true,
            PartitionFilter::Ambiguous => a == Ambiguity::Ambiguous,
            PartitionFilter::Unambiguous => a == Ambiguity::Unambiguous,
        }
    }
}

impl FromStr for PartitionFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| format!("unknown partition '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonPolicy {
    #[default]
    Include,
    Exclude,
}

/// Which outcomes or sets a metric is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub partition: PartitionFilter,
    pub singletons: SingletonPolicy,
}

impl Selection {
    pub const fn new(partition: PartitionFilter) -> Selection {
        Selection {
            partition,
            singletons: SingletonPolicy::Include,
        }
    }

    pub const fn all() -> Selection {
        Selection::new(PartitionFilter::All)
    }

    pub fn with_singletons(self, singletons: SingletonPolicy) -> Selection {
        Selection { singletons, ..self }
    }

    pub fn admits(&self, ambiguity: Ambiguity, singleton: bool) -> bool {
        self.partition.admits(ambiguity)
            && !(singleton && self.singletons == SingletonPolicy::Exclude)
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "partition '{}'", self.partition.label())?;
        if self.singletons == SingletonPolicy::Exclude {
            f.write_str(" excluding singletons")?;
        }
        Ok(())
    }
}

fn select<'a, T: Scalar>(
    outcomes: &'a [SetOutcome<T>],
    sel: Selection,
) -> impl Iterator<Item = &'a SetOutcome<T>> + 'a {
    outcomes
        .iter()
        .filter(move |o| sel.admits(o.ambiguity, o.singleton))
}

/// Exact correct/total counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: u64,
    pub total: u64,
}

impl Tally {
    pub fn fraction<T: Scalar>(&self) -> Option<T> {
        (self.total > 0).then(|| T::ratio(self.correct, self.total))
    }
}

pub fn tally<T: Scalar>(outcomes: &[SetOutcome<T>], sel: Selection) -> Tally {
    select(outcomes, sel).fold(Tally::default(), |t, o| Tally {
        correct: t.correct + u64::from(o.correct),
        total: t.total + 1,
    })
}

/// Fraction of selected outcomes that are correct.
pub fn accuracy<T: Scalar>(outcomes: &[SetOutcome<T>], sel: Selection) -> Result<T, MetricsError> {
    tally(outcomes, sel)
        .fraction()
        .ok_or(MetricsError::EmptySelection(sel))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IntentScores<T> {
    pub intent: Intent,
    /// Outcomes whose gold intent is this one.
    pub gold_support: u64,
    /// Outcomes whose predicted intent is this one.
    pub predicted_support: u64,
    pub correct: u64,
    /// `None` when nothing was predicted as this intent.
    pub precision: Option<T>,
    /// `None` when no gold outcome has this intent.
    pub recall: Option<T>,
    /// `None` only when both precision and recall are undefined.
    pub f1: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IntentPrf<T> {
    /// All seven intents in enumeration order.
    pub per_intent: Vec<IntentScores<T>>,
    pub total: u64,
    /// Correct predictions over all outcomes.
    pub micro_recall: T,
}

impl<T: Scalar> IntentPrf<T> {
    pub fn get(&self, intent: Intent) -> &IntentScores<T> {
        &self.per_intent[intent.index()]
    }
}

fn f1<T: Scalar>(p: Option<T>, r: Option<T>) -> Option<T> {
    if p.is_none() && r.is_none() {
        return None;
    }
    let p = p.unwrap_or_else(T::zero);
    let r = r.unwrap_or_else(T::zero);
    let s = p + r;
    Some(if s > T::zero() {
        T::lit(2.0) * p * r / s
    } else {
        T::zero()
    })
}

/// Per-intent precision, recall and F1 over (gold, predicted) intent pairs.
pub fn intent_prf<T: Scalar>(
    outcomes: &[SetOutcome<T>],
    sel: Selection,
) -> Result<IntentPrf<T>, MetricsError> {
    let cm = confusion_matrix(outcomes, sel, false)?;
    let per_intent = Intent::ALL
        .into_iter()
        .map(|i| {
            let gold_support = cm.row_total(i);
            let predicted_support = cm.column_total(i);
            let correct = cm.count(i, i);
            let precision = (predicted_support > 0).then(|| T::ratio(correct, predicted_support));
            let recall = (gold_support > 0).then(|| T::ratio(correct, gold_support));
            IntentScores {
                intent: i,
                gold_support,
                predicted_support,
                correct,
                precision,
                recall,
                f1: f1(precision, recall),
            }
        })
        .collect();
    Ok(IntentPrf {
        per_intent,
        total: cm.total(),
        micro_recall: T::ratio(cm.trace(), cm.total()),
    })
}

/// 7×7 counts indexed by (gold intent, predicted intent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConfusionMatrix<T> {
    pub labels: Vec<Intent>,
    pub counts: Vec<Vec<u64>>,
    /// Each nonzero row divided by its sum; zero rows stay zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> ConfusionMatrix<T> {
    fn empty() -> Self {
        ConfusionMatrix {
            labels: Intent::ALL.to_vec(),
            counts: vec![vec![0; Intent::COUNT]; Intent::COUNT],
            normalized: None,
        }
    }

    pub fn count(&self, gold: Intent, predicted: Intent) -> u64 {
        self.counts[gold.index()][predicted.index()]
    }

    pub fn row_total(&self, gold: Intent) -> u64 {
        self.counts[gold.index()].iter().sum()
    }

    pub fn column_total(&self, predicted: Intent) -> u64 {
        self.counts.iter().map(|r| r[predicted.index()]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..Intent::COUNT).map(|i| self.counts[i][i]).sum()
    }

    pub fn normalize(&mut self) {
        let rows = self
            .counts
            .iter()
            .map(|row| {
                let sum: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| {
                        if sum == 0 {
                            T::zero()
                        } else {
                            T::ratio(c, sum)
                        }
                    })
                    .collect()
            })
            .collect();
        self.normalized = Some(rows);
    }
}

pub fn confusion_matrix<T: Scalar>(
    outcomes: &[SetOutcome<T>],
    sel: Selection,
    normalize: bool,
) -> Result<ConfusionMatrix<T>, MetricsError> {
    let mut cm = ConfusionMatrix::empty();
    for o in select(outcomes, sel) {
        cm.counts[o.gold_intent.index()][o.predicted_intent.index()] += 1;
    }
    if cm.total() == 0 {
        return Err(MetricsError::EmptySelection(sel));
    }
    if normalize {
        cm.normalize();
    }
    Ok(cm)
}

/// The intents of one set, all a random policy needs to know.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetProfile {
    pub gold: Intent,
    pub alternatives: Vec<Intent>,
    pub ambiguity: Ambiguity,
}

impl SetProfile {
    pub fn from_set(set: &ContrastiveSet, map: &IntentPunctuationMap) -> SetProfile {
        SetProfile {
            gold: set.gold.intent,
            alternatives: set.alternative_intents(),
            ambiguity: classify_set(set, map),
        }
    }

    pub fn from_outcome<T: Scalar>(o: &SetOutcome<T>) -> SetProfile {
        SetProfile {
            gold: o.gold_intent,
            alternatives: o.alternative_intents().collect(),
            ambiguity: o.ambiguity,
        }
    }

    pub fn size(&self) -> u64 {
        1 + self.alternatives.len() as u64
    }

    pub fn is_singleton(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn has_candidate(&self, intent: Intent) -> bool {
        self.gold == intent || self.alternatives.contains(&intent)
    }
}

pub fn profiles(sets: &[ContrastiveSet], map: &IntentPunctuationMap) -> Vec<SetProfile> {
    sets.iter().map(|s| SetProfile::from_set(s, map)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    /// Uniform choice among the set's candidates.
    PureRandom,
    /// A wh-question candidate whenever one exists, uniform otherwise.
    WhqBiasedRandom,
}

impl BaselineKind {
    pub fn label(self) -> &'static str {
        match self {
            BaselineKind::PureRandom => "pure_random",
            BaselineKind::WhqBiasedRandom => "whq_biased_random",
        }
    }

    /// Probability that the policy picks the gold candidate of `p`.
    pub fn success_probability(self, p: &SetProfile) -> Ratio<u64> {
        let uniform = Ratio::new(1, p.size());
        match self {
            BaselineKind::PureRandom => uniform,
            BaselineKind::WhqBiasedRandom if p.has_candidate(Intent::WhQuestion) => {
                Ratio::from_integer(u64::from(p.gold == Intent::WhQuestion))
            }
            BaselineKind::WhqBiasedRandom => uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BaselineResult<T> {
    pub kind: BaselineKind,
    pub selection: Selection,
    pub sets: u64,
    pub exact_numerator: u64,
    pub exact_denominator: u64,
    pub expected_accuracy: T,
}

impl<T: Scalar> BaselineResult<T> {
    pub fn exact(&self) -> Ratio<u64> {
        Ratio::new(self.exact_numerator, self.exact_denominator)
    }
}

/// Expected accuracy of `kind` over the selected sets, in closed form.
pub fn baseline<T: Scalar>(
    kind: BaselineKind,
    sets: &[SetProfile],
    sel: Selection,
) -> Result<BaselineResult<T>, MetricsError> {
    let mut sum = Ratio::from_integer(0u64);
    let mut n = 0u64;
    for p in sets
        .iter()
        .filter(|p| sel.admits(p.ambiguity, p.is_singleton()))
    {
        sum += kind.success_probability(p);
        n += 1;
    }
    if n == 0 {
        return Err(MetricsError::EmptySelection(sel));
    }
    let mean = sum / Ratio::from_integer(n);
    Ok(BaselineResult {
        kind,
        selection: sel,
        sets: n,
        exact_numerator: *mean.numer(),
        exact_denominator: *mean.denom(),
        expected_accuracy: T::from_exact(&mean),
    })
}

/// Mean over selected sets of 1/k, k the number of candidates.
pub fn random_baseline<T: Scalar>(
    sets: &[SetProfile],
    sel: Selection,
) -> Result<BaselineResult<T>, MetricsError> {
    baseline(BaselineKind::PureRandom, sets, sel)
}

pub fn whq_biased_baseline<T: Scalar>(
    sets: &[SetProfile],
    sel: Selection,
) -> Result<BaselineResult<T>, MetricsError> {
    baseline(BaselineKind::WhqBiasedRandom, sets, sel)
}
