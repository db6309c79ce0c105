//! Evaluation reports, plot-ready tables and multi-system comparison.
//!
//! A report is a pure function of an outcomes list plus the configuration
//! echoed inside it, so it can be rebuilt from the outcomes file written next
//! to it. Report schema, plot-data columns and metric names are listed in the
//! repository README.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Intent;
use crate::metrics::{
    baseline, confusion_matrix, intent_prf, tally, BaselineKind, BaselineResult, ConfusionMatrix,
    IntentPrf, PartitionFilter, Selection, SetProfile, SingletonPolicy,
};
use crate::partition::IntentPunctuationMap;
use crate::scalar::{percent_1dp, Scalar};
use crate::scoring::{SetOutcome, TIE_POLICY};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report for system '{system_id}' is inconsistent: {message}")]
    Inconsistent { system_id: String, message: String },
    #[error("no reports given")]
    NoReports,
    #[error("system '{0}' has no model size, which figure {1} needs")]
    MissingModelSize(String, &'static str),
    #[error("system '{0}' has no {1} data for figure {2}")]
    MissingData(String, &'static str, &'static str),
    #[error("reports come from different corpora ({0} vs {1})")]
    MixedCorpora(String, String),
    #[error("outcomes belong to several systems: {0}")]
    MixedSystems(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Everything needed to reproduce a report from its outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub punctuation_map: IntentPunctuationMap,
    pub tie_policy: String,
    pub singleton_policy: SingletonPolicy,
    pub skipped_sets: Vec<String>,
    pub scalar: String,
}

impl ReportConfig {
    pub fn new<T: Scalar>(map: IntentPunctuationMap, singletons: SingletonPolicy) -> Self {
        ReportConfig {
            punctuation_map: map,
            tie_policy: TIE_POLICY.into(),
            singleton_policy: singletons,
            skipped_sets: Vec::new(),
            scalar: T::NAME.into(),
        }
    }
}

/// Who produced the scores, as far as the score file header says.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub system_id: String,
    pub kind: Option<String>,
    pub model_size: Option<String>,
    pub punctuation_mode: Option<String>,
    pub header: Option<serde_json::Map<String, serde_json::Value>>,
}

impl SystemInfo {
    pub fn new(system_id: impl Into<String>) -> Self {
        SystemInfo {
            system_id: system_id.into(),
            ..Default::default()
        }
    }

    /// Series name in plot tables: the system kind (plus punctuation mode
    /// when set), or the system id for mock systems and unknown kinds.
    pub fn series(&self) -> String {
        match (self.kind.as_deref(), &self.punctuation_mode) {
            (None | Some("mock"), _) => self.system_id.clone(),
            (Some(k), Some(p)) => format!("{k}:{p}"),
            (Some(k), None) => k.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerPartition<V> {
    pub all: V,
    pub ambiguous: V,
    pub unambiguous: V,
}

impl<V> PerPartition<V> {
    pub fn build(mut f: impl FnMut(PartitionFilter) -> V) -> Self {
        PerPartition {
            all: f(PartitionFilter::All),
            ambiguous: f(PartitionFilter::Ambiguous),
            unambiguous: f(PartitionFilter::Unambiguous),
        }
    }

    pub fn get(&self, p: PartitionFilter) -> &V {
        match p {
            PartitionFilter::All => &self.all,
            PartitionFilter::Ambiguous => &self.ambiguous,
            PartitionFilter::Unambiguous => &self.unambiguous,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AccuracyCell<T> {
    pub correct: u64,
    pub total: u64,
    pub accuracy: T,
    /// Accuracy in percent, one decimal.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Baselines<T> {
    pub pure_random: BaselineResult<T>,
    pub whq_biased_random: BaselineResult<T>,
}

/// One report per system. Partitions with no selected sets are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EvaluationReport<T> {
    pub report_version: u32,
    pub system: SystemInfo,
    pub corpus_fingerprint: String,
    pub singleton_sets: u64,
    pub accuracy: PerPartition<Option<AccuracyCell<T>>>,
    pub intent_prf: PerPartition<Option<IntentPrf<T>>>,
    pub confusion: PerPartition<Option<ConfusionMatrix<T>>>,
    pub baselines: PerPartition<Option<Baselines<T>>>,
    pub config: ReportConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

impl<T: Scalar> EvaluationReport<T> {
    pub fn overall_accuracy(&self) -> Option<T> {
        self.accuracy.all.as_ref().map(|c| c.accuracy)
    }

    pub fn write_json(&self, mut out: impl Write) -> Result<(), ReportError> {
        serde_json::to_writer_pretty(&mut out, self).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!("system {}\n", self.system.system_id);
        for p in PartitionFilter::ALL {
            let acc = match self.accuracy.get(p) {
                Some(c) => format!("{:5.1}  ({}/{})", c.percent, c.correct, c.total),
                None => "  n/a".into(),
            };
            let base = match self.baselines.get(p) {
                Some(b) => format!(
                    "random {:4.1}  wh-q random {:4.1}",
                    percent_1dp(b.pure_random.expected_accuracy),
                    percent_1dp(b.whq_biased_random.expected_accuracy)
                ),
                None => String::new(),
            };
            s.push_str(&format!("  {:<12} accuracy {acc}  {base}\n", p.label()));
        }
        s
    }
}

/// Aggregate outcomes of one system into a report, then verify the metric
/// identities on what was built.
pub fn build_report<T: Scalar>(
    outcomes: &[SetOutcome<T>],
    system: SystemInfo,
    corpus_fingerprint: String,
    config: ReportConfig,
) -> Result<EvaluationReport<T>, ReportError> {
    let mut ids: Vec<&str> = outcomes.iter().map(|o| o.system_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > 1 || ids.first().is_some_and(|&id| id != system.system_id) {
        return Err(ReportError::MixedSystems(ids.join(", ")));
    }

    let sel = |p| Selection::new(p).with_singletons(config.singleton_policy);
    let profiles: Vec<SetProfile> = outcomes.iter().map(SetProfile::from_outcome).collect();

    let accuracy = PerPartition::build(|p| {
        let t = tally(outcomes, sel(p));
        t.fraction::<T>().map(|a| AccuracyCell {
            correct: t.correct,
            total: t.total,
            accuracy: a,
            percent: percent_1dp(a),
        })
    });
    let intent_prf = PerPartition::build(|p| intent_prf(outcomes, sel(p)).ok());
    let confusion = PerPartition::build(|p| confusion_matrix(outcomes, sel(p), true).ok());
    let baselines = PerPartition::build(|p| {
        Some(Baselines {
            pure_random: baseline(BaselineKind::PureRandom, &profiles, sel(p)).ok()?,
            whq_biased_random: baseline(BaselineKind::WhqBiasedRandom, &profiles, sel(p)).ok()?,
        })
    });

    let report = EvaluationReport {
        report_version: REPORT_VERSION,
        system,
        corpus_fingerprint,
        singleton_sets: outcomes.iter().filter(|o| o.singleton).count() as u64,
        accuracy,
        intent_prf,
        confusion,
        baselines,
        config,
        generated_at_unix: None,
    };
    check_report(&report)?;
    Ok(report)
}

/// Metric identities every report must satisfy.
pub fn check_report<T: Scalar>(r: &EvaluationReport<T>) -> Result<(), ReportError> {
    let fail = |message: String| ReportError::Inconsistent {
        system_id: r.system.system_id.clone(),
        message,
    };
    let row_tol = T::lit(1e-9).max(T::epsilon() * T::lit(16.0));

    for p in PartitionFilter::ALL {
        let (Some(acc), Some(cm), Some(prf)) =
            (r.accuracy.get(p), r.confusion.get(p), r.intent_prf.get(p))
        else {
            if r.accuracy.get(p).is_some() || r.confusion.get(p).is_some() {
                return Err(fail(format!(
                    "partition {} is partially populated",
                    p.label()
                )));
            }
            continue;
        };
        if cm.total() != acc.total || cm.trace() != acc.correct {
            return Err(fail(format!(
                "{}: confusion diagonal {}/{} differs from accuracy {}/{}",
                p.label(),
                cm.trace(),
                cm.total(),
                acc.correct,
                acc.total
            )));
        }
        if prf.micro_recall != acc.accuracy {
            return Err(fail(format!(
                "{}: micro recall differs from accuracy",
                p.label()
            )));
        }
        for i in Intent::ALL {
            if cm.row_total(i) != prf.get(i).gold_support {
                return Err(fail(format!(
                    "{}: row {} differs from gold support",
                    p.label(),
                    i
                )));
            }
        }
        if let Some(rows) = &cm.normalized {
            for (i, row) in rows.iter().enumerate() {
                let s = row.iter().fold(T::zero(), |a, &b| a + b);
                let nonzero = cm.counts[i].iter().any(|&c| c > 0);
                if nonzero && (s - T::one()).abs() > row_tol {
                    return Err(fail(format!(
                        "{}: normalized row {i} sums to {s}",
                        p.label()
                    )));
                }
            }
        }
    }

    if let (Some(all), amb, unamb) = (
        &r.accuracy.all,
        &r.accuracy.ambiguous,
        &r.accuracy.unambiguous,
    ) {
        let parts = [amb, unamb];
        let correct: u64 = parts
            .iter()
            .filter_map(|c| c.as_ref())
            .map(|c| c.correct)
            .sum();
        let total: u64 = parts
            .iter()
            .filter_map(|c| c.as_ref())
            .map(|c| c.total)
            .sum();
        if correct != all.correct || total != all.total {
            return Err(fail(
                "partition accuracies do not add up to the overall accuracy".into(),
            ));
        }
    }
    Ok(())
}

/// Baseline rows for every partition and policy, computed straight from set
/// profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BaselineTable<T> {
    pub corpus_fingerprint: String,
    pub punctuation_map: IntentPunctuationMap,
    pub singleton_policy: SingletonPolicy,
    pub rows: Vec<BaselineResult<T>>,
}

pub fn baseline_table<T: Scalar>(
    profiles: &[SetProfile],
    partitions: &[PartitionFilter],
    singletons: SingletonPolicy,
    map: IntentPunctuationMap,
    corpus_fingerprint: String,
) -> BaselineTable<T> {
    let mut rows = Vec::new();
    for &p in partitions {
        for kind in [BaselineKind::PureRandom, BaselineKind::WhqBiasedRandom] {
            if let Ok(b) = baseline(
                kind,
                profiles,
                Selection::new(p).with_singletons(singletons),
            ) {
                rows.push(b);
            }
        }
    }
    BaselineTable {
        corpus_fingerprint,
        punctuation_map: map,
        singleton_policy: singletons,
        rows,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureTag {
    /// Overall accuracy per system and model size, plus the random baseline.
    Figure2,
    /// Accuracy on ambiguous and unambiguous sets per system and size.
    Figure3,
    /// Recall, precision and F1 of the three major intents per partition.
    Figure4,
    /// Recall, precision and F1 of all seven intents per partition.
    IntentFull,
    /// Row-normalized confusion matrices over all sets.
    Figure8,
    /// Accuracy by partition plus both random baselines.
    Table2,
}

impl FigureTag {
    pub const ALL: [FigureTag; 6] = [
        FigureTag::Figure2,
        FigureTag::Figure3,
        FigureTag::Figure4,
        FigureTag::IntentFull,
        FigureTag::Figure8,
        FigureTag::Table2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FigureTag::Figure2 => "figure2",
            FigureTag::Figure3 => "figure3",
            FigureTag::Figure4 => "figure4",
            FigureTag::IntentFull => "intent-full",
            FigureTag::Figure8 => "figure8",
            FigureTag::Table2 => "table2",
        }
    }

    fn needs_size(self) -> bool {
        matches!(self, FigureTag::Figure2 | FigureTag::Figure3)
    }
}

impl std::str::FromStr for FigureTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| format!("unknown figure '{s}'"))
    }
}

/// One tidy row: values are percentages; `None` marks an undefined metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub system: String,
    pub model_size: String,
    pub partition: String,
    pub metric: String,
    pub value: Option<f64>,
}

fn pct<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN) * 100.0
}

fn baseline_rows<T: Scalar>(
    report: &EvaluationReport<T>,
    partitions: &[PartitionFilter],
    kinds: &[BaselineKind],
    rows: &mut Vec<PlotRow>,
) {
    for &p in partitions {
        if let Some(b) = report.baselines.get(p) {
            for &k in kinds {
                let r = match k {
                    BaselineKind::PureRandom => &b.pure_random,
                    BaselineKind::WhqBiasedRandom => &b.whq_biased_random,
                };
                rows.push(PlotRow {
                    system: k.label().into(),
                    model_size: String::new(),
                    partition: p.label().into(),
                    metric: "accuracy".into(),
                    value: Some(pct(r.expected_accuracy)),
                });
            }
        }
    }
}

fn is_size_free(info: &SystemInfo) -> bool {
    matches!(info.kind.as_deref(), Some("mt_gold") | Some("mock"))
}

/// Tidy rows for one figure or table, in report order.
pub fn emit_plot_data<T: Scalar>(
    reports: &[EvaluationReport<T>],
    figure: FigureTag,
) -> Result<Vec<PlotRow>, ReportError> {
    let first = reports.first().ok_or(ReportError::NoReports)?;
    for r in reports {
        if r.corpus_fingerprint != first.corpus_fingerprint {
            return Err(ReportError::MixedCorpora(
                first.corpus_fingerprint.clone(),
                r.corpus_fingerprint.clone(),
            ));
        }
        if figure.needs_size() && r.system.model_size.is_none() && !is_size_free(&r.system) {
            return Err(ReportError::MissingModelSize(
                r.system.system_id.clone(),
                figure.label(),
            ));
        }
    }

    let split = [PartitionFilter::Ambiguous, PartitionFilter::Unambiguous];
    let mut rows = Vec::new();
    for r in reports {
        let row = |partition: PartitionFilter, metric: String, value: Option<f64>| PlotRow {
            system: r.system.series(),
            model_size: r.system.model_size.clone().unwrap_or_default(),
            partition: partition.label().into(),
            metric,
            value,
        };
        let need = |what: &'static str| {
            ReportError::MissingData(r.system.system_id.clone(), what, figure.label())
        };
        match figure {
            FigureTag::Figure2 => {
                let a = r
                    .accuracy
                    .all
                    .as_ref()
                    .ok_or_else(|| need("overall accuracy"))?;
                rows.push(row(
                    PartitionFilter::All,
                    "accuracy".into(),
                    Some(pct(a.accuracy)),
                ));
            }
            FigureTag::Figure3 | FigureTag::Table2 => {
                for p in split {
                    let v = r.accuracy.get(p).as_ref().map(|a| pct(a.accuracy));
                    rows.push(row(p, "accuracy".into(), v));
                }
            }
            FigureTag::Figure4 | FigureTag::IntentFull => {
                let intents: &[Intent] = if figure == FigureTag::Figure4 {
                    &Intent::MAJOR
                } else {
                    &Intent::ALL
                };
                let partitions: &[PartitionFilter] = if figure == FigureTag::Figure4 {
                    &split
                } else {
                    &PartitionFilter::ALL
                };
                for &p in partitions {
                    let Some(prf) = r.intent_prf.get(p) else {
                        continue;
                    };
                    for &i in intents {
                        let s = prf.get(i);
                        for (name, v) in [
                            ("recall", s.recall),
                            ("precision", s.precision),
                            ("f1", s.f1),
                        ] {
                            rows.push(row(p, format!("{name}/{}", i.short()), v.map(pct)));
                        }
                    }
                }
            }
            FigureTag::Figure8 => {
                let cm = r.confusion.all.as_ref().ok_or_else(|| need("confusion"))?;
                let norm = cm
                    .normalized
                    .as_ref()
                    .ok_or_else(|| need("normalized confusion"))?;
                for g in Intent::ALL {
                    for p in Intent::ALL {
                        rows.push(row(
                            PartitionFilter::All,
                            format!("confusion/{}/{}", g.short(), p.short()),
                            Some(pct(norm[g.index()][p.index()])),
                        ));
                    }
                }
            }
        }
    }

    match figure {
        FigureTag::Figure2 => baseline_rows(
            first,
            &[PartitionFilter::All],
            &[BaselineKind::PureRandom],
            &mut rows,
        ),
        FigureTag::Figure3 => baseline_rows(first, &split, &[BaselineKind::PureRandom], &mut rows),
        FigureTag::Table2 => baseline_rows(
            first,
            &split,
            &[BaselineKind::PureRandom, BaselineKind::WhqBiasedRandom],
            &mut rows,
        ),
        _ => {}
    }
    Ok(rows)
}

pub fn write_plot_csv(rows: &[PlotRow], out: impl Write) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["system", "model_size", "partition", "metric", "value"])?;
    for r in rows {
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([&r.system, &r.model_size, &r.partition, &r.metric, &value])?;
    }
    w.flush()?;
    Ok(())
}

/// Accuracy of one system on one partition next to the reference system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub system_id: String,
    pub partition: String,
    pub accuracy_percent: Option<f64>,
    /// Difference to the reference system in percentage points.
    pub delta_vs_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: String,
    pub corpus_fingerprint: String,
    pub rows: Vec<ComparisonRow>,
}

/// Compare reports against the first one. All must share a corpus.
pub fn compare<T: Scalar>(reports: &[EvaluationReport<T>]) -> Result<Comparison, ReportError> {
    let reference = reports.first().ok_or(ReportError::NoReports)?;
    let mut rows = Vec::new();
    for r in reports {
        if r.corpus_fingerprint != reference.corpus_fingerprint {
            return Err(ReportError::MixedCorpora(
                reference.corpus_fingerprint.clone(),
                r.corpus_fingerprint.clone(),
            ));
        }
        for p in PartitionFilter::ALL {
            let mine = r.accuracy.get(p).as_ref().map(|a| pct(a.accuracy));
            let theirs = reference.accuracy.get(p).as_ref().map(|a| pct(a.accuracy));
            rows.push(ComparisonRow {
                system_id: r.system.system_id.clone(),
                partition: p.label().into(),
                accuracy_percent: mine,
                delta_vs_reference: mine.zip(theirs).map(|(a, b)| a - b),
            });
        }
    }
    Ok(Comparison {
        reference: reference.system.system_id.clone(),
        corpus_fingerprint: reference.corpus_fingerprint.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_contrastive_sets;
    use crate::scoring::{evaluate_system, EvalOptions, SystemScores};
    use crate::synth::{mock_scores, synthetic_corpus, MockPolicy};

    fn outcomes(policy: MockPolicy, id: &str) -> Vec<SetOutcome<f64>> {
        let sets = build_contrastive_sets(&synthetic_corpus(40, 9));
        let f = mock_scores(&sets, id, policy);
        let s = SystemScores::from_file(&f, id).unwrap();
        evaluate_system(
            &sets,
            &s,
            &IntentPunctuationMap::default(),
            &EvalOptions::default(),
        )
        .unwrap()
    }

    fn report(policy: MockPolicy, info: SystemInfo) -> EvaluationReport<f64> {
        let o = outcomes(policy, &info.system_id.clone());
        build_report(
            &o,
            info,
            "sha256:x".into(),
            ReportConfig::new::<f64>(IntentPunctuationMap::default(), SingletonPolicy::Include),
        )
        .unwrap()
    }

    fn sized(id: &str, kind: &str, size: &str) -> SystemInfo {
        SystemInfo {
            kind: Some(kind.into()),
            model_size: Some(size.into()),
            ..SystemInfo::new(id)
        }
    }

    #[test]
    fn oracle_report_is_perfect() {
        let r = report(MockPolicy::Oracle, SystemInfo::new("o"));
        assert_eq!(r.overall_accuracy(), Some(1.0));
        assert_eq!(r.accuracy.all.as_ref().unwrap().percent, 100.0);
        let text = serde_json::to_string(&r).unwrap();
        let back: EvaluationReport<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn tampered_report_fails_check() {
        let mut r = report(MockPolicy::SeededRandom(2), SystemInfo::new("o"));
        r.accuracy.all.as_mut().unwrap().correct += 1;
        assert!(matches!(
            check_report(&r),
            Err(ReportError::Inconsistent { .. })
        ));
    }

    #[test]
    fn mixed_systems_rejected() {
        let mut o = outcomes(MockPolicy::Oracle, "a");
        o[0].system_id = "b".into();
        let cfg =
            ReportConfig::new::<f64>(IntentPunctuationMap::default(), SingletonPolicy::Include);
        assert!(matches!(
            build_report(&o, SystemInfo::new("a"), String::new(), cfg),
            Err(ReportError::MixedSystems(_))
        ));
    }

    #[test]
    fn figure2_shape() {
        let sizes = ["tiny", "base", "small", "medium", "large"];
        let mut reports = Vec::new();
        for kind in ["direct", "cascade"] {
            for s in sizes {
                reports.push(report(
                    MockPolicy::SeededRandom(1),
                    sized(&format!("{kind}-{s}"), kind, s),
                ));
            }
        }
        let rows = emit_plot_data(&reports, FigureTag::Figure2).unwrap();
        assert_eq!(
            rows.iter().filter(|r| r.system != "pure_random").count(),
            10
        );
        assert_eq!(rows.iter().filter(|r| r.system == "pure_random").count(), 1);
        assert!(rows
            .iter()
            .all(|r| r.metric == "accuracy" && r.partition == "all"));
    }

    #[test]
    fn figure4_shape() {
        let reports: Vec<_> = ["direct", "cascade", "mt_gold"]
            .into_iter()
            .map(|k| report(MockPolicy::SeededRandom(3), sized(k, k, "medium")))
            .collect();
        let rows = emit_plot_data(&reports, FigureTag::Figure4).unwrap();
        // 3 systems × 2 partitions × 3 intents × 3 metrics
        assert_eq!(rows.len(), 54);
        assert!(rows
            .iter()
            .any(|r| r.metric == "f1/YN" && r.partition == "ambiguous"));
        assert!(rows.iter().all(|r| r.partition != "all"));
    }

    #[test]
    fn plot_errors() {
        assert!(matches!(
            emit_plot_data::<f64>(&[], FigureTag::Figure2),
            Err(ReportError::NoReports)
        ));
        let r = report(MockPolicy::Oracle, SystemInfo::new("nosize"));
        assert!(matches!(
            emit_plot_data(std::slice::from_ref(&r), FigureTag::Figure2),
            Err(ReportError::MissingModelSize(..))
        ));
        assert_eq!(
            emit_plot_data(std::slice::from_ref(&r), FigureTag::Figure8)
                .unwrap()
                .len(),
            49
        );
        let mut other = r.clone();
        other.corpus_fingerprint = "sha256:y".into();
        assert!(matches!(
            compare(&[r, other]),
            Err(ReportError::MixedCorpora(..))
        ));
    }

    #[test]
    fn comparison_deltas() {
        let a = report(MockPolicy::Oracle, SystemInfo::new("a"));
        let b = report(MockPolicy::Adversarial, SystemInfo::new("b"));
        let c = compare(&[a, b]).unwrap();
        assert_eq!(c.rows.len(), 6);
        assert_eq!(c.rows[0].delta_vs_reference, Some(0.0));
        assert!(c.rows[3].delta_vs_reference.unwrap() < -50.0);
    }

    #[test]
    fn plot_csv_layout() {
        let rows = vec![PlotRow {
            system: "direct".into(),
            model_size: "medium".into(),
            partition: "ambiguous".into(),
            metric: "precision/S".into(),
            value: None,
        }];
        let mut out = Vec::new();
        write_plot_csv(&rows, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "system,model_size,partition,metric,value\ndirect,medium,ambiguous,precision/S,\n"
        );
    }
}
