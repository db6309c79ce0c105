use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use prosodic_contrast::corpus::{
    build_contrastive_sets, convert_delimited, corpus_stats, serialize_corpus, ColumnMap,
};
use prosodic_contrast::metrics::{PartitionFilter, SingletonPolicy};
use prosodic_contrast::partition::{partition_counts, PartitionCounts};
use prosodic_contrast::pipeline::{
    corpus_fingerprint, load_corpus, load_outcomes, load_punct_map, load_scores, read_report,
    rebuild_report, run_baselines, run_evaluate, search_maps, set_lines, write_json, write_jsonl,
    write_outcomes, EvaluateOptions,
};
use prosodic_contrast::report::{compare, emit_plot_data, write_plot_csv, FigureTag};
use prosodic_contrast::scalar::percent_1dp;
use prosodic_contrast::scoring::write_scores;
use prosodic_contrast::synth::{mock_scores, synthetic_corpus, MockPolicy};
use prosodic_contrast::EvaluationReport;

/// Contrastive evaluation of speech translation on prosody-dependent Korean wh-phrases.
#[derive(Debug, Parser)]
#[command(name = "prosodic-contrast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest and validate a corpus; print counts and the content fingerprint.
    IngestValidate {
        #[arg(long)]
        corpus: PathBuf,
        /// Write the statistics as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one contrastive set per utterance as JSON Lines.
    BuildSets {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        singletons: SingletonArgs,
        #[arg(long, default_value = "all")]
        partition: PartitionFilter,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count ambiguous and unambiguous sets.
    PartitionStats {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        map: MapArg,
        /// Also try every map that reassigns only the four minor intents.
        #[arg(long)]
        search_maps: bool,
        /// Target counts for the search, as AMBIGUOUS,UNAMBIGUOUS.
        #[arg(long, value_parser = parse_counts)]
        target: Option<PartitionCounts>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score every system in a score file; write a report and an outcomes file per system.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        singletons: SingletonArgs,
        /// Evaluate only these systems (repeatable).
        #[arg(long = "system")]
        systems: Vec<String>,
        /// File listing set ids to leave out, one per line.
        #[arg(long)]
        skip: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Record the generation time in each report.
        #[arg(long)]
        timestamps: bool,
    },
    /// Closed-form random baselines, no scores needed.
    Baselines {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        singletons: SingletonArgs,
        /// Only this partition; all three by default.
        #[arg(long)]
        partition: Option<PartitionFilter>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tidy CSV for one figure or table from one or more reports.
    PlotData {
        #[arg(long, value_parser = parse_figure)]
        figure: FigureTag,
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy of several reports relative to the first one.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a report from its outcomes file and check it is identical.
    VerifyReport {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        outcomes: PathBuf,
    },
    /// Convert an upstream CSV/TSV release into the canonical corpus format.
    Convert {
        #[arg(long)]
        input: PathBuf,
        /// Field delimiter; guessed from the extension when omitted.
        #[arg(long)]
        delimiter: Option<char>,
        /// Synthesize utterance and transcription ids instead of reading them.
        #[arg(long)]
        synthesize_ids: bool,
        #[arg(long, default_value = "transcription_text")]
        text_col: String,
        #[arg(long, default_value = "intent")]
        intent_col: String,
        #[arg(long, default_value = "wh_particle")]
        particle_col: String,
        #[arg(long, default_value = "gold_translation")]
        translation_col: String,
        #[arg(long)]
        audio_col: Option<String>,
        #[arg(long)]
        speaker_col: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded synthetic corpus.
    SynthCorpus {
        #[arg(long, default_value_t = 60)]
        transcriptions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a mock score file with a header record.
    MockScores {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "mock")]
        system_id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct MapArg {
    /// TOML file assigning each intent to "question" or "non_question".
    #[arg(long = "punct-map")]
    punct_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SingletonArgs {
    /// Keep sets without alternatives (default).
    #[arg(long, conflicts_with = "exclude_singletons")]
    include_singletons: bool,
    /// Leave out sets without alternatives.
    #[arg(long)]
    exclude_singletons: bool,
}

impl SingletonArgs {
    fn policy(&self) -> SingletonPolicy {
        if self.exclude_singletons {
            SingletonPolicy::Exclude
        } else {
            SingletonPolicy::Include
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Oracle,
    Adversarial,
    SeededRandom,
}

fn parse_figure(s: &str) -> Result<FigureTag, String> {
    s.parse()
}

fn parse_counts(s: &str) -> Result<PartitionCounts, String> {
    let (a, u) = s.split_once(',').ok_or("expected AMBIGUOUS,UNAMBIGUOUS")?;
    Ok(PartitionCounts {
        ambiguous: a.trim().parse().map_err(|e| format!("{e}"))?,
        unambiguous: u.trim().parse().map_err(|e| format!("{e}"))?,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes to `out` or standard output. Returns whether stdout was used, in
/// which case summaries go to standard error.
fn emit(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<bool> {
    match out {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
            Ok(false)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
            Ok(true)
        }
    }
}

fn say(to_stderr: bool, text: &str) {
    if to_stderr {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
}

fn file_stem(system_id: &str) -> String {
    system_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn read_reports(paths: &[PathBuf]) -> Result<Vec<EvaluationReport>> {
    paths
        .iter()
        .map(|p| read_report(p).with_context(|| format!("reading report {}", p.display())))
        .collect()
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::IngestValidate { corpus, out } => {
            let c = load_corpus(&corpus)?;
            let stats = corpus_stats(&c);
            let fp = corpus_fingerprint(&c);
            let mut text = format!(
                "corpus ok: {} utterances, {} transcriptions\nfingerprint {fp}\n",
                stats.total_utterances, stats.distinct_transcriptions
            );
            for (i, n) in &stats.per_intent {
                text.push_str(&format!("  {:<22} {n}\n", i.label()));
            }
            for (p, n) in &stats.per_particle {
                text.push_str(&format!("  {:<22} {n}\n", p.label()));
            }
            print!("{text}");
            if let Some(out) = out {
                let doc = serde_json::json!({"corpus_fingerprint": fp, "stats": stats});
                emit(Some(&out), |w| Ok(write_json(&doc, w)?))?;
            }
        }
        Command::BuildSets {
            corpus,
            map,
            singletons,
            partition,
            out,
        } => {
            let c = load_corpus(&corpus)?;
            let map = load_punct_map(map.punct_map.as_deref())?;
            let policy = singletons.policy();
            let lines: Vec<_> = set_lines(&build_contrastive_sets(&c), &map)?
                .into_iter()
                .filter(|l| partition.admits(l.ambiguity))
                .filter(|l| !(l.singleton && policy == SingletonPolicy::Exclude))
                .collect();
            let to_stderr = emit(out.as_deref(), |w| Ok(write_jsonl(&lines, w)?))?;
            say(to_stderr, &format!("{} sets written\n", lines.len()));
        }
        Command::PartitionStats {
            corpus,
            map,
            search_maps: search,
            target,
            out,
        } => {
            let c = load_corpus(&corpus)?;
            let map = load_punct_map(map.punct_map.as_deref())?;
            let sets = build_contrastive_sets(&c);
            let counts = partition_counts(&sets, &map);
            let mut text = format!(
                "ambiguous {}  unambiguous {}  total {}\n",
                counts.ambiguous,
                counts.unambiguous,
                counts.total()
            );
            let candidates = (search || target.is_some()).then(|| search_maps(&sets, target));
            if let Some(found) = &candidates {
                for m in found {
                    let minors: Vec<String> = prosodic_contrast::corpus::Intent::ALL
                        .into_iter()
                        .filter(|i| !i.is_major())
                        .map(|i| format!("{}={}", i.short(), m.map.class(i).label()))
                        .collect();
                    let d = m
                        .distance
                        .map(|d| format!("  distance {d}"))
                        .unwrap_or_default();
                    text.push_str(&format!(
                        "  {:<60} {} / {}{d}\n",
                        minors.join(" "),
                        m.counts.ambiguous,
                        m.counts.unambiguous
                    ));
                }
            }
            let doc = serde_json::json!({
                "punctuation_map": map,
                "counts": counts,
                "map_search": candidates,
            });
            let to_stderr = emit(out.as_deref(), |w| Ok(write_json(&doc, w)?))?;
            say(to_stderr, &text);
        }
        Command::Evaluate {
            corpus,
            scores,
            map,
            singletons,
            systems,
            skip,
            jobs,
            out,
            timestamps,
        } => {
            let c = load_corpus(&corpus)?;
            let file = load_scores(&scores)?;
            let skip: BTreeSet<String> = match skip {
                Some(p) => std::fs::read_to_string(&p)
                    .with_context(|| format!("reading {}", p.display()))?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(String::from)
                    .collect(),
                None => BTreeSet::new(),
            };
            let opts = EvaluateOptions {
                map: load_punct_map(map.punct_map.as_deref())?,
                singletons: singletons.policy(),
                skip,
                jobs,
                systems,
            };
            let runs = run_evaluate::<f64>(&c, &file, &opts)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut stems = BTreeSet::new();
            for mut r in runs {
                if timestamps {
                    let now = SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs();
                    r.report.generated_at_unix = Some(now);
                }
                let stem = file_stem(&r.report.system.system_id);
                if !stems.insert(stem.clone()) {
                    bail!("two systems map to the same output name '{stem}'");
                }
                emit(Some(&out.join(format!("{stem}.report.json"))), |w| {
                    Ok(r.report.write_json(w)?)
                })?;
                emit(Some(&out.join(format!("{stem}.outcomes.jsonl"))), |w| {
                    Ok(write_outcomes(&r.outcomes, w)?)
                })?;
                print!("{}", r.report.summary());
            }
        }
        Command::Baselines {
            corpus,
            map,
            singletons,
            partition,
            out,
        } => {
            let c = load_corpus(&corpus)?;
            let map = load_punct_map(map.punct_map.as_deref())?;
            let partitions = match partition {
                Some(p) => vec![p],
                None => PartitionFilter::ALL.to_vec(),
            };
            let table = run_baselines::<f64>(&c, map, singletons.policy(), &partitions);
            let mut text = String::new();
            for r in &table.rows {
                text.push_str(&format!(
                    "{:<12} {:<18} {:5.1}  ({}/{}, {} sets)\n",
                    r.selection.partition.label(),
                    r.kind.label(),
                    percent_1dp(r.expected_accuracy),
                    r.exact_numerator,
                    r.exact_denominator,
                    r.sets
                ));
            }
            let to_stderr = emit(out.as_deref(), |w| Ok(write_json(&table, w)?))?;
            say(to_stderr, &text);
        }
        Command::PlotData {
            figure,
            reports,
            out,
        } => {
            let reports = read_reports(&reports)?;
            let rows = emit_plot_data(&reports, figure)?;
            let to_stderr = emit(out.as_deref(), |w| Ok(write_plot_csv(&rows, w)?))?;
            say(
                to_stderr,
                &format!("{} rows for {}\n", rows.len(), figure.label()),
            );
        }
        Command::Compare { reports, out } => {
            let reports = read_reports(&reports)?;
            let cmp = compare(&reports)?;
            let mut text = format!("reference {}\n", cmp.reference);
            for r in &cmp.rows {
                let fmt = |v: Option<f64>| v.map(|v| format!("{v:6.1}")).unwrap_or("   n/a".into());
                text.push_str(&format!(
                    "  {:<24} {:<12} {}  {}\n",
                    r.system_id,
                    r.partition,
                    fmt(r.accuracy_percent),
                    fmt(r.delta_vs_reference)
                ));
            }
            let to_stderr = emit(out.as_deref(), |w| Ok(write_json(&cmp, w)?))?;
            say(to_stderr, &text);
        }
        Command::VerifyReport { report, outcomes } => {
            let r: EvaluationReport = read_report(&report)?;
            let o = load_outcomes(&outcomes)?;
            if rebuild_report(&r, &o)? != r {
                bail!("report {} does not match its outcomes", report.display());
            }
            println!(
                "report {} re-derives from {}",
                report.display(),
                outcomes.display()
            );
        }
        Command::Convert {
            input,
            delimiter,
            synthesize_ids,
            text_col,
            intent_col,
            particle_col,
            translation_col,
            audio_col,
            speaker_col,
            out,
        } => {
            let delimiter = match delimiter {
                Some(c) if c.is_ascii() => c as u8,
                Some(c) => bail!("delimiter '{c}' is not ASCII"),
                None if input.extension().is_some_and(|e| e == "tsv") => b'\t',
                None => b',',
            };
            let ids = |name: &str| (!synthesize_ids).then(|| name.to_string());
            let columns = ColumnMap {
                utterance_id: ids("utterance_id"),
                transcription_id: ids("transcription_id"),
                transcription_text: text_col,
                intent: intent_col,
                wh_particle: particle_col,
                gold_translation: translation_col,
                audio_ref: audio_col,
                speaker: speaker_col,
            };
            let source =
                File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let mut w = create(&out)?;
            let (_, report) =
                convert_delimited(io::BufReader::new(source), delimiter, &columns, &mut w)
                    .map_err(|e| anyhow::anyhow!("corpus: {e}"))?;
            w.flush()?;
            println!(
                "{} records, {} transcriptions, group sizes {:?}",
                report.records, report.transcriptions, report.utterances_per_transcription
            );
        }
        Command::SynthCorpus {
            transcriptions,
            seed,
            out,
        } => {
            let c = synthetic_corpus(transcriptions, seed);
            let to_stderr = emit(out.as_deref(), |w| Ok(serialize_corpus(&c, w)?))?;
            say(to_stderr, &format!("{} utterances written\n", c.len()));
        }
        Command::MockScores {
            corpus,
            policy,
            seed,
            system_id,
            out,
        } => {
            let c = load_corpus(&corpus)?;
            let policy = match policy {
                PolicyArg::Oracle => MockPolicy::Oracle,
                PolicyArg::Adversarial => MockPolicy::Adversarial,
                PolicyArg::SeededRandom => MockPolicy::SeededRandom(seed),
            };
            let file = mock_scores(&build_contrastive_sets(&c), &system_id, policy);
            let to_stderr = emit(out.as_deref(), |w| Ok(write_scores(&file, w)?))?;
            say(
                to_stderr,
                &format!("{} score records written\n", file.records.len()),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
