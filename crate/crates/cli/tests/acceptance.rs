//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails. A criterion that needs data not present on this machine
//! prints NOT RUN with the reason instead of passing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prosodic_contrast::corpus::{
    build_contrastive_sets, corpus_stats, serialize_corpus, ContrastiveSet, Corpus, Intent,
    WhParticle,
};
use prosodic_contrast::metrics::{
    baseline, profiles, BaselineKind, PartitionFilter, Selection, SetProfile, SingletonPolicy,
};
use prosodic_contrast::partition::{
    classify_set, partition_counts, Ambiguity, IntentPunctuationMap, PunctClass,
};
use prosodic_contrast::pipeline::{
    load_corpus, load_scores, run_evaluate, search_maps, EvaluateOptions,
};
use prosodic_contrast::report::{build_report, ReportConfig, SystemInfo};
use prosodic_contrast::scoring::{
    evaluate_system, write_scores, EvalOptions, ScoreFile, ScoreRecord, SystemScores,
};
use prosodic_contrast::synth::{figure1_corpus, mock_scores, synthetic_corpus, MockPolicy};
use prosodic_contrast::SetOutcome;

enum Verdict {
    Pass(String),
    Fail(String),
    NotRun(String),
}

type Check = Result<String, String>;
type Files = BTreeMap<PathBuf, Vec<u8>>;
type Criterion = (&'static str, Box<dyn Fn() -> Verdict>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn write_corpus(c: &Corpus, path: &Path) {
    let mut buf = Vec::new();
    serialize_corpus(c, &mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

fn write_score_file(f: &ScoreFile, path: &Path) {
    let mut buf = Vec::new();
    write_scores(f, &mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

// ---------------------------------------------------------------------------

fn oracle_pipeline() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = synthetic_corpus(60, 11);
    let sets = build_contrastive_sets(&corpus);
    let stats = corpus_stats(&corpus);
    ensure(sets.len() >= 100, || format!("only {} sets", sets.len()))?;
    ensure(Intent::ALL.iter().all(|&i| stats.intent(i) > 0), || {
        "missing intents".into()
    })?;
    let sizes: std::collections::BTreeSet<usize> = sets.iter().map(|s| s.size()).collect();
    ensure(sizes == (1..=4).collect(), || {
        format!("set sizes {sizes:?}")
    })?;

    let corpus_path = dir.path().join("corpus.jsonl");
    write_corpus(&corpus, &corpus_path);
    let oracle_path = dir.path().join("oracle.jsonl");
    let adv_path = dir.path().join("adversarial.jsonl");
    write_score_file(
        &mock_scores(&sets, "oracle", MockPolicy::Oracle),
        &oracle_path,
    );
    write_score_file(
        &mock_scores(&sets, "adversarial", MockPolicy::Adversarial),
        &adv_path,
    );

    let start = Instant::now();
    let c = load_corpus(&corpus_path).map_err(|e| e.to_string())?;
    let oracle = run_evaluate::<f64>(
        &c,
        &load_scores(&oracle_path).map_err(|e| e.to_string())?,
        &EvaluateOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let adv_opts = EvaluateOptions {
        singletons: SingletonPolicy::Exclude,
        ..Default::default()
    };
    let adversarial = run_evaluate::<f64>(
        &c,
        &load_scores(&adv_path).map_err(|e| e.to_string())?,
        &adv_opts,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let o = oracle[0]
        .report
        .accuracy
        .all
        .as_ref()
        .ok_or("no oracle accuracy")?;
    ensure(o.percent == 100.0 && o.correct == o.total, || {
        format!("oracle accuracy {}/{}", o.correct, o.total)
    })?;
    let a = adversarial[0]
        .report
        .accuracy
        .all
        .as_ref()
        .ok_or("no adversarial accuracy")?;
    ensure(a.percent == 0.0 && a.correct == 0, || {
        format!(
            "adversarial non-singleton accuracy {}/{}",
            a.correct, a.total
        )
    })?;
    let wrong_nonsingletons = adversarial[0]
        .outcomes
        .iter()
        .filter(|o| !o.singleton)
        .all(|o| !o.correct);
    ensure(wrong_nonsingletons, || {
        "an adversarial non-singleton set was won".into()
    })?;
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} sets; oracle 100.0 ({}/{}), adversarial 0.0 on {} non-singleton sets; {:.0} ms",
        sets.len(),
        o.correct,
        o.total,
        a.total,
        elapsed.as_secs_f64() * 1e3
    ))
}

// ---------------------------------------------------------------------------

/// Plays one policy on one set, looking only at the set's candidates.
fn play(set: &ContrastiveSet, kind: BaselineKind, rng: &mut ChaCha8Rng) -> bool {
    let cands: Vec<&str> = set.candidates().map(|c| c.candidate_id.as_str()).collect();
    let whq: Vec<&str> = set
        .candidates()
        .filter(|c| c.intent == Intent::WhQuestion)
        .map(|c| c.candidate_id.as_str())
        .collect();
    let pick = match kind {
        BaselineKind::WhqBiasedRandom if !whq.is_empty() => *whq.choose(rng).unwrap(),
        _ => *cands.choose(rng).unwrap(),
    };
    pick == set.gold.candidate_id
}

fn baseline_exactness() -> Check {
    const TRIALS: u64 = 100_000;
    let corpus = synthetic_corpus(60, 11);
    let sets = build_contrastive_sets(&corpus);
    let map = IntentPunctuationMap::default();
    let profs = profiles(&sets, &map);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_2024);
    let mut worst = 0.0f64;
    for p in PartitionFilter::ALL {
        let pool: Vec<&ContrastiveSet> = sets
            .iter()
            .filter(|s| p.admits(classify_set(s, &map)))
            .collect();
        for kind in [BaselineKind::PureRandom, BaselineKind::WhqBiasedRandom] {
            let analytic = baseline::<f64>(kind, &profs, Selection::new(p))
                .map_err(|e| e.to_string())?
                .expected_accuracy;
            let mut wins = 0u64;
            for _ in 0..TRIALS {
                let set = pool[rng.gen_range(0..pool.len())];
                wins += u64::from(play(set, kind, &mut rng));
            }
            let est = wins as f64 / TRIALS as f64;
            let se = (analytic * (1.0 - analytic) / TRIALS as f64).sqrt();
            let z = if se > 0.0 {
                (est - analytic).abs() / se
            } else if est == analytic {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(z);
            ensure(z <= 3.0, || {
                format!(
                    "{} {}: analytic {analytic:.5}, simulated {est:.5}, {z:.2} SE",
                    p.label(),
                    kind.label()
                )
            })?;
        }
    }

    // Three sets with 2, 3 and 4 candidates and no wh-question candidate.
    let intents = [
        Intent::Statement,
        Intent::YesNoQuestion,
        Intent::Command,
        Intent::Request,
    ];
    let sized: Vec<SetProfile> = (2..=4)
        .map(|k| SetProfile {
            gold: intents[0],
            alternatives: intents[1..k].to_vec(),
            ambiguity: Ambiguity::Unambiguous,
        })
        .collect();
    let pure = baseline::<f64>(BaselineKind::PureRandom, &sized, Selection::all())
        .map_err(|e| e.to_string())?
        .expected_accuracy;
    let biased = baseline::<f64>(BaselineKind::WhqBiasedRandom, &sized, Selection::all())
        .map_err(|e| e.to_string())?
        .expected_accuracy;
    let hand = (1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 4.0) / 3.0;
    ensure(
        (pure - 0.3611).abs() <= 1e-4 && (pure - hand).abs() < 1e-15,
        || format!("pure {pure}"),
    )?;
    ensure(pure == biased, || {
        format!("biased {biased} differs from pure {pure}")
    })?;

    // Every set has a wh-question gold.
    let all_wh: Vec<SetProfile> = (1..=4)
        .map(|k| SetProfile {
            gold: Intent::WhQuestion,
            alternatives: intents[..k - 1].to_vec(),
            ambiguity: Ambiguity::Ambiguous,
        })
        .collect();
    let b = baseline::<f64>(BaselineKind::WhqBiasedRandom, &all_wh, Selection::all())
        .map_err(|e| e.to_string())?
        .expected_accuracy;
    ensure(b == 1.0, || format!("all-wh biased baseline {b}"))?;

    Ok(format!(
        "6 partition/policy cells within {worst:.2} SE over {TRIALS} trials; sizes [2,3,4] give {pure:.4}"
    ))
}

// ---------------------------------------------------------------------------

fn partition_correctness() -> Check {
    let sets = build_contrastive_sets(&figure1_corpus());
    let map = IntentPunctuationMap::default();
    let got: BTreeMap<Intent, Ambiguity> = sets
        .iter()
        .map(|s| (s.gold.intent, classify_set(s, &map)))
        .collect();
    let want: BTreeMap<Intent, Ambiguity> = [
        (Intent::Statement, Ambiguity::Unambiguous),
        (Intent::YesNoQuestion, Ambiguity::Ambiguous),
        (Intent::WhQuestion, Ambiguity::Ambiguous),
    ]
    .into();
    ensure(got == want, || format!("classification {got:?}"))?;

    let mut corpora = 0;
    let maps = IntentPunctuationMap::minor_variants();
    for seed in 0..50 {
        let c = synthetic_corpus(seed as usize * 3, seed);
        let sets = build_contrastive_sets(&c);
        for m in &maps {
            let counts = partition_counts(&sets, m);
            ensure(counts.total() == sets.len() as u64, || {
                format!(
                    "seed {seed}: {} + {} != {}",
                    counts.ambiguous,
                    counts.unambiguous,
                    sets.len()
                )
            })?;
        }
        corpora += 1;
    }
    Ok(format!(
        "S unambiguous, YN and WH ambiguous; counts sum to the total on {corpora} corpora x {} maps",
        maps.len()
    ))
}

// ---------------------------------------------------------------------------

fn grid_scores(sets: &[ContrastiveSet], rng: &mut ChaCha8Rng) -> ScoreFile {
    // Log-probabilities on a coarse dyadic grid so ties are common and shifts exact.
    let mut records = Vec::new();
    for s in sets {
        for c in s.candidates() {
            let n = rng.gen_range(1..=3);
            records.push(ScoreRecord {
                system_id: "sys".into(),
                set_id: s.set_id.clone(),
                candidate_id: c.candidate_id.clone(),
                token_logprobs: (0..n)
                    .map(|_| -(rng.gen_range(0..8) as f64) / 4.0)
                    .collect(),
                token_texts: None,
            });
        }
    }
    ScoreFile {
        headers: Vec::new(),
        records,
    }
}

fn random_map(rng: &mut ChaCha8Rng) -> IntentPunctuationMap {
    let bits: [bool; 7] = rng.gen();
    IntentPunctuationMap::from_fn(|i| {
        if bits[i.index()] {
            PunctClass::Question
        } else {
            PunctClass::NonQuestion
        }
    })
}

fn identity_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let corpus = synthetic_corpus(rng.gen_range(1..12), rng.gen());
    let sets = build_contrastive_sets(&corpus);
    let map = if rng.gen_bool(0.5) {
        IntentPunctuationMap::default()
    } else {
        random_map(rng)
    };
    let singletons = if rng.gen_bool(0.5) {
        SingletonPolicy::Include
    } else {
        SingletonPolicy::Exclude
    };
    let file = grid_scores(&sets, rng);
    let scores = SystemScores::from_file(&file, "sys").map_err(|e| e.to_string())?;
    let opts = EvalOptions::default();
    let outcomes: Vec<SetOutcome> =
        evaluate_system(&sets, &scores, &map, &opts).map_err(|e| e.to_string())?;

    let report = build_report(
        &outcomes,
        SystemInfo::new("sys"),
        String::new(),
        ReportConfig::new::<f64>(map, singletons),
    )
    .map_err(|e| e.to_string())?;

    // Independent recount of each partition.
    let mut cells: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for o in &outcomes {
        if o.singleton && singletons == SingletonPolicy::Exclude {
            continue;
        }
        for key in ["all", o.ambiguity.label()] {
            let e = cells.entry(key).or_default();
            e.0 += u64::from(o.correct);
            e.1 += 1;
        }
    }
    for p in PartitionFilter::ALL {
        let expect = cells.get(p.label()).copied();
        let acc = report.accuracy.get(p).as_ref();
        ensure(acc.map(|a| (a.correct, a.total)) == expect, || {
            format!(
                "{}: accuracy cell {:?} vs recount {expect:?}",
                p.label(),
                acc.map(|a| (a.correct, a.total))
            )
        })?;
        let (Some(acc), Some(prf), Some(cm)) =
            (acc, report.intent_prf.get(p), report.confusion.get(p))
        else {
            continue;
        };
        ensure(prf.micro_recall == acc.accuracy, || {
            "micro recall != accuracy".into()
        })?;
        let trace: u64 = (0..7).map(|i| cm.counts[i][i]).sum();
        let total: u64 = cm.counts.iter().flatten().sum();
        ensure(trace as f64 / total as f64 == acc.accuracy, || {
            "diagonal/total != accuracy".into()
        })?;
        for (i, row) in cm
            .normalized
            .as_ref()
            .ok_or("no normalized matrix")?
            .iter()
            .enumerate()
        {
            let s: f64 = row.iter().sum();
            let nonzero = cm.counts[i].iter().any(|&c| c > 0);
            ensure(!nonzero || (s - 1.0).abs() <= 1e-9, || {
                format!("row {i} sums to {s}")
            })?;
        }
    }
    if let (Some(all), Some(a), Some(u)) = (
        report.accuracy.all.as_ref(),
        report.accuracy.ambiguous.as_ref(),
        report.accuracy.unambiguous.as_ref(),
    ) {
        let weighted =
            (a.accuracy * a.total as f64 + u.accuracy * u.total as f64) / all.total as f64;
        ensure((weighted - all.accuracy).abs() <= 1e-12, || {
            format!("weighted mean {weighted} vs overall {}", all.accuracy)
        })?;
    }

    // Uniform shift of one set's scores, and a permutation of its alternatives.
    let shift = -(rng.gen_range(0..16) as f64) / 8.0;
    let mut shifted = file.clone();
    for r in &mut shifted.records {
        r.token_logprobs.iter_mut().for_each(|x| *x += shift);
    }
    let shifted_scores = SystemScores::from_file(&shifted, "sys").map_err(|e| e.to_string())?;
    let mut permuted_sets = sets.clone();
    for s in &mut permuted_sets {
        s.alternatives.shuffle(rng);
    }
    permuted_sets.shuffle(rng);
    let after_shift: Vec<SetOutcome> =
        evaluate_system(&sets, &shifted_scores, &map, &opts).map_err(|e| e.to_string())?;
    let after_perm: Vec<SetOutcome> =
        evaluate_system(&permuted_sets, &scores, &map, &opts).map_err(|e| e.to_string())?;
    for ((o, s), q) in outcomes.iter().zip(&after_shift).zip(&after_perm) {
        ensure(o.predicted_candidate_id == s.predicted_candidate_id, || {
            format!("set {}: prediction changed under shift {shift}", o.set_id)
        })?;
        ensure(
            o.predicted_candidate_id == q.predicted_candidate_id && o.correct == q.correct,
            || format!("set {}: prediction changed under permutation", o.set_id),
        )?;
    }
    Ok(())
}

fn metric_identities() -> Check {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..CASES {
        identity_case(&mut rng).map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok(format!("{CASES} randomized cases"))
}

// ---------------------------------------------------------------------------

const PROSEM_INTENTS: [(Intent, u64); 7] = [
    (Intent::Statement, 1085),
    (Intent::YesNoQuestion, 1047),
    (Intent::WhQuestion, 849),
    (Intent::RhetoricalQuestion, 302),
    (Intent::Command, 175),
    (Intent::Request, 56),
    (Intent::RhetoricalCommand, 38),
];
const PROSEM_PARTICLES: [(WhParticle, u64); 6] = [
    (WhParticle::Who, 1895),
    (WhParticle::What, 877),
    (WhParticle::Where, 199),
    (WhParticle::When, 172),
    (WhParticle::How, 163),
    (WhParticle::HowMany, 246),
];

fn prosem_reproduction() -> Verdict {
    let Some(path) = std::env::var_os("PROSEM_CORPUS").map(PathBuf::from) else {
        return Verdict::NotRun(
            "set PROSEM_CORPUS to a converted corpus file; the dataset is not available here"
                .into(),
        );
    };
    match prosem_checks(&path) {
        Ok(s) => Verdict::Pass(s),
        Err(e) => Verdict::Fail(e),
    }
}

fn prosem_checks(path: &Path) -> Check {
    let corpus = load_corpus(path).map_err(|e| e.to_string())?;
    let sets = build_contrastive_sets(&corpus);
    ensure(sets.len() == 3552, || format!("{} sets", sets.len()))?;
    let stats = corpus_stats(&corpus);
    for (i, n) in PROSEM_INTENTS {
        ensure(stats.intent(i) == n, || {
            format!("{}: {} vs {n}", i.label(), stats.intent(i))
        })?;
    }
    for (p, n) in PROSEM_PARTICLES {
        ensure(stats.particle(p) == n, || {
            format!("{}: {} vs {n}", p.label(), stats.particle(p))
        })?;
    }

    let target = prosodic_contrast::partition::PartitionCounts {
        ambiguous: 1950,
        unambiguous: 1602,
    };
    let found = search_maps(&sets, Some(target));
    let hit = found
        .iter()
        .find(|m| m.distance == Some(0))
        .ok_or_else(|| {
            format!(
                "no minor-intent map gives 1950/1602; default gives {}/{}",
                partition_counts(&sets, &IntentPunctuationMap::default()).ambiguous,
                partition_counts(&sets, &IntentPunctuationMap::default()).unambiguous
            )
        })?;
    let map = hit.map;
    let profs = profiles(&sets, &map);
    let expect = [
        (BaselineKind::PureRandom, PartitionFilter::Ambiguous, 32.3),
        (BaselineKind::PureRandom, PartitionFilter::Unambiguous, 41.3),
        (
            BaselineKind::WhqBiasedRandom,
            PartitionFilter::Ambiguous,
            42.8,
        ),
        (
            BaselineKind::WhqBiasedRandom,
            PartitionFilter::Unambiguous,
            28.6,
        ),
    ];
    let mut got = Vec::new();
    for (kind, p, want) in expect {
        let v = baseline::<f64>(kind, &profs, Selection::new(p))
            .map_err(|e| e.to_string())?
            .expected_accuracy
            * 100.0;
        ensure((v - want).abs() <= 0.1 + 1e-9, || {
            format!("{} {}: {v:.3} vs {want}", kind.label(), p.label())
        })?;
        got.push(format!("{v:.1}"));
    }
    let which = if map == IntentPunctuationMap::default() {
        "default map"
    } else {
        "non-default map"
    };
    Ok(format!(
        "3552 sets, intent and particle counts exact, 1950/1602 under {which}, baselines {}",
        got.join("/")
    ))
}

// ---------------------------------------------------------------------------

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_prosodic-contrast")
}

/// Runs the tool in `dir`; returns stdout and every file the run created.
fn run_cli(dir: &Path, args: &[&str]) -> Result<(Vec<u8>, Files), String> {
    let before: std::collections::BTreeSet<PathBuf> = walk(dir).into_keys().collect();
    let out = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let created = walk(dir)
        .into_iter()
        .filter(|(p, _)| !before.contains(p))
        .collect();
    Ok((out.stdout, created))
}

fn walk(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

fn determinism() -> Check {
    let inputs = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = inputs.path();
    write_corpus(&synthetic_corpus(50, 5), &d.join("corpus.jsonl"));
    std::fs::write(
        d.join("upstream.tsv"),
        "text\tintent\tparticle\ttranslation\n누가 왔어요\tS\t누구\tSomeone came.\n누가 왔어요\tWH\t누구\tWho came?\n뭐 샀대요\tYN\twhat\tDid they buy something?\n",
    )
    .unwrap();

    let c = d.join("corpus.jsonl");
    let c = c.to_str().unwrap();
    let path = |name: &str| d.join(name).to_str().unwrap().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec![
            "synth-corpus",
            "--transcriptions",
            "50",
            "--seed",
            "5",
            "--out",
            "synth.jsonl",
        ],
        vec!["ingest-validate", "--corpus", c, "--out", "stats.json"],
        vec!["build-sets", "--corpus", c, "--out", "sets.jsonl"],
        vec![
            "build-sets",
            "--corpus",
            c,
            "--partition",
            "ambiguous",
            "--exclude-singletons",
        ],
        vec![
            "partition-stats",
            "--corpus",
            c,
            "--search-maps",
            "--out",
            "partition.json",
        ],
        vec!["baselines", "--corpus", c, "--out", "baselines.json"],
        vec![
            "mock-scores",
            "--corpus",
            c,
            "--policy",
            "seeded-random",
            "--seed",
            "9",
            "--system-id",
            "rand",
            "--out",
            "rand.jsonl",
        ],
        vec![
            "mock-scores",
            "--corpus",
            c,
            "--policy",
            "oracle",
            "--system-id",
            "oracle",
        ],
        vec![
            "convert",
            "--input",
            &path("upstream.tsv"),
            "--synthesize-ids",
            "--text-col",
            "text",
            "--particle-col",
            "particle",
            "--translation-col",
            "translation",
            "--out",
            "converted.jsonl",
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    // Score files shared by the downstream commands.
    let sets = build_contrastive_sets(&synthetic_corpus(50, 5));
    let mut scores = mock_scores(&sets, "rand", MockPolicy::SeededRandom(9));
    let oracle = mock_scores(&sets, "oracle", MockPolicy::Oracle);
    scores.headers.extend(oracle.headers);
    scores.records.extend(oracle.records);
    write_score_file(&scores, &d.join("scores.jsonl"));
    let s = path("scores.jsonl");

    let mut checked = 0;
    let compare_runs = |args: &[String]| -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let ra = run_cli(a.path(), &args)?;
        let rb = run_cli(b.path(), &args)?;
        ensure(ra.0 == rb.0, || {
            format!("stdout differs for {}", args.join(" "))
        })?;
        ensure(ra.1 == rb.1, || {
            format!("files differ for {}", args.join(" "))
        })?;
        Ok(ra.1)
    };
    for cmd in &commands {
        compare_runs(cmd)?;
        checked += 1;
    }

    let eval = |jobs: &str| -> Vec<String> {
        [
            "evaluate", "--corpus", c, "--scores", &s, "--jobs", jobs, "--out", "reports",
        ]
        .into_iter()
        .map(String::from)
        .collect()
    };
    let serial = compare_runs(&eval("1"))?;
    let parallel = compare_runs(&eval("4"))?;
    ensure(serial == parallel, || {
        "--jobs 4 output differs from --jobs 1".into()
    })?;
    checked += 2;

    let oracle_report: serde_json::Value =
        serde_json::from_slice(&serial[Path::new("reports/oracle.report.json")])
            .map_err(|e| e.to_string())?;
    ensure(oracle_report["accuracy"]["all"]["percent"] == 100.0, || {
        "oracle report is not 100.0".into()
    })?;

    // Downstream commands read the evaluate outputs.
    let reports = d.join("reports");
    std::fs::create_dir_all(&reports).unwrap();
    for (p, bytes) in &serial {
        std::fs::write(d.join(p), bytes).unwrap();
    }
    let rep = |name: &str| reports.join(name).to_str().unwrap().to_string();
    let mut downstream: Vec<Vec<String>> = Vec::new();
    for fig in [
        "figure2",
        "figure3",
        "figure4",
        "intent-full",
        "figure8",
        "table2",
    ] {
        downstream.push(vec![
            "plot-data".into(),
            "--figure".into(),
            fig.into(),
            rep("oracle.report.json"),
            rep("rand.report.json"),
            "--out".into(),
            format!("{fig}.csv"),
        ]);
    }
    downstream.push(vec![
        "compare".into(),
        rep("oracle.report.json"),
        rep("rand.report.json"),
        "--out".into(),
        "compare.json".into(),
    ]);
    downstream.push(vec![
        "verify-report".into(),
        "--report".into(),
        rep("rand.report.json"),
        "--outcomes".into(),
        rep("rand.outcomes.jsonl"),
    ]);
    for cmd in &downstream {
        compare_runs(cmd)?;
        checked += 1;
    }
    Ok(format!(
        "{checked} command invocations byte-identical across two runs (stdout and files)"
    ))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "oracle pipeline",
            Box::new(|| oracle_pipeline().into_verdict()),
        ),
        (
            "baseline exactness",
            Box::new(|| baseline_exactness().into_verdict()),
        ),
        (
            "partition correctness",
            Box::new(|| partition_correctness().into_verdict()),
        ),
        (
            "metric identities",
            Box::new(|| metric_identities().into_verdict()),
        ),
        (
            "dataset reproduction (ProSem)",
            Box::new(prosem_reproduction),
        ),
        ("determinism", Box::new(|| determinism().into_verdict())),
    ];
    let (mut pass, mut fail, mut not_run) = (0, 0, 0);
    println!();
    for (name, check) in criteria {
        match check() {
            Verdict::Pass(d) => {
                pass += 1;
                println!("PASS     {name}: {d}");
            }
            Verdict::Fail(d) => {
                fail += 1;
                println!("FAIL     {name}: {d}");
            }
            Verdict::NotRun(d) => {
                not_run += 1;
                println!("NOT RUN  {name}: {d}");
            }
        }
    }
    println!("\nacceptance: {pass} passed, {fail} failed, {not_run} not run\n");
    if fail > 0 {
        std::process::exit(1);
    }
}

trait IntoVerdict {
    fn into_verdict(self) -> Verdict;
}

impl IntoVerdict for Check {
    fn into_verdict(self) -> Verdict {
        match self {
            Ok(s) => Verdict::Pass(s),
            Err(e) => Verdict::Fail(e),
        }
    }
}
