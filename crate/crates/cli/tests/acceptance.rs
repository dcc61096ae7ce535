//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use apekit_core::analysis::upsample_mix;
use apekit_core::filter::{run_filter_pipeline, FilterConfig, LanguageIdSource};
use apekit_core::metrics::bleu::BleuStats;
use apekit_core::metrics::ter::{oracle_tokens, shift_free_distance, ter_tokens};
use apekit_core::metrics::{bleu_corpus, chrf, ter_corpus, ter_sentence, TokenizerConfig};
use apekit_core::stats::{bootstrap_significance, cohen_kappa, weighted_kappa};
use apekit_core::{Corpus, Triplet};
use common::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn sequences(vocab: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut all = vec![Vec::new()];
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                vocab.iter().map(move |w| {
                    let mut t = s.clone();
                    t.push(w.to_string());
                    t
                })
            })
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn bounds_hold(h: &[String], r: &[String]) -> bool {
    let greedy = ter_tokens(h, r).0.total();
    oracle_tokens(h, r, 3) <= greedy && greedy <= shift_free_distance(h, r)
}

/// (hypothesis, reference, edits, reference length), scored by hand.
const CURATED: [(&str, &str, u64, u64); 20] = [
    ("b a c", "a b c", 1, 3),
    ("a b c", "a b c", 0, 3),
    ("a b d", "a b c", 1, 3),
    ("a b", "a b c", 1, 3),
    ("a b c d", "a b c", 1, 3),
    ("", "a b", 2, 2),
    ("x y z", "a b c", 3, 3),
    ("c a b", "a b c", 1, 3),
    ("d e f a b c", "a b c d e f", 1, 6),
    ("a c b d", "a b c d", 1, 4),
    ("the cat sat", "the cat sat on the mat", 3, 6),
    ("a b c x", "a b c y", 1, 4),
    ("a a b", "a b", 1, 2),
    ("b c a", "a b c", 1, 3),
    ("a b c", "a", 2, 1),
    ("x b a c", "a b c", 2, 3),
    ("c d a b", "a b c d", 1, 4),
    ("A b c", "a b c", 1, 3),
    ("a x c", "a b c", 1, 3),
    ("b a d c", "a b c d", 2, 4),
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let seqs = sequences(&["a", "b", "c"], 5);
    let mut pairs = 0usize;
    let mut violations = 0usize;
    for h in &seqs {
        for r in seqs.iter().filter(|r| !r.is_empty()) {
            pairs += 1;
            violations += usize::from(!bounds_hold(h, r));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let vocab = ["a", "b", "c", "d", "e"];
    for _ in 0..1000 {
        let h: Vec<String> = (0..rng.random_range(0..=8)).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect();
        let r: Vec<String> = (0..rng.random_range(1..=8)).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect();
        pairs += 1;
        violations += usize::from(!bounds_hold(&h, &r));
    }
    ensure!(violations == 0, "{violations} bound violations over {pairs} pairs");
    for (h, r, edits, len) in CURATED {
        let (score, _) = ter_sentence(h, r, &TokenizerConfig::WHITESPACE).map_err(|e| e.to_string())?;
        ensure!(
            score.edits.total() == edits && score.ref_len == len,
            "`{h}` vs `{r}`: got {}/{}, expected {edits}/{len}",
            score.edits.total(),
            score.ref_len
        );
    }
    let (shift_case, _) = ter_sentence("b a c", "a b c", &TokenizerConfig::WHITESPACE).unwrap();
    ensure!(shift_case.score == 1.0 / 3.0, "shift case scored {}", shift_case.score);
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{pairs} pairs, 0 violations, 20/20 curated, {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let refs = ["the cat sat on the mat", "a quick brown fox jumps over the lazy dog"];
    let identity = bleu_corpus(&refs, &refs, &TokenizerConfig::BLEU).map_err(|e| e.to_string())?.score;
    ensure!((identity - 100.0).abs() <= 1e-6, "BLEU identity {identity}");

    let clipped = BleuStats::from_tokens(&toks("the the the the the the the"), &toks("the cat is on the mat"));
    let p1 = clipped.precisions()[0];
    ensure!((p1 - 2.0 / 7.0).abs() <= 1e-9, "clipped unigram precision {p1}");

    let c = chrf(&["ab"], &["abc"], 1, 2.0).map_err(|e| e.to_string())?;
    ensure!((c - 71.4286).abs() <= 1e-3, "chrF {c}");

    let t = ter_corpus(&["a x", "a b c d e f g h"], &["a b", "a b c d e f g h"], &TokenizerConfig::WHITESPACE)
        .map_err(|e| e.to_string())?;
    ensure!(t.score == 0.1, "ter_corpus {}", t.score);
    Ok(format!("bleu={identity} p1={p1:.9} chrf={c:.4} ter={}", t.score))
}

const WORDS: &[&str] = &[
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet", "kilo", "lima",
];

fn phrase(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// A string of exactly `n` characters that starts with a unique tag.
fn sized(tag: &str, n: usize, rng: &mut ChaCha8Rng) -> String {
    let mut s = format!("{tag} ");
    while s.len() < n {
        s.push_str(&phrase(rng, 1));
        s.push(' ');
    }
    s.truncate(n);
    s.trim_end().to_string() + &"x".repeat(n - s.trim_end().len())
}

struct Planted {
    corpus: Corpus,
    outliers: Vec<String>,
    /// Duplicate groups: every id in the group and the id that must survive.
    dup_groups: Vec<(Vec<String>, String)>,
}

fn planted_corpus(seed: u64) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Triplet> = Vec::with_capacity(10_000);
    for i in 0..9_300 {
        let len = rng.random_range(30..60);
        let src = sized(&format!("s{i}"), len, &mut rng);
        let pe = sized(&format!("p{i}"), len, &mut rng);
        rows.push(Triplet::new(format!("n{i}"), src, format!("m{i} {}", phrase(&mut rng, 4)), pe));
    }
    let mut outliers = Vec::new();
    for i in 0..500 {
        let len = rng.random_range(20..40);
        let src = sized(&format!("o{i}"), 3 * len, &mut rng);
        let pe = sized(&format!("q{i}"), len, &mut rng);
        outliers.push(format!("o{i}"));
        rows.push(Triplet::new(format!("o{i}"), src, format!("mo{i}"), pe));
    }
    let mut dup_groups = Vec::new();
    for k in 0..200 {
        let orig = rows[k * 40].clone();
        let longer = k % 2 == 0;
        let mut pe = orig.pe.clone();
        if longer {
            pe.push('y');
        } else {
            pe.pop();
        }
        let id = format!("d{k}");
        let survivor = if longer { id.clone() } else { orig.id.clone() };
        dup_groups.push((vec![orig.id.clone(), id.clone()], survivor));
        rows.push(Triplet::new(id, orig.src.clone(), orig.mt.clone(), pe));
    }
    rows.shuffle(&mut rng);
    Planted {
        corpus: Corpus::from_triplets(rows).with_langs("en", "de"),
        outliers,
        dup_groups,
    }
}

fn no_langid(dev: usize, test: usize, seed: u64) -> FilterConfig {
    FilterConfig {
        dev_size: dev,
        test_size: test,
        seed,
        language_id: LanguageIdSource::Off,
        ..FilterConfig::default()
    }
}

fn criterion_3() -> Outcome {
    let planted = planted_corpus(17);
    let corpus = &planted.corpus;
    ensure!(corpus.len() == 10_000, "generated {} triplets", corpus.len());
    let config = no_langid(500, 500, 99);
    let classifier = config.classifier().map_err(|e| e.to_string())?;

    let start = Instant::now();
    let run = run_filter_pipeline(corpus, &config, classifier.as_ref()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rep = &run.report;

    let r_c = rep.r_c.r_c;
    for t in corpus.iter().filter(|t| t.id.starts_with('o')) {
        let ratio = t.src.chars().count() as f64 / t.pe.chars().count() as f64;
        ensure!(ratio > 1.5 * r_c, "planted outlier {} has ratio {ratio}, r_c {r_c}", t.id);
    }
    ensure!(rep.reconciles(), "report does not reconcile");
    ensure!(
        rep.input_count == rep.kept_count + rep.removed_by_ratio + rep.removed_by_dedup + rep.removed_by_langid,
        "counts do not add up"
    );
    let kept: HashMap<&str, &Triplet> = [&run.split.train, &run.split.dev, &run.split.test]
        .into_iter()
        .flat_map(|c| c.iter())
        .map(|t| (t.id.as_str(), t))
        .collect();
    ensure!(planted.outliers.iter().all(|o| !kept.contains_key(o.as_str())), "an outlier survived");
    for (group, survivor) in &planted.dup_groups {
        let present: Vec<&String> = group.iter().filter(|id| kept.contains_key(id.as_str())).collect();
        ensure!(present == vec![survivor], "duplicate group {group:?} kept {present:?}, expected {survivor}");
    }
    ensure!(rep.removed_by_ratio == 500, "ratio removed {}", rep.removed_by_ratio);
    ensure!(rep.removed_by_dedup == 200, "dedup removed {}", rep.removed_by_dedup);
    let sizes = run.split.sizes();
    ensure!(
        (sizes.train, sizes.dev, sizes.test) == (8_300, 500, 500),
        "split sizes {sizes:?}"
    );

    let again = run_filter_pipeline(corpus, &config, classifier.as_ref()).map_err(|e| e.to_string())?;
    ensure!(again.split == run.split && again.report == run.report, "second run differs");
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "kept {} removed {}+{}+{}, splits 8300/500/500, {:.2}s",
        rep.kept_count,
        rep.removed_by_ratio,
        rep.removed_by_dedup,
        rep.removed_by_langid,
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let corpus = Corpus::from_triplets(
        (0..161_413)
            .map(|i| {
                let s = format!("source {i:06}");
                let p = format!("target {i:06}");
                Triplet::new(format!("{i}"), s, format!("mt {i}"), p)
            })
            .collect(),
    );
    let config = no_langid(10_000, 10_000, 1);
    let classifier = config.classifier().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let run = run_filter_pipeline(&corpus, &config, classifier.as_ref()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let s = run.split.sizes();
    ensure!((s.train, s.dev, s.test) == (141_413, 10_000, 10_000), "split sizes {s:?}");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("train {} dev {} test {}, {:.2}s", s.train, s.dev, s.test, elapsed.as_secs_f64()))
}

fn subtitle_part(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..6);
    let mut s = phrase(rng, n);
    match rng.random_range(0..4) {
        0 => s = format!("<i>{s}</i>"),
        1 => s = format!("<font color=\"#ffff00\">{s}</font>"),
        2 => {
            let words: Vec<&str> = s.split(' ').collect();
            let k = rng.random_range(0..words.len());
            let mut w: Vec<String> = words.iter().map(|x| x.to_string()).collect();
            w[k] = format!("<b>{}</b>", w[k]);
            s = w.join(" ");
        }
        _ => {}
    }
    match rng.random_range(0..4) {
        0 => s = format!("\u{266A} {s} \u{266A}"),
        1 => s = format!("{s} \u{266B}"),
        2 => s = format!("\u{266A}{s}"),
        _ => {}
    }
    if rng.random_bool(0.4) {
        s = format!("{}{s}", if rng.random_bool(0.7) { "- " } else { "-" });
    }
    if rng.random_bool(0.1) {
        s = format!(" {s}  ");
    }
    s
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let breaks = ["<br>", "<br/>", "<br />", "<BR>"];
    let rows: Vec<(String, String, String, String)> = (0..1000)
        .map(|i| {
            let parts = rng.random_range(1..=3);
            let mut fields = Vec::new();
            for _ in 0..3 {
                let mut f = subtitle_part(&mut rng);
                for _ in 1..parts {
                    f.push_str(breaks.choose(&mut rng).unwrap());
                    f.push_str(&subtitle_part(&mut rng));
                }
                fields.push(f);
            }
            (format!("sub{i}"), fields[0].clone(), fields[1].clone(), fields[2].clone())
        })
        .collect();

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let raw = dir.path().join("raw.jsonl");
    std::fs::write(&raw, jsonl(&rows)).map_err(|e| e.to_string())?;
    let cleaned = dir.path().join("clean.jsonl");
    let log = dir.path().join("changes.json");
    let run = apekit(&["preprocess", "--in", p(&raw), "--out", p(&cleaned), "--changelog", p(&log)]);
    ensure!(code(&run) == 0, "preprocess failed: {}", String::from_utf8_lossy(&run.stderr));

    let outputs: Vec<String> = std::fs::read_to_string(&cleaned)
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["mt"].as_str().unwrap().to_string())
        .collect();
    let out_file = dir.path().join("mt.out");
    write_lines(&out_file, &outputs);
    let restored = dir.path().join("mt.restored");
    let run = apekit(&["postprocess", "--in", p(&out_file), "--lines", "--changelog", p(&log), "--out", p(&restored)]);
    ensure!(code(&run) == 0, "postprocess failed: {}", String::from_utf8_lossy(&run.stderr));

    let text = std::fs::read_to_string(&restored).map_err(|e| e.to_string())?;
    let back: Vec<&str> = text.strip_suffix('\n').unwrap_or(&text).split('\n').collect();
    ensure!(back.len() == 1000, "{} restored lines", back.len());
    let identical = rows.iter().zip(&back).filter(|(r, b)| r.2.as_bytes() == b.as_bytes()).count();
    ensure!(identical == 1000, "{identical}/1000 identical");
    let split = outputs.len() - rows.len();
    Ok(format!("1000/1000 byte-identical, {} cleaned segments ({split} from splits)", outputs.len()))
}

fn criterion_6() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-6;
    let err = |e: apekit_core::Error| e.to_string();
    ensure!(close(cohen_kappa(&[1, 1, 2, 2], &[2, 2, 1, 1]).map_err(err)?.kappa, -1.0), "kappa -1 fixture");
    ensure!(close(cohen_kappa(&[1, 2, 1, 2], &[1, 2, 2, 2]).map_err(err)?.kappa, 0.5), "kappa 0.5 fixture");
    ensure!(close(cohen_kappa(&[1, 2, 3, 1], &[1, 2, 3, 1]).map_err(err)?.kappa, 1.0), "kappa 1 fixture");
    // Hand table, scale 1..3: observed weighted disagreement 1, expected 1/2.
    let w = weighted_kappa(&[1, 3], &[3, 1], 1, 3).map_err(err)?;
    ensure!(close(w.kappa, -1.0), "weighted kappa {}", w.kappa);
    ensure!(close(1.0 - w.observed_agreement, 1.0) && close(1.0 - w.expected_agreement, 0.5), "weighted table");

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let refs: Vec<String> = (0..40).map(|_| phrase(&mut rng, 8)).collect();
    let hyps: Vec<String> = refs.iter().map(|r| r.replacen("alpha", "zulu", 1)).collect();
    for seed in 0..100u64 {
        let res = bootstrap_significance(&hyps, &hyps, &refs, 1000, seed).map_err(err)?;
        ensure!(res.p_value == 1.0, "seed {seed}: p = {}", res.p_value);
        ensure!(!res.significant(0.05) && !res.significant(0.999), "seed {seed} declared significant");
    }
    let other: Vec<String> = refs.iter().map(|r| r.replacen("bravo", "zulu", 1)).collect();
    let a = bootstrap_significance(&hyps, &other, &refs, 1000, 77).map_err(err)?;
    let b = bootstrap_significance(&hyps, &other, &refs, 1000, 77).map_err(err)?;
    ensure!(
        a == b && a.p_value.to_bits() == b.p_value.to_bits(),
        "bootstrap differs between identical runs"
    );
    Ok(format!("kappa fixtures ok, 100/100 identical-system runs p=1.0, deterministic (p={})", a.p_value))
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rows: Vec<_> = (0..1300)
        .map(|i| (format!("t{i}"), phrase(&mut rng, 6), phrase(&mut rng, 6), phrase(&mut rng, 6)))
        .collect();
    let corpus = dir.path().join("train.jsonl");
    std::fs::write(&corpus, jsonl(&rows)).map_err(|e| e.to_string())?;
    let out = dir.path().join("ablation");
    let run = apekit(&[
        "ablate", "--in", p(&corpus), "--sizes", "62,125,250,500,1000,1250", "--replicates", "3", "--scorer", "mock",
        "--seed", "11", "--out", p(&out),
    ]);
    ensure!(code(&run) == 0, "ablate failed: {}", String::from_utf8_lossy(&run.stderr));
    let samples = json_file(&out.join("samples.json"));
    let n_samples = samples["samples"].as_array().map_or(0, Vec::len);
    let files = std::fs::read_dir(out.join("samples")).map_err(|e| e.to_string())?.count();
    ensure!(n_samples == 18 && files == 18, "{n_samples} samples listed, {files} files");
    let curve = json_file(&out.join("curve.json"));
    let points = curve["curve"]["points"].as_array().cloned().unwrap_or_default();
    ensure!(points.len() == 6, "{} curve points", points.len());
    for pt in &points {
        let (mean, min, max) = (pt["mean"].as_f64().unwrap(), pt["min"].as_f64().unwrap(), pt["max"].as_f64().unwrap());
        ensure!(min <= mean && mean <= max, "point {pt}");
    }

    let refs: Vec<String> = (0..200)
        .map(|_| {
            let n = rng.random_range(3..12);
            phrase(&mut rng, n)
        }).collect();
    let base: Vec<String> = refs
        .iter()
        .map(|r| {
            let mut w: Vec<&str> = r.split(' ').collect();
            let cut = rng.random_range(0..=w.len());
            w.truncate(cut);
            w.join(" ")
        })
        .collect();
    let (b, r) = (dir.path().join("base.txt"), dir.path().join("ref.txt"));
    write_lines(&b, &base);
    write_lines(&r, &refs);
    let bout = dir.path().join("buckets");
    let run = apekit(&["buckets", "--baseline", p(&b), "--ape", p(&b), "--ref", p(&r), "--out", p(&bout)]);
    ensure!(code(&run) == 0, "buckets failed: {}", String::from_utf8_lossy(&run.stderr));
    let report = json_file(&bout.join("buckets.json"));
    let buckets = report["analysis"]["buckets"].as_array().cloned().unwrap_or_default();
    ensure!(buckets.len() == 10, "{} buckets", buckets.len());
    let total: u64 = buckets.iter().map(|b| b["count"].as_u64().unwrap()).sum();
    ensure!(total == 200, "bucket counts sum to {total}");
    ensure!(
        buckets.iter().all(|b| b["delta_ter"].is_null() || b["delta_ter"].as_f64() == Some(0.0)),
        "non-zero delta with identical outputs"
    );
    let used = buckets.iter().filter(|b| b["count"].as_u64() > Some(0)).count();
    Ok(format!("18 samples, 6 points, 10 buckets ({used} non-empty), zero deltas"))
}

fn criterion_8() -> Outcome {
    let a = Corpus::from_triplets((0..1414).map(|i| Triplet::new(format!("a{i}"), "s", "m", "p")).collect());
    let b = Corpus::from_triplets((0..5600).map(|i| Triplet::new(format!("b{i}"), "s", "m", "p")).collect());
    let mixed = upsample_mix(&a, 10, &b, 8).map_err(|e| e.to_string())?;
    ensure!(mixed.len() == 19_740, "{} triplets", mixed.len());
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &mixed {
        if let Some(src) = t.meta_value("source_id") {
            *counts.entry(src).or_default() += 1;
        }
    }
    ensure!(counts.len() == 1414, "{} distinct ids of a", counts.len());
    ensure!(counts.values().all(|&c| c == 10), "an id of a is not repeated 10 times");
    Ok("19740 triplets, every id of a 10 times".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("TER oracle bounds", criterion_1),
        ("metric fixtures", criterion_2),
        ("filter pipeline", criterion_3),
        ("split arithmetic", criterion_4),
        ("subtitle round trip", criterion_5),
        ("statistics", criterion_6),
        ("protocol shape", criterion_7),
        ("mixing", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
