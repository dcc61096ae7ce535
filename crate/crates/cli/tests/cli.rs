mod common;

use std::path::Path;

use common::*;
use serde_json::Value;

fn small_corpus(dir: &Path, n: usize) -> std::path::PathBuf {
    let rows: Vec<_> = (0..n)
        .map(|i| {
            (
                format!("r{i}"),
                format!("source sentence number {i}"),
                format!("maschinelle Übersetzung {i}"),
                format!("Nachbearbeitung Nummer {i}"),
            )
        })
        .collect();
    let path = dir.join("corpus.jsonl");
    std::fs::write(&path, jsonl(&rows)).unwrap();
    path
}

fn no_langid_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("filter.json");
    std::fs::write(&path, format!("{{\"language_id\": {{\"kind\": \"off\"}}{extra}}}")).unwrap();
    path
}

#[test]
fn filter_writes_splits_and_reconciling_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = small_corpus(dir.path(), 60);
    let cfg = no_langid_config(dir.path(), ", \"dev_size\": 5, \"test_size\": 7");
    let out = dir.path().join("out");
    let run = apekit(&["filter", "--in", p(&input), "--out", p(&out), "--config", p(&cfg), "--seed", "3"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["train.jsonl", "dev.jsonl", "test.jsonl", "removed.jsonl", "filter_report.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report = json_file(&out.join("filter_report.json"));
    let r = &report["report"];
    assert_eq!(r["t"], 0.2);
    assert_eq!(r["split_sizes"]["dev"], 5);
    assert_eq!(r["split_sizes"]["test"], 7);
    let kept = r["kept_count"].as_u64().unwrap();
    let removed = ["removed_by_ratio", "removed_by_dedup", "removed_by_langid"]
        .iter()
        .map(|k| r[k].as_u64().unwrap())
        .sum::<u64>();
    assert_eq!(kept + removed, 60);
    assert_eq!(report["manifest"]["seeds"]["split"], 3);

    // Same inputs and seed: identical report apart from the timestamp.
    let out2 = dir.path().join("out2");
    let run = apekit(&["filter", "--in", p(&input), "--out", p(&out2), "--config", p(&cfg), "--seed", "3", "--threads", "1"]);
    assert_eq!(code(&run), 0);
    assert_eq!(
        without_timestamp(json_file(&out.join("filter_report.json"))),
        without_timestamp(json_file(&out2.join("filter_report.json")))
    );
    assert_eq!(
        std::fs::read(out.join("dev.jsonl")).unwrap(),
        std::fs::read(out2.join("dev.jsonl")).unwrap()
    );
}

#[test]
fn filter_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let run = apekit(&["filter", "--in", p(&missing), "--out", p(dir.path())]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("nope.jsonl"));

    let input = small_corpus(dir.path(), 10);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"t\": 0.2, \"bogus\": 1}").unwrap();
    let run = apekit(&["filter", "--in", p(&input), "--out", p(dir.path()), "--config", p(&bad)]);
    assert_eq!(code(&run), 1);

    let cfg = no_langid_config(dir.path(), ", \"t\": 1.5");
    assert_eq!(code(&apekit(&["filter", "--in", p(&input), "--out", p(dir.path()), "--config", p(&cfg)])), 1);

    // Default holdout sizes do not fit a ten-line corpus.
    let cfg = no_langid_config(dir.path(), "");
    assert_eq!(code(&apekit(&["filter", "--in", p(&input), "--out", p(dir.path()), "--config", p(&cfg)])), 2);

    assert_eq!(code(&apekit(&["filter", "--bogus-flag"])), 1);
}

#[test]
fn preprocess_postprocess_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        ("a".to_string(), "- Hi.<br>- Bye.".to_string(), "- Hallo.<br>- Tschüss.".to_string(), "- Hallo!<br>- Tschüss!".to_string()),
        ("b".to_string(), "<i>Run!</i>".to_string(), "<i>Lauf!</i> \u{266A}".to_string(), "<i>Renn!</i>".to_string()),
        ("c".to_string(), "plain".to_string(), "schlicht".to_string(), "einfach".to_string()),
    ];
    let input = dir.path().join("raw.jsonl");
    std::fs::write(&input, jsonl(&rows)).unwrap();
    let cleaned = dir.path().join("clean.jsonl");
    let log = dir.path().join("log.json");
    let run = apekit(&["preprocess", "--in", p(&input), "--out", p(&cleaned), "--changelog", p(&log)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let clean_lines = std::fs::read_to_string(&cleaned).unwrap().lines().count();
    assert_eq!(clean_lines, 4);

    // Unmodified outputs as plain lines.
    let mt_lines: Vec<String> = std::fs::read_to_string(&cleaned)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["mt"].as_str().unwrap().to_string())
        .collect();
    let outputs = dir.path().join("out.txt");
    write_lines(&outputs, &mt_lines);
    let restored = dir.path().join("restored.txt");
    let run = apekit(&["postprocess", "--in", p(&outputs), "--lines", "--changelog", p(&log), "--out", p(&restored)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let mt_file = dir.path().join("mt.txt");
    write_lines(&mt_file, &rows.iter().map(|r| r.2.clone()).collect::<Vec<_>>());
    assert_eq!(std::fs::read(&restored).unwrap(), std::fs::read(&mt_file).unwrap());
    assert_eq!(stdout_json(&run)["irrecoverable"], 0);

    // The cleaned corpus itself, field pe.
    let run = apekit(&["postprocess", "--in", p(&cleaned), "--changelog", p(&log), "--out", p(&restored), "--field", "pe"]);
    assert_eq!(code(&run), 0);
    let pe: Vec<String> = rows.iter().map(|r| r.3.clone()).collect();
    assert_eq!(std::fs::read_to_string(&restored).unwrap(), pe.join("\n") + "\n");

    // A changelog from another corpus is rejected.
    let other = dir.path().join("other.jsonl");
    let mut rows2 = rows.clone();
    rows2[2].1 = "different".into();
    std::fs::write(&other, jsonl(&rows2)).unwrap();
    let log2 = dir.path().join("log2.json");
    let run = apekit(&["preprocess", "--in", p(&other), "--out", p(&dir.path().join("c2.jsonl")), "--changelog", p(&log2)]);
    assert_eq!(code(&run), 0);
    let run = apekit(&["postprocess", "--in", p(&cleaned), "--changelog", p(&log2), "--out", p(&restored)]);
    assert_eq!(code(&run), 2);
    // Wrong segment count in line mode.
    write_lines(&outputs, &mt_lines[..3]);
    let run = apekit(&["postprocess", "--in", p(&outputs), "--lines", "--changelog", p(&log), "--out", p(&restored)]);
    assert_eq!(code(&run), 2);
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn evaluate_identity_and_golden_report() {
    let hyp = fixture("eval_hyp.txt");
    let reference = fixture("eval_ref.txt");
    let run = apekit(&["evaluate", "--hyp", p(&reference), "--ref", p(&reference)]);
    assert_eq!(code(&run), 0);
    let v = stdout_json(&run);
    assert_eq!(v["system"]["bleu"], 100.0);
    assert_eq!(v["system"]["chrf"], 100.0);
    assert_eq!(v["system"]["ter"], 0.0);

    let run = apekit(&["evaluate", "--hyp", p(&hyp), "--ref", p(&reference)]);
    assert_eq!(code(&run), 0);
    let got = without_timestamp(stdout_json(&run));
    let golden = fixture("evaluate_golden.json");
    if std::env::var_os("APEKIT_BLESS").is_some() {
        std::fs::write(&golden, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&golden).unwrap()).unwrap();
    assert_eq!(got, want);
    // Key order in the raw output is fixed too.
    let text = String::from_utf8(run.stdout).unwrap();
    let order: Vec<usize> = ["\"manifest\"", "\"options\"", "\"segments\"", "\"system\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn evaluate_two_systems_adds_bootstrap() {
    let hyp = fixture("eval_hyp.txt");
    let reference = fixture("eval_ref.txt");
    let run = apekit(&["evaluate", "--hyp", p(&hyp), "--ref", p(&reference), "--hyp-b", p(&hyp), "--seed", "9"]);
    assert_eq!(code(&run), 0);
    let v = stdout_json(&run);
    assert_eq!(v["bootstrap"]["n_samples"], 1000);
    assert_eq!(v["bootstrap"]["p_value"], 1.0);

    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.txt");
    write_lines(&short, &["one".to_string()]);
    assert_eq!(code(&apekit(&["evaluate", "--hyp", p(&short), "--ref", p(&reference)])), 2);
    assert_eq!(code(&apekit(&["evaluate", "--hyp", p(&hyp), "--ref", p(&reference), "--config", p(&hyp)])), 1);
}

#[test]
fn significance_reports_winner() {
    let dir = tempfile::tempdir().unwrap();
    let refs: Vec<String> = (0..30).map(|i| format!("the quick brown fox {i} jumps")).collect();
    let empty = vec!["nothing".to_string(); 30];
    let (a, b, r) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("r"));
    write_lines(&a, &refs);
    write_lines(&b, &empty);
    write_lines(&r, &refs);
    let run = apekit(&["significance", "--hyp-a", p(&a), "--hyp-b", p(&b), "--ref", p(&r), "--samples", "200"]);
    assert_eq!(code(&run), 0);
    let v = stdout_json(&run);
    assert_eq!(v["result"]["wins_a"], 200);
    assert_eq!(v["significant"], true);
    let run = apekit(&["significance", "--hyp-a", p(&a), "--hyp-b", p(&b), "--ref", p(&r), "--metric", "ter", "--samples", "50"]);
    assert_eq!(stdout_json(&run)["result"]["winner"], "A");
}

fn ratings_csv(dir: &Path, annotators: &[(&str, [[u8; 3]; 4])]) -> std::path::PathBuf {
    let mut s = String::from("annotator_id,item_id,system,score\n");
    for (name, items) in annotators {
        for (i, scores) in items.iter().enumerate() {
            for (sys, v) in ["nmt", "ape", "human"].iter().zip(scores) {
                let v = if *v == 0 { "X".to_string() } else { v.to_string() };
                s += &format!("{name},item{i},{sys},{v}\n");
            }
        }
    }
    let path = dir.join("ratings.csv");
    std::fs::write(&path, s).unwrap();
    path
}

#[test]
fn agreement_and_adequacy() {
    let dir = tempfile::tempdir().unwrap();
    let items = [[1, 3, 5], [2, 4, 5], [3, 3, 4], [1, 2, 5]];
    let csv = ratings_csv(dir.path(), &[("ann1", items), ("ann2", items)]);
    let run = apekit(&["agreement", "--in", p(&csv)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let v = stdout_json(&run);
    assert_eq!(v["unweighted"]["pairs"][0]["kappa"], 1.0);
    assert_eq!(v["quadratic"]["pairs"][0]["kappa"], 1.0);

    let five: Vec<(&str, [[u8; 3]; 4])> = ["a", "b", "c", "d", "e"]
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let mut it = items;
            it[k % 4][0] = 4;
            (*n, it)
        })
        .collect();
    let csv = ratings_csv(dir.path(), &five);
    let v = stdout_json(&apekit(&["agreement", "--in", p(&csv)]));
    assert_eq!(v["unweighted"]["pairs"].as_array().unwrap().len(), 10);

    let mut with_x = items;
    with_x[2][1] = 0;
    let csv = ratings_csv(dir.path(), &[("ann1", with_x), ("ann2", items)]);
    let run = apekit(&["adequacy", "--in", p(&csv)]);
    assert_eq!(code(&run), 0);
    let v = stdout_json(&run);
    assert_eq!(v["summary"]["annotators"][0]["evaluations"], "3 / 4");
    assert_eq!(v["summary"]["annotators"][1]["evaluations"], "4 / 4");
    assert_eq!(v["summary"]["overall"]["evaluations"], "7 / 8");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "annotator_id,item_id,system,score\na,1,nmt,9\na,1,ape,3\na,1,robot,3\n").unwrap();
    let run = apekit(&["adequacy", "--in", p(&bad)]);
    assert_eq!(code(&run), 2);
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("2 (") && err.contains("4 ("), "{err}");
}

#[test]
fn ablate_with_mock_scorer_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let input = small_corpus(dir.path(), 40);
    let out = dir.path().join("abl");
    let run = apekit(&["ablate", "--in", p(&input), "--sizes", "5,10,20", "--replicates", "2", "--out", p(&out), "--scorer", "mock", "--seed", "1"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let samples = json_file(&out.join("samples.json"));
    assert_eq!(samples["samples"].as_array().unwrap().len(), 6);
    let curve = json_file(&out.join("curve.json"));
    assert_eq!(curve["curve"]["points"].as_array().unwrap().len(), 3);
    assert_eq!(curve["curve"]["markers"][0]["size"], 13441);
    assert!(std::fs::read_to_string(out.join("curve.csv")).unwrap().starts_with("size,mean,min,max\n"));

    let results = dir.path().join("results.csv");
    std::fs::write(&results, "size,replicate,value\n5,0,60\n5,1,62\n").unwrap();
    let out2 = dir.path().join("abl2");
    let run = apekit(&["ablate", "--in", p(&input), "--sizes", "5", "--replicates", "2", "--out", p(&out2), "--results", p(&results)]);
    assert_eq!(code(&run), 0);
    let curve = json_file(&out2.join("curve.json"));
    assert_eq!(curve["curve"]["points"][0]["mean"], 61.0);

    assert_eq!(code(&apekit(&["ablate", "--in", p(&input), "--sizes", "50", "--out", p(&out2)])), 2);
    assert_eq!(code(&apekit(&["ablate", "--in", p(&input), "--sizes", "10,5", "--out", p(&out2)])), 1);
}

#[test]
fn buckets_stats_and_mix() {
    let dir = tempfile::tempdir().unwrap();
    let refs: Vec<String> = (0..12).map(|i| format!("w{i} a b c d e f g h i")).collect();
    let hyps: Vec<String> = refs
        .iter()
        .enumerate()
        .map(|(i, r)| r.split(' ').take(10 - i % 10).collect::<Vec<_>>().join(" "))
        .collect();
    let (h, r) = (dir.path().join("h"), dir.path().join("r"));
    write_lines(&h, &hyps);
    write_lines(&r, &refs);
    let out = dir.path().join("b");
    let run = apekit(&["buckets", "--baseline", p(&h), "--ape", p(&h), "--ref", p(&r), "--out", p(&out)]);
    assert_eq!(code(&run), 0);
    let v = json_file(&out.join("buckets.json"));
    let buckets = v["analysis"]["buckets"].as_array().unwrap();
    assert_eq!(buckets.len(), 10);
    assert_eq!(buckets[0]["range"], "(90,inf)");
    assert_eq!(buckets[9]["range"], "[0,10]");
    assert_eq!(buckets.iter().map(|b| b["count"].as_u64().unwrap()).sum::<u64>(), 12);
    assert!(buckets.iter().all(|b| b["delta_ter"].is_null() || b["delta_ter"] == 0.0));
    assert_eq!(std::fs::read_to_string(out.join("buckets.csv")).unwrap().lines().count(), 11);

    let input = small_corpus(dir.path(), 7);
    let run = apekit(&["stats", "--in", p(&input)]);
    assert_eq!(code(&run), 0);
    assert_eq!(stdout_json(&run)["stats"]["n_triplets"], 7);

    let mixed = dir.path().join("mixed.jsonl");
    let run = apekit(&["mix", "--a", p(&input), "--b", p(&input), "--factor", "3", "--out", p(&mixed)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(stdout_json(&run)["total"], 28);
    assert_eq!(code(&apekit(&["mix", "--a", p(&input), "--b", p(&input), "--factor", "0", "--out", p(&mixed)])), 1);
}

#[test]
fn tsv_format_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.tsv");
    std::fs::write(&input, "a b\tc d\te f\ng h\ti j\tk l\n").unwrap();
    let run = apekit(&["stats", "--in", p(&input), "--format", "tsv"]);
    assert_eq!(code(&run), 0);
    assert_eq!(stdout_json(&run)["stats"]["n_triplets"], 2);
    assert_eq!(code(&apekit(&["stats", "--in", p(&input)])), 2);
    assert_eq!(code(&apekit(&["stats", "--in", p(&input), "--format", "xml"])), 1);
}
