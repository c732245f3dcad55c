mod common;

use common::{framelens, run_all, workspace};

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn every_subcommand_runs() {
    let ws = workspace(1, 500);
    let out = ws.path("out");
    run_all(&ws, &out, &[]);
    let files = common::files_with(&out, &["csv", "json", "svg"]);
    for name in [
        "ingest_rejections.csv",
        "coverage.csv",
        "frame_frequency_keyword.csv",
        "frame_frequency_section.csv",
        "keywords_Political.csv",
        "keywords_Political_2016.csv",
        "prevalence.csv",
        "prevalence.svg",
        "test_shift_Political.csv",
        "issue_shootings.csv",
        "stages.csv",
        "convergence.csv",
        "sentiment.csv",
        "sentiment_scatter.csv",
        "sentiment_overall.csv",
        "issue_sentiment.csv",
        "frame_vectors.csv",
        "merges.csv",
        "partition.csv",
        "cluster_prevalence.csv",
        "dendrogram.svg",
        "model.json",
        "labels.csv",
        "trends.manifest.json",
        "cluster.manifest.json",
    ] {
        assert!(files.contains_key(name), "{name} missing from {:?}", files.keys());
    }
    // no temporary files survive
    assert!(files.len() == std::fs::read_dir(&out).unwrap().count());
}

#[test]
fn outputs_have_expected_shape() {
    let ws = workspace(2, 400);
    let out = ws.path("out");
    run_all(&ws, &out, &[]);
    let read = |n: &str| std::fs::read_to_string(out.join(n)).unwrap();

    let rejections = read("ingest_rejections.csv");
    assert_eq!(rejections.lines().count(), 3, "{rejections}");

    let kw = read("keywords_Political.csv");
    assert!(kw.starts_with("rank,word,delta,variance,z,target_count,reference_count,background_count\n"));
    let top: Vec<&str> = kw.lines().skip(1).take(6).map(|l| l.split(',').nth(1).unwrap()).collect();
    for w in ["senator", "campaign", "voters", "ballot", "party", "congress"] {
        assert!(top.contains(&w), "{w} not in {top:?}");
    }

    let partition = read("partition.csv");
    assert_eq!(partition.lines().count(), 1 + common::EVENTS.len());

    let stages = read("stages.csv");
    assert_eq!(stages.lines().filter(|l| l.starts_with("event,")).count(), 1);

    let labels = read("labels.csv");
    assert!(labels.starts_with("article_id,frame,confidence\n"));
    let (parsed, report) = framelens_core::frames::read_labels(labels.as_bytes()).unwrap();
    assert!(report.rejections.is_empty());
    assert_eq!(parsed.len(), 400 + 28 * common::EVENTS.len());

    let manifest: serde_json::Value = serde_json::from_str(&read("keywords.manifest.json")).unwrap();
    assert_eq!(manifest["command"], "keywords");
    assert_eq!(manifest["config"]["min_count"], 5);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn empty_corpus_fails_cleanly() {
    let ws = workspace(3, 10);
    let empty = ws.path("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let o = framelens()
        .args(["trends", "--corpus"])
        .arg(&empty)
        .arg("--labels")
        .arg(&ws.labels)
        .arg("--out")
        .arg(ws.path("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no labeled articles"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    let o = framelens().args(["trends", "--no-such-flag"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = framelens().arg("trends").output().unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("no corpus given"));
    let o = framelens().args(["trends", "--granularity", "week"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_1() {
    let ws = workspace(4, 10);
    let o = framelens()
        .args(["trends", "--corpus", "/nonexistent/corpus.jsonl", "--labels"])
        .arg(&ws.labels)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not exist"));
}

#[test]
fn settings_come_from_flags_env_then_file() {
    let ws = workspace(5, 300);
    let out = ws.path("out");
    // everything from the config file
    let o = framelens().arg("--config").arg(&ws.config).args(["keywords", "--frame", "Economic", "--out"]).arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = |o: &std::path::Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(o.join("keywords.manifest.json")).unwrap()).unwrap()
    };
    assert_eq!(manifest(&out)["config"]["min_count"], 5);

    // environment beats the file
    let o = framelens()
        .env("FRAMELENS_CONFIG", &ws.config)
        .env("FRAMELENS_MIN_COUNT", "7")
        .env("FRAMELENS_OUT", &out)
        .args(["keywords", "--frame", "Economic"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(&out)["config"]["min_count"], 7);

    // the flag beats the environment
    let o = framelens()
        .env("FRAMELENS_CONFIG", &ws.config)
        .env("FRAMELENS_MIN_COUNT", "7")
        .env("FRAMELENS_OUT", &out)
        .args(["keywords", "--frame", "Economic", "--min-count", "9"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(&out)["config"]["min_count"], 9);
    assert!(stdout(&o).contains("wrote"));
}

#[test]
fn unknown_config_key_is_usage_error() {
    let ws = workspace(6, 10);
    let bad = ws.path("bad.conf");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    let o = framelens().arg("--config").arg(&bad).arg("trends").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn reruns_are_identical() {
    let ws = workspace(7, 300);
    let out = ws.path("out");
    let args = |out: &std::path::Path| {
        let mut a: Vec<String> = vec!["cluster".into(), "--event".into(), ws.events.display().to_string()];
        a.extend(ws.flags(out));
        a
    };
    assert!(common::run(&args(&out)).status.success());
    let first = common::files_with(&out, &["csv", "json"]);
    assert!(common::run(&args(&out)).status.success());
    assert_eq!(first, common::files_with(&out, &["csv", "json"]));
}

#[test]
fn single_event_from_flags() {
    let ws = workspace(8, 200);
    let out = ws.path("out");
    let mut args: Vec<String> = ["convergence", "--name", "Orlando", "--keyword", "shooting", "--keyword", "Orlando", "--match", "all", "--date", "2016-06-12"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    args.extend(ws.flags(&out));
    let o = common::run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Orlando: "));
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn cluster_k_out_of_range() {
    let ws = workspace(9, 100);
    let mut args: Vec<String> = vec!["cluster".into(), "--event".into(), ws.events.display().to_string(), "--k".into(), "9".into()];
    args.extend(ws.flags(&ws.path("out")));
    let o = common::run(&args);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn version_flag() {
    let o = framelens().arg("--version").output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
}
