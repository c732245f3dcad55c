//! Synthetic inputs for driving the binary end to end.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::{Duration, NaiveDate};
use rand::prelude::*;
use serde_json::json;

pub const BIN: &str = env!("CARGO_BIN_EXE_framelens");

const ENV_VARS: &[&str] = &[
    "FRAMELENS_CONFIG",
    "FRAMELENS_CORPUS",
    "FRAMELENS_LABELS",
    "FRAMELENS_LEXICON",
    "FRAMELENS_OUT",
    "FRAMELENS_MIN_COUNT",
    "FRAMELENS_WINDOW_DAYS",
    "FRAMELENS_GRANULARITY",
    "FRAMELENS_TARGET",
    "FRAMELENS_THREADS",
];

/// The binary with every `FRAMELENS_*` setting cleared.
pub fn framelens() -> Command {
    let mut c = Command::new(BIN);
    for v in ENV_VARS {
        c.env_remove(v);
    }
    c.env("RUST_LOG", "error");
    c
}

/// Frame name, section, META keyword and vocabulary for each topical frame.
const TOPICS: &[(&str, &str, &str, &[&str])] = &[
    ("Political", "politics", "Elections", &["senator", "campaign", "voters", "ballot", "party", "congress"]),
    ("Economic", "business", "Markets", &["market", "prices", "billion", "investors", "stock", "revenue"]),
    ("Crime and punishment", "nyregion", "Crime", &["police", "arrested", "prosecutors", "charges", "prison", "judge"]),
    ("Cultural identity", "arts", "Music", &["museum", "theater", "gallery", "music", "film", "festival"]),
    ("Health and safety", "health", "Medicine", &["patients", "hospital", "doctors", "disease", "vaccine", "clinic"]),
    ("Morality", "us", "Religion", &["church", "faith", "pope", "prayer", "bishop", "sermon"]),
    ("Other", "style", "Fashion", &["weather", "recipe", "garden", "travel", "puzzle", "weekend"]),
];

const COMMON: &[&str] = &[
    "the", "a", "of", "and", "to", "in", "city", "year", "people", "said", "new", "on", "for", "with",
];

const TONE: &[&str] = &["good", "great", "happy", "bad", "terrible", "sad", "tragic", "hope", "not", "very"];

/// (name, location, date, frame weights by topic index)
pub const EVENTS: &[(&str, &str, &str, [u32; 7])] = &[
    ("Orlando", "Orlando", "2016-06-12", [6, 1, 2, 1, 2, 5, 1]),
    ("Las Vegas", "Las Vegas", "2017-10-01", [1, 1, 6, 2, 3, 1, 1]),
    ("Aurora", "Aurora", "2015-07-20", [1, 1, 2, 6, 1, 1, 1]),
    ("Fort Hood", "Fort Hood", "2015-11-05", [1, 1, 7, 1, 2, 1, 1]),
    ("Newtown", "Newtown", "2016-12-14", [5, 1, 2, 1, 2, 6, 1]),
];

pub struct Workspace {
    pub dir: tempfile::TempDir,
    pub corpus: PathBuf,
    pub labels: PathBuf,
    pub lexicon: PathBuf,
    pub events: PathBuf,
    pub index: PathBuf,
    pub train: PathBuf,
    pub config: PathBuf,
}

impl Workspace {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Input flags for every command, writing into `out`.
    pub fn flags(&self, out: &Path) -> Vec<String> {
        vec![
            "--corpus".into(),
            self.corpus.display().to_string(),
            "--labels".into(),
            self.labels.display().to_string(),
            "--lexicon".into(),
            self.lexicon.display().to_string(),
            "--min-count".into(),
            "5".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    }
}

fn pick<'a>(rng: &mut StdRng, words: &[&'a str]) -> &'a str {
    words.choose(rng).copied().unwrap()
}

fn weighted_topic(rng: &mut StdRng, weights: &[u32; 7]) -> usize {
    let total: u32 = weights.iter().sum();
    let mut x = rng.random_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    unreachable!()
}

fn text(rng: &mut StdRng, topic: usize, len: usize) -> String {
    let vocab = TOPICS[topic].3;
    (0..len)
        .map(|_| match rng.random_range(0..10) {
            0..=3 => pick(rng, vocab),
            4..=7 => pick(rng, COMMON),
            _ => pick(rng, TONE),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Doc {
    id: String,
    date: NaiveDate,
    topic: usize,
    title: String,
    body: String,
}

fn record(d: &Doc) -> serde_json::Value {
    let (_, section, keyword, _) = TOPICS[d.topic];
    json!({
        "id": d.id,
        "date": d.date.format("%Y-%m-%d").to_string(),
        "title": d.title,
        "body": d.body,
        "url": format!("https://www.nytimes.com/{}/{section}/{}.html", d.date.format("%Y/%m/%d"), d.id),
        "html_head": format!(r#"<head><meta name="keywords" content="{keyword},News"></head>"#),
    })
}

/// Builds a labeled corpus of about `n` background articles plus 28
/// articles around each event in [`EVENTS`].
pub fn workspace(seed: u64, n: usize) -> Workspace {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap();
    let mut docs = Vec::new();
    for i in 0..n {
        let topic = rng.random_range(0..TOPICS.len());
        let date = start + Duration::days(rng.random_range(0..1096));
        docs.push(Doc {
            id: format!("a{i:05}"),
            date,
            topic,
            title: text(&mut rng, topic, 5),
            body: text(&mut rng, topic, 40),
        });
    }
    for (e, (_, loc, date, weights)) in EVENTS.iter().enumerate() {
        let d0: NaiveDate = date.parse().unwrap();
        for k in 0..28 {
            let topic = weighted_topic(&mut rng, weights);
            docs.push(Doc {
                id: format!("e{e}_{k:02}"),
                date: d0 + Duration::days(k),
                topic,
                title: format!("{loc} shooting {}", text(&mut rng, topic, 3)),
                body: format!("{} shooting in {loc} {}", text(&mut rng, topic, 20), text(&mut rng, topic, 20)),
            });
        }
    }

    let mut corpus = String::new();
    for (i, d) in docs.iter().enumerate() {
        corpus.push_str(&record(d).to_string());
        corpus.push('\n');
        if i == 10 {
            corpus.push_str("{not json\n");
        }
        if i == 20 {
            corpus.push_str("{\"id\": \"nodate\", \"title\": \"x\", \"body\": \"y\"}\n");
        }
    }
    let corpus_path = dir.path().join("corpus.jsonl");
    std::fs::write(&corpus_path, corpus).unwrap();

    let mut labels = String::from("article_id,frame,confidence\n");
    for d in &docs {
        let _ = writeln!(labels, "{},{},{:.3}", d.id, TOPICS[d.topic].0, rng.random_range(0.5..1.0));
    }
    let labels_path = dir.path().join("labels.csv");
    std::fs::write(&labels_path, labels).unwrap();

    let lexicon_path = dir.path().join("lexicon.tsv");
    std::fs::write(
        &lexicon_path,
        "good\t1.9\t0.9\t[2, 2]\ngreat\t3.1\t0.7\t[3, 3]\nhappy\t2.7\t0.6\t[3, 3]\nhope\t1.9\t0.5\t[2, 2]\n\
         bad\t-2.5\t0.7\t[-3, -2]\nterrible\t-2.1\t0.8\t[-2, -2]\nsad\t-2.1\t0.6\t[-2, -2]\ntragic\t-3.4\t0.5\t[-3, -4]\n",
    )
    .unwrap();

    let mut events = String::new();
    for (name, loc, date, _) in EVENTS {
        let _ = writeln!(events, "{}", json!({"name": name, "keywords": ["shooting", loc], "match": "all", "date": date}));
    }
    let events_path = dir.path().join("events.jsonl");
    std::fs::write(&events_path, events).unwrap();

    let mut per_month: BTreeMap<String, u64> = BTreeMap::new();
    for d in &docs {
        *per_month.entry(d.date.format("%Y-%m").to_string()).or_default() += 1;
    }
    let mut index = String::from("month\tcount\n");
    for (m, c) in &per_month {
        let _ = writeln!(index, "{m}\t{}", c + rng.random_range(0..3));
    }
    let index_path = dir.path().join("index.tsv");
    std::fs::write(&index_path, index).unwrap();

    let mut train = String::from("article_id,frame,text\n");
    for i in 0..300 {
        let topic = rng.random_range(0..TOPICS.len());
        let _ = writeln!(train, "t{i},{},\"{}\"", TOPICS[topic].0, text(&mut rng, topic, 30));
    }
    let train_path = dir.path().join("train.csv");
    std::fs::write(&train_path, train).unwrap();

    let config_path = dir.path().join("framelens.conf");
    std::fs::write(
        &config_path,
        format!(
            "# synthetic workspace\ncorpus = {}\nlabels = {}\nlexicon = {}\nmin_count = 5\n",
            corpus_path.display(),
            labels_path.display(),
            lexicon_path.display()
        ),
    )
    .unwrap();

    Workspace {
        dir,
        corpus: corpus_path,
        labels: labels_path,
        lexicon: lexicon_path,
        events: events_path,
        index: index_path,
        train: train_path,
        config: config_path,
    }
}

/// Every subcommand with arguments valid for a [`workspace`]. `nb-label`
/// reads the model written by the preceding `nb-train` into the same
/// output directory.
pub fn subcommands(ws: &Workspace, out: &Path) -> Vec<Vec<String>> {
    let ev = ws.events.display().to_string();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        s(&["ingest-check"]),
        s(&["coverage", "--index", &ws.index.display().to_string()]),
        s(&["frame-freq", "--key", "keyword"]),
        s(&["frame-freq", "--key", "section"]),
        s(&["keywords", "--top", "10"]),
        s(&["keywords-by-year", "--frame", "Political", "--year", "2016"]),
        s(&["trends", "--svg"]),
        s(&["test-shift", "--frame", "Political", "--first", "2015-01..2015-12", "--second", "2016-01..2016-12"]),
        s(&["issue", "--name", "shootings", "--keyword", "shooting", "--svg"]),
        s(&["stages", "--event", &ev]),
        s(&["convergence", "--event", &ev]),
        s(&["sentiment"]),
        s(&["sentiment", "--event", &ev]),
        s(&["cluster", "--event", &ev, "--k", "3", "--svg"]),
        s(&["nb-train", "--train", &ws.train.display().to_string()]),
        s(&["nb-label", "--model", &out.join("model.json").display().to_string()]),
    ]
}

pub fn run(args: &[String]) -> Output {
    framelens().args(args).output().expect("binary runs")
}

/// Runs every subcommand into `out`; panics with stderr on the first
/// failure.
pub fn run_all(ws: &Workspace, out: &Path, extra: &[&str]) {
    for cmd in subcommands(ws, out) {
        let mut args = cmd.clone();
        args.extend(ws.flags(out));
        args.extend(extra.iter().map(|s| s.to_string()));
        let o = run(&args);
        assert!(
            o.status.success(),
            "{:?} failed: {}",
            cmd,
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

/// Relative path and contents of every file under `dir` with one of the
/// given extensions.
pub fn files_with(dir: &Path, exts: &[&str]) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| exts.iter().any(|e| x == *e)) {
            out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
        }
    }
    out
}
