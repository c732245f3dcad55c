use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::NaiveDate;
use serde_json::json;

use framelens_core::classifier::{self, NBModel};
use framelens_core::clustering::{
    cluster_prevalence_table, discriminating_frames, event_frame_vectors, ward_cluster,
};
use framelens_core::corpus::{audit_coverage, ingest_corpus, Corpus, ExpectedIndex, IngestConfig};
use framelens_core::frames::{frame_frequency_by_key, join, load_labels, write_labels, Frame, KeyKind, LabeledCorpus};
use framelens_core::lexstats::{frame_keywords, frame_keywords_by_year, LogOddsParams};
use framelens_core::month::YearMonth;
use framelens_core::report;
use framelens_core::sentiment::{issue_sentiment, sentiment_by_frame, SentimentLexicon};
use framelens_core::trends::{
    framing_convergence, issue_stream, mann_whitney_u, prevalence_series, read_jsonl, stage_profiles, Alternative,
    EventSpec, IssueQuery, MatchMode,
};
use framelens_core::Error;

use crate::config::{require_file, RunConfig, UsageError};
use crate::output::{slug, write_atomic, Outputs};
use crate::svg;
use crate::{EventArgs, IssueArgs};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_frame(s: &str) -> anyhow::Result<Frame> {
    s.parse().map_err(|e| usage(format!("{e}")))
}

fn parse_mode(s: &str) -> anyhow::Result<MatchMode> {
    match s {
        "any" => Ok(MatchMode::Any),
        "all" => Ok(MatchMode::All),
        other => Err(usage(format!("--match must be any or all, got {other:?}"))),
    }
}

fn csv_out<F>(f: F) -> impl FnOnce(&mut dyn Write) -> anyhow::Result<()>
where
    F: FnOnce(&mut dyn Write) -> framelens_core::Result<()>,
{
    move |w| Ok(f(w)?)
}

fn load_corpus(cfg: &RunConfig, ingest: &IngestConfig) -> anyhow::Result<Corpus> {
    let path = cfg.corpus_path()?;
    let (corpus, report) = ingest_corpus(path, ingest)?;
    if report.rejected() > 0 {
        log::warn!("{}: {} of {} lines rejected", path.display(), report.rejected(), report.lines);
    }
    log::info!("{} articles loaded", corpus.len());
    Ok(corpus)
}

fn load_labeled(cfg: &RunConfig) -> anyhow::Result<LabeledCorpus> {
    let corpus_path = cfg.corpus_path()?;
    let labels_path = cfg.labels_path()?;
    let corpus = load_corpus(cfg, &IngestConfig::default())?;
    let (labels, report) = load_labels(labels_path)?;
    if !report.rejections.is_empty() || report.conflicts > 0 {
        log::warn!(
            "{}: {} label lines rejected, {} conflicting duplicates",
            labels_path.display(),
            report.rejections.len(),
            report.conflicts
        );
    }
    let (labeled, j) = join(&corpus, &labels)?;
    log::info!(
        "{} labeled articles from {}; {} unlabeled, {} dangling labels",
        j.joined,
        corpus_path.display(),
        j.unlabeled,
        j.dangling
    );
    Ok(labeled)
}

fn labeled_inputs(cfg: &RunConfig) -> Vec<PathBuf> {
    [cfg.corpus.clone(), cfg.labels.clone()].into_iter().flatten().collect()
}

fn done(out: Outputs, command: &str, cfg: &RunConfig, inputs: &[PathBuf], params: serde_json::Value) -> anyhow::Result<()> {
    for f in out.files() {
        println!("wrote {}", out.path(f).display());
    }
    out.finish(command, cfg, inputs, params)
}

pub fn ingest_check(cfg: &RunConfig, from: Option<NaiveDate>, to: Option<NaiveDate>) -> anyhow::Result<()> {
    let path = cfg.corpus_path()?.to_path_buf();
    let date_range = match (from, to) {
        (None, None) => None,
        (f, t) => Some((f.unwrap_or(NaiveDate::MIN), t.unwrap_or(NaiveDate::MAX))),
    };
    let ingest = IngestConfig {
        date_range,
        ..Default::default()
    };
    let (corpus, rep) = ingest_corpus(&path, &ingest)?;
    let mut out = Outputs::new(&cfg.out)?;
    out.write("ingest_rejections.csv", csv_out(|w| report::write_ingest(w, &rep)))?;
    println!("lines {}  accepted {}  rejected {}", rep.lines, rep.accepted, rep.rejected());
    for (reason, n) in rep.by_reason() {
        println!("  {reason}: {n}");
    }
    if let (Some(first), Some(last)) = (corpus.articles().iter().map(|a| a.published_at).min(), corpus.articles().iter().map(|a| a.published_at).max()) {
        println!("dates {first} .. {last}");
    }
    done(out, "ingest-check", cfg, &[path], json!({ "from": from, "to": to }))
}

pub fn coverage(cfg: &RunConfig, index: &Path) -> anyhow::Result<()> {
    require_file(index, "index")?;
    let corpus = load_corpus(cfg, &IngestConfig::default())?;
    let idx = ExpectedIndex::load(index)?;
    let rep = audit_coverage(&corpus, &idx);
    let mut out = Outputs::new(&cfg.out)?;
    out.write("coverage.csv", csv_out(|w| report::write_coverage(w, &rep)))?;
    if let Some(o) = rep.overall {
        println!("overall coverage {o:.4}");
    }
    if let Some(m) = rep.lowest() {
        println!("lowest month {} at {:.4}", m.month, m.coverage.unwrap_or(0.0));
    }
    let mut inputs = vec![cfg.corpus_path()?.to_path_buf()];
    inputs.push(index.to_path_buf());
    done(out, "coverage", cfg, &inputs, json!({ "index": index }))
}

pub fn frame_freq(cfg: &RunConfig, key: &str, top: usize) -> anyhow::Result<()> {
    let kind: KeyKind = key.parse().map_err(usage)?;
    let labeled = load_labeled(cfg)?;
    let rows = frame_frequency_by_key(&labeled, kind, top)?;
    let mut out = Outputs::new(&cfg.out)?;
    out.write(&format!("frame_frequency_{key}.csv"), csv_out(|w| report::write_frame_frequency(w, &rows)))?;
    done(out, "frame-freq", cfg, &labeled_inputs(cfg), json!({ "key": key, "top": top }))
}

pub fn keywords(cfg: &RunConfig, frame: Option<&str>, top: usize) -> anyhow::Result<()> {
    let frames = match frame {
        Some(f) => vec![parse_frame(f)?],
        None => Frame::SUBSTANTIVE.to_vec(),
    };
    let labeled = load_labeled(cfg)?;
    let params = LogOddsParams {
        min_count: cfg.min_count,
        ..Default::default()
    };
    let mut out = Outputs::new(&cfg.out)?;
    for f in &frames {
        let rows = match frame_keywords::<f64>(&labeled, *f, top, &params) {
            Err(Error::EmptyTarget(msg)) if frame.is_none() => {
                log::warn!("skipping {f}: {msg}");
                continue;
            }
            r => r?,
        };
        let head: Vec<&str> = rows.iter().take(5).map(|r| r.word.as_str()).collect();
        println!("{}: {}", f.name(), head.join(", "));
        out.write(&format!("keywords_{}.csv", f.ident()), csv_out(|w| report::write_keywords(w, &rows)))?;
    }
    done(out, "keywords", cfg, &labeled_inputs(cfg), json!({ "frame": frame, "top": top }))
}

pub fn keywords_by_year(cfg: &RunConfig, frame: &str, year: i32, top: usize) -> anyhow::Result<()> {
    let f = parse_frame(frame)?;
    let labeled = load_labeled(cfg)?;
    let params = LogOddsParams {
        min_count: cfg.min_count,
        ..Default::default()
    };
    let rows = frame_keywords_by_year::<f64>(&labeled, f, year, top, &params)?;
    let mut out = Outputs::new(&cfg.out)?;
    out.write(&format!("keywords_{}_{year}.csv", f.ident()), csv_out(|w| report::write_keywords(w, &rows)))?;
    done(out, "keywords-by-year", cfg, &labeled_inputs(cfg), json!({ "frame": frame, "year": year, "top": top }))
}

pub fn trends(cfg: &RunConfig) -> anyhow::Result<()> {
    let labeled = load_labeled(cfg)?;
    let series = prevalence_series::<f64>(&labeled)?;
    let mut out = Outputs::new(&cfg.out)?;
    out.write("prevalence.csv", csv_out(|w| report::write_prevalence(w, &series)))?;
    if cfg.svg {
        let months: Vec<_> = series.months.iter().filter(|m| m.fractions.is_some()).collect();
        let labels: Vec<String> = months.iter().map(|m| m.month.to_string()).collect();
        let lines: Vec<(String, Vec<f64>)> = Frame::SUBSTANTIVE
            .iter()
            .map(|&f| (f.name().to_string(), months.iter().map(|m| m.fraction(f).unwrap_or(0.0)).collect()))
            .collect();
        let doc = svg::stacked_area("Frame prevalence", &labels, &lines);
        out.write("prevalence.svg", |w| Ok(w.write_all(doc.as_bytes())?))?;
    }
    done(out, "trends", cfg, &labeled_inputs(cfg), json!({}))
}

fn parse_range(s: &str) -> anyhow::Result<(YearMonth, YearMonth)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| usage(format!("month range {s:?} must look like YYYY-MM..YYYY-MM")))?;
    let a: YearMonth = a.parse().map_err(|e| usage(format!("{e}")))?;
    let b: YearMonth = b.parse().map_err(|e| usage(format!("{e}")))?;
    if b < a {
        return Err(usage(format!("month range {s:?} ends before it starts")));
    }
    Ok((a, b))
}

pub fn test_shift(cfg: &RunConfig, frame: &str, first: &str, second: &str, alternative: &str) -> anyhow::Result<()> {
    let f = parse_frame(frame)?;
    let (a0, a1) = parse_range(first)?;
    let (b0, b1) = parse_range(second)?;
    let alt: Alternative = alternative.parse().map_err(usage)?;
    let labeled = load_labeled(cfg)?;
    let series = prevalence_series::<f64>(&labeled)?;
    let a = series.window(f, a0, a1);
    let b = series.window(f, b0, b1);
    let mw = mann_whitney_u(&a, &b, alt).with_context(|| format!("{} months in first range, {} in second", a.len(), b.len()))?;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    println!(
        "{}: mean {:.4} ({} months) vs {:.4} ({} months); U = {}, p = {:.4} ({})",
        f.name(),
        mean(&a),
        a.len(),
        mean(&b),
        b.len(),
        mw.u,
        mw.p,
        alt
    );
    let mut out = Outputs::new(&cfg.out)?;
    out.write(&format!("test_shift_{}.csv", f.ident()), csv_out(|w| report::write_mann_whitney(w, a.len(), b.len(), &mw)))?;
    done(
        out,
        "test-shift",
        cfg,
        &labeled_inputs(cfg),
        json!({ "frame": frame, "first": first, "second": second, "alternative": alternative }),
    )
}

fn issue_queries(args: &IssueArgs) -> anyhow::Result<Vec<IssueQuery>> {
    match (&args.query, &args.name) {
        (Some(p), None) if args.keywords.is_empty() => {
            require_file(p, "query")?;
            let qs: Vec<IssueQuery> = read_jsonl(p)?;
            if qs.is_empty() {
                bail!("{} holds no queries", p.display());
            }
            Ok(qs)
        }
        (None, Some(name)) if !args.keywords.is_empty() => {
            Ok(vec![IssueQuery::new(name.clone(), args.keywords.clone())?.with_mode(parse_mode(&args.mode)?)])
        }
        _ => Err(usage("give either --query FILE or --name with one or more --keyword")),
    }
}

fn events(args: &EventArgs) -> anyhow::Result<Vec<EventSpec>> {
    match (&args.event, &args.name) {
        (Some(p), None) if args.keywords.is_empty() && args.date.is_none() => {
            require_file(p, "event")?;
            let ev: Vec<EventSpec> = read_jsonl(p)?;
            if ev.is_empty() {
                bail!("{} holds no events", p.display());
            }
            Ok(ev)
        }
        (None, Some(name)) if !args.keywords.is_empty() => {
            let date = args.date.ok_or_else(|| usage("--date is required with --name"))?;
            let query = IssueQuery::new(name.clone(), args.keywords.clone())?.with_mode(parse_mode(&args.mode)?);
            Ok(vec![EventSpec {
                query,
                date,
                window_days: None,
            }])
        }
        _ => Err(usage("give either --event FILE or --name, --keyword and --date")),
    }
}

fn event_inputs(cfg: &RunConfig, args: &EventArgs) -> Vec<PathBuf> {
    let mut v = labeled_inputs(cfg);
    v.extend(args.event.clone());
    v
}

pub fn issue(cfg: &RunConfig, args: &IssueArgs) -> anyhow::Result<()> {
    let queries = issue_queries(args)?;
    let labeled = load_labeled(cfg)?;
    let mut out = Outputs::new(&cfg.out)?;
    for q in &queries {
        let stream = issue_stream(&labeled, q)?;
        println!("{}: {} articles over {} months", q.name, stream.total(), stream.months.len());
        let name = slug(&q.name);
        out.write(&format!("issue_{name}.csv"), csv_out(|w| report::write_issue_stream(w, &stream)))?;
        if cfg.svg && !stream.months.is_empty() {
            let labels: Vec<String> = stream.months.iter().map(|(m, _)| m.to_string()).collect();
            let lines: Vec<(String, Vec<f64>)> = Frame::ALL
                .iter()
                .map(|&f| (f.name().to_string(), stream.months.iter().map(|(_, c)| c[f.index()] as f64).collect()))
                .collect();
            let doc = svg::stacked_area(&q.name, &labels, &lines);
            out.write(&format!("issue_{name}.svg"), |w| Ok(w.write_all(doc.as_bytes())?))?;
        }
    }
    let mut inputs = labeled_inputs(cfg);
    inputs.extend(args.query.clone());
    done(out, "issue", cfg, &inputs, json!({ "queries": queries }))
}

pub fn stages(cfg: &RunConfig, args: &EventArgs) -> anyhow::Result<()> {
    let evs = events(args)?;
    let labeled = load_labeled(cfg)?;
    let mut buf = Vec::new();
    let mut profiles = Vec::new();
    for e in &evs {
        let window = e.window_days.unwrap_or(cfg.window_days);
        let p = stage_profiles::<f64>(&labeled, &e.query, e.date, window)?;
        for s in &p {
            println!(
                "{} {}: {} articles, dominant {} at {:.3}",
                e.query.name,
                s.stage,
                s.article_count,
                s.dominant_frame.map_or("-", |f| f.name()),
                s.dominance
            );
        }
        profiles.push((e.query.name.clone(), p));
    }
    let mut out = Outputs::new(&cfg.out)?;
    out.write("stages.csv", |w| {
        for (i, (name, p)) in profiles.iter().enumerate() {
            buf.clear();
            report::write_stages(&mut buf, name, p)?;
            // header once
            let body = if i == 0 { &buf[..] } else { &buf[buf.iter().position(|&b| b == b'\n').map_or(0, |p| p + 1)..] };
            w.write_all(body)?;
        }
        Ok(())
    })?;
    done(out, "stages", cfg, &event_inputs(cfg, args), json!({ "events": evs }))
}

pub fn convergence(cfg: &RunConfig, args: &EventArgs) -> anyhow::Result<()> {
    let evs = events(args)?;
    let labeled = load_labeled(cfg)?;
    let mut rows = Vec::new();
    for e in &evs {
        let window = e.window_days.unwrap_or(cfg.window_days);
        let p = stage_profiles::<f64>(&labeled, &e.query, e.date, window)?;
        let c = framing_convergence(&p).with_context(|| format!("event {:?}", e.query.name))?;
        println!(
            "{}: {} {:.3} -> {} {:.3}, delta {:+.3}{}",
            e.query.name,
            c.early_frame.map_or("-", |f| f.name()),
            c.early_dominance,
            c.late_frame.map_or("-", |f| f.name()),
            c.late_dominance,
            c.delta,
            if c.converged { ", converged" } else { "" }
        );
        rows.push((e.query.name.clone(), c));
    }
    let mut out = Outputs::new(&cfg.out)?;
    out.write("convergence.csv", csv_out(|w| report::write_convergence(w, &rows)))?;
    done(out, "convergence", cfg, &event_inputs(cfg, args), json!({ "events": evs }))
}

pub fn sentiment(cfg: &RunConfig, args: &EventArgs) -> anyhow::Result<()> {
    let lex_path = cfg.lexicon_path()?.to_path_buf();
    let evs = if args.event.is_some() || args.name.is_some() { events(args)? } else { Vec::new() };
    let labeled = load_labeled(cfg)?;
    let lexicon = SentimentLexicon::<f64>::load(&lex_path)?;
    if lexicon.duplicates > 0 {
        log::info!("{}: {} repeated entries, last one kept", lex_path.display(), lexicon.duplicates);
    }
    let mut out = Outputs::new(&cfg.out)?;
    if evs.is_empty() {
        let series = sentiment_by_frame(&labeled, &lexicon, cfg.target)?;
        out.write("sentiment.csv", csv_out(|w| report::write_sentiment(w, &series)))?;
        out.write("sentiment_scatter.csv", csv_out(|w| report::write_sentiment_scatter(w, &series)))?;
        out.write("sentiment_overall.csv", csv_out(|w| report::write_sentiment_overall(w, &series)))?;
        for f in Frame::ALL {
            if let Some(sd) = series.frame_spread(f) {
                println!("{}: sd of monthly means {sd:.4}", f.name());
            }
        }
    } else {
        let mut buf = Vec::new();
        for (i, e) in evs.iter().enumerate() {
            let window = e.window_days.unwrap_or(cfg.window_days);
            let rows = issue_sentiment(&labeled, &e.query, e.date, window, &lexicon, cfg.target)?;
            let mut one = Vec::new();
            report::write_issue_sentiment(&mut one, &e.query.name, &rows)?;
            let skip = if i == 0 { 0 } else { one.iter().position(|&b| b == b'\n').map_or(0, |p| p + 1) };
            buf.extend_from_slice(&one[skip..]);
        }
        out.write("issue_sentiment.csv", |w| Ok(w.write_all(&buf)?))?;
    }
    let mut inputs = event_inputs(cfg, args);
    inputs.push(lex_path);
    done(out, "sentiment", cfg, &inputs, json!({ "events": evs }))
}

pub fn cluster(cfg: &RunConfig, args: &EventArgs, k: usize, weighted: bool) -> anyhow::Result<()> {
    let evs = events(args)?;
    if k == 0 || k > evs.len() {
        return Err(usage(format!("--k must be between 1 and {} (the number of events)", evs.len())));
    }
    let labeled = load_labeled(cfg)?;
    let vectors = event_frame_vectors::<f64>(&labeled, &evs, cfg.window_days)?;
    let dendrogram = ward_cluster(&vectors)?;
    let labels = dendrogram.cut(k)?;
    let table = cluster_prevalence_table(&labels, &vectors, weighted)?;
    let flags = if k >= 2 {
        match discriminating_frames(&labels, &vectors) {
            Ok(f) => Some(f),
            Err(e @ Error::ComplementTooSmall(_)) => {
                log::warn!("no discriminating frames: {e}");
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    for c in 0..k {
        let members: Vec<&str> = labels
            .iter()
            .zip(&dendrogram.names)
            .filter(|(&l, _)| l == c)
            .map(|(_, n)| n.as_str())
            .collect();
        println!("cluster {c}: {}", members.join(", "));
    }
    let mut out = Outputs::new(&cfg.out)?;
    out.write("frame_vectors.csv", csv_out(|w| report::write_vectors(w, &vectors)))?;
    out.write("merges.csv", csv_out(|w| report::write_merges(w, &dendrogram)))?;
    out.write("partition.csv", csv_out(|w| report::write_partition(w, &dendrogram.names, &labels)))?;
    out.write("cluster_prevalence.csv", csv_out(|w| report::write_cluster_table(w, &table, flags.as_deref())))?;
    if cfg.svg {
        let doc = svg::dendrogram(&dendrogram);
        out.write("dendrogram.svg", |w| Ok(w.write_all(doc.as_bytes())?))?;
    }
    done(out, "cluster", cfg, &event_inputs(cfg, args), json!({ "events": evs, "k": k, "weighted": weighted }))
}

pub fn nb_train(cfg: &RunConfig, train: Option<&Path>, mfc: &[PathBuf], smoothing: f64, model: Option<&Path>) -> anyhow::Result<()> {
    let mut inputs = Vec::new();
    let examples: Vec<(String, Frame)> = match (train, mfc.is_empty()) {
        (Some(p), true) => {
            require_file(p, "training")?;
            inputs.push(p.to_path_buf());
            classifier::read_training_csv(std::fs::File::open(p).with_context(|| format!("cannot read {}", p.display()))?)?
        }
        (None, false) => {
            let mut ex = Vec::new();
            for p in mfc {
                require_file(p, "MFC")?;
                inputs.push(p.clone());
                let f = std::fs::File::open(p).with_context(|| format!("cannot read {}", p.display()))?;
                let rows = classifier::read_mfc_json(std::io::BufReader::new(f)).with_context(|| p.display().to_string())?;
                ex.extend(rows.into_iter().map(|(_, text, frame)| (text, frame)));
            }
            ex
        }
        (None, true) => {
            let labeled = load_labeled(cfg)?;
            inputs.extend(labeled_inputs(cfg));
            classifier::examples_from_labeled(&labeled)
        }
        (Some(_), false) => return Err(usage("use either --train or --mfc, not both")),
    };
    let m: NBModel<f64> = classifier::train(&examples, smoothing)?;
    println!("{} examples, {} frames, vocabulary {}", examples.len(), m.frames.len(), m.vocabulary.len());
    let mut out = Outputs::new(&cfg.out)?;
    match model {
        Some(p) => {
            write_atomic(p, |w| Ok(m.write_json(w)?))?;
            println!("wrote {}", p.display());
        }
        None => {
            out.write("model.json", |w| Ok(m.write_json(w)?))?;
        }
    }
    done(out, "nb-train", cfg, &inputs, json!({ "smoothing": smoothing, "model": model }))
}

pub fn nb_label(cfg: &RunConfig, model: &Path, output: Option<&Path>) -> anyhow::Result<()> {
    require_file(model, "model")?;
    let corpus_path = cfg.corpus_path()?.to_path_buf();
    let m = NBModel::<f64>::load(model)?;
    let corpus = load_corpus(cfg, &IngestConfig::default())?;
    let (labels, low) = classifier::label_corpus(&m, &corpus);
    println!("{} articles labeled, {low} without vocabulary overlap", labels.len());
    let mut out = Outputs::new(&cfg.out)?;
    match output {
        Some(p) => {
            write_atomic(p, |w| Ok(write_labels(w, &labels)?))?;
            println!("wrote {}", p.display());
        }
        None => {
            out.write("labels.csv", |w| Ok(write_labels(w, &labels)?))?;
        }
    }
    done(out, "nb-label", cfg, &[model.to_path_buf(), corpus_path], json!({ "output": output }))
}
