//! CSV renderings of every analysis result. Rows come out in a fixed order
//! and numbers use the shortest round-trip representation, so equal inputs
//! give byte-identical files.

use std::io::Write;

use crate::classifier::Prediction;
use crate::clustering::{Dendrogram, Direction, FrameVector, DIMENSIONS};
use crate::corpus::{CoverageReport, IngestReport};
use crate::error::Result;
use crate::frames::{Frame, KeyFrequency};
use crate::lexstats::LogOddsResult;
use crate::scalar::Scalar;
use crate::sentiment::SentimentSeries;
use crate::trends::{Convergence, IssueStream, MannWhitney, PrevalenceSeries, StageProfile};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn finish<W: Write>(mut wtr: csv::Writer<W>) -> Result<()> {
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_ingest<W: Write>(w: W, report: &IngestReport) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["line", "reason"])?;
    for r in &report.rejections {
        wtr.write_record([r.line.to_string(), r.reason.code().to_string()])?;
    }
    finish(wtr)
}

pub fn write_coverage<W: Write>(w: W, report: &CoverageReport) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["month", "present", "expected", "coverage", "flag"])?;
    for m in &report.months {
        wtr.write_record([
            m.month.to_string(),
            m.present.to_string(),
            opt(m.expected),
            opt(m.coverage),
            m.flag.map(|f| f.code().to_string()).unwrap_or_default(),
        ])?;
    }
    finish(wtr)
}

pub fn write_keywords<W: Write, T: Scalar>(w: W, rows: &[LogOddsResult<T>]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record([
        "rank",
        "word",
        "delta",
        "variance",
        "z",
        "target_count",
        "reference_count",
        "background_count",
    ])?;
    for (i, r) in rows.iter().enumerate() {
        wtr.write_record([
            (i + 1).to_string(),
            r.word.clone(),
            r.delta.to_string(),
            r.variance.to_string(),
            r.z.to_string(),
            r.target_count.to_string(),
            r.reference_count.to_string(),
            r.background_count.to_string(),
        ])?;
    }
    finish(wtr)
}

pub fn write_frame_frequency<W: Write>(w: W, rows: &[KeyFrequency]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["key", "rank", "frame", "count", "prevalence"])?;
    for k in rows {
        for s in &k.frames {
            wtr.write_record([
                k.key.clone(),
                k.rank.to_string(),
                s.frame.name().to_string(),
                s.count.to_string(),
                s.prevalence.to_string(),
            ])?;
        }
    }
    finish(wtr)
}

/// Tidy `month, frame, value` rows over all fifteen frames. Months without
/// articles keep their rows with an empty value.
pub fn write_prevalence<W: Write, T: Scalar>(w: W, series: &PrevalenceSeries<T>) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["month", "frame", "value"])?;
    for m in &series.months {
        for f in Frame::ALL {
            wtr.write_record([m.month.to_string(), f.name().to_string(), opt(m.fraction(f))])?;
        }
    }
    finish(wtr)
}

/// Tidy monthly article counts per frame.
pub fn write_issue_stream<W: Write>(w: W, stream: &IssueStream) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["month", "frame", "value"])?;
    for (month, counts) in &stream.months {
        for f in Frame::ALL {
            wtr.write_record([month.to_string(), f.name().to_string(), counts[f.index()].to_string()])?;
        }
    }
    finish(wtr)
}

pub fn write_mann_whitney<W: Write, T: Scalar>(
    w: W,
    n_a: usize,
    n_b: usize,
    result: &MannWhitney<T>,
) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["n_a", "n_b", "u", "u_b", "p", "method", "alternative"])?;
    wtr.write_record([
        n_a.to_string(),
        n_b.to_string(),
        result.u.to_string(),
        result.u_b.to_string(),
        result.p.to_string(),
        format!("{:?}", result.method).to_lowercase(),
        result.alternative.to_string(),
    ])?;
    finish(wtr)
}

/// One row per stage and frame.
pub fn write_stages<W: Write, T: Scalar>(w: W, event: &str, stages: &[StageProfile<T>]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record([
        "event",
        "stage",
        "frame",
        "count",
        "share",
        "article_count",
        "dominant_frame",
        "dominance",
    ])?;
    for s in stages {
        for f in Frame::ALL {
            wtr.write_record([
                event.to_string(),
                s.stage.name().to_string(),
                f.name().to_string(),
                s.counts[f.index()].to_string(),
                s.distribution[f.index()].to_string(),
                s.article_count.to_string(),
                s.dominant_frame.map(|d| d.name().to_string()).unwrap_or_default(),
                s.dominance.to_string(),
            ])?;
        }
    }
    finish(wtr)
}

pub fn write_convergence<W: Write, T: Scalar>(w: W, rows: &[(String, Convergence<T>)]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record([
        "event",
        "early_frame",
        "early_dominance",
        "late_frame",
        "late_dominance",
        "delta",
        "converged",
    ])?;
    let name = |f: Option<Frame>| f.map(|f| f.name().to_string()).unwrap_or_default();
    for (event, c) in rows {
        wtr.write_record([
            event.clone(),
            name(c.early_frame),
            c.early_dominance.to_string(),
            name(c.late_frame),
            c.late_dominance.to_string(),
            c.delta.to_string(),
            c.converged.to_string(),
        ])?;
    }
    finish(wtr)
}

pub fn write_sentiment<W: Write, T: Scalar>(w: W, series: &SentimentSeries<T>) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["month", "frame", "mean_compound", "n"])?;
    for c in &series.cells {
        wtr.write_record([
            c.month.to_string(),
            c.frame.name().to_string(),
            c.mean_compound.to_string(),
            c.articles.to_string(),
        ])?;
    }
    finish(wtr)
}

/// Per-frame, per-month points for a volume-versus-tone scatter.
pub fn write_sentiment_scatter<W: Write, T: Scalar>(w: W, series: &SentimentSeries<T>) -> Result<()> {
    let mut cells: Vec<_> = series.cells.iter().collect();
    cells.sort_by_key(|c| (c.frame, c.month));
    let mut wtr = writer(w);
    wtr.write_record(["frame", "month", "n_articles", "mean_compound"])?;
    for c in cells {
        wtr.write_record([
            c.frame.name().to_string(),
            c.month.to_string(),
            c.articles.to_string(),
            c.mean_compound.to_string(),
        ])?;
    }
    finish(wtr)
}

pub fn write_sentiment_overall<W: Write, T: Scalar>(w: W, series: &SentimentSeries<T>) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["month", "mean_compound", "n"])?;
    for (m, mean, n) in &series.overall {
        wtr.write_record([m.to_string(), mean.to_string(), n.to_string()])?;
    }
    finish(wtr)
}

pub fn write_issue_sentiment<W: Write, T: Scalar>(w: W, event: &str, rows: &[(Frame, T, u64)]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["event", "frame", "mean_compound", "n"])?;
    for (f, mean, n) in rows {
        wtr.write_record([event.to_string(), f.name().to_string(), mean.to_string(), n.to_string()])?;
    }
    finish(wtr)
}

pub fn write_vectors<W: Write, T: Scalar>(w: W, vectors: &[FrameVector<T>]) -> Result<()> {
    let mut wtr = writer(w);
    let mut header = vec!["event".to_string(), "n_articles".to_string()];
    header.extend(Frame::SUBSTANTIVE.iter().map(|f| f.name().to_string()));
    wtr.write_record(&header)?;
    for v in vectors {
        let mut row = vec![v.event.clone(), v.n_articles.to_string()];
        row.extend(v.values.iter().map(|x| x.to_string()));
        wtr.write_record(&row)?;
    }
    finish(wtr)
}

pub fn write_merges<W: Write, T: Scalar>(w: W, d: &Dendrogram<T>) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["step", "left", "right", "height", "size"])?;
    for (i, m) in d.merges.iter().enumerate() {
        wtr.write_record([
            (i + 1).to_string(),
            m.left.to_string(),
            m.right.to_string(),
            m.height.to_string(),
            m.size.to_string(),
        ])?;
    }
    finish(wtr)
}

pub fn write_partition<W: Write>(w: W, names: &[String], labels: &[usize]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["event", "cluster"])?;
    for (n, l) in names.iter().zip(labels) {
        wtr.write_record([n.clone(), l.to_string()])?;
    }
    finish(wtr)
}

/// Frame rows, one column per cluster, each cell the mean prevalence
/// followed by an arrow when the frame discriminates that cluster.
pub fn write_cluster_table<W: Write, T: Scalar>(
    w: W,
    table: &[[T; DIMENSIONS]],
    flags: Option<&[Vec<(Frame, Direction)>]>,
) -> Result<()> {
    let mut wtr = writer(w);
    let mut header = vec!["frame".to_string()];
    header.extend((0..table.len()).map(|c| format!("cluster_{c}")));
    wtr.write_record(&header)?;
    for (d, frame) in Frame::SUBSTANTIVE.iter().enumerate() {
        let mut row = vec![frame.name().to_string()];
        for (c, means) in table.iter().enumerate() {
            let arrow = flags
                .and_then(|f| f[c].iter().find(|(g, _)| g == frame))
                .map(|(_, dir)| dir.arrow().to_string())
                .unwrap_or_default();
            row.push(format!("{}{arrow}", means[d]));
        }
        wtr.write_record(&row)?;
    }
    finish(wtr)
}

/// `article_id, frame, confidence, low_confidence` for a batch of
/// predictions.
pub fn write_predictions<W: Write, T: Scalar>(w: W, rows: &[(String, Prediction<T>)]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["article_id", "frame", "probability", "low_confidence"])?;
    for (id, p) in rows {
        wtr.write_record([
            id.clone(),
            p.frame.name().to_string(),
            p.probability.to_string(),
            p.low_confidence.to_string(),
        ])?;
    }
    finish(wtr)
}
