//! Multinomial naive Bayes over bags of words with class-balanced priors.
//! A self-contained way to produce frame label files.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, Corpus};
use crate::error::{Error, Result};
use crate::frames::{Frame, FrameLabel, LabeledCorpus};
use crate::lexstats::tokens;
use crate::scalar::Scalar;

pub const DEFAULT_SMOOTHING: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBModel<T = f64> {
    /// Frames seen in training, canonical order.
    pub frames: Vec<Frame>,
    pub log_priors: Vec<T>,
    /// Sorted vocabulary.
    pub vocabulary: Vec<String>,
    /// `log_likelihoods[f][w]`, one row per entry of `frames`.
    pub log_likelihoods: Vec<Vec<T>>,
    pub smoothing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T = f64> {
    pub frame: Frame,
    /// Unnormalized log posterior of `frame`.
    pub log_score: T,
    /// Posterior probability of `frame` among the model's frames.
    pub probability: T,
    /// No token of the text is in the vocabulary; the frame is the prior
    /// argmax.
    pub low_confidence: bool,
}

/// Text used for training and labeling: title and body.
pub fn article_text(a: &Article) -> String {
    format!("{}\n{}", a.title, a.body)
}

pub fn train<T: Scalar, S: AsRef<str>>(examples: &[(S, Frame)], smoothing: f64) -> Result<NBModel<T>> {
    if !(smoothing.is_finite() && smoothing > 0.0) {
        return Err(Error::InvalidSmoothing(smoothing));
    }
    let mut counts: BTreeMap<Frame, BTreeMap<String, u64>> = BTreeMap::new();
    for (text, frame) in examples {
        let c = counts.entry(*frame).or_default();
        for t in tokens(text.as_ref()) {
            *c.entry(t).or_insert(0) += 1;
        }
    }
    if counts.len() < 2 {
        return Err(Error::SingleClass);
    }
    let vocabulary: Vec<String> = counts
        .values()
        .flat_map(|c| c.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if vocabulary.is_empty() {
        return Err(Error::InvalidInput("training texts contain no tokens".into()));
    }
    let alpha = T::lit(smoothing);
    let v = T::count(vocabulary.len() as u64);
    let frames: Vec<Frame> = counts.keys().copied().collect();
    let log_likelihoods = counts
        .values()
        .map(|c| {
            let total = T::count(c.values().sum());
            let denom = total + alpha * v;
            vocabulary
                .iter()
                .map(|w| ((T::count(c.get(w).copied().unwrap_or(0)) + alpha) / denom).ln())
                .collect()
        })
        .collect();
    let prior = -T::count(frames.len() as u64).ln();
    Ok(NBModel {
        log_priors: vec![prior; frames.len()],
        frames,
        vocabulary,
        log_likelihoods,
        smoothing,
    })
}

impl<T: Scalar> NBModel<T> {
    fn word_index(&self, w: &str) -> Option<usize> {
        self.vocabulary.binary_search_by(|v| v.as_str().cmp(w)).ok()
    }

    pub fn predict(&self, text: &str) -> Prediction<T> {
        let mut scores = self.log_priors.clone();
        let mut overlap = false;
        for t in tokens(text) {
            if let Some(w) = self.word_index(&t) {
                overlap = true;
                for (s, row) in scores.iter_mut().zip(&self.log_likelihoods) {
                    *s = *s + row[w];
                }
            }
        }
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        let top = scores[best];
        let z: T = scores.iter().map(|&s| (s - top).exp()).sum();
        Prediction {
            frame: self.frames[best],
            log_score: top,
            probability: T::one() / z,
            low_confidence: !overlap,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_json(std::io::BufWriter::new(file))
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_json(std::io::BufReader::new(file))
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let m: Self = serde_json::from_reader(reader)?;
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("model: {msg}")));
        if self.frames.len() < 2 || self.log_priors.len() != self.frames.len() {
            return bad("needs at least two frames with one prior each");
        }
        if self.vocabulary.is_empty() || self.vocabulary.windows(2).any(|w| w[0] >= w[1]) {
            return bad("vocabulary must be non-empty, sorted and unique");
        }
        if self.log_likelihoods.len() != self.frames.len()
            || self.log_likelihoods.iter().any(|r| r.len() != self.vocabulary.len())
        {
            return bad("likelihood table shape does not match");
        }
        Ok(())
    }
}

/// Labels every article, in corpus order. Confidence is the posterior
/// probability of the predicted frame.
pub fn label_corpus<T: Scalar>(model: &NBModel<T>, corpus: &Corpus) -> (Vec<FrameLabel>, usize) {
    let preds: Vec<(FrameLabel, bool)> = corpus
        .articles()
        .par_iter()
        .map(|a| {
            let p = model.predict(&article_text(a));
            let label = FrameLabel {
                article_id: a.id.clone(),
                frame: p.frame,
                confidence: Some(p.probability.to_f64_lossy()),
            };
            (label, p.low_confidence)
        })
        .collect();
    let low = preds.iter().filter(|(_, l)| *l).count();
    (preds.into_iter().map(|(l, _)| l).collect(), low)
}

/// Training pairs from a joined corpus.
pub fn examples_from_labeled(labeled: &LabeledCorpus) -> Vec<(String, Frame)> {
    labeled.iter().map(|(a, f)| (article_text(a), f)).collect()
}

/// Reads a training CSV: `article_id,frame[,confidence],text`. The text is
/// always the last column; a header row is recognised by a `frame` second
/// column.
pub fn read_training_csv<R: Read>(reader: R) -> Result<Vec<(String, Frame)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i == 0 && rec.get(1).map(str::trim) == Some("frame") {
            continue;
        }
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if rec.len() < 3 {
            return Err(Error::InvalidInput(format!("training line {line}: expected id, frame and text")));
        }
        let frame: Frame = rec[1]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("training line {line}: {e}")))?;
        out.push((rec[rec.len() - 1].to_string(), frame));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct MfcRecord {
    text: String,
    #[serde(default)]
    primary_frame: Option<f64>,
}

/// One Media Frames Corpus annotation file: an object keyed by article id
/// whose records carry `text` and a numeric `primary_frame` code. Articles
/// without a primary frame are skipped. Sorted by id.
pub fn read_mfc_json<R: Read>(reader: R) -> Result<Vec<(String, String, Frame)>> {
    let records: BTreeMap<String, MfcRecord> = serde_json::from_reader(reader)?;
    let mut out = Vec::with_capacity(records.len());
    for (id, r) in records {
        let Some(code) = r.primary_frame else { continue };
        let frame = Frame::from_mfc_code(code)
            .ok_or_else(|| Error::InvalidInput(format!("article {id}: unknown frame code {code}")))?;
        out.push((id, r.text, frame));
    }
    Ok(out)
}
