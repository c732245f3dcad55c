//! The media-frame taxonomy, the label-file contract, and the join of labels
//! onto a corpus.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, Corpus};
use crate::error::{Error, Result};

/// General media frame. Variant order is the canonical order used for
/// tie-breaking and for frame-vector dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Frame {
    CapacityAndResources,
    CrimeAndPunishment,
    CulturalIdentity,
    Economic,
    ExternalRegulation,
    FairnessAndEquality,
    HealthAndSafety,
    Legality,
    Morality,
    PolicyPrescription,
    Political,
    PublicOpinion,
    QualityOfLife,
    SecurityAndDefense,
    Other,
}

pub const FRAME_COUNT: usize = 15;

impl Frame {
    pub const ALL: [Frame; FRAME_COUNT] = [
        Frame::CapacityAndResources,
        Frame::CrimeAndPunishment,
        Frame::CulturalIdentity,
        Frame::Economic,
        Frame::ExternalRegulation,
        Frame::FairnessAndEquality,
        Frame::HealthAndSafety,
        Frame::Legality,
        Frame::Morality,
        Frame::PolicyPrescription,
        Frame::Political,
        Frame::PublicOpinion,
        Frame::QualityOfLife,
        Frame::SecurityAndDefense,
        Frame::Other,
    ];

    /// The fourteen substantive frames, excluding `Other`.
    pub const SUBSTANTIVE: [Frame; FRAME_COUNT - 1] = [
        Frame::CapacityAndResources,
        Frame::CrimeAndPunishment,
        Frame::CulturalIdentity,
        Frame::Economic,
        Frame::ExternalRegulation,
        Frame::FairnessAndEquality,
        Frame::HealthAndSafety,
        Frame::Legality,
        Frame::Morality,
        Frame::PolicyPrescription,
        Frame::Political,
        Frame::PublicOpinion,
        Frame::QualityOfLife,
        Frame::SecurityAndDefense,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical long name, used in every file this crate writes.
    pub fn name(self) -> &'static str {
        match self {
            Frame::CapacityAndResources => "Capacity and resources",
            Frame::CrimeAndPunishment => "Crime and punishment",
            Frame::CulturalIdentity => "Cultural identity",
            Frame::Economic => "Economic",
            Frame::ExternalRegulation => "External regulation and reputation",
            Frame::FairnessAndEquality => "Fairness and equality",
            Frame::HealthAndSafety => "Health and safety",
            Frame::Legality => "Legality, constitutionality and jurisprudence",
            Frame::Morality => "Morality",
            Frame::PolicyPrescription => "Policy prescription and evaluation",
            Frame::Political => "Political",
            Frame::PublicOpinion => "Public opinion",
            Frame::QualityOfLife => "Quality of life",
            Frame::SecurityAndDefense => "Security and defense",
            Frame::Other => "Other",
        }
    }

    /// Rust-style identifier, accepted on input.
    pub fn ident(self) -> &'static str {
        match self {
            Frame::CapacityAndResources => "CapacityAndResources",
            Frame::CrimeAndPunishment => "CrimeAndPunishment",
            Frame::CulturalIdentity => "CulturalIdentity",
            Frame::Economic => "Economic",
            Frame::ExternalRegulation => "ExternalRegulation",
            Frame::FairnessAndEquality => "FairnessAndEquality",
            Frame::HealthAndSafety => "HealthAndSafety",
            Frame::Legality => "Legality",
            Frame::Morality => "Morality",
            Frame::PolicyPrescription => "PolicyPrescription",
            Frame::Political => "Political",
            Frame::PublicOpinion => "PublicOpinion",
            Frame::QualityOfLife => "QualityOfLife",
            Frame::SecurityAndDefense => "SecurityAndDefense",
            Frame::Other => "Other",
        }
    }

    fn short_names(self) -> &'static [&'static str] {
        match self {
            Frame::CapacityAndResources => &["Capacity"],
            Frame::CrimeAndPunishment => &["Crime"],
            Frame::CulturalIdentity => &["Cultural"],
            Frame::ExternalRegulation => &["External regulation", "External"],
            Frame::FairnessAndEquality => &["Fairness"],
            Frame::HealthAndSafety => &["Health"],
            Frame::Legality => &["Legality constitutionality"],
            Frame::PolicyPrescription => &["Policy prescription", "Policy"],
            Frame::SecurityAndDefense => &["Security"],
            _ => &[],
        }
    }

    /// Frame for a Media Frames Corpus codebook code (`1.0` = Economic …
    /// `15.0` = Other).
    pub fn from_mfc_code(code: f64) -> Option<Frame> {
        if !code.is_finite() || code < 1.0 {
            return None;
        }
        Some(match code.floor() as u32 {
            1 => Frame::Economic,
            2 => Frame::CapacityAndResources,
            3 => Frame::Morality,
            4 => Frame::FairnessAndEquality,
            5 => Frame::Legality,
            6 => Frame::PolicyPrescription,
            7 => Frame::CrimeAndPunishment,
            8 => Frame::SecurityAndDefense,
            9 => Frame::HealthAndSafety,
            10 => Frame::QualityOfLife,
            11 => Frame::CulturalIdentity,
            12 => Frame::PublicOpinion,
            13 => Frame::Political,
            14 => Frame::ExternalRegulation,
            15 => Frame::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFrame(pub String);

impl fmt::Display for UnknownFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown frame {:?}", self.0)
    }
}

impl std::error::Error for UnknownFrame {}

impl FromStr for Frame {
    type Err = UnknownFrame;

    /// Exact, case-sensitive match after trimming against the canonical
    /// name, the identifier, the short names, and their hyphenated forms.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        for frame in Frame::ALL {
            let names = [frame.name(), frame.ident()]
                .into_iter()
                .chain(frame.short_names().iter().copied());
            for name in names {
                if s == name || (name.contains(' ') && s == name.replace(' ', "-")) {
                    return Ok(frame);
                }
            }
        }
        Err(UnknownFrame(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameLabel {
    pub article_id: String,
    pub frame: Frame,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelReject {
    MissingColumn,
    UnknownFrame(String),
    BadConfidence(String),
    Malformed,
}

impl LabelReject {
    pub fn code(&self) -> &'static str {
        match self {
            LabelReject::MissingColumn => "missing column",
            LabelReject::UnknownFrame(_) => "unknown frame",
            LabelReject::BadConfidence(_) => "bad confidence",
            LabelReject::Malformed => "malformed line",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelReport {
    pub records: usize,
    pub header_skipped: bool,
    pub rejections: Vec<(usize, LabelReject)>,
    /// Repeated article ids; the first label is kept.
    pub conflicts: usize,
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<(Vec<FrameLabel>, LabelReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_labels(BufReader::new(file))
}

/// Streams `article_id,frame[,confidence]` records. A first record whose
/// frame column reads `frame` is treated as a header.
pub fn read_labels<R: Read>(reader: R) -> Result<(Vec<FrameLabel>, LabelReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut report = LabelReport::default();
    let mut labels = Vec::new();
    let mut seen = HashSet::new();
    let mut record = csv::StringRecord::new();
    let mut line = 0usize;
    let mut first = true;
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                line = e.position().map_or(line + 1, |p| p.line() as usize);
                first = false;
                report.records += 1;
                report.rejections.push((line, LabelReject::Malformed));
                continue;
            }
        }
        line = record.position().map_or(line + 1, |p| p.line() as usize);
        let is_first = std::mem::replace(&mut first, false);
        if is_first && record.get(1).is_some_and(|f| f.eq_ignore_ascii_case("frame")) {
            report.header_skipped = true;
            continue;
        }
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        report.records += 1;
        match parse_label(&record) {
            Ok(label) => {
                if seen.insert(label.article_id.clone()) {
                    labels.push(label);
                } else {
                    report.conflicts += 1;
                }
            }
            Err(reason) => report.rejections.push((line, reason)),
        }
    }
    Ok((labels, report))
}

fn parse_label(record: &csv::StringRecord) -> std::result::Result<FrameLabel, LabelReject> {
    let (Some(id), Some(frame)) = (record.get(0), record.get(1)) else {
        return Err(LabelReject::MissingColumn);
    };
    if id.is_empty() || record.len() > 3 {
        return Err(LabelReject::Malformed);
    }
    let frame = frame
        .parse::<Frame>()
        .map_err(|e| LabelReject::UnknownFrame(e.0))?;
    let confidence = match record.get(2) {
        None | Some("") => None,
        Some(c) => match c.parse::<f64>() {
            Ok(v) if (0.0..=1.0).contains(&v) => Some(v),
            _ => return Err(LabelReject::BadConfidence(c.to_string())),
        },
    };
    Ok(FrameLabel {
        article_id: id.to_string(),
        frame,
        confidence,
    })
}

/// Writes labels in the label-file format, with a header row.
pub fn write_labels<W: Write>(writer: W, labels: &[FrameLabel]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["article_id", "frame", "confidence"])?;
    for l in labels {
        let conf = l.confidence.map(|c| format!("{c:.6}")).unwrap_or_default();
        wtr.write_record([l.article_id.as_str(), l.frame.name(), conf.as_str()])?;
    }
    wtr.flush().map_err(|e| Error::io("<label output>", e))?;
    Ok(())
}

/// Corpus restricted to labeled articles, each with exactly one frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledCorpus {
    corpus: Corpus,
    frames: Vec<Frame>,
}

impl LabeledCorpus {
    /// Builds directly from labeled articles; later duplicates of an id are
    /// dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Article, Frame)>) -> Self {
        let mut frame_of = HashMap::new();
        let mut articles = Vec::new();
        for (a, f) in pairs {
            if !frame_of.contains_key(&a.id) {
                frame_of.insert(a.id.clone(), f);
                articles.push(a);
            }
        }
        let corpus = Corpus::from_articles(articles);
        let frames = corpus.articles().iter().map(|a| frame_of[&a.id]).collect();
        LabeledCorpus { corpus, frames }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Article, Frame)> + '_ {
        self.corpus.articles().iter().zip(self.frames.iter().copied())
    }

    pub fn par_iter(&self) -> impl IndexedParallelIterator<Item = (&Article, Frame)> + '_ {
        self.corpus
            .articles()
            .par_iter()
            .zip(self.frames.par_iter().copied())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinReport {
    pub joined: usize,
    pub unlabeled: usize,
    pub dangling: usize,
}

pub fn join(corpus: &Corpus, labels: &[FrameLabel]) -> Result<(LabeledCorpus, JoinReport)> {
    let mut frame_of: HashMap<&str, Frame> = HashMap::with_capacity(labels.len());
    for l in labels {
        frame_of.entry(l.article_id.as_str()).or_insert(l.frame);
    }
    let pairs: Vec<(Article, Frame)> = corpus
        .articles()
        .iter()
        .filter_map(|a| frame_of.get(a.id.as_str()).map(|&f| (a.clone(), f)))
        .collect();
    let report = JoinReport {
        joined: pairs.len(),
        unlabeled: corpus.len() - pairs.len(),
        dangling: frame_of.len() - pairs.len(),
    };
    if pairs.is_empty() {
        return Err(Error::NoLabeledArticles);
    }
    Ok((LabeledCorpus::from_pairs(pairs), report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyKind {
    Keyword,
    Section,
}

impl FromStr for KeyKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "keyword" => Ok(KeyKind::Keyword),
            "section" => Ok(KeyKind::Section),
            other => Err(format!("unknown key kind {other:?} (expected keyword or section)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameShare {
    pub frame: Frame,
    pub count: u64,
    pub prevalence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyFrequency {
    pub key: String,
    /// 1-based rank of the key by article count.
    pub rank: usize,
    pub articles: u64,
    /// Every frame seen under the key, by descending count then canonical order.
    pub frames: Vec<FrameShare>,
}

/// Frame distribution for the `top_n_keys` most frequent META keywords or
/// URL sections. Denominators include `Other`-framed articles.
pub fn frame_frequency_by_key(
    labeled: &LabeledCorpus,
    key: KeyKind,
    top_n_keys: usize,
) -> Result<Vec<KeyFrequency>> {
    if labeled.is_empty() {
        return Err(Error::NoLabeledArticles);
    }
    let counts: HashMap<String, [u64; FRAME_COUNT]> = labeled
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, [u64; FRAME_COUNT]>, (a, f)| {
            let keys: Vec<&str> = match key {
                KeyKind::Keyword => {
                    let mut ks: Vec<&str> = a.meta_keywords.iter().map(String::as_str).collect();
                    ks.sort_unstable();
                    ks.dedup();
                    ks
                }
                KeyKind::Section => a.section.as_deref().into_iter().collect(),
            };
            for k in keys {
                acc.entry(k.to_string()).or_insert([0; FRAME_COUNT])[f.index()] += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                let slot = a.entry(k).or_insert([0; FRAME_COUNT]);
                for (s, x) in slot.iter_mut().zip(v) {
                    *s += x;
                }
            }
            a
        });
    if counts.is_empty() {
        return Err(Error::KeyAbsent(match key {
            KeyKind::Keyword => "META keyword",
            KeyKind::Section => "URL section",
        }));
    }
    let mut keyed: Vec<(String, [u64; FRAME_COUNT], u64)> = counts
        .into_iter()
        .map(|(k, v)| {
            let total = v.iter().sum();
            (k, v, total)
        })
        .collect();
    keyed.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
    Ok(keyed
        .into_iter()
        .take(top_n_keys)
        .enumerate()
        .map(|(i, (key, per_frame, total))| {
            let mut frames: Vec<FrameShare> = Frame::ALL
                .iter()
                .filter(|f| per_frame[f.index()] > 0)
                .map(|&frame| FrameShare {
                    frame,
                    count: per_frame[frame.index()],
                    prevalence: per_frame[frame.index()] as f64 / total as f64,
                })
                .collect();
            frames.sort_by(|a, b| b.count.cmp(&a.count).then(a.frame.cmp(&b.frame)));
            KeyFrequency {
                key,
                rank: i + 1,
                articles: total,
                frames,
            }
        })
        .collect())
}
