//! Keyword-defined issues: matching, monthly frame streams, early/mid/late
//! stage profiles around an event, and framing convergence.

use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::frames::{Frame, LabeledCorpus, FRAME_COUNT};
use crate::lexstats::tokenize;
use crate::month::YearMonth;
use crate::scalar::Scalar;

use super::prevalence::monthly_counts;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Any phrase matches.
    #[default]
    Any,
    /// Every phrase must match.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchField {
    Title,
    Body,
}

/// Articles about one issue, selected by keyword phrases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueQuery {
    pub name: String,
    pub keywords: Vec<String>,
    #[serde(default, rename = "match")]
    pub mode: MatchMode,
    #[serde(default = "default_fields")]
    pub fields: Vec<MatchField>,
    /// Inclusive publication window.
    #[serde(default)]
    pub date_window: Option<(NaiveDate, NaiveDate)>,
}

fn default_fields() -> Vec<MatchField> {
    vec![MatchField::Title, MatchField::Body]
}

impl IssueQuery {
    pub fn new(name: impl Into<String>, keywords: Vec<String>) -> Result<Self> {
        let q = IssueQuery {
            name: name.into(),
            keywords,
            mode: MatchMode::Any,
            fields: default_fields(),
            date_window: None,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.keywords.is_empty() {
            return Err(Error::InvalidInput(format!("query {:?} has no keywords", self.name)));
        }
        if self.keywords.iter().any(|k| tokenize(k).is_empty()) {
            return Err(Error::InvalidInput(format!("query {:?} has a blank keyword", self.name)));
        }
        if self.fields.is_empty() {
            return Err(Error::InvalidInput(format!("query {:?} selects no fields", self.name)));
        }
        Ok(())
    }

    /// Compiled form for repeated matching.
    pub fn matcher(&self) -> Matcher<'_> {
        Matcher {
            query: self,
            phrases: self.keywords.iter().map(|k| tokenize(k)).collect(),
        }
    }
}

pub struct Matcher<'q> {
    query: &'q IssueQuery,
    phrases: Vec<Vec<String>>,
}

impl Matcher<'_> {
    /// Case-insensitive phrase match on token boundaries, so `art` never
    /// matches inside `party`.
    pub fn matches(&self, article: &Article) -> bool {
        if let Some((start, end)) = self.query.date_window {
            if article.published_at < start || article.published_at > end {
                return false;
            }
        }
        let fields: Vec<Vec<String>> = self
            .query
            .fields
            .iter()
            .map(|f| match f {
                MatchField::Title => tokenize(&article.title),
                MatchField::Body => tokenize(&article.body),
            })
            .collect();
        let found = |phrase: &Vec<String>| fields.iter().any(|toks| contains_phrase(toks, phrase));
        match self.query.mode {
            MatchMode::Any => self.phrases.iter().any(found),
            MatchMode::All => self.phrases.iter().all(found),
        }
    }
}

fn contains_phrase(tokens: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && tokens.windows(phrase.len()).any(|w| w == phrase)
}

/// An issue anchored at an event date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSpec {
    #[serde(flatten)]
    pub query: IssueQuery,
    #[serde(alias = "event_date")]
    pub date: NaiveDate,
    #[serde(default)]
    pub window_days: Option<u32>,
}

/// Reads line-delimited JSON records. Blank lines and `#` comments are
/// skipped.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(&text)
}

pub fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::InvalidInput(format!("record on line {}: {e}", i + 1)))
        })
        .collect()
}

/// Monthly frame counts of matching articles, contiguous from the first to
/// the last matching month.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IssueStream {
    pub name: String,
    pub months: Vec<(YearMonth, [u64; FRAME_COUNT])>,
}

impl IssueStream {
    pub fn total(&self) -> u64 {
        self.months.iter().flat_map(|(_, c)| c.iter()).sum()
    }

    pub fn frame_total(&self, frame: Frame) -> u64 {
        self.months.iter().map(|(_, c)| c[frame.index()]).sum()
    }
}

pub fn issue_stream(labeled: &LabeledCorpus, query: &IssueQuery) -> Result<IssueStream> {
    query.validate()?;
    let matcher = query.matcher();
    let months = monthly_counts(
        labeled
            .par_iter()
            .filter(|(a, _)| matcher.matches(a))
            .map(|(a, f)| (a.month(), f)),
    );
    if months.is_empty() {
        log::warn!("issue {:?} matched no articles", query.name);
    }
    Ok(IssueStream {
        name: query.name.clone(),
        months,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    Early,
    Mid,
    Late,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Early, Stage::Mid, Stage::Late];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Early => "early",
            Stage::Mid => "mid",
            Stage::Late => "late",
        }
    }

    /// Stage of a day `offset` days into a `window`-day window. The window is
    /// cut at `window/3` and `2·window/3`; a day straddling a cut belongs
    /// to the earlier stage.
    pub fn of_offset(offset: u32, window: u32) -> Stage {
        if 3 * offset < window {
            Stage::Early
        } else if 3 * offset < 2 * window {
            Stage::Mid
        } else {
            Stage::Late
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageProfile<T = f64> {
    pub stage: Stage,
    pub counts: [u64; FRAME_COUNT],
    /// Shares over all fifteen frames; all zero when the stage is empty.
    pub distribution: [T; FRAME_COUNT],
    pub article_count: u64,
    /// Most prevalent substantive frame, ties broken by canonical order.
    pub dominant_frame: Option<Frame>,
    pub dominance: T,
    pub empty: bool,
}

impl<T: Scalar> StageProfile<T> {
    pub fn from_counts(stage: Stage, counts: [u64; FRAME_COUNT]) -> Self {
        let article_count: u64 = counts.iter().sum();
        let distribution = if article_count == 0 {
            [T::zero(); FRAME_COUNT]
        } else {
            counts.map(|c| T::count(c) / T::count(article_count))
        };
        let dominant_frame = (article_count > 0)
            .then(|| {
                Frame::SUBSTANTIVE
                    .iter()
                    .copied()
                    .fold(None, |best: Option<Frame>, f| match best {
                        Some(b) if counts[b.index()] >= counts[f.index()] => Some(b),
                        _ => Some(f),
                    })
            })
            .flatten();
        let dominance = dominant_frame.map_or(T::zero(), |f| distribution[f.index()]);
        StageProfile {
            stage,
            counts,
            distribution,
            article_count,
            dominant_frame,
            dominance,
            empty: article_count == 0,
        }
    }
}

/// Matching articles in `[event_date, event_date + window_days)`, split into
/// three equal-duration stages.
pub fn stage_profiles<T: Scalar>(
    labeled: &LabeledCorpus,
    query: &IssueQuery,
    event_date: NaiveDate,
    window_days: u32,
) -> Result<[StageProfile<T>; 3]> {
    if window_days < 3 {
        return Err(Error::InvalidInput(format!(
            "window must span at least 3 days, got {window_days}"
        )));
    }
    query.validate()?;
    let mut counts = [[0u64; FRAME_COUNT]; 3];
    for (a, f) in window_articles(labeled, query, event_date, window_days) {
        let offset = (a.published_at - event_date).num_days() as u32;
        counts[Stage::of_offset(offset, window_days) as usize][f.index()] += 1;
    }
    Ok([
        StageProfile::from_counts(Stage::Early, counts[0]),
        StageProfile::from_counts(Stage::Mid, counts[1]),
        StageProfile::from_counts(Stage::Late, counts[2]),
    ])
}

/// Matching articles published in `[event_date, event_date + window_days)`.
pub fn window_articles<'a>(
    labeled: &'a LabeledCorpus,
    query: &IssueQuery,
    event_date: NaiveDate,
    window_days: u32,
) -> Vec<(&'a Article, Frame)> {
    let matcher = query.matcher();
    labeled
        .par_iter()
        .filter(|(a, _)| {
            let d = (a.published_at - event_date).num_days();
            d >= 0 && d < window_days as i64 && matcher.matches(a)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence<T = f64> {
    pub early_frame: Option<Frame>,
    pub early_dominance: T,
    pub late_frame: Option<Frame>,
    pub late_dominance: T,
    /// Late dominance minus early dominance.
    pub delta: T,
    pub converged: bool,
}

pub fn framing_convergence<T: Scalar>(stages: &[StageProfile<T>; 3]) -> Result<Convergence<T>> {
    if let Some(s) = stages.iter().find(|s| s.empty) {
        return Err(Error::EmptyStage(s.stage.name()));
    }
    let (early, late) = (&stages[0], &stages[2]);
    let delta = late.dominance - early.dominance;
    Ok(Convergence {
        early_frame: early.dominant_frame,
        early_dominance: early.dominance,
        late_frame: late.dominant_frame,
        late_dominance: late.dominance,
        delta,
        converged: delta > T::zero(),
    })
}
