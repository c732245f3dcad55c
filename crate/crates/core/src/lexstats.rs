//! Word over-representation between two sub-corpora: log-odds ratios with an
//! informative Dirichlet prior taken from a background corpus, their
//! approximate variance, and z-scores.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Frame, LabeledCorpus};
use crate::scalar::Scalar;

/// Lowercased maximal runs of Unicode letters and digits.
pub fn tokenize(text: &str) -> Vec<String> {
    tokens(text).collect()
}

pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Word counts of a sub-corpus. `total` is always the sum of the counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, word: impl Into<String>, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(word.into()).or_insert(0) += n;
        self.total += n;
    }

    pub fn add_text(&mut self, text: &str) {
        for t in tokens(text) {
            self.add(t, 1);
        }
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Pointwise sum.
    pub fn merge(&mut self, other: &CountTable) {
        for (w, &c) in &other.counts {
            *self.counts.entry(w.clone()).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn merged(mut self, other: &CountTable) -> CountTable {
        self.merge(other);
        self
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for CountTable {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut t = CountTable::new();
        for (w, n) in iter {
            t.add(w, n);
        }
        t
    }
}

/// Sequential unigram count over texts.
pub fn count_corpus<'a>(texts: impl IntoIterator<Item = &'a str>) -> CountTable {
    let mut table = CountTable::new();
    for t in texts {
        table.add_text(t);
    }
    table
}

/// Shard-parallel unigram count; identical to [`count_corpus`] for any
/// schedule since merges are exact integer sums.
pub fn count_corpus_par<S: AsRef<str> + Sync>(texts: &[S]) -> CountTable {
    texts
        .par_iter()
        .fold(CountTable::new, |mut acc, t| {
            acc.add_text(t.as_ref());
            acc
        })
        .reduce(CountTable::new, |a, b| a.merged(&b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogOddsParams {
    /// Minimum background count for a word to be scored.
    pub min_count: u64,
    /// Multiplier applied to background counts to form the prior.
    pub prior_scale: f64,
}

impl Default for LogOddsParams {
    fn default() -> Self {
        LogOddsParams {
            min_count: 100,
            prior_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogOddsResult<T = f64> {
    pub word: String,
    pub delta: T,
    pub variance: T,
    pub z: T,
    pub target_count: u64,
    pub reference_count: u64,
    pub background_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogOddsReport<T = f64> {
    /// Sorted by z descending, ties by word.
    pub results: Vec<LogOddsResult<T>>,
    /// Words seen in target or reference but absent from the background,
    /// sorted. They are never scored.
    pub absent_from_background: Vec<String>,
    /// Words whose log arguments were not positive.
    pub failures: Vec<String>,
}

/// Scores every background word with count ≥ `min_count`.
pub fn log_odds<T: Scalar>(
    target: &CountTable,
    reference: &CountTable,
    background: &CountTable,
    params: &LogOddsParams,
) -> Result<LogOddsReport<T>> {
    if background.total() == 0 {
        return Err(Error::InvalidInput("background corpus is empty".into()));
    }
    if !(params.prior_scale.is_finite() && params.prior_scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "prior scale must be positive, got {}",
            params.prior_scale
        )));
    }
    let mut words: Vec<(&str, u64)> = background
        .iter()
        .filter(|&(_, c)| c >= params.min_count && c > 0)
        .collect();
    words.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let scored: Vec<std::result::Result<LogOddsResult<T>, String>> = words
        .par_iter()
        .map(|&(w, bg)| {
            let (yi, yj) = (target.get(w), reference.get(w));
            score_word::<T>(
                yi,
                target.total(),
                yj,
                reference.total(),
                bg,
                background.total(),
                params.prior_scale,
            )
            .map(|(delta, variance, z)| LogOddsResult {
                word: w.to_string(),
                delta,
                variance,
                z,
                target_count: yi,
                reference_count: yj,
                background_count: bg,
            })
            .ok_or_else(|| w.to_string())
        })
        .collect();

    let mut results = Vec::with_capacity(scored.len());
    let mut failures = Vec::new();
    for s in scored {
        match s {
            Ok(r) => results.push(r),
            Err(w) => failures.push(w),
        }
    }
    results.sort_by(|a, b| {
        b.z.partial_cmp(&a.z)
            .expect("finite z")
            .then_with(|| a.word.cmp(&b.word))
    });

    let mut absent: Vec<String> = target
        .iter()
        .chain(reference.iter())
        .filter(|(w, _)| background.get(w) == 0)
        .map(|(w, _)| w.to_string())
        .collect();
    absent.sort_unstable();
    absent.dedup();

    Ok(LogOddsReport {
        results,
        absent_from_background: absent,
        failures,
    })
}

/// `(δ, σ², z)` for one word, or `None` when a log argument is not positive.
///
/// With an unscaled prior every term is an integer, so the cross-product
/// difference inside the log is formed exactly and δ keeps full relative
/// precision even when it is close to zero.
pub fn score_word<T: Scalar>(
    y_i: u64,
    n_i: u64,
    y_j: u64,
    n_j: u64,
    alpha_w: u64,
    alpha_0: u64,
    prior_scale: f64,
) -> Option<(T, T, T)> {
    if alpha_w == 0 {
        return None;
    }
    let delta = if prior_scale == 1.0 {
        let (yi, ni, yj, nj) = (y_i as i128, n_i as i128, y_j as i128, n_j as i128);
        let (aw, a0) = (alpha_w as i128, alpha_0 as i128);
        let a = yi + aw;
        let b = ni + a0 - yi - aw;
        let c = yj + aw;
        let d = nj + a0 - yj - aw;
        if b <= 0 || d <= 0 {
            return None;
        }
        // δ = ln(a/b) − ln(c/d) = ln(1 + (ad − bc) / bc)
        let num = a * d - b * c;
        let x = T::from_i128(num)? / (T::from_i128(b)? * T::from_i128(c)?);
        x.ln_1p()
    } else {
        let s = T::lit(prior_scale);
        let aw = T::count(alpha_w) * s;
        let a0 = T::count(alpha_0) * s;
        let (yi, ni, yj, nj) = (T::count(y_i), T::count(n_i), T::count(y_j), T::count(n_j));
        let a = yi + aw;
        let b = ni + a0 - yi - aw;
        let c = yj + aw;
        let d = nj + a0 - yj - aw;
        if b <= T::zero() || d <= T::zero() {
            return None;
        }
        (a / b).ln() - (c / d).ln()
    };
    let (a, c) = if prior_scale == 1.0 {
        (T::count(y_i + alpha_w), T::count(y_j + alpha_w))
    } else {
        let aw = T::count(alpha_w) * T::lit(prior_scale);
        (T::count(y_i) + aw, T::count(y_j) + aw)
    };
    let variance = a.recip() + c.recip();
    let z = delta / variance.sqrt();
    Some((delta, variance, z))
}

fn frame_text(a: &crate::corpus::Article) -> impl Iterator<Item = &str> {
    [a.title.as_str(), a.body.as_str()].into_iter()
}

fn count_where(labeled: &LabeledCorpus, pred: impl Fn(&crate::corpus::Article, Frame) -> Option<bool> + Sync) -> (CountTable, CountTable) {
    labeled
        .par_iter()
        .fold(
            || (CountTable::new(), CountTable::new()),
            |(mut yes, mut no), (a, f)| {
                match pred(a, f) {
                    Some(true) => frame_text(a).for_each(|t| yes.add_text(t)),
                    Some(false) => frame_text(a).for_each(|t| no.add_text(t)),
                    None => {}
                }
                (yes, no)
            },
        )
        .reduce(
            || (CountTable::new(), CountTable::new()),
            |(a1, b1), (a2, b2)| (a1.merged(&a2), b1.merged(&b2)),
        )
}

/// Top words of one frame against all other frames, with the whole corpus
/// as background.
pub fn frame_keywords<T: Scalar>(
    labeled: &LabeledCorpus,
    frame: Frame,
    top_k: usize,
    params: &LogOddsParams,
) -> Result<Vec<LogOddsResult<T>>> {
    if frame == Frame::Other {
        return Err(Error::InvalidInput("keywords are not computed for the Other frame".into()));
    }
    let (target, reference) = count_where(labeled, |_, f| Some(f == frame));
    if target.total() == 0 {
        return Err(Error::EmptyTarget(format!("no text in {frame} articles")));
    }
    let background = target.clone().merged(&reference);
    let mut report = log_odds::<T>(&target, &reference, &background, params)?;
    report.results.truncate(top_k);
    Ok(report.results)
}

/// Top words of one frame in one year against the same frame in all other
/// years, with all of the frame's articles as background.
pub fn frame_keywords_by_year<T: Scalar>(
    labeled: &LabeledCorpus,
    frame: Frame,
    year: i32,
    top_k: usize,
    params: &LogOddsParams,
) -> Result<Vec<LogOddsResult<T>>> {
    use chrono::Datelike;
    let (target, reference) = count_where(labeled, |a, f| {
        (f == frame).then(|| a.published_at.year() == year)
    });
    if target.total() == 0 {
        return Err(Error::EmptyTarget(format!("no {frame} articles in {year}")));
    }
    if reference.total() == 0 {
        return Err(Error::NoReference(format!("no {frame} articles outside {year}")));
    }
    let background = target.clone().merged(&reference);
    let mut report = log_odds::<T>(&target, &reference, &background, params)?;
    report.results.truncate(top_k);
    Ok(report.results)
}
