//! Lexicon sentiment: per-article compound scores and their monthly and
//! per-frame aggregation.
//!
//! The scorer keeps the core of the VADER heuristics: summed word valences,
//! sign flip with damping after a negator, intensity boosters, and the
//! `s / √(s² + 15)` squashing. Punctuation emphasis, capitalization and
//! contrastive-conjunction rules are not modelled.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::frames::{Frame, LabeledCorpus};
use crate::month::YearMonth;
use crate::scalar::{sample_sd, Scalar};
use crate::trends::{window_articles, IssueQuery};

/// Sign flip and damping applied to a valence preceded by a negator.
pub const NEGATION_SCALAR: f64 = -0.74;
/// Tokens before a hit searched for a negator.
pub const NEGATION_WINDOW: usize = 3;
pub const BOOSTER_INCREMENT: f64 = 0.293;
pub const NORMALIZATION_ALPHA: f64 = 15.0;

const NEGATORS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent", "isnt",
    "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't",
    "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
    "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't", "shouldn't",
    "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't", "rarely",
    "seldom", "despite",
];

const BOOSTERS_UP: &[&str] = &[
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly", "very",
];

const BOOSTERS_DOWN: &[&str] = &[
    "almost", "barely", "hardly", "kinda", "kindof", "kind-of", "less", "little", "marginal",
    "marginally", "occasional", "occasionally", "partly", "scarce", "scarcely", "slight",
    "slightly", "somewhat", "sorta", "sortof", "sort-of",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentLexicon<T = f64> {
    valences: HashMap<String, T>,
    negators: HashSet<String>,
    /// Additive intensity weights; negative for dampeners.
    modifiers: HashMap<String, T>,
    /// Repeated entries seen while loading; the last one wins.
    pub duplicates: usize,
}

impl<T: Scalar> SentimentLexicon<T> {
    /// Lexicon with the default English negators and boosters.
    pub fn from_valences(entries: impl IntoIterator<Item = (String, T)>) -> Result<Self> {
        let mut valences = HashMap::new();
        let mut duplicates = 0;
        for (w, v) in entries {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("valence of {w:?} is not finite")));
            }
            if valences.insert(w, v).is_some() {
                duplicates += 1;
            }
        }
        let b = T::lit(BOOSTER_INCREMENT);
        let modifiers = BOOSTERS_UP
            .iter()
            .map(|w| (w.to_string(), b))
            .chain(BOOSTERS_DOWN.iter().map(|w| (w.to_string(), -b)))
            .collect();
        Ok(SentimentLexicon {
            valences,
            negators: NEGATORS.iter().map(|w| w.to_string()).collect(),
            modifiers,
            duplicates,
        })
    }

    /// Parses `word<TAB>valence[<TAB>...]` lines; extra columns are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(word), Some(val)) = (cols.next(), cols.next()) else {
                return Err(Error::InvalidInput(format!("lexicon line {}: expected word<TAB>valence", i + 1)));
            };
            let v: f64 = val.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("lexicon line {}: bad valence {val:?}", i + 1))
            })?;
            entries.push((word.trim().to_string(), T::lit(v)));
        }
        Self::from_valences(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn with_negators(mut self, words: impl IntoIterator<Item = String>) -> Self {
        self.negators = words.into_iter().collect();
        self
    }

    pub fn with_modifiers(mut self, weights: impl IntoIterator<Item = (String, T)>) -> Self {
        self.modifiers = weights.into_iter().collect();
        self
    }

    /// Same lexicon with every valence negated.
    pub fn negated(&self) -> Self {
        SentimentLexicon {
            valences: self.valences.iter().map(|(w, &v)| (w.clone(), -v)).collect(),
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    pub fn valence(&self, word: &str) -> Option<T> {
        self.valences.get(word).copied()
    }

    fn is_negator(&self, word: &str) -> bool {
        self.negators.contains(word) || word.contains("n't")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore<T = f64> {
    /// Always within [-1, 1].
    pub compound: T,
}

/// Whitespace tokens, lowercased, with surrounding punctuation removed unless
/// that would leave two characters or fewer (emoticons survive).
pub fn sentiment_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            let stripped = t.trim_matches(|c: char| c.is_ascii_punctuation());
            if stripped.chars().count() <= 2 { t } else { stripped }.to_lowercase()
        })
        .collect()
}

/// `s / √(s² + alpha)`, clamped to [-1, 1].
pub fn normalize<T: Scalar>(sum: T, alpha: T) -> T {
    let x = sum / (sum * sum + alpha).sqrt();
    x.max(-T::one()).min(T::one())
}

/// Raw adjusted valence sum of a text.
pub fn valence_sum<T: Scalar>(text: &str, lexicon: &SentimentLexicon<T>) -> T {
    let tokens = sentiment_tokens(text);
    let mut sum = T::zero();
    for (i, tok) in tokens.iter().enumerate() {
        if lexicon.modifiers.contains_key(tok) {
            continue;
        }
        let Some(mut v) = lexicon.valence(tok) else {
            continue;
        };
        if i > 0 {
            let prev = &tokens[i - 1];
            if let (Some(&w), None) = (lexicon.modifiers.get(prev), lexicon.valence(prev)) {
                v = if v < T::zero() { v - w } else { v + w };
            }
        }
        let lo = i.saturating_sub(NEGATION_WINDOW);
        if tokens[lo..i].iter().any(|t| lexicon.is_negator(t)) {
            v = v * T::lit(NEGATION_SCALAR);
        }
        sum = sum + v;
    }
    sum
}

pub fn score_text<T: Scalar>(text: &str, lexicon: &SentimentLexicon<T>) -> SentimentScore<T> {
    SentimentScore {
        compound: normalize(valence_sum(text, lexicon), T::lit(NORMALIZATION_ALPHA)),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreTarget {
    Headline,
    #[default]
    Body,
}

impl ScoreTarget {
    pub fn text(self, article: &Article) -> &str {
        match self {
            ScoreTarget::Headline => &article.title,
            ScoreTarget::Body => &article.body,
        }
    }
}

impl FromStr for ScoreTarget {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "headline" => Ok(ScoreTarget::Headline),
            "body" => Ok(ScoreTarget::Body),
            other => Err(format!("unknown target {other:?} (expected headline or body)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMonthSentiment<T = f64> {
    pub month: YearMonth,
    pub frame: Frame,
    pub mean_compound: T,
    pub articles: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentSeries<T = f64> {
    /// Sorted by month then frame; only non-empty cells.
    pub cells: Vec<FrameMonthSentiment<T>>,
    /// Article-weighted mean over all frames, per month.
    pub overall: Vec<(YearMonth, T, u64)>,
}

impl<T: Scalar> SentimentSeries<T> {
    /// Sample standard deviation of a frame's monthly means.
    pub fn frame_spread(&self, frame: Frame) -> Option<T> {
        let means: Vec<T> = self
            .cells
            .iter()
            .filter(|c| c.frame == frame)
            .map(|c| c.mean_compound)
            .collect();
        sample_sd(&means)
    }
}

fn scored<'a, T: Scalar>(
    items: &[(&'a Article, Frame)],
    lexicon: &SentimentLexicon<T>,
    target: ScoreTarget,
) -> Vec<(&'a Article, Frame, T)> {
    // scores are computed in parallel but summed afterwards in input order
    let scores: Vec<T> = items
        .par_iter()
        .map(|(a, _)| score_text(target.text(a), lexicon).compound)
        .collect();
    items
        .iter()
        .zip(scores)
        .map(|(&(a, f), s)| (a, f, s))
        .collect()
}

pub fn sentiment_by_frame<T: Scalar>(
    labeled: &LabeledCorpus,
    lexicon: &SentimentLexicon<T>,
    target: ScoreTarget,
) -> Result<SentimentSeries<T>> {
    if labeled.is_empty() {
        return Err(Error::NoLabeledArticles);
    }
    let items: Vec<(&Article, Frame)> = labeled.iter().collect();
    let mut cells: BTreeMap<(YearMonth, Frame), (T, u64)> = BTreeMap::new();
    let mut overall: BTreeMap<YearMonth, (T, u64)> = BTreeMap::new();
    for (a, f, s) in scored(&items, lexicon, target) {
        let c = cells.entry((a.month(), f)).or_insert((T::zero(), 0));
        c.0 = c.0 + s;
        c.1 += 1;
        let o = overall.entry(a.month()).or_insert((T::zero(), 0));
        o.0 = o.0 + s;
        o.1 += 1;
    }
    Ok(SentimentSeries {
        cells: cells
            .into_iter()
            .map(|((month, frame), (sum, n))| FrameMonthSentiment {
                month,
                frame,
                mean_compound: sum / T::count(n),
                articles: n,
            })
            .collect(),
        overall: overall
            .into_iter()
            .map(|(m, (sum, n))| (m, sum / T::count(n), n))
            .collect(),
    })
}

/// Per-frame mean compound of an issue's articles in
/// `[event_date, event_date + window_days)`. Frames without articles are
/// omitted.
pub fn issue_sentiment<T: Scalar>(
    labeled: &LabeledCorpus,
    query: &IssueQuery,
    event_date: NaiveDate,
    window_days: u32,
    lexicon: &SentimentLexicon<T>,
    target: ScoreTarget,
) -> Result<Vec<(Frame, T, u64)>> {
    query.validate()?;
    let mut items = window_articles(labeled, query, event_date, window_days);
    if items.is_empty() {
        return Err(Error::NoMatches(query.name.clone()));
    }
    items.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    let mut per_frame: BTreeMap<Frame, (T, u64)> = BTreeMap::new();
    for (_, f, s) in scored(&items, lexicon, target) {
        let c = per_frame.entry(f).or_insert((T::zero(), 0));
        c.0 = c.0 + s;
        c.1 += 1;
    }
    Ok(per_frame
        .into_iter()
        .map(|(f, (sum, n))| (f, sum / T::count(n), n))
        .collect())
}
