//! Article records, line-delimited JSON ingest, HTML keyword and URL section
//! extraction, and the monthly coverage audit.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::month::YearMonth;

/// One news item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub published_at: NaiveDate,
    pub title: String,
    pub body: String,
    pub url: String,
    pub meta_keywords: Vec<String>,
    pub section: Option<String>,
}

impl Article {
    pub fn month(&self) -> YearMonth {
        YearMonth::of(self.published_at)
    }
}

/// Names of the JSON fields holding each article attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldMap {
    pub id: String,
    pub date: String,
    pub title: String,
    pub body: String,
    pub url: String,
    pub meta_keywords: String,
    pub html_head: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id: "id".into(),
            date: "date".into(),
            title: "title".into(),
            body: "body".into(),
            url: "url".into(),
            meta_keywords: "meta_keywords".into(),
            html_head: "html_head".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestConfig {
    pub fields: FieldMap,
    /// Inclusive accepted publication range; records outside are rejected.
    pub date_range: Option<(NaiveDate, NaiveDate)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    Malformed,
    MissingField(String),
    BadDate,
    DuplicateId,
    OutOfRange,
}

impl RejectReason {
    /// Stable reason code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::Malformed => "malformed line",
            RejectReason::MissingField(_) => "missing field",
            RejectReason::BadDate => "bad date",
            RejectReason::DuplicateId => "duplicate id",
            RejectReason::OutOfRange => "out of range",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::MissingField(name) => write!(f, "missing field {name:?}"),
            other => f.write_str(other.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based line number in the input.
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub accepted: usize,
    pub rejections: Vec<Rejection>,
}

impl IngestReport {
    pub fn rejected(&self) -> usize {
        self.rejections.len()
    }

    /// Rejection counts keyed by reason code.
    pub fn by_reason(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rejections {
            *out.entry(r.reason.code()).or_insert(0) += 1;
        }
        out
    }
}

/// Immutable set of articles keyed by id, stored in id order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    articles: Vec<Article>,
}

impl Corpus {
    /// Builds a corpus, keeping the first occurrence of any repeated id.
    pub fn from_articles(articles: impl IntoIterator<Item = Article>) -> Self {
        let mut seen = HashSet::new();
        let mut articles: Vec<Article> = articles
            .into_iter()
            .filter(|a| seen.insert(a.id.clone()))
            .collect();
        articles.sort_by(|a, b| a.id.cmp(&b.id));
        Corpus { articles }
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Article> {
        self.articles
            .binary_search_by(|a| a.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.articles[i])
    }

    pub fn monthly_counts(&self) -> BTreeMap<YearMonth, u64> {
        let mut out = BTreeMap::new();
        for a in &self.articles {
            *out.entry(a.month()).or_insert(0) += 1;
        }
        out
    }
}

pub fn ingest_corpus(path: impl AsRef<Path>, config: &IngestConfig) -> Result<(Corpus, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(BufReader::new(file), config).map_err(|e| Error::io(path, e))
}

/// Ingests line-delimited JSON records. Bad lines are rejected individually;
/// only I/O failures abort.
pub fn ingest_reader<R: BufRead>(
    reader: R,
    config: &IngestConfig,
) -> std::io::Result<(Corpus, IngestReport)> {
    let lines = reader.lines().collect::<std::io::Result<Vec<String>>>()?;
    let parsed: Vec<std::result::Result<Article, RejectReason>> = lines
        .par_iter()
        .map(|line| parse_record(line, config))
        .collect();

    let mut report = IngestReport {
        lines: lines.len(),
        ..Default::default()
    };
    let mut seen = HashSet::new();
    let mut articles = Vec::with_capacity(parsed.len());
    for (i, outcome) in parsed.into_iter().enumerate() {
        let outcome = outcome.and_then(|a| {
            if seen.insert(a.id.clone()) {
                Ok(a)
            } else {
                Err(RejectReason::DuplicateId)
            }
        });
        match outcome {
            Ok(a) => articles.push(a),
            Err(reason) => report.rejections.push(Rejection { line: i + 1, reason }),
        }
    }
    report.accepted = articles.len();
    Ok((Corpus::from_articles(articles), report))
}

fn parse_record(line: &str, config: &IngestConfig) -> std::result::Result<Article, RejectReason> {
    let record: Value = serde_json::from_str(line).map_err(|_| RejectReason::Malformed)?;
    let obj = record.as_object().ok_or(RejectReason::Malformed)?;
    let f = &config.fields;

    let text = |name: &str| -> std::result::Result<String, RejectReason> {
        match obj.get(name) {
            Some(Value::String(s)) => Ok(s.clone()),
            _ => Err(RejectReason::MissingField(name.to_string())),
        }
    };
    let id = match obj.get(&f.id) {
        Some(Value::String(s)) if !s.trim().is_empty() => s.trim().to_string(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(RejectReason::MissingField(f.id.clone())),
    };
    let date = text(&f.date)?;
    let title = text(&f.title)?;
    let body = text(&f.body)?;
    let url = text(&f.url)?;

    let published_at = parse_day(&date).ok_or(RejectReason::BadDate)?;
    if let Some((start, end)) = config.date_range {
        if published_at < start || published_at > end {
            return Err(RejectReason::OutOfRange);
        }
    }

    let meta_keywords = match obj.get(&f.meta_keywords) {
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(Value::as_str)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect(),
        _ => match obj.get(&f.html_head) {
            Some(Value::String(head)) => extract_meta_keywords(head),
            _ => Vec::new(),
        },
    };

    let section = extract_section(&url);
    Ok(Article {
        id,
        published_at,
        title,
        body,
        url,
        meta_keywords,
        section,
    })
}

/// Accepts `YYYY-MM-DD`, RFC 3339 timestamps (converted to UTC), and
/// `YYYY-MM-DD HH:MM:SS` naive timestamps.
pub fn parse_day(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc).date_naive());
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.date());
        }
    }
    None
}

/// Content of the first `<meta name="keywords">` tag, split on commas,
/// trimmed, empties dropped.
pub fn extract_meta_keywords(html_head: &str) -> Vec<String> {
    for attrs in meta_tags(html_head) {
        let is_keywords = attrs
            .iter()
            .any(|(k, v)| k.eq_ignore_ascii_case("name") && v.trim().eq_ignore_ascii_case("keywords"));
        if !is_keywords {
            continue;
        }
        let content = attrs
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case("content"))
            .map(|(_, v)| html_escape::decode_html_entities(v).into_owned())
            .unwrap_or_default();
        return content
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
    }
    Vec::new()
}

/// Attribute lists of every `<meta ...>` tag, in document order.
fn meta_tags(html: &str) -> Vec<Vec<(String, String)>> {
    let bytes = html.as_bytes();
    let mut tags = Vec::new();
    let mut i = 0;
    while i + 5 <= bytes.len() {
        if bytes[i] == b'<'
            && bytes[i + 1..i + 5].eq_ignore_ascii_case(b"meta")
            && bytes
                .get(i + 5)
                .is_none_or(|b| b.is_ascii_whitespace() || *b == b'/' || *b == b'>')
        {
            let (attrs, end) = parse_attributes(html, i + 5);
            tags.push(attrs);
            i = end;
        } else {
            i += 1;
        }
    }
    tags
}

/// Parses attributes from `start` up to the closing `>`. Returns the pairs and
/// the index just past the tag.
fn parse_attributes(html: &str, start: usize) -> (Vec<(String, String)>, usize) {
    let bytes = html.as_bytes();
    let mut attrs = Vec::new();
    let mut i = start;
    loop {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'/') {
            i += 1;
        }
        if i >= bytes.len() {
            return (attrs, i);
        }
        if bytes[i] == b'>' {
            return (attrs, i + 1);
        }
        let name_start = i;
        while i < bytes.len()
            && !bytes[i].is_ascii_whitespace()
            && !matches!(bytes[i], b'=' | b'>' | b'/')
        {
            i += 1;
        }
        let name = html[name_start..i].to_string();
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let mut value = String::new();
        if i < bytes.len() && bytes[i] == b'=' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'"' || bytes[i] == b'\'') {
                let quote = bytes[i];
                let v_start = i + 1;
                let v_end = html[v_start..]
                    .bytes()
                    .position(|b| b == quote)
                    .map_or(bytes.len(), |p| v_start + p);
                value = html[v_start..v_end].to_string();
                i = (v_end + 1).min(bytes.len());
            } else {
                let v_start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' {
                    i += 1;
                }
                value = html[v_start..i].to_string();
            }
        }
        if !name.is_empty() {
            attrs.push((name, value));
        }
    }
}

/// Section segment following `/YYYY/MM/DD/` in an article URL, lowercased.
pub fn extract_section(url: &str) -> Option<String> {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let rest = rest.split(['?', '#']).next().unwrap_or_default();
    let (_, path) = rest.split_once('/')?;
    let segments: Vec<&str> = path.split('/').collect();
    let is_digits = |s: &str, n: usize| s.len() == n && s.bytes().all(|b| b.is_ascii_digit());
    for i in 0..segments.len().saturating_sub(4) {
        let (y, m, d) = (segments[i], segments[i + 1], segments[i + 2]);
        if !(is_digits(y, 4) && is_digits(m, 2) && is_digits(d, 2)) {
            continue;
        }
        let month: u32 = m.parse().ok()?;
        let day: u32 = d.parse().ok()?;
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            continue;
        }
        // the section must be a directory, not the article slug itself
        let section = segments[i + 3];
        if section.is_empty() {
            return None;
        }
        return Some(section.to_lowercase());
    }
    None
}

/// Expected monthly article counts from an external archive index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedIndex {
    pub months: BTreeMap<YearMonth, u64>,
}

impl ExpectedIndex {
    /// Parses `YYYY-MM count` lines separated by whitespace, comma, or tab.
    /// Blank lines, `#` comments and a non-numeric header line are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut months = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line
                .split(|c: char| c == ',' || c == '\t' || c.is_whitespace())
                .filter(|c| !c.is_empty());
            let (Some(m), Some(n), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::InvalidInput(format!(
                    "index line {}: expected two columns",
                    no + 1
                )));
            };
            let Ok(month) = m.parse::<YearMonth>() else {
                if months.is_empty() && no == 0 {
                    continue;
                }
                return Err(Error::InvalidInput(format!("index line {}: bad month {m:?}", no + 1)));
            };
            let count = n.parse::<u64>().map_err(|_| {
                Error::InvalidInput(format!("index line {}: bad count {n:?}", no + 1))
            })?;
            months.insert(month, count);
        }
        Ok(ExpectedIndex { months })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverageFlag {
    MissingFromIndex,
    ZeroExpected,
    ExceedsExpected,
}

impl CoverageFlag {
    pub fn code(self) -> &'static str {
        match self {
            CoverageFlag::MissingFromIndex => "missing from index",
            CoverageFlag::ZeroExpected => "zero expected",
            CoverageFlag::ExceedsExpected => "exceeds expected",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonthCoverage {
    pub month: YearMonth,
    pub present: u64,
    pub expected: Option<u64>,
    /// `present / expected`; `None` when undefined.
    pub coverage: Option<f64>,
    pub flag: Option<CoverageFlag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub months: Vec<MonthCoverage>,
    /// Sum of present over sum of expected across indexed months.
    pub overall: Option<f64>,
}

impl CoverageReport {
    /// Indexed month with the smallest defined coverage.
    pub fn lowest(&self) -> Option<&MonthCoverage> {
        self.months
            .iter()
            .filter(|m| m.coverage.is_some())
            .min_by(|a, b| a.coverage.partial_cmp(&b.coverage).unwrap())
    }
}

pub fn audit_coverage(corpus: &Corpus, index: &ExpectedIndex) -> CoverageReport {
    let present = corpus.monthly_counts();
    let mut all: Vec<YearMonth> = present.keys().chain(index.months.keys()).copied().collect();
    all.sort();
    all.dedup();

    let (mut sum_present, mut sum_expected) = (0u64, 0u64);
    let months = all
        .into_iter()
        .map(|month| {
            let p = present.get(&month).copied().unwrap_or(0);
            let expected = index.months.get(&month).copied();
            let (coverage, flag) = match expected {
                None => (None, Some(CoverageFlag::MissingFromIndex)),
                Some(0) => (None, Some(CoverageFlag::ZeroExpected)),
                Some(e) => (
                    Some(p as f64 / e as f64),
                    (p > e).then_some(CoverageFlag::ExceedsExpected),
                ),
            };
            if let Some(e) = expected {
                sum_present += p;
                sum_expected += e;
            }
            MonthCoverage {
                month,
                present: p,
                expected,
                coverage,
                flag,
            }
        })
        .collect();
    CoverageReport {
        months,
        overall: (sum_expected > 0).then(|| sum_present as f64 / sum_expected as f64),
    }
}
