use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::{Frame, LabeledCorpus, FRAME_COUNT};
use crate::month::YearMonth;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct MonthPrevalence<T = f64> {
    pub month: YearMonth,
    pub articles: u64,
    pub counts: [u64; FRAME_COUNT],
    /// Share of each frame, indexed by [`Frame::index`]; `None` marks a
    /// month without articles.
    pub fractions: Option<[T; FRAME_COUNT]>,
}

impl<T: Scalar> MonthPrevalence<T> {
    pub fn fraction(&self, frame: Frame) -> Option<T> {
        self.fractions.map(|f| f[frame.index()])
    }
}

/// Monthly frame shares over a contiguous month range. Every month in the
/// range is present; shares are over all fifteen frames including `Other`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceSeries<T = f64> {
    pub months: Vec<MonthPrevalence<T>>,
}

impl<T: Scalar> PrevalenceSeries<T> {
    /// Shares of one frame for the non-empty months in `[start, end]`.
    pub fn window(&self, frame: Frame, start: YearMonth, end: YearMonth) -> Vec<T> {
        self.months
            .iter()
            .filter(|m| m.month >= start && m.month <= end)
            .filter_map(|m| m.fraction(frame))
            .collect()
    }

    /// `(month, frame, share)` rows for plotting: `Other` is left out and
    /// empty months are skipped.
    pub fn plot_rows(&self) -> Vec<(YearMonth, Frame, T)> {
        self.months
            .iter()
            .filter_map(|m| m.fractions.map(|f| (m.month, f)))
            .flat_map(|(month, f)| {
                Frame::SUBSTANTIVE
                    .iter()
                    .map(move |&frame| (month, frame, f[frame.index()]))
            })
            .collect()
    }
}

/// Per-month frame counts over `[first, last]` of the corpus.
pub(crate) fn monthly_counts<I>(items: I) -> Vec<(YearMonth, [u64; FRAME_COUNT])>
where
    I: ParallelIterator<Item = (YearMonth, Frame)>,
{
    let mut by_month: Vec<(YearMonth, [u64; FRAME_COUNT])> = items
        .fold(
            std::collections::BTreeMap::new,
            |mut acc: std::collections::BTreeMap<YearMonth, [u64; FRAME_COUNT]>, (m, f)| {
                acc.entry(m).or_insert([0; FRAME_COUNT])[f.index()] += 1;
                acc
            },
        )
        .reduce(std::collections::BTreeMap::new, |mut a, b| {
            for (m, v) in b {
                let slot = a.entry(m).or_insert([0; FRAME_COUNT]);
                for (s, x) in slot.iter_mut().zip(v) {
                    *s += x;
                }
            }
            a
        })
        .into_iter()
        .collect();
    let (Some(first), Some(last)) = (by_month.first().map(|x| x.0), by_month.last().map(|x| x.0)) else {
        return by_month;
    };
    let mut filled = Vec::new();
    let mut it = std::mem::take(&mut by_month).into_iter().peekable();
    for month in YearMonth::range(first, last) {
        match it.peek() {
            Some((m, _)) if *m == month => filled.push(it.next().unwrap()),
            _ => filled.push((month, [0; FRAME_COUNT])),
        }
    }
    filled
}

pub fn prevalence_series<T: Scalar>(labeled: &LabeledCorpus) -> Result<PrevalenceSeries<T>> {
    if labeled.is_empty() {
        return Err(Error::NoLabeledArticles);
    }
    let counts = monthly_counts(labeled.par_iter().map(|(a, f)| (a.month(), f)));
    let months = counts
        .into_iter()
        .map(|(month, counts)| {
            let articles: u64 = counts.iter().sum();
            let fractions = (articles > 0).then(|| {
                let n = T::count(articles);
                counts.map(|c| T::count(c) / n)
            });
            MonthPrevalence {
                month,
                articles,
                counts,
                fractions,
            }
        })
        .collect();
    Ok(PrevalenceSeries { months })
}
