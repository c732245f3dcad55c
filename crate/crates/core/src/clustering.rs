//! Events as 14-dimensional frame-prevalence vectors, Ward clustering of
//! those vectors, and per-cluster summaries.

use std::collections::HashSet;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Frame, LabeledCorpus, FRAME_COUNT};
use crate::scalar::{mean, sample_sd, Scalar};
use crate::trends::{window_articles, EventSpec, IssueQuery};

pub const DIMENSIONS: usize = FRAME_COUNT - 1;

/// Relative tolerance under which two merge costs count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameVector<T = f64> {
    pub event: String,
    /// Prevalence of each substantive frame, in [`Frame::SUBSTANTIVE`] order.
    pub values: [T; DIMENSIONS],
    pub n_articles: u64,
}

impl<T: Scalar> FrameVector<T> {
    /// True when every matched article was labeled `Other`.
    pub fn all_other(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn get(&self, frame: Frame) -> Option<T> {
        Frame::SUBSTANTIVE
            .iter()
            .position(|&f| f == frame)
            .map(|i| self.values[i])
    }
}

/// Frame shares of the articles matching `query` in
/// `[event_date, event_date + window_days)`. The denominator counts
/// `Other`-labeled articles too.
pub fn event_frame_vector<T: Scalar>(
    labeled: &LabeledCorpus,
    query: &IssueQuery,
    event_date: NaiveDate,
    window_days: u32,
) -> Result<FrameVector<T>> {
    query.validate()?;
    let matched = window_articles(labeled, query, event_date, window_days);
    if matched.is_empty() {
        return Err(Error::NoMatches(query.name.clone()));
    }
    let mut counts = [0u64; FRAME_COUNT];
    for (_, f) in &matched {
        counts[f.index()] += 1;
    }
    let n = T::count(matched.len() as u64);
    let values = Frame::SUBSTANTIVE.map(|f| T::count(counts[f.index()]) / n);
    let v = FrameVector {
        event: query.name.clone(),
        values,
        n_articles: matched.len() as u64,
    };
    if v.all_other() {
        log::warn!("event {:?}: all {} matched articles are labeled Other", v.event, v.n_articles);
    }
    Ok(v)
}

/// One vector per event, in input order. `default_window` applies to events
/// that do not set their own.
pub fn event_frame_vectors<T: Scalar>(
    labeled: &LabeledCorpus,
    events: &[EventSpec],
    default_window: u32,
) -> Result<Vec<FrameVector<T>>> {
    events
        .par_iter()
        .map(|e| event_frame_vector(labeled, &e.query, e.date, e.window_days.unwrap_or(default_window)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge<T = f64> {
    /// Node ids: leaves are `0..n`, the node created by merge `s` is `n + s`.
    pub left: usize,
    pub right: usize,
    /// Merge cost in Euclidean units.
    pub height: T,
    /// Leaves under the new node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T = f64> {
    pub names: Vec<String>,
    pub merges: Vec<Merge<T>>,
}

impl<T: Scalar> Dendrogram<T> {
    pub fn leaves(&self) -> usize {
        self.names.len()
    }

    /// Leaves in drawing order, left subtree first.
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.leaves();
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![if self.merges.is_empty() { 0 } else { n + self.merges.len() - 1 }];
        while let Some(node) = stack.pop() {
            if node < n {
                out.push(node);
            } else {
                let m = &self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    /// Cluster label of each leaf after the first `n - k` merges. Labels are
    /// numbered in order of each cluster's smallest member name.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.leaves();
        if k == 0 || k > n {
            return Err(Error::ClusterCount { k, n });
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        // representative leaf of each node created so far
        let mut rep: Vec<usize> = (0..n).collect();
        for m in &self.merges[..n - k] {
            let (a, b) = (find(&mut parent, rep[m.left]), find(&mut parent, rep[m.right]));
            parent[b] = a;
            rep.push(a);
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        let mut first_name: Vec<(&str, usize)> = Vec::new();
        for (i, &r) in roots.iter().enumerate() {
            match first_name.iter_mut().find(|(_, root)| *root == r) {
                Some(entry) => {
                    if self.names[i].as_str() < entry.0 {
                        entry.0 = &self.names[i];
                    }
                }
                None => first_name.push((&self.names[i], r)),
            }
        }
        first_name.sort();
        Ok(roots
            .iter()
            .map(|r| first_name.iter().position(|(_, root)| root == r).unwrap())
            .collect())
    }
}

/// Ward clustering of named points.
pub fn ward_linkage<T: Scalar>(names: &[String], points: &[Vec<T>]) -> Result<Dendrogram<T>> {
    let n = points.len();
    if names.len() != n {
        return Err(Error::InvalidInput("one name per point required".into()));
    }
    if n < 2 {
        return Err(Error::ClusterCount { k: 2, n });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = names.iter().find(|name| !seen.insert(name.as_str())) {
        return Err(Error::DuplicateEvent(dup.clone()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidInput("points differ in dimension".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }

    // squared distances between active clusters
    let mut d2 = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s: T = points[i].iter().zip(&points[j]).map(|(&a, &b)| (a - b) * (a - b)).sum();
            d2[i][j] = s;
            d2[j][i] = s;
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut size: Vec<usize> = vec![1; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut key: Vec<&str> = names.iter().map(String::as_str).collect();
    let tol = T::lit(TIE_TOLERANCE);
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let live: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let mut best = T::infinity();
        for (x, &i) in live.iter().enumerate() {
            for &j in &live[x + 1..] {
                best = best.min(d2[i][j]);
            }
        }
        let limit = best + tol * best.abs();
        let mut pick: Option<(usize, usize)> = None;
        for (x, &i) in live.iter().enumerate() {
            for &j in &live[x + 1..] {
                if d2[i][j] > limit {
                    continue;
                }
                let cand = ordered(&key, i, j);
                if pick.is_none_or(|p| pair_key(&key, cand) < pair_key(&key, p)) {
                    pick = Some(cand);
                }
            }
        }
        let (i, j) = pick.expect("at least two active clusters");
        merges.push(Merge {
            left: node[i],
            right: node[j],
            height: d2[i][j].max(T::zero()).sqrt(),
            size: size[i] + size[j],
        });
        // Lance–Williams update for Ward, kept in slot i
        let (ni, nj) = (T::count(size[i] as u64), T::count(size[j] as u64));
        for &k in &live {
            if k == i || k == j {
                continue;
            }
            let nk = T::count(size[k] as u64);
            let v = ((ni + nk) * d2[k][i] + (nj + nk) * d2[k][j] - nk * d2[i][j]) / (ni + nj + nk);
            d2[i][k] = v;
            d2[k][i] = v;
        }
        active[j] = false;
        size[i] += size[j];
        node[i] = n + step;
        key[i] = key[i].min(key[j]);
    }
    Ok(Dendrogram {
        names: names.to_vec(),
        merges,
    })
}

fn ordered(key: &[&str], i: usize, j: usize) -> (usize, usize) {
    if key[i] <= key[j] {
        (i, j)
    } else {
        (j, i)
    }
}

fn pair_key<'a>(key: &[&'a str], (i, j): (usize, usize)) -> (&'a str, &'a str) {
    (key[i], key[j])
}

pub fn ward_cluster<T: Scalar>(vectors: &[FrameVector<T>]) -> Result<Dendrogram<T>> {
    let names: Vec<String> = vectors.iter().map(|v| v.event.clone()).collect();
    let points: Vec<Vec<T>> = vectors.iter().map(|v| v.values.to_vec()).collect();
    ward_linkage(&names, &points)
}

fn check_partition(labels: &[usize], n: usize) -> Result<usize> {
    if labels.len() != n {
        return Err(Error::InvalidInput(format!("{} labels for {n} vectors", labels.len())));
    }
    Ok(labels.iter().max().map_or(0, |m| m + 1))
}

/// Mean prevalence per frame for each cluster, indexed by cluster label.
/// With `weighted`, events count in proportion to their article totals.
pub fn cluster_prevalence_table<T: Scalar>(
    labels: &[usize],
    vectors: &[FrameVector<T>],
    weighted: bool,
) -> Result<Vec<[T; DIMENSIONS]>> {
    let k = check_partition(labels, vectors.len())?;
    let mut table = Vec::with_capacity(k);
    for c in 0..k {
        let members: Vec<&FrameVector<T>> = labels
            .iter()
            .zip(vectors)
            .filter(|(&l, _)| l == c)
            .map(|(_, v)| v)
            .collect();
        if members.is_empty() {
            return Err(Error::InvalidInput(format!("cluster {c} has no members")));
        }
        let weight = |v: &FrameVector<T>| if weighted { T::count(v.n_articles) } else { T::one() };
        let total: T = members.iter().map(|v| weight(v)).sum();
        let mut row = [T::zero(); DIMENSIONS];
        for (d, slot) in row.iter_mut().enumerate() {
            *slot = members.iter().map(|v| weight(v) * v.values[d]).sum::<T>() / total;
        }
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn arrow(self) -> char {
        match self {
            Direction::Up => '↑',
            Direction::Down => '↓',
        }
    }
}

/// Frames whose cluster mean lies more than one sample standard deviation
/// from the mean of the events in all other clusters. Indexed by cluster
/// label; frames appear in canonical order.
pub fn discriminating_frames<T: Scalar>(
    labels: &[usize],
    vectors: &[FrameVector<T>],
) -> Result<Vec<Vec<(Frame, Direction)>>> {
    let k = check_partition(labels, vectors.len())?;
    if k < 2 {
        return Err(Error::ClusterCount { k, n: vectors.len() });
    }
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let others = labels.iter().filter(|&&l| l != c).count();
        if others < 2 {
            return Err(Error::ComplementTooSmall(c));
        }
        let mut flagged = Vec::new();
        for (d, &frame) in Frame::SUBSTANTIVE.iter().enumerate() {
            let (inside, outside): (Vec<_>, Vec<_>) = labels
                .iter()
                .zip(vectors)
                .map(|(&l, v)| (l == c, v.values[d]))
                .partition(|(is_in, _)| *is_in);
            let inside: Vec<T> = inside.into_iter().map(|(_, v)| v).collect();
            let outside: Vec<T> = outside.into_iter().map(|(_, v)| v).collect();
            let (Some(m_c), Some(m_o), Some(sd_o)) = (mean(&inside), mean(&outside), sample_sd(&outside)) else {
                return Err(Error::InvalidInput(format!("cluster {c} has no members")));
            };
            if m_c > m_o + sd_o {
                flagged.push((frame, Direction::Up));
            } else if m_c < m_o - sd_o {
                flagged.push((frame, Direction::Down));
            }
        }
        out.push(flagged);
    }
    Ok(out)
}
