//! Mann-Whitney rank-sum test with midranks, exact null distribution for
//! small tie-free samples and a tie- and continuity-corrected normal
//! approximation otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest combined sample size for which the exact distribution is used.
pub const EXACT_MAX_TOTAL: usize = 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// Sample a tends to be larger than sample b.
    Greater,
    /// Sample a tends to be smaller than sample b.
    Less,
}

impl FromStr for Alternative {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            other => Err(format!("unknown alternative {other:?}")),
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney<T = f64> {
    /// U statistic of sample a.
    pub u: T,
    /// U statistic of sample b; `u + u_b = n_a · n_b`.
    pub u_b: T,
    pub p: T,
    pub method: PValueMethod,
    pub alternative: Alternative,
}

/// Midranks (1-based) of the pooled sample. Fails on NaN.
pub fn midranks<T: Scalar>(values: &[T]) -> Result<(Vec<T>, Vec<usize>)> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("sample contains NaN".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![T::zero(); values.len()];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = T::count((start + 1 + end) as u64) / T::lit(2.0);
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            tie_sizes.push(end - start);
        }
        start = end;
    }
    Ok((ranks, tie_sizes))
}

pub fn mann_whitney_u<T: Scalar>(a: &[T], b: &[T], alternative: Alternative) -> Result<MannWhitney<T>> {
    mann_whitney_u_with(a, b, alternative, None)
}

/// As [`mann_whitney_u`], with the p-value method forced. `Exact` fails on
/// tied samples.
pub fn mann_whitney_u_with<T: Scalar>(
    a: &[T],
    b: &[T],
    alternative: Alternative,
    method: Option<PValueMethod>,
) -> Result<MannWhitney<T>> {
    if a.is_empty() {
        return Err(Error::EmptySample("a"));
    }
    if b.is_empty() {
        return Err(Error::EmptySample("b"));
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<T> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled)?;
    let rank_sum_a: T = ranks[..na].iter().copied().sum();
    let u = rank_sum_a - T::count((na * (na + 1)) as u64) / T::lit(2.0);
    let nab = T::count((na * nb) as u64);
    let u_b = nab - u;

    let method = match method {
        Some(PValueMethod::Exact) if !ties.is_empty() => {
            return Err(Error::InvalidInput("exact p-value needs tie-free samples".into()))
        }
        Some(m) => m,
        None if na + nb <= EXACT_MAX_TOTAL && ties.is_empty() => PValueMethod::Exact,
        None => PValueMethod::Normal,
    };
    let (p, method) = if method == PValueMethod::Exact {
        let u_int = u.round().to_u64().expect("non-negative U");
        (T::lit(exact_p(na, nb, u_int, alternative)), PValueMethod::Exact)
    } else {
        (
            T::lit(normal_p(na, nb, u.to_f64_lossy(), &ties, alternative)),
            PValueMethod::Normal,
        )
    };
    Ok(MannWhitney {
        u,
        u_b,
        p,
        method,
        alternative,
    })
}

/// Number of rank arrangements giving each U value, for sizes `m`, `n`.
pub fn u_distribution(m: usize, n: usize) -> Vec<u64> {
    // counts[i][j][u] built with c(i, j, u) = c(i-1, j, u-j) + c(i, j-1, u)
    let mut prev: Vec<Vec<u64>> = (0..=n).map(|_| vec![1]).collect();
    for i in 1..=m {
        let mut cur: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        cur.push(vec![1]);
        for j in 1..=n {
            let mut c = vec![0u64; i * j + 1];
            for (u, &v) in prev[j].iter().enumerate() {
                c[u + j] += v;
            }
            for (u, &v) in cur[j - 1].iter().enumerate() {
                c[u] += v;
            }
            cur.push(c);
        }
        prev = cur;
    }
    prev.swap_remove(n)
}

fn exact_p(na: usize, nb: usize, u: u64, alternative: Alternative) -> f64 {
    let dist = u_distribution(na, nb);
    let total: u64 = dist.iter().sum();
    let u = u as usize;
    let le: u64 = dist[..=u.min(dist.len() - 1)].iter().sum();
    let ge: u64 = dist[u.min(dist.len())..].iter().sum();
    let (le, ge, total) = (le as f64, ge as f64, total as f64);
    match alternative {
        Alternative::Greater => ge / total,
        Alternative::Less => le / total,
        Alternative::TwoSided => (2.0 * le.min(ge) / total).min(1.0),
    }
}

fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn normal_p(na: usize, nb: usize, u: f64, ties: &[usize], alternative: Alternative) -> f64 {
    let (na_f, nb_f) = (na as f64, nb as f64);
    let n = na_f + nb_f;
    let mean = na_f * nb_f / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = na_f * nb_f / 12.0 * ((n + 1.0) - tie_term);
    if var <= 0.0 {
        return 1.0;
    }
    let sd = var.sqrt();
    match alternative {
        Alternative::Greater => normal_sf((u - mean - 0.5) / sd),
        Alternative::Less => normal_sf((mean - u - 0.5) / sd),
        Alternative::TwoSided => {
            let big = u.max(na_f * nb_f - u);
            (2.0 * normal_sf((big - mean - 0.5) / sd)).min(1.0)
        }
    }
}
