//! Frame prevalence over time and around issues.

mod issue;
mod mann_whitney;
mod prevalence;

pub use issue::{
    framing_convergence, issue_stream, parse_jsonl, read_jsonl, stage_profiles, window_articles,
    Convergence, EventSpec, IssueQuery, IssueStream, MatchField, MatchMode, Matcher, Stage,
    StageProfile,
};
pub use mann_whitney::{
    mann_whitney_u, mann_whitney_u_with, midranks, u_distribution, Alternative, MannWhitney, PValueMethod,
    EXACT_MAX_TOTAL,
};
pub use prevalence::{prevalence_series, MonthPrevalence, PrevalenceSeries};
