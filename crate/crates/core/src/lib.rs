//! Analytics over a news corpus whose articles carry a primary media frame.
//!
//! The crate covers ingest and coverage auditing ([`corpus`]), the frame
//! taxonomy and label files ([`frames`]), over-represented vocabulary via
//! log-odds ratios with informative Dirichlet priors ([`lexstats`]),
//! prevalence time series, rank-sum tests and issue staging ([`trends`]),
//! lexicon sentiment ([`sentiment`]), Ward clustering of event frame
//! signatures ([`clustering`]) and a naive Bayes baseline labeler
//! ([`classifier`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for callers that do not care.

pub mod classifier;
pub mod clustering;
pub mod corpus;
pub mod error;
pub mod frames;
pub mod lexstats;
pub mod month;
pub mod report;
pub mod scalar;
pub mod sentiment;
pub mod trends;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use frames::{Frame, LabeledCorpus};
pub use month::YearMonth;
pub use scalar::Scalar;

pub type LogOddsResultF64 = lexstats::LogOddsResult<f64>;
pub type LogOddsReportF64 = lexstats::LogOddsReport<f64>;
pub type PrevalenceSeriesF64 = trends::PrevalenceSeries<f64>;
pub type MannWhitneyF64 = trends::MannWhitney<f64>;
pub type StageProfileF64 = trends::StageProfile<f64>;
pub type ConvergenceF64 = trends::Convergence<f64>;
pub type SentimentLexiconF64 = sentiment::SentimentLexicon<f64>;
pub type SentimentSeriesF64 = sentiment::SentimentSeries<f64>;
pub type FrameVectorF64 = clustering::FrameVector<f64>;
pub type DendrogramF64 = clustering::Dendrogram<f64>;
pub type NBModelF64 = classifier::NBModel<f64>;

pub type LogOddsResultF32 = lexstats::LogOddsResult<f32>;
pub type LogOddsReportF32 = lexstats::LogOddsReport<f32>;
pub type PrevalenceSeriesF32 = trends::PrevalenceSeries<f32>;
pub type MannWhitneyF32 = trends::MannWhitney<f32>;
pub type StageProfileF32 = trends::StageProfile<f32>;
pub type ConvergenceF32 = trends::Convergence<f32>;
pub type SentimentLexiconF32 = sentiment::SentimentLexicon<f32>;
pub type SentimentSeriesF32 = sentiment::SentimentSeries<f32>;
pub type FrameVectorF32 = clustering::FrameVector<f32>;
pub type DendrogramF32 = clustering::Dendrogram<f32>;
pub type NBModelF32 = classifier::NBModel<f32>;
