mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use config::{CommonArgs, RunConfig, UsageError};

/// Media-frame analytics over a labeled news corpus.
#[derive(Debug, Parser)]
#[command(name = "framelens", version, about)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct IssueArgs {
    /// Line-delimited JSON queries ({"name", "keywords", "match"})
    #[arg(long)]
    pub query: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    /// Keyword phrase; repeat for several
    #[arg(long = "keyword")]
    pub keywords: Vec<String>,
    /// any or all
    #[arg(long = "match", default_value = "any")]
    pub mode: String,
}

#[derive(Debug, Args)]
pub struct EventArgs {
    /// Line-delimited JSON events ({"name", "keywords", "match", "date"})
    #[arg(long, alias = "events")]
    pub event: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long = "keyword")]
    pub keywords: Vec<String>,
    #[arg(long = "match", default_value = "any")]
    pub mode: String,
    /// Event date (YYYY-MM-DD)
    #[arg(long)]
    pub date: Option<NaiveDate>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the corpus file and report rejected lines
    IngestCheck {
        /// First accepted publication date
        #[arg(long)]
        from: Option<NaiveDate>,
        /// Last accepted publication date
        #[arg(long)]
        to: Option<NaiveDate>,
    },
    /// Compare monthly article counts with an expected-count index
    Coverage {
        #[arg(long)]
        index: PathBuf,
    },
    /// Frame distribution under the most common META keywords or URL sections
    FrameFreq {
        /// keyword or section
        #[arg(long, default_value = "keyword")]
        key: String,
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
    /// Over-represented words of a frame against all other frames
    Keywords {
        /// Frame name; every substantive frame when omitted
        #[arg(long)]
        frame: Option<String>,
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
    /// Over-represented words of a frame in one year against its other years
    KeywordsByYear {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        year: i32,
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
    /// Monthly prevalence of every frame
    Trends,
    /// Rank-sum test of a frame's monthly prevalence between two month ranges
    TestShift {
        #[arg(long)]
        frame: String,
        /// First range, YYYY-MM..YYYY-MM
        #[arg(long)]
        first: String,
        /// Second range, YYYY-MM..YYYY-MM
        #[arg(long)]
        second: String,
        /// two-sided, greater or less (first relative to second)
        #[arg(long, default_value = "two-sided")]
        alternative: String,
    },
    /// Monthly frame counts of keyword-defined issues
    Issue(IssueArgs),
    /// Early, mid and late frame profiles after events
    Stages(EventArgs),
    /// Change in dominant-frame share from early to late stage
    Convergence(EventArgs),
    /// Mean compound sentiment per month and frame
    Sentiment {
        #[command(flatten)]
        event: EventArgs,
    },
    /// Ward clustering of events by frame prevalence
    Cluster {
        #[command(flatten)]
        events: EventArgs,
        /// Number of clusters to cut
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Weight cluster means by article count
        #[arg(long)]
        weighted: bool,
    },
    /// Train the naive Bayes baseline labeler
    NbTrain {
        /// Training CSV: article_id,frame[,confidence],text
        #[arg(long)]
        train: Option<PathBuf>,
        /// Media Frames Corpus annotation JSON; repeatable
        #[arg(long)]
        mfc: Vec<PathBuf>,
        #[arg(long, default_value_t = framelens_core::classifier::DEFAULT_SMOOTHING)]
        smoothing: f64,
        /// Model destination (default: <out>/model.json)
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Label every corpus article with a trained model
    NbLabel {
        #[arg(long)]
        model: PathBuf,
        /// Label file destination (default: <out>/labels.csv)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let level = if cli.common.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::resolve(&cli.common)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    use commands as c;
    match cli.command {
        Command::IngestCheck { from, to } => c::ingest_check(&cfg, from, to),
        Command::Coverage { index } => c::coverage(&cfg, &index),
        Command::FrameFreq { key, top } => c::frame_freq(&cfg, &key, top),
        Command::Keywords { frame, top } => c::keywords(&cfg, frame.as_deref(), top),
        Command::KeywordsByYear { frame, year, top } => c::keywords_by_year(&cfg, &frame, year, top),
        Command::Trends => c::trends(&cfg),
        Command::TestShift { frame, first, second, alternative } => c::test_shift(&cfg, &frame, &first, &second, &alternative),
        Command::Issue(args) => c::issue(&cfg, &args),
        Command::Stages(args) => c::stages(&cfg, &args),
        Command::Convergence(args) => c::convergence(&cfg, &args),
        Command::Sentiment { event } => c::sentiment(&cfg, &event),
        Command::Cluster { events, k, weighted } => c::cluster(&cfg, &events, k, weighted),
        Command::NbTrain { train, mfc, smoothing, model } => c::nb_train(&cfg, train.as_deref(), &mfc, smoothing, model.as_deref()),
        Command::NbLabel { model, output } => c::nb_label(&cfg, &model, output.as_deref()),
    }
}
