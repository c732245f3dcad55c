use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use framelens_core::sentiment::ScoreTarget;
use serde::Serialize;

pub const DEFAULT_MIN_COUNT: u64 = 100;
pub const DEFAULT_WINDOW_DAYS: u32 = 28;

/// Settings shared by every subcommand. Each comes from a flag, then a
/// `FRAMELENS_*` environment variable, then the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key=value configuration file
    #[arg(long, global = true, env = "FRAMELENS_CONFIG")]
    pub config: Option<PathBuf>,
    /// Line-delimited JSON article records
    #[arg(long, global = true, env = "FRAMELENS_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Frame label CSV
    #[arg(long, global = true, env = "FRAMELENS_LABELS")]
    pub labels: Option<PathBuf>,
    /// Sentiment lexicon (word<TAB>valence)
    #[arg(long, global = true, env = "FRAMELENS_LEXICON")]
    pub lexicon: Option<PathBuf>,
    /// Output directory
    #[arg(long, short, global = true, env = "FRAMELENS_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "FRAMELENS_MIN_COUNT")]
    pub min_count: Option<u64>,
    #[arg(long, global = true, env = "FRAMELENS_WINDOW_DAYS")]
    pub window_days: Option<u32>,
    /// Time granularity; only `month` is supported
    #[arg(long, global = true, env = "FRAMELENS_GRANULARITY")]
    pub granularity: Option<String>,
    /// Text scored for sentiment: headline or body
    #[arg(long, global = true, env = "FRAMELENS_TARGET")]
    pub target: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "FRAMELENS_THREADS")]
    pub threads: Option<usize>,
    /// Also write SVG figures where available
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Granularity {
    Month,
}

/// Fully resolved settings.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub out: PathBuf,
    pub min_count: u64,
    pub window_days: u32,
    pub granularity: Granularity,
    pub target: ScoreTarget,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub svg: bool,
}

/// A configuration problem the user must fix; reported as a usage error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: String) -> anyhow::Error {
    UsageError(msg).into()
}

pub fn parse_config_file(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(usage(format!("config line {}: expected key=value", i + 1)));
        };
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

const KNOWN_KEYS: &[&str] = &[
    "corpus", "labels", "lexicon", "out", "min_count", "window_days", "granularity", "target", "threads",
];

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> anyhow::Result<RunConfig> {
        let file = match &args.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config file {}", p.display()))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        if let Some(k) = file.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(usage(format!("unknown config key {k:?}")));
        }
        let path = |flag: &Option<PathBuf>, key: &str| flag.clone().or_else(|| file.get(key).map(PathBuf::from));
        fn num<T: std::str::FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> anyhow::Result<Option<T>> {
            match (flag, file.get(key)) {
                (Some(v), _) => Ok(Some(v)),
                (None, Some(s)) => s
                    .parse()
                    .map(Some)
                    .map_err(|_| usage(format!("config key {key}: invalid value {s:?}"))),
                (None, None) => Ok(None),
            }
        }
        let granularity = match args.granularity.clone().or_else(|| file.get("granularity").cloned()).as_deref() {
            None | Some("month") => Granularity::Month,
            Some(other) => return Err(usage(format!("unsupported granularity {other:?} (only month)"))),
        };
        let target = match args.target.clone().or_else(|| file.get("target").cloned()) {
            None => ScoreTarget::default(),
            Some(s) => s.parse().map_err(usage)?,
        };
        let window_days = num(args.window_days, &file, "window_days")?.unwrap_or(DEFAULT_WINDOW_DAYS);
        if window_days == 0 {
            return Err(usage("window_days must be positive".into()));
        }
        let threads = num(args.threads, &file, "threads")?;
        if threads == Some(0) {
            return Err(usage("threads must be positive".into()));
        }
        Ok(RunConfig {
            corpus: path(&args.corpus, "corpus"),
            labels: path(&args.labels, "labels"),
            lexicon: path(&args.lexicon, "lexicon"),
            out: path(&args.out, "out").unwrap_or_else(|| PathBuf::from(".")),
            min_count: num(args.min_count, &file, "min_count")?.unwrap_or(DEFAULT_MIN_COUNT),
            window_days,
            granularity,
            target,
            threads,
            svg: args.svg,
        })
    }

    fn existing<'a>(&self, p: &'a Option<PathBuf>, what: &str) -> anyhow::Result<&'a Path> {
        let Some(p) = p else {
            return Err(usage(format!("no {what} given (--{what}, FRAMELENS_{}, or config key {what})", what.to_uppercase())));
        };
        if !p.is_file() {
            bail!("{what} file {} does not exist", p.display());
        }
        Ok(p)
    }

    pub fn corpus_path(&self) -> anyhow::Result<&Path> {
        self.existing(&self.corpus, "corpus")
    }

    pub fn labels_path(&self) -> anyhow::Result<&Path> {
        self.existing(&self.labels, "labels")
    }

    pub fn lexicon_path(&self) -> anyhow::Result<&Path> {
        self.existing(&self.lexicon, "lexicon")
    }
}

pub fn require_file(p: &Path, what: &str) -> anyhow::Result<()> {
    if !p.is_file() {
        bail!("{what} file {} does not exist", p.display());
    }
    Ok(())
}
