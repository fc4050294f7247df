//! Run configuration: command-line flags over an optional TOML file over
//! built-in defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use resnet_core::resilience::{MonitorConfig, RobustnessSource};
use resnet_core::signed::{ImpactOrientation, ImportanceMethod};
use resnet_core::ingest::SourceKind;

use crate::error::CliError;

/// Flags shared by every subcommand.
#[derive(Args, Debug, Default, Clone)]
pub struct Overrides {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Window width: seconds, or a number with suffix s, m, h, d or w.
    /// Defaults to the full time range of the log.
    #[arg(long, global = true, value_name = "DURATION")]
    pub window: Option<String>,

    /// Window step (defaults to the window width).
    #[arg(long, global = true, value_name = "DURATION")]
    pub step: Option<String>,

    /// Maximum time between two edits of the same artifact for them to
    /// count as an interaction.
    #[arg(long = "delta-t", global = true, value_name = "DURATION")]
    pub delta_t: Option<String>,

    /// What event objects are: `artifact` (co-editing) or `actor`.
    #[arg(long, global = true, value_name = "KIND")]
    pub kind: Option<String>,

    /// CSV of `raw,canonical` identity aliases.
    #[arg(long, global = true, value_name = "FILE")]
    pub alias: Option<PathBuf>,

    /// Make every window network undirected.
    #[arg(long, global = true)]
    pub symmetrize: bool,

    /// Keep going past malformed input records (they are logged).
    #[arg(long = "skip-bad-records", global = true)]
    pub skip_bad_records: bool,

    /// Keep only significantly over-represented dyads at this level before
    /// analysis.
    #[arg(long, global = true, value_name = "ALPHA")]
    pub alpha: Option<f64>,

    /// Slope of the balance-to-robustness logistic map.
    #[arg(long, global = true, value_name = "BETA")]
    pub beta: Option<f64>,

    /// Robustness source: balance, coreness, centralization or eigengap.
    #[arg(long, global = true, value_name = "SOURCE")]
    pub robustness: Option<String>,

    /// Importance method: coreness, eigenvector or uniform.
    #[arg(long, global = true, value_name = "METHOD")]
    pub importance: Option<String>,

    /// Impact orientation: row (own relations) or column (received).
    #[arg(long, global = true, value_name = "ORIENTATION")]
    pub orientation: Option<String>,

    /// Use the decreasing logistic map `1 / (1 + exp(beta * T))`.
    #[arg(long = "paper-literal", global = true)]
    pub paper_literal: bool,

    /// Min-max rescale the propensity to change across the series.
    #[arg(long, global = true)]
    pub recalibrate: bool,

    /// Seed for Monte-Carlo estimates and random intervention plans.
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Leave threshold on total impact for plans that do not set one.
    #[arg(long, global = true, value_name = "THETA", allow_negative_numbers = true)]
    pub theta: Option<f64>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum DurationValue {
    Seconds(u64),
    Text(String),
}

#[derive(Deserialize, Debug, Default)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    window: Option<DurationValue>,
    step: Option<DurationValue>,
    delta_t: Option<DurationValue>,
    kind: Option<String>,
    alias: Option<PathBuf>,
    symmetrize: Option<bool>,
    skip_bad_records: Option<bool>,
    alpha: Option<f64>,
    beta: Option<f64>,
    robustness: Option<String>,
    importance: Option<String>,
    orientation: Option<String>,
    paper_literal: Option<bool>,
    recalibrate: Option<bool>,
    seed: Option<u64>,
    theta: Option<f64>,
    jobs: Option<usize>,
    exact_limit: Option<u64>,
    mc_draws: Option<usize>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: SourceKind,
    pub alias: Option<PathBuf>,
    /// `None` means the whole time range.
    pub window: Option<u64>,
    pub step: Option<u64>,
    pub delta_t: Option<u64>,
    pub symmetrize: bool,
    pub skip_bad_records: bool,
    pub alpha: Option<f64>,
    pub monitor: MonitorConfig,
    pub seed: u64,
    pub theta: f64,
    pub jobs: Option<usize>,
}

/// Parses `3600`, `90s`, `15m`, `12h`, `7d` or `2w` into seconds.
pub fn parse_duration(text: &str) -> Result<u64, CliError> {
    let t = text.trim();
    let (digits, unit) = match t.find(|c: char| !c.is_ascii_digit()) {
        Some(pos) => t.split_at(pos),
        None => (t, ""),
    };
    let scale = match unit {
        "" | "s" => 1,
        "m" => 60,
        "h" => 3600,
        "d" => 86_400,
        "w" => 604_800,
        _ => return Err(CliError::input(format!("invalid duration {text:?} (use e.g. 3600, 90s, 15m, 12h, 7d, 2w)"))),
    };
    let n: u64 = digits
        .parse()
        .map_err(|_| CliError::input(format!("invalid duration {text:?} (use e.g. 3600, 90s, 15m, 12h, 7d, 2w)")))?;
    n.checked_mul(scale)
        .ok_or_else(|| CliError::input(format!("duration {text:?} is too large")))
}

fn duration(flag: &Option<String>, file: &Option<DurationValue>) -> Result<Option<u64>, CliError> {
    match (flag, file) {
        (Some(s), _) => parse_duration(s).map(Some),
        (None, Some(DurationValue::Seconds(s))) => Ok(Some(*s)),
        (None, Some(DurationValue::Text(s))) => parse_duration(s).map(Some),
        (None, None) => Ok(None),
    }
}

fn parsed<T: std::str::FromStr<Err = resnet_core::Error>>(flag: &Option<String>, file: &Option<String>) -> Result<Option<T>, CliError> {
    flag.as_ref()
        .or(file.as_ref())
        .map(|s| s.parse::<T>().map_err(CliError::from))
        .transpose()
}

fn parse_orientation(s: &str) -> Result<ImpactOrientation, CliError> {
    match s {
        "row" => Ok(ImpactOrientation::Row),
        "column" => Ok(ImpactOrientation::Column),
        other => Err(CliError::input(format!("unknown orientation {other:?} (expected row or column)"))),
    }
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let (file, base) = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
                let file: FileConfig = toml::from_str(&text)
                    .map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };

        let kind = parsed::<SourceKind>(&flags.kind, &file.kind)?.unwrap_or_default();
        // config-relative paths are resolved against the config's directory
        let alias = flags.alias.clone().or_else(|| file.alias.as_ref().map(|p| base.join(p)));
        if let Some(a) = &alias {
            if !a.is_file() {
                return Err(CliError::input(format!("alias file {} does not exist", a.display())));
            }
        }

        let mut monitor = MonitorConfig::default();
        if let Some(b) = flags.beta.or(file.beta) {
            if !b.is_finite() {
                return Err(CliError::input(format!("beta must be finite, got {b}")));
            }
            monitor.beta = b;
        }
        if let Some(r) = parsed::<RobustnessSource>(&flags.robustness, &file.robustness)? {
            monitor.robustness = r;
        }
        if let Some(m) = parsed::<ImportanceMethod>(&flags.importance, &file.importance)? {
            monitor.analysis.importance = m;
        }
        if let Some(o) = flags.orientation.as_ref().or(file.orientation.as_ref()) {
            monitor.analysis.orientation = parse_orientation(o)?;
        }
        monitor.paper_literal = flags.paper_literal || file.paper_literal.unwrap_or(false);
        monitor.recalibrate = flags.recalibrate || file.recalibrate.unwrap_or(false);
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        monitor.analysis.potentiality.seed = seed;
        if let Some(l) = file.exact_limit {
            monitor.analysis.potentiality.exact_limit = l;
        }
        if let Some(d) = file.mc_draws {
            if d < 2 {
                return Err(CliError::input("mc_draws must be at least 2"));
            }
            monitor.analysis.potentiality.mc_draws = d;
        }

        let alpha = flags.alpha.or(file.alpha);
        if let Some(a) = alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(CliError::input(format!("alpha must lie in (0, 1), got {a}")));
            }
        }
        let theta = flags.theta.or(file.theta).unwrap_or(0.0);
        if !theta.is_finite() {
            return Err(CliError::input(format!("theta must be finite, got {theta}")));
        }
        let jobs = flags.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(CliError::input("--jobs must be at least 1"));
        }

        Ok(Self {
            kind,
            alias,
            window: duration(&flags.window, &file.window)?,
            step: duration(&flags.step, &file.step)?,
            delta_t: duration(&flags.delta_t, &file.delta_t)?,
            symmetrize: flags.symmetrize || file.symmetrize.unwrap_or(false),
            skip_bad_records: flags.skip_bad_records || file.skip_bad_records.unwrap_or(false),
            alpha,
            monitor,
            seed,
            theta,
            jobs,
        })
    }
}
