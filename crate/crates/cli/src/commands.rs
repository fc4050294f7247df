use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use resnet_core::analysis::{analyze, Analysis};
use resnet_core::ensemble::Ensemble;
use resnet_core::ingest::{
    network_from_events, normalize_ids, parse_numstat_log, read_alias_csv, read_event_csv, window_events, EventLog,
    SourceKind, WindowInterval, WindowSpec,
};
use resnet_core::intervene::{intervene_and_compare, write_summary_csv, CascadeConfig, InterventionPlan};
use resnet_core::network::NetworkFile;
use resnet_core::resilience::{monitor, snapshot, write_plot_data, write_series_csv, ResilienceSnapshot};
use resnet_core::signed::{line_index, write_profiles_csv, LineIndex};
use resnet_core::topology::core_numbers;
use resnet_core::MultiEdgeNetwork;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
pub const SERIES: &str = "resilience.csv";
pub const SNAPSHOTS: &str = "snapshots.json";
pub const SUMMARY: &str = "summary.csv";

const STRATEGIES: &str = "random, periphery, near-core, targeted, none";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// `actor,object,timestamp,weight` rows.
    Csv,
    /// `git log --numstat --date=unix` output.
    Numstat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Graphml,
    Adjacency,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ManifestWindow {
    pub index: usize,
    pub file: String,
    pub start: i64,
    pub end: i64,
    pub partial: bool,
    pub events: usize,
    pub nodes: usize,
    pub edges: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Manifest {
    pub kind: SourceKind,
    pub spec: WindowSpec,
    pub symmetrize: bool,
    pub events: usize,
    pub skipped_records: usize,
    pub windows: Vec<ManifestWindow>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::internal(format!("cannot create {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::internal(e.to_string()))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
}

/// Runs a core writer into a new file.
fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> resnet_core::Result<()>) -> CliResult<()> {
    let mut w = create(path)?;
    f(&mut w).map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    w.flush()
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
}

pub fn read_network(path: &Path) -> CliResult<MultiEdgeNetwork> {
    let file: NetworkFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: not a network file: {e}", path.display())))?;
    MultiEdgeNetwork::try_from(file).map_err(|e| CliError::from(e).in_file(path))
}

fn guess_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
        _ => InputFormat::Numstat,
    }
}

fn load_events(input: &Path, format: Option<InputFormat>, cfg: &RunConfig) -> CliResult<EventLog> {
    let text = read_text(input)?;
    let mut log = match format.unwrap_or_else(|| guess_format(input)) {
        InputFormat::Csv => read_event_csv(text.as_bytes(), cfg.kind).map_err(|e| CliError::from(e).in_file(input))?,
        InputFormat::Numstat => {
            if cfg.kind == SourceKind::Actor {
                return Err(CliError::input("numstat logs record co-edited files; use --kind artifact"));
            }
            parse_numstat_log(&text)
        }
    };
    if let Some(first) = log.errors.first() {
        if !cfg.skip_bad_records {
            return Err(CliError::input(format!(
                "{}: {first} ({} malformed record(s); --skip-bad-records ignores them)",
                input.display(),
                log.errors.len()
            )));
        }
        for e in &log.errors {
            warn!("{}: skipping {e}", input.display());
        }
    }
    if let Some(alias) = &cfg.alias {
        let rules = read_alias_csv(read_text(alias)?.as_bytes()).map_err(|e| CliError::from(e).in_file(alias))?;
        let errors = std::mem::take(&mut log.errors);
        log = normalize_ids(&log, &rules);
        log.errors = errors;
    }
    if log.is_empty() {
        return Err(CliError::input(format!("{}: no events", input.display())));
    }
    Ok(log)
}

fn window_spec(log: &EventLog, cfg: &RunConfig) -> CliResult<WindowSpec> {
    let width = match cfg.window {
        Some(w) => w,
        None => {
            let min = log.events.iter().map(|e| e.timestamp).min().unwrap_or(0);
            let max = log.events.iter().map(|e| e.timestamp).max().unwrap_or(0);
            max.abs_diff(min) + 1
        }
    };
    Ok(WindowSpec::new(width, cfg.step.unwrap_or(width), cfg.delta_t)?)
}

pub fn ingest(input: &Path, format: Option<InputFormat>, out: &Path, cfg: &RunConfig) -> CliResult<Manifest> {
    let log = load_events(input, format, cfg)?;
    let spec = window_spec(&log, cfg)?;
    let windows = window_events(&log, &spec)?;
    info!("{} events in {} window(s)", log.len(), windows.len());
    create_dir(out)?;
    let mut entries = Vec::with_capacity(windows.len());
    for (index, w) in windows.iter().enumerate() {
        let mut net = if w.events.is_empty() {
            MultiEdgeNetwork::empty(Vec::new(), true)?
        } else {
            network_from_events(&w.events, log.kind, spec.delta_t)?
        };
        if cfg.symmetrize {
            net = net.symmetrized();
        }
        let file = format!("window-{index:04}.json");
        write_json(&out.join(&file), &net.to_file())?;
        entries.push(ManifestWindow {
            index,
            file,
            start: w.interval.start,
            end: w.interval.end,
            partial: w.interval.partial,
            events: w.events.len(),
            nodes: net.n(),
            edges: net.m(),
        });
    }
    let manifest = Manifest {
        kind: log.kind,
        spec,
        symmetrize: cfg.symmetrize,
        events: log.len(),
        skipped_records: log.errors.len(),
        windows: entries,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Significant backbone when `alpha` is set, the network itself otherwise.
fn backbone(net: MultiEdgeNetwork, alpha: Option<f64>) -> CliResult<MultiEdgeNetwork> {
    match alpha {
        Some(a) if net.m() > 0 => {
            let e = Ensemble::build(&net)?;
            Ok(resnet_core::signed::significant_links(&net, &e, a)?)
        }
        _ => Ok(net),
    }
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    nodes: usize,
    edges: u64,
    alpha: Option<f64>,
    #[serde(flatten)]
    analysis: &'a Analysis,
    line_index: LineIndex,
    resilience: ResilienceSnapshot,
}

pub fn analyze_cmd(network: &Path, out: &Path, cfg: &RunConfig) -> CliResult<()> {
    let net = backbone(read_network(network)?, cfg.alpha)?;
    if net.m() == 0 {
        return Err(CliError::input(format!("{}: network has no edges to analyze", network.display())));
    }
    let a = analyze(&net, &cfg.monitor.analysis)?;
    let report = AnalyzeReport {
        nodes: net.n(),
        edges: net.m(),
        alpha: cfg.alpha,
        analysis: &a,
        line_index: line_index(&a.profiles.signed),
        resilience: snapshot(&net, None, &cfg.monitor),
    };
    create_dir(out)?;
    write_json(&out.join("analysis.json"), &report)?;
    write_with(&out.join("profiles.csv"), |w| write_profiles_csv(net.node_ids(), &a.profiles.profiles, w))?;
    write_with(&out.join("signed.csv"), |w| a.profiles.signed.write_csv(w))?;
    Ok(())
}

fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST)
    } else {
        path.to_path_buf()
    }
}

pub fn monitor_cmd(manifest: &Path, out: &Path, cfg: &RunConfig) -> CliResult<Vec<ResilienceSnapshot>> {
    let path = manifest_path(manifest);
    let m: Manifest = serde_json::from_str(&read_text(&path)?)
        .map_err(|e| CliError::input(format!("{}: not a manifest: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut windows = Vec::with_capacity(m.windows.len());
    for w in &m.windows {
        let file = dir.join(&w.file);
        if !file.is_file() {
            return Err(CliError::input(format!("window file {} listed in the manifest is missing", file.display())));
        }
        let interval = WindowInterval {
            start: w.start,
            end: w.end,
            partial: w.partial,
        };
        windows.push((Some(interval), backbone(read_network(&file)?, cfg.alpha)?));
    }
    let snaps = monitor(&windows, &cfg.monitor)?;
    for s in &snaps {
        if let Some(e) = &s.error {
            warn!("window starting {:?}: {e}", s.window.map(|w| w.start));
        }
    }
    create_dir(out)?;
    write_with(&out.join(SERIES), |w| write_series_csv(&snaps, w))?;
    write_json(&out.join(SNAPSHOTS), &snaps)?;
    Ok(snaps)
}

fn is_valid_strategy(v: &Value) -> bool {
    match v {
        Value::String(s) => matches!(s.as_str(), "random" | "periphery" | "near-core" | "none"),
        Value::Object(o) => o.len() == 1 && o.get("targeted").is_some_and(Value::is_array),
        _ => false,
    }
}

fn valid_plan_id(id: &str) -> bool {
    !id.is_empty() && !id.starts_with('.') && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
}

/// Plans from a JSON array; plans without their own `theta` or `seed` take
/// the run's values.
pub fn read_plans(path: &Path, cfg: &RunConfig) -> CliResult<Vec<InterventionPlan>> {
    let value: Value = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: invalid JSON: {e}", path.display())))?;
    let Value::Array(items) = value else {
        return Err(CliError::input(format!("{}: expected a JSON array of plans", path.display())));
    };
    let mut plans = Vec::with_capacity(items.len());
    for (k, mut item) in items.into_iter().enumerate() {
        let Value::Object(obj) = &mut item else {
            return Err(CliError::input(format!("{}: plan {k} is not an object", path.display())));
        };
        match obj.get("strategy") {
            Some(s) if is_valid_strategy(s) => {}
            Some(s) => {
                return Err(CliError::input(format!(
                    "{}: plan {k} has invalid strategy {s}; allowed strategies: {STRATEGIES} (targeted takes a list of agent ids)",
                    path.display()
                )))
            }
            None => {
                return Err(CliError::input(format!(
                    "{}: plan {k} has no strategy; allowed strategies: {STRATEGIES}",
                    path.display()
                )))
            }
        }
        obj.entry("theta").or_insert(cfg.theta.into());
        obj.entry("seed").or_insert(cfg.seed.into());
        let plan: InterventionPlan =
            serde_json::from_value(item).map_err(|e| CliError::input(format!("{}: plan {k}: {e}", path.display())))?;
        if !valid_plan_id(&plan.id) {
            return Err(CliError::input(format!(
                "{}: plan id {:?} must use only letters, digits, '-', '_' or '.'",
                path.display(),
                plan.id
            )));
        }
        plan.validate().map_err(|e| CliError::from(e).in_file(path))?;
        plans.push(plan);
    }
    Ok(plans)
}

pub fn intervene_cmd(network: &Path, plans: &Path, out: &Path, cfg: &RunConfig) -> CliResult<()> {
    let net = read_network(network)?;
    let plans = read_plans(plans, cfg)?;
    if plans.iter().any(|p| p.id == "summary") {
        return Err(CliError::input("plan id \"summary\" is reserved for the summary file"));
    }
    let cascade = CascadeConfig {
        monitor: cfg.monitor,
        theta: cfg.theta,
        snapshots: true,
    };
    let results = intervene_and_compare(&net, &plans, &cascade)?;
    create_dir(out)?;
    for (plan, result) in plans.iter().zip(&results) {
        write_json(&out.join(format!("{}.json", plan.id)), result)?;
    }
    write_with(&out.join(SUMMARY), |w| write_summary_csv(&plans, &results, w))?;
    Ok(())
}

pub fn export_plot(snapshots: &Path, column: &str, out: &Path) -> CliResult<()> {
    let snaps: Vec<ResilienceSnapshot> = serde_json::from_str(&read_text(snapshots)?)
        .map_err(|e| CliError::input(format!("{}: not a snapshots file: {e}", snapshots.display())))?;
    // validate the column before creating the output file
    write_plot_data(&snaps, column, std::io::sink())?;
    write_with(out, |w| write_plot_data(&snaps, column, w))
}

pub fn export_graph(network: &Path, format: GraphFormat, out: &Path) -> CliResult<()> {
    let net = read_network(network)?;
    match format {
        GraphFormat::Graphml => {
            let core: Vec<f64> = core_numbers(&net).into_iter().map(|c| c as f64).collect();
            write_with(out, |w| net.write_graphml(w, Some(&core)))
        }
        GraphFormat::Adjacency => write_with(out, |w| net.write_adjacency_csv(w)),
    }
}
