//! Resilience as the compromise between robustness `R̂` and propensity to
//! change `P̂`, evaluated per time window.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{observed_potentiality, profiles, AnalysisConfig};
use crate::ensemble::PotentialityMethod;
use crate::error::{Error, Result};
use crate::ingest::WindowInterval;
use crate::network::MultiEdgeNetwork;
use crate::signed::weighted_balance;
use crate::topology::{core_numbers, degree_centralization, laplacian_spectrum};

pub const DEFAULT_BETA: f64 = 0.2;

/// `R̂ = 1 / (1 + exp(−β⟨T⟩))`, or with `+β⟨T⟩` in `paper_literal` mode.
/// `⟨T⟩` is clamped to `[−1, 1]`; an absent value maps to 0.5.
pub fn robustness_from_balance(mean_t: Option<f64>, beta: f64, paper_literal: bool) -> f64 {
    let Some(t) = mean_t else { return 0.5 };
    let t = t.clamp(-1.0, 1.0);
    let x = if paper_literal { beta * t } else { -beta * t };
    1.0 / (1.0 + x.exp())
}

/// `P̂ = P` on the already normalised potentiality.
pub fn propensity_transform(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Min-max rescaling of a series; `None` when the series has no spread.
pub fn recalibrate(series: &[f64]) -> Option<Vec<f64>> {
    let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return None;
    }
    Some(series.iter().map(|v| (v - min) / (max - min)).collect())
}

/// `𝓡(R̂, P̂) = R̂(1 − P̂) + P̂(1 − R̂)`.
pub fn resilience(r_hat: f64, p_hat: f64) -> f64 {
    r_hat * (1.0 - p_hat) + p_hat * (1.0 - r_hat)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessSource {
    #[default]
    Balance,
    Coreness,
    Centralization,
    Eigengap,
}

impl std::str::FromStr for RobustnessSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balance" => Ok(Self::Balance),
            "coreness" => Ok(Self::Coreness),
            "centralization" => Ok(Self::Centralization),
            "eigengap" => Ok(Self::Eigengap),
            other => Err(Error::Config(format!(
                "unknown robustness source {other:?} (expected balance, coreness, centralization or eigengap)"
            ))),
        }
    }
}

/// Topological robustness proxies, each in `[0, 1]`; `None` where undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RobustnessVariants {
    /// Mean coreness over maximum coreness.
    pub coreness_aggregate: Option<f64>,
    pub one_minus_centralization: Option<f64>,
    /// `λ2 / λ_max` of the weighted Laplacian.
    pub scaled_eigengap: Option<f64>,
}

pub fn robustness_variants(net: &MultiEdgeNetwork) -> RobustnessVariants {
    let core = core_numbers(net);
    let max = core.iter().copied().max().unwrap_or(0);
    let coreness_aggregate = (max > 0).then(|| core.iter().map(|&c| c as f64).sum::<f64>() / (core.len() as f64 * max as f64));
    let one_minus_centralization = degree_centralization(net).ok().map(|c| 1.0 - c);
    let scaled_eigengap = laplacian_spectrum(net)
        .ok()
        .and_then(|s| (s.largest > 0.0).then(|| (s.algebraic_connectivity / s.largest).clamp(0.0, 1.0)));
    RobustnessVariants {
        coreness_aggregate,
        one_minus_centralization,
        scaled_eigengap,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonitorConfig {
    pub analysis: AnalysisConfig,
    pub beta: f64,
    pub paper_literal: bool,
    pub robustness: RobustnessSource,
    /// Min-max rescale `P̂` across the whole series.
    pub recalibrate: bool,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            analysis: AnalysisConfig::default(),
            beta: DEFAULT_BETA,
            paper_literal: false,
            robustness: RobustnessSource::Balance,
            recalibrate: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResilienceSnapshot {
    pub window: Option<WindowInterval>,
    pub nodes: usize,
    pub edges: u64,
    pub triads: usize,
    pub mean_t: Option<f64>,
    pub r_hat: Option<f64>,
    pub potentiality: Option<f64>,
    /// Standard error of a Monte-Carlo potentiality estimate.
    pub potentiality_std_error: Option<f64>,
    pub p_hat: Option<f64>,
    pub resilience: Option<f64>,
    pub robustness: RobustnessSource,
    pub beta: f64,
    pub recalibrated: bool,
    pub variants: RobustnessVariants,
    /// Why the scores of this window are missing.
    pub error: Option<String>,
}

/// Scores one network. Failures are recorded in the snapshot.
pub fn snapshot(net: &MultiEdgeNetwork, window: Option<WindowInterval>, cfg: &MonitorConfig) -> ResilienceSnapshot {
    let mut s = ResilienceSnapshot {
        window,
        nodes: net.n(),
        edges: net.m(),
        robustness: cfg.robustness,
        beta: cfg.beta,
        ..Default::default()
    };
    if let Err(e) = fill(net, cfg, &mut s) {
        s.error = Some(e.to_string());
        s.r_hat = None;
        s.p_hat = None;
        s.resilience = None;
    }
    s
}

fn fill(net: &MultiEdgeNetwork, cfg: &MonitorConfig, s: &mut ResilienceSnapshot) -> Result<()> {
    if net.m() == 0 {
        return Err(Error::Undefined("window has no interactions".into()));
    }
    s.variants = robustness_variants(net);
    let p = profiles(net, &cfg.analysis, None)?;
    let wb = weighted_balance(&p.signed, &p.profiles);
    s.triads = wb.triads;
    s.mean_t = wb.mean;
    let missing = |name: &str| Error::Undefined(format!("{name} robustness is undefined for this window"));
    let r_hat = match cfg.robustness {
        RobustnessSource::Balance => robustness_from_balance(wb.mean, cfg.beta, cfg.paper_literal),
        RobustnessSource::Coreness => s.variants.coreness_aggregate.ok_or_else(|| missing("coreness"))?,
        RobustnessSource::Centralization => s.variants.one_minus_centralization.ok_or_else(|| missing("centralization"))?,
        RobustnessSource::Eigengap => s.variants.scaled_eigengap.ok_or_else(|| missing("eigengap"))?,
    };
    let pot = observed_potentiality(net, &cfg.analysis.potentiality)?;
    if let PotentialityMethod::MonteCarlo { std_error } = pot.method {
        s.potentiality_std_error = Some(std_error);
    }
    let p_hat = propensity_transform(pot.value);
    s.r_hat = Some(r_hat);
    s.potentiality = Some(pot.value);
    s.p_hat = Some(p_hat);
    s.resilience = Some(resilience(r_hat, p_hat));
    Ok(())
}

/// Scores every window in parallel, keeping input order. With
/// `cfg.recalibrate`, `P̂` is min-max rescaled over the windows that
/// have a potentiality; a flat series is left unchanged.
pub fn monitor(windows: &[(Option<WindowInterval>, MultiEdgeNetwork)], cfg: &MonitorConfig) -> Result<Vec<ResilienceSnapshot>> {
    if windows.is_empty() {
        return Err(Error::InvalidInput("no windows to monitor".into()));
    }
    let mut out: Vec<ResilienceSnapshot> = windows
        .par_iter()
        .enumerate()
        .map(|(k, (w, net))| {
            let mut c = *cfg;
            c.analysis.potentiality.seed = cfg.analysis.potentiality.seed.wrapping_add(k as u64);
            snapshot(net, *w, &c)
        })
        .collect();
    if cfg.recalibrate {
        let idx: Vec<usize> = (0..out.len()).filter(|&k| out[k].potentiality.is_some() && out[k].r_hat.is_some()).collect();
        let series: Vec<f64> = idx.iter().map(|&k| out[k].potentiality.unwrap_or(0.0)).collect();
        if let Some(scaled) = recalibrate(&series) {
            for (&k, p) in idx.iter().zip(scaled) {
                let s = &mut out[k];
                s.p_hat = Some(p);
                s.resilience = s.r_hat.map(|r| resilience(r, p));
                s.recalibrated = true;
            }
        }
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const SERIES_HEADER: [&str; 15] = [
    "window_start",
    "window_end",
    "partial",
    "nodes",
    "edges",
    "triads",
    "mean_T",
    "R_hat",
    "P",
    "P_hat",
    "resilience",
    "coreness_aggregate",
    "one_minus_centralization",
    "scaled_eigengap",
    "error",
];

/// Time-series CSV, one row per snapshot. Missing values are empty cells.
pub fn write_series_csv<W: Write>(snapshots: &[ResilienceSnapshot], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for s in snapshots {
        let (start, end, partial) = match s.window {
            Some(iv) => (iv.start.to_string(), iv.end.to_string(), iv.partial.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([
            start,
            end,
            partial,
            s.nodes.to_string(),
            s.edges.to_string(),
            s.triads.to_string(),
            opt(s.mean_t),
            opt(s.r_hat),
            opt(s.potentiality),
            opt(s.p_hat),
            opt(s.resilience),
            opt(s.variants.coreness_aggregate),
            opt(s.variants.one_minus_centralization),
            opt(s.variants.scaled_eigengap),
            s.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `x,y` data for plotting one series against window start (or
/// window index when windows are unknown). Windows without a value are skipped.
pub fn write_plot_data<W: Write>(snapshots: &[ResilienceSnapshot], column: &str, out: W) -> Result<()> {
    let pick: fn(&ResilienceSnapshot) -> Option<f64> = match column {
        "mean_T" => |s| s.mean_t,
        "R_hat" => |s| s.r_hat,
        "P" => |s| s.potentiality,
        "P_hat" => |s| s.p_hat,
        "resilience" => |s| s.resilience,
        "coreness_aggregate" => |s| s.variants.coreness_aggregate,
        "one_minus_centralization" => |s| s.variants.one_minus_centralization,
        "scaled_eigengap" => |s| s.variants.scaled_eigengap,
        other => {
            return Err(Error::Config(format!(
                "unknown series {other:?} (expected mean_T, R_hat, P, P_hat, resilience, coreness_aggregate, one_minus_centralization or scaled_eigengap)"
            )))
        }
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for (k, s) in snapshots.iter().enumerate() {
        if let Some(y) = pick(s) {
            let x = s.window.map_or(k as i64, |iv| iv.start);
            w.write_record([x.to_string(), y.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;
    use proptest::prelude::*;

    #[test]
    fn corners() {
        assert_eq!(resilience(0.0, 0.0), 0.0);
        assert_eq!(resilience(1.0, 1.0), 0.0);
        assert_eq!(resilience(1.0, 0.0), 1.0);
        assert_eq!(resilience(0.0, 1.0), 1.0);
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(resilience(0.5, p), 0.5);
        }
    }

    #[test]
    fn logistic_values() {
        assert_eq!(robustness_from_balance(Some(0.0), DEFAULT_BETA, false), 0.5);
        assert_eq!(robustness_from_balance(None, DEFAULT_BETA, false), 0.5);
        let want = 1.0 / (1.0 + (-0.2f64).exp());
        assert!((robustness_from_balance(Some(1.0), 0.2, false) - want).abs() < 1e-15);
        assert!((want - 0.549834).abs() < 1e-6);
        assert!(robustness_from_balance(Some(5.0), 200.0, false) > 1.0 - 1e-12);
        assert!(robustness_from_balance(Some(1.0), 0.2, true) < 0.5);
    }

    #[test]
    fn propensity_endpoints_and_recalibration() {
        assert_eq!(propensity_transform(0.0), 0.0);
        assert_eq!(propensity_transform(1.0), 1.0);
        let r = recalibrate(&[0.2, 0.5, 0.8]).unwrap();
        assert_eq!(r[0], 0.0);
        assert!((r[1] - 0.5).abs() < 1e-15);
        assert_eq!(r[2], 1.0);
        assert_eq!(recalibrate(&[0.4, 0.4]), None);
    }

    fn clique(n: usize, w: u64) -> MultiEdgeNetwork {
        let mut e = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e.push((i, j, w));
                }
            }
        }
        MultiEdgeNetwork::from_edges(ids(n), e, true).unwrap()
    }

    #[test]
    fn no_triads_gives_neutral_score() {
        // leaves of an out-star never meet in the ensemble
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 4), (0, 2, 1)], true).unwrap();
        let s = snapshot(&net, None, &MonitorConfig::default());
        assert_eq!(s.triads, 0);
        assert_eq!(s.r_hat, Some(0.5));
        assert_eq!(s.resilience, Some(0.5));
    }

    #[test]
    fn empty_window_is_an_error_row() {
        let net = MultiEdgeNetwork::empty(ids(2), true).unwrap();
        let out = monitor(&[(None, net.clone()), (None, clique(4, 3))], &MonitorConfig::default()).unwrap();
        assert!(out[0].error.is_some() && out[0].resilience.is_none());
        assert!(out[1].error.is_none());
    }

    #[test]
    fn robust_concentrated_window() {
        // two dense groups with a weak bridge: strong positive ties inside
        let mut e = Vec::new();
        for g in [0usize, 4] {
            for i in g..g + 4 {
                for j in g..g + 4 {
                    if i != j {
                        e.push((i, j, 30));
                    }
                }
            }
        }
        e.push((3, 4, 1));
        let net = MultiEdgeNetwork::from_edges(ids(8), e, true).unwrap();
        let cfg = MonitorConfig {
            beta: 3.0,
            ..Default::default()
        };
        let s = snapshot(&net, None, &cfg);
        let (r, p, res) = (s.r_hat.unwrap(), s.p_hat.unwrap(), s.resilience.unwrap());
        assert!(r > 0.5 && p < r);
        assert!(res > 0.5);
    }

    #[test]
    fn series_csv_has_header_and_rows() {
        let out = monitor(&[(None, clique(4, 2))], &MonitorConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_series_csv(&out, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("window_start,window_end,partial,nodes,edges,triads,mean_T,R_hat,P,P_hat,resilience"));
        assert!(write_plot_data(&out, "nonsense", Vec::new()).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let r = resilience(a, b);
            prop_assert_eq!(r, resilience(b, a));
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert!((r - (a + b - 2.0 * a * b)).abs() < 1e-15);
        }

        #[test]
        fn logistic_is_increasing(t in -1.0f64..1.0, d in 1e-6f64..0.5, beta in 0.01f64..10.0) {
            let u = (t + d).min(1.0);
            prop_assume!(u > t);
            prop_assert!(robustness_from_balance(Some(u), beta, false) > robustness_from_balance(Some(t), beta, false));
        }
    }
}
