//! Shocks, leave cascades driven by total impact, and intervention plans.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::profiles;
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;
use crate::resilience::{snapshot, MonitorConfig, ResilienceSnapshot};
use crate::signed::AgentProfile;
use crate::topology::{core_numbers, mean_coreness};

/// Induced subnetwork without `nodes`.
pub fn shock_remove(net: &MultiEdgeNetwork, nodes: &[usize]) -> Result<MultiEdgeNetwork> {
    let n = net.n();
    if let Some(&bad) = nodes.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidInput(format!("node {bad} outside 0..{n}")));
    }
    let gone: BTreeSet<usize> = nodes.iter().copied().collect();
    let keep: Vec<usize> = (0..n).filter(|v| !gone.contains(v)).collect();
    if keep.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    Ok(net.induced(&keep))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeConfig {
    pub monitor: MonitorConfig,
    /// Agents with `q < theta` leave.
    pub theta: f64,
    /// Attach a resilience snapshot of the survivors to every step.
    pub snapshots: bool,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            monitor: MonitorConfig::default(),
            theta: 0.0,
            snapshots: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CascadeStep {
    pub step: usize,
    /// Removed by the intervention before the cascade of this step.
    pub removed: Vec<String>,
    /// Left because their total impact fell below the threshold.
    pub left: Vec<String>,
    pub survivors: usize,
    pub mean_coreness: f64,
    pub snapshot: Option<ResilienceSnapshot>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CascadeResult {
    pub plan: Option<String>,
    pub initial_nodes: usize,
    pub initial_mean_coreness: f64,
    pub steps: Vec<CascadeStep>,
    /// Number of steps taken before the fixed point (or the end of the plan).
    pub terminated_at: usize,
    pub survivors: Vec<String>,
    pub final_mean_coreness: f64,
}

fn boost_vector(net: &MultiEdgeNetwork, boost: &BTreeMap<String, f64>) -> Option<Vec<f64>> {
    if boost.is_empty() {
        return None;
    }
    Some(net.node_ids().iter().map(|id| boost.get(id).copied().unwrap_or(0.0)).collect())
}

fn leavers(p: &[AgentProfile], theta: f64) -> Vec<usize> {
    p.iter().enumerate().filter(|(_, a)| a.q < theta).map(|(i, _)| i).collect()
}

/// One synchronous departure round: who leaves `net` given its profiles.
/// Returns the survivors (`None` if nobody is left) and the leavers' ids.
fn depart(net: &MultiEdgeNetwork, p: &[AgentProfile], theta: f64) -> (Option<MultiEdgeNetwork>, Vec<String>) {
    let out = leavers(p, theta);
    let names = out.iter().map(|&i| net.node_ids()[i].clone()).collect();
    if out.len() == net.n() {
        return (None, names);
    }
    (Some(shock_remove(net, &out).expect("survivors remain")), names)
}

fn step_record(step: usize, removed: Vec<String>, left: Vec<String>, net: Option<&MultiEdgeNetwork>, cfg: &CascadeConfig) -> CascadeStep {
    CascadeStep {
        step,
        removed,
        left,
        survivors: net.map_or(0, |n| n.n()),
        mean_coreness: net.map_or(0.0, mean_coreness),
        snapshot: match net {
            Some(n) if cfg.snapshots => Some(snapshot(n, None, &cfg.monitor)),
            _ => None,
        },
    }
}

/// Runs departure rounds until nobody else leaves. Each round removes every
/// agent with `q < θ` at once and recomputes profiles on the survivors.
/// Returns the rounds and the final network (`None` once everyone left).
fn run_cascade(
    net: MultiEdgeNetwork,
    first: Option<Vec<AgentProfile>>,
    boost: &BTreeMap<String, f64>,
    cfg: &CascadeConfig,
) -> Result<(Vec<(Vec<String>, Option<MultiEdgeNetwork>)>, Option<MultiEdgeNetwork>)> {
    let mut rounds = Vec::new();
    let mut current = net;
    let mut prof = match first {
        Some(p) => p,
        None => profiles(&current, &cfg.monitor.analysis, boost_vector(&current, boost).as_deref())?.profiles,
    };
    if prof.len() != current.n() {
        return Err(Error::InvalidInput(format!(
            "{} profiles for a network of {} nodes",
            prof.len(),
            current.n()
        )));
    }
    // every round removes at least one agent, so at most n rounds
    for _ in 0..current.n() {
        let (next, left) = depart(&current, &prof, cfg.theta);
        if left.is_empty() {
            return Ok((rounds, Some(current)));
        }
        match next {
            None => {
                rounds.push((left, None));
                return Ok((rounds, None));
            }
            Some(next) => {
                prof = profiles(&next, &cfg.monitor.analysis, boost_vector(&next, boost).as_deref())?.profiles;
                rounds.push((left, Some(next.clone())));
                current = next;
            }
        }
    }
    Ok((rounds, Some(current)))
}

/// Leave cascade from precomputed profiles of `net`; one step per
/// departure round. Stops at the first round in which nobody leaves.
pub fn leave_cascade(net: &MultiEdgeNetwork, initial: &[AgentProfile], cfg: &CascadeConfig) -> Result<CascadeResult> {
    let (rounds, last) = run_cascade(net.clone(), Some(initial.to_vec()), &BTreeMap::new(), cfg)?;
    let steps: Vec<CascadeStep> = rounds
        .into_iter()
        .enumerate()
        .map(|(k, (left, after))| step_record(k + 1, Vec::new(), left, after.as_ref(), cfg))
        .collect();
    Ok(CascadeResult {
        plan: None,
        initial_nodes: net.n(),
        initial_mean_coreness: mean_coreness(net),
        terminated_at: steps.len(),
        steps,
        survivors: last.as_ref().map(|n| n.node_ids().to_vec()).unwrap_or_default(),
        final_mean_coreness: last.as_ref().map_or(0.0, mean_coreness),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    /// Lowest coreness first.
    Periphery,
    /// Highest coreness below the innermost core.
    NearCore,
    /// The listed agents that are still present; the budget is ignored.
    Targeted(Vec<String>),
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    #[default]
    Boost,
    Remove,
}

fn default_steps() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionPlan {
    pub id: String,
    pub strategy: Strategy,
    #[serde(default)]
    pub action: Action,
    /// Agents selected per step.
    #[serde(default)]
    pub budget: usize,
    /// Importance added to each selected agent per step.
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl InterventionPlan {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Config("plan id must not be empty".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config(format!("plan {}: steps must be at least 1", self.id)));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Config(format!("plan {}: delta must be finite and non-negative", self.id)));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config(format!("plan {}: theta must be finite", self.id)));
        }
        Ok(())
    }
}

fn select(net: &MultiEdgeNetwork, plan: &InterventionPlan, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = net.n();
    let k = plan.budget.min(n);
    match &plan.strategy {
        Strategy::None => Vec::new(),
        Strategy::Random => {
            let mut v = sample_indices(rng, n, k).into_vec();
            v.sort_unstable();
            v
        }
        Strategy::Targeted(ids) => {
            let mut v: Vec<usize> = ids.iter().filter_map(|id| net.index_of(id)).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
        Strategy::Periphery => {
            let core = core_numbers(net);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| (core[i], i));
            order.truncate(k);
            order
        }
        Strategy::NearCore => {
            let core = core_numbers(net);
            let top = core.iter().copied().max().unwrap_or(0);
            let mut order: Vec<usize> = (0..n).filter(|&i| core[i] < top).collect();
            order.sort_by_key(|&i| (std::cmp::Reverse(core[i]), i));
            order.truncate(k);
            order
        }
    }
}

/// Applies one plan: each step selects agents on the current network,
/// removes or boosts them, then lets the leave cascade settle. Boosts
/// accumulate over steps.
pub fn run_plan(net: &MultiEdgeNetwork, plan: &InterventionPlan, cfg: &CascadeConfig) -> Result<CascadeResult> {
    plan.validate()?;
    let cfg = CascadeConfig { theta: plan.theta, ..*cfg };
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut boost: BTreeMap<String, f64> = BTreeMap::new();
    let mut current = Some(net.clone());
    let mut steps = Vec::new();
    for step in 1..=plan.steps {
        let Some(state) = current.take() else { break };
        let chosen = select(&state, plan, &mut rng);
        let names: Vec<String> = chosen.iter().map(|&i| state.node_ids()[i].clone()).collect();
        let (after_action, removed) = match plan.action {
            Action::Boost => {
                for id in &names {
                    *boost.entry(id.clone()).or_insert(0.0) += plan.delta;
                }
                (Some(state), Vec::new())
            }
            Action::Remove if chosen.len() == state.n() => (None, names),
            Action::Remove => (Some(shock_remove(&state, &chosen)?), names),
        };
        let (left, last) = match after_action {
            None => (Vec::new(), None),
            Some(s) => {
                let (rounds, last) = run_cascade(s, None, &boost, &cfg)?;
                (rounds.into_iter().flat_map(|r| r.0).collect(), last)
            }
        };
        steps.push(step_record(step, removed, left, last.as_ref(), &cfg));
        current = last;
    }
    Ok(CascadeResult {
        plan: Some(plan.id.clone()),
        initial_nodes: net.n(),
        initial_mean_coreness: mean_coreness(net),
        terminated_at: steps.len(),
        steps,
        survivors: current.as_ref().map(|n| n.node_ids().to_vec()).unwrap_or_default(),
        final_mean_coreness: current.as_ref().map_or(0.0, mean_coreness),
    })
}

/// Runs every plan independently (in parallel), results in plan order.
pub fn intervene_and_compare(net: &MultiEdgeNetwork, plans: &[InterventionPlan], cfg: &CascadeConfig) -> Result<Vec<CascadeResult>> {
    if plans.is_empty() {
        return Err(Error::InvalidInput("no intervention plans given".into()));
    }
    let mut seen = BTreeSet::new();
    for p in plans {
        p.validate()?;
        if !seen.insert(p.id.as_str()) {
            return Err(Error::Config(format!("duplicate plan id {:?}", p.id)));
        }
    }
    plans.par_iter().map(|p| run_plan(net, p, cfg)).collect()
}

/// One row per plan.
pub fn write_summary_csv<W: Write>(plans: &[InterventionPlan], results: &[CascadeResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "plan",
        "strategy",
        "action",
        "steps",
        "initial_nodes",
        "final_nodes",
        "removed",
        "left",
        "initial_mean_coreness",
        "final_mean_coreness",
        "final_resilience",
    ])?;
    for (p, r) in plans.iter().zip(results) {
        let strategy = match &p.strategy {
            Strategy::Random => "random",
            Strategy::Periphery => "periphery",
            Strategy::NearCore => "near-core",
            Strategy::Targeted(_) => "targeted",
            Strategy::None => "none",
        };
        let action = match p.action {
            Action::Boost => "boost",
            Action::Remove => "remove",
        };
        let removed: usize = r.steps.iter().map(|s| s.removed.len()).sum();
        let left: usize = r.steps.iter().map(|s| s.left.len()).sum();
        let resilience = r
            .steps
            .last()
            .and_then(|s| s.snapshot.as_ref())
            .and_then(|s| s.resilience)
            .map(|v| v.to_string())
            .unwrap_or_default();
        w.write_record([
            p.id.clone(),
            strategy.to_string(),
            action.to_string(),
            r.terminated_at.to_string(),
            r.initial_nodes.to_string(),
            r.survivors.len().to_string(),
            removed.to_string(),
            left.to_string(),
            r.initial_mean_coreness.to_string(),
            r.final_mean_coreness.to_string(),
            resilience,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::AnalysisConfig;
    use crate::network::ids;
    use crate::signed::ImportanceMethod;

    fn triangle_pendant() -> MultiEdgeNetwork {
        MultiEdgeNetwork::from_edges(ids(4), [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1)], false).unwrap()
    }

    fn cfg() -> CascadeConfig {
        CascadeConfig {
            snapshots: false,
            ..Default::default()
        }
    }

    #[test]
    fn removing_the_pendant() {
        let net = shock_remove(&triangle_pendant(), &[3]).unwrap();
        assert_eq!(core_numbers(&net), vec![2, 2, 2]);
        assert_eq!(shock_remove(&triangle_pendant(), &[]).unwrap(), triangle_pendant());
        assert!(matches!(shock_remove(&triangle_pendant(), &[0, 1, 2, 3]), Err(Error::EmptyNetwork)));
        assert!(shock_remove(&triangle_pendant(), &[9]).is_err());
    }

    #[test]
    fn removing_a_core_node_isolates_its_pendant() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((i, j, 1));
            }
            edges.push((i, 5 + i, 1));
        }
        let net = MultiEdgeNetwork::from_edges(ids(10), edges, false).unwrap();
        let after = shock_remove(&net, &[0]).unwrap();
        let p = after.index_of("n5").unwrap();
        assert_eq!(after.total_degree(p), 0);
        assert_eq!(core_numbers(&after)[p], 0);
    }

    fn uniform_cfg(theta: f64) -> CascadeConfig {
        let mut c = cfg();
        c.theta = theta;
        c.monitor.analysis = AnalysisConfig {
            importance: ImportanceMethod::Uniform,
            ..Default::default()
        };
        c
    }

    #[test]
    fn nobody_below_threshold() {
        let net = triangle_pendant();
        let c = uniform_cfg(f64::NEG_INFINITY);
        let p = profiles(&net, &c.monitor.analysis, None).unwrap().profiles;
        let r = leave_cascade(&net, &p, &c).unwrap();
        assert_eq!(r.terminated_at, 0);
        assert!(r.steps.is_empty());
        assert_eq!(r.survivors.len(), 4);
    }

    #[test]
    fn everyone_leaves_at_once() {
        let net = triangle_pendant();
        let c = uniform_cfg(1e9);
        let p = profiles(&net, &c.monitor.analysis, None).unwrap().profiles;
        let r = leave_cascade(&net, &p, &c).unwrap();
        assert_eq!(r.terminated_at, 1);
        assert_eq!(r.steps[0].left.len(), 4);
        assert!(r.survivors.is_empty());
        assert_eq!(r.final_mean_coreness, 0.0);
    }

    #[test]
    fn plans_deserialize_and_validate() {
        let p: InterventionPlan =
            serde_json::from_str(r#"{"id":"a","strategy":"near-core","action":"boost","budget":2,"delta":0.5,"steps":3}"#).unwrap();
        assert_eq!(p.strategy, Strategy::NearCore);
        let t: InterventionPlan = serde_json::from_str(r#"{"id":"t","strategy":{"targeted":["x"]},"action":"remove"}"#).unwrap();
        assert_eq!(t.strategy, Strategy::Targeted(vec!["x".into()]));
        let err = serde_json::from_str::<InterventionPlan>(r#"{"id":"b","strategy":"core-bomb"}"#).unwrap_err();
        assert!(err.to_string().contains("near-core"));
        let bad = InterventionPlan { steps: 0, ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn selections() {
        // K4 (coreness 3), a triangle hanging off it (2), one pendant (1)
        let mut e = vec![(3, 4, 1), (4, 5, 1), (5, 3, 1), (6, 0, 1)];
        for i in 0..4 {
            for j in (i + 1)..4 {
                e.push((i, j, 1));
            }
        }
        let net = MultiEdgeNetwork::from_edges(ids(7), e, false).unwrap();
        let plan = |s: Strategy, budget| InterventionPlan {
            id: "p".into(),
            strategy: s,
            action: Action::Remove,
            budget,
            delta: 0.0,
            steps: 1,
            theta: 0.0,
            seed: 5,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select(&net, &plan(Strategy::Periphery, 1), &mut rng), vec![6]);
        assert_eq!(select(&net, &plan(Strategy::NearCore, 2), &mut rng), vec![4, 5]);
        assert_eq!(select(&net, &plan(Strategy::None, 3), &mut rng), Vec::<usize>::new());
        assert_eq!(select(&net, &plan(Strategy::Targeted(vec!["n2".into(), "zz".into()]), 0), &mut rng), vec![2]);
        let a = select(&net, &plan(Strategy::Random, 3), &mut ChaCha8Rng::seed_from_u64(9));
        let b = select(&net, &plan(Strategy::Random, 3), &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn removing_everything_ends_the_plan() {
        let net = triangle_pendant();
        let plan = InterventionPlan {
            id: "all".into(),
            strategy: Strategy::Random,
            action: Action::Remove,
            budget: 10,
            delta: 0.0,
            steps: 3,
            theta: f64::MIN,
            seed: 1,
        };
        let r = run_plan(&net, &plan, &cfg()).unwrap();
        assert_eq!(r.terminated_at, 1);
        assert_eq!(r.steps[0].removed.len(), 4);
        assert!(r.survivors.is_empty());
    }
}
