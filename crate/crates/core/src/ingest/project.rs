use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::{InteractionEvent, SourceKind};
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BipartiteEdge {
    pub actor: usize,
    pub artifact: usize,
    pub timestamp: i64,
    pub weight: f64,
}

/// Actors on the left, artifacts on the right; both id lists are sorted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartiteGraph {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub edges: Vec<BipartiteEdge>,
}

fn sorted_ids<'a>(ids: impl Iterator<Item = &'a str>) -> (Vec<String>, HashMap<&'a str, usize>) {
    let mut v: Vec<&str> = ids.collect();
    v.sort_unstable();
    v.dedup();
    let index = v.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    (v.into_iter().map(String::from).collect(), index)
}

impl BipartiteGraph {
    pub fn from_events(events: &[InteractionEvent]) -> Self {
        let (left, li) = sorted_ids(events.iter().map(|e| e.actor.as_str()));
        let (right, ri) = sorted_ids(events.iter().map(|e| e.object.as_str()));
        let edges = events
            .iter()
            .map(|e| BipartiteEdge {
                actor: li[e.actor.as_str()],
                artifact: ri[e.object.as_str()],
                timestamp: e.timestamp,
                weight: e.weight,
            })
            .collect();
        Self { left, right, edges }
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if e.actor >= self.left.len() || e.artifact >= self.right.len() {
                return Err(Error::InvalidInput(format!(
                    "bipartite edge ({}, {}) references a missing node",
                    e.actor, e.artifact
                )));
            }
        }
        Ok(())
    }
}

/// Co-editing projection: every pair of events by different actors on the
/// same artifact at most `delta_t` seconds apart adds one edge from the
/// earlier to the later actor. Simultaneous events are ordered by actor id.
/// `delta_t = None` pairs all co-editors.
pub fn project_to_multiedge(bip: &BipartiteGraph, delta_t: Option<u64>) -> Result<MultiEdgeNetwork> {
    bip.validate()?;
    let n = bip.left.len();
    let mut by_artifact: Vec<Vec<(i64, usize)>> = vec![Vec::new(); bip.right.len()];
    for e in &bip.edges {
        by_artifact[e.artifact].push((e.timestamp, e.actor));
    }
    let mut counts = vec![0u64; n * n];
    let mut live: HashMap<usize, u64> = HashMap::new();
    let mut queue: VecDeque<(i64, usize)> = VecDeque::new();
    for mut seq in by_artifact {
        seq.sort_unstable();
        live.clear();
        queue.clear();
        for (t, a) in seq {
            if let Some(thr) = delta_t {
                while let Some(&(t0, a0)) = queue.front() {
                    if (t as i128 - t0 as i128) <= thr as i128 {
                        break;
                    }
                    queue.pop_front();
                    let c = live.get_mut(&a0).expect("queued actor is live");
                    *c -= 1;
                    if *c == 0 {
                        live.remove(&a0);
                    }
                }
            }
            for (&prev, &c) in &live {
                if prev != a {
                    counts[prev * n + a] += c;
                }
            }
            *live.entry(a).or_insert(0) += 1;
            if delta_t.is_some() {
                queue.push_back((t, a));
            }
        }
    }
    MultiEdgeNetwork::from_counts(bip.left.clone(), counts, true, false)
}

/// Actor-to-actor events counted as directed edges `actor → object`.
/// Events addressed to oneself are ignored.
pub fn direct_network(events: &[InteractionEvent]) -> Result<MultiEdgeNetwork> {
    let (ids, index) = sorted_ids(events.iter().flat_map(|e| [e.actor.as_str(), e.object.as_str()]));
    let n = ids.len();
    let mut counts = vec![0u64; n * n];
    for e in events {
        let (i, j) = (index[e.actor.as_str()], index[e.object.as_str()]);
        if i != j {
            counts[i * n + j] += 1;
        }
    }
    MultiEdgeNetwork::from_counts(ids, counts, true, false)
}

/// Directed multi-edge network of one window's events.
pub fn network_from_events(events: &[InteractionEvent], kind: SourceKind, delta_t: Option<u64>) -> Result<MultiEdgeNetwork> {
    match kind {
        SourceKind::Artifact => project_to_multiedge(&BipartiteGraph::from_events(events), delta_t),
        SourceKind::Actor => direct_network(events),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(actor: &str, object: &str, t: i64) -> InteractionEvent {
        InteractionEvent {
            actor: actor.into(),
            object: object.into(),
            timestamp: t,
            weight: 1.0,
        }
    }

    fn project(events: &[InteractionEvent], thr: Option<u64>) -> MultiEdgeNetwork {
        project_to_multiedge(&BipartiteGraph::from_events(events), thr).unwrap()
    }

    #[test]
    fn pair_within_threshold() {
        let net = project(&[ev("A", "f", 0), ev("B", "f", 10)], Some(20));
        assert_eq!(net.m(), 1);
        assert_eq!(net.count(net.index_of("A").unwrap(), net.index_of("B").unwrap()), 1);
    }

    #[test]
    fn pair_outside_threshold() {
        assert_eq!(project(&[ev("A", "f", 0), ev("B", "f", 10)], Some(5)).m(), 0);
    }

    #[test]
    fn three_co_editors() {
        let net = project(&[ev("C", "f", 30), ev("A", "f", 10), ev("B", "f", 20)], None);
        assert_eq!(net.m(), 3);
        let (a, b, c) = (0, 1, 2);
        assert_eq!((net.count(a, b), net.count(a, c), net.count(b, c)), (1, 1, 1));
    }

    #[test]
    fn ties_follow_actor_order_and_self_pairs_drop() {
        let net = project(&[ev("B", "f", 5), ev("A", "f", 5), ev("A", "f", 6)], Some(0));
        assert_eq!(net.count(0, 1), 1);
        assert_eq!(net.m(), 1);
    }

    #[test]
    fn actor_events_count_directly() {
        let net = direct_network(&[ev("x", "y", 1), ev("x", "y", 2), ev("y", "x", 3), ev("z", "z", 4)]).unwrap();
        assert_eq!(net.node_ids(), ["x", "y", "z"]);
        assert_eq!((net.count(0, 1), net.count(1, 0), net.m()), (2, 1, 3));
    }

    /// Double loop over all event pairs.
    fn brute(events: &[InteractionEvent], thr: Option<u64>) -> HashMap<(String, String), u64> {
        let mut out = HashMap::new();
        for (p, x) in events.iter().enumerate() {
            for (q, y) in events.iter().enumerate() {
                if p == q || x.object != y.object || x.actor == y.actor {
                    continue;
                }
                let first = (x.timestamp, &x.actor) < (y.timestamp, &y.actor);
                let close = thr.is_none_or(|d| (x.timestamp - y.timestamp).unsigned_abs() <= d);
                if first && close {
                    *out.entry((x.actor.clone(), y.actor.clone())).or_insert(0) += 1;
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn projection_matches_double_loop(
            raw in proptest::collection::vec((0usize..6, 0usize..4, 0i64..60), 1..200),
            thr in proptest::option::of(0u64..30),
        ) {
            let events: Vec<_> = raw.iter().map(|&(a, f, t)| ev(&format!("p{a}"), &format!("f{f}"), t)).collect();
            let net = project(&events, thr);
            let want = brute(&events, thr);
            prop_assert_eq!(net.m(), want.values().sum::<u64>());
            for ((a, b), c) in want {
                prop_assert_eq!(net.count(net.index_of(&a).unwrap(), net.index_of(&b).unwrap()), c);
            }
        }
    }
}
