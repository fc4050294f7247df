use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::network::MultiEdgeNetwork;

/// Per-node k-core index, integral for simple peeling, real for the weighted variant.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CorenessVector {
    Simple(Vec<u32>),
    Weighted(Vec<f64>),
}

impl CorenessVector {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::Simple(v) => v.iter().map(|&c| c as f64).collect(),
            Self::Weighted(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Simple(v) => v.len(),
            Self::Weighted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn kcore_decomposition(net: &MultiEdgeNetwork, weighted: bool) -> CorenessVector {
    if weighted {
        CorenessVector::Weighted(weighted_core_numbers(net))
    } else {
        CorenessVector::Simple(core_numbers(net))
    }
}

/// Classic k-core numbers on the simple undirected graph underlying `net`.
pub fn core_numbers(net: &MultiEdgeNetwork) -> Vec<u32> {
    let n = net.n();
    let w = net.symmetric_weights();
    let adj: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| w[i * n + j] > 0.0)
                .map(|j| (j, 1.0))
                .collect()
        })
        .collect();
    peel(&adj).into_iter().map(|c| c as u32).collect()
}

/// Weighted (s-core) numbers: peeling by the summed multi-edge weight, with
/// the threshold stepping through the observed residual degree values.
pub fn weighted_core_numbers(net: &MultiEdgeNetwork) -> Vec<f64> {
    let n = net.n();
    let w = net.symmetric_weights();
    let adj: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| w[i * n + j] > 0.0)
                .map(|j| (j, w[i * n + j]))
                .collect()
        })
        .collect();
    peel(&adj)
}

/// Mean of the simple core numbers, 0 for a network without nodes.
pub fn mean_coreness(net: &MultiEdgeNetwork) -> f64 {
    let c = core_numbers(net);
    if c.is_empty() {
        0.0
    } else {
        c.iter().map(|&x| x as f64).sum::<f64>() / c.len() as f64
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    // reversed: BinaryHeap becomes a min-heap on degree, then index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn peel(adj: &[Vec<(usize, f64)>]) -> Vec<f64> {
    let n = adj.len();
    let mut degree: Vec<f64> = adj.iter().map(|nb| nb.iter().map(|&(_, w)| w).sum()).collect();
    let mut removed = vec![false; n];
    let mut core = vec![0.0; n];
    let mut heap: BinaryHeap<Entry> = degree.iter().enumerate().map(|(i, &d)| Entry(d, i)).collect();
    let mut level = 0.0f64;
    while let Some(Entry(d, v)) = heap.pop() {
        if removed[v] || d != degree[v] {
            continue;
        }
        level = level.max(d);
        core[v] = level;
        removed[v] = true;
        for &(u, w) in &adj[v] {
            if !removed[u] {
                degree[u] -= w;
                heap.push(Entry(degree[u], u));
            }
        }
    }
    core
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;

    fn triangle_pendant() -> MultiEdgeNetwork {
        MultiEdgeNetwork::from_edges(ids(4), [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1)], false).unwrap()
    }

    /// K5 on nodes 0..5, node 5+i hangs off core node i.
    fn core_periphery() -> MultiEdgeNetwork {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((i, j, 1));
            }
            edges.push((i, 5 + i, 1));
        }
        MultiEdgeNetwork::from_edges(ids(10), edges, false).unwrap()
    }

    #[test]
    fn triangle_with_pendant() {
        assert_eq!(core_numbers(&triangle_pendant()), vec![2, 2, 2, 1]);
    }

    #[test]
    fn no_edges_means_zero_coreness() {
        let net = MultiEdgeNetwork::empty(ids(3), true).unwrap();
        assert_eq!(core_numbers(&net), vec![0, 0, 0]);
        assert_eq!(weighted_core_numbers(&net), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn k5_core_with_pendants() {
        let c = core_numbers(&core_periphery());
        assert_eq!(&c[..5], &[4, 4, 4, 4, 4]);
        assert_eq!(&c[5..], &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn multi_edges_collapse_for_simple_cores() {
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 5), (1, 0, 2), (1, 2, 1)], true).unwrap();
        assert_eq!(core_numbers(&net), vec![1, 1, 1]);
        // weighted: degrees 7, 8, 1 -> node 2 peeled at 1, then 0 and 1 at 7
        assert_eq!(weighted_core_numbers(&net), vec![7.0, 7.0, 1.0]);
    }

    #[test]
    fn coreness_bounded_by_degree() {
        let net = core_periphery();
        let w = weighted_core_numbers(&net);
        for (i, c) in w.iter().enumerate() {
            assert!(*c <= net.total_degree(i) as f64);
        }
    }
}
