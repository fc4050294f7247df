//! Signed relations inferred from interaction counts, agent impact, and
//! structural balance.

mod balance;
mod impact;
mod line_index;

pub use balance::{classic_balance, mean_balance, weighted_balance, BalanceSummary, TriadBalance, WeightedBalance};
pub use impact::{importance, social_impact, write_profiles_csv, AgentProfile, ImpactOrientation, ImportanceMethod};
pub use line_index::{line_index, LineIndex, EXACT_EDGE_LIMIT};

use std::io::Write;

use serde::Serialize;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

/// Weighted signed relations `ω_ij ∈ [−1, 1]`, zero meaning no relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedNetwork {
    node_ids: Vec<String>,
    omega: Vec<f64>,
}

impl SignedNetwork {
    pub fn new(node_ids: Vec<String>, omega: Vec<f64>) -> Result<Self> {
        let n = node_ids.len();
        if omega.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "relation matrix has {} entries, expected {}",
                omega.len(),
                n * n
            )));
        }
        if let Some(v) = omega.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(Error::InvalidInput(format!("relation weight {v} outside [-1, 1]")));
        }
        if (0..n).any(|i| omega[i * n + i] != 0.0) {
            return Err(Error::InvalidInput("self relations must be zero".into()));
        }
        Ok(Self { node_ids, omega })
    }

    /// Symmetric network from undirected `(i, j, ω)` triples.
    pub fn from_undirected(node_ids: Vec<String>, relations: &[(usize, usize, f64)]) -> Result<Self> {
        let n = node_ids.len();
        let mut omega = vec![0.0; n * n];
        for &(i, j, w) in relations {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("relation ({i}, {j}) outside 0..{n}")));
            }
            omega[i * n + j] = w;
            omega[j * n + i] = w;
        }
        Self::new(node_ids, omega)
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    #[inline]
    pub fn omega(&self, i: usize, j: usize) -> f64 {
        self.omega[i * self.n() + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.omega
    }

    /// Undirected relation used for triads: `(ω_ij + ω_ji) / 2`.
    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        (self.omega(i, j) + self.omega(j, i)) / 2.0
    }

    pub fn map(&self, f: impl Fn(usize, usize, f64) -> f64) -> Result<Self> {
        let n = self.n();
        let omega = (0..n * n).map(|idx| f(idx / n, idx % n, self.omega[idx])).collect();
        Self::new(self.node_ids.clone(), omega)
    }

    /// CSV `i,j,omega` with node ids, non-zero relations only.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "omega"])?;
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let v = self.omega(i, j);
                if v != 0.0 {
                    w.write_record([self.node_ids[i].as_str(), self.node_ids[j].as_str(), &v.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn check_same_nodes(net: &MultiEdgeNetwork, e: &Ensemble) -> Result<()> {
    if net.node_ids() != e.node_ids() {
        return Err(Error::InvalidInput(
            "network and ensemble are defined on different node sets".into(),
        ));
    }
    Ok(())
}

/// Keeps dyads whose observed count is significantly high,
/// `Pr(A_ij ≤ â_ij) > 1 − α`; all other counts are zeroed.
pub fn significant_links(net: &MultiEdgeNetwork, e: &Ensemble, alpha: f64) -> Result<MultiEdgeNetwork> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    check_same_nodes(net, e)?;
    let totals = e.odds_totals();
    let mut keep = vec![false; net.n() * net.n()];
    let n = net.n();
    for (i, j, c) in net.edges() {
        if e.is_supported(i, j) {
            let cdf = e.marginal_with_totals(i, j, &totals)?.cdf(c);
            keep[i * n + j] = cdf > 1.0 - alpha;
        }
    }
    let mut filtered = net.map_counts(|i, j, c| if keep[i * n + j] { c } else { 0 });
    if !net.is_directed() {
        // a kept undirected edge survives only if both orientations pass
        filtered = filtered.map_counts(|i, j, c| if keep[j * n + i] { c } else { 0 });
    }
    Ok(filtered)
}

/// `ω_ij = Pr(A_ij < â_ij) − Pr(A_ij > â_ij)` under the dyad marginals of
/// `e`; unsupported dyads get 0.
pub fn infer_signed(net: &MultiEdgeNetwork, e: &Ensemble) -> Result<SignedNetwork> {
    check_same_nodes(net, e)?;
    let n = net.n();
    let totals = e.odds_totals();
    let mut omega = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !e.is_supported(i, j) {
                continue;
            }
            let d = e.marginal_with_totals(i, j, &totals)?;
            let a = net.count(i, j);
            omega[i * n + j] = (d.prob_below(a) - d.prob_above(a)).clamp(-1.0, 1.0);
        }
    }
    SignedNetwork::new(net.node_ids().to_vec(), omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;

    /// Two nodes, one supported dyad with K = 4 in an urn of M = 12, m = 3.
    fn textbook(count: u64) -> (MultiEdgeNetwork, Ensemble) {
        let e = Ensemble::from_parts(ids(2), vec![0, 4, 8, 0], vec![1.0; 4], 3).unwrap();
        let net = MultiEdgeNetwork::from_edges(ids(2), [(0, 1, count), (1, 0, 3 - count)], true).unwrap();
        (net, e)
    }

    #[test]
    fn textbook_signed_weight() {
        let (net, e) = textbook(2);
        let s = infer_signed(&net, &e).unwrap();
        assert!((s.omega(0, 1) - 164.0 / 220.0).abs() < 1e-14);
    }

    #[test]
    fn zero_and_maximal_counts() {
        let (net, e) = textbook(0);
        let s = infer_signed(&net, &e).unwrap();
        let d = e.marginal(0, 1).unwrap();
        assert_eq!(s.omega(0, 1), -d.prob_above(0));
        assert!(s.omega(0, 1) <= 0.0);

        let (net, e) = textbook(3);
        let s = infer_signed(&net, &e).unwrap();
        assert!(s.omega(0, 1) >= 0.0);
        assert_eq!(s.omega(0, 1), d.prob_below(3));
    }

    #[test]
    fn significance_filter() {
        let (net, e) = textbook(2);
        let f = significant_links(&net, &e, 0.05).unwrap();
        assert_eq!(f.count(0, 1), 2);

        let (net, e) = textbook(1);
        assert_eq!(significant_links(&net, &e, 0.05).unwrap().count(0, 1), 0);
        // α close to 1 keeps every observed dyad inside the support
        assert_eq!(significant_links(&net, &e, 1.0 - 1e-9).unwrap().count(0, 1), 1);
        assert!(significant_links(&net, &e, 1.0).is_err());
    }

    #[test]
    fn zero_counts_are_never_significant() {
        let (net, e) = textbook(0);
        let f = significant_links(&net, &e, 0.999).unwrap();
        assert_eq!(f.count(0, 1), 0);
    }

    #[test]
    fn mismatched_nodes() {
        let (net, _) = textbook(1);
        let other = Ensemble::from_parts(vec!["x".into(), "y".into()], vec![0, 4, 8, 0], vec![1.0; 4], 3).unwrap();
        assert!(infer_signed(&net, &other).is_err());
    }

    #[test]
    fn rejects_out_of_range_relations() {
        assert!(SignedNetwork::new(ids(2), vec![0.0, 1.5, 0.0, 0.0]).is_err());
        assert!(SignedNetwork::new(ids(2), vec![0.2, 0.0, 0.0, 0.0]).is_err());
    }
}
