//! Generalized hypergeometric ensemble of multi-edge graphs.
//!
//! An [`Ensemble`] pairs the combinatorial matrix `Ξ_ij = d_out(i)·d_in(j)`
//! with a propensity matrix `Ω` and the observed edge budget `m`. Sampling,
//! fitting and entropy use the multinomial approximation with
//! `p_ij ∝ Ξ_ij Ω_ij`; single-dyad tail probabilities use the exact
//! hypergeometric marginal (see [`DyadMarginal`]).

mod blocks;
mod entropy;
mod marginal;
mod regression;
mod sample;

pub use blocks::{fit_blocks, BlockPropensities};
pub use entropy::{
    multinomial_entropy, multinomial_entropy_mc, normalized_entropy, potentiality, potentiality_with, Potentiality,
    PotentialityMethod, PotentialityOptions,
};
pub use marginal::{DyadMarginal, MarginalFamily};
pub use regression::{fit_regression, CoefficientTest, LayerStack, RegressionFit};
pub use sample::sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

/// Floor used for zero cells in propensity estimates and predictors.
pub const SMOOTHING_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    node_ids: Vec<String>,
    xi: Vec<u64>,
    omega: Vec<f64>,
    m: u64,
}

impl Ensemble {
    /// Ξ from observed degrees, uniform Ω.
    pub fn build(net: &MultiEdgeNetwork) -> Result<Self> {
        let m = net.m();
        if m == 0 {
            return Err(Error::InvalidInput(
                "cannot build an ensemble from a network without edges".into(),
            ));
        }
        let n = net.n();
        let out: Vec<u64> = (0..n).map(|i| net.out_degree(i)).collect();
        let inn: Vec<u64> = (0..n).map(|j| net.in_degree(j)).collect();
        let mut xi = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j || net.allows_self_loops() {
                    xi[i * n + j] = out[i] * inn[j];
                }
            }
        }
        Ok(Self {
            node_ids: net.node_ids().to_vec(),
            xi,
            omega: vec![1.0; n * n],
            m,
        })
    }

    pub fn from_parts(node_ids: Vec<String>, xi: Vec<u64>, omega: Vec<f64>, m: u64) -> Result<Self> {
        let n = node_ids.len();
        if xi.len() != n * n || omega.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "Xi and Omega must both have {} entries",
                n * n
            )));
        }
        let e = Self {
            node_ids,
            xi,
            omega: vec![1.0; n * n],
            m,
        };
        e.with_omega(omega)
    }

    /// Replaces Ω. Entries must be positive wherever Ξ is.
    pub fn with_omega(&self, omega: Vec<f64>) -> Result<Self> {
        if omega.len() != self.xi.len() {
            return Err(Error::InvalidInput("Omega has the wrong size".into()));
        }
        for (idx, (&x, &o)) in self.xi.iter().zip(&omega).enumerate() {
            if x > 0 && !(o.is_finite() && o > 0.0) {
                let n = self.n();
                return Err(Error::InvalidInput(format!(
                    "propensity at ({}, {}) must be positive, got {o}",
                    idx / n,
                    idx % n
                )));
            }
        }
        if self.m > self.xi_total() {
            return Err(Error::InvalidInput(format!(
                "edge budget {} exceeds the combinatorial total {}",
                self.m,
                self.xi_total()
            )));
        }
        Ok(Self {
            omega,
            ..self.clone()
        })
    }

    /// Maximum-likelihood propensities of the saturated model,
    /// `Ω_ij ∝ max(â_ij, ε) / Ξ_ij`, normalised to mean 1 over supported dyads.
    pub fn fit_saturated(net: &MultiEdgeNetwork) -> Result<Self> {
        let base = Self::build(net)?;
        let n = base.n();
        let mut omega = vec![1.0; n * n];
        let mut sum = 0.0;
        let mut cnt = 0usize;
        for idx in 0..n * n {
            if base.xi[idx] > 0 {
                let o = (net.counts()[idx] as f64).max(SMOOTHING_EPS) / base.xi[idx] as f64;
                omega[idx] = o;
                sum += o;
                cnt += 1;
            }
        }
        let mean = sum / cnt as f64;
        for idx in 0..n * n {
            if base.xi[idx] > 0 {
                omega[idx] /= mean;
            }
        }
        base.with_omega(omega)
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn xi(&self, i: usize, j: usize) -> u64 {
        self.xi[i * self.n() + j]
    }

    pub fn omega(&self, i: usize, j: usize) -> f64 {
        self.omega[i * self.n() + j]
    }

    pub fn xi_matrix(&self) -> &[u64] {
        &self.xi
    }

    pub fn omega_matrix(&self) -> &[f64] {
        &self.omega
    }

    /// `M = Σ Ξ_ij`.
    pub fn xi_total(&self) -> u64 {
        self.xi.iter().sum()
    }

    pub fn is_supported(&self, i: usize, j: usize) -> bool {
        self.xi(i, j) > 0
    }

    pub fn supported_dyads(&self) -> usize {
        self.xi.iter().filter(|&&x| x > 0).count()
    }

    pub fn is_uniform(&self) -> bool {
        let mut it = self
            .xi
            .iter()
            .zip(&self.omega)
            .filter(|(&x, _)| x > 0)
            .map(|(_, &o)| o);
        match it.next() {
            Some(first) => it.all(|o| o == first),
            None => true,
        }
    }

    /// Multinomial dyad probabilities `p_ij ∝ Ξ_ij Ω_ij` (row-major).
    pub fn probabilities(&self) -> Vec<f64> {
        let w: Vec<f64> = self
            .xi
            .iter()
            .zip(&self.omega)
            .map(|(&x, &o)| if x > 0 { x as f64 * o } else { 0.0 })
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|v| v / z).collect()
    }

    /// Expected count `m p_ij` under the multinomial approximation.
    pub fn expected(&self, i: usize, j: usize) -> f64 {
        self.m as f64 * self.probabilities()[i * self.n() + j]
    }

    /// Odds of dyad `(i, j)` against the Ξ-weighted mean propensity of all
    /// other supported dyads. 1 whenever Ω is uniform.
    pub fn odds(&self, i: usize, j: usize) -> f64 {
        if self.is_uniform() {
            return 1.0;
        }
        let idx = i * self.n() + j;
        let (mut num, mut den) = (0.0, 0.0);
        for (k, (&x, &o)) in self.xi.iter().zip(&self.omega).enumerate() {
            if k != idx && x > 0 {
                num += x as f64 * o;
                den += x as f64;
            }
        }
        if den == 0.0 {
            1.0
        } else {
            self.omega[idx] / (num / den)
        }
    }

    /// Marginal distribution of the edge count on dyad `(i, j)`.
    pub fn marginal(&self, i: usize, j: usize) -> Result<DyadMarginal> {
        self.marginal_with_totals(i, j, &self.odds_totals())
    }

    pub(crate) fn odds_totals(&self) -> OddsTotals {
        let (mut num, mut den) = (0.0, 0.0);
        for (&x, &o) in self.xi.iter().zip(&self.omega) {
            if x > 0 {
                num += x as f64 * o;
                den += x as f64;
            }
        }
        OddsTotals {
            uniform: self.is_uniform(),
            weighted_omega: num,
            weight: den,
            xi_total: self.xi_total(),
        }
    }

    /// Same as [`Ensemble::marginal`] with the ensemble-wide sums precomputed.
    pub(crate) fn marginal_with_totals(&self, i: usize, j: usize, t: &OddsTotals) -> Result<DyadMarginal> {
        let k = self.xi(i, j);
        if k == 0 {
            return Err(Error::UnsupportedDyad(i, j));
        }
        let odds = if t.uniform {
            1.0
        } else {
            let o = self.omega(i, j);
            let rest_w = t.weight - k as f64;
            if rest_w <= 0.0 {
                1.0
            } else {
                o / ((t.weighted_omega - k as f64 * o) / rest_w)
            }
        };
        DyadMarginal::new(t.xi_total, k, self.m, odds)
    }

    /// `Pr(A_ij ≤ x)`.
    pub fn dyad_cdf(&self, i: usize, j: usize, x: u64) -> Result<f64> {
        Ok(self.marginal(i, j)?.cdf(x))
    }

    pub fn to_file(&self) -> EnsembleFile {
        let n = self.n();
        EnsembleFile {
            node_ids: self.node_ids.clone(),
            xi: self.xi.chunks(n.max(1)).map(|r| r.to_vec()).collect(),
            omega: self.omega.chunks(n.max(1)).map(|r| r.to_vec()).collect(),
            m: self.m,
        }
    }
}

pub(crate) struct OddsTotals {
    uniform: bool,
    weighted_omega: f64,
    weight: f64,
    xi_total: u64,
}

/// JSON dump `{node_ids, Xi, Omega, m}` with row-major nested matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub node_ids: Vec<String>,
    #[serde(rename = "Xi")]
    pub xi: Vec<Vec<u64>>,
    #[serde(rename = "Omega")]
    pub omega: Vec<Vec<f64>>,
    pub m: u64,
}

impl TryFrom<EnsembleFile> for Ensemble {
    type Error = Error;

    fn try_from(f: EnsembleFile) -> Result<Self> {
        Ensemble::from_parts(
            f.node_ids,
            f.xi.into_iter().flatten().collect(),
            f.omega.into_iter().flatten().collect(),
            f.m,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;

    #[test]
    fn two_node_degree_products() {
        let net = MultiEdgeNetwork::from_edges(ids(2), [(0, 1, 3)], true).unwrap();
        let e = Ensemble::build(&net).unwrap();
        assert_eq!(e.xi(0, 1), 9);
        assert_eq!(e.xi(1, 0), 0);
        assert_eq!(e.xi(0, 0), 0);
        assert!(e.is_uniform());
    }

    #[test]
    fn three_cycle_is_uniform() {
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 1), (1, 2, 1), (2, 0, 1)], true).unwrap();
        let e = Ensemble::build(&net).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(e.xi(i, j), if i == j { 0 } else { 1 });
            }
        }
    }

    #[test]
    fn xi_is_outer_product_with_zero_diagonal() {
        let net = MultiEdgeNetwork::from_edges(
            ids(4),
            [(0, 1, 2), (0, 2, 1), (1, 2, 3), (2, 3, 1), (3, 0, 4), (1, 0, 1)],
            true,
        )
        .unwrap();
        let out = [3u64, 4, 1, 4];
        let inn = [5u64, 2, 4, 1];
        let e = Ensemble::build(&net).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0 } else { out[i] * inn[j] };
                assert_eq!(e.xi(i, j), want, "({i},{j})");
            }
        }
        assert_eq!(e.m(), 12);
    }

    #[test]
    fn edgeless_network_is_rejected() {
        let net = MultiEdgeNetwork::empty(ids(3), true).unwrap();
        assert!(Ensemble::build(&net).is_err());
    }

    #[test]
    fn dyad_cdf_textbook_and_support_edges() {
        // one supported dyad with K=4 inside an urn of M=12
        let xi = vec![0, 4, 8, 0];
        let e = Ensemble::from_parts(ids(2), xi, vec![1.0; 4], 3).unwrap();
        assert!((e.dyad_cdf(0, 1, 1).unwrap() - 168.0 / 220.0).abs() < 1e-15);
        assert_eq!(e.dyad_cdf(0, 1, 3).unwrap(), 1.0);
        assert!(matches!(e.dyad_cdf(0, 0, 1), Err(Error::UnsupportedDyad(0, 0))));
    }

    #[test]
    fn odds_against_weighted_mean_of_others() {
        let xi = vec![0, 4, 8, 0];
        let e = Ensemble::from_parts(ids(2), xi, vec![1.0, 3.0, 1.5, 1.0], 3).unwrap();
        assert!((e.odds(0, 1) - 2.0).abs() < 1e-15);
        assert!((e.odds(1, 0) - 0.5).abs() < 1e-15);
        let m = e.marginal(0, 1).unwrap();
        assert_eq!(m.family(), MarginalFamily::FisherNoncentral);
        assert_eq!(m.odds, e.odds(0, 1));
    }

    #[test]
    fn expected_counts_sum_to_budget() {
        let net = MultiEdgeNetwork::from_edges(ids(4), [(0, 1, 5), (1, 2, 3), (3, 0, 2), (2, 1, 7)], true).unwrap();
        let e = Ensemble::fit_saturated(&net).unwrap();
        let total: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| e.expected(i, j)).sum();
        assert!((total - e.m() as f64).abs() < 1e-6 * e.m() as f64);
    }

    #[test]
    fn omega_must_be_positive_on_support() {
        let xi = vec![0, 4, 8, 0];
        assert!(Ensemble::from_parts(ids(2), xi.clone(), vec![1.0, 0.0, 1.0, 1.0], 3).is_err());
        assert!(Ensemble::from_parts(ids(2), xi, vec![0.0, 1.0, 1.0, 0.0], 3).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 1), (1, 2, 2), (2, 0, 1)], true).unwrap();
        let e = Ensemble::build(&net).unwrap();
        let text = serde_json::to_string(&e.to_file()).unwrap();
        assert!(text.contains("\"Xi\""));
        let back: EnsembleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(Ensemble::try_from(back).unwrap(), e);
    }
}
