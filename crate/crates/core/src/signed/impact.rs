use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SignedNetwork;
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;
use crate::topology::core_numbers;

const EIGEN_TOL: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 10_000;
const TELEPORT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    #[default]
    Coreness,
    Eigenvector,
    Uniform,
}

impl std::str::FromStr for ImportanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coreness" => Ok(Self::Coreness),
            "eigenvector" => Ok(Self::Eigenvector),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Config(format!(
                "unknown importance method {other:?} (expected coreness, eigenvector or uniform)"
            ))),
        }
    }
}

/// Which relations feed `I_i`: `Row` sums `ω_ij r_j` over i's own relations
/// to others, `Column` sums `ω_ji r_j`, the support i receives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpactOrientation {
    #[default]
    Row,
    Column,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AgentProfile {
    /// Importance `r`.
    pub r: f64,
    /// Social impact `I = I⁺ − I⁻`.
    pub impact: f64,
    pub impact_pos: f64,
    pub impact_neg: f64,
    /// Total impact `q = r + I`.
    pub q: f64,
}

/// Agent importance scaled to a maximum of 1.
pub fn importance(net: &MultiEdgeNetwork, method: ImportanceMethod) -> Result<Vec<f64>> {
    let n = net.n();
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    match method {
        ImportanceMethod::Uniform => Ok(vec![1.0; n]),
        ImportanceMethod::Coreness => {
            let core = core_numbers(net);
            let max = core.iter().copied().max().unwrap_or(0);
            if max == 0 {
                return Ok(vec![0.0; n]);
            }
            Ok(core.iter().map(|&c| c as f64 / max as f64).collect())
        }
        ImportanceMethod::Eigenvector => eigenvector_centrality(net),
    }
}

/// Principal eigenvector of `Aᵀ` (reputation flows along edges), with a small
/// uniform teleport so that sinks and disconnected parts keep some mass.
fn eigenvector_centrality(net: &MultiEdgeNetwork) -> Result<Vec<f64>> {
    let n = net.n();
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITER {
        let total: f64 = x.iter().sum();
        for (j, yj) in y.iter_mut().enumerate() {
            // shifted by the identity to break periodicity on bipartite structure
            *yj = x[j] + TELEPORT * total / n as f64 + (0..n).map(|i| net.count(i, j) as f64 * x[i]).sum::<f64>();
        }
        let max = y.iter().cloned().fold(0.0, f64::max);
        y.iter_mut().for_each(|v| *v /= max);
        let delta = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut y);
        if delta < EIGEN_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(format!(
        "eigenvector centrality did not reach {EIGEN_TOL:e} in {EIGEN_MAX_ITER} iterations; use coreness importance instead"
    )))
}

/// `I_i = Σ_j ω_ij r_j` (or `ω_ji` for [`ImpactOrientation::Column`]) split
/// into positive and negative parts, and `q_i = r_i + I_i`.
pub fn social_impact(sn: &SignedNetwork, r: &[f64], orientation: ImpactOrientation) -> Result<Vec<AgentProfile>> {
    let n = sn.n();
    if r.len() != n {
        return Err(Error::InvalidInput(format!(
            "importance vector has {} entries, network has {n} nodes",
            r.len()
        )));
    }
    Ok((0..n)
        .map(|i| {
            let (mut pos, mut neg) = (0.0, 0.0);
            for (j, &rj) in r.iter().enumerate() {
                let w = match orientation {
                    ImpactOrientation::Row => sn.omega(i, j),
                    ImpactOrientation::Column => sn.omega(j, i),
                };
                let term = w * rj;
                if term > 0.0 {
                    pos += term;
                } else {
                    neg -= term;
                }
            }
            let impact = pos - neg;
            AgentProfile {
                r: r[i],
                impact,
                impact_pos: pos,
                impact_neg: neg,
                q: r[i] + impact,
            }
        })
        .collect())
}

/// Profiles CSV `node,r,I,q`.
pub fn write_profiles_csv<W: Write>(node_ids: &[String], profiles: &[AgentProfile], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "r", "I", "q"])?;
    for (id, p) in node_ids.iter().zip(profiles) {
        w.write_record([id.as_str(), &p.r.to_string(), &p.impact.to_string(), &p.q.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;

    #[test]
    fn uniform_importance() {
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 4)], true).unwrap();
        assert_eq!(importance(&net, ImportanceMethod::Uniform).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn star_coreness_ties() {
        let net = MultiEdgeNetwork::from_edges(ids(5), (1..5).map(|j| (0, j, 1)), false).unwrap();
        assert_eq!(importance(&net, ImportanceMethod::Coreness).unwrap(), vec![1.0; 5]);
    }

    #[test]
    fn k4_plus_pendant() {
        let mut edges = vec![(3, 4, 1)];
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, 1));
            }
        }
        let net = MultiEdgeNetwork::from_edges(ids(5), edges, false).unwrap();
        let r = importance(&net, ImportanceMethod::Coreness).unwrap();
        assert_eq!(&r[..4], &[1.0; 4]);
        assert!((r[4] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvector_on_symmetric_star() {
        let net = MultiEdgeNetwork::from_edges(ids(5), (1..5).map(|j| (0, j, 1)), false).unwrap();
        let r = importance(&net, ImportanceMethod::Eigenvector).unwrap();
        assert_eq!(r[0], 1.0);
        for leaf in &r[1..] {
            assert!((leaf - r[1]).abs() < 1e-9);
            assert!(*leaf < 1.0);
        }
    }

    #[test]
    fn eigenvector_handles_dangling_nodes() {
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 1), (1, 2, 1)], true).unwrap();
        let r = importance(&net, ImportanceMethod::Eigenvector).unwrap();
        assert!(r.iter().all(|v| v.is_finite() && *v > 0.0));
        assert_eq!(r[2], 1.0);
    }

    #[test]
    fn two_agent_impact() {
        let sn = SignedNetwork::new(ids(2), vec![0.0, 0.5, -0.5, 0.0]).unwrap();
        let p = social_impact(&sn, &[1.0, 1.0], ImpactOrientation::Row).unwrap();
        assert_eq!((p[0].impact, p[1].impact), (0.5, -0.5));
        assert_eq!((p[0].q, p[1].q), (1.5, 0.5));
        let c = social_impact(&sn, &[1.0, 1.0], ImpactOrientation::Column).unwrap();
        assert_eq!((c[0].impact, c[1].impact), (-0.5, 0.5));
    }

    #[test]
    fn neutral_network_keeps_importance() {
        let sn = SignedNetwork::new(ids(3), vec![0.0; 9]).unwrap();
        let r = [0.2, 1.0, 0.7];
        let p = social_impact(&sn, &r, ImpactOrientation::Row).unwrap();
        for (pi, ri) in p.iter().zip(r) {
            assert_eq!(pi.q, ri);
        }
    }

    #[test]
    fn three_agent_mixed_signs() {
        // ω rows: 0 → (·, 0.5, −0.25), 1 → (−1, ·, 0.2), 2 → (0, 0.8, ·)
        let sn = SignedNetwork::new(ids(3), vec![0.0, 0.5, -0.25, -1.0, 0.0, 0.2, 0.0, 0.8, 0.0]).unwrap();
        let r = [1.0, 0.5, 0.4];
        let p = social_impact(&sn, &r, ImpactOrientation::Row).unwrap();
        // I_0 = 0.25 − 0.1, I_1 = −1 + 0.08, I_2 = 0.4
        let want_i = [0.15, -0.92, 0.4];
        for k in 0..3 {
            assert!((p[k].impact - want_i[k]).abs() < 1e-15);
            assert_eq!(p[k].q, r[k] + p[k].impact);
            assert_eq!(p[k].impact, p[k].impact_pos - p[k].impact_neg);
        }
        assert!((p[0].impact_neg - 0.1).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let sn = SignedNetwork::new(ids(2), vec![0.0; 4]).unwrap();
        assert!(social_impact(&sn, &[1.0], ImpactOrientation::Row).is_err());
    }
}
