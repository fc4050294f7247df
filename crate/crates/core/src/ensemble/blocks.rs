use serde::{Deserialize, Serialize};

use super::{Ensemble, SMOOTHING_EPS};
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

/// Block-level propensities `Ω^B_kl` for a hard node partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPropensities {
    pub assignment: Vec<usize>,
    pub blocks: usize,
    /// Row-major `blocks × blocks`.
    pub omega: Vec<f64>,
}

impl BlockPropensities {
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.omega[k * self.blocks + l]
    }

    /// Expands to a node-level propensity matrix.
    pub fn to_omega(&self) -> Vec<f64> {
        let n = self.assignment.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(self.assignment[i], self.assignment[j]);
            }
        }
        out
    }
}

/// Multinomial MLE of block propensities: `Ω^B_kl ∝ Σ_{k×l} â_ij / Σ_{k×l} Ξ_ij`,
/// zero numerators floored at ε, normalised to mean 1 over block pairs that
/// carry combinatorial weight. Pairs without any weight are set to 1.
pub fn fit_blocks(net: &MultiEdgeNetwork, assignment: &[usize]) -> Result<BlockPropensities> {
    let n = net.n();
    if assignment.len() != n {
        return Err(Error::InvalidInput(format!(
            "block assignment covers {} nodes, network has {n}",
            assignment.len()
        )));
    }
    let blocks = assignment.iter().max().map_or(0, |b| b + 1);
    let e = Ensemble::build(net)?;
    let mut obs = vec![0.0; blocks * blocks];
    let mut comb = vec![0.0; blocks * blocks];
    for i in 0..n {
        for j in 0..n {
            let b = assignment[i] * blocks + assignment[j];
            obs[b] += net.count(i, j) as f64;
            comb[b] += e.xi(i, j) as f64;
        }
    }
    let mut omega = vec![1.0; blocks * blocks];
    let mut sum = 0.0;
    let mut cnt = 0usize;
    for b in 0..blocks * blocks {
        if comb[b] > 0.0 {
            omega[b] = obs[b].max(SMOOTHING_EPS) / comb[b];
            sum += omega[b];
            cnt += 1;
        }
    }
    if cnt > 0 {
        let mean = sum / cnt as f64;
        for b in 0..blocks * blocks {
            if comb[b] > 0.0 {
                omega[b] /= mean;
            }
        }
    }
    Ok(BlockPropensities {
        assignment: assignment.to_vec(),
        blocks,
        omega,
    })
}
