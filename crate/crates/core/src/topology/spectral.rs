use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

const RESIDUAL_TOL: f64 = 1e-8;

/// Extreme non-trivial eigenvalues of the weighted graph Laplacian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LaplacianSpectrum {
    /// Second-smallest eigenvalue λ2 (algebraic connectivity).
    pub algebraic_connectivity: f64,
    /// Largest eigenvalue.
    pub largest: f64,
    /// `‖L x − λ2 x‖` of the returned Ritz pair; 0 when λ2 is set by disconnection.
    pub residual: f64,
}

/// Algebraic connectivity λ2 of the symmetrized, weighted Laplacian.
/// Exactly 0 for disconnected networks.
pub fn eigengap(net: &MultiEdgeNetwork) -> Result<f64> {
    Ok(laplacian_spectrum(net)?.algebraic_connectivity)
}

/// Lanczos with full reorthogonalisation on the complement of the constant
/// vector (the Laplacian null space of a connected graph).
pub fn laplacian_spectrum(net: &MultiEdgeNetwork) -> Result<LaplacianSpectrum> {
    let n = net.n();
    if n < 2 {
        return Err(Error::Undefined(format!("eigengap needs at least 2 nodes, got {n}")));
    }
    let w = net.symmetric_weights();
    let degree: Vec<f64> = (0..n).map(|i| w[i * n..(i + 1) * n].iter().sum()).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            let row = &w[i * n..(i + 1) * n];
            let s: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            y[i] = degree[i] * x[i] - s;
        }
    };

    let largest_bound = degree.iter().cloned().fold(0.0, f64::max) * 2.0;
    if !is_connected(n, &w) {
        let largest = lanczos(n, &apply, largest_bound).map(|r| r.1).unwrap_or(0.0);
        return Ok(LaplacianSpectrum {
            algebraic_connectivity: 0.0,
            largest,
            residual: 0.0,
        });
    }
    let (lambda2, largest, residual) =
        lanczos(n, &apply, largest_bound).expect("connected graph with n >= 2 has a non-trivial Krylov space");
    Ok(LaplacianSpectrum {
        algebraic_connectivity: lambda2.max(0.0),
        largest,
        residual,
    })
}

fn is_connected(n: usize, w: &[f64]) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for u in 0..n {
            if !seen[u] && w[v * n + u] > 0.0 {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == n
}

fn project_out_constant(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Returns (smallest Ritz value, largest Ritz value, residual of the smallest).
fn lanczos(n: usize, apply: &dyn Fn(&[f64], &mut [f64]), scale: f64) -> Option<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a9c_0b5e);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out_constant(&mut q);
    if normalize(&mut q) == 0.0 {
        return None;
    }
    let max_steps = n - 1;
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut z = vec![0.0; n];
    let breakdown = 1e-12 * scale.max(1.0);
    for k in 0..max_steps {
        apply(&basis[k], &mut z);
        let alpha: f64 = z.iter().zip(&basis[k]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // full reorthogonalisation, twice for stability
        for _ in 0..2 {
            project_out_constant(&mut z);
            for b in &basis {
                let c: f64 = z.iter().zip(b).map(|(a, b)| a * b).sum();
                z.iter_mut().zip(b).for_each(|(zi, bi)| *zi -= c * bi);
            }
        }
        let beta = normalize(&mut z);
        if k + 1 == max_steps || beta < breakdown {
            break;
        }
        betas.push(beta);
        basis.push(z.clone());
    }
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (mut lo, mut hi) = (0, 0);
    for i in 0..k {
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let theta = eig.eigenvalues[lo];
    let mut ritz = vec![0.0; n];
    for (j, b) in basis.iter().take(k).enumerate() {
        let c = eig.eigenvectors[(j, lo)];
        ritz.iter_mut().zip(b).for_each(|(r, bi)| *r += c * bi);
    }
    normalize(&mut ritz);
    apply(&ritz, &mut z);
    let residual = z
        .iter()
        .zip(&ritz)
        .map(|(a, b)| (a - theta * b).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > RESIDUAL_TOL {
        log::warn!("Laplacian Ritz residual {residual:e} above {RESIDUAL_TOL:e}");
    }
    Some((theta, eig.eigenvalues[hi], residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;
    use rand::Rng;

    fn dense_oracle(net: &MultiEdgeNetwork) -> Vec<f64> {
        let n = net.n();
        let w = net.symmetric_weights();
        let l = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (0..n).map(|k| w[i * n + k]).sum()
            } else {
                -w[i * n + j]
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn disconnected_is_exactly_zero() {
        let net = MultiEdgeNetwork::from_edges(ids(4), [(0, 1, 1), (2, 3, 1)], false).unwrap();
        assert_eq!(eigengap(&net).unwrap(), 0.0);
    }

    #[test]
    fn complete_graph_k4() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, 1));
            }
        }
        let net = MultiEdgeNetwork::from_edges(ids(4), edges, false).unwrap();
        let s = laplacian_spectrum(&net).unwrap();
        assert!((s.algebraic_connectivity - 4.0).abs() < 1e-10);
        assert!((s.largest - 4.0).abs() < 1e-10);
    }

    #[test]
    fn path_p3() {
        // L = [[1,-1,0],[-1,2,-1],[0,-1,1]] has spectrum {0, 1, 3}
        let net = MultiEdgeNetwork::from_edges(ids(3), [(0, 1, 1), (1, 2, 1)], false).unwrap();
        let s = laplacian_spectrum(&net).unwrap();
        assert!((s.algebraic_connectivity - 1.0).abs() < 1e-10);
        assert!((s.largest - 3.0).abs() < 1e-10);
        assert!(s.residual < 1e-8);
    }

    #[test]
    fn needs_two_nodes() {
        let net = MultiEdgeNetwork::empty(ids(1), false).unwrap();
        assert!(eigengap(&net).is_err());
    }

    #[test]
    fn random_instances_match_dense_eigensolve_and_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = 8;
            let mut counts = vec![0u64; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_bool(0.45) {
                        let c = rng.random_range(1..5);
                        counts[i * n + j] = c;
                        counts[j * n + i] = c;
                    }
                }
            }
            let net = MultiEdgeNetwork::from_counts(ids(n), counts.clone(), false, false).unwrap();
            let oracle = dense_oracle(&net);
            let s = laplacian_spectrum(&net).unwrap();
            let connected = oracle[1] > 1e-9;
            if connected {
                assert!((s.algebraic_connectivity - oracle[1]).abs() < 1e-8, "{} vs {}", s.algebraic_connectivity, oracle[1]);
                assert!(s.residual < 1e-8);
            } else {
                assert_eq!(s.algebraic_connectivity, 0.0);
            }
            assert!((s.largest - oracle[n - 1]).abs() < 1e-8);

            // raising one edge weight never lowers λ2
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i != j {
                let mut bumped = counts;
                bumped[i * n + j] += 1;
                bumped[j * n + i] += 1;
                let up = MultiEdgeNetwork::from_counts(ids(n), bumped, false, false).unwrap();
                assert!(eigengap(&up).unwrap() >= s.algebraic_connectivity - 1e-9);
            }
        }
    }
}
