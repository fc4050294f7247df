//! Multiplex network regression: `log Ω_ij = Σ_l β_l log s^l_ij`, fitted by
//! maximising the multinomial log-likelihood `Σ â_ij log p_ij` with
//! `p_ij ∝ Ξ_ij Ω_ij`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::{Ensemble, SMOOTHING_EPS};
use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

const GRAD_TOL: f64 = 1e-6;
const MAX_ITER: usize = 500;

/// Explanatory network layers `s^l_ij > 0`, one row-major `n × n` matrix each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub names: Vec<String>,
    pub layers: Vec<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
}

impl LayerStack {
    pub fn new(names: Vec<String>, layers: Vec<Vec<f64>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("at least one predictor layer is required".into()));
        }
        if names.len() != layers.len() {
            return Err(Error::InvalidInput("one name per layer is required".into()));
        }
        for (name, layer) in names.iter().zip(&layers) {
            if let Some(v) = layer.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "layer {name:?} has a non-positive entry {v}"
                )));
            }
        }
        Ok(Self {
            names,
            layers,
            beta: None,
        })
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// `Ω_ij = Π_l s^l_ij^{β_l}` for the fitted (or given) coefficients.
    pub fn propensities(&self, beta: &[f64]) -> Vec<f64> {
        let size = self.layers[0].len();
        (0..size)
            .map(|idx| {
                self.layers
                    .iter()
                    .zip(beta)
                    .map(|(s, b)| b * s[idx].max(SMOOTHING_EPS).ln())
                    .sum::<f64>()
                    .exp()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientTest {
    pub name: String,
    pub beta: f64,
    /// From the inverse observed information; absent when it is singular.
    pub std_error: Option<f64>,
    /// `2 (ℓ_full − ℓ_without_layer)`.
    pub lr_statistic: f64,
    /// χ²₁ upper tail of `lr_statistic`.
    pub p_value: f64,
}

/// Regression report, serialised as `{beta, significance, loglik, ...}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionFit {
    pub beta: Vec<f64>,
    pub significance: Vec<CoefficientTest>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Predictors carry no identifiable signal (singular information matrix).
    pub degenerate: bool,
    /// Log-likelihood after every accepted step, starting at β = 0.
    pub loglik_trace: Vec<f64>,
}

struct Design {
    obs: Vec<f64>,
    ln_xi: Vec<f64>,
    /// rows = supported dyads, cols = layers
    x: Vec<Vec<f64>>,
    m: f64,
}

impl Design {
    /// Per-edge log-likelihood and its gradient, restricted to `cols`.
    fn eval(&self, beta: &[f64], cols: &[usize]) -> (f64, Vec<f64>) {
        let eta: Vec<f64> = self
            .x
            .iter()
            .zip(&self.ln_xi)
            .map(|(row, lx)| lx + cols.iter().zip(beta).map(|(&c, b)| b * row[c]).sum::<f64>())
            .collect();
        let max = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = eta.iter().map(|e| (e - max).exp()).sum();
        let log_z = max + z.ln();
        let mut f = 0.0;
        let mut g = vec![0.0; cols.len()];
        for ((row, e), a) in self.x.iter().zip(&eta).zip(&self.obs) {
            let p = (e - log_z).exp();
            f += a * (e - log_z);
            for (k, &c) in cols.iter().enumerate() {
                g[k] += (a / self.m - p) * row[c];
            }
        }
        (f / self.m, g)
    }

    fn information(&self, beta: &[f64], cols: &[usize]) -> DMatrix<f64> {
        let eta: Vec<f64> = self
            .x
            .iter()
            .zip(&self.ln_xi)
            .map(|(row, lx)| lx + cols.iter().zip(beta).map(|(&c, b)| b * row[c]).sum::<f64>())
            .collect();
        let max = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = eta.iter().map(|e| (e - max).exp()).collect();
        let z: f64 = w.iter().sum();
        let l = cols.len();
        let mut mean = vec![0.0; l];
        for (row, wi) in self.x.iter().zip(&w) {
            for (k, &c) in cols.iter().enumerate() {
                mean[k] += wi / z * row[c];
            }
        }
        let mut cov = DMatrix::zeros(l, l);
        for (row, wi) in self.x.iter().zip(&w) {
            let p = wi / z;
            for a in 0..l {
                for b in 0..l {
                    cov[(a, b)] += p * (row[cols[a]] - mean[a]) * (row[cols[b]] - mean[b]);
                }
            }
        }
        cov * self.m
    }
}

struct Ascent {
    beta: Vec<f64>,
    f: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

/// BFGS ascent with Armijo backtracking; `f` never decreases between accepted iterates.
fn bfgs(design: &Design, cols: &[usize]) -> Ascent {
    let l = cols.len();
    let mut beta = vec![0.0; l];
    let (mut f, mut g) = design.eval(&beta, cols);
    let mut trace = vec![f * design.m];
    let identity = |scale: f64| {
        let mut h = vec![0.0; l * l];
        (0..l).for_each(|i| h[i * l + i] = scale);
        h
    };
    let mut h = identity(1.0);
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..MAX_ITER {
        if g.iter().all(|v| v.abs() < GRAD_TOL) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut d: Vec<f64> = (0..l).map(|i| (0..l).map(|j| h[i * l + j] * g[j]).sum()).collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope <= 0.0 {
            h = identity(1.0);
            d = g.clone();
            slope = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        }
        let mut t = 1.0;
        let accepted = loop {
            let cand: Vec<f64> = beta.iter().zip(&d).map(|(b, di)| b + t * di).collect();
            let (fc, gc) = design.eval(&cand, cols);
            if fc.is_finite() && fc >= f + 1e-4 * t * slope {
                break Some((cand, fc, gc));
            }
            t *= 0.5;
            if t < 1e-20 {
                break None;
            }
        };
        let Some((cand, fc, gc)) = accepted else {
            if fresh {
                break;
            }
            h = identity(1.0);
            fresh = true;
            continue;
        };
        let s: Vec<f64> = cand.iter().zip(&beta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&gc).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-300 {
            if fresh {
                let yy: f64 = y.iter().map(|v| v * v).sum();
                h = identity(sy / yy);
            }
            let rho = 1.0 / sy;
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let hy: Vec<f64> = (0..l).map(|i| (0..l).map(|j| h[i * l + j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            let mut next = h.clone();
            for i in 0..l {
                for j in 0..l {
                    next[i * l + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            h = next;
            fresh = false;
        }
        beta = cand;
        f = fc;
        g = gc;
        trace.push(f * design.m);
    }
    if !converged && g.iter().all(|v| v.abs() < GRAD_TOL) {
        converged = true;
    }
    Ascent {
        beta,
        f,
        iterations,
        converged,
        trace,
    }
}

/// Fits the layer coefficients and tests each against a refit without it.
/// Non-convergence is reported through [`RegressionFit::converged`] with the
/// best iterate returned.
pub fn fit_regression(net: &MultiEdgeNetwork, layers: &LayerStack) -> Result<RegressionFit> {
    let e = Ensemble::build(net)?;
    let n = net.n();
    for (name, layer) in layers.names.iter().zip(&layers.layers) {
        if layer.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "layer {name:?} has {} entries, expected {}",
                layer.len(),
                n * n
            )));
        }
    }
    let supported: Vec<usize> = (0..n * n).filter(|&idx| e.xi_matrix()[idx] > 0).collect();
    let l = layers.len();
    if l == 0 || l >= supported.len() {
        return Err(Error::InvalidInput(format!(
            "need 1 <= layers < supported dyads, got {l} layers for {} dyads",
            supported.len()
        )));
    }
    let design = Design {
        obs: supported.iter().map(|&idx| net.counts()[idx] as f64).collect(),
        ln_xi: supported.iter().map(|&idx| (e.xi_matrix()[idx] as f64).ln()).collect(),
        x: supported
            .iter()
            .map(|&idx| {
                layers
                    .layers
                    .iter()
                    .map(|s| s[idx].max(SMOOTHING_EPS).ln())
                    .collect()
            })
            .collect(),
        m: e.m() as f64,
    };
    let all: Vec<usize> = (0..l).collect();
    let full = bfgs(&design, &all);
    if !full.converged {
        log::warn!("network regression stopped after {} iterations without converging", full.iterations);
    }

    let info = design.information(&full.beta, &all);
    let eig = SymmetricEigen::new(info.clone());
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min_ev = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let degenerate = max_ev <= 0.0 || min_ev <= 1e-10 * max_ev.max(1.0);
    let covariance = if degenerate { None } else { info.try_inverse() };

    let significance = (0..l)
        .map(|c| {
            let rest: Vec<usize> = all.iter().copied().filter(|&k| k != c).collect();
            let reduced_f = if rest.is_empty() {
                design.eval(&[], &[]).0
            } else {
                bfgs(&design, &rest).f
            };
            let lr = (2.0 * design.m * (full.f - reduced_f)).max(0.0);
            CoefficientTest {
                name: layers.names[c].clone(),
                beta: full.beta[c],
                std_error: covariance.as_ref().map(|cov| cov[(c, c)].max(0.0).sqrt()),
                lr_statistic: lr,
                p_value: erfc((lr / 2.0).sqrt()),
            }
        })
        .collect();

    Ok(RegressionFit {
        beta: full.beta,
        significance,
        loglik: full.f * design.m,
        iterations: full.iterations,
        converged: full.converged,
        degenerate,
        loglik_trace: full.trace,
    })
}
