//! Entropy of the multinomial configuration distribution and the derived
//! potentiality score.
//!
//! For `X ~ Multinomial(m, p)` the entropy decomposes over the binomial
//! marginals `X_i ~ Bin(m, p_i)`:
//!
//! `H = −ln m! − m Σ p_i ln p_i + Σ_i E[ln X_i!]`
//!
//! which is exact and costs `O(m)` per distinct probability value.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::sample::draw_multinomial;
use super::Ensemble;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialityOptions {
    /// Largest edge budget evaluated exactly; larger budgets use Monte Carlo.
    pub exact_limit: u64,
    pub mc_draws: usize,
    pub seed: u64,
}

impl Default for PotentialityOptions {
    fn default() -> Self {
        Self {
            exact_limit: 2000,
            mc_draws: 100_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialityMethod {
    Exact,
    MonteCarlo { std_error: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Potentiality {
    /// `H / H_max` in `[0, 1]`.
    pub value: f64,
    pub entropy: f64,
    /// Entropy of the uniform multinomial on the same supported dyads.
    pub max_entropy: f64,
    pub method: PotentialityMethod,
    /// Fewer than two supported dyads; `value` is 0 by convention.
    pub degenerate: bool,
}

fn ln_factorials(m: u64) -> Vec<f64> {
    let mut t = Vec::with_capacity(m as usize + 1);
    t.push(0.0);
    let mut acc = 0.0;
    for k in 1..=m {
        acc += (k as f64).ln();
        t.push(acc);
    }
    t
}

/// `E[ln X!]` for `X ~ Bin(m, p)`.
fn expected_ln_factorial(m: u64, p: f64, lnf: &[f64]) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return lnf[m as usize];
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mode = ((m + 1) as f64 * p).floor() as u64;
    let mut acc = 0.0;
    for k in 0..=m {
        let lpmf = lnf[m as usize] - lnf[k as usize] - lnf[(m - k) as usize] + k as f64 * lp + (m - k) as f64 * lq;
        if k > mode && lpmf < -745.0 {
            break;
        }
        acc += lpmf.exp() * lnf[k as usize];
    }
    acc
}

/// Exact Shannon entropy (nats) of `Multinomial(m, p)`. `p` need not be
/// normalised; zero entries are ignored.
pub fn multinomial_entropy(m: u64, p: &[f64]) -> f64 {
    let z: f64 = p.iter().sum();
    let lnf = ln_factorials(m);
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut cross = 0.0;
    let mut marg = 0.0;
    for &w in p {
        if w <= 0.0 {
            continue;
        }
        let pi = w / z;
        cross += pi * pi.ln();
        marg += *cache
            .entry(pi.to_bits())
            .or_insert_with(|| expected_ln_factorial(m, pi, &lnf));
    }
    (-lnf[m as usize] - m as f64 * cross + marg).max(0.0)
}

/// Monte-Carlo estimate of the multinomial entropy and its standard error.
pub fn multinomial_entropy_mc(m: u64, p: &[f64], draws: usize, seed: u64) -> (f64, f64) {
    let z: f64 = p.iter().sum();
    let probs: Vec<f64> = p.iter().map(|w| w / z).collect();
    let ln_p: Vec<f64> = probs.iter().map(|&q| if q > 0.0 { q.ln() } else { 0.0 }).collect();
    let lnf = ln_factorials(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let alias = if (support.len() as u64) > m {
        Some(WeightedAliasIndex::new(support.iter().map(|&i| probs[i]).collect()).expect("positive weights"))
    } else {
        None
    };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for _ in 0..draws {
        let mut log_prob = lnf[m as usize];
        if let Some(alias) = &alias {
            counts.clear();
            for _ in 0..m {
                *counts.entry(support[alias.sample(&mut rng)]).or_insert(0) += 1;
            }
            for (&i, &c) in &counts {
                log_prob += c as f64 * ln_p[i] - lnf[c as usize];
            }
        } else {
            let sub: Vec<f64> = support.iter().map(|&i| probs[i]).collect();
            for (c, &i) in draw_multinomial(m, &sub, &mut rng).iter().zip(&support) {
                log_prob += *c as f64 * ln_p[i] - lnf[*c as usize];
            }
        }
        sum += -log_prob;
        sum_sq += log_prob * log_prob;
    }
    let nd = draws as f64;
    let mean = sum / nd;
    let var = ((sum_sq / nd - mean * mean) * nd / (nd - 1.0).max(1.0)).max(0.0);
    (mean, (var / nd).sqrt())
}

/// Potentiality with default options.
pub fn potentiality(e: &Ensemble) -> Result<Potentiality> {
    potentiality_with(e, &PotentialityOptions::default())
}

/// Normalised entropy of the ensemble's multinomial over its supported
/// dyads. The baseline is the uniform multinomial on the same support,
/// which maximises the entropy for fixed `m` and support size.
pub fn potentiality_with(e: &Ensemble, opts: &PotentialityOptions) -> Result<Potentiality> {
    if e.m() == 0 {
        return Err(Error::InvalidInput("potentiality needs at least one edge".into()));
    }
    let p: Vec<f64> = e.probabilities().into_iter().filter(|&v| v > 0.0).collect();
    normalized_entropy(e.m(), &p, opts)
}

/// Potentiality of an explicit probability vector; every entry counts as a
/// supported dyad, including zeros.
pub fn normalized_entropy(m: u64, p: &[f64], opts: &PotentialityOptions) -> Result<Potentiality> {
    if p.is_empty() {
        return Err(Error::InvalidInput("potentiality needs at least one supported dyad".into()));
    }
    let d = p.len();
    if d == 1 {
        return Ok(Potentiality {
            value: 0.0,
            entropy: 0.0,
            max_entropy: 0.0,
            method: PotentialityMethod::Exact,
            degenerate: true,
        });
    }
    let max_entropy = uniform_entropy(m, d);
    let z: f64 = p.iter().sum();
    let normalized: Vec<f64> = p.iter().map(|w| w / z).collect();
    let (entropy, method) = if p.iter().all(|&w| w == p[0]) {
        (max_entropy, PotentialityMethod::Exact)
    } else if m <= opts.exact_limit {
        (multinomial_entropy(m, &normalized), PotentialityMethod::Exact)
    } else {
        let (h, se) = multinomial_entropy_mc(m, &normalized, opts.mc_draws, opts.seed);
        (h, PotentialityMethod::MonteCarlo { std_error: se / max_entropy })
    };
    Ok(Potentiality {
        value: (entropy / max_entropy).clamp(0.0, 1.0),
        entropy,
        max_entropy,
        method,
        degenerate: false,
    })
}

fn uniform_entropy(m: u64, d: usize) -> f64 {
    multinomial_entropy(m, &vec![1.0 / d as f64; d])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Entropy by listing every composition of m into d parts.
    fn enumerate(m: u64, p: &[f64]) -> f64 {
        fn rec(m: u64, p: &[f64], acc: &mut Vec<u64>, h: &mut f64) {
            if acc.len() == p.len() - 1 {
                let last = m - acc.iter().sum::<u64>();
                let mut full = acc.clone();
                full.push(last);
                let mut lp = (1..=m).map(|k| (k as f64).ln()).sum::<f64>();
                for (&x, &pi) in full.iter().zip(p) {
                    lp -= (1..=x).map(|k| (k as f64).ln()).sum::<f64>();
                    if x > 0 {
                        lp += x as f64 * pi.ln();
                    }
                }
                let prob = lp.exp();
                if prob > 0.0 {
                    *h -= prob * lp;
                }
                return;
            }
            let used: u64 = acc.iter().sum();
            for x in 0..=(m - used) {
                acc.push(x);
                rec(m, p, acc, h);
                acc.pop();
            }
        }
        let mut h = 0.0;
        rec(m, p, &mut Vec::new(), &mut h);
        h
    }

    #[test]
    fn three_dyads_two_edges() {
        let p = [0.7, 0.2, 0.1];
        // six outcomes: (2,0,0)=.49 (0,2,0)=.04 (0,0,2)=.01 (1,1,0)=.28 (1,0,1)=.14 (0,1,1)=.04
        let probs = [0.49, 0.04, 0.01, 0.28, 0.14, 0.04];
        let h: f64 = probs.iter().map(|q: &f64| -q * q.ln()).sum();
        assert!((multinomial_entropy(2, &p) - h).abs() < 1e-12);
        let u: f64 = 1.0 / 3.0;
        let hu: f64 = -3.0 * (u * u) * (u * u).ln() - 3.0 * (2.0 * u * u) * (2.0 * u * u).ln();
        let pot = normalized_entropy(2, &p, &PotentialityOptions::default()).unwrap();
        assert!((pot.value - h / hu).abs() < 1e-12);
    }

    #[test]
    fn matches_enumeration_on_small_cases() {
        let cases: [&[f64]; 4] = [&[0.5, 0.5], &[0.1, 0.3, 0.6], &[0.25, 0.25, 0.4, 0.1], &[0.97, 0.01, 0.01, 0.01]];
        for p in cases {
            for m in 1..=6 {
                assert!((multinomial_entropy(m, p) - enumerate(m, p)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn uniform_is_one_and_deterministic_is_zero() {
        let opts = PotentialityOptions::default();
        for m in [1, 7, 300] {
            assert_eq!(normalized_entropy(m, &[0.5, 0.5], &opts).unwrap().value, 1.0);
            assert_eq!(normalized_entropy(m, &[1.0, 0.0, 0.0], &opts).unwrap().value, 0.0);
        }
        let single = normalized_entropy(5, &[1.0], &opts).unwrap();
        assert!(single.degenerate);
        assert_eq!(single.value, 0.0);
    }

    #[test]
    fn monte_carlo_close_to_exact() {
        let p = [0.4, 0.3, 0.2, 0.1];
        let exact = multinomial_entropy(50, &p);
        let (h, se) = multinomial_entropy_mc(50, &p, 20_000, 11);
        assert!((h - exact).abs() < 3.0 * se, "{h} ± {se} vs {exact}");
    }

    #[test]
    fn invariant_under_relabeling() {
        let a = multinomial_entropy(9, &[0.1, 0.2, 0.3, 0.4]);
        let b = multinomial_entropy(9, &[0.3, 0.1, 0.4, 0.2]);
        assert!((a - b).abs() < 1e-12);
    }
}
