use serde::Serialize;

use super::{AgentProfile, SignedNetwork};

/// Floor for rescaled impacts entering the weighted balance.
const IMPACT_FLOOR: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriadBalance {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// Product of the three relation signs.
    pub sign: i8,
    /// Weighted balance `T_ijk`; 0 until weighted.
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceSummary {
    pub triads: Vec<TriadBalance>,
    pub balanced: usize,
    /// Share of balanced triads, `None` without any triad.
    pub fraction_balanced: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedBalance {
    /// `⟨T⟩`, `None` without any triad.
    pub mean: Option<f64>,
    pub triads: usize,
}

/// Sign of each undirected pair, from `ω_ij + ω_ji`; ties give 0.
pub(crate) fn pair_signs(sn: &SignedNetwork) -> Vec<i8> {
    let n = sn.n();
    let mut s = vec![0i8; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = sn.omega(i, j) + sn.omega(j, i);
                s[i * n + j] = if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                };
            }
        }
    }
    s
}

/// Visits every closed triad `i < j < k` with all three pair signs non-zero.
fn for_each_triad(sn: &SignedNetwork, signs: &[i8], mut f: impl FnMut(usize, usize, usize, i8)) {
    let n = sn.n();
    for i in 0..n {
        for j in (i + 1)..n {
            let sij = signs[i * n + j];
            if sij == 0 {
                continue;
            }
            for k in (j + 1)..n {
                let sik = signs[i * n + k];
                let sjk = signs[j * n + k];
                if sik != 0 && sjk != 0 {
                    f(i, j, k, sij * sik * sjk);
                }
            }
        }
    }
}

/// Classic structural balance: `S_ijk = sign(ω_ij) sign(ω_ik) sign(ω_kj)`.
pub fn classic_balance(sn: &SignedNetwork) -> BalanceSummary {
    let signs = pair_signs(sn);
    let mut triads = Vec::new();
    for_each_triad(sn, &signs, |i, j, k, s| {
        triads.push(TriadBalance {
            i,
            j,
            k,
            sign: s,
            weighted: 0.0,
        })
    });
    let balanced = triads.iter().filter(|t| t.sign > 0).count();
    let fraction_balanced = (!triads.is_empty()).then(|| balanced as f64 / triads.len() as f64);
    BalanceSummary {
        triads,
        balanced,
        fraction_balanced,
    }
}

/// Impacts rescaled to `(0, 1]`: min-max, floored at 0.01; all ones when equal.
pub(crate) fn scaled_impacts(profiles: &[AgentProfile]) -> Vec<f64> {
    let min = profiles.iter().map(|p| p.q).fold(f64::INFINITY, f64::min);
    let max = profiles.iter().map(|p| p.q).fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return vec![1.0; profiles.len()];
    }
    profiles
        .iter()
        .map(|p| ((p.q - min) / (max - min)).max(IMPACT_FLOOR))
        .collect()
}

fn cbrt_product(a: f64, b: f64, c: f64) -> f64 {
    (a * b * c).cbrt()
}

/// Weighted balance
/// `T_ijk = S_ijk · gm(|ω̄_ij|, |ω̄_ik|, |ω̄_jk|) · gm(q̃_i, q̃_j, q̃_k)`
/// with `gm` the geometric mean and `ω̄` the symmetrised relation, averaged
/// over all closed triads.
pub fn weighted_balance(sn: &SignedNetwork, profiles: &[AgentProfile]) -> WeightedBalance {
    assert_eq!(profiles.len(), sn.n(), "one profile per node");
    let signs = pair_signs(sn);
    let q = scaled_impacts(profiles);
    let mut sum = 0.0;
    let mut count = 0usize;
    for_each_triad(sn, &signs, |i, j, k, s| {
        let t = s as f64
            * cbrt_product(sn.pair(i, j).abs(), sn.pair(i, k).abs(), sn.pair(j, k).abs())
            * cbrt_product(q[i], q[j], q[k]);
        sum += t;
        count += 1;
    });
    WeightedBalance {
        mean: (count > 0).then(|| mean_balance_from(sum, count)),
        triads: count,
    }
}

fn mean_balance_from(sum: f64, count: usize) -> f64 {
    (sum / count as f64).clamp(-1.0, 1.0)
}

/// Arithmetic mean of triad balances, `None` when there are none.
pub fn mean_balance(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| mean_balance_from(values.iter().sum(), values.len()))
}
