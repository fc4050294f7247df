//! Single-dyad marginal of the ensemble: a (possibly noncentral Fisher)
//! hypergeometric count of edges landing on one dyad.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MarginalFamily {
    CentralHypergeometric,
    FisherNoncentral,
}

/// Distribution of the number of successes in `draws` draws from an urn of
/// `total` balls, `successes` of which are marked and weighted by `odds`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadMarginal {
    pub total: u64,
    pub successes: u64,
    pub draws: u64,
    pub odds: f64,
    low: u64,
    pmf: Vec<f64>,
}

impl DyadMarginal {
    pub fn new(total: u64, successes: u64, draws: u64, odds: f64) -> Result<Self> {
        if successes > total {
            return Err(Error::InvalidInput(format!(
                "successes {successes} exceed urn size {total}"
            )));
        }
        if draws > total {
            return Err(Error::InvalidInput(format!(
                "draws {draws} exceed urn size {total}"
            )));
        }
        if !(odds.is_finite() && odds > 0.0) {
            return Err(Error::InvalidInput(format!("odds must be positive, got {odds}")));
        }
        let failures = total - successes;
        let low = draws.saturating_sub(failures);
        let high = draws.min(successes);
        let log_odds = odds.ln();
        // log P(x+1)/P(x) = ln((K−x)(n−x)) − ln((x+1)(M−K−n+x+1)) + ln ω
        let mut logw = Vec::with_capacity((high - low + 1) as usize);
        let mut acc = 0.0f64;
        logw.push(acc);
        for x in low..high {
            let num = ((successes - x) as f64).ln() + ((draws - x) as f64).ln();
            let den = ((x + 1) as f64).ln() + ((failures + x + 1 - draws) as f64).ln();
            acc += num - den + log_odds;
            logw.push(acc);
        }
        let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut pmf: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= z);
        Ok(Self {
            total,
            successes,
            draws,
            odds,
            low,
            pmf,
        })
    }

    pub fn family(&self) -> MarginalFamily {
        if self.odds == 1.0 {
            MarginalFamily::CentralHypergeometric
        } else {
            MarginalFamily::FisherNoncentral
        }
    }

    /// Inclusive support bounds.
    pub fn support(&self) -> (u64, u64) {
        (self.low, self.low + self.pmf.len() as u64 - 1)
    }

    pub fn pmf(&self, x: u64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            0.0
        } else {
            self.pmf[(x - lo) as usize]
        }
    }

    /// `Pr(X ≤ x)`; exactly 1 at or above the support maximum and 0 below it.
    pub fn cdf(&self, x: u64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo {
            0.0
        } else if x >= hi {
            1.0
        } else {
            self.pmf[..=(x - lo) as usize].iter().sum()
        }
    }

    /// `Pr(X < x)`.
    pub fn prob_below(&self, x: u64) -> f64 {
        if x == 0 {
            0.0
        } else {
            self.cdf(x - 1)
        }
    }

    /// `Pr(X > x)`, summed over the upper tail directly.
    pub fn prob_above(&self, x: u64) -> f64 {
        let (lo, hi) = self.support();
        if x >= hi {
            0.0
        } else if x < lo {
            1.0
        } else {
            self.pmf[(x - lo + 1) as usize..].iter().sum()
        }
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (self.low + k as u64) as f64 * p)
            .sum()
    }
}
