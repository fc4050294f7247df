use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::Ensemble;
use crate::network::MultiEdgeNetwork;

/// Draws `m` edges from the multinomial approximation of the ensemble.
/// The result is a directed network on the ensemble's nodes.
pub fn sample(e: &Ensemble, seed: u64) -> MultiEdgeNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = draw_multinomial(e.m(), &e.probabilities(), &mut rng);
    MultiEdgeNetwork::from_counts(e.node_ids().to_vec(), counts, true, has_diagonal(e))
        .expect("ensemble dimensions are consistent")
}

fn has_diagonal(e: &Ensemble) -> bool {
    (0..e.n()).any(|i| e.xi(i, i) > 0)
}

/// Multinomial draw by sequential conditional binomials.
pub(crate) fn draw_multinomial<R: rand::Rng>(m: u64, p: &[f64], rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; p.len()];
    let mut left = m;
    let mut mass_left: f64 = p.iter().sum();
    for (c, &pi) in counts.iter_mut().zip(p) {
        if left == 0 {
            break;
        }
        if pi <= 0.0 {
            continue;
        }
        let q = (pi / mass_left).clamp(0.0, 1.0);
        let x = if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        *c = x;
        left -= x;
        mass_left -= pi;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ids;

    #[test]
    fn zero_budget_gives_empty_network() {
        let e = Ensemble::from_parts(ids(2), vec![0, 4, 8, 0], vec![1.0; 4], 0).unwrap();
        assert_eq!(sample(&e, 1).m(), 0);
    }

    #[test]
    fn single_supported_dyad_takes_everything() {
        let e = Ensemble::from_parts(ids(2), vec![0, 9, 0, 0], vec![1.0; 4], 3).unwrap();
        let s = sample(&e, 42);
        assert_eq!(s.count(0, 1), 3);
        assert_eq!(s.m(), 3);
    }

    #[test]
    fn deterministic_under_seed() {
        let net = MultiEdgeNetwork::from_edges(ids(4), [(0, 1, 5), (1, 2, 3), (3, 0, 2), (2, 1, 7)], true).unwrap();
        let e = Ensemble::build(&net).unwrap();
        assert_eq!(sample(&e, 9), sample(&e, 9));
        assert_eq!(sample(&e, 9).m(), e.m());
    }

    #[test]
    fn mean_count_within_three_sigma() {
        // p = (0.9, 0.1) via Ξ = (9, 1); binomial sd of the mean over 100 seeds is √(1000·0.09/100)
        let e = Ensemble::from_parts(ids(2), vec![0, 9000, 1000, 0], vec![1.0; 4], 1000).unwrap();
        let seeds = 100;
        let mean: f64 = (0..seeds).map(|s| sample(&e, s).count(0, 1) as f64).sum::<f64>() / seeds as f64;
        let sigma = (1000.0 * 0.9 * 0.1 / seeds as f64).sqrt();
        assert!((mean - 900.0).abs() < 3.0 * sigma, "mean {mean}");
    }
}
