use serde::Serialize;

use super::balance::pair_signs;
use super::SignedNetwork;

/// Largest number of signed edges searched exhaustively.
pub const EXACT_EDGE_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LineIndex {
    /// Fewest sign flips that balance every closed triad.
    pub value: usize,
    /// `false` when `value` is a heuristic upper bound.
    pub exact: bool,
}

struct SignedEdges {
    ends: Vec<(usize, usize)>,
    negative: Vec<bool>,
    /// Edge indices of every closed triad.
    triads: Vec<[usize; 3]>,
}

fn signed_edges(sn: &SignedNetwork) -> SignedEdges {
    let n = sn.n();
    let s = pair_signs(sn);
    let mut id = vec![usize::MAX; n * n];
    let mut ends = Vec::new();
    let mut negative = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if s[i * n + j] != 0 {
                id[i * n + j] = ends.len();
                ends.push((i, j));
                negative.push(s[i * n + j] < 0);
            }
        }
    }
    let mut triads = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = id[i * n + j];
            if a == usize::MAX {
                continue;
            }
            for k in (j + 1)..n {
                let (b, c) = (id[i * n + k], id[j * n + k]);
                if b != usize::MAX && c != usize::MAX {
                    triads.push([a, b, c]);
                }
            }
        }
    }
    SignedEdges { ends, negative, triads }
}

fn exact(g: &SignedEdges) -> usize {
    let e = g.ends.len();
    let neg: u32 = g.negative.iter().enumerate().filter(|(_, &b)| b).fold(0, |m, (k, _)| m | 1 << k);
    let masks: Vec<u32> = g.triads.iter().map(|t| t.iter().fold(0, |m, &k| m | 1 << k)).collect();
    let balanced = |flips: u32| masks.iter().all(|&t| ((neg ^ flips) & t).count_ones() % 2 == 0);
    if balanced(0) {
        return 0;
    }
    let limit = 1u64 << e;
    for k in 1..=e {
        // k-subsets in increasing order (Gosper's hack)
        let mut set: u64 = (1u64 << k) - 1;
        while set < limit {
            if balanced(set as u32) {
                return k;
            }
            let c = set & set.wrapping_neg();
            let r = set + c;
            set = (((r ^ set) >> 2) / c) | r;
        }
    }
    e
}

fn unbalanced(g: &SignedEdges, neg: &[bool]) -> usize {
    g.triads.iter().filter(|t| t.iter().filter(|&&k| neg[k]).count() % 2 == 1).count()
}

/// Single-edge flip descent on the number of unbalanced triads.
fn edge_descent(g: &SignedEdges) -> Option<usize> {
    let mut neg = g.negative.clone();
    let mut incident = vec![Vec::new(); neg.len()];
    for (t, tri) in g.triads.iter().enumerate() {
        for &k in tri {
            incident[k].push(t);
        }
    }
    let odd = |neg: &[bool], t: usize| g.triads[t].iter().filter(|&&k| neg[k]).count() % 2 == 1;
    let mut left = unbalanced(g, &neg);
    let mut flips = 0;
    while left > 0 {
        let mut best = (0isize, usize::MAX);
        for k in 0..neg.len() {
            // flipping k toggles every incident triad
            let gain: isize = incident[k].iter().map(|&t| if odd(&neg, t) { 1 } else { -1 }).sum();
            if gain > best.0 {
                best = (gain, k);
            }
        }
        if best.1 == usize::MAX {
            return None;
        }
        neg[best.1] = !neg[best.1];
        left -= best.0 as usize;
        flips += 1;
    }
    Some(flips)
}

/// Single-node switching descent; a balanced 2-colouring balances every triad.
fn node_switching(n: usize, g: &SignedEdges) -> usize {
    let frustrated = |side: &[bool]| {
        g.ends
            .iter()
            .zip(&g.negative)
            .filter(|&(&(i, j), &neg)| (side[i] == side[j]) == neg)
            .count()
    };
    let mut side = vec![false; n];
    let mut best = frustrated(&side);
    loop {
        let mut improved = false;
        for v in 0..n {
            side[v] = !side[v];
            let f = frustrated(&side);
            if f < best {
                best = f;
                improved = true;
            } else {
                side[v] = !side[v];
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Line index of balance: the fewest sign changes after which every closed
/// triad is balanced. Exhaustive up to [`EXACT_EDGE_LIMIT`] signed edges,
/// otherwise the best of two local searches, never above the number of
/// negative edges.
pub fn line_index(sn: &SignedNetwork) -> LineIndex {
    let g = signed_edges(sn);
    if g.ends.len() <= EXACT_EDGE_LIMIT {
        return LineIndex {
            value: exact(&g),
            exact: true,
        };
    }
    let negatives = g.negative.iter().filter(|&&b| b).count();
    let mut value = negatives.min(node_switching(sn.n(), &g));
    if let Some(f) = edge_descent(&g) {
        value = value.min(f);
    }
    LineIndex { value, exact: false }
}
