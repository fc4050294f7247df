use crate::error::{Error, Result};
use crate::network::MultiEdgeNetwork;

/// Freeman degree centralization on total multi-edge degree.
///
/// `Σ_i (c_max − c_i)` is divided by its value for a star carrying the same
/// number of interactions, `e·(n − 2)`, which reduces to the classical
/// `(n − 1)(n − 2)` for a simple star. The result is clamped to `[0, 1]`.
pub fn degree_centralization(net: &MultiEdgeNetwork) -> Result<f64> {
    let n = net.n();
    if n < 3 {
        return Err(Error::Undefined(format!(
            "degree centralization needs at least 3 nodes, got {n}"
        )));
    }
    let degrees: Vec<f64> = (0..n)
        .map(|i| {
            let loops = net.count(i, i);
            (net.total_degree(i) - if net.is_directed() { 2 * loops } else { loops }) as f64
        })
        .collect();
    let total: f64 = degrees.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let edges = total / 2.0;
    let max = degrees.iter().cloned().fold(f64::MIN, f64::max);
    let spread: f64 = degrees.iter().map(|d| max - d).sum();
    Ok((spread / (edges * (n as f64 - 2.0))).clamp(0.0, 1.0))
}
