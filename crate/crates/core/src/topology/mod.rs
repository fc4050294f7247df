//! Purely topological robustness statistics. Multi-edges collapse to
//! weights (or to simple adjacency) and direction is ignored throughout.

mod centralization;
mod kcore;
mod spectral;

pub use centralization::degree_centralization;
pub use kcore::{core_numbers, kcore_decomposition, mean_coreness, weighted_core_numbers, CorenessVector};
pub use spectral::{eigengap, laplacian_spectrum, LaplacianSpectrum};
