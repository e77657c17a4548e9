//! Shared fixtures for the criterion benches.

use seqdisc::protocol::ProtocolParams;

/// Overlap pairs `(r, t)` spread over the interior of the unit square.
pub fn overlap_grid(n: usize) -> Vec<(f64, f64)> {
    let step = |k: usize| 0.05 + 0.9 * k as f64 / (n.max(2) - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (step(i), step(j))))
        .collect()
}

/// The equal-weight run used throughout the examples: `s = 0.25`, `t = 0.5`.
pub fn reference_params() -> ProtocolParams {
    ProtocolParams::equal_weight(0.25, 0.5).expect("valid reference parameters")
}
