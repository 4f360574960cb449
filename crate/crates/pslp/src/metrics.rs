//! Aggregates used to summarize benchmark timings.

/// Arithmetic mean; zero for an empty slice.
pub fn arithmetic_mean(t: &[f64]) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    t.iter().sum::<f64>() / t.len() as f64
}

/// Geometric mean, computed in log space. Zero if any entry is zero.
pub fn geometric_mean(t: &[f64]) -> f64 {
    shifted_geometric_mean(t, 0.0)
}

/// `(Π (tᵢ + shift))^(1/K) − shift`.
pub fn shifted_geometric_mean(t: &[f64], shift: f64) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    let mean_log = t.iter().map(|&v| (v + shift).ln()).sum::<f64>() / t.len() as f64;
    mean_log.exp() - shift
}
