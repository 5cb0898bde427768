//! Shared fixtures for the criterion benchmarks.

use dualcore_vqe::{AnsatzSpec, ParameterVector};

/// Deterministic pseudo-random angles for `spec`.
pub fn fixed_params(spec: &AnsatzSpec, seed: u64) -> ParameterVector {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let values = (0..spec.param_count())
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 2.0 * std::f64::consts::PI
        })
        .collect();
    ParameterVector::from_values(spec, values).expect("length matches spec")
}
