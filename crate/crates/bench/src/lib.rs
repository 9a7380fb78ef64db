//! Shared inputs for the benchmarks.

use superabsorb::models::{build_model, initial_state, lambda_rate};
use superabsorb::{BuiltModel, ModelKind, ModelParams, StateVector, TimeGrid};

/// Exact model at the default parameters, its initial state and a grid of
/// `samples` points over one effective period.
pub fn exact_fixture(n: u32, samples: usize) -> (BuiltModel, StateVector, TimeGrid) {
    let params = ModelParams::paper_defaults(n);
    let model = build_model(&params, ModelKind::Exact).expect("defaults are valid");
    let psi = initial_state(&params, ModelKind::Exact).expect("defaults are valid");
    let grid = TimeGrid::new(std::f64::consts::PI / lambda_rate(&params), samples).expect("positive span");
    (model, psi, grid)
}

/// `(N, τ)` with `τ = c/N` and a deterministic ripple, over odd N.
pub fn power_law_points(count: usize) -> Vec<(f64, Option<f64>)> {
    (0..count)
        .map(|k| {
            let n = (11 + 2 * k) as f64;
            let ripple = 1.0 + 0.01 * ((k as f64) * 0.7).sin();
            (n, Some(4.5e4 / n * ripple))
        })
        .collect()
}
