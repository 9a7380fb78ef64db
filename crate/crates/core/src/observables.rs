//! Ergotropy, charging time, leakage, perturbative validity diagnostics and
//! power-law fits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dicke::{self, ResonanceMargins, TwiceM};
use crate::dynamics::{first_crossing, TimeSeries};
use crate::error::{LinalgError, SimError};
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityMatrix};
use crate::models::{battery, lambda_rate};
use crate::params::ModelParams;

/// Ergotropy `Tr[Hρ] − Σ_k r_k ε_k`, pairing the state's eigenvalues in
/// descending order with the energies in ascending order (passive state).
pub fn ergotropy(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64, LinalgError> {
    if h.rows() != rho.dim() || !h.is_square() {
        return Err(LinalgError::ShapeMismatch {
            expected: format!("{0}x{0} Hamiltonian", rho.dim()),
            found: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    let energies = eig_hermitian(h)?.values;
    let mut occupations = rho.eigenvalues()?;
    occupations.reverse();
    let mean: f64 = rho.matrix().as_slice().iter().zip(h.transpose().as_slice()).map(|(r, hh)| (r * hh).re).sum();
    let passive: f64 = occupations.iter().zip(&energies).map(|(r, e)| r * e).sum();
    Ok(mean - passive)
}

/// Compute ergotropy for every sample of `series`.
pub fn fill_ergotropy(series: &mut TimeSeries, h_battery: &ComplexMatrix) -> Result<(), SimError> {
    series.ergotropy = series.battery.iter().map(|rho| ergotropy(rho, h_battery)).collect::<Result<_, _>>()?;
    Ok(())
}

/// Ergotropy of the fully charged battery `|01>`, which is `ε₂`.
pub fn max_stored_ergotropy(params: &ModelParams) -> f64 {
    params.eps2()
}

/// Fraction of the reference ergotropy that counts as charged.
pub const DEFAULT_CHARGE_FRACTION: f64 = 0.8;

/// What "maximum ergotropy" means for the charging threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErgotropyReference {
    /// `ε₂`, the ergotropy of `|01>`.
    #[default]
    Stored,
    /// Largest ergotropy reached along the simulated trajectory.
    Trajectory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargingResult {
    pub n: u32,
    /// `None` when the threshold is never reached.
    pub tau: Option<f64>,
    pub peak_ergotropy: f64,
    pub max_ergotropy_ref: f64,
    pub leakage: f64,
}

impl ChargingResult {
    pub fn achieved(&self) -> bool {
        self.tau.is_some()
    }
}

pub fn charging_time(series: &TimeSeries, params: &ModelParams, fraction: f64) -> Result<ChargingResult, SimError> {
    charging_time_with(series, params, fraction, ErgotropyReference::Stored)
}

/// First time ergotropy reaches `fraction` of the reference.
pub fn charging_time_with(
    series: &TimeSeries,
    params: &ModelParams,
    fraction: f64,
    reference: ErgotropyReference,
) -> Result<ChargingResult, SimError> {
    if series.ergotropy.len() != series.len() || series.is_empty() {
        return Err(SimError::MissingErgotropy);
    }
    let peak = series.ergotropy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_ref = match reference {
        ErgotropyReference::Stored => max_stored_ergotropy(params),
        ErgotropyReference::Trajectory => peak,
    };
    let tau = first_crossing(&series.times, &series.ergotropy, fraction * max_ref);
    let leak = if series.battery_dim() == 4 { leakage(series) } else { 0.0 };
    Ok(ChargingResult { n: params.n, tau, peak_ergotropy: peak, max_ergotropy_ref: max_ref, leakage: leak })
}

/// `max_t (1 − p01 − p10)`: population outside the charging pair.
pub fn leakage(series: &TimeSeries) -> f64 {
    series
        .channel(battery::P01)
        .iter()
        .zip(series.channel(battery::P10))
        .map(|(a, b)| 1.0 - a - b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The four families of first-order off-resonant transitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeFamily {
    /// `g√a_M / |ω_A + δ + Δ_M|`, `M = 3/2 … N/2`.
    Qubit1Sum,
    /// `g√a_M / |ω_A + δ − Δ_M|`, `M = −N/2 … 1/2`.
    Qubit1Difference,
    /// `g√a_M / ||ω_A + 2Ω| + δ + Δ_M|`, `M = 3/2 … N/2`.
    Qubit2Sum,
    /// `g√a_M / ||ω_A + 2Ω| + δ − Δ_M|`, `M = −N/2 … 1/2`.
    Qubit2Difference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderAmplitude {
    pub family: AmplitudeFamily,
    pub twice_m: i64,
    /// `None` when the denominator vanishes.
    pub amplitude: Option<f64>,
}

/// Conditions checked by [`validity_diagnostics`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flag", rename_all = "kebab-case")]
pub enum ValidityFlag {
    /// `gN/δ ≥ 0.2`.
    WeakDetuning { ratio: f64 },
    /// `δ/ω_A ≥ 0.2`.
    LargeDetuning { ratio: f64 },
    /// `ω_A/|Ω| ≥ 1`.
    WeakNonlinearity { ratio: f64 },
    /// Largest first-order amplitude `≥ 0.2`.
    LargeOffResonantAmplitude { amplitude: f64 },
    /// `gN·t ≤ 5`.
    ShortTime { g_n_t: f64 },
    /// Some `μ_i` within 0.05 of an admissible `M`.
    NearResonance { index: usize, mu: f64, margin: f64 },
    /// A first-order denominator vanishes.
    ExactResonance { family: AmplitudeFamily, twice_m: i64 },
}

pub const RATIO_LIMIT: f64 = 0.2;
pub const NONLINEARITY_LIMIT: f64 = 1.0;
pub const AMPLITUDE_LIMIT: f64 = 0.2;
pub const MIN_G_N_T: f64 = 5.0;
pub const MARGIN_WARNING: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `gN/δ`.
    pub r1: f64,
    /// `δ/ω_A`.
    pub r2: f64,
    /// `ω_A/|Ω|`.
    pub r3: f64,
    pub amp_max: f64,
    pub g_n_t: f64,
    pub delta_t: f64,
    pub t_char: f64,
    pub margins: ResonanceMargins,
    pub amplitudes: Vec<FirstOrderAmplitude>,
    pub flags: Vec<ValidityFlag>,
}

impl ValidityReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Default characteristic time `π/(2λ)`.
pub fn characteristic_time(params: &ModelParams) -> f64 {
    PI / (2.0 * lambda_rate(params))
}

/// All first-order amplitudes over their admissible `M`.
pub fn first_order_amplitudes(params: &ModelParams) -> Vec<FirstOrderAmplitude> {
    let n = params.n as i64;
    let w2 = (params.omega_a + 2.0 * params.omega).abs();
    let families = [
        (AmplitudeFamily::Qubit1Sum, params.omega_a + params.delta, 1.0, 3..=n),
        (AmplitudeFamily::Qubit1Difference, params.omega_a + params.delta, -1.0, -n..=1),
        (AmplitudeFamily::Qubit2Sum, w2 + params.delta, 1.0, 3..=n),
        (AmplitudeFamily::Qubit2Difference, w2 + params.delta, -1.0, -n..=1),
    ];
    let mut out = Vec::new();
    for (family, freq, sign, range) in families {
        for tm in range.step_by(2) {
            let m = TwiceM(tm);
            // a_{−N/2} vanishes (no state below the ladder)
            let a = if tm == -n { 0.0 } else { dicke::ladder_coeff(params.n, m).expect("in range") };
            let denom = freq + sign * params.gap(m.value());
            let amplitude = (denom != 0.0).then(|| params.g * a.sqrt() / denom.abs());
            out.push(FirstOrderAmplitude { family, twice_m: tm, amplitude });
        }
    }
    out
}

/// Dimensionless checks of the perturbative regime `1 ≪ gNt ≪ δt`,
/// `gN ≪ δ ≪ ω_A < |Ω|`.
pub fn validity_diagnostics(params: &ModelParams, t_char: f64) -> ValidityReport {
    let [r1, r2, r3] = params.validity_ratios();
    let amplitudes = first_order_amplitudes(params);
    let amp_max = amplitudes.iter().filter_map(|a| a.amplitude).fold(0.0, f64::max);
    let margins = dicke::resonance_margins(params);
    let g_n_t = params.g * params.n as f64 * t_char;
    let delta_t = params.delta * t_char;

    let mut flags = Vec::new();
    if r1 >= RATIO_LIMIT {
        flags.push(ValidityFlag::WeakDetuning { ratio: r1 });
    }
    if r2 >= RATIO_LIMIT {
        flags.push(ValidityFlag::LargeDetuning { ratio: r2 });
    }
    if r3 >= NONLINEARITY_LIMIT {
        flags.push(ValidityFlag::WeakNonlinearity { ratio: r3 });
    }
    if amp_max >= AMPLITUDE_LIMIT {
        flags.push(ValidityFlag::LargeOffResonantAmplitude { amplitude: amp_max });
    }
    if g_n_t <= MIN_G_N_T {
        flags.push(ValidityFlag::ShortTime { g_n_t });
    }
    for (index, (&mu, &margin)) in margins.mu.iter().zip(&margins.margins).enumerate() {
        if margin < MARGIN_WARNING {
            flags.push(ValidityFlag::NearResonance { index: index + 1, mu, margin });
        }
    }
    for a in amplitudes.iter().filter(|a| a.amplitude.is_none()) {
        flags.push(ValidityFlag::ExactResonance { family: a.family, twice_m: a.twice_m });
    }
    ValidityReport { r1, r2, r3, amp_max, g_n_t, delta_t, t_char, margins, amplitudes, flags }
}

/// Least-squares line through `(ln N, ln τ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `ln τ`.
    pub residual: f64,
    pub used: usize,
    /// Points dropped because the threshold was never reached.
    pub excluded: usize,
}

pub fn scaling_fit(points: &[(f64, Option<f64>)]) -> Result<ScalingFit, SimError> {
    let pts: Vec<(f64, f64)> = points.iter().filter_map(|&(n, tau)| tau.map(|t| (n.ln(), t.ln()))).collect();
    if pts.len() < 3 {
        return Err(SimError::TooFewPoints(pts.len()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(ScalingFit { slope, intercept, residual, used: pts.len(), excluded: points.len() - pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, TimeGrid};
    use crate::models::{battery_hamiltonian, build_model, initial_state, ModelKind};
    use approx::assert_abs_diff_eq;

    fn h_default() -> ComplexMatrix {
        battery_hamiltonian(&ModelParams::paper_defaults(101))
    }

    #[test]
    fn maximally_mixed_has_no_ergotropy() {
        let rho = DensityMatrix::diagonal(&[0.25; 4]).unwrap();
        assert_abs_diff_eq!(ergotropy(&rho, &h_default()).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn charged_state_ergotropy_is_eps2() {
        let rho = DensityMatrix::diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(ergotropy(&rho, &h_default()).unwrap(), 37.01, epsilon = 1e-10);
    }

    #[test]
    fn two_level_mixture_closed_form() {
        let rho = DensityMatrix::diagonal(&[0.0, 0.7, 0.3, 0.0]).unwrap();
        assert_abs_diff_eq!(ergotropy(&rho, &h_default()).unwrap(), 25.907, epsilon = 1e-10);
    }

    #[test]
    fn ergotropy_shape_checked() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!(ergotropy(&rho, &h_default()).is_err());
    }

    #[test]
    fn stored_reference() {
        assert_abs_diff_eq!(max_stored_ergotropy(&ModelParams::paper_defaults(101)), 37.01, epsilon = 1e-12);
        let p = ModelParams { delta: 0.0, ..ModelParams::paper_defaults(101) };
        assert_abs_diff_eq!(max_stored_ergotropy(&p), 36.0, epsilon = 1e-12);
        let q = ModelParams { delta: 0.5, ..p };
        assert!(max_stored_ergotropy(&q) > max_stored_ergotropy(&p));
    }

    fn effective_series(n: u32, samples: usize) -> (ModelParams, TimeSeries) {
        let p = ModelParams::paper_defaults(n);
        let model = build_model(&p, ModelKind::Effective).unwrap();
        let psi = initial_state(&p, ModelKind::Effective).unwrap();
        let grid = TimeGrid::new(PI / lambda_rate(&p), samples).unwrap();
        let mut s = evolve(&model, &psi, &grid).unwrap();
        fill_ergotropy(&mut s, &model.h_battery).unwrap();
        (p, s)
    }

    #[test]
    fn effective_charging_time() {
        let (p, s) = effective_series(101, 4001);
        let r = charging_time(&s, &p, 0.8).unwrap();
        let lam = lambda_rate(&p);
        let expected = 0.8f64.sqrt().asin() / lam;
        assert!((r.tau.unwrap() - expected).abs() <= s.times[1]);
        assert_abs_diff_eq!(expected, 430.0, epsilon = 0.05);
        assert_abs_diff_eq!(r.leakage, 0.0, epsilon = 1e-9);
        assert!(r.peak_ergotropy <= r.max_ergotropy_ref * (1.0 + 1e-9));
    }

    #[test]
    fn unreachable_threshold_is_not_achieved() {
        let (p, mut s) = effective_series(11, 501);
        for e in s.ergotropy.iter_mut() {
            *e = e.min(0.5 * p.eps2());
        }
        let r = charging_time(&s, &p, 0.8).unwrap();
        assert!(!r.achieved());
    }

    #[test]
    fn zero_fraction_charges_immediately() {
        let (p, s) = effective_series(11, 101);
        assert_eq!(charging_time(&s, &p, 0.0).unwrap().tau, Some(0.0));
    }

    #[test]
    fn charging_time_is_monotone_in_fraction() {
        let (p, s) = effective_series(31, 2001);
        let taus: Vec<f64> = (1..=19).map(|k| charging_time(&s, &p, k as f64 * 0.05).unwrap().tau.unwrap()).collect();
        assert!(taus.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trajectory_reference_uses_peak() {
        let (p, s) = effective_series(11, 501);
        let r = charging_time_with(&s, &p, 0.8, ErgotropyReference::Trajectory).unwrap();
        assert_eq!(r.max_ergotropy_ref, r.peak_ergotropy);
    }

    #[test]
    fn missing_ergotropy_rejected() {
        let (p, mut s) = effective_series(11, 11);
        s.ergotropy.clear();
        assert!(matches!(charging_time(&s, &p, 0.8), Err(SimError::MissingErgotropy)));
    }

    #[test]
    fn validity_defaults() {
        let p = ModelParams::paper_defaults(101);
        let r = validity_diagnostics(&p, characteristic_time(&p));
        assert_abs_diff_eq!(r.r1, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r2, 0.101, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r3, 0.43478, epsilon = 1e-5);
        assert!(r.amp_max < AMPLITUDE_LIMIT);
        // the resonant pair sits at denominator δ
        assert_abs_diff_eq!(r.amp_max, 1e-3 * 51.0 / 1.01, epsilon = 1e-12);
        // μ₂ and μ₃ sit δ/(2|Ω|) from ±1/2 and 3/2
        let near: Vec<usize> = r
            .flags
            .iter()
            .filter_map(|f| match f {
                ValidityFlag::NearResonance { index, .. } => Some(*index),
                _ => None,
            })
            .collect();
        assert_eq!(near, vec![2, 3]);
        assert_eq!(r.flags.len(), 2);
    }

    #[test]
    fn validity_flags_violations() {
        let base = ModelParams::paper_defaults(101);
        let t = characteristic_time(&base);
        let r = validity_diagnostics(&base.with_delta_over_gn(1.0), t);
        assert_abs_diff_eq!(r.r1, 1.0, epsilon = 1e-12);
        assert!(r.flags.iter().any(|f| matches!(f, ValidityFlag::WeakDetuning { .. })));

        let p = ModelParams { omega_a: 1.0, omega: -2.3, ..base };
        let r = validity_diagnostics(&p, t);
        assert!(r.r2 > 1.0);
        assert!(r.flags.iter().any(|f| matches!(f, ValidityFlag::LargeDetuning { .. })));

        let r = validity_diagnostics(&base, 1.0);
        assert!(r.flags.iter().any(|f| matches!(f, ValidityFlag::ShortTime { .. })));
    }

    #[test]
    fn amp_max_grows_when_a_condition_breaks() {
        let base = ModelParams::paper_defaults(101);
        let t = characteristic_time(&base);
        let a0 = validity_diagnostics(&base, t).amp_max;
        assert!(validity_diagnostics(&base.with_delta_over_gn(1.0), t).amp_max > a0);
        // δ/ω_A violated by lowering ω_A with Ω held fixed
        assert!(validity_diagnostics(&ModelParams { omega_a: 1.0, ..base }, t).amp_max > a0);
        assert!(validity_diagnostics(&ModelParams { g: 1e-2, ..base }, t).amp_max > a0);
    }

    #[test]
    fn exact_resonance_is_flagged_not_fatal() {
        // δ = 2|Ω| − 2ω_A puts μ₁ on M = 3/2: the Qubit1Sum denominator vanishes there
        let p = ModelParams { delta: 26.0, ..ModelParams::paper_defaults(11) };
        let r = validity_diagnostics(&p, 100.0);
        assert!(r
            .flags
            .iter()
            .any(|f| matches!(f, ValidityFlag::ExactResonance { family: AmplitudeFamily::Qubit1Sum, twice_m: 3 })));
        assert!(r.amp_max.is_finite());
    }

    #[test]
    fn fit_exact_power_laws() {
        let ns = [11.0, 21.0, 31.0, 41.0, 51.0];
        let inv: Vec<_> = ns.iter().map(|&n| (n, Some(3.0 / n))).collect();
        let f = scaling_fit(&inv).unwrap();
        assert_abs_diff_eq!(f.slope, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.intercept, 3f64.ln(), epsilon = 1e-9);
        assert!(f.residual < 1e-12);
        let sqrt: Vec<_> = ns.iter().map(|&n| (n, Some(2.0 / n.sqrt()))).collect();
        assert_abs_diff_eq!(scaling_fit(&sqrt).unwrap().slope, -0.5, epsilon = 1e-9);
    }

    #[test]
    fn fit_excludes_missing_points() {
        let pts = [(1.0, Some(1.0)), (2.0, None), (4.0, Some(0.25)), (8.0, Some(0.125))];
        let f = scaling_fit(&pts).unwrap();
        assert_eq!((f.used, f.excluded), (3, 1));
        assert!(matches!(scaling_fit(&pts[..3]), Err(SimError::TooFewPoints(2))));
    }

    #[test]
    fn effective_sweep_slope() {
        let pts: Vec<_> = (11..=101)
            .step_by(10)
            .map(|n| {
                let p = ModelParams::paper_defaults(n);
                (n as f64, Some(0.8f64.sqrt().asin() / lambda_rate(&p)))
            })
            .collect();
        let slope = scaling_fit(&pts).unwrap().slope;
        assert!((-1.05..=-0.90).contains(&slope), "slope {slope}");
    }
}
