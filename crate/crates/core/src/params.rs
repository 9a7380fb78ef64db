use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Coupling used by the default preset.
pub const DEFAULT_G: f64 = 1e-3;
/// Charger qubit frequency used by the default preset.
pub const DEFAULT_OMEGA_A: f64 = 10.0;
/// `Ω / ω_A` used by the default preset.
pub const DEFAULT_OMEGA_RATIO: f64 = -2.3;
/// `δ / (gN)` used by the default preset.
pub const DEFAULT_DELTA_OVER_GN: f64 = 10.0;

/// Physical parameters of the superabsorption charger and two-qubit battery.
///
/// Units are arbitrary with ħ = 1: energies share the unit of `omega_a` and
/// times are inverse energies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of charger qubits (odd).
    pub n: u32,
    /// Charger qubit frequency `ω_A`.
    pub omega_a: f64,
    /// Collective charger nonlinearity `Ω` (negative).
    pub omega: f64,
    /// Charger–battery coupling.
    pub g: f64,
    /// Detuning of the battery qubits from their charger transitions.
    pub delta: f64,
}

impl ModelParams {
    pub fn new(n: u32, omega_a: f64, omega: f64, g: f64, delta: f64) -> Result<Self, ParamError> {
        let p = Self { n, omega_a, omega, g, delta };
        p.validate()?;
        Ok(p)
    }

    /// `g = 1e-3`, `ω_A = 10`, `Ω = −2.3 ω_A`, `δ = 10 g N`.
    pub fn paper_defaults(n: u32) -> Self {
        Self {
            n,
            omega_a: DEFAULT_OMEGA_A,
            omega: DEFAULT_OMEGA_RATIO * DEFAULT_OMEGA_A,
            g: DEFAULT_G,
            delta: DEFAULT_DELTA_OVER_GN * DEFAULT_G * n as f64,
        }
    }

    /// Same parameters with `ω_A` replaced and `Ω` rescaled to keep `Ω/ω_A`.
    pub fn with_omega_a(self, omega_a: f64) -> Self {
        let ratio = self.omega / self.omega_a;
        Self { omega_a, omega: ratio * omega_a, ..self }
    }

    /// Same parameters with `δ = multiplier · g · N`.
    pub fn with_delta_over_gn(self, multiplier: f64) -> Self {
        Self { delta: multiplier * self.g * self.n as f64, ..self }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n < 3 || self.n.is_multiple_of(2) {
            return Err(ParamError::InvalidQubitCount(self.n));
        }
        let checks: [(&'static str, f64, bool, &'static str); 5] = [
            ("omega_a", self.omega_a, self.omega_a > 0.0, "omega_a > 0"),
            ("omega", self.omega, self.omega < 0.0, "omega < 0"),
            ("omega", self.omega, self.omega.abs() > self.omega_a, "|omega| > omega_a"),
            ("g", self.g, self.g > 0.0, "g > 0"),
            ("delta", self.delta, self.delta > 0.0, "delta > 0"),
        ];
        for (name, value, ok, rule) in checks {
            if !ok || !value.is_finite() {
                return Err(ParamError::OutOfDomain { name, value, rule });
            }
        }
        let (eps1, eps2) = (self.eps1(), self.eps2());
        if !(eps1 > 0.0 && eps2 > eps1) {
            return Err(ParamError::BatteryOrdering { eps1, eps2 });
        }
        Ok(())
    }

    /// Battery qubit 1 splitting `ω_A + δ`.
    pub fn eps1(&self) -> f64 {
        self.omega_a + self.delta
    }

    /// Battery qubit 2 splitting `|ω_A + 2Ω| + δ`.
    pub fn eps2(&self) -> f64 {
        (self.omega_a + 2.0 * self.omega).abs() + self.delta
    }

    /// Charger level `E_M = ω_A M + Ω M²`.
    pub fn charger_energy(&self, m: f64) -> f64 {
        self.omega_a * m + self.omega * m * m
    }

    /// Ladder gap `Δ_M = E_M − E_{M−1} = ω_A + Ω(2M − 1)`.
    pub fn gap(&self, m: f64) -> f64 {
        self.omega_a + self.omega * (2.0 * m - 1.0)
    }

    /// `gN/δ`, `δ/ω_A`, `ω_A/|Ω|`: each must be small (the last below one).
    pub fn validity_ratios(&self) -> [f64; 3] {
        [self.g * self.n as f64 / self.delta, self.delta / self.omega_a, self.omega_a / self.omega.abs()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn defaults_are_valid() {
        for n in (3..=201).step_by(2) {
            ModelParams::paper_defaults(n).validate().unwrap();
        }
        let p = ModelParams::paper_defaults(101);
        assert_abs_diff_eq!(p.delta, 1.01, epsilon = 1e-12);
        assert_eq!(p.omega, -23.0);
    }

    #[test]
    fn rejects_even_or_small_n() {
        for n in [0, 1, 2, 4, 100] {
            let p = ModelParams { n, ..ModelParams::paper_defaults(3) };
            assert_eq!(p.validate(), Err(ParamError::InvalidQubitCount(n)));
        }
    }

    #[test]
    fn rejects_domain_violations() {
        let base = ModelParams::paper_defaults(11);
        assert!(ModelParams { omega_a: 0.0, ..base }.validate().is_err());
        assert!(ModelParams { omega: 1.0, ..base }.validate().is_err());
        assert!(ModelParams { omega: -5.0, ..base }.validate().is_err());
        assert!(ModelParams { g: 0.0, ..base }.validate().is_err());
        assert!(ModelParams { delta: 0.0, ..base }.validate().is_err());
        assert!(ModelParams { delta: f64::NAN, ..base }.validate().is_err());
    }

    #[test]
    fn vanishing_eps2_is_rejected() {
        // Ω = −ω_A/2 with δ → 0 closes the second battery gap
        let p = ModelParams { omega_a: 1.0, omega: -0.5, delta: 0.0, ..ModelParams::paper_defaults(3) };
        assert_abs_diff_eq!(p.eps2(), 0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = ModelParams::paper_defaults(101);
        assert_abs_diff_eq!(p.eps1(), 11.01, epsilon = 1e-12);
        assert_abs_diff_eq!(p.eps2(), 37.01, epsilon = 1e-12);
        assert_abs_diff_eq!(p.gap(0.5), 10.0, epsilon = 1e-12);
        let [r1, r2, r3] = p.validity_ratios();
        assert_abs_diff_eq!(r1, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 0.101, epsilon = 1e-12);
        assert_abs_diff_eq!(r3, 1.0 / 2.3, epsilon = 1e-12);
    }

    #[test]
    fn rescaling_helpers() {
        let p = ModelParams::paper_defaults(101).with_omega_a(5.0);
        assert_abs_diff_eq!(p.omega, -11.5, epsilon = 1e-12);
        let q = p.with_delta_over_gn(1.0);
        assert_abs_diff_eq!(q.delta, 0.101, epsilon = 1e-12);
    }
}
