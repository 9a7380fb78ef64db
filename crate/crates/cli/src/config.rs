//! Experiment configuration: an optional JSON document layered over a preset,
//! then command-line overrides on top.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use superabsorb::dicke::resonance_margins;
use superabsorb::models::lambda_rate;
use superabsorb::observables::{ErgotropyReference, DEFAULT_CHARGE_FRACTION, MARGIN_WARNING};
use superabsorb::params::{DEFAULT_DELTA_OVER_GN, DEFAULT_G, DEFAULT_OMEGA_A, DEFAULT_OMEGA_RATIO};
use superabsorb::{ModelParams, TimeGrid};

use crate::error::CliError;

/// Upper end of the opt-in breakdown probe when the config does not set one.
/// Each probe point costs a dense `4(N+1)`-dimensional eigendecomposition.
pub const DEFAULT_PROBE_MAX_N: u32 = 201;
pub const DEFAULT_PROBE_STEP: u32 = 20;
/// Battery population threshold for the separable baseline charging time.
pub const DEFAULT_BASELINE_THRESHOLD: f64 = 0.9;
pub const DEFAULT_BASELINE_SAMPLES: usize = 4001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CompareOmega,
    CompareDelta,
    Populations,
    ChargingSweep,
    Baselines,
    Validity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::CompareOmega,
        ExperimentKind::CompareDelta,
        ExperimentKind::Populations,
        ExperimentKind::ChargingSweep,
        ExperimentKind::Baselines,
        ExperimentKind::Validity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CompareOmega => "compare-omega",
            ExperimentKind::CompareDelta => "compare-delta",
            ExperimentKind::Populations => "populations",
            ExperimentKind::ChargingSweep => "charging-sweep",
            ExperimentKind::Baselines => "baselines",
            ExperimentKind::Validity => "validity",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preset {
    /// `g = 1e-3`, `ω_A = 10`, `Ω = −2.3 ω_A`, `δ = 10 g N`.
    #[default]
    PaperDefaults,
}

/// On-disk configuration. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<u32>,
    pub omega_a: Option<f64>,
    /// `Ω/ω_A`; ignored when `omega` is set.
    pub omega_ratio: Option<f64>,
    pub omega: Option<f64>,
    pub g: Option<f64>,
    /// `δ/(gN)`; ignored when `delta` is set.
    pub delta_over_gn: Option<f64>,
    pub delta: Option<f64>,
    pub omega_a_values: Option<Vec<f64>>,
    pub delta_multipliers: Option<Vec<f64>>,
    pub n_values: Option<Vec<u32>>,
    /// Simulated span in effective periods `π/λ`.
    pub periods: Option<f64>,
    pub samples: Option<usize>,
    pub charge_fraction: Option<f64>,
    pub ergotropy_reference: Option<ErgotropyReference>,
    pub threshold: Option<f64>,
    pub t_char: Option<f64>,
    pub breakdown_probe: Option<bool>,
    pub probe_step: Option<u32>,
    pub probe_max_n: Option<u32>,
}

impl ConfigFile {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::ConfigRead { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigParse { path: path.to_path_buf(), source })
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub ergotropy_reference: Option<ErgotropyReference>,
    pub breakdown_probe: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "over", content = "values", rename_all = "kebab-case")]
pub enum Sweep {
    Single,
    OmegaA(Vec<f64>),
    DeltaMultiplier(Vec<f64>),
    N(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub step: u32,
    pub max_n: u32,
}

/// Fully resolved experiment. Echoed verbatim into every summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: u32,
    pub omega_a: f64,
    pub omega_ratio: f64,
    pub omega: Option<f64>,
    pub g: f64,
    pub delta_over_gn: f64,
    pub delta: Option<f64>,
    pub sweep: Sweep,
    pub periods: f64,
    pub samples: Option<usize>,
    pub charge_fraction: f64,
    pub ergotropy_reference: ErgotropyReference,
    pub threshold: f64,
    pub t_char: Option<f64>,
    pub probe: Option<Probe>,
}

fn default_n(kind: ExperimentKind) -> u32 {
    match kind {
        ExperimentKind::Populations => 31,
        _ => 101,
    }
}

fn default_sweep(kind: ExperimentKind) -> Sweep {
    match kind {
        ExperimentKind::CompareOmega => Sweep::OmegaA(vec![10.0, 5.0, 1.0]),
        ExperimentKind::CompareDelta => Sweep::DeltaMultiplier(vec![10.0, 5.0, 1.0]),
        ExperimentKind::ChargingSweep => Sweep::N((11..=101).step_by(10).collect()),
        ExperimentKind::Baselines => Sweep::N(vec![1, 9, 25, 49]),
        ExperimentKind::Populations | ExperimentKind::Validity => Sweep::Single,
    }
}

impl ExperimentSpec {
    pub fn preset(kind: ExperimentKind, preset: Preset) -> Self {
        match preset {
            Preset::PaperDefaults => Self {
                kind,
                n: default_n(kind),
                omega_a: DEFAULT_OMEGA_A,
                omega_ratio: DEFAULT_OMEGA_RATIO,
                omega: None,
                g: DEFAULT_G,
                delta_over_gn: DEFAULT_DELTA_OVER_GN,
                delta: None,
                sweep: default_sweep(kind),
                periods: 1.0,
                samples: None,
                charge_fraction: DEFAULT_CHARGE_FRACTION,
                ergotropy_reference: ErgotropyReference::default(),
                threshold: DEFAULT_BASELINE_THRESHOLD,
                t_char: None,
                probe: None,
            },
        }
    }

    /// Preset, then config file, then overrides; validated.
    pub fn resolve(
        kind: ExperimentKind,
        preset: Preset,
        config: &ConfigFile,
        overrides: &Overrides,
    ) -> Result<Self, CliError> {
        let mut s = Self::preset(kind, preset);
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = config.$field { s.$field = v; } )* };
        }
        take!(n, omega_a, omega_ratio, g, delta_over_gn, periods, charge_fraction, ergotropy_reference, threshold);
        s.omega = config.omega.or(s.omega);
        s.delta = config.delta.or(s.delta);
        s.samples = overrides.samples.or(config.samples);
        s.t_char = config.t_char;
        if let Some(r) = overrides.ergotropy_reference {
            s.ergotropy_reference = r;
        }

        let misplaced = |field: &str| CliError::Config(format!("`{field}` does not apply to {}", kind.name()));
        s.sweep = match (kind, &s.sweep) {
            (ExperimentKind::CompareOmega, _) => {
                Sweep::OmegaA(config.omega_a_values.clone().unwrap_or_else(|| vec![10.0, 5.0, 1.0]))
            }
            (ExperimentKind::CompareDelta, _) => {
                Sweep::DeltaMultiplier(config.delta_multipliers.clone().unwrap_or_else(|| vec![10.0, 5.0, 1.0]))
            }
            (ExperimentKind::ChargingSweep | ExperimentKind::Baselines, Sweep::N(default)) => {
                Sweep::N(config.n_values.clone().unwrap_or_else(|| default.clone()))
            }
            (_, sweep) => sweep.clone(),
        };
        if config.omega_a_values.is_some() && kind != ExperimentKind::CompareOmega {
            return Err(misplaced("omega_a_values"));
        }
        if config.delta_multipliers.is_some() && kind != ExperimentKind::CompareDelta {
            return Err(misplaced("delta_multipliers"));
        }
        if config.n_values.is_some() && !matches!(kind, ExperimentKind::ChargingSweep | ExperimentKind::Baselines) {
            return Err(misplaced("n_values"));
        }

        let probe_requested = overrides.breakdown_probe || config.breakdown_probe.unwrap_or(false);
        if probe_requested {
            if kind != ExperimentKind::ChargingSweep {
                return Err(misplaced("breakdown_probe"));
            }
            s.probe = Some(Probe {
                step: config.probe_step.unwrap_or(DEFAULT_PROBE_STEP),
                max_n: config.probe_max_n.unwrap_or(DEFAULT_PROBE_MAX_N),
            });
        }

        s.validate()?;
        Ok(s)
    }

    /// Model parameters for `n` chargers at the base settings.
    pub fn params_for(&self, n: u32) -> ModelParams {
        let omega = self.omega.unwrap_or(self.omega_ratio * self.omega_a);
        let delta = self.delta.unwrap_or(self.delta_over_gn * self.g * n as f64);
        ModelParams { n, omega_a: self.omega_a, omega, g: self.g, delta }
    }

    /// One labelled parameter set per sweep point (the separable baselines
    /// have no superabsorption parameters and yield none).
    pub fn points(&self) -> Vec<(f64, ModelParams)> {
        let base = self.params_for(self.n);
        match (&self.sweep, self.kind) {
            (_, ExperimentKind::Baselines) => Vec::new(),
            (Sweep::OmegaA(values), _) => values
                .iter()
                .map(|&w| {
                    let omega = self.omega.unwrap_or(self.omega_ratio * w);
                    (w, ModelParams { omega_a: w, omega, ..base })
                })
                .collect(),
            (Sweep::DeltaMultiplier(values), _) => values.iter().map(|&m| (m, base.with_delta_over_gn(m))).collect(),
            (Sweep::N(values), _) => values.iter().map(|&n| (n as f64, self.params_for(n))).collect(),
            (Sweep::Single, _) => vec![(self.n as f64, base)],
        }
    }

    /// Time grid spanning `periods` effective periods for `params`.
    pub fn grid_for(&self, params: &ModelParams) -> Result<TimeGrid, CliError> {
        let lambda = lambda_rate(params);
        let grid = match self.samples {
            Some(samples) => TimeGrid::new(self.periods * PI / lambda, samples),
            None => TimeGrid::for_rate(lambda, params.delta, self.periods),
        };
        grid.map_err(|e| CliError::Config(e.to_string()))
    }

    /// Grid for the separable baselines: `periods` times the single-charger
    /// full-transfer time `π/(2g)`.
    pub fn baseline_grid(&self) -> Result<TimeGrid, CliError> {
        TimeGrid::new(self.periods * PI / (2.0 * self.g), self.samples.unwrap_or(DEFAULT_BASELINE_SAMPLES))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("`{name}` must be positive and finite, got {v}")))
            }
        };
        positive("periods", self.periods)?;
        positive("g", self.g)?;
        if let Some(t) = self.t_char {
            positive("t_char", t)?;
        }
        if let Some(s) = self.samples {
            if s < 2 {
                return bad(format!("`samples` must be at least 2, got {s}"));
            }
        }
        if !(0.0..=1.0).contains(&self.charge_fraction) {
            return bad(format!("`charge_fraction` must lie in [0, 1], got {}", self.charge_fraction));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("`threshold` must lie in (0, 1), got {}", self.threshold));
        }

        match &self.sweep {
            Sweep::OmegaA(v) | Sweep::DeltaMultiplier(v) if v.is_empty() => return bad("sweep list is empty".into()),
            Sweep::N(v) if v.is_empty() => return bad("`n_values` is empty".into()),
            Sweep::N(v) => {
                if let Some(n) = v.iter().find(|n| *n % 2 == 0) {
                    return bad(format!("N values must be odd, got {n}"));
                }
                let mut sorted = v.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != v.len() {
                    return bad("`n_values` contains duplicates".into());
                }
            }
            _ => {}
        }

        if self.kind == ExperimentKind::Baselines {
            return Ok(());
        }
        for (_, p) in self.points() {
            p.validate()?;
            if self.kind == ExperimentKind::ChargingSweep
                && self.ergotropy_reference == ErgotropyReference::Stored
                && p.eps1() >= self.charge_fraction * p.eps2()
            {
                return bad(format!(
                    "N = {}: initial ergotropy eps1 = {} already meets the threshold {} x eps2 = {}",
                    p.n,
                    p.eps1(),
                    self.charge_fraction,
                    self.charge_fraction * p.eps2()
                ));
            }
            let margins = resonance_margins(&p);
            if margins.min_margin() < MARGIN_WARNING {
                log::warn!(
                    "N = {}: a resonance root lies within {:.4} of a ladder level (mu = {:?})",
                    p.n,
                    margins.min_margin(),
                    margins.mu
                );
            }
        }
        if let Some(probe) = self.probe {
            let Sweep::N(values) = &self.sweep else { unreachable!("probe is only set for charging-sweep") };
            if probe.step == 0 || probe.step % 2 == 1 {
                return bad(format!("`probe_step` must be a positive even number, got {}", probe.step));
            }
            let last = *values.iter().max().unwrap();
            if probe.max_n <= last {
                return bad(format!("`probe_max_n` ({}) must exceed the largest swept N ({last})", probe.max_n));
            }
        }
        Ok(())
    }
}
