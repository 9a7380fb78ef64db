//! Spectral time evolution and battery population traces.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::linalg::{eig_hermitian, partial_trace_first, DensityMatrix, EigenDecomposition, StateVector};
use crate::models::BuiltModel;

/// Samples per effective half-period `π/(2λ)` in default grids.
pub const SAMPLES_PER_HALF_PERIOD: usize = 2000;
/// Default grids keep `spacing · δ` at or below this.
pub const MAX_SPACING_TIMES_DELTA: f64 = 0.1;

/// Uniform grid on `[0, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, samples: usize) -> Result<Self, SimError> {
        let g = Self { t_end, samples };
        g.validate()?;
        Ok(g)
    }

    /// `periods` effective periods `π/λ`, sampled at least
    /// [`SAMPLES_PER_HALF_PERIOD`] times per `π/(2λ)` and finely enough that
    /// the spacing stays below `0.1/δ`.
    pub fn for_rate(lambda: f64, delta: f64, periods: f64) -> Result<Self, SimError> {
        let half_period = PI / (2.0 * lambda);
        let t_end = periods * 2.0 * half_period;
        let by_rate = (t_end / half_period * SAMPLES_PER_HALF_PERIOD as f64).ceil();
        let by_ripple = (t_end * delta / MAX_SPACING_TIMES_DELTA).ceil();
        Self::new(t_end, by_rate.max(by_ripple) as usize + 1)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(SimError::InvalidGrid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.samples < 2 {
            return Err(SimError::InvalidGrid(format!("need at least 2 samples, got {}", self.samples)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.t_end / (self.samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        // exact endpoints
        if k + 1 == self.samples {
            self.t_end
        } else {
            k as f64 * self.spacing()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.time(k)).collect()
    }
}

/// Sampled battery trajectory.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// `populations[level][sample]`, levels in battery basis order.
    pub populations: Vec<Vec<f64>>,
    /// Reduced battery states, one per sample.
    pub battery: Vec<DensityMatrix>,
    /// Filled by [`crate::observables::fill_ergotropy`]; empty until then.
    pub ergotropy: Vec<f64>,
    /// Full states, kept only when requested.
    pub states: Option<Vec<StateVector>>,
    /// Largest `| ‖ψ(t)‖ − 1 |` seen along the trajectory.
    pub max_norm_error: f64,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel(&self, level: usize) -> &[f64] {
        &self.populations[level]
    }

    pub fn battery_dim(&self) -> usize {
        self.populations.len()
    }
}

/// Reusable spectral propagator for one model.
pub struct Evolver {
    dims: [usize; 2],
    eig: EigenDecomposition,
    /// Eigenvectors stored as contiguous rows.
    rows: Vec<Vec<C64>>,
}

impl Evolver {
    pub fn new(model: &BuiltModel) -> Result<Self, SimError> {
        let eig = eig_hermitian(&model.h_total)?;
        let n = eig.dim();
        let rows = (0..n).map(|k| eig.vectors.column(k)).collect();
        Ok(Self { dims: model.dims, eig, rows })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    fn check(&self, psi0: &StateVector) -> Result<(), SimError> {
        if psi0.dims() != self.dims {
            return Err(SimError::DimensionMismatch { state: psi0.dims().to_vec(), model: self.dims.to_vec() });
        }
        Ok(())
    }

    /// Nonzero overlaps `<v_k|ψ₀>`.
    fn overlaps(&self, psi0: &StateVector) -> Vec<(usize, C64)> {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.iter().zip(psi0.amplitudes()).map(|(a, b)| a.conj() * b).sum::<C64>()))
            .filter(|(_, c)| *c != C64::default())
            .collect()
    }

    fn state_from(&self, overlaps: &[(usize, C64)], t: f64) -> StateVector {
        let mut amps = vec![C64::default(); self.eig.dim()];
        for &(k, c) in overlaps {
            let w = c * C64::from_polar(1.0, -self.eig.values[k] * t);
            for (a, v) in amps.iter_mut().zip(&self.rows[k]) {
                *a += w * v;
            }
        }
        StateVector::new(self.dims.to_vec(), amps).expect("dims checked")
    }

    /// `exp(−iHt)|ψ₀>`.
    pub fn state_at(&self, psi0: &StateVector, t: f64) -> Result<StateVector, SimError> {
        self.check(psi0)?;
        Ok(self.state_from(&self.overlaps(psi0), t))
    }

    pub fn evolve(&self, psi0: &StateVector, grid: &TimeGrid, retain_states: bool) -> Result<TimeSeries, SimError> {
        grid.validate()?;
        self.check(psi0)?;
        let overlaps = self.overlaps(psi0);
        let d_b = self.dims[1];
        let times = grid.times();
        let mut populations = vec![Vec::with_capacity(times.len()); d_b];
        let mut battery = Vec::with_capacity(times.len());
        let mut states = retain_states.then(|| Vec::with_capacity(times.len()));
        let mut max_norm_error = 0.0_f64;
        for &t in &times {
            let psi = self.state_from(&overlaps, t);
            max_norm_error = max_norm_error.max((psi.norm() - 1.0).abs());
            let rho = partial_trace_first(&psi)?;
            for (level, p) in rho.populations().into_iter().enumerate() {
                populations[level].push(p);
            }
            battery.push(rho);
            if let Some(s) = states.as_mut() {
                s.push(psi);
            }
        }
        Ok(TimeSeries { times, populations, battery, ergotropy: Vec::new(), states, max_norm_error })
    }
}

/// Evolve `psi0` under `model` over `grid` with one eigendecomposition.
pub fn evolve(model: &BuiltModel, psi0: &StateVector, grid: &TimeGrid) -> Result<TimeSeries, SimError> {
    if psi0.dims() != model.dims {
        return Err(SimError::DimensionMismatch { state: psi0.dims().to_vec(), model: model.dims.to_vec() });
    }
    Evolver::new(model)?.evolve(psi0, grid, false)
}

/// First upward crossing of `threshold`, linearly interpolated between the
/// bracketing samples. A series that starts at or above the threshold
/// crosses at its first time.
pub fn first_crossing(times: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    let k = values.iter().position(|&v| v >= threshold)?;
    if k == 0 {
        return Some(times[0]);
    }
    let (t0, t1) = (times[k - 1], times[k]);
    let (v0, v1) = (values[k - 1], values[k]);
    Some(t0 + (threshold - v0) / (v1 - v0) * (t1 - t0))
}

/// First time the population of battery `level` reaches `threshold`.
pub fn first_passage(series: &TimeSeries, level: usize, threshold: f64) -> Option<f64> {
    first_crossing(&series.times, series.channel(level), threshold)
}

/// Time and value of the largest sample of `values` within `[0, t_max]`.
pub fn peak_within(times: &[f64], values: &[f64], t_max: f64) -> Option<(f64, f64)> {
    times.iter().zip(values).take_while(|(t, _)| **t <= t_max).fold(None, |best: Option<(f64, f64)>, (&t, &v)| {
        match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((t, v)),
        }
    })
}
