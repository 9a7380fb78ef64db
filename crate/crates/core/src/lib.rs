//! Simulation of a two-qubit quantum battery charged by a collective
//! N-qubit charger through superabsorption.
//!
//! The charger lives in the symmetric Dicke subspace (dimension N+1) and the
//! battery is two qubits, so every composite state has dimension 4(N+1).
//! Dynamics are exact: each Hamiltonian is diagonalized once and states are
//! propagated by phase factors.

pub mod dicke;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod params;

pub use num_complex::Complex64;

pub use dicke::{OperatorKind, ResonanceMargins, TwiceM};
pub use dynamics::{evolve, first_passage, Evolver, TimeGrid, TimeSeries};
pub use error::{DickeError, LinalgError, ParamError, SimError};
pub use linalg::{ComplexMatrix, DensityMatrix, StateVector};
pub use models::{BuiltModel, ModelKind};
pub use observables::{ChargingResult, ErgotropyReference, ScalingFit, ValidityReport};
pub use params::ModelParams;
