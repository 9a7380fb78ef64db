//! Hamiltonian builders and initial states for the charging models.
//!
//! Composite operators are laid out charger ⊗ battery with the charger as
//! the slow index. Battery qubits use the basis `(|0>, |1>)` with `σ_z|1> = |1>`;
//! the two-qubit battery basis is `|00>, |01>, |10>, |11>` with qubit 1 the
//! slow bit.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dicke::{self, collective_operator, DickeIndex, OperatorKind, TwiceM};
use crate::error::{DickeError, SimError};
use crate::linalg::{kron, ComplexMatrix, StateVector};
use crate::params::ModelParams;

/// Battery level indices in the two-qubit basis.
pub mod battery {
    pub const P00: usize = 0;
    pub const P01: usize = 1;
    pub const P10: usize = 2;
    pub const P11: usize = 3;
    /// Excited level of the single-qubit battery used by the separable model.
    pub const EXCITED: usize = 1;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Full interaction `2g(σ_x⁽¹⁾ + σ_x⁽²⁾) ⊗ J_x`, no rotating-wave approximation.
    Exact,
    /// Interaction reduced to `g(A + A†)`.
    Rwa,
    /// Two-state effective coupling at rate λ.
    Effective,
    /// N two-level chargers coupled resonantly to one battery qubit.
    Separable,
}

/// A Hamiltonian on charger ⊗ battery plus the battery Hamiltonian used for
/// energy bookkeeping.
#[derive(Clone, Debug)]
pub struct BuiltModel {
    pub h_total: ComplexMatrix,
    pub h_battery: ComplexMatrix,
    pub dims: [usize; 2],
    pub kind: ModelKind,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap()
}

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])
}

fn on_qubit1(op: &ComplexMatrix) -> ComplexMatrix {
    kron(op, &ComplexMatrix::identity(2))
}

fn on_qubit2(op: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(2), op)
}

fn charger_op(n: u32, kind: OperatorKind) -> ComplexMatrix {
    collective_operator(n, kind).expect("validated parameters have odd N >= 3")
}

/// Flat index of `|M>_C ⊗ |b>_B`.
pub fn composite_index(n: u32, twice_m: TwiceM, battery_level: usize) -> Result<usize, DickeError> {
    Ok(DickeIndex::new(n, twice_m)?.basis_index() * 4 + battery_level)
}

/// `H_N = ω_A J_z + Ω J_z²`, diagonal with entries `E_M`.
pub fn charger_hamiltonian(params: &ModelParams) -> ComplexMatrix {
    let diag: Vec<f64> =
        (0..=params.n as usize).map(|i| params.charger_energy(dicke::twice_m_at(params.n, i).value())).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// `H_B = (ε₁/2)σ_z⁽¹⁾ + (ε₂/2)σ_z⁽²⁾`.
pub fn battery_hamiltonian(params: &ModelParams) -> ComplexMatrix {
    let (e1, e2) = (params.eps1(), params.eps2());
    ComplexMatrix::from_real_diagonal(&[-(e1 + e2) / 2.0, (-e1 + e2) / 2.0, (e1 - e2) / 2.0, (e1 + e2) / 2.0])
}

fn battery_sigma_x_sum() -> ComplexMatrix {
    &on_qubit1(&sigma_x()) + &on_qubit2(&sigma_x())
}

fn battery_sigma_plus_sum() -> ComplexMatrix {
    &on_qubit1(&sigma_plus()) + &on_qubit2(&sigma_plus())
}

/// `H_I = 2g(σ_x⁽¹⁾ + σ_x⁽²⁾) ⊗ J_x`.
pub fn interaction_exact(params: &ModelParams) -> ComplexMatrix {
    let jx = charger_op(params.n, OperatorKind::Jx);
    kron(&jx, &battery_sigma_x_sum()).scale_real(2.0 * params.g)
}

/// The rotating-wave part `A = (σ₊⁽¹⁾ + σ₊⁽²⁾)(J_{+1} + J_{−2})`.
pub fn rwa_lowering_part(params: &ModelParams) -> ComplexMatrix {
    let j = &charger_op(params.n, OperatorKind::Jplus1) + &charger_op(params.n, OperatorKind::Jminus2);
    kron(&j, &battery_sigma_plus_sum())
}

/// `H_I ≃ g(A + A†)`.
pub fn interaction_rwa(params: &ModelParams) -> ComplexMatrix {
    let a = rwa_lowering_part(params);
    (&a + &a.adjoint()).scale_real(params.g)
}

/// Effective two-photon rate `λ = g²·√(a_{1/2}·a_{3/2})/δ`.
pub fn lambda_rate(params: &ModelParams) -> f64 {
    let a_half = dicke::ladder_coeff(params.n, TwiceM::HALF).expect("N >= 3");
    let a_three_halves = dicke::ladder_coeff(params.n, TwiceM::THREE_HALVES).expect("N >= 3");
    params.g * params.g * (a_half * a_three_halves).sqrt() / params.delta
}

/// `λ(L̃₊ + L̃₋)` with `L̃₊ = σ₊⁽²⁾σ₋⁽¹⁾ |3/2><−1/2|`, on the full 4(N+1) space.
pub fn effective_hamiltonian(params: &ModelParams) -> ComplexMatrix {
    let dim = 4 * (params.n as usize + 1);
    let from = composite_index(params.n, TwiceM::MINUS_HALF, battery::P10).expect("N >= 3");
    let to = composite_index(params.n, TwiceM::THREE_HALVES, battery::P01).expect("N >= 3");
    let lambda = real(lambda_rate(params));
    let mut h = ComplexMatrix::zeros(dim, dim);
    h[(to, from)] = lambda;
    h[(from, to)] = lambda;
    h
}

/// `H_N ⊗ I + I ⊗ H_B`.
fn free_hamiltonian(params: &ModelParams) -> ComplexMatrix {
    let dc = params.n as usize + 1;
    &kron(&charger_hamiltonian(params), &ComplexMatrix::identity(4))
        + &kron(&ComplexMatrix::identity(dc), &battery_hamiltonian(params))
}

/// Build one of the superabsorption models. The effective model carries only
/// its coupling (interaction picture); populations are frame independent.
pub fn build_model(params: &ModelParams, kind: ModelKind) -> Result<BuiltModel, SimError> {
    params.validate()?;
    let h_total = match kind {
        ModelKind::Exact => &free_hamiltonian(params) + &interaction_exact(params),
        ModelKind::Rwa => &free_hamiltonian(params) + &interaction_rwa(params),
        ModelKind::Effective => effective_hamiltonian(params),
        ModelKind::Separable => return Ok(separable_model_hamiltonian(params.n, params.g, params.omega_a)),
    };
    Ok(BuiltModel { h_total, h_battery: battery_hamiltonian(params), dims: [params.n as usize + 1, 4], kind })
}

/// Conventional charging with N two-level chargers and one battery qubit:
/// `ω_A J_z + (ω_A/2)σ_z + g(σ₊ ⊗ J₋ + σ₋ ⊗ J₊)` (battery factor written second).
pub fn separable_model_hamiltonian(n: u32, g: f64, omega_a: f64) -> BuiltModel {
    assert!(n >= 1, "separable model needs at least one charger");
    let dc = n as usize + 1;
    let jz = collective_operator(n, OperatorKind::Jz).unwrap();
    let jp = collective_operator(n, OperatorKind::Jplus).unwrap();
    let sp = sigma_plus();
    let h_b = sigma_z().scale_real(omega_a / 2.0);
    let h_n = jz.scale_real(omega_a);
    let coupling = &kron(&jp.adjoint(), &sp) + &kron(&jp, &sp.adjoint());
    let h_total = &(&kron(&h_n, &ComplexMatrix::identity(2)) + &kron(&ComplexMatrix::identity(dc), &h_b))
        + &coupling.scale_real(g);
    BuiltModel { h_total, h_battery: h_b, dims: [dc, 2], kind: ModelKind::Separable }
}

/// `|N/2>_C|0>_B` for the separable model.
pub fn separable_initial_state(n: u32) -> StateVector {
    StateVector::basis(vec![n as usize + 1, 2], 0).expect("index 0 always valid")
}

/// `|−1/2>_C|10>_B` for the superabsorption models, `|N/2>_C|0>_B` for the
/// separable one.
pub fn initial_state(params: &ModelParams, kind: ModelKind) -> Result<StateVector, SimError> {
    match kind {
        ModelKind::Separable => Ok(separable_initial_state(params.n)),
        ModelKind::Exact | ModelKind::Rwa | ModelKind::Effective => {
            let idx = composite_index(params.n, TwiceM::MINUS_HALF, battery::P10)?;
            Ok(StateVector::basis(vec![params.n as usize + 1, 4], idx)?)
        }
    }
}

/// Battery excited population `sin²(gt)` of the single three-level charger.
pub fn baseline_single_population(g: f64, t: f64) -> f64 {
    (g * t).sin().powi(2)
}

/// Battery excited population `sin²(√N g t)` with N separable chargers.
pub fn baseline_separable_population(n: u32, g: f64, t: f64) -> f64 {
    ((n as f64).sqrt() * g * t).sin().powi(2)
}

/// Exact superabsorption Hamiltonian on the 2^N ⊗ 4 space, assembled from
/// single-qubit operators. Test oracle; N ≤ 9.
pub fn full_space_exact_model(params: &ModelParams) -> Result<BuiltModel, SimError> {
    params.validate()?;
    let n = params.n;
    let jz = dicke::full_space_operator(n, OperatorKind::Jz)?;
    let jx = dicke::full_space_operator(n, OperatorKind::Jx)?;
    let dim = 1usize << n;
    let h_n = &jz.scale_real(params.omega_a) + &(&jz * &jz).scale_real(params.omega);
    let h_b = battery_hamiltonian(params);
    let h_total = &(&kron(&h_n, &ComplexMatrix::identity(4)) + &kron(&ComplexMatrix::identity(dim), &h_b))
        + &kron(&jx, &battery_sigma_x_sum()).scale_real(2.0 * params.g);
    Ok(BuiltModel { h_total, h_battery: h_b, dims: [dim, 4], kind: ModelKind::Exact })
}

/// `|−1/2>` (symmetric superposition) ⊗ `|10>` on the 2^N ⊗ 4 space.
pub fn full_space_initial_state(params: &ModelParams) -> Result<StateVector, SimError> {
    let charger = dicke::dicke_state_full(params.n, TwiceM::MINUS_HALF)?;
    let mut b = [C64::default(); 4];
    b[battery::P10] = real(1.0);
    Ok(StateVector::product(charger.amplitudes(), &b))
}
