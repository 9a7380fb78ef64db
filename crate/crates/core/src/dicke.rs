//! Collective spin operators on the fully symmetric (J = N/2) subspace.
//!
//! Basis states `|M>` are ordered by `M` descending, so index 0 is
//! `|N/2>` and index `N` is `|-N/2>`. Half-integer `M` values are carried as
//! the exact integer `2M` ([`TwiceM`]).
//!
//! The `full_space_*` functions build the same operators on the 2^N
//! computational space from single-qubit embeddings. They exist as an
//! independent oracle for the Dicke-basis construction and are limited to
//! small N.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::DickeError;
use crate::linalg::{kron, ComplexMatrix, StateVector};
use crate::params::ModelParams;

/// Twice a (half-)integer magnetic quantum number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TwiceM(pub i64);

impl TwiceM {
    pub const HALF: TwiceM = TwiceM(1);
    pub const MINUS_HALF: TwiceM = TwiceM(-1);
    pub const THREE_HALVES: TwiceM = TwiceM(3);

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

/// A Dicke state label `|N/2, M>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DickeIndex {
    n: u32,
    twice_m: TwiceM,
}

impl DickeIndex {
    /// Any `N ≥ 1` with `|M| ≤ N/2` and `2M ≡ N (mod 2)`.
    pub fn new(n: u32, twice_m: TwiceM) -> Result<Self, DickeError> {
        if n == 0 {
            return Err(DickeError::NoQubits);
        }
        let tm = twice_m.0;
        if tm.abs() > n as i64 || (tm - n as i64).rem_euclid(2) != 0 {
            return Err(DickeError::InvalidIndex { n, twice_m: tm });
        }
        Ok(Self { n, twice_m })
    }

    /// Position in the M-descending basis.
    pub fn basis_index(self) -> usize {
        ((self.n as i64 - self.twice_m.0) / 2) as usize
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn twice_m(self) -> TwiceM {
        self.twice_m
    }

    /// Number of excited qubits, `N/2 + M`.
    pub fn excitations(self) -> u32 {
        ((self.n as i64 + self.twice_m.0) / 2) as u32
    }
}

/// `2M` of the basis state at `index`.
pub fn twice_m_at(n: u32, index: usize) -> TwiceM {
    TwiceM(n as i64 - 2 * index as i64)
}

/// Ladder coefficient `a_M = (N/2 + M)(N/2 − M + 1)`, so `J₊|M−1> = √a_M |M>`.
///
/// Defined for `M ∈ {−N/2+1, …, N/2}`.
pub fn ladder_coeff(n: u32, twice_m: TwiceM) -> Result<f64, DickeError> {
    let idx = DickeIndex::new(n, twice_m)?;
    if twice_m.0 == -(n as i64) {
        return Err(DickeError::InvalidIndex { n, twice_m: twice_m.0 });
    }
    Ok(ladder_coeff_unchecked(idx.n, idx.twice_m))
}

fn ladder_coeff_unchecked(n: u32, twice_m: TwiceM) -> f64 {
    // (N + 2M)(N − 2M + 2) / 4, exact in integers
    let n = n as i64;
    let tm = twice_m.0;
    ((n + tm) * (n - tm + 2)) as f64 / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Jz,
    Jplus,
    Jminus,
    Jx,
    /// Raising part with target `M ≥ 3/2`.
    Jplus1,
    Jminus1,
    /// Raising part with target `M ≤ 1/2`.
    Jplus2,
    Jminus2,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::Jz,
        OperatorKind::Jplus,
        OperatorKind::Jminus,
        OperatorKind::Jx,
        OperatorKind::Jplus1,
        OperatorKind::Jminus1,
        OperatorKind::Jplus2,
        OperatorKind::Jminus2,
    ];

    fn needs_odd_n(self) -> bool {
        matches!(self, OperatorKind::Jplus1 | OperatorKind::Jminus1 | OperatorKind::Jplus2 | OperatorKind::Jminus2)
    }
}

/// Which raising transitions `|M−1> → |M>` a ladder operator keeps.
#[derive(Clone, Copy)]
enum LadderPart {
    All,
    Upper,
    Lower,
}

impl LadderPart {
    fn keeps(self, target: TwiceM) -> bool {
        match self {
            LadderPart::All => true,
            LadderPart::Upper => target.0 >= 3,
            LadderPart::Lower => target.0 <= 1,
        }
    }
}

fn raising(n: u32, part: LadderPart) -> ComplexMatrix {
    let dim = n as usize + 1;
    let mut m = ComplexMatrix::zeros(dim, dim);
    // row i holds |M>, column i+1 holds |M−1>
    for i in 0..(dim - 1) {
        let target = twice_m_at(n, i);
        if part.keeps(target) {
            m[(i, i + 1)] = C64::new(ladder_coeff_unchecked(n, target).sqrt(), 0.0);
        }
    }
    m
}

/// Collective operator on the (N+1)-dimensional Dicke basis.
pub fn collective_operator(n: u32, kind: OperatorKind) -> Result<ComplexMatrix, DickeError> {
    if n == 0 {
        return Err(DickeError::NoQubits);
    }
    if kind.needs_odd_n() && n.is_multiple_of(2) {
        return Err(DickeError::EvenQubitCount(n));
    }
    let m = match kind {
        OperatorKind::Jz => {
            let diag: Vec<f64> = (0..=n as usize).map(|i| twice_m_at(n, i).value()).collect();
            ComplexMatrix::from_real_diagonal(&diag)
        }
        OperatorKind::Jplus => raising(n, LadderPart::All),
        OperatorKind::Jminus => raising(n, LadderPart::All).adjoint(),
        OperatorKind::Jx => {
            let up = raising(n, LadderPart::All);
            (&up + &up.adjoint()).scale_real(0.5)
        }
        OperatorKind::Jplus1 => raising(n, LadderPart::Upper),
        OperatorKind::Jminus1 => raising(n, LadderPart::Upper).adjoint(),
        OperatorKind::Jplus2 => raising(n, LadderPart::Lower),
        OperatorKind::Jminus2 => raising(n, LadderPart::Lower).adjoint(),
    };
    Ok(m)
}

/// `J_y = (J₊ − J₋)/2i`.
pub fn collective_jy(n: u32) -> Result<ComplexMatrix, DickeError> {
    let up = collective_operator(n, OperatorKind::Jplus)?;
    let diff = &up - &up.adjoint();
    Ok(diff.scale(C64::new(0.0, -0.5)))
}

/// Largest N accepted by the full-space oracle.
pub const FULL_SPACE_MAX_N: u32 = 9;

fn check_full_space(n: u32) -> Result<(), DickeError> {
    if n == 0 {
        return Err(DickeError::NoQubits);
    }
    if n > FULL_SPACE_MAX_N {
        return Err(DickeError::TooLarge { n, max: FULL_SPACE_MAX_N });
    }
    Ok(())
}

/// Qubit `k` (0 = most significant bit) of computational index `x` is excited
/// when that bit is 0, so index 0 is `|11…1>`.
fn qubit_excited(n: u32, x: usize, k: u32) -> bool {
    (x >> (n - 1 - k)) & 1 == 0
}

fn embed_single(n: u32, k: u32, op: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let mut acc = ComplexMatrix::identity(1);
    for q in 0..n {
        acc = kron(&acc, if q == k { op } else { &id });
    }
    acc
}

fn single_qubit(kind: OperatorKind) -> ComplexMatrix {
    // basis (|1>, |0>)
    match kind {
        OperatorKind::Jz => ComplexMatrix::from_real_diagonal(&[0.5, -0.5]),
        OperatorKind::Jplus => ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap(),
        OperatorKind::Jminus => ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap(),
        OperatorKind::Jx => ComplexMatrix::from_real(2, 2, &[0.0, 0.5, 0.5, 0.0]).unwrap(),
        _ => unreachable!("split operators are not single-qubit sums"),
    }
}

/// Projector onto computational states with `2·J_z` in the given range.
fn weight_projector(n: u32, keep: impl Fn(i64) -> bool) -> ComplexMatrix {
    let dim = 1usize << n;
    let diag: Vec<f64> = (0..dim)
        .map(|x| {
            let excited = (0..n).filter(|&k| qubit_excited(n, x, k)).count() as i64;
            let twice_m = 2 * excited - n as i64;
            if keep(twice_m) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// Collective operator on the full 2^N space, as a sum of single-qubit terms.
///
/// `J_{+1}` and `J_{+2}` are `J₊` restricted to sources with `2M ≥ 1` and
/// `2M ≤ −1` respectively (`J_z` is diagonal in the computational basis).
pub fn full_space_operator(n: u32, kind: OperatorKind) -> Result<ComplexMatrix, DickeError> {
    check_full_space(n)?;
    if kind.needs_odd_n() && n.is_multiple_of(2) {
        return Err(DickeError::EvenQubitCount(n));
    }
    let sum_of = |k: OperatorKind| {
        let single = single_qubit(k);
        let dim = 1usize << n;
        (0..n).fold(ComplexMatrix::zeros(dim, dim), |acc, q| &acc + &embed_single(n, q, &single))
    };
    let m = match kind {
        OperatorKind::Jz | OperatorKind::Jplus | OperatorKind::Jminus | OperatorKind::Jx => sum_of(kind),
        OperatorKind::Jplus1 => &sum_of(OperatorKind::Jplus) * &weight_projector(n, |tm| tm >= 1),
        OperatorKind::Jplus2 => &sum_of(OperatorKind::Jplus) * &weight_projector(n, |tm| tm <= -1),
        OperatorKind::Jminus1 => full_space_operator(n, OperatorKind::Jplus1)?.adjoint(),
        OperatorKind::Jminus2 => full_space_operator(n, OperatorKind::Jplus2)?.adjoint(),
    };
    Ok(m)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normalized symmetric superposition of all bitstrings with `N/2 + M`
/// excitations, on the 2^N computational space.
pub fn dicke_state_full(n: u32, twice_m: TwiceM) -> Result<StateVector, DickeError> {
    check_full_space(n)?;
    let idx = DickeIndex::new(n, twice_m)?;
    let k = idx.excitations();
    let amp = 1.0 / binomial(n, k).sqrt();
    let dim = 1usize << n;
    let amps = (0..dim)
        .map(|x| {
            let weight = (0..n).filter(|&q| qubit_excited(n, x, q)).count() as u32;
            C64::new(if weight == k { amp } else { 0.0 }, 0.0)
        })
        .collect();
    Ok(StateVector::new(vec![dim], amps).expect("dimension is 2^N"))
}

/// Isometry `P` (2^N × (N+1)) whose columns are the Dicke states, M descending.
pub fn symmetric_isometry(n: u32) -> Result<ComplexMatrix, DickeError> {
    check_full_space(n)?;
    let dim = 1usize << n;
    let mut p = ComplexMatrix::zeros(dim, n as usize + 1);
    for col in 0..=n as usize {
        let state = dicke_state_full(n, twice_m_at(n, col))?;
        for (row, a) in state.amplitudes().iter().enumerate() {
            p[(row, col)] = *a;
        }
    }
    Ok(p)
}

/// Distances of the four resonance points `μ₁…μ₄` to the admissible `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceMargins {
    pub mu: [f64; 4],
    pub margins: [f64; 4],
}

impl ResonanceMargins {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Any `μ_i` lying exactly on an admissible `M`.
    pub fn has_forbidden_point(&self) -> bool {
        self.margins.contains(&0.0)
    }
}

/// Distance from `x` to the nearest element of `{−N/2, …, N/2}`.
fn distance_to_ladder(n: u32, x: f64) -> f64 {
    let half = n as f64 / 2.0;
    // candidates are half + k for integer k in [−n, 0]
    let k = (x - half).round().clamp(-(n as f64), 0.0);
    (x - (half + k)).abs()
}

pub fn resonance_margins(params: &ModelParams) -> ResonanceMargins {
    let ModelParams { n, omega_a, omega, delta, .. } = *params;
    let abs_omega = omega.abs();
    let mu = [
        0.5 * ((2.0 * omega_a + delta) / abs_omega + 1.0),
        0.5 * (delta / omega + 1.0),
        0.5 * (delta / abs_omega + 3.0),
        0.5 * ((delta - 2.0 * omega_a) / omega - 1.0),
    ];
    let margins = mu.map(|m| distance_to_ladder(n, m));
    ResonanceMargins { mu, margins }
}
