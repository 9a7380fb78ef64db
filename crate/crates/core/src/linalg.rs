//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here works on row-major `Complex64` storage. Composite spaces
//! follow a fixed ordering: the charger index is the slow (outer) index and
//! the battery index is the fast (inner) one, so the amplitude of
//! `|c>_C ⊗ |b>_B` lives at `c * d_B + b`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::LinalgError;

/// Relative tolerance used to decide whether a matrix is Hermitian.
pub const HERMITIAN_RTOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows * cols != data.len() {
            return Err(LinalgError::ShapeMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self, LinalgError> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|ket><bra|` as a matrix.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        let mut m = Self::zeros(ket.len(), bra.len());
        for (i, k) in ket.iter().enumerate() {
            for (j, b) in bra.iter().enumerate() {
                m[(i, j)] = k * b.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a - b|` entrywise. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Number of entries with nonzero modulus.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|z| z.norm() != 0.0).count()
    }

    /// `max |H - H†|`, the quantity checked by [`is_hermitian`](Self::is_hermitian).
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_defect() <= HERMITIAN_RTOL * self.max_abs()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                expected: format!("rhs with {} rows", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::ShapeMismatch {
                expected: format!("vector of length {}", self.cols),
                found: format!("length {}", v.len()),
            });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self, LinalgError> {
        Ok(&self.matmul(rhs)? - &rhs.matmul(self)?)
    }

    /// `<u| self |v>`.
    pub fn expectation(&self, u: &[C64], v: &[C64]) -> Result<C64, LinalgError> {
        let hv = self.apply(v)?;
        Ok(u.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum())
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Kronecker product. Entry `(i·b.rows + k, j·b.cols + l)` is `a[i][j]·b[k][l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V·diag(f(λ))·V†`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let weights: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, w) in weights.iter().enumerate() {
                    acc += self.vectors[(i, k)] * w * self.vectors[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.spectral_map(|l| C64::new(l, 0.0))
    }
}

/// Iteration budget per dimension handed to the tridiagonal QR sweeps.
const EIG_ITERATIONS_PER_DIM: usize = 60;

/// Hermitian eigendecomposition.
///
/// Eigenvalues come back ascending, ties kept in the solver's order. Each
/// eigenvector's global phase is fixed so that its largest-magnitude
/// component (first one on ties) is real and positive.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare { rows: h.rows, cols: h.cols });
    }
    let scale = h.max_abs();
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_RTOL * scale {
        return Err(LinalgError::NotHermitian { defect, scale });
    }
    let n = h.rows;
    if n == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    // Symmetrize exactly so the solver sees a Hermitian input.
    let mut sym = h.to_nalgebra();
    for i in 0..n {
        sym[(i, i)] = C64::new(sym[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (sym[(i, j)] + sym[(j, i)].conj()) * 0.5;
            sym[(i, j)] = avg;
            sym[(j, i)] = avg.conj();
        }
    }
    let max_iter = EIG_ITERATIONS_PER_DIM * n;
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, max_iter)
        .ok_or(LinalgError::NoConvergence { iterations: max_iter })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            let m = z.norm();
            // strict comparison keeps the first index on exact ties
            if m > best * (1.0 + 1e-12) {
                best = m;
                pivot = i;
            }
        }
        let phase = v[pivot].conj() / v[pivot].norm();
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase / norm;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// `exp(−i·h·t)` through the spectral decomposition of `h`.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = eig_hermitian(h)?;
    Ok(eig.spectral_map(|l| C64::from_polar(1.0, -l * t)))
}

/// Pure state on a bipartite (or single) space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != amplitudes.len() {
            return Err(LinalgError::ShapeMismatch {
                expected: format!("{total} amplitudes for dims {dims:?}"),
                found: format!("{} amplitudes", amplitudes.len()),
            });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Basis vector `|index>` on the given dims.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self, LinalgError> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(LinalgError::IndexOutOfRange { index, dim: total });
        }
        let mut amplitudes = vec![ZERO; total];
        amplitudes[index] = ONE;
        Self::new(dims, amplitudes)
    }

    /// `a ⊗ b`, with `a` as the slow index.
    pub fn product(a: &[C64], b: &[C64]) -> Self {
        let amplitudes = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self { dims: vec![a.len(), b.len()], amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Density matrix of a (sub)system.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

/// Trace, Hermiticity and positivity slack for a valid density matrix.
pub const DENSITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare { rows: matrix.rows, cols: matrix.cols });
        }
        let scale = matrix.max_abs();
        let defect = matrix.hermitian_defect();
        if defect > HERMITIAN_RTOL * scale.max(1.0) {
            return Err(LinalgError::NotHermitian { defect, scale });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(LinalgError::InvalidDensity(format!("trace {tr}")));
        }
        let min_ev = eig_hermitian(&matrix)?.values.first().copied().unwrap_or(0.0);
        if min_ev < -DENSITY_TOL {
            return Err(LinalgError::InvalidDensity(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &[C64]) -> Result<Self, LinalgError> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self, LinalgError> {
        Self::new(ComplexMatrix::from_real_diagonal(populations))
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        Ok(eig_hermitian(&self.matrix)?.values)
    }
}

/// Trace out the first (charger) factor of a bipartite pure state.
///
/// `ρ[b][b'] = Σ_c ψ[c,b]·conj(ψ[c,b'])`.
pub fn partial_trace_first(psi: &StateVector) -> Result<DensityMatrix, LinalgError> {
    let [d_c, d_b] = psi.dims[..] else {
        return Err(LinalgError::ShapeMismatch {
            expected: "two subsystem dims".into(),
            found: format!("{:?}", psi.dims),
        });
    };
    let mut rho = ComplexMatrix::zeros(d_b, d_b);
    for c in 0..d_c {
        let block = &psi.amplitudes[c * d_b..(c + 1) * d_b];
        for b in 0..d_b {
            for bp in b..d_b {
                rho[(b, bp)] += block[b] * block[bp].conj();
            }
        }
    }
    for b in 0..d_b {
        for bp in (b + 1)..d_b {
            rho[(bp, b)] = rho[(b, bp)].conj();
        }
    }
    Ok(DensityMatrix::new_unchecked(rho))
}

/// Reduced 4×4 state of the two-qubit battery.
pub fn reduce_to_battery(psi: &StateVector) -> Result<DensityMatrix, LinalgError> {
    match psi.dims[..] {
        [_, 4] => partial_trace_first(psi),
        _ => Err(LinalgError::ShapeMismatch { expected: "dims [d_C, 4]".into(), found: format!("{:?}", psi.dims) }),
    }
}
