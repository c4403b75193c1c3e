//! Dense operator algebra on a register of spin-1/2 qubits.
//!
//! Operators act on the `2^N`-dimensional register space. Single-spin
//! operators are the spin matrices `I_ν = σ_ν / 2`; qubit 0 is the leftmost
//! tensor factor, so it owns the most significant bit of a basis index.
//! Hamiltonian entries are angular frequencies (rad/s).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest register simulated with dense matrices (4096-dimensional).
pub const MAX_QUBITS: usize = 12;
/// Hermiticity tolerance, relative to the largest entry magnitude.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Max-norm tolerance on `U†U - I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Normalization tolerance on state vectors.
pub const STATE_NORM_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'x' => Some(PauliAxis::X),
            'y' => Some(PauliAxis::Y),
            'z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    /// The Pauli matrix `σ_ν` (not halved).
    pub fn sigma(self) -> CMatrix {
        match self {
            PauliAxis::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            PauliAxis::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            PauliAxis::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    /// The spin matrix `I_ν = σ_ν / 2`.
    pub fn spin(self) -> CMatrix {
        self.sigma() * C64::new(0.5, 0.0)
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Validates the register size and returns the Hilbert-space dimension.
pub fn register_dim(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::RegisterSize(n_qubits));
    }
    Ok(1 << n_qubits)
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidParameters(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    register_dim(n)?;
    Ok(n)
}

/// Matrix of a product of spin operators `Π I_{site,axis}` on an `n`-qubit
/// register, identity on every other site. Sites must be distinct.
///
/// Every Pauli string is a phased permutation, so the matrix is filled row by
/// row in `O(2^N)`.
pub fn pauli_string_matrix(n_qubits: usize, factors: &[(usize, PauliAxis)]) -> Result<CMatrix> {
    let dim = register_dim(n_qubits)?;
    let mut flip = 0usize;
    for (k, &(site, axis)) in factors.iter().enumerate() {
        if site >= n_qubits {
            return Err(Error::SiteOutOfRange { site, n_qubits });
        }
        if factors[..k].iter().any(|&(s, _)| s == site) {
            return Err(Error::InvalidParameters(format!(
                "site {site} appears twice in a Pauli product"
            )));
        }
        if axis != PauliAxis::Z {
            flip |= 1 << (n_qubits - 1 - site);
        }
    }
    let scale = 0.5f64.powi(factors.len() as i32);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = col ^ flip;
        let mut amp = C64::new(scale, 0.0);
        for &(site, axis) in factors {
            let bit = (col >> (n_qubits - 1 - site)) & 1;
            amp *= match (axis, bit) {
                (PauliAxis::X, _) => ONE,
                // σ_y |0> = i|1>, σ_y |1> = -i|0>
                (PauliAxis::Y, 0) => I,
                (PauliAxis::Y, _) => -I,
                (PauliAxis::Z, 0) => ONE,
                (PauliAxis::Z, _) => -ONE,
            };
        }
        m[(row, col)] = amp;
    }
    Ok(m)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Dense Hermitian operator on a `2^N`-dimensional register space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity (relative tolerance [`HERMITIAN_TOL`]) and stores
    /// the exactly symmetrized matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let deviation = max_abs(&(&matrix - matrix.adjoint()));
        let scale = max_abs(&matrix);
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::from_matrix_unchecked(n_qubits, matrix))
    }

    /// Symmetrizes without checking. Callers guarantee the input is Hermitian
    /// up to roundoff.
    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: CMatrix) -> Self {
        let sym = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        Self {
            n_qubits,
            matrix: sym,
        }
    }

    pub fn zeros(n_qubits: usize) -> Result<Self> {
        let dim = register_dim(n_qubits)?;
        Ok(Self {
            n_qubits,
            matrix: CMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        let dim = register_dim(n_qubits)?;
        Ok(Self {
            n_qubits,
            matrix: CMatrix::identity(dim, dim),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Spectral norm (largest eigenvalue magnitude).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    /// Eigen-decomposition `H = V diag(λ) V†` with eigenvalues ascending.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let dim = self.dim();
        let mut vecs = CMatrix::zeros(dim, dim);
        for (dst, &src) in order.iter().enumerate() {
            vecs.set_column(dst, &eig.eigenvectors.column(src));
        }
        (order.iter().map(|&k| eig.eigenvalues[k]).collect(), vecs)
    }

    /// `tr(P H) / tr(P P)` for the Pauli product `P` built from `factors`.
    pub fn pauli_coefficient(&self, factors: &[(usize, PauliAxis)]) -> Result<f64> {
        let p = pauli_string_matrix(self.n_qubits, factors)?;
        let norm = (self.dim() as f64) / 4f64.powi(factors.len() as i32);
        let overlap: C64 = p
            .iter()
            .zip(self.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.re / norm)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix - &other.matrix,
        })
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    /// Panics on dimension mismatch; use [`HermitianOperator::try_add`] for a
    /// checked sum.
    fn add(self, rhs: Self) -> HermitianOperator {
        self.try_add(rhs).expect("operator dimensions differ")
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: Self) -> HermitianOperator {
        self.try_sub(rhs).expect("operator dimensions differ")
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;

    fn neg(self) -> HermitianOperator {
        self.scaled(-1.0)
    }
}

/// Dense unitary propagator.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl UnitaryOperator {
    /// Validates `U†U = I` within [`UNITARY_TOL`] in max-norm.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { n_qubits, matrix })
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: CMatrix) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        let dim = register_dim(n_qubits)?;
        Ok(Self {
            n_qubits,
            matrix: CMatrix::identity(dim, dim),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Max-norm of `U†U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    /// `self · rhs`: `rhs` acts first.
    pub fn then_after(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// `U^k` by binary exponentiation.
    pub fn pow(&self, mut k: u64) -> Self {
        let dim = self.dim();
        let mut acc = CMatrix::identity(dim, dim);
        let mut base = self.matrix.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &base * &acc;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Self {
            n_qubits: self.n_qubits,
            matrix: acc,
        }
    }

    /// Max-norm distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap: C64 = other
            .matrix
            .iter()
            .zip(self.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        max_abs(&(&self.matrix - &other.matrix * phase))
    }

    /// Max-norm distance to `other`, phase included.
    pub fn distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

impl Mul for &UnitaryOperator {
    type Output = UnitaryOperator;

    /// Matrix product; `rhs` acts first. Panics on dimension mismatch.
    fn mul(self, rhs: Self) -> UnitaryOperator {
        self.then_after(rhs).expect("operator dimensions differ")
    }
}

fn unitarity_deviation(m: &CMatrix) -> f64 {
    let dim = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(dim, dim)))
}

/// General dense operator, used for commutators which are anti-Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    pub n_qubits: usize,
    pub matrix: CMatrix,
}

impl Operator {
    /// Returns `i · self`, which is Hermitian when `self` is anti-Hermitian.
    pub fn times_i(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(&self.matrix * I)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }
}

/// `I_{site,axis}` on an `n_qubits` register (site is 0-based).
pub fn embed_pauli(site: usize, axis: PauliAxis, n_qubits: usize) -> Result<HermitianOperator> {
    let m = pauli_string_matrix(n_qubits, &[(site, axis)])?;
    Ok(HermitianOperator {
        n_qubits,
        matrix: m,
    })
}

/// `Π_k I_{site_k, axis_k}` on an `n_qubits` register.
pub fn embed_pauli_product(
    factors: &[(usize, PauliAxis)],
    n_qubits: usize,
) -> Result<HermitianOperator> {
    let m = pauli_string_matrix(n_qubits, factors)?;
    Ok(HermitianOperator {
        n_qubits,
        matrix: m,
    })
}

/// Single-qubit rotation `exp(-i·angle·σ_axis/2)`.
pub fn single_qubit_rotation(axis: PauliAxis, angle: f64) -> CMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    CMatrix::identity(2, 2) * C64::new(c, 0.0) + axis.sigma() * C64::new(0.0, -s)
}

/// Global rotation `exp(-i·angle·Σ_j I_{j,axis}) = u ⊗ u ⊗ … ⊗ u`.
pub fn global_rotation(axis: PauliAxis, angle: f64, n_qubits: usize) -> Result<UnitaryOperator> {
    register_dim(n_qubits)?;
    if !angle.is_finite() {
        return Err(Error::InvalidAngle(angle));
    }
    let u = single_qubit_rotation(axis, angle);
    let mut m = u.clone();
    for _ in 1..n_qubits {
        m = m.kronecker(&u);
    }
    Ok(UnitaryOperator {
        n_qubits,
        matrix: m,
    })
}

/// Sum of the spin operators along `axis` over every site.
pub fn collective(axis: PauliAxis, n_qubits: usize) -> Result<HermitianOperator> {
    let dim = register_dim(n_qubits)?;
    let mut m = CMatrix::zeros(dim, dim);
    for site in 0..n_qubits {
        m += pauli_string_matrix(n_qubits, &[(site, axis)])?;
    }
    Ok(HermitianOperator {
        n_qubits,
        matrix: m,
    })
}

/// `exp(-i H t)` for a Hermitian generator.
pub fn propagator(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidDuration(t));
    }
    Ok(UnitaryOperator {
        n_qubits: h.n_qubits,
        matrix: expm_hermitian(&h.matrix, t),
    })
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|c| (0..n).all(|r| r == c || m[(r, c)] == ZERO))
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Spectral decomposition of an exactly Hermitian matrix.
pub(crate) enum Spectral {
    Diagonal(Vec<f64>),
    Real { values: Vec<f64>, vectors: DMatrix<f64> },
    Complex { values: Vec<f64>, vectors: CMatrix },
}

impl Spectral {
    pub(crate) fn of(m: &CMatrix) -> Self {
        let n = m.nrows();
        if is_diagonal(m) {
            Spectral::Diagonal((0..n).map(|k| m[(k, k)].re).collect())
        } else if is_real(m) {
            let re = DMatrix::from_fn(n, n, |r, c| m[(r, c)].re);
            let eig = SymmetricEigen::new(re);
            Spectral::Real {
                values: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            }
        } else {
            let eig = SymmetricEigen::new(m.clone());
            Spectral::Complex {
                values: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            }
        }
    }

    /// `exp(-i H t) · acc`, written back into `acc`.
    pub(crate) fn apply_exp(&self, t: f64, acc: &mut CMatrix) {
        let phases = |vals: &[f64]| -> Vec<C64> {
            vals.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect()
        };
        match self {
            Spectral::Diagonal(vals) => {
                for (r, p) in phases(vals).into_iter().enumerate() {
                    acc.row_mut(r).iter_mut().for_each(|z| *z *= p);
                }
            }
            Spectral::Real { values, vectors } => {
                let n = vectors.nrows();
                let cols = acc.ncols();
                let ph = phases(values);
                // W = diag(phase) · Vᵀ · acc
                let mut w = CMatrix::zeros(n, cols);
                for k in 0..n {
                    for c in 0..cols {
                        let mut s = ZERO;
                        for r in 0..n {
                            s += acc[(r, c)] * vectors[(r, k)];
                        }
                        w[(k, c)] = s * ph[k];
                    }
                }
                for r in 0..n {
                    for c in 0..cols {
                        let mut s = ZERO;
                        for k in 0..n {
                            s += w[(k, c)] * vectors[(r, k)];
                        }
                        acc[(r, c)] = s;
                    }
                }
            }
            Spectral::Complex { values, vectors } => {
                let ph = phases(values);
                let mut w = vectors.adjoint() * &*acc;
                for (k, p) in ph.into_iter().enumerate() {
                    w.row_mut(k).iter_mut().for_each(|z| *z *= p);
                }
                *acc = vectors * w;
            }
        }
    }

    pub(crate) fn exp(&self, t: f64, dim: usize) -> CMatrix {
        let mut acc = CMatrix::identity(dim, dim);
        self.apply_exp(t, &mut acc);
        acc
    }
}

/// `exp(-i m t)` for an exactly Hermitian matrix.
pub(crate) fn expm_hermitian(m: &CMatrix, t: f64) -> CMatrix {
    Spectral::of(m).exp(t, m.nrows())
}

/// `U† H U`.
pub fn conjugate(h: &HermitianOperator, u: &UnitaryOperator) -> Result<HermitianOperator> {
    if h.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: u.dim(),
        });
    }
    let m = u.matrix.adjoint() * &h.matrix * &u.matrix;
    Ok(HermitianOperator::from_matrix_unchecked(h.n_qubits, m))
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<Operator> {
    a.check_same(b)?;
    Ok(Operator {
        n_qubits: a.n_qubits,
        matrix: raw_commutator(&a.matrix, &b.matrix),
    })
}

pub(crate) fn raw_commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn trace_overlap(a: &CMatrix, b: &CMatrix) -> C64 {
    // tr(A B†)
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// `|tr(U₁U₂†)|² / (|tr(U₂U₂†)|·|tr(U₁U₁†)|)`, clamped into `[0, 1]`.
pub fn fidelity(u1: &UnitaryOperator, u2: &UnitaryOperator) -> Result<f64> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch {
            left: u1.dim(),
            right: u2.dim(),
        });
    }
    Ok(raw_fidelity(&u1.matrix, &u2.matrix))
}

pub(crate) fn raw_fidelity(u1: &CMatrix, u2: &CMatrix) -> f64 {
    let num = trace_overlap(u1, u2).norm_sqr();
    let den = trace_overlap(u2, u2).norm() * trace_overlap(u1, u1).norm();
    if den == 0.0 {
        return 0.0;
    }
    (num / den).clamp(0.0, 1.0)
}

/// `|⟨ψ|U|ψ⟩|²` for a normalized state.
pub fn state_fidelity(u: &UnitaryOperator, psi: &DVector<C64>) -> Result<f64> {
    if psi.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(raw_state_fidelity(&u.matrix, psi))
}

pub(crate) fn raw_state_fidelity(u: &CMatrix, psi: &DVector<C64>) -> f64 {
    let amp = psi.dotc(&(u * psi));
    amp.norm_sqr().clamp(0.0, 1.0)
}

/// Product state `⊗_j (α|0⟩ + β|1⟩)`.
pub fn product_state(single: [C64; 2], n_qubits: usize) -> Result<DVector<C64>> {
    register_dim(n_qubits)?;
    let s = DVector::from_column_slice(&single);
    let mut v = s.clone();
    for _ in 1..n_qubits {
        v = v.kronecker(&s);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn embed_single_z() {
        let h = embed_pauli(0, PauliAxis::Z, 1).unwrap();
        let want = CMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(close(h.matrix(), &want, 0.0));
    }

    #[test]
    fn embed_x_on_second_qubit() {
        let h = embed_pauli(1, PauliAxis::X, 2).unwrap();
        let mut want = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            want[(r, c)] = C64::new(0.5, 0.0);
        }
        assert!(close(h.matrix(), &want, 0.0));
    }

    #[test]
    fn embed_matches_kronecker_products() {
        let n = 3;
        for site in 0..n {
            for axis in PauliAxis::ALL {
                let mut m = if site == 0 {
                    axis.spin()
                } else {
                    CMatrix::identity(2, 2)
                };
                for s in 1..n {
                    let f = if s == site {
                        axis.spin()
                    } else {
                        CMatrix::identity(2, 2)
                    };
                    m = m.kronecker(&f);
                }
                let h = embed_pauli(site, axis, n).unwrap();
                assert!(close(h.matrix(), &m, 0.0), "site {site} axis {axis}");
            }
        }
    }

    #[test]
    fn embed_trace_orthogonality() {
        // tr(I_{ja} I_{kb}) = 2^N/4 δ_jk δ_ab, by direct enumeration.
        for n in 1..=3 {
            for j in 0..n {
                for k in 0..n {
                    for a in PauliAxis::ALL {
                        for b in PauliAxis::ALL {
                            let p = embed_pauli(j, a, n).unwrap();
                            let q = embed_pauli(k, b, n).unwrap();
                            let tr = (p.matrix() * q.matrix()).trace();
                            let want = if j == k && a == b {
                                (1 << n) as f64 / 4.0
                            } else {
                                0.0
                            };
                            assert!((tr - C64::new(want, 0.0)).norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn embed_rejects_bad_sites() {
        assert_eq!(
            embed_pauli(2, PauliAxis::X, 2),
            Err(Error::SiteOutOfRange {
                site: 2,
                n_qubits: 2
            })
        );
        assert_eq!(
            embed_pauli(0, PauliAxis::X, 13),
            Err(Error::RegisterSize(13))
        );
        assert_eq!(embed_pauli(0, PauliAxis::X, 0), Err(Error::RegisterSize(0)));
    }

    #[test]
    fn embedded_spectrum_is_half_integer() {
        let h = embed_pauli(1, PauliAxis::Y, 3).unwrap();
        assert!(h.trace().abs() < 1e-15);
        for l in h.eigenvalues() {
            assert!((l.abs() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_zero_is_identity() {
        let u = global_rotation(PauliAxis::X, 0.0, 3).unwrap();
        assert!(close(u.matrix(), &CMatrix::identity(8, 8), 0.0));
    }

    #[test]
    fn rotation_pi_x_single() {
        let u = global_rotation(PauliAxis::X, PI, 1).unwrap();
        let want = PauliAxis::X.sigma() * (-I);
        assert!(close(u.matrix(), &want, 1e-15));
    }

    #[test]
    fn pi_x_flips_z() {
        let n = 3;
        let u = global_rotation(PauliAxis::X, PI, n).unwrap();
        for j in 0..n {
            let z = embed_pauli(j, PauliAxis::Z, n).unwrap();
            let c = conjugate(&z, &u).unwrap();
            assert!(close(c.matrix(), (-&z).matrix(), 1e-14));
        }
    }

    #[test]
    fn rotation_rejects_nonfinite_angle() {
        assert!(matches!(
            global_rotation(PauliAxis::X, f64::NAN, 1),
            Err(Error::InvalidAngle(_))
        ));
        assert!(matches!(
            global_rotation(PauliAxis::Y, f64::INFINITY, 1),
            Err(Error::InvalidAngle(_))
        ));
    }

    #[test]
    fn propagator_zero_time_is_identity() {
        let h = embed_pauli(0, PauliAxis::X, 2).unwrap();
        let u = propagator(&h, 0.0).unwrap();
        assert!(close(u.matrix(), &CMatrix::identity(4, 4), 1e-15));
    }

    #[test]
    fn propagator_diagonal_generator() {
        let w = 2.3;
        let t = 0.7;
        let h = embed_pauli(0, PauliAxis::Z, 1).unwrap().scaled(w);
        let u = propagator(&h, t).unwrap();
        assert!((u.matrix()[(0, 0)] - C64::from_polar(1.0, -w * t / 2.0)).norm() < 1e-15);
        assert!((u.matrix()[(1, 1)] - C64::from_polar(1.0, w * t / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn propagator_rejects_negative_time() {
        let h = HermitianOperator::identity(1).unwrap();
        assert_eq!(propagator(&h, -1.0), Err(Error::InvalidDuration(-1.0)));
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            HermitianOperator::new(CMatrix::zeros(3, 3)),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = CMatrix::identity(2, 2) * C64::new(1.1, 0.0);
        assert!(matches!(
            UnitaryOperator::new(m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn conjugate_examples() {
        let n = 2;
        let pi_x = global_rotation(PauliAxis::X, PI, n).unwrap();
        let zz = embed_pauli_product(&[(0, PauliAxis::Z), (1, PauliAxis::Z)], n).unwrap();
        let c = conjugate(&zz, &pi_x).unwrap();
        assert!(close(c.matrix(), zz.matrix(), 1e-14));

        let zeeman = &embed_pauli(0, PauliAxis::Z, n).unwrap().scaled(3.0)
            + &embed_pauli(1, PauliAxis::Z, n).unwrap().scaled(5.0);
        let c = conjugate(&zeeman, &pi_x).unwrap();
        assert!(close(c.matrix(), (-&zeeman).matrix(), 1e-14));

        let id = UnitaryOperator::identity(n).unwrap();
        assert_eq!(conjugate(&zeeman, &id).unwrap(), zeeman);

        let other = UnitaryOperator::identity(3).unwrap();
        assert!(matches!(
            conjugate(&zeeman, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutator_examples() {
        let x = embed_pauli(0, PauliAxis::X, 1).unwrap();
        let y = embed_pauli(0, PauliAxis::Y, 1).unwrap();
        let z = embed_pauli(0, PauliAxis::Z, 1).unwrap();
        let c = commutator(&x, &y).unwrap();
        assert!(close(&c.matrix, &(z.matrix() * I), 1e-15));
        assert_eq!(commutator(&x, &x).unwrap().max_abs(), 0.0);

        let x1 = embed_pauli(0, PauliAxis::X, 2).unwrap();
        let y2 = embed_pauli(1, PauliAxis::Y, 2).unwrap();
        assert_eq!(commutator(&x1, &y2).unwrap().max_abs(), 0.0);
        assert!(commutator(&x1, &x).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let u = global_rotation(PauliAxis::Y, 0.4, 2).unwrap();
        assert!((fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-14);

        let id = UnitaryOperator::identity(2).unwrap();
        let phased =
            UnitaryOperator::new(CMatrix::identity(4, 4) * C64::from_polar(1.0, 0.83)).unwrap();
        assert!((fidelity(&id, &phased).unwrap() - 1.0).abs() < 1e-14);

        let id1 = UnitaryOperator::identity(1).unwrap();
        let sx = UnitaryOperator::new(PauliAxis::X.sigma()).unwrap();
        assert!(fidelity(&id1, &sx).unwrap() < 1e-15);
        assert!(fidelity(&id1, &id).is_err());
    }

    #[test]
    fn state_fidelity_examples() {
        let id = UnitaryOperator::identity(1).unwrap();
        let sx = UnitaryOperator::new(PauliAxis::X.sigma()).unwrap();
        let zero = DVector::from_vec(vec![ONE, ZERO]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]);
        assert!((state_fidelity(&id, &plus).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_fidelity(&sx, &zero).unwrap() < 1e-30);
        assert!((state_fidelity(&sx, &plus).unwrap() - 1.0).abs() < 1e-15);
        let bad = DVector::from_vec(vec![ONE, ONE]);
        assert!(matches!(
            state_fidelity(&id, &bad),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn pauli_coefficient_recovers_weights() {
        let n = 2;
        let h = &embed_pauli_product(&[(0, PauliAxis::Y), (1, PauliAxis::Z)], n)
            .unwrap()
            .scaled(0.37)
            + &embed_pauli(1, PauliAxis::X, n).unwrap().scaled(-2.0);
        let c = h
            .pauli_coefficient(&[(0, PauliAxis::Y), (1, PauliAxis::Z)])
            .unwrap();
        assert!((c - 0.37).abs() < 1e-14);
        assert!((h.pauli_coefficient(&[(1, PauliAxis::X)]).unwrap() + 2.0).abs() < 1e-14);
        assert!(h.pauli_coefficient(&[(0, PauliAxis::X)]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let u = global_rotation(PauliAxis::X, 0.3, 2).unwrap();
        let mut acc = UnitaryOperator::identity(2).unwrap();
        for _ in 0..13 {
            acc = &u * &acc;
        }
        assert!(u.pow(13).distance(&acc) < 1e-13);
        assert!(u.pow(0).distance(&UnitaryOperator::identity(2).unwrap()) == 0.0);
    }
}
