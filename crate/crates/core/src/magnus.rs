//! Average Hamiltonians of piecewise-constant schedules.
//!
//! Segments are applied in list order: the cycle propagator is
//! `U = e^{-i H_m t_m} ⋯ e^{-i H_1 t_1}` and the average Hamiltonian `H̄`
//! satisfies `U = e^{-i H̄ t}` with `t = Σ t_i`. Writing `A_i = H_i t_i`,
//!
//! ```text
//! H̄⁽⁰⁾ = (1/t) Σ A_i
//! H̄⁽¹⁾ = -(i/2t) Σ_{j>i} [A_j, A_i]
//! H̄⁽²⁾ = -(1/12t) { [A_2,[A_2,A_1]] - [A_1,[A_2,A_1]] + ⋯ }
//! ```
//!
//! The terms are accumulated by folding the Baker–Campbell–Hausdorff series,
//! truncated at third order in the generators, over the segments in order.
//! Intra-segment contributions vanish because each segment is constant.

use nalgebra::linalg::Schur;

use crate::error::{Error, Result};
use crate::operator::{
    raw_commutator, register_dim, CMatrix, HermitianOperator, Spectral, UnitaryOperator, C64,
};

/// Eigenphases of a cycle propagator must stay this far inside `(-π, π)`.
pub const LOG_BRANCH_MARGIN: f64 = 0.1;

/// One constant-Hamiltonian interval of a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    hamiltonian: HermitianOperator,
    duration: f64,
}

impl Segment {
    pub fn new(hamiltonian: HermitianOperator, duration: f64) -> Result<Self> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidDuration(duration));
        }
        Ok(Self {
            hamiltonian,
            duration,
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Same Hamiltonian with the duration multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.hamiltonian.clone(), self.duration * factor)
    }
}

/// Zeroth-, first- and second-order average Hamiltonians.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnusResult {
    pub order0: HermitianOperator,
    pub order1: HermitianOperator,
    pub order2: HermitianOperator,
    pub total_time: f64,
}

impl MagnusResult {
    /// `order0 + order1 + order2`.
    pub fn sum(&self) -> HermitianOperator {
        &(&self.order0 + &self.order1) + &self.order2
    }

    /// Sum of the orders up to and including `max_order` (clamped to 2).
    pub fn truncated(&self, max_order: usize) -> HermitianOperator {
        let mut h = self.order0.clone();
        if max_order >= 1 {
            h = &h + &self.order1;
        }
        if max_order >= 2 {
            h = &h + &self.order2;
        }
        h
    }
}

fn check_segments(segments: &[Segment]) -> Result<usize> {
    let first = segments.first().ok_or(Error::EmptySchedule)?;
    let dim = first.hamiltonian.dim();
    for s in segments {
        if s.hamiltonian.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: s.hamiltonian.dim(),
            });
        }
    }
    Ok(first.hamiltonian.n_qubits())
}

/// Average-Hamiltonian terms through second order.
pub fn magnus_terms(segments: &[Segment]) -> Result<MagnusResult> {
    let n_qubits = check_segments(segments)?;
    let minus_i = C64::new(0.0, -1.0);

    // Ω = log(U) split by order in the generators: y1 + y2 + y3 + O(4).
    let mut y1 = segments[0].hamiltonian.matrix() * C64::new(0.0, -segments[0].duration);
    let dim = y1.nrows();
    let mut y2 = CMatrix::zeros(dim, dim);
    let mut y3 = CMatrix::zeros(dim, dim);
    let mut total_time = segments[0].duration;

    for seg in &segments[1..] {
        // log(e^X e^Y) with X the new segment and Y the accumulated cycle.
        let x = seg.hamiltonian.matrix() * (minus_i * seg.duration);
        let xy1 = raw_commutator(&x, &y1);
        let n3 = &y3
            + raw_commutator(&x, &y2) * C64::new(0.5, 0.0)
            + (raw_commutator(&x, &xy1) + raw_commutator(&y1, &(-&xy1)))
                * C64::new(1.0 / 12.0, 0.0);
        let n2 = &y2 + xy1 * C64::new(0.5, 0.0);
        y1 += x;
        y2 = n2;
        y3 = n3;
        total_time += seg.duration;
    }

    let to_hamiltonian = |y: CMatrix| {
        HermitianOperator::from_matrix_unchecked(n_qubits, y * C64::new(0.0, 1.0 / total_time))
    };
    Ok(MagnusResult {
        order0: to_hamiltonian(y1),
        order1: to_hamiltonian(y2),
        order2: to_hamiltonian(y3),
        total_time,
    })
}

/// Ordered product `e^{-i H_m t_m} ⋯ e^{-i H_1 t_1}`.
pub fn cycle_propagator(segments: &[Segment]) -> Result<UnitaryOperator> {
    let n_qubits = check_segments(segments)?;
    let dim = register_dim(n_qubits)?;
    let mut acc = CMatrix::identity(dim, dim);
    for seg in segments {
        Spectral::of(seg.hamiltonian.matrix()).apply_exp(seg.duration, &mut acc);
    }
    Ok(UnitaryOperator::from_matrix_unchecked(n_qubits, acc))
}

/// Exact average Hamiltonian `(i/t) log(e^{-i H_m t_m} ⋯ e^{-i H_1 t_1})`
/// through the principal logarithm.
pub fn exact_generator(segments: &[Segment]) -> Result<HermitianOperator> {
    let u = cycle_propagator(segments)?;
    let t: f64 = segments.iter().map(|s| s.duration).sum();
    principal_generator(&u, t)
}

/// `H` with `u = e^{-i H t}` and every eigenphase of `u` inside
/// `(-π + margin, π - margin)`.
pub fn principal_generator(u: &UnitaryOperator, t: f64) -> Result<HermitianOperator> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidDuration(t));
    }
    let schur =
        Schur::try_new(u.matrix().clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let (q, tri) = schur.unpack();
    let dim = tri.nrows();
    let mut phases = Vec::with_capacity(dim);
    for k in 0..dim {
        let phase = tri[(k, k)].arg();
        if phase.abs() >= std::f64::consts::PI - LOG_BRANCH_MARGIN {
            return Err(Error::LogBranch { phase });
        }
        phases.push(phase);
    }
    // u = Q diag(e^{iφ}) Q†  ⇒  H = -(1/t) Q diag(φ) Q†
    let mut scaled = q.clone();
    for (k, &phase) in phases.iter().enumerate() {
        scaled
            .column_mut(k)
            .iter_mut()
            .for_each(|z| *z *= -phase / t);
    }
    let h = scaled * q.adjoint();
    Ok(HermitianOperator::from_matrix_unchecked(u.n_qubits(), h))
}
