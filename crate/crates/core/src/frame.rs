//! Toggling frames generated by global rotations through multiples of π/2.
//!
//! Such a rotation `P` maps every spin operator onto a signed spin operator,
//! `P† I_a P = ±I_b`, so a frame is a signed permutation of the three axes.
//! Frames ignore the global phase of `P`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::operator::{single_qubit_rotation, PauliAxis, C64};

/// Angles within this distance of a multiple of π/2 are treated as exact.
const QUARTER_TURN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    image: [PauliAxis; 3],
    sign: [i8; 3],
}

impl Default for Frame {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Frame {
    pub const IDENTITY: Frame = Frame {
        image: [PauliAxis::X, PauliAxis::Y, PauliAxis::Z],
        sign: [1, 1, 1],
    };

    /// Conjugation map of the global pulse `exp(-i·angle·Σ_j I_{j,axis})`.
    pub fn from_pulse(axis: PauliAxis, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidAngle(angle));
        }
        let quarters = (angle / FRAC_PI_2).round();
        if (angle - quarters * FRAC_PI_2).abs() > QUARTER_TURN_TOL * angle.abs().max(1.0) {
            return Err(Error::NonCliffordPulse(angle));
        }
        let u = single_qubit_rotation(axis, angle);
        let mut image = [PauliAxis::X; 3];
        let mut sign = [1i8; 3];
        for a in PauliAxis::ALL {
            let m = u.adjoint() * a.sigma() * &u;
            let (b, s) = PauliAxis::ALL
                .iter()
                .find_map(|&b| {
                    // tr(σ_b M)/2 is ±1 for the image axis and 0 otherwise.
                    let overlap: C64 = (b.sigma() * &m).trace() * 0.5;
                    (overlap.re.abs() > 0.5).then(|| (b, overlap.re.signum() as i8))
                })
                .expect("quarter-turn rotations permute the Pauli axes");
            image[a.index()] = b;
            sign[a.index()] = s;
        }
        Ok(Self { image, sign })
    }

    /// Image of `I_a` under the frame: `P† I_a P = sign · I_axis`.
    pub fn map(&self, a: PauliAxis) -> (PauliAxis, f64) {
        (self.image[a.index()], f64::from(self.sign[a.index()]))
    }

    /// Frame of the pulse product after a further pulse `next` is applied.
    ///
    /// With accumulated pulses `P` and a new pulse `Q`, the total is `QP` and
    /// `(QP)† I (QP) = P† (Q† I Q) P`.
    pub fn then(&self, next: &Frame) -> Frame {
        let mut image = [PauliAxis::X; 3];
        let mut sign = [1i8; 3];
        for a in PauliAxis::ALL {
            let (b, s1) = next.map(a);
            let (c, s2) = self.map(b);
            image[a.index()] = c;
            sign[a.index()] = (s1 * s2) as i8;
        }
        Frame { image, sign }
    }

    pub fn inverse(&self) -> Frame {
        let mut image = [PauliAxis::X; 3];
        let mut sign = [1i8; 3];
        for a in PauliAxis::ALL {
            let (b, s) = self.map(a);
            image[b.index()] = a;
            sign[b.index()] = s as i8;
        }
        Frame { image, sign }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

/// Single pulses tried, in order, when a frame change is needed.
pub const CANDIDATE_PULSES: [(PauliAxis, f64); 9] = [
    (PauliAxis::X, std::f64::consts::PI),
    (PauliAxis::Y, std::f64::consts::PI),
    (PauliAxis::Z, std::f64::consts::PI),
    (PauliAxis::X, FRAC_PI_2),
    (PauliAxis::X, -FRAC_PI_2),
    (PauliAxis::Y, FRAC_PI_2),
    (PauliAxis::Y, -FRAC_PI_2),
    (PauliAxis::Z, FRAC_PI_2),
    (PauliAxis::Z, -FRAC_PI_2),
];
