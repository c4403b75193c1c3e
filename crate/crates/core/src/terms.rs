//! Symbolic Hamiltonians: weighted sums of named Pauli products.
//!
//! Each term remembers where its strength comes from (a Zeeman frequency, an
//! edge coupling, a drive channel) so schedules can be conjugated into
//! toggling frames, checked against the physically available Hamiltonians,
//! and rebuilt with freshly sampled couplings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::operator::{pauli_string_matrix, register_dim, CMatrix, HermitianOperator, PauliAxis, C64};

/// Product of spin operators on distinct sites, sorted by site. Sites are
/// 0-based; the display form is 1-based (`I1y I2z`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliProduct(Vec<(usize, PauliAxis)>);

impl PauliProduct {
    pub fn new(mut factors: Vec<(usize, PauliAxis)>) -> Result<Self> {
        factors.sort();
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameters(
                "Pauli product repeats a site".into(),
            ));
        }
        Ok(Self(factors))
    }

    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn single(site: usize, axis: PauliAxis) -> Self {
        Self(vec![(site, axis)])
    }

    /// Two-site product; panics if `a == b`.
    pub fn pair(a: usize, axis_a: PauliAxis, b: usize, axis_b: PauliAxis) -> Self {
        Self::new(vec![(a, axis_a), (b, axis_b)]).expect("pair sites must differ")
    }

    pub fn factors(&self) -> &[(usize, PauliAxis)] {
        &self.0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn max_site(&self) -> Option<usize> {
        self.0.last().map(|&(s, _)| s)
    }

    pub fn matrix(&self, n_qubits: usize) -> Result<CMatrix> {
        pauli_string_matrix(n_qubits, &self.0)
    }

    /// Image under a toggling frame, with the accumulated sign.
    pub fn conjugated(&self, frame: &Frame) -> (Self, f64) {
        let mut sign = 1.0;
        let factors = self
            .0
            .iter()
            .map(|&(site, axis)| {
                let (b, s) = frame.map(axis);
                sign *= s;
                (site, b)
            })
            .collect();
        (Self(factors), sign)
    }

    /// True when every factor lies along `axis`.
    pub fn is_along(&self, axis: PauliAxis) -> bool {
        self.0.iter().all(|&(_, a)| a == axis)
    }
}

impl fmt::Display for PauliProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "E");
        }
        for (k, (site, axis)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "I{}{}", site + 1, axis)?;
        }
        Ok(())
    }
}

impl FromStr for PauliProduct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "E" {
            return Ok(Self::identity());
        }
        let bad = || Error::InvalidParameters(format!("cannot parse Pauli product `{s}`"));
        let mut factors = Vec::new();
        for tok in s.split_whitespace() {
            let body = tok.strip_prefix('I').ok_or_else(bad)?;
            let axis = body
                .chars()
                .last()
                .and_then(PauliAxis::from_symbol)
                .ok_or_else(bad)?;
            let site: usize = body[..body.len() - 1].parse().map_err(|_| bad())?;
            if site == 0 {
                return Err(bad());
            }
            factors.push((site - 1, axis));
        }
        Self::new(factors)
    }
}

impl TryFrom<String> for PauliProduct {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliProduct> for String {
    fn from(p: PauliProduct) -> String {
        p.to_string()
    }
}

/// Origin of a term's strength.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TermKind {
    /// Zeeman frequency of a site.
    Zeeman { site: usize },
    /// Coupling strength of an edge of the register graph.
    Coupling { edge: usize },
    /// Amplitude of a control channel.
    Drive { channel: usize },
    Fixed,
}

/// `weight · value · op`, with `value` in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(flatten)]
    pub kind: TermKind,
    pub op: PauliProduct,
    pub weight: f64,
    pub value: f64,
}

impl Term {
    pub fn coefficient(&self) -> f64 {
        self.weight * self.value
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicHamiltonian {
    pub n_qubits: usize,
    pub terms: Vec<Term>,
}

impl SymbolicHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        register_dim(n_qubits)?;
        for t in &terms {
            if let Some(site) = t.op.max_site() {
                if site >= n_qubits {
                    return Err(Error::SiteOutOfRange { site, n_qubits });
                }
            }
            if !t.coefficient().is_finite() {
                return Err(Error::InvalidParameters(format!(
                    "non-finite coefficient on {}",
                    t.op
                )));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        let dim = register_dim(self.n_qubits)?;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            m += t.op.matrix(self.n_qubits)? * C64::new(t.coefficient(), 0.0);
        }
        Ok(m)
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.matrix()?)
    }

    pub fn conjugated(&self, frame: &Frame) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (op, sign) = t.op.conjugated(frame);
                Term {
                    kind: t.kind,
                    op,
                    weight: t.weight * sign,
                    value: t.value,
                }
            })
            .collect();
        Self {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    /// Replaces the value of every coupling term by `couplings[edge]`.
    pub fn with_couplings(&self, couplings: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        for t in &mut out.terms {
            if let TermKind::Coupling { edge } = t.kind {
                t.value = *couplings.get(edge).ok_or_else(|| {
                    Error::InvalidParameters(format!(
                        "no coupling value for edge {edge} ({} supplied)",
                        couplings.len()
                    ))
                })?;
            }
        }
        Ok(out)
    }

    /// Drops every coupling term.
    pub fn without_couplings(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|t| !matches!(t.kind, TermKind::Coupling { .. }))
                .cloned()
                .collect(),
        }
    }

    pub fn plus(&self, extra: &[Term]) -> Self {
        let mut out = self.clone();
        out.terms.extend_from_slice(extra);
        out
    }

    /// Number of edges referenced (largest edge index + 1).
    pub fn edge_count(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|t| match t.kind {
                TermKind::Coupling { edge } => Some(edge + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Whether the Hamiltonian lies in the physically available set
    /// `Z + C ± A_c X` for every drive channel `c`: Zeeman terms along `+z`,
    /// couplings as positive all-`z` products, and each drive channel along
    /// `x` with one common sign.
    pub fn is_physical(&self) -> bool {
        let mut drive_sign: Vec<(usize, f64)> = Vec::new();
        for t in &self.terms {
            let ok = match t.kind {
                TermKind::Zeeman { .. } => t.op.weight() == 1 && t.op.is_along(PauliAxis::Z) && t.weight > 0.0,
                TermKind::Coupling { .. } => t.op.is_along(PauliAxis::Z) && t.weight > 0.0,
                TermKind::Drive { channel } => {
                    let sign = t.weight.signum();
                    let consistent = match drive_sign.iter().find(|(c, _)| *c == channel) {
                        Some(&(_, s)) => s == sign,
                        None => {
                            drive_sign.push((channel, sign));
                            true
                        }
                    };
                    consistent && t.op.weight() == 1 && t.op.is_along(PauliAxis::X)
                }
                TermKind::Fixed => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for SymbolicHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let c = t.coefficient();
            if k == 0 {
                write!(f, "{c:+.6e} {}", t.op)?;
            } else {
                write!(f, " {} {:.6e} {}", if c < 0.0 { '-' } else { '+' }, c.abs(), t.op)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn product_names_round_trip() {
        let p = PauliProduct::pair(1, PauliAxis::Z, 0, PauliAxis::Y);
        assert_eq!(p.to_string(), "I1y I2z");
        assert_eq!("I1y I2z".parse::<PauliProduct>().unwrap(), p);
        assert_eq!("E".parse::<PauliProduct>().unwrap(), PauliProduct::identity());
        assert!("I0x".parse::<PauliProduct>().is_err());
        assert!("I1x I1y".parse::<PauliProduct>().is_err());
        assert!("J1x".parse::<PauliProduct>().is_err());
    }

    #[test]
    fn conjugation_by_pi_y_flips_zeeman_and_drive() {
        let h = SymbolicHamiltonian::new(
            2,
            vec![
                Term {
                    kind: TermKind::Zeeman { site: 0 },
                    op: PauliProduct::single(0, PauliAxis::Z),
                    weight: 1.0,
                    value: 3.0,
                },
                Term {
                    kind: TermKind::Coupling { edge: 0 },
                    op: PauliProduct::pair(0, PauliAxis::Z, 1, PauliAxis::Z),
                    weight: 1.0,
                    value: 0.5,
                },
                Term {
                    kind: TermKind::Drive { channel: 0 },
                    op: PauliProduct::single(1, PauliAxis::X),
                    weight: 1.0,
                    value: 2.0,
                },
            ],
        )
        .unwrap();
        let fy = Frame::from_pulse(PauliAxis::Y, PI).unwrap();
        let c = h.conjugated(&fy);
        let w: Vec<f64> = c.terms.iter().map(|t| t.weight).collect();
        assert_eq!(w, vec![-1.0, 1.0, -1.0]);
        assert!(h.is_physical());
        assert!(!c.is_physical());

        let rebuilt = h.with_couplings(&[7.0]).unwrap();
        assert_eq!(rebuilt.terms[1].value, 7.0);
        assert!(h.with_couplings(&[]).is_err());
        assert_eq!(h.without_couplings().terms.len(), 2);
        assert_eq!(h.edge_count(), 1);
    }

    #[test]
    fn json_form_is_readable() {
        let t = Term {
            kind: TermKind::Coupling { edge: 2 },
            op: PauliProduct::pair(0, PauliAxis::Z, 3, PauliAxis::Z),
            weight: -1.0,
            value: 108.7,
        };
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"source":"coupling","edge":2,"op":"I1z I4z","weight":-1.0,"value":108.7}"#
        );
        let back: Term = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
