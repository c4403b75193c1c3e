//! Qubit registers under a Zeeman gradient with Ising couplings, and the
//! fluctuating-coupling noise model.
//!
//! The register Hamiltonian is `Σ_j ω_j I_jz + Σ_(jk) J_jk I_jz I_kz`, all
//! values in rad/s. Sites are 0-based.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{PauliAxis, MAX_QUBITS};
use crate::terms::{PauliProduct, SymbolicHamiltonian, Term, TermKind};
use crate::warning::Warning;

/// Vacuum permeability, T·m/A.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Gyromagnetic ratio of ²⁹Si, rad/(s·T).
pub const GAMMA_SI29: f64 = -5.319_0e7;

/// Ratio below which the gradient no longer dominates the couplings.
pub const GRADIENT_RATIO_THRESHOLD: f64 = 100.0;

/// Converts a frequency in Hz to rad/s.
pub fn hz(f: f64) -> f64 {
    TAU * f
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Coupling strength, rad/s.
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegisterSpec {
    n_qubits: usize,
    omegas: Vec<f64>,
    edges: Vec<Edge>,
}

impl RegisterSpec {
    /// Register with one site per entry of `omegas`. Edges must be distinct
    /// unordered pairs of distinct in-range sites.
    pub fn new(omegas: Vec<f64>, edges: Vec<Edge>) -> Result<Self> {
        let n = omegas.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::RegisterSize(n));
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidRegister("non-finite Zeeman frequency".into()));
        }
        let mut seen = Vec::with_capacity(edges.len());
        for e in &edges {
            for site in [e.a, e.b] {
                if site >= n {
                    return Err(Error::SiteOutOfRange { site, n_qubits: n });
                }
            }
            if e.a == e.b {
                return Err(Error::InvalidRegister(format!("self-loop on site {}", e.a)));
            }
            if !e.j.is_finite() {
                return Err(Error::InvalidRegister("non-finite coupling".into()));
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            if seen.contains(&key) {
                return Err(Error::InvalidRegister(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
            seen.push(key);
        }
        Ok(Self {
            n_qubits: n,
            omegas,
            edges,
        })
    }

    /// Two qubits coupled by a single edge.
    pub fn two_qubit(omega_1: f64, omega_2: f64, j: f64) -> Result<Self> {
        Self::new(vec![omega_1, omega_2], vec![Edge { a: 0, b: 1, j }])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.j).collect()
    }

    /// Same register with the couplings replaced, in edge order.
    pub fn with_couplings(&self, couplings: &[f64]) -> Result<Self> {
        if couplings.len() != self.edges.len() {
            return Err(Error::InvalidRegister(format!(
                "{} couplings for {} edges",
                couplings.len(),
                self.edges.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(couplings)
            .map(|(e, &j)| Edge { j, ..*e })
            .collect();
        Self::new(self.omegas.clone(), edges)
    }

    /// Same register with the Zeeman frequencies replaced.
    pub fn with_omegas(&self, omegas: Vec<f64>) -> Result<Self> {
        if omegas.len() != self.n_qubits {
            return Err(Error::InvalidRegister(format!(
                "{} frequencies for {} sites",
                omegas.len(),
                self.n_qubits
            )));
        }
        Self::new(omegas, self.edges.clone())
    }

    /// Smallest `|ω_j − ω_k|` over coupled pairs, or `None` without edges.
    pub fn min_detuning(&self) -> Option<f64> {
        self.edges
            .iter()
            .map(|e| (self.omegas[e.a] - self.omegas[e.b]).abs())
            .min_by(f64::total_cmp)
    }

    pub fn max_coupling(&self) -> f64 {
        self.edges.iter().map(|e| e.j.abs()).fold(0.0, f64::max)
    }

    /// `min |ω_j − ω_k| / max |J|` over coupled pairs; infinite without
    /// couplings.
    pub fn gradient_ratio(&self) -> f64 {
        let jmax = self.max_coupling();
        match self.min_detuning() {
            Some(d) if jmax > 0.0 => d / jmax,
            _ => f64::INFINITY,
        }
    }

    pub fn warnings(&self) -> Vec<Warning> {
        let ratio = self.gradient_ratio();
        if ratio < GRADIENT_RATIO_THRESHOLD {
            vec![Warning::WeakGradient { ratio }]
        } else {
            Vec::new()
        }
    }

    /// `sign · Σ ω_j I_jz`.
    pub fn zeeman_terms(&self, sign: f64) -> Vec<Term> {
        self.omegas
            .iter()
            .enumerate()
            .map(|(site, &w)| Term {
                kind: TermKind::Zeeman { site },
                op: PauliProduct::single(site, PauliAxis::Z),
                weight: sign,
                value: w,
            })
            .collect()
    }

    /// `Σ J_e I_az I_bz` with the register's couplings.
    pub fn coupling_terms(&self) -> Vec<Term> {
        self.edges
            .iter()
            .enumerate()
            .map(|(edge, e)| Term {
                kind: TermKind::Coupling { edge },
                op: PauliProduct::pair(e.a, PauliAxis::Z, e.b, PauliAxis::Z),
                weight: 1.0,
                value: e.j,
            })
            .collect()
    }

    /// `sign · A · Σ_j I_jx` on drive channel `channel`.
    pub fn drive_terms(&self, amplitude: f64, sign: f64, channel: usize) -> Vec<Term> {
        (0..self.n_qubits)
            .map(|site| Term {
                kind: TermKind::Drive { channel },
                op: PauliProduct::single(site, PauliAxis::X),
                weight: sign,
                value: amplitude,
            })
            .collect()
    }

    /// The bare register Hamiltonian `Z + C`.
    pub fn hamiltonian(&self) -> SymbolicHamiltonian {
        let mut terms = self.zeeman_terms(1.0);
        terms.extend(self.coupling_terms());
        SymbolicHamiltonian {
            n_qubits: self.n_qubits,
            terms,
        }
    }
}

/// Coupling-graph shapes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Topology {
    Chain {
        n: usize,
    },
    /// Sites numbered `row * cols + col`. Nearest-neighbour edges come first
    /// in lexicographic order, then the diagonals of each cell.
    SquareLattice {
        rows: usize,
        cols: usize,
        #[serde(default)]
        diagonals: bool,
    },
    Explicit {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
}

impl Topology {
    pub fn n_qubits(&self) -> usize {
        match *self {
            Topology::Chain { n } | Topology::Explicit { n, .. } => n,
            Topology::SquareLattice { rows, cols, .. } => rows * cols,
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            Topology::Chain { n } => (1..*n).map(|k| (k - 1, k)).collect(),
            Topology::SquareLattice {
                rows,
                cols,
                diagonals,
            } => {
                let (rows, cols) = (*rows, *cols);
                let site = |r: usize, c: usize| r * cols + c;
                let mut adjacent = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        if c + 1 < cols {
                            adjacent.push((site(r, c), site(r, c + 1)));
                        }
                        if r + 1 < rows {
                            adjacent.push((site(r, c), site(r + 1, c)));
                        }
                    }
                }
                adjacent.sort_unstable();
                let mut diag = Vec::new();
                if *diagonals {
                    for r in 0..rows.saturating_sub(1) {
                        for c in 0..cols.saturating_sub(1) {
                            diag.push((site(r, c), site(r + 1, c + 1)));
                            diag.push((site(r, c + 1), site(r + 1, c)));
                        }
                    }
                    diag.sort_unstable();
                }
                adjacent.extend(diag);
                adjacent
            }
            Topology::Explicit { edges, .. } => edges.clone(),
        }
    }
}

/// Register on `topology` with one frequency per site and one coupling per
/// generated edge, all in rad/s.
pub fn build_register(topology: &Topology, omegas: &[f64], couplings: &[f64]) -> Result<RegisterSpec> {
    let n = topology.n_qubits();
    if omegas.len() != n {
        return Err(Error::InvalidRegister(format!(
            "topology has {n} sites but {} frequencies were given",
            omegas.len()
        )));
    }
    let pairs = topology.edges();
    if couplings.len() != pairs.len() {
        return Err(Error::InvalidRegister(format!(
            "topology has {} edges but {} couplings were given",
            pairs.len(),
            couplings.len()
        )));
    }
    let edges = pairs
        .into_iter()
        .zip(couplings)
        .map(|((a, b), &j)| Edge { a, b, j })
        .collect();
    RegisterSpec::new(omegas.to_vec(), edges)
}

/// Zeeman splittings of the four-spin demonstration register, Hz.
pub const DEMO_ZEEMAN_HZ: [f64; 4] = [62.8e3, 95.9e3, 120.1e3, 153.18e3];
/// Mean couplings of the demonstration register (four adjacent, two
/// diagonal), Hz.
pub const DEMO_COUPLING_HZ: [f64; 6] = [17.3, 17.9, 18.5, 19.2, 6.1, 6.6];

/// 2×2 lattice with diagonals and the demonstration frequencies.
pub fn demo_register() -> RegisterSpec {
    let topology = Topology::SquareLattice {
        rows: 2,
        cols: 2,
        diagonals: true,
    };
    let omegas: Vec<f64> = DEMO_ZEEMAN_HZ.iter().map(|&f| hz(f)).collect();
    let js: Vec<f64> = DEMO_COUPLING_HZ.iter().map(|&f| hz(f)).collect();
    build_register(&topology, &omegas, &js).expect("demonstration register is valid")
}

/// Spin positions and field configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Metres.
    pub positions: Vec<[f64; 3]>,
    /// Unit vector along the static field.
    pub field_direction: [f64; 3],
    /// Unit vector along which the field magnitude varies.
    pub gradient_direction: [f64; 3],
    /// rad/(s·T).
    pub gyromagnetic_ratio: f64,
    /// T/m.
    pub field_gradient: f64,
    /// T.
    pub base_field: f64,
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn is_unit(v: &[f64; 3]) -> bool {
    (dot(v, v).sqrt() - 1.0).abs() < 1e-9
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        if !is_unit(&self.field_direction) || !is_unit(&self.gradient_direction) {
            return Err(Error::InvalidRegister(
                "field and gradient directions must be unit vectors".into(),
            ));
        }
        for (i, p) in self.positions.iter().enumerate() {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidRegister(format!("position {i} is not finite")));
            }
            for (j, q) in self.positions.iter().enumerate().skip(i + 1) {
                if p == q {
                    return Err(Error::InvalidRegister(format!(
                        "sites {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Secular dipolar coupling `(μ₀/4π) γ² ħ (1 − 3cos²ϑ) / r³` in rad/s, with
/// `ϑ` the angle between the inter-spin vector and the field.
pub fn dipolar_coupling(geometry: &Geometry, i: usize, j: usize) -> Result<f64> {
    let n = geometry.positions.len();
    for site in [i, j] {
        if site >= n {
            return Err(Error::SiteOutOfRange { site, n_qubits: n });
        }
    }
    if i == j {
        return Err(Error::InvalidRegister("dipolar coupling needs two distinct sites".into()));
    }
    let (p, q) = (&geometry.positions[i], &geometry.positions[j]);
    let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let r = dot(&d, &d).sqrt();
    if r == 0.0 {
        return Err(Error::InvalidRegister(format!("sites {i} and {j} coincide")));
    }
    let cos = dot(&d, &geometry.field_direction) / r;
    let g = geometry.gyromagnetic_ratio;
    Ok(MU_0 / (4.0 * PI) * g * g * HBAR * (1.0 - 3.0 * cos * cos) / (r * r * r))
}

/// `γ·G·(r_j · ĝ)` for each site: the Zeeman frequencies with the common
/// `γB₀` offset removed.
pub fn zeeman_from_gradient(geometry: &Geometry) -> Result<Vec<f64>> {
    geometry.validate()?;
    Ok(geometry
        .positions
        .iter()
        .map(|p| geometry.gyromagnetic_ratio * geometry.field_gradient * dot(p, &geometry.gradient_direction))
        .collect())
}

/// Normal distribution of one edge's coupling, rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeNoise {
    pub mean: f64,
    pub std_dev: f64,
}

/// Named standard deviations for the demonstration register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePreset {
    /// 9 Hz adjacent, 3 Hz diagonal.
    #[default]
    Caption,
    /// 10 Hz adjacent, 5 Hz diagonal.
    Text,
}

impl NoisePreset {
    /// `(adjacent, diagonal)` standard deviations in Hz.
    pub fn std_dev_hz(self) -> (f64, f64) {
        match self {
            NoisePreset::Caption => (9.0, 3.0),
            NoisePreset::Text => (10.0, 5.0),
        }
    }
}

/// Independent per-edge normal couplings, redrawn for every segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingNoise {
    pub edges: Vec<EdgeNoise>,
    pub seed: u64,
}

impl CouplingNoise {
    pub fn new(edges: Vec<EdgeNoise>, seed: u64) -> Result<Self> {
        for (k, e) in edges.iter().enumerate() {
            if !e.mean.is_finite() || !e.std_dev.is_finite() || e.std_dev < 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "edge {k}: noise needs a finite mean and a non-negative standard deviation"
                )));
            }
        }
        Ok(Self { edges, seed })
    }

    /// Means taken from the register's couplings, all with one deviation.
    pub fn uniform(register: &RegisterSpec, std_dev: f64, seed: u64) -> Result<Self> {
        Self::new(
            register
                .edges()
                .iter()
                .map(|e| EdgeNoise {
                    mean: e.j,
                    std_dev,
                })
                .collect(),
            seed,
        )
    }

    /// Preset deviations on the demonstration register: edges 0–3 adjacent,
    /// 4–5 diagonal.
    pub fn demo(preset: NoisePreset, seed: u64) -> Self {
        let (adj, diag) = preset.std_dev_hz();
        let edges = DEMO_COUPLING_HZ
            .iter()
            .enumerate()
            .map(|(k, &mean)| EdgeNoise {
                mean: hz(mean),
                std_dev: hz(if k < 4 { adj } else { diag }),
            })
            .collect();
        Self { edges, seed }
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Generator owned by ensemble member `member`.
pub fn member_rng(seed: u64, member: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member);
    rng
}

/// One draw per edge, in edge order, written into `out`.
///
/// Every edge consumes exactly one standard-normal variate whatever its
/// deviation, so the draw sequence depends only on the call count.
pub fn sample_couplings_into<R: Rng + ?Sized>(noise: &CouplingNoise, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    out.extend(noise.edges.iter().map(|e| {
        let z: f64 = rng.sample(StandardNormal);
        e.mean + e.std_dev * z
    }));
}

pub fn sample_couplings<R: Rng + ?Sized>(noise: &CouplingNoise, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(noise.edges.len());
    sample_couplings_into(noise, rng, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_lattice_edges() {
        assert_eq!(Topology::Chain { n: 4 }.edges(), vec![(0, 1), (1, 2), (2, 3)]);
        let lat = Topology::SquareLattice {
            rows: 2,
            cols: 2,
            diagonals: true,
        };
        assert_eq!(
            lat.edges(),
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (0, 3), (1, 2)]
        );
        let plain = Topology::SquareLattice {
            rows: 2,
            cols: 3,
            diagonals: false,
        };
        assert_eq!(plain.edges().len(), 7);
        let explicit = Topology::Explicit {
            n: 3,
            edges: vec![(2, 0), (1, 2)],
        };
        let reg = build_register(&explicit, &[1.0, 2.0, 3.0], &[0.1, 0.2]).unwrap();
        assert_eq!((reg.edges()[0].a, reg.edges()[0].b), (2, 0));
    }

    #[test]
    fn register_validation() {
        assert!(RegisterSpec::new(vec![], vec![]).is_err());
        assert!(RegisterSpec::new(vec![1.0, 2.0], vec![Edge { a: 0, b: 0, j: 1.0 }]).is_err());
        assert!(RegisterSpec::new(vec![1.0, 2.0], vec![Edge { a: 0, b: 2, j: 1.0 }]).is_err());
        let dup = vec![Edge { a: 0, b: 1, j: 1.0 }, Edge { a: 1, b: 0, j: 2.0 }];
        assert!(RegisterSpec::new(vec![1.0, 2.0], dup).is_err());
        assert!(build_register(&Topology::Chain { n: 3 }, &[1.0, 2.0], &[1.0, 1.0]).is_err());
        assert!(build_register(&Topology::Chain { n: 2 }, &[1.0, 2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn gradient_warning_threshold() {
        let reg = RegisterSpec::two_qubit(0.0, 100.0, 1.0).unwrap();
        assert!(reg.warnings().is_empty());
        let reg = RegisterSpec::two_qubit(0.0, 99.9, 1.0).unwrap();
        assert!(matches!(reg.warnings()[..], [Warning::WeakGradient { .. }]));
        assert!(demo_register().warnings().is_empty());
    }

    #[test]
    fn dipolar_angular_factor() {
        let magic = (1.0f64 / 3.0).sqrt();
        let geo = |d: [f64; 3]| Geometry {
            positions: vec![[0.0; 3], d],
            field_direction: [0.0, 0.0, 1.0],
            gradient_direction: [1.0, 0.0, 0.0],
            gyromagnetic_ratio: GAMMA_SI29,
            field_gradient: 0.0,
            base_field: 1.0,
        };
        let r = 1e-9;
        let along = [r * (1.0 - magic * magic).sqrt(), 0.0, r * magic];
        assert!(dipolar_coupling(&geo(along), 0, 1).unwrap().abs() < 1e-12);
        let perp = dipolar_coupling(&geo([r, 0.0, 0.0]), 0, 1).unwrap();
        let prefactor = MU_0 / (4.0 * PI) * GAMMA_SI29 * GAMMA_SI29 * HBAR / r.powi(3);
        assert!((perp / prefactor - 1.0).abs() < 1e-14);
        let doubled = dipolar_coupling(&geo([2.0 * r, 0.0, 0.0]), 1, 0).unwrap();
        assert!((perp / doubled - 8.0).abs() < 1e-12);
        assert!(dipolar_coupling(&geo([0.0; 3]), 0, 1).is_err());
    }

    #[test]
    fn gradient_splittings() {
        let mut g = Geometry {
            positions: vec![[0.0; 3], [3e-9, 0.0, 0.0]],
            field_direction: [0.0, 0.0, 1.0],
            gradient_direction: [1.0, 0.0, 0.0],
            gyromagnetic_ratio: GAMMA_SI29,
            field_gradient: 0.0,
            base_field: 1.0,
        };
        let w = zeeman_from_gradient(&g).unwrap();
        assert_eq!(w[0], w[1]);
        g.field_gradient = 1.4e6;
        let w = zeeman_from_gradient(&g).unwrap();
        let want = GAMMA_SI29.abs() * 1.4e6 * 3e-9;
        assert!(((w[1] - w[0]).abs() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_deviation_returns_means() {
        let noise = CouplingNoise::new(
            vec![
                EdgeNoise { mean: 1.5, std_dev: 0.0 },
                EdgeNoise { mean: -2.0, std_dev: 0.0 },
            ],
            3,
        )
        .unwrap();
        let mut rng = member_rng(3, 0);
        for _ in 0..10 {
            assert_eq!(sample_couplings(&noise, &mut rng), vec![1.5, -2.0]);
        }
        assert!(CouplingNoise::new(vec![EdgeNoise { mean: 0.0, std_dev: -1.0 }], 0).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_unbiased() {
        let noise = CouplingNoise::demo(NoisePreset::Caption, 11);
        let a: Vec<Vec<f64>> = {
            let mut rng = member_rng(11, 2);
            (0..5).map(|_| sample_couplings(&noise, &mut rng)).collect()
        };
        let b: Vec<Vec<f64>> = {
            let mut rng = member_rng(11, 2);
            (0..5).map(|_| sample_couplings(&noise, &mut rng)).collect()
        };
        assert_eq!(a, b);
        let mut other = member_rng(11, 3);
        assert_ne!(a[0], sample_couplings(&noise, &mut other));

        let n = 100_000;
        let mut rng = member_rng(5, 0);
        let mut sums = vec![0.0; noise.n_edges()];
        for _ in 0..n {
            for (s, v) in sums.iter_mut().zip(sample_couplings(&noise, &mut rng)) {
                *s += v;
            }
        }
        for (s, e) in sums.iter().zip(&noise.edges) {
            let mean = s / n as f64;
            assert!((mean - e.mean).abs() < 5.0 * e.std_dev / (n as f64).sqrt());
        }
    }
}
