//! Pulse schedules: the four-period decoupling block, its conjugated
//! supercycle, echoes, repetition, the three-segment dipolar block, and
//! compilation of toggling-frame schedules into physical pulse sequences.
//!
//! A [`Schedule`] is read literally: evolutions act in the order listed and
//! pulses are instantaneous global rotations between them. A pulse-free
//! schedule whose Hamiltonians are outside the physical set is a toggling-frame
//! description; [`compile_to_physical`] turns it into an executable one with
//! the same propagator up to a global phase.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, CANDIDATE_PULSES};
use crate::magnus::Segment;
use crate::operator::{global_rotation, register_dim, CMatrix, PauliAxis, Spectral, UnitaryOperator};
use crate::systems::RegisterSpec;
use crate::terms::{PauliProduct, SymbolicHamiltonian, Term, TermKind};
use crate::warning::Warning;

/// Largest `θ` treated as small.
pub const THETA_WARNING_THRESHOLD: f64 = 0.2;
/// Smallest `8kΔt·|ω_j − ω_k|` for which rotating-wave averaging is trusted.
pub const REPETITION_THRESHOLD: f64 = 10.0;

/// Instantaneous global rotation `exp(-i·angle·Σ_j I_{j,axis})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub axis: PauliAxis,
    pub angle: f64,
}

impl Pulse {
    pub fn new(axis: PauliAxis, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidAngle(angle));
        }
        Ok(Self { axis, angle })
    }

    pub fn frame(&self) -> Result<Frame> {
        Frame::from_pulse(self.axis, self.angle)
    }

    pub fn unitary(&self, n_qubits: usize) -> Result<UnitaryOperator> {
        global_rotation(self.axis, self.angle, n_qubits)
    }

    /// The pulse seen from a toggling frame: `P† R_a(φ) P = R_b(±φ)`.
    pub fn conjugated(&self, frame: &Frame) -> Self {
        let (axis, sign) = frame.map(self.axis);
        Self {
            axis,
            angle: sign * self.angle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    /// Seconds, strictly positive.
    pub duration: f64,
    pub hamiltonian: SymbolicHamiltonian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Item {
    Evolution(Evolution),
    Pulse(Pulse),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct Schedule {
    n_qubits: usize,
    items: Vec<Item>,
}

#[derive(Deserialize)]
struct RawSchedule {
    n_qubits: usize,
    items: Vec<Item>,
}

impl TryFrom<RawSchedule> for Schedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        let mut s = Schedule::new(raw.n_qubits)?;
        for item in raw.items {
            s.push(item)?;
        }
        Ok(s)
    }
}

impl Schedule {
    pub fn new(n_qubits: usize) -> Result<Self> {
        register_dim(n_qubits)?;
        Ok(Self {
            n_qubits,
            items: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, item: Item) -> Result<()> {
        match item {
            Item::Evolution(e) => self.push_evolution(e.hamiltonian, e.duration),
            Item::Pulse(p) => self.push_pulse(p.axis, p.angle),
        }
    }

    pub fn push_evolution(&mut self, hamiltonian: SymbolicHamiltonian, duration: f64) -> Result<()> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidDuration(duration));
        }
        if hamiltonian.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: hamiltonian.n_qubits,
            });
        }
        let hamiltonian = SymbolicHamiltonian::new(hamiltonian.n_qubits, hamiltonian.terms)?;
        self.items.push(Item::Evolution(Evolution {
            duration,
            hamiltonian,
        }));
        Ok(())
    }

    pub fn push_pulse(&mut self, axis: PauliAxis, angle: f64) -> Result<()> {
        self.items.push(Item::Pulse(Pulse::new(axis, angle)?));
        Ok(())
    }

    /// Appends every item of `other`.
    pub fn extend(&mut self, other: &Schedule) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        self.items.extend(other.items.iter().cloned());
        Ok(())
    }

    pub fn evolutions(&self) -> impl Iterator<Item = &Evolution> {
        self.items.iter().filter_map(|i| match i {
            Item::Evolution(e) => Some(e),
            Item::Pulse(_) => None,
        })
    }

    pub fn pulses(&self) -> impl Iterator<Item = &Pulse> {
        self.items.iter().filter_map(|i| match i {
            Item::Pulse(p) => Some(p),
            Item::Evolution(_) => None,
        })
    }

    pub fn evolution_count(&self) -> usize {
        self.evolutions().count()
    }

    pub fn total_duration(&self) -> f64 {
        self.evolutions().map(|e| e.duration).sum()
    }

    pub fn is_pulse_free(&self) -> bool {
        self.pulses().next().is_none()
    }

    /// Net toggling frame of all pulses.
    pub fn pulse_frame(&self) -> Result<Frame> {
        self.pulses()
            .try_fold(Frame::IDENTITY, |f, p| Ok(f.then(&p.frame()?)))
    }

    /// Product of the pulse unitaries alone, in order.
    pub fn pulse_product(&self) -> Result<UnitaryOperator> {
        let mut acc = UnitaryOperator::identity(self.n_qubits)?;
        for p in self.pulses() {
            acc = &p.unitary(self.n_qubits)? * &acc;
        }
        Ok(acc)
    }

    /// Whether the pulses compose to the identity up to a global phase.
    pub fn is_cyclic(&self) -> Result<bool> {
        let prod = self.pulse_product()?;
        let id = UnitaryOperator::identity(self.n_qubits)?;
        Ok(prod.distance_up_to_phase(&id) < 1e-10)
    }

    /// Every item seen from the toggling frame `frame`.
    pub fn conjugated(&self, frame: &Frame) -> Self {
        let items = self
            .items
            .iter()
            .map(|item| match item {
                Item::Evolution(e) => Item::Evolution(Evolution {
                    duration: e.duration,
                    hamiltonian: e.hamiltonian.conjugated(frame),
                }),
                Item::Pulse(p) => Item::Pulse(p.conjugated(frame)),
            })
            .collect();
        Self {
            n_qubits: self.n_qubits,
            items,
        }
    }

    /// Pulse-free equivalent: each evolution conjugated by the accumulated
    /// pulses. Requires a cyclic schedule of quarter-turn pulses.
    pub fn to_toggled(&self) -> Result<Self> {
        let mut frame = Frame::IDENTITY;
        let mut items = Vec::with_capacity(self.items.len());
        for item in &self.items {
            match item {
                Item::Pulse(p) => frame = frame.then(&p.frame()?),
                Item::Evolution(e) => items.push(Item::Evolution(Evolution {
                    duration: e.duration,
                    hamiltonian: e.hamiltonian.conjugated(&frame),
                })),
            }
        }
        if !frame.is_identity() {
            return Err(Error::NotCyclic);
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            items,
        })
    }

    /// Same schedule with `extra` added to every evolution.
    pub fn with_added_terms(&self, extra: &[Term]) -> Self {
        let items = self
            .items
            .iter()
            .map(|item| match item {
                Item::Evolution(e) => Item::Evolution(Evolution {
                    duration: e.duration,
                    hamiltonian: e.hamiltonian.plus(extra),
                }),
                pulse => pulse.clone(),
            })
            .collect();
        Self {
            n_qubits: self.n_qubits,
            items,
        }
    }

    /// Same schedule with every coupling term's value set to `couplings`.
    pub fn with_couplings(&self, couplings: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        for item in &mut out.items {
            if let Item::Evolution(e) = item {
                e.hamiltonian = e.hamiltonian.with_couplings(couplings)?;
            }
        }
        Ok(out)
    }

    /// Same schedule with every coupling term removed.
    pub fn without_couplings(&self) -> Self {
        let mut out = self.clone();
        for item in &mut out.items {
            if let Item::Evolution(e) = item {
                e.hamiltonian = e.hamiltonian.without_couplings();
            }
        }
        out
    }

    /// Numeric segments of a pulse-free schedule.
    pub fn segments(&self) -> Result<Vec<Segment>> {
        if !self.is_pulse_free() {
            return Err(Error::InvalidSchedule(
                "schedule contains pulses; convert it to the toggling frame first".into(),
            ));
        }
        self.evolutions()
            .map(|e| Segment::new(e.hamiltonian.to_operator()?, e.duration))
            .collect()
    }

    /// Ordered product of every evolution and pulse.
    pub fn propagator(&self) -> Result<UnitaryOperator> {
        let dim = register_dim(self.n_qubits)?;
        let mut acc = CMatrix::identity(dim, dim);
        for item in &self.items {
            match item {
                Item::Evolution(e) => {
                    Spectral::of(&e.hamiltonian.matrix()?).apply_exp(e.duration, &mut acc)
                }
                Item::Pulse(p) => acc = p.unitary(self.n_qubits)?.matrix() * &acc,
            }
        }
        Ok(UnitaryOperator::from_matrix_unchecked(self.n_qubits, acc))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedules serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSchedule(e.to_string()))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "schedule qubits={} items={} duration={:.6e}",
            self.n_qubits,
            self.items.len(),
            self.total_duration()
        )?;
        for item in &self.items {
            match item {
                Item::Evolution(e) => writeln!(f, "evolve {:.6e} : {}", e.duration, e.hamiltonian)?,
                Item::Pulse(p) => writeln!(f, "pulse {} {:+.6}", p.axis, p.angle)?,
            }
        }
        Ok(())
    }
}

/// Block timing: `θ = A·Δt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    /// Seconds.
    pub delta_t: f64,
    /// rad/s.
    pub amplitude: f64,
    pub theta: f64,
}

impl BlockParams {
    /// `A` derived as `θ/Δt`.
    pub fn new(delta_t: f64, theta: f64) -> Result<Self> {
        if !delta_t.is_finite() || delta_t <= 0.0 {
            return Err(Error::InvalidDuration(delta_t));
        }
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::InvalidParameters(format!(
                "theta must be finite and non-negative, got {theta}"
            )));
        }
        Ok(Self {
            delta_t,
            amplitude: theta / delta_t,
            theta,
        })
    }

    pub fn from_amplitude(delta_t: f64, amplitude: f64) -> Result<Self> {
        Self::new(delta_t, amplitude * delta_t)
    }

    pub fn warnings(&self) -> Vec<Warning> {
        if self.theta > THETA_WARNING_THRESHOLD {
            vec![Warning::LargeTheta { theta: self.theta }]
        } else {
            Vec::new()
        }
    }
}

/// Coupling values used in each of the four block periods.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum BlockCouplings {
    /// The register's own couplings in every period.
    #[default]
    Static,
    /// One full coupling vector (edge order) per period.
    PerSegment([Vec<f64>; 4]),
}

fn drive_term_set(register: &RegisterSpec, amplitude: f64, sign: f64, channel: usize) -> Vec<Term> {
    register.drive_terms(amplitude, sign, channel)
}

/// Toggling-frame basic block of four periods of length `Δt`:
/// `+Z+C+AX`, `−Z+C+AX`, `−Z+C−AX`, `+Z+C−AX`.
pub fn basic_block(register: &RegisterSpec, params: &BlockParams, couplings: &BlockCouplings) -> Result<Schedule> {
    let n = register.n_qubits();
    let static_js = register.couplings();
    let period_js: [&[f64]; 4] = match couplings {
        BlockCouplings::Static => [&static_js; 4],
        BlockCouplings::PerSegment(js) => {
            for v in js {
                if v.len() != static_js.len() {
                    return Err(Error::InvalidParameters(format!(
                        "per-period couplings need {} values, got {}",
                        static_js.len(),
                        v.len()
                    )));
                }
            }
            [&js[0], &js[1], &js[2], &js[3]]
        }
    };
    let signs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let coupling = SymbolicHamiltonian {
        n_qubits: n,
        terms: register.coupling_terms(),
    };
    let mut s = Schedule::new(n)?;
    for ((zs, xs), js) in signs.into_iter().zip(period_js) {
        let mut terms = register.zeeman_terms(zs);
        terms.extend(coupling.with_couplings(js)?.terms);
        terms.extend(drive_term_set(register, params.amplitude, xs, 0));
        s.push_evolution(SymbolicHamiltonian::new(n, terms)?, params.delta_t)?;
    }
    Ok(s)
}

/// `block`, a π pulse about `axis`, `block` again, and the inverse pulse.
///
/// In the toggling frame the second copy is conjugated by the π rotation.
pub fn conjugated_pair_about(block: &Schedule, axis: PauliAxis) -> Result<Schedule> {
    let mut s = block.clone();
    s.push_pulse(axis, PI)?;
    s.extend(block)?;
    s.push_pulse(axis, -PI)?;
    Ok(s)
}

/// [`conjugated_pair_about`] the y axis, for a four-period basic block.
pub fn conjugated_pair(block: &Schedule) -> Result<Schedule> {
    if !block.is_pulse_free() || block.evolution_count() != 4 {
        return Err(Error::InvalidSchedule(
            "conjugated pair expects a pulse-free four-period block".into(),
        ));
    }
    conjugated_pair_about(block, PauliAxis::Y)
}

/// `k`-fold concatenation.
pub fn repeat(schedule: &Schedule, k: usize) -> Result<Schedule> {
    if k == 0 {
        return Err(Error::InvalidParameters("repetition count must be at least 1".into()));
    }
    let mut s = Schedule::new(schedule.n_qubits)?;
    s.items.reserve(schedule.items.len() * k);
    for _ in 0..k {
        s.items.extend(schedule.items.iter().cloned());
    }
    Ok(s)
}

/// Warning when `8kΔt·|ω_j − ω_k|` is below 10 for some coupled pair.
pub fn repetition_warning(register: &RegisterSpec, delta_t: f64, k: usize) -> Option<Warning> {
    let product = 8.0 * k as f64 * delta_t * register.min_detuning()?;
    (product < REPETITION_THRESHOLD).then_some(Warning::ShortRepetition {
        repetitions: k,
        product,
    })
}

/// π pulse about `axis` at the temporal midpoint and a closing π pulse at
/// the end. An evolution straddling the midpoint is split in two.
pub fn insert_hahn_echo(schedule: &Schedule, axis: PauliAxis) -> Result<Schedule> {
    let total = schedule.total_duration();
    if total <= 0.0 {
        return Err(Error::EmptySchedule);
    }
    let half = total / 2.0;
    // Boundaries closer than this to the midpoint count as the midpoint.
    let tol = 1e-12 * total;
    let mut out = Schedule::new(schedule.n_qubits)?;
    let mut elapsed = 0.0;
    let mut inserted = false;
    for item in &schedule.items {
        match item {
            Item::Evolution(e) if !inserted => {
                let end = elapsed + e.duration;
                if (elapsed - half).abs() <= tol {
                    out.push_pulse(axis, PI)?;
                    inserted = true;
                    out.items.push(item.clone());
                } else if end > half + tol {
                    out.push_evolution(e.hamiltonian.clone(), half - elapsed)?;
                    out.push_pulse(axis, PI)?;
                    inserted = true;
                    out.push_evolution(e.hamiltonian.clone(), end - half)?;
                } else {
                    out.items.push(item.clone());
                }
                elapsed = end;
            }
            _ => out.items.push(item.clone()),
        }
    }
    if !inserted {
        out.push_pulse(axis, PI)?;
    }
    out.push_pulse(axis, PI)?;
    Ok(out)
}

/// Rewrites a schedule so that every evolution draws from the physical set
/// `+Z + C ± A_c X` (see [`SymbolicHamiltonian::is_physical`]), realising the
/// toggling frames with global pulses.
///
/// Frames are chosen greedily: the current frame is kept whenever it works,
/// otherwise the first single pulse of [`CANDIDATE_PULSES`], or failing that
/// the first ordered pair, that makes the next evolution physical is
/// inserted. The closing pulse that restores the
/// identity frame is placed as early as the trailing evolutions allow.
pub fn compile_to_physical(schedule: &Schedule) -> Result<Schedule> {
    let toggled = schedule.to_toggled()?;
    let physical_in = |h: &SymbolicHamiltonian, frame: &Frame| {
        let p = h.conjugated(&frame.inverse());
        p.is_physical().then_some(p)
    };

    let mut items: Vec<Item> = Vec::new();
    // Evolutions emitted since the last pulse, with their toggled forms.
    let mut tail: Vec<(usize, &Evolution)> = Vec::new();
    let mut frame = Frame::IDENTITY;
    for (index, e) in toggled.evolutions().enumerate() {
        let (hamiltonian, pulses) = match physical_in(&e.hamiltonian, &frame) {
            Some(h) => (h, Vec::new()),
            None => pulse_routes()
                .find_map(|route| {
                    let next = route.iter().fold(frame, |f, &(axis, angle)| f.then(&quarter_turn(axis, angle)));
                    physical_in(&e.hamiltonian, &next).map(|h| (h, route))
                })
                .ok_or(Error::Unreachable { index })?,
        };
        if !pulses.is_empty() {
            for (axis, angle) in pulses {
                items.push(Item::Pulse(Pulse { axis, angle }));
                frame = frame.then(&quarter_turn(axis, angle));
            }
            tail.clear();
        }
        tail.push((items.len(), e));
        items.push(Item::Evolution(Evolution {
            duration: e.duration,
            hamiltonian,
        }));
    }

    if !frame.is_identity() {
        let closing = closing_pulses(&frame);
        // Hoist the closing pulses over trailing evolutions that are already
        // physical in the identity frame.
        let mut start = items.len();
        for &(pos, e) in tail.iter().rev() {
            if !e.hamiltonian.is_physical() {
                break;
            }
            start = pos;
        }
        for &(pos, e) in &tail {
            if pos >= start {
                items[pos] = Item::Evolution(e.clone());
            }
        }
        let pulses = closing.into_iter().map(|(axis, angle)| Item::Pulse(Pulse { axis, angle }));
        items.splice(start..start, pulses);
    }
    Ok(Schedule {
        n_qubits: schedule.n_qubits,
        items,
    })
}

fn quarter_turn(axis: PauliAxis, angle: f64) -> Frame {
    Frame::from_pulse(axis, angle).expect("candidates are quarter turns")
}

/// Every single candidate pulse, then every ordered pair.
fn pulse_routes() -> impl Iterator<Item = Vec<(PauliAxis, f64)>> {
    let singles = CANDIDATE_PULSES.iter().map(|&p| vec![p]);
    let pairs = CANDIDATE_PULSES
        .iter()
        .flat_map(|&p| CANDIDATE_PULSES.iter().map(move |&q| vec![p, q]));
    singles.chain(pairs)
}

/// Shortest list of candidate pulses returning `frame` to the identity.
fn closing_pulses(frame: &Frame) -> Vec<(PauliAxis, f64)> {
    pulse_routes()
        .find(|route| {
            route
                .iter()
                .fold(*frame, |f, &(axis, angle)| f.then(&quarter_turn(axis, angle)))
                .is_identity()
        })
        .expect("two quarter-turn pulses generate every signed axis permutation")
}

fn check_dd_matrix(d: &[Vec<f64>]) -> Result<usize> {
    let n = d.len();
    register_dim(n)?;
    for (j, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidParameters("coupling matrix must be square".into()));
        }
        if row[j] != 0.0 {
            return Err(Error::InvalidParameters("coupling matrix must have a zero diagonal".into()));
        }
        for (k, &v) in row.iter().enumerate() {
            if !v.is_finite() || v != d[k][j] {
                return Err(Error::InvalidParameters(format!(
                    "coupling matrix is not symmetric at ({j}, {k})"
                )));
            }
        }
    }
    Ok(n)
}

/// `Σ_{j<k} d_jk (α I_jx I_kx + β I_jy I_ky + γ I_jz I_kz)` followed by its
/// images under global `(x)π/2` and `(y)π/2` pulses, each for `delta_t`.
pub fn anisotropic_dd_block(d: &[Vec<f64>], weights: [f64; 3], delta_t: f64) -> Result<Schedule> {
    let n = check_dd_matrix(d)?;
    let mut terms = Vec::new();
    let mut edge = 0;
    for j in 0..n {
        for k in j + 1..n {
            for (axis, &w) in PauliAxis::ALL.iter().zip(&weights) {
                if w != 0.0 {
                    terms.push(Term {
                        kind: TermKind::Coupling { edge },
                        op: PauliProduct::pair(j, *axis, k, *axis),
                        weight: w,
                        value: d[j][k],
                    });
                }
            }
            edge += 1;
        }
    }
    let h1 = SymbolicHamiltonian::new(n, terms)?;
    let fx = Frame::from_pulse(PauliAxis::X, PI / 2.0)?;
    let fy = Frame::from_pulse(PauliAxis::Y, PI / 2.0)?;
    let mut s = Schedule::new(n)?;
    s.push_evolution(h1.clone(), delta_t)?;
    s.push_evolution(h1.conjugated(&fx), delta_t)?;
    s.push_evolution(h1.conjugated(&fy), delta_t)?;
    Ok(s)
}

/// Dipolar block: `2zz − xx − yy`, `2yy − xx − zz`, `2xx − yy − zz`.
pub fn wahuha_block(d: &[Vec<f64>], delta_t: f64) -> Result<Schedule> {
    anisotropic_dd_block(d, [-1.0, -1.0, 2.0], delta_t)
}

/// Nested decoupling cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub params: BlockParams,
    /// Repetitions `k` of the conjugated pair at each nesting level.
    pub repetitions: usize,
    /// Nesting depth, at least 1.
    pub iterations: usize,
    pub hahn_echo: bool,
}

/// Axis of the conjugating π pulses at nesting level `level` (1-based).
pub fn conjugation_axis(level: usize) -> PauliAxis {
    if level % 2 == 1 {
        PauliAxis::Y
    } else {
        PauliAxis::Z
    }
}

/// One decoupling unit in the toggling frame, echo pulses aside.
///
/// Level 1 applies the basic block to the register Hamiltonian. Level `ℓ+1`
/// treats a whole level-`ℓ` unit `S` of duration `T` as one period and builds
/// `S + A'X`, `S̃ + A'X`, `S̃ − A'X`, `S − A'X` with `S̃` the image of `S`
/// under a π-x pulse and `A' = θ/T` on a separate drive channel; the second
/// half of each pair is conjugated about [`conjugation_axis`].
pub fn decoupling_unit(register: &RegisterSpec, spec: &CycleSpec) -> Result<Schedule> {
    if spec.iterations == 0 {
        return Err(Error::InvalidParameters("iterations must be at least 1".into()));
    }
    let n = register.n_qubits();
    let flip = Frame::from_pulse(PauliAxis::X, PI)?;
    let mut sub = Schedule::new(n)?;
    sub.push_evolution(register.hamiltonian(), spec.params.delta_t)?;
    for level in 1..=spec.iterations {
        let period = sub.total_duration();
        let amplitude = spec.params.theta / period;
        let channel = level - 1;
        let plus = drive_term_set(register, amplitude, 1.0, channel);
        let minus = drive_term_set(register, amplitude, -1.0, channel);
        let flipped = sub.conjugated(&flip);
        let mut block = sub.with_added_terms(&plus);
        block.extend(&flipped.with_added_terms(&plus))?;
        block.extend(&flipped.with_added_terms(&minus))?;
        block.extend(&sub.with_added_terms(&minus))?;
        let mirror = Frame::from_pulse(conjugation_axis(level), PI)?;
        let mut pair = block.clone();
        pair.extend(&block.conjugated(&mirror))?;
        sub = repeat(&pair, spec.repetitions)?;
    }
    Ok(sub)
}

/// [`decoupling_unit`] with the echo pulses about x when requested.
pub fn decoupling_cycle(register: &RegisterSpec, spec: &CycleSpec) -> Result<Schedule> {
    let unit = decoupling_unit(register, spec)?;
    if spec.hahn_echo {
        insert_hahn_echo(&unit, PauliAxis::X)
    } else {
        Ok(unit)
    }
}
