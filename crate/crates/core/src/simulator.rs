//! Exact evolution of schedules and the ensemble fidelity experiment.
//!
//! Each ensemble member owns the generator `member_rng(seed, member)`. Every
//! evolution consumes one coupling draw per edge, so the decoupled and free
//! runs of a member see the same coupling sequence segment by segment.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{product_state, raw_fidelity, raw_state_fidelity, register_dim, CMatrix, Spectral, UnitaryOperator, C64};
use crate::sequences::{compile_to_physical, decoupling_cycle, repetition_warning, BlockParams, CycleSpec, Item, Schedule};
use crate::effective::secularity_warning;
use crate::split::Split;
use crate::systems::{member_rng, sample_couplings_into, CouplingNoise, RegisterSpec};
use crate::terms::TermKind;
use crate::warning::Warning;

/// Propagator of a schedule. With `noise`, every evolution has its coupling
/// terms rebuilt from a fresh draw before exponentiation.
pub fn evolve<R: Rng + ?Sized>(schedule: &Schedule, noise: Option<&CouplingNoise>, rng: &mut R) -> Result<UnitaryOperator> {
    let plan = Plan::new(schedule)?;
    let mut acc = CMatrix::identity(plan.dim, plan.dim);
    match noise {
        Some(noise) => {
            let mut split = Split::identity(plan.dim);
            plan.apply_noisy(&mut split, noise, rng, &mut Vec::new())?;
            acc = split.to_complex();
        }
        None => plan.apply_static(&mut acc),
    }
    Ok(UnitaryOperator::from_matrix_unchecked(schedule.n_qubits(), acc))
}

/// One distinct evolution of a schedule, split into its coupling-free part
/// and one matrix per coupled edge.
struct Kind {
    duration: f64,
    base: CMatrix,
    edges: Vec<(usize, CMatrix)>,
    /// Real parts of `base` and `edges` when both are real.
    real: Option<(DMatrix<f64>, Vec<DMatrix<f64>>)>,
    static_exp: CMatrix,
    free_exp: CMatrix,
}

enum Step {
    Evolve(usize),
    Pulse(usize),
}

/// A schedule with its distinct evolutions and pulses precomputed.
struct Plan {
    dim: usize,
    steps: Vec<Step>,
    kinds: Vec<Kind>,
    pulses: Vec<CMatrix>,
    split_pulses: Vec<Split>,
}

impl Plan {
    fn new(schedule: &Schedule) -> Result<Self> {
        let n = schedule.n_qubits();
        let dim = register_dim(n)?;
        let mut seen_evolutions = Vec::new();
        let mut seen_pulses = Vec::new();
        let mut kinds = Vec::new();
        let mut pulses = Vec::new();
        let mut steps = Vec::with_capacity(schedule.items().len());
        for item in schedule.items() {
            match item {
                Item::Evolution(e) => {
                    let idx = match seen_evolutions.iter().position(|s| *s == e) {
                        Some(i) => i,
                        None => {
                            seen_evolutions.push(e);
                            kinds.push(Kind::new(e.duration, &e.hamiltonian, dim)?);
                            kinds.len() - 1
                        }
                    };
                    steps.push(Step::Evolve(idx));
                }
                Item::Pulse(p) => {
                    let idx = match seen_pulses.iter().position(|s| *s == p) {
                        Some(i) => i,
                        None => {
                            seen_pulses.push(p);
                            pulses.push(p.unitary(n)?.into_matrix());
                            pulses.len() - 1
                        }
                    };
                    steps.push(Step::Pulse(idx));
                }
            }
        }
        Ok(Self {
            dim,
            steps,
            kinds,
            split_pulses: pulses.iter().map(Split::from_complex).collect(),
            pulses,
        })
    }

    fn evolution_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Evolve(_))).count()
    }

    fn apply_with(&self, acc: &mut CMatrix, pick: impl Fn(&Kind) -> &CMatrix) {
        for step in &self.steps {
            *acc = match step {
                Step::Evolve(k) => pick(&self.kinds[*k]) * &*acc,
                Step::Pulse(p) => &self.pulses[*p] * &*acc,
            };
        }
    }

    fn apply_static(&self, acc: &mut CMatrix) {
        self.apply_with(acc, |k| &k.static_exp);
    }

    fn apply_coupling_free(&self, acc: &mut CMatrix) {
        self.apply_with(acc, |k| &k.free_exp);
    }

    fn apply_noisy<R: Rng + ?Sized>(&self, acc: &mut Split, noise: &CouplingNoise, rng: &mut R, draw: &mut Vec<f64>) -> Result<()> {
        for step in &self.steps {
            match step {
                Step::Evolve(k) => {
                    sample_couplings_into(noise, rng, draw);
                    let kind = &self.kinds[*k];
                    let value = |edge: usize| {
                        draw.get(edge).copied().ok_or_else(|| {
                            Error::InvalidParameters(format!("noise model has no edge {edge}"))
                        })
                    };
                    if let Some((base, edges)) = &kind.real {
                        let mut h = base.clone();
                        for ((edge, _), c) in kind.edges.iter().zip(edges) {
                            h += c * value(*edge)?;
                        }
                        acc.apply_real_exp(&h, kind.duration);
                    } else {
                        let mut h = kind.base.clone();
                        for (edge, c) in &kind.edges {
                            h += c * C64::new(value(*edge)?, 0.0);
                        }
                        let mut m = acc.to_complex();
                        Spectral::of(&h).apply_exp(kind.duration, &mut m);
                        *acc = Split::from_complex(&m);
                    }
                }
                Step::Pulse(p) => acc.left_mul(&self.split_pulses[*p]),
            }
        }
        Ok(())
    }
}

impl Kind {
    fn new(duration: f64, h: &crate::terms::SymbolicHamiltonian, dim: usize) -> Result<Self> {
        let n = h.n_qubits;
        let mut base = CMatrix::zeros(dim, dim);
        let mut edges: Vec<(usize, CMatrix)> = Vec::new();
        let mut static_values: Vec<f64> = Vec::new();
        for t in &h.terms {
            let m = t.op.matrix(n)?;
            match t.kind {
                TermKind::Coupling { edge } => {
                    let slot = match edges.iter().position(|(e, _)| *e == edge) {
                        Some(i) => i,
                        None => {
                            edges.push((edge, CMatrix::zeros(dim, dim)));
                            static_values.push(t.value);
                            edges.len() - 1
                        }
                    };
                    edges[slot].1 += m * C64::new(t.weight, 0.0);
                }
                _ => base += m * C64::new(t.coefficient(), 0.0),
            }
        }
        let mut full = base.clone();
        for ((_, c), &v) in edges.iter().zip(&static_values) {
            full += c * C64::new(v, 0.0);
        }
        let is_real = |m: &CMatrix| m.iter().all(|z| z.im == 0.0);
        let real = (is_real(&base) && edges.iter().all(|(_, c)| is_real(c))).then(|| {
            let re = |m: &CMatrix| m.map(|z| z.re);
            (re(&base), edges.iter().map(|(_, c)| re(c)).collect())
        });
        Ok(Self {
            duration,
            real,
            static_exp: Spectral::of(&full).exp(duration, dim),
            free_exp: Spectral::of(&base).exp(duration, dim),
            base,
            edges,
        })
    }
}

/// What the evolved propagator is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// The same schedule with every coupling removed.
    #[default]
    LocalFrame,
    /// The identity.
    LabFrame,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `|tr(U V†)|² / d²`.
    #[default]
    Unitary,
    /// `|⟨ψ|V† U|ψ⟩|²` with `ψ = |+⟩^⊗N`.
    State,
}

/// Smallest transverse phase difference, in radians, that an echo half-cycle
/// should accumulate.
pub const ECHO_PHASE_THRESHOLD: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub register: RegisterSpec,
    pub params: BlockParams,
    pub noise: Option<CouplingNoise>,
    /// Seconds.
    pub total_time: f64,
    /// Seconds; a whole number of decoupling cycles.
    pub sample_interval: f64,
    /// Repetitions `k` of the conjugated pair per nesting level.
    pub repetitions: usize,
    pub iterations: usize,
    pub hahn_echo: bool,
    pub ensemble_size: usize,
    pub reference: Reference,
    pub metric: Metric,
}

impl ExperimentConfig {
    fn cycle_spec(&self) -> CycleSpec {
        CycleSpec {
            params: self.params,
            repetitions: self.repetitions,
            iterations: self.iterations,
            hahn_echo: self.hahn_echo,
        }
    }

    /// Duration of one decoupling cycle, `(8k)^L Δt`.
    pub fn cycle_duration(&self) -> f64 {
        (8.0 * self.repetitions as f64).powi(self.iterations as i32) * self.params.delta_t
    }

    /// `(cycles per sample, samples after t = 0)`.
    pub fn sampling(&self) -> Result<(usize, usize)> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if self.repetitions == 0 || self.iterations == 0 || self.ensemble_size == 0 {
            return bad("repetitions, iterations and ensemble size must be at least 1".into());
        }
        for (name, v) in [("total_time", self.total_time), ("sample_interval", self.sample_interval)] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.total_time < self.sample_interval {
            return bad("total_time must be at least sample_interval".into());
        }
        let per_sample = self.sample_interval / self.cycle_duration();
        let cycles = per_sample.round();
        if cycles < 1.0 || (per_sample - cycles).abs() > 1e-6 * per_sample {
            return bad(format!(
                "sample_interval {} s is not a whole number of {} s decoupling cycles",
                self.sample_interval,
                self.cycle_duration()
            ));
        }
        let samples = (self.total_time / self.sample_interval + 1e-9).floor() as usize;
        if let Some(noise) = &self.noise {
            if noise.n_edges() != self.register.edges().len() {
                return bad(format!(
                    "noise model has {} edges, register has {}",
                    noise.n_edges(),
                    self.register.edges().len()
                ));
            }
        }
        Ok((cycles as usize, samples))
    }

    pub fn warnings(&self) -> Vec<Warning> {
        let mut w = self.register.warnings();
        w.extend(self.params.warnings());
        w.extend(repetition_warning(&self.register, self.params.delta_t, self.repetitions));
        w.extend(secularity_warning(&self.register, self.params.theta));
        if self.hahn_echo {
            if let Some(dw) = self.register.min_detuning() {
                let phase = self.params.theta / 2.0 * dw * self.cycle_duration() / 2.0;
                if phase < ECHO_PHASE_THRESHOLD {
                    w.push(Warning::ShortEcho { phase });
                }
            }
        }
        w
    }

    pub fn seed(&self) -> u64 {
        self.noise.as_ref().map_or(0, |n| n.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub label: String,
    pub seed: u64,
    pub version: String,
    /// Compact JSON echo of the configuration.
    pub config: String,
}

/// Fidelity against time for every ensemble member and their mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub mean_fidelity: Vec<f64>,
    /// `members[m][s]`: member `m` at sample `s`.
    pub members: Vec<Vec<f64>>,
    pub metadata: TraceMetadata,
}

impl FidelityTrace {
    fn from_members(times: Vec<f64>, members: Vec<Vec<f64>>, metadata: TraceMetadata) -> Self {
        let n = members.len() as f64;
        let mean_fidelity = (0..times.len())
            .map(|s| members.iter().map(|m| m[s]).sum::<f64>() / n)
            .collect();
        Self {
            times,
            mean_fidelity,
            members,
            metadata,
        }
    }

    /// CSV with `#` metadata lines and header `time_s,mean_fidelity,member_0,…`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::TraceIo(e.to_string());
        writeln!(out, "# label: {}", self.metadata.label).map_err(io)?;
        writeln!(out, "# seed: {}", self.metadata.seed).map_err(io)?;
        writeln!(out, "# version: {}", self.metadata.version).map_err(io)?;
        writeln!(out, "# config: {}", self.metadata.config).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time_s".to_string(), "mean_fidelity".to_string()];
        header.extend((0..self.members.len()).map(|m| format!("member_{m}")));
        let csv_err = |e: csv::Error| Error::TraceIo(e.to_string());
        w.write_record(&header).map_err(csv_err)?;
        for (s, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string(), self.mean_fidelity[s].to_string()];
            row.extend(self.members.iter().map(|m| m[s].to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let err = |m: String| Error::TraceIo(m);
        let mut metadata = TraceMetadata {
            label: String::new(),
            seed: 0,
            version: String::new(),
            config: String::new(),
        };
        let mut body = String::new();
        for line in input.lines() {
            let line = line.map_err(|e| err(e.to_string()))?;
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((key, value)) = meta.trim_start().split_once(": ") {
                    match key {
                        "label" => metadata.label = value.to_string(),
                        "seed" => metadata.seed = value.parse().map_err(|_| err(format!("bad seed `{value}`")))?,
                        "version" => metadata.version = value.to_string(),
                        "config" => metadata.config = value.to_string(),
                        _ => {}
                    }
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let header = reader.headers().map_err(|e| err(e.to_string()))?.clone();
        if header.len() < 2 || &header[0] != "time_s" || &header[1] != "mean_fidelity" {
            return Err(err("header must start with time_s,mean_fidelity".into()));
        }
        let n_members = header.len() - 2;
        let mut times = Vec::new();
        let mut mean_fidelity = Vec::new();
        let mut members = vec![Vec::new(); n_members];
        for record in reader.records() {
            let record = record.map_err(|e| err(e.to_string()))?;
            let parse = |k: usize| -> Result<f64> {
                record[k]
                    .parse()
                    .map_err(|_| err(format!("bad number `{}`", &record[k])))
            };
            times.push(parse(0)?);
            mean_fidelity.push(parse(1)?);
            for (m, col) in members.iter_mut().enumerate() {
                col.push(parse(m + 2)?);
            }
        }
        Ok(Self {
            times,
            mean_fidelity,
            members,
            metadata,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub decoupled: FidelityTrace,
    pub free: FidelityTrace,
    pub warnings: Vec<Warning>,
}

/// Evolves each member through `samples` samples of `steps_per_sample`
/// applications of `plan`, recording the metric at every boundary.
struct TraceRunner<'a> {
    plan: Plan,
    cycles_per_sample: usize,
    samples: usize,
    reference: Reference,
    psi: Option<DVector<C64>>,
    noise: Option<&'a CouplingNoise>,
}

impl TraceRunner<'_> {
    fn metric(&self, u: &CMatrix, v: &CMatrix) -> f64 {
        match &self.psi {
            None => raw_fidelity(u, v),
            Some(psi) => raw_state_fidelity(&(v.adjoint() * u), psi),
        }
    }

    /// Propagator over one sample interval with static couplings, and its
    /// coupling-free counterpart.
    fn static_sample(&self) -> (CMatrix, CMatrix) {
        let dim = self.plan.dim;
        let mut one = CMatrix::identity(dim, dim);
        self.plan.apply_static(&mut one);
        let mut free = CMatrix::identity(dim, dim);
        self.plan.apply_coupling_free(&mut free);
        let pow = |m: &CMatrix| {
            let u = UnitaryOperator::from_matrix_unchecked(dim.trailing_zeros() as usize, m.clone());
            u.pow(self.cycles_per_sample as u64).into_matrix()
        };
        (pow(&one), pow(&free))
    }

    fn run_member(&self, seed: u64, member: usize, ref_step: &CMatrix, static_step: &CMatrix) -> Result<Vec<f64>> {
        let dim = self.plan.dim;
        let mut u = CMatrix::identity(dim, dim);
        let mut split = Split::identity(dim);
        let mut v = CMatrix::identity(dim, dim);
        let mut out = Vec::with_capacity(self.samples + 1);
        out.push(self.metric(&u, &v));
        let mut rng = member_rng(seed, member as u64);
        let mut draw = Vec::new();
        for _ in 0..self.samples {
            match self.noise {
                Some(noise) => {
                    for _ in 0..self.cycles_per_sample {
                        self.plan.apply_noisy(&mut split, noise, &mut rng, &mut draw)?;
                    }
                    u = split.to_complex();
                }
                None => u = static_step * &u,
            }
            if self.reference == Reference::LocalFrame {
                v = ref_step * &v;
            }
            out.push(self.metric(&u, &v));
        }
        Ok(out)
    }

    fn run(&self, seed: u64, ensemble: usize) -> Result<Vec<Vec<f64>>> {
        let (static_step, ref_step) = self.static_sample();
        if self.noise.is_none() {
            let one = self.run_member(seed, 0, &ref_step, &static_step)?;
            return Ok(vec![one; ensemble]);
        }
        (0..ensemble)
            .map(|m| self.run_member(seed, m, &ref_step, &static_step))
            .collect()
    }
}

/// The decoupled run evolves under the compiled physical cycle, the free run
/// under the bare register Hamiltonian in steps of `Δt`; both use member
/// `m`'s generator for their coupling draws.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let (cycles_per_sample, samples) = config.sampling()?;
    let n = config.register.n_qubits();
    let cycle = compile_to_physical(&decoupling_cycle(&config.register, &config.cycle_spec())?)?;

    let mut bare = Schedule::new(n)?;
    bare.push_evolution(config.register.hamiltonian(), config.params.delta_t)?;
    let cycle_plan = Plan::new(&cycle)?;
    let segments_per_cycle = cycle_plan.evolution_count();
    let bare = crate::sequences::repeat(&bare, segments_per_cycle)?;

    let psi = match config.metric {
        Metric::Unitary => None,
        Metric::State => {
            let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            Some(product_state([a, a], n)?)
        }
    };
    let runner = |plan: Plan| TraceRunner {
        plan,
        cycles_per_sample,
        samples,
        reference: config.reference,
        psi: psi.clone(),
        noise: config.noise.as_ref(),
    };
    let times: Vec<f64> = (0..=samples).map(|s| s as f64 * config.sample_interval).collect();
    let meta = |label: &str| TraceMetadata {
        label: label.to_string(),
        seed: config.seed(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_string(config).expect("configs serialize"),
    };
    let seed = config.seed();
    let decoupled = runner(cycle_plan).run(seed, config.ensemble_size)?;
    let free = runner(Plan::new(&bare)?).run(seed, config.ensemble_size)?;
    Ok(ExperimentResult {
        decoupled: FidelityTrace::from_members(times.clone(), decoupled, meta("decoupled")),
        free: FidelityTrace::from_members(times, free, meta("free")),
        warnings: config.warnings(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `−ln F = a t²`, rate `√a`.
    Quadratic,
    /// `−ln F = b t`, rate `b`.
    Linear,
}

/// Least-squares fits of `−ln F` through the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub quadratic: f64,
    pub linear: f64,
    pub ssr_quadratic: f64,
    pub ssr_linear: f64,
    /// The model with the smaller residual; ties go to quadratic.
    pub model: DecayModel,
    pub samples_used: usize,
}

impl DecayFit {
    /// Decay rate in 1/s under `model`.
    pub fn rate(&self, model: DecayModel) -> f64 {
        match model {
            DecayModel::Quadratic => self.quadratic.max(0.0).sqrt(),
            DecayModel::Linear => self.linear,
        }
    }

    pub fn chosen_rate(&self) -> f64 {
        self.rate(self.model)
    }
}

/// Smallest number of samples in a fit window.
pub const MIN_FIT_SAMPLES: usize = 5;
/// Default lower fidelity bound of the fit window.
pub const DEFAULT_FIT_FLOOR: f64 = 0.9;

/// Fits the leading samples of the mean fidelity, up to the first one below
/// `min_fidelity`.
pub fn extract_decay_rate(trace: &FidelityTrace, min_fidelity: f64) -> Result<DecayFit> {
    if trace.times.len() != trace.mean_fidelity.len() {
        return Err(Error::DegenerateFit("times and fidelities differ in length".into()));
    }
    let window = trace
        .mean_fidelity
        .iter()
        .take_while(|&&f| f >= min_fidelity && f > 0.0)
        .count();
    if window < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateFit(format!(
            "only {window} samples have fidelity at least {min_fidelity}; need {MIN_FIT_SAMPLES}"
        )));
    }
    let pts: Vec<(f64, f64)> = trace.times[..window]
        .iter()
        .zip(&trace.mean_fidelity[..window])
        .map(|(&t, &f)| (t, -f.ln()))
        .collect();
    let (mut t2, mut t4, mut yt2, mut yt) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        t2 += t * t;
        t4 += t.powi(4);
        yt2 += y * t * t;
        yt += y * t;
    }
    if t2 == 0.0 {
        return Err(Error::DegenerateFit("all samples are at t = 0".into()));
    }
    let quadratic = yt2 / t4;
    let linear = yt / t2;
    let ssr = |f: &dyn Fn(f64) -> f64| pts.iter().map(|&(t, y)| (y - f(t)).powi(2)).sum::<f64>();
    let ssr_quadratic = ssr(&|t| quadratic * t * t);
    let ssr_linear = ssr(&|t| linear * t);
    Ok(DecayFit {
        quadratic,
        linear,
        ssr_quadratic,
        ssr_linear,
        model: if ssr_quadratic <= ssr_linear {
            DecayModel::Quadratic
        } else {
            DecayModel::Linear
        },
        samples_used: window,
    })
}

/// Free and decoupled fits compared under the model chosen for the free run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateComparison {
    pub free: DecayFit,
    pub decoupled: DecayFit,
    pub model: DecayModel,
    pub free_rate: f64,
    pub decoupled_rate: f64,
    pub ratio: f64,
}

pub fn compare_decay(free: &FidelityTrace, decoupled: &FidelityTrace, min_fidelity: f64) -> Result<RateComparison> {
    let f = extract_decay_rate(free, min_fidelity)?;
    let d = extract_decay_rate(decoupled, min_fidelity)?;
    let model = f.model;
    let free_rate = f.rate(model);
    let decoupled_rate = d.rate(model);
    Ok(RateComparison {
        ratio: free_rate / decoupled_rate,
        free: f,
        decoupled: d,
        model,
        free_rate,
        decoupled_rate,
    })
}

/// Configuration of the four-spin lattice demonstration: caption-preset
/// noise, `Δt = 0.1 µs`, `θ = 1/20`, 0.5 ms samples over 40 ms, eight
/// members, no echo.
///
/// An echo inside each 0.5 ms cycle would reverse the transverse field
/// before it has wound one radian, leaving the zz coupling unaveraged; the
/// local-frame reference already contains the transverse field.
pub fn demo_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        register: crate::systems::demo_register(),
        params: BlockParams::new(1e-7, 0.05).expect("valid block"),
        noise: Some(CouplingNoise::demo(crate::systems::NoisePreset::Caption, seed)),
        total_time: 0.04,
        sample_interval: 5e-4,
        repetitions: 625,
        iterations: 1,
        hahn_echo: false,
        ensemble_size: 8,
        reference: Reference::LocalFrame,
        metric: Metric::Unitary,
    }
}
