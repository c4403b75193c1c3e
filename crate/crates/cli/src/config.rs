//! JSON configuration document. Frequencies are in Hz, times in seconds,
//! geometry in metres and tesla; everything is converted to rad/s on load.
//!
//! The defaults reproduce the four-spin lattice demonstration exactly.

use std::path::{Path, PathBuf};

use globalpulse::sequences::BlockParams;
use globalpulse::simulator::{ExperimentConfig, Metric, Reference, DEFAULT_FIT_FLOOR};
use globalpulse::systems::{
    build_register, dipolar_coupling, hz, zeeman_from_gradient, CouplingNoise, EdgeNoise, Geometry,
    NoisePreset, RegisterSpec, Topology, DEMO_COUPLING_HZ, DEMO_ZEEMAN_HZ,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigDocument {
    pub register: RegisterSection,
    pub pulse: PulseSection,
    pub noise: NoiseSection,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

/// Either explicit frequencies on `topology`, or a `geometry` from which
/// both the Zeeman shifts and the dipolar couplings are derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegisterSection {
    pub topology: Topology,
    /// One per site.
    pub zeeman_hz: Vec<f64>,
    /// One per topology edge, in the topology's edge order.
    pub coupling_hz: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub delta_t_s: f64,
    pub theta: f64,
    pub iterations: usize,
    /// Pair repetitions per nesting level.
    pub repetitions: usize,
    pub hahn_echo: bool,
}

/// Per-edge normal couplings. Missing means fall back to the register's
/// couplings and the preset's deviations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub enabled: bool,
    pub preset: NoisePreset,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_hz: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_hz: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub total_time_s: f64,
    pub sample_interval_s: f64,
    pub ensemble: usize,
    pub metric: Metric,
    pub reference: Reference,
    /// Samples above this mean fidelity enter the decay fit.
    pub fit_floor: f64,
}

/// File names are relative to `dir`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub decoupled: String,
    pub free: String,
    pub summary: String,
    /// gnuplot script plotting both traces, written only when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gnuplot: Option<String>,
}

impl Default for RegisterSection {
    fn default() -> Self {
        Self {
            topology: Topology::SquareLattice {
                rows: 2,
                cols: 2,
                diagonals: true,
            },
            zeeman_hz: DEMO_ZEEMAN_HZ.to_vec(),
            coupling_hz: DEMO_COUPLING_HZ.to_vec(),
            geometry: None,
        }
    }
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            delta_t_s: 1e-7,
            theta: 0.05,
            iterations: 1,
            repetitions: 625,
            hahn_echo: false,
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            enabled: true,
            preset: NoisePreset::Caption,
            seed: 1,
            mean_hz: None,
            std_hz: None,
        }
    }
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            total_time_s: 0.04,
            sample_interval_s: 5e-4,
            ensemble: 8,
            metric: Metric::Unitary,
            reference: Reference::LocalFrame,
            fit_floor: DEFAULT_FIT_FLOOR,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            decoupled: "decoupled.csv".into(),
            free: "free.csv".into(),
            summary: "summary.json".into(),
            gnuplot: None,
        }
    }
}

/// Parses `text`, naming `origin` and the offending line on failure.
pub fn parse(text: &str, origin: &str) -> Result<ConfigDocument, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!("{origin}:{}:{}: {}", e.line(), e.column(), strip_position(&e)))
    })
}

/// serde_json appends " at line L column C"; the prefix already says where.
fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(k) => s[..k].to_string(),
        None => s,
    }
}

/// Reads the file if given, then applies each `dotted.key=value` override in
/// order. Values parse as JSON literals and fall back to plain strings.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<ConfigDocument, CliError> {
    let doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            parse(&text, &p.display().to_string())?
        }
        None => ConfigDocument::default(),
    };
    if overrides.is_empty() {
        return Ok(doc);
    }
    let mut value = serde_json::to_value(&doc).expect("documents serialize");
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("--set: {e}")))
}

pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let bad = |m: &str| CliError::Config(format!("--set {assignment}: {m}"));
    let (key, raw) = assignment.split_once('=').ok_or_else(|| bad("expected dotted.key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(bad("empty key segment"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    for (depth, part) in path.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| bad(&format!("`{}` is not a section", path[..depth].join("."))))?;
        if depth + 1 == path.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("path has at least one segment")
}

impl ConfigDocument {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn register(&self) -> Result<RegisterSpec, CliError> {
        let r = &self.register;
        let (omegas, couplings) = match &r.geometry {
            Some(g) => {
                if !r.zeeman_hz.is_empty() || !r.coupling_hz.is_empty() {
                    return Err(CliError::Config(
                        "register: give either geometry or zeeman_hz/coupling_hz, not both".into(),
                    ));
                }
                if g.positions.len() != r.topology.n_qubits() {
                    return Err(CliError::Config(format!(
                        "register: topology has {} sites, geometry has {}",
                        r.topology.n_qubits(),
                        g.positions.len()
                    )));
                }
                let omegas = zeeman_from_gradient(g)?;
                let js = r
                    .topology
                    .edges()
                    .iter()
                    .map(|&(a, b)| dipolar_coupling(g, a, b))
                    .collect::<globalpulse::error::Result<Vec<_>>>()?;
                (omegas, js)
            }
            None => (
                r.zeeman_hz.iter().map(|&f| hz(f)).collect(),
                r.coupling_hz.iter().map(|&f| hz(f)).collect(),
            ),
        };
        Ok(build_register(&r.topology, &omegas, &couplings)?)
    }

    /// Preset deviations: square-lattice diagonals get the diagonal value,
    /// every other edge the adjacent one.
    fn noise(&self, register: &RegisterSpec) -> Result<Option<CouplingNoise>, CliError> {
        let n = &self.noise;
        if !n.enabled {
            return Ok(None);
        }
        let n_edges = register.edges().len();
        let per_edge = |v: &Option<Vec<f64>>, name: &str| -> Result<Option<Vec<f64>>, CliError> {
            match v {
                Some(v) if v.len() != n_edges => Err(CliError::Config(format!(
                    "noise.{name} has {} entries for {n_edges} edges",
                    v.len()
                ))),
                Some(v) => Ok(Some(v.iter().map(|&f| hz(f)).collect())),
                None => Ok(None),
            }
        };
        let means = per_edge(&n.mean_hz, "mean_hz")?.unwrap_or_else(|| register.couplings());
        let stds = match per_edge(&n.std_hz, "std_hz")? {
            Some(s) => s,
            None => {
                let (adj, diag) = n.preset.std_dev_hz();
                let n_diag = match self.register.topology {
                    Topology::SquareLattice {
                        rows,
                        cols,
                        diagonals: true,
                    } => 2 * rows.saturating_sub(1) * cols.saturating_sub(1),
                    _ => 0,
                };
                (0..n_edges)
                    .map(|k| hz(if k + n_diag < n_edges { adj } else { diag }))
                    .collect()
            }
        };
        let edges = means
            .into_iter()
            .zip(stds)
            .map(|(mean, std_dev)| EdgeNoise { mean, std_dev })
            .collect();
        Ok(Some(CouplingNoise::new(edges, n.seed)?))
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let register = self.register()?;
        let noise = self.noise(&register)?;
        let e = &self.experiment;
        let config = ExperimentConfig {
            noise,
            register,
            params: BlockParams::new(self.pulse.delta_t_s, self.pulse.theta)?,
            total_time: e.total_time_s,
            sample_interval: e.sample_interval_s,
            repetitions: self.pulse.repetitions,
            iterations: self.pulse.iterations,
            hahn_echo: self.pulse.hahn_echo,
            ensemble_size: e.ensemble,
            reference: e.reference,
            metric: e.metric,
        };
        config.sampling()?;
        if !(e.fit_floor > 0.0 && e.fit_floor < 1.0) {
            return Err(CliError::Config(format!(
                "experiment.fit_floor {} must lie in (0, 1)",
                e.fit_floor
            )));
        }
        Ok(config)
    }

    pub fn output_path(&self, name: &str) -> PathBuf {
        self.output.dir.join(name)
    }
}
