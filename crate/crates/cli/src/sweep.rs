//! One-parameter sweeps of the residual coupling and the decay-rate ratio.

use std::io::Write;

use clap::ValueEnum;
use globalpulse::effective::residual_coupling;
use globalpulse::simulator::{compare_decay, run_experiment};

use crate::config::ConfigDocument;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Parameter {
    Theta,
    /// Segment duration. Repetitions are rescaled to keep the cycle length.
    DeltaT,
    /// Zeeman frequencies are scaled so `min|Δω| / max J` takes each value.
    GradientRatio,
}

impl Parameter {
    pub fn column(self) -> &'static str {
        match self {
            Parameter::Theta => "theta",
            Parameter::DeltaT => "delta_t_s",
            Parameter::GradientRatio => "gradient_ratio",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub value: f64,
    pub theta: f64,
    /// Largest `|yy / J|` over edges at the last nesting level.
    pub residual_coupling: f64,
    /// Free over decoupled decay rate; `None` when not simulated.
    pub decay_ratio: Option<f64>,
}

/// `doc` with the swept parameter set to `value`.
pub fn configure(doc: &ConfigDocument, parameter: Parameter, value: f64) -> Result<ConfigDocument, CliError> {
    let mut d = doc.clone();
    match parameter {
        Parameter::Theta => d.pulse.theta = value,
        Parameter::DeltaT => {
            let k = doc.pulse.repetitions as f64 * doc.pulse.delta_t_s / value;
            if !(k >= 1.0 && (k - k.round()).abs() <= 1e-9 * k) {
                return Err(CliError::Config(format!(
                    "delta_t_s {value} does not divide the {} s cycle into whole repetitions",
                    8.0 * doc.pulse.repetitions as f64 * doc.pulse.delta_t_s
                )));
            }
            d.pulse.delta_t_s = value;
            d.pulse.repetitions = k.round() as usize;
        }
        Parameter::GradientRatio => {
            let current = doc.register()?.gradient_ratio();
            if !(current.is_finite() && current > 0.0 && value > 0.0) {
                return Err(CliError::Config(format!(
                    "gradient ratio {value} cannot be reached from {current}"
                )));
            }
            if d.register.geometry.is_some() {
                return Err(CliError::Config(
                    "gradient-ratio sweeps need explicit zeeman_hz".into(),
                ));
            }
            let s = value / current;
            d.register.zeeman_hz.iter_mut().for_each(|f| *f *= s);
        }
    }
    Ok(d)
}

pub fn run(doc: &ConfigDocument, parameter: Parameter, values: &[f64], simulate: bool) -> Result<Vec<Row>, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    values
        .iter()
        .map(|&value| {
            let d = configure(doc, parameter, value)?;
            let config = d.experiment()?;
            let levels = residual_coupling(&config.register, &config.params, config.iterations)?;
            let last = levels.last().expect("at least one level");
            let residual = last.reduction.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            let decay_ratio = if simulate {
                let result = run_experiment(&config)?;
                Some(compare_decay(&result.free, &result.decoupled, d.experiment.fit_floor)?.ratio)
            } else {
                None
            };
            Ok(Row {
                value,
                theta: config.params.theta,
                residual_coupling: residual,
                decay_ratio,
            })
        })
        .collect()
}

/// Least-squares `c` in `residual = c θ²` and the largest relative deviation
/// of any row from `(4/3) θ²`.
pub fn theta_squared_fit(rows: &[Row]) -> (f64, f64) {
    let num: f64 = rows.iter().map(|r| r.residual_coupling * r.theta.powi(2)).sum();
    let den: f64 = rows.iter().map(|r| r.theta.powi(4)).sum();
    let worst = rows
        .iter()
        .map(|r| {
            let want = 4.0 / 3.0 * r.theta * r.theta;
            (r.residual_coupling - want).abs() / want
        })
        .fold(0.0f64, f64::max);
    (num / den, worst)
}

pub fn write_csv<W: Write>(mut out: W, parameter: Parameter, rows: &[Row]) -> std::io::Result<()> {
    writeln!(out, "{},residual_coupling,decay_ratio", parameter.column())?;
    for r in rows {
        let ratio = r.decay_ratio.map_or(String::new(), |x| x.to_string());
        writeln!(out, "{},{},{}", r.value, r.residual_coupling, ratio)?;
    }
    let (c, worst) = theta_squared_fit(rows);
    writeln!(
        out,
        "# fit residual_coupling = c*theta^2: c = {c:.6} (4/3 = {:.6}), max relative deviation {worst:.3e}",
        4.0 / 3.0
    )
}
