//! Non-fatal validity diagnostics.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A modelling assumption that holds only weakly for the given inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// `min |ω_j − ω_k| / max J` over coupled pairs is below 100.
    WeakGradient { ratio: f64 },
    /// `θ` exceeds 0.2, outside the small-angle regime.
    LargeTheta { theta: f64 },
    /// `8kΔt·|ω_j − ω_k|` is below 10 for some coupled pair.
    ShortRepetition { repetitions: usize, product: f64 },
    /// `θ|ω_j − ω_k| / J_jk` is below 10 for some coupled pair.
    WeakSecularity { ratio: f64 },
    /// The transverse Zeeman difference winds less than 100 rad between a
    /// cycle start and its echo, so the echo undoes the rotating-wave
    /// averaging of the coupling every cycle.
    ShortEcho { phase: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::WeakGradient { ratio } => write!(
                f,
                "Zeeman gradient is weak: min |ω_j - ω_k| / max J = {ratio:.3} < 100"
            ),
            Warning::LargeTheta { theta } => {
                write!(f, "theta = {theta} exceeds the small-angle threshold 0.2")
            }
            Warning::ShortRepetition {
                repetitions,
                product,
            } => write!(
                f,
                "{repetitions} repetitions give 8kΔt·|Δω| = {product:.3} < 10; rotating-wave averaging is incomplete"
            ),
            Warning::WeakSecularity { ratio } => write!(
                f,
                "rotating-wave condition is weak: min θ|ω_j - ω_k| / J = {ratio:.3} < 10"
            ),
            Warning::ShortEcho { phase } => write!(
                f,
                "echo interval is short: (θ/2)|ω_j - ω_k| over half a cycle is {phase:.3} rad < 100; \
                 residual zz coupling accumulates every cycle"
            ),
        }
    }
}
