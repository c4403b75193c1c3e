//! Global-pulse decoupling of Ising-coupled qubit registers.

pub mod effective;
pub mod error;
pub mod frame;
pub mod magnus;
pub mod operator;
pub mod sequences;
pub mod simulator;
mod split;
pub mod systems;
pub mod terms;
pub mod warning;

pub use error::{Error, Result};
