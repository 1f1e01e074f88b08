//! Beta-shifts: expansions of 1, the language automaton, partition functions,
//! pressure and weak-Gibbs diagnostics for equilibrium measures.

pub mod digits;
pub mod error;
pub mod gibbs;
pub mod language;
pub mod presets;
pub mod thermo;

pub use error::{Error, Result};
