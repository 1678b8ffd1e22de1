//! Numerical laboratory for the nonlocal double sine-Gordon equation
//!
//! ```text
//! sin(phi) + 2A sin(2 phi) + phi_tt = (1/2 lambda) d/dx ∫ exp(-|x - s| / lambda) phi_s ds
//! ```
//!
//! which models a Josephson fluxon in a junction with thin superconducting
//! layers. The crate finds the discrete set of radiationless kink velocities
//! by shooting on an equivalent four-dimensional reversible ODE, compares
//! them with closed-form asymptotics, and time-integrates the PDE to watch a
//! launched kink relax onto one of those velocities.

pub mod asymptotics;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod io;
pub mod model;
pub mod ode;
pub mod operator;
pub mod traveling_wave;

pub use error::{NdsgError, Result};
pub use exec::Execution;
pub use model::ModelParams;
