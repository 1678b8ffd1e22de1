//! Time integration of the full equation on a finite grid, with absorbing
//! edge layers, front tracking and energy bookkeeping.

pub mod energy;
pub mod front;
pub mod run;
pub mod state;
pub mod stepper;

pub use energy::{energy_of_samples, EnergyReport};
pub use front::{crossings, track_front, FrontTrace, FrontTracker};
pub use run::{core_deviation, interior_energy, run, EnergySample, RunOutput, RunSettings, Snapshot};
pub use state::{make_initial_state, FieldState, Grid, InitialProfile, Launch, Sponge};
pub use stepper::{stability_bound, step, Stepper};
