//! Register dynamics in the frame rotating at each qubit's working
//! frequency: control schedules, the Hamiltonian, Schrödinger and Lindblad
//! evolution, and the Rabi and Landau–Zener experiments.

mod evolve;
mod experiments;
mod hamiltonian;
pub mod integrator;
mod schedule;
mod state;

pub use evolve::{evolve, EvolveOptions, Sampling, SiteRates, Trajectory};
pub use experiments::{
    lz_prediction, lz_sweep_experiment, rabi_experiment, rabi_formula, rabi_rate, LzOptions, LzRun, RabiOptions,
    RabiRun, MIN_SWEEP_TAIL,
};
pub use hamiltonian::{build_hamiltonian, COUPLING_NORMALIZATION};
pub use schedule::{sci, ControlSchedule, Controls, DetuningChannel, Envelope, MicrowavePulse, PulseTarget, Ramp};
pub use state::{RegisterState, EIGEN_TOLERANCE, HERMITIAN_TOLERANCE, STATE_TOLERANCE, TRACE_TOLERANCE};
