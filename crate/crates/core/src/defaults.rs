//! Physics defaults, all in one table. Device values follow the narrative
//! geometry of a patterned-substrate device: electrodes ~0.5 µm below the
//! surface with ~0.5 µm pitch, B⊥ = 1.5 T, T = 10 mK.

/// Electrode sphere radius, nm.
pub const ELECTRODE_RADIUS_NM: f64 = 100.0;
/// Depth of electrode centers below the helium surface, nm.
pub const ELECTRODE_DEPTH_NM: f64 = 500.0;
/// Nearest-neighbour site spacing, nm.
pub const SITE_SPACING_NM: f64 = 500.0;
pub const MAGNETIC_FIELD_T: f64 = 1.5;
pub const TEMPERATURE_K: f64 = 0.010;
/// Capacitor pressing field, V/cm.
pub const BASE_PRESSING_FIELD: f64 = 0.0;
/// Electron density for ensemble diagnostics, cm⁻².
pub const ELECTRON_DENSITY_CM2: f64 = 1e8;

/// RMS thermal surface displacement δ_T, cm.
pub const SURFACE_DISPLACEMENT_CM: f64 = 2e-9;
/// Image-field contribution to the effective pressing field E_eff, V/cm.
pub const IMAGE_FIELD: f64 = 100.0;
/// Ripplon band used by the optional thermal δ_T model, cm⁻¹.
pub const RIPPLON_K_MIN: f64 = 1e2;
pub const RIPPLON_K_MAX: f64 = 5e5;

/// Working frequency used for figures of merit, s⁻¹.
pub const WORKING_FREQUENCY: f64 = 1e9;

/// Microwave field amplitude for one-qubit gates, V/cm.
pub const MICROWAVE_FIELD: f64 = 1.0;
/// Spectators are parked at least this many Ω_sw away from every other qubit.
pub const PARK_FACTOR: f64 = 50.0;
/// Floor for the parking detuning when a register has no couplings, rad/ns.
pub const MIN_PARK_DETUNING: f64 = 0.5;
/// Sweep edges sit at this many max(Ω_sw, √α) from the crossing.
pub const SWEEP_TAIL_FACTOR: f64 = 40.0;
/// Largest electrode excursion the compiler may request, mV.
pub const MAX_VOLTAGE_MV: f64 = 50.0;
/// Largest Rabi rate the validator accepts, rad/ns.
pub const MAX_RABI_RATE: f64 = 10.0;
/// Schedule duration × T2⁻¹ above which the validator warns.
pub const BUDGET_THRESHOLD: f64 = 1e-2;

/// Integrator tolerances.
pub const RTOL: f64 = 1e-10;
pub const ATOL: f64 = 1e-12;
/// Register-size limits for pure-state and density-matrix runs.
pub const MAX_PURE_SITES: usize = 10;
pub const MAX_DENSITY_SITES: usize = 6;
