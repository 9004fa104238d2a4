use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::evolve::{evolve, EvolveOptions, Sampling, Trajectory};
use super::hamiltonian::COUPLING_NORMALIZATION;
use super::schedule::{ControlSchedule, MicrowavePulse, PulseTarget};
use super::state::RegisterState;
use crate::defaults;
use crate::device::QubitParams;
use crate::error::{Error, Result};
use crate::units;

/// Rabi rate Ω_R = e·E_RF·|z₁₂|/ħ, rad/ns, for a microwave field in V/cm and
/// a dipole matrix element in nm.
pub fn rabi_rate(e_rf: f64, z12: f64) -> f64 {
    2.0 * PI * units::field_ghz_per_vcm_nm() * e_rf * z12.abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RabiOptions {
    /// Qubit detuning from the carrier, rad/ns.
    pub detuning: f64,
    pub samples: usize,
}

impl Default for RabiOptions {
    fn default() -> Self {
        RabiOptions {
            detuning: 0.0,
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RabiRun {
    pub rabi_rate: f64,
    pub trajectory: Trajectory,
}

/// Drive one site, starting in its ground state, with a rectangular pulse of
/// amplitude `e_rf` (V/cm) for `duration` ns. The site is simulated alone.
pub fn rabi_experiment(
    params: &QubitParams,
    site: usize,
    e_rf: f64,
    duration: f64,
    options: &RabiOptions,
) -> Result<RabiRun> {
    let sp = *params
        .sites
        .get(site)
        .ok_or_else(|| Error::range("dynamics", format!("site {site}")))?;
    if !(e_rf >= 0.0 && e_rf.is_finite() && duration > 0.0 && duration.is_finite()) {
        return Err(Error::range("dynamics", "Rabi field or duration"));
    }
    let omega = rabi_rate(e_rf, sp.z12);
    let single = QubitParams::new(vec![sp], Array2::zeros((1, 1)))?;
    let mut s = ControlSchedule::new(1, duration);
    if options.detuning != 0.0 {
        s.hold(0, 0.0, duration, options.detuning)?;
    }
    if omega > 0.0 {
        s.add_pulse(MicrowavePulse::rectangular(
            PulseTarget::Site(0),
            omega,
            0.0,
            0.0,
            duration,
        ))?;
    }
    let trajectory = evolve(
        &single,
        &s,
        &RegisterState::ground(1)?,
        None,
        &Sampling::Uniform(options.samples),
        &EvolveOptions::default(),
    )?;
    Ok(RabiRun {
        rabi_rate: omega,
        trajectory,
    })
}

/// Generalized Rabi formula, the oracle for detuned drives.
pub fn rabi_formula(omega: f64, detuning: f64, t: f64) -> f64 {
    let w = omega.hypot(detuning);
    if w == 0.0 {
        return 0.0;
    }
    (omega / w).powi(2) * (0.5 * w * t).sin().powi(2)
}

/// Landau–Zener survival exp(−πg²) for g = Ω_sw/√α.
pub fn lz_prediction(g: f64) -> f64 {
    (-PI * g * g).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LzOptions {
    /// Half-span T of the sweep (ns); default puts the edges at
    /// SWEEP_TAIL_FACTOR·max(Ω_sw, √α) from the crossing.
    pub half_span: Option<f64>,
    pub samples: usize,
    pub rtol: f64,
}

impl Default for LzOptions {
    fn default() -> Self {
        LzOptions {
            half_span: None,
            samples: 401,
            rtol: defaults::RTOL,
        }
    }
}

/// Edges closer than this many max(Ω_sw, √α) to the crossing are rejected.
pub const MIN_SWEEP_TAIL: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LzRun {
    pub g: f64,
    /// Sweep rate α: Δ₁ = −α(t − T), Δ₂ = +α(t − T), rad/ns².
    pub alpha: f64,
    pub half_span: f64,
    /// Probability of staying in the diabatic state |qubit 1 excited⟩,
    /// measured against the instantaneous eigenstates at the sweep edges.
    pub survival: f64,
    /// Raw excitation probability of qubit 1 at the end of the sweep.
    pub raw_survival: f64,
    pub prediction: f64,
    /// Schedule times run over [0, 2T]; the crossing is at T.
    pub trajectory: Trajectory,
}

/// Sweep two qubits through resonance starting from qubit 1 excited and
/// measure the diabatic survival probability. The sweep rate is chosen as
/// α = (Ω_sw/g)² so that the adiabaticity parameter is `g`. For g = 0 the
/// exchange is switched off and α = Ω_sw² (or 1 when uncoupled).
pub fn lz_sweep_experiment(params: &QubitParams, g: f64, options: &LzOptions) -> Result<LzRun> {
    if params.len() != 2 {
        return Err(Error::range("dynamics", "Landau–Zener sweep needs exactly two sites"));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::range("dynamics", format!("adiabaticity g = {g}")));
    }
    let omega = params.coupling[[0, 1]];
    let (alpha, omega_eff) = if g > 0.0 {
        if omega <= 0.0 {
            return Err(Error::range("dynamics", "Landau–Zener sweep needs Ω_sw > 0 for g > 0"));
        }
        ((omega / g).powi(2), omega)
    } else if omega > 0.0 {
        (omega * omega, 0.0)
    } else {
        (1.0, 0.0)
    };
    let scale = omega_eff.max(alpha.sqrt());
    let half_span = options.half_span.unwrap_or(defaults::SWEEP_TAIL_FACTOR * scale / alpha);
    if !(alpha * half_span >= MIN_SWEEP_TAIL * scale) {
        return Err(Error::Span(format!(
            "edges at α·T = {:.3e} rad/ns, need ≥ {MIN_SWEEP_TAIL}·max(Ω_sw, √α) = {:.3e}",
            alpha * half_span,
            MIN_SWEEP_TAIL * scale
        )));
    }
    let edge = alpha * half_span;
    let mut sch = ControlSchedule::new(2, 2.0 * half_span);
    sch.add_ramp(0, 0.0, 2.0 * half_span, edge, -edge)?;
    sch.add_ramp(1, 0.0, 2.0 * half_span, -edge, edge)?;
    let pair = QubitParams::new(params.sites.clone(), {
        let mut c = Array2::zeros((2, 2));
        c[[0, 1]] = omega_eff;
        c[[1, 0]] = omega_eff;
        c
    })?;

    // One-excitation block in (|10⟩, |01⟩) = (index 1, index 2):
    // [[d, J], [J, −d]] with d = (Δ₁ − Δ₂)/2.
    let j = 0.5 * COUPLING_NORMALIZATION * omega_eff;
    let theta_in = 0.5 * j.atan2(edge);
    let theta_out = 0.5 * j.atan2(-edge);
    let mut amps = Array1::zeros(4);
    amps[1] = C64::new(theta_in.cos(), 0.0);
    amps[2] = C64::new(theta_in.sin(), 0.0);
    let initial = RegisterState::pure(2, amps)?;
    let trajectory = evolve(
        &pair,
        &sch,
        &initial,
        None,
        &Sampling::Uniform(options.samples),
        &EvolveOptions {
            rtol: options.rtol,
            ..Default::default()
        },
    )?;
    let RegisterState::Pure { amplitudes, .. } = &trajectory.final_state else {
        unreachable!("pure evolution")
    };
    let lower = amplitudes[1] * -theta_out.sin() + amplitudes[2] * theta_out.cos();
    let survival = lower.norm_sqr();
    let raw_survival = trajectory.final_state.excitation_probability(0);
    Ok(LzRun {
        g,
        alpha,
        half_span,
        survival,
        raw_survival,
        prediction: lz_prediction(g),
        trajectory,
    })
}
