//! Order-of-magnitude relaxation and dephasing estimators driven by
//! ripplon scattering, and the rate budget built from them.

use crate::defaults;
use crate::device::QubitParams;
use crate::dynamics::SiteRates;
use crate::error::{Error, Result};
use crate::units::{cgs, Constants};

/// ħω_r/k_B in K for the capillary dispersion ω_r = √(σk³/ρ), k in cm⁻¹.
pub fn ripplon_energy(k: f64, constants: &Constants) -> f64 {
    let omega = (constants.surface_tension * k.powi(3) / constants.helium_density).sqrt();
    cgs::HBAR * omega / cgs::BOLTZMANN
}

/// Intraband momentum relaxation τ⁻¹ = e²E_eff²/(4σħ), s⁻¹, for E_eff in V/cm.
/// The ħ turns the energy e²E²/4σ into a rate.
pub fn intraband_rate(e_eff: f64, constants: &Constants) -> f64 {
    let e_field = e_eff / cgs::VOLTS_PER_STATVOLT;
    let e = cgs::ELEMENTARY_CHARGE;
    e * e * e_field * e_field / (4.0 * constants.surface_tension * cgs::HBAR)
}

/// T1⁻¹ = (R/ħ)(δ_T/r_B)², s⁻¹. `delta_t` in cm, `bohr_nm` in nm,
/// `rydberg_rate` = R/ħ in s⁻¹.
pub fn t1_estimate(delta_t: f64, bohr_nm: f64, rydberg_rate: f64) -> f64 {
    rydberg_rate * (delta_t / (bohr_nm * 1e-7)).powi(2)
}

/// T2⁻¹ = prefactor·(δ_T/r_B)⁴, s⁻¹.
pub fn t2_estimate(delta_t: f64, bohr_nm: f64, prefactor_rate: f64) -> f64 {
    prefactor_rate * (delta_t / (bohr_nm * 1e-7)).powi(4)
}

/// RMS surface displacement from thermally excited capillary waves,
/// δ_T² = (k_BT/4πσ)·ln(k_max/k_min), cm. An extension: the default budget
/// uses a fixed δ_T.
pub fn thermal_displacement(temperature: f64, k_min: f64, k_max: f64, constants: &Constants) -> f64 {
    let var =
        cgs::BOLTZMANN * temperature / (4.0 * std::f64::consts::PI * constants.surface_tension) * (k_max / k_min).ln();
    var.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceDisplacement {
    /// δ_T in cm.
    Fixed(f64),
    /// Capillary-wave model over the ripplon band [k_min, k_max] cm⁻¹.
    Thermal { k_min: f64, k_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceModel {
    pub displacement: SurfaceDisplacement,
    /// Added to the largest site pressing field to form E_eff, V/cm.
    pub image_field: f64,
    /// T2 prefactor, s⁻¹; `None` uses R/ħ.
    pub t2_prefactor: Option<f64>,
}

impl Default for DecoherenceModel {
    fn default() -> Self {
        DecoherenceModel {
            displacement: SurfaceDisplacement::Fixed(defaults::SURFACE_DISPLACEMENT_CM),
            image_field: defaults::IMAGE_FIELD,
            t2_prefactor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBudget {
    /// V/cm
    pub e_eff: f64,
    /// cm
    pub delta_t: f64,
    /// s⁻¹
    pub tau_intra_inv: f64,
    pub t1_inv: f64,
    pub t2_inv: f64,
    /// Working frequency Ω, s⁻¹.
    pub omega: f64,
    pub omega_t1: f64,
    pub omega_t2: f64,
}

impl RateBudget {
    /// Per-site rates for simulation, in ns. The estimators are independent,
    /// so T2 is capped at 2·T1 to satisfy the Lindblad consistency condition.
    pub fn site_rates(&self) -> SiteRates {
        let t1 = 1e9 / self.t1_inv;
        let t2 = (1e9 / self.t2_inv).min(2.0 * t1);
        SiteRates { t1, t2 }
    }
}

fn figure_of_merit(omega: f64, rate: f64) -> f64 {
    if omega == 0.0 {
        0.0
    } else {
        omega / rate
    }
}

/// Compose the estimators for a register at temperature `temperature` (K)
/// and working frequency `omega` (s⁻¹).
pub fn rate_budget(
    params: &QubitParams,
    constants: &Constants,
    temperature: f64,
    omega: f64,
    model: &DecoherenceModel,
) -> Result<RateBudget> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::range("decoherence", format!("temperature {temperature} K")));
    }
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::range("decoherence", format!("working frequency {omega} s⁻¹")));
    }
    if !(model.image_field >= 0.0) {
        return Err(Error::range("decoherence", "image field"));
    }
    let delta_t = match model.displacement {
        SurfaceDisplacement::Fixed(d) if d >= 0.0 => d,
        SurfaceDisplacement::Fixed(d) => return Err(Error::range("decoherence", format!("δ_T = {d} cm"))),
        SurfaceDisplacement::Thermal { k_min, k_max } => {
            if !(0.0 < k_min && k_min < k_max) {
                return Err(Error::range("decoherence", "ripplon band"));
            }
            thermal_displacement(temperature, k_min, k_max, constants)
        }
    };
    let pressing = params.sites.iter().map(|s| s.pressing_field.abs()).fold(0.0, f64::max);
    let e_eff = pressing + model.image_field;
    let t1_inv = t1_estimate(delta_t, constants.bohr_nm, constants.rydberg_rate());
    let prefactor = model.t2_prefactor.unwrap_or_else(|| constants.rydberg_rate());
    let t2_inv = t2_estimate(delta_t, constants.bohr_nm, prefactor);
    Ok(RateBudget {
        e_eff,
        delta_t,
        tau_intra_inv: intraband_rate(e_eff, constants),
        t1_inv,
        t2_inv,
        omega,
        omega_t1: figure_of_merit(omega, t1_inv),
        omega_t2: figure_of_merit(omega, t2_inv),
    })
}
