//! wasm-bindgen front-end for the browser demo in `www/`.
//!
//! Each view is a struct built by a plain Rust constructor (`compute`), so the
//! numerics can be tested natively; the exported `new` only maps errors.

use helium_qc::device::{qubit_params, DeviceSpec, QubitParams};
use helium_qc::dynamics::{self, LzOptions, RabiOptions};
use helium_qc::spectrum::{self, GridSpec, VerticalPotential};
use helium_qc::units::Constants;
use wasm_bindgen::prelude::*;

fn js(e: helium_qc::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Lowest two vertical states at one pressing field.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct VerticalStates {
    z: Vec<f64>,
    psi1: Vec<f64>,
    psi2: Vec<f64>,
    potential: Vec<f64>,
    energies: Vec<f64>,
    z12: f64,
}

impl VerticalStates {
    pub fn compute(field: f64, levels: usize) -> helium_qc::Result<Self> {
        let c = Constants::default();
        let pot = VerticalPotential::new(&c, field);
        let s = spectrum::solve_vertical(&pot, levels.max(2), &GridSpec::default())?;
        let z = s.z_values();
        let potential = z.iter().map(|&z| pot.energy_at(z)).collect();
        Ok(VerticalStates {
            psi1: s.level(1)?.psi.clone(),
            psi2: s.level(2)?.psi.clone(),
            energies: s.levels.iter().map(|l| l.energy).collect(),
            z12: s.dipole_matrix_element(1, 2)?.abs(),
            potential,
            z,
        })
    }

    pub fn transition(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

#[wasm_bindgen]
impl VerticalStates {
    /// Solve for `levels` (≥ 2) states at `field` V/cm.
    #[wasm_bindgen(constructor)]
    pub fn new(field: f64, levels: usize) -> Result<VerticalStates, JsError> {
        Self::compute(field, levels).map_err(js)
    }

    /// Grid, nm.
    pub fn z(&self) -> Vec<f64> {
        self.z.clone()
    }

    /// ψ₁(z), nm^-1/2.
    pub fn psi1(&self) -> Vec<f64> {
        self.psi1.clone()
    }

    pub fn psi2(&self) -> Vec<f64> {
        self.psi2.clone()
    }

    /// V(z), GHz.
    pub fn potential(&self) -> Vec<f64> {
        self.potential.clone()
    }

    /// E_m, GHz.
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }

    /// (E₂ − E₁)/h, GHz.
    #[wasm_bindgen(js_name = transitionGhz)]
    pub fn transition_ghz(&self) -> f64 {
        self.transition()
    }

    /// |⟨1|z|2⟩|, nm.
    #[wasm_bindgen(js_name = dipoleNm)]
    pub fn dipole_nm(&self) -> f64 {
        self.z12
    }
}

/// Two-qubit Landau–Zener sweeps at α = 1 for several adiabaticity parameters.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct LzCurves {
    alpha_t: Vec<f64>,
    curves: Vec<Vec<f64>>,
    survival: Vec<f64>,
    prediction: Vec<f64>,
}

impl LzCurves {
    pub fn compute(gs: &[f64], samples: usize) -> helium_qc::Result<Self> {
        let g_max = gs.iter().copied().fold(0.0, f64::max);
        let half_span = helium_qc::defaults::SWEEP_TAIL_FACTOR * g_max.max(1.0);
        let options = LzOptions {
            half_span: Some(half_span),
            samples,
            ..Default::default()
        };
        let runs = gs
            .iter()
            .map(|&g| dynamics::lz_sweep_experiment(&QubitParams::pair(g), g, &options))
            .collect::<helium_qc::Result<Vec<_>>>()?;
        let alpha_t = match runs.first() {
            Some(r) => r.trajectory.times.iter().map(|t| t - half_span).collect(),
            None => Vec::new(),
        };
        Ok(LzCurves {
            alpha_t,
            curves: runs
                .iter()
                .map(|r| r.trajectory.populations.iter().map(|p| p[1]).collect())
                .collect(),
            survival: runs.iter().map(|r| r.survival).collect(),
            prediction: runs.iter().map(|r| r.prediction).collect(),
        })
    }
}

#[wasm_bindgen]
impl LzCurves {
    #[wasm_bindgen(constructor)]
    pub fn new(gs: Vec<f64>, samples: usize) -> Result<LzCurves, JsError> {
        Self::compute(&gs, samples).map_err(js)
    }

    /// Time from the crossing in units of 1/√α.
    #[wasm_bindgen(js_name = alphaT)]
    pub fn alpha_t(&self) -> Vec<f64> {
        self.alpha_t.clone()
    }

    pub fn count(&self) -> usize {
        self.curves.len()
    }

    /// Excitation probability of the second qubit along sweep `i`.
    pub fn curve(&self, i: usize) -> Vec<f64> {
        self.curves.get(i).cloned().unwrap_or_default()
    }

    pub fn survival(&self) -> Vec<f64> {
        self.survival.clone()
    }

    pub fn prediction(&self) -> Vec<f64> {
        self.prediction.clone()
    }
}

/// Driven Rabi oscillation of the first site of the default device, next to
/// the closed-form result.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct RabiTrace {
    t: Vec<f64>,
    simulated: Vec<f64>,
    formula: Vec<f64>,
    rabi_rate: f64,
}

impl RabiTrace {
    /// `e_rf` in V/cm, `detuning` in rad/ns, `periods` of the resonant Rabi
    /// oscillation.
    pub fn compute(e_rf: f64, detuning: f64, periods: f64, samples: usize) -> helium_qc::Result<Self> {
        let params = qubit_params(&DeviceSpec::default(), &Constants::default())?;
        let site = params.sites[0];
        let omega = dynamics::rabi_rate(e_rf, site.z12);
        if !(omega > 0.0 && periods > 0.0) {
            return Err(helium_qc::Error::Range {
                module: "web",
                what: "Rabi field or periods".into(),
            });
        }
        let duration = periods * 2.0 * std::f64::consts::PI / omega;
        let run = dynamics::rabi_experiment(&params, 0, e_rf, duration, &RabiOptions { detuning, samples })?;
        let t = run.trajectory.times.clone();
        Ok(RabiTrace {
            simulated: run.trajectory.populations.iter().map(|p| p[0]).collect(),
            formula: t.iter().map(|&t| dynamics::rabi_formula(omega, detuning, t)).collect(),
            rabi_rate: omega,
            t,
        })
    }
}

#[wasm_bindgen]
impl RabiTrace {
    #[wasm_bindgen(constructor)]
    pub fn new(e_rf: f64, detuning: f64, periods: f64, samples: usize) -> Result<RabiTrace, JsError> {
        Self::compute(e_rf, detuning, periods, samples).map_err(js)
    }

    /// ns
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    pub fn simulated(&self) -> Vec<f64> {
        self.simulated.clone()
    }

    pub fn formula(&self) -> Vec<f64> {
        self.formula.clone()
    }

    /// Ω_R, rad/ns.
    #[wasm_bindgen(js_name = rabiRate)]
    pub fn rabi_rate(&self) -> f64 {
        self.rabi_rate
    }
}
