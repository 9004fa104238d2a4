use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use super::circuit::{Circuit, Gate};
use crate::decoherence::{t2_estimate, RateBudget};
use crate::defaults;
use crate::device::QubitParams;
use crate::dynamics::{rabi_rate, sci, ControlSchedule, Envelope, MicrowavePulse, PulseTarget, RegisterState};
use crate::error::{Error, Result};
use crate::units::Constants;

const MIN_SLICE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_voltage_mv: f64,
    /// rad/ns
    pub max_rabi_rate: f64,
    /// Warn when duration × T2⁻¹ reaches this.
    pub budget_threshold: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_voltage_mv: defaults::MAX_VOLTAGE_MV,
            max_rabi_rate: defaults::MAX_RABI_RATE,
            budget_threshold: defaults::BUDGET_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileOptions {
    /// Microwave amplitude for one-qubit gates, V/cm.
    pub microwave_field: f64,
    /// Overrides the Rabi rate derived from the field and z₁₂, rad/ns.
    pub rabi_rate: Option<f64>,
    pub envelope: Envelope,
    /// Deliver pulses to every site instead of the addressed one; selectivity
    /// then rests on parking alone.
    pub global_drive: bool,
    /// Spectators park at park_factor·max Ω_sw·(n+1).
    pub park_factor: f64,
    pub min_park_detuning: f64,
    /// Sweep edges at this many max(Ω_sw, √α) from the crossing.
    pub sweep_tail: f64,
    pub limits: Limits,
    /// T2⁻¹ used for the budget ratio, s⁻¹.
    pub t2_inv: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        let c = Constants::default();
        CompileOptions {
            microwave_field: defaults::MICROWAVE_FIELD,
            rabi_rate: None,
            envelope: Envelope::Rectangular,
            global_drive: false,
            park_factor: defaults::PARK_FACTOR,
            min_park_detuning: defaults::MIN_PARK_DETUNING,
            sweep_tail: defaults::SWEEP_TAIL_FACTOR,
            limits: Limits::default(),
            t2_inv: t2_estimate(defaults::SURFACE_DISPLACEMENT_CM, c.bohr_nm, c.rydberg_rate()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSlice {
    pub gate: Gate,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompilationReport {
    /// ns
    pub duration: f64,
    pub slices: Vec<GateSlice>,
    pub max_voltage_mv: f64,
    /// duration × T2⁻¹
    pub budget_ratio: f64,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
    /// Residual Z-frame phase ζ_n of each site at the end of the schedule:
    /// the simulated state equals Π_n diag(1, e^{iζ_n}) × ideal.
    pub frame_phases: Vec<f64>,
}

impl CompilationReport {
    /// Undo the residual frame phases on a simulated state.
    pub fn correct_frame(&self, state: &mut RegisterState) {
        state.apply_phases(&self.frame_phases);
    }
}

impl fmt::Display for CompilationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "duration_ns = {}", sci(self.duration))?;
        writeln!(f, "gates = {}", self.slices.len())?;
        writeln!(f, "max_voltage_mV = {}", sci(self.max_voltage_mv))?;
        writeln!(f, "budget_ratio = {}", sci(self.budget_ratio))?;
        for (n, z) in self.frame_phases.iter().enumerate() {
            writeln!(f, "frame_phase_{n}_rad = {}", sci(*z))?;
        }
        for s in &self.slices {
            writeln!(f, "slice {} .. {} ns: {}", sci(s.start), sci(s.end), s.gate)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum SiteCtl {
    Hold(f64),
    Ramp(f64, f64),
}

impl SiteCtl {
    fn area(self, len: f64) -> f64 {
        match self {
            SiteCtl::Hold(d) => d * len,
            SiteCtl::Ramp(a, b) => 0.5 * (a + b) * len,
        }
    }
}

struct Step {
    len: f64,
    ctl: Vec<SiteCtl>,
    /// (site, rabi rate, phase)
    pulse: Option<(usize, f64, f64)>,
}

struct Compiler<'a> {
    params: &'a QubitParams,
    options: &'a CompileOptions,
    parks: Vec<f64>,
    zeta: Vec<f64>,
    steps: Vec<Step>,
    warnings: Vec<String>,
}

impl Compiler<'_> {
    fn parked(&self) -> Vec<SiteCtl> {
        self.parks.iter().map(|&p| SiteCtl::Hold(p)).collect()
    }

    fn push(&mut self, step: Step) {
        // Sub-femtosecond slices carry no meaningful area.
        if step.len <= MIN_SLICE {
            return;
        }
        for (z, c) in self.zeta.iter_mut().zip(&step.ctl) {
            *z = (*z - c.area(step.len)).rem_euclid(TAU);
        }
        self.steps.push(step);
    }

    fn rabi(&self, site: usize) -> Result<f64> {
        let w = self
            .options
            .rabi_rate
            .unwrap_or_else(|| rabi_rate(self.options.microwave_field, self.params.sites[site].z12));
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Circuit(format!("site {site} has no usable Rabi rate")));
        }
        Ok(w)
    }

    fn coupling(&self, a: usize, b: usize) -> Result<f64> {
        let w = self.params.coupling[[a, b]];
        if w <= 0.0 {
            return Err(Error::Circuit(format!("sites {a} and {b} are not coupled")));
        }
        Ok(w)
    }

    /// Resonant rotation by θ about the axis at angle φ in the xy plane.
    fn rotation(&mut self, site: usize, theta: f64, phi: f64) -> Result<()> {
        let mut theta = theta - TAU * (theta / TAU).round();
        let mut phi = phi;
        if theta < 0.0 {
            theta = -theta;
            phi += PI;
        }
        if theta == 0.0 {
            return Ok(());
        }
        let omega = self.rabi(site)?;
        let mut ctl = self.parked();
        ctl[site] = SiteCtl::Hold(0.0);
        let phase = (phi + self.zeta[site]).rem_euclid(TAU);
        self.push(Step {
            len: theta / (omega * self.options.envelope.area_fraction()),
            ctl,
            pulse: Some((site, omega, phase)),
        });
        Ok(())
    }

    /// Z rotation realized by the parking detuning itself: the site idles at
    /// its park until ∫Δdt ≡ −θ (mod 2π).
    fn rz(&mut self, site: usize, theta: f64) {
        let area = (-theta).rem_euclid(TAU);
        let len = area / self.parks[site];
        let ctl = self.parked();
        self.push(Step { len, ctl, pulse: None });
        self.zeta[site] = (self.zeta[site] - theta).rem_euclid(TAU);
    }

    /// Bring ζ_b to ζ_a by holding a at resonance while b idles at its park.
    fn align(&mut self, a: usize, b: usize) {
        let len = (self.zeta[b] - self.zeta[a]).rem_euclid(TAU) / self.parks[b];
        let mut ctl = self.parked();
        ctl[a] = SiteCtl::Hold(0.0);
        self.push(Step { len, ctl, pulse: None });
    }

    fn exchange(&mut self, a: usize, b: usize, len: f64) {
        self.align(a, b);
        let mut ctl = self.parked();
        ctl[a] = SiteCtl::Hold(0.0);
        ctl[b] = SiteCtl::Hold(0.0);
        self.push(Step { len, ctl, pulse: None });
    }

    fn sweep(&mut self, a: usize, b: usize, g: f64) -> Result<()> {
        let omega = self.coupling(a, b)?;
        let alpha = (omega / g).powi(2);
        let edge = self.options.sweep_tail * omega.max(alpha.sqrt());
        for (m, p) in self.parks.iter().enumerate() {
            if m != a && m != b && p.abs() <= edge {
                self.warnings.push(format!(
                    "SWEEP_SWAP {a} {b}: sweep range ±{} rad/ns crosses the park of site {m}",
                    sci(edge)
                ));
            }
        }
        self.align(a, b);
        let mut ctl = self.parked();
        ctl[a] = SiteCtl::Ramp(edge, -edge);
        ctl[b] = SiteCtl::Ramp(-edge, edge);
        self.push(Step {
            len: 2.0 * edge / alpha,
            ctl,
            pulse: None,
        });
        Ok(())
    }

    fn gate(&mut self, g: &Gate) -> Result<()> {
        match *g {
            Gate::Rx { theta, site } => self.rotation(site, theta, 0.0),
            Gate::Ry { theta, site } => self.rotation(site, theta, FRAC_PI_2),
            Gate::Rz { theta, site } => {
                self.rz(site, theta);
                Ok(())
            }
            Gate::SweepSwap { a, b, g } => self.sweep(a, b, g),
            Gate::Iswap { a, b } => {
                // exchange for Ω_sw t = 3π/2 gives |01⟩ → i|10⟩
                let w = self.coupling(a, b)?;
                self.exchange(a, b, 1.5 * PI / w);
                Ok(())
            }
            Gate::Cnot { control, target } => {
                // Two native exchanges at Ω_sw t = π/2 (iSWAP†):
                // RX_t(−π/2), iSWAP†, RY_c(π/2), iSWAP†, RZ_c(−π/2), RY_t(π).
                let w = self.coupling(control, target)?;
                let quarter = FRAC_PI_2 / w;
                self.rotation(target, -FRAC_PI_2, 0.0)?;
                self.exchange(control, target, quarter);
                self.rotation(control, FRAC_PI_2, FRAC_PI_2)?;
                self.exchange(control, target, quarter);
                self.rz(control, -FRAC_PI_2);
                self.rotation(target, PI, FRAC_PI_2)
            }
        }
    }
}

/// Compile a circuit into a sequential schedule. Between operations every
/// site idles at its park P·(n+1); an addressed site is brought to Δ = 0.
pub fn compile(
    circuit: &Circuit,
    params: &QubitParams,
    options: &CompileOptions,
) -> Result<(ControlSchedule, CompilationReport)> {
    let n = params.len();
    if circuit.n_qubits != n {
        return Err(Error::Circuit(format!(
            "circuit has {} qubits, register has {n}",
            circuit.n_qubits
        )));
    }
    circuit.validate()?;
    let park = (options.park_factor * params.max_coupling()).max(options.min_park_detuning);
    if !(park > 0.0 && park.is_finite()) {
        return Err(Error::range("control", "parking detuning"));
    }
    let mut c = Compiler {
        params,
        options,
        parks: (0..n).map(|k| park * (k + 1) as f64).collect(),
        zeta: vec![0.0; n],
        steps: Vec::new(),
        warnings: Vec::new(),
    };
    let mut gate_bounds = Vec::with_capacity(circuit.gates.len());
    for g in &circuit.gates {
        let first = c.steps.len();
        c.gate(g)?;
        gate_bounds.push((*g, first, c.steps.len()));
    }

    // Lay the steps out back to back.
    let mut starts = Vec::with_capacity(c.steps.len() + 1);
    let mut t = 0.0;
    for s in &c.steps {
        starts.push(t);
        t += s.len;
    }
    starts.push(t);
    let duration = t;

    let mut schedule = ControlSchedule::new(n, duration);
    for (k, s) in c.steps.iter().enumerate() {
        let (t0, t1) = (starts[k], starts[k + 1]);
        for (site, ctl) in s.ctl.iter().enumerate() {
            let (from, to) = match *ctl {
                SiteCtl::Hold(d) => (d, d),
                SiteCtl::Ramp(a, b) => (a, b),
            };
            let mv = from.abs().max(to.abs()) / params.sites[site].detuning_per_mv;
            if mv > options.limits.max_voltage_mv {
                return Err(Error::range(
                    "control",
                    format!(
                        "detuning {} rad/ns on site {site} at t = {} ns needs {} mV (limit {} mV)",
                        sci(from.abs().max(to.abs())),
                        sci(t0),
                        sci(mv),
                        options.limits.max_voltage_mv
                    ),
                ));
            }
            schedule.add_ramp(site, t0, t1, from, to)?;
        }
        if let Some((site, omega, phase)) = s.pulse {
            let target = if options.global_drive {
                PulseTarget::Global
            } else {
                PulseTarget::Site(site)
            };
            schedule.add_pulse(MicrowavePulse {
                target,
                rabi_rate: omega,
                carrier_detuning: 0.0,
                phase,
                start: t0,
                end: t1,
                envelope: options.envelope,
            })?;
        }
    }

    let slices = gate_bounds
        .into_iter()
        .map(|(gate, a, b)| GateSlice {
            gate,
            start: starts[a],
            end: starts[b],
        })
        .collect();
    let mut report = validate_with(&schedule, params, options.t2_inv, &options.limits);
    report.slices = slices;
    report.frame_phases = c.zeta;
    report.warnings.splice(0..0, c.warnings);
    Ok((schedule, report))
}

/// Check a schedule against voltage, amplitude and coherence limits. Never
/// fails; problems are listed in the report.
pub fn validate(
    schedule: &ControlSchedule,
    params: &QubitParams,
    budget: &RateBudget,
    limits: &Limits,
) -> CompilationReport {
    validate_with(schedule, params, budget.t2_inv, limits)
}

fn validate_with(schedule: &ControlSchedule, params: &QubitParams, t2_inv: f64, limits: &Limits) -> CompilationReport {
    let mut report = CompilationReport {
        duration: schedule.duration,
        ..Default::default()
    };
    report.budget_ratio = (schedule.duration * 1e-9 * t2_inv).max(0.0);
    if report.budget_ratio >= limits.budget_threshold * (1.0 - 1e-9) && report.budget_ratio > 0.0 {
        report.warnings.push(format!(
            "decoherence budget: duration × T2⁻¹ = {} reaches threshold {}",
            sci(report.budget_ratio),
            sci(limits.budget_threshold)
        ));
    }
    for (site, (peak, at)) in schedule.peak_detuning().into_iter().enumerate() {
        let per_mv = params.sites.get(site).map_or(f64::INFINITY, |s| s.detuning_per_mv);
        let mv = peak / per_mv;
        report.max_voltage_mv = report.max_voltage_mv.max(mv);
        if mv > limits.max_voltage_mv {
            report.violations.push(format!(
                "detuning channel {site}: {} mV at t = {} ns exceeds {} mV",
                sci(mv),
                sci(at),
                sci(limits.max_voltage_mv)
            ));
        }
    }
    for p in &schedule.pulses {
        if p.rabi_rate.abs() > limits.max_rabi_rate {
            report.violations.push(format!(
                "microwave pulse at t = {} ns: Rabi rate {} rad/ns exceeds {}",
                sci(p.start),
                sci(p.rabi_rate),
                sci(limits.max_rabi_rate)
            ));
        }
    }
    report
}
