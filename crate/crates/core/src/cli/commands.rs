use std::f64::consts::PI;
use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{
    CompileArgs, Config, Failure, LzArgs, OutArgs, RabiArgs, RatesArgs, ReadoutArgs, SimulateArgs, SpectrumArgs,
};
use crate::control::{self, Circuit, Gate};
use crate::decoherence::{self, RateBudget};
use crate::defaults;
use crate::device::{self, QubitParams};
use crate::dynamics::{
    self, evolve, rabi_experiment, rabi_formula, sci, LzOptions, RabiOptions, RegisterState, Sampling,
};
use crate::readout::{self, ReadoutPulse};
use crate::spectrum::{self, GridSpec, VerticalPotential, MIN_EXTENT_BOHR_PER_LEVEL_SQ};

/// `key = value` lines with fixed float formatting.
#[derive(Default)]
struct Report(String);

impl Report {
    fn num(&mut self, key: impl Display, v: f64) {
        self.0.push_str(&format!("{key} = {}\n", sci(v)));
    }

    fn text(&mut self, key: impl Display, v: impl Display) {
        self.0.push_str(&format!("{key} = {v}\n"));
    }

    fn emit(&self, path: Option<&PathBuf>) -> Result<(), Failure> {
        match path {
            Some(p) => write_file(p, |w| w.write_all(self.0.as_bytes())),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(self.0.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Failure::Io(format!("stdout: {e}")))
            }
        }
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err)
}

fn register(cfg: &Config) -> Result<QubitParams, Failure> {
    Ok(device::qubit_params_on(&cfg.device, &cfg.constants(), &cfg.grid())?)
}

fn budget(cfg: &Config, params: &QubitParams, omega: f64) -> Result<RateBudget, Failure> {
    Ok(decoherence::rate_budget(
        params,
        &cfg.constants(),
        cfg.device.temperature,
        omega,
        &cfg.decoherence.model,
    )?)
}

fn load_circuit(path: &Path, n_qubits: usize) -> Result<Circuit, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read circuit {}: {e}", path.display())))?;
    Circuit::parse(&text, n_qubits).map_err(|e| match e {
        crate::Error::Circuit(m) => Failure::Config(format!("{}: {m}", path.display())),
        other => Failure::Numerical(other),
    })
}

pub fn params(cfg: &Config, args: &OutArgs) -> Result<(), Failure> {
    let d = &cfg.device;
    let p = register(cfg)?;
    let mut r = Report::default();
    r.text("n_qubits", p.len());
    r.num("field_per_mV_V_per_cm", d.field_per_millivolt());
    r.num("magnetic_gap_K", device::magnetic_gap(d.magnetic_field));
    let (gamma, phase) = device::coulomb_coupling(d.electron_density, d.temperature)?;
    r.num("coulomb_gamma", gamma);
    r.text("ensemble_phase", format!("{phase:?}").to_lowercase());
    for (n, (s, sp)) in d.sites.iter().zip(&p.sites).enumerate() {
        r.num(format_args!("site.{n}.x_um"), s.x);
        r.num(format_args!("site.{n}.y_um"), s.y);
        r.num(format_args!("site.{n}.voltage_mV"), s.voltage);
        r.num(format_args!("site.{n}.pressing_field_V_per_cm"), sp.pressing_field);
        r.num(format_args!("site.{n}.bohr_frequency_GHz"), sp.bohr_frequency);
        r.num(format_args!("site.{n}.stark_GHz_per_V_per_cm"), sp.stark_sensitivity);
        r.num(format_args!("site.{n}.detuning_per_mV_rad_per_ns"), sp.detuning_per_mv);
        r.num(format_args!("site.{n}.z11_nm"), sp.z11);
        r.num(format_args!("site.{n}.z22_nm"), sp.z22);
        r.num(format_args!("site.{n}.z12_nm"), sp.z12);
        r.num(format_args!("site.{n}.inplane_spacing_K"), sp.inplane_spacing);
    }
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            let w = p.coupling[[a, b]];
            r.num(format_args!("omega_sw.{a}.{b}_rad_per_ns"), w);
            r.num(format_args!("transfer_time.{a}.{b}_ns"), 0.5 * PI / w);
        }
    }
    r.emit(args.report.as_ref())
}

pub fn spectrum(cfg: &Config, args: &SpectrumArgs) -> Result<(), Failure> {
    if args.levels < 2 {
        return Err(Failure::Usage("--levels must be at least 2".into()));
    }
    let consts = cfg.constants();
    let field = match (args.field, args.site) {
        (Some(f), _) => f,
        (None, Some(s)) => cfg.device.pressing_field(s)?,
        (None, None) => cfg.device.base_pressing_field,
    };
    let potential = VerticalPotential::new(&consts, field);
    // Widen the box for higher levels, keeping the configured spacing.
    let base = cfg.grid();
    let need = 1.2 * MIN_EXTENT_BOHR_PER_LEVEL_SQ * (args.levels * args.levels) as f64 * potential.bohr_radius();
    let grid = if base.z_max >= need {
        base
    } else {
        GridSpec::new(need, (need / base.spacing()).ceil() as usize)
    };
    let s = spectrum::solve_vertical(&potential, args.levels, &grid)?;
    let stark = spectrum::stark_sensitivity_from(&s, &grid)?;

    let mut r = Report::default();
    r.num("pressing_field_V_per_cm", field);
    r.num("grid_extent_nm", grid.z_max);
    r.text("grid_points", grid.points);
    r.text("metastable", s.metastable);
    for l in &s.levels {
        r.num(format_args!("level.{}.energy_GHz", l.index), l.energy);
    }
    r.num("transition_frequency_GHz", s.transition_frequency()?);
    r.num("z11_nm", s.dipole_matrix_element(1, 1)?);
    r.num("z22_nm", s.dipole_matrix_element(2, 2)?);
    r.num("z12_nm", s.dipole_matrix_element(1, 2)?);
    r.num("stark_finite_difference_GHz_per_V_per_cm", stark.finite_difference);
    r.num("stark_hellmann_feynman_GHz_per_V_per_cm", stark.hellmann_feynman);

    if let Some(path) = &args.levels_out {
        write_file(path, |w| {
            writeln!(w, "m,energy_GHz,hydrogenic_GHz")?;
            for l in &s.levels {
                let m = l.index as f64;
                writeln!(
                    w,
                    "{},{},{}",
                    l.index,
                    sci(l.energy),
                    sci(-consts.rydberg_ghz / (m * m))
                )?;
            }
            Ok(())
        })?;
    }
    if let Some(path) = &args.wavefunctions_out {
        let (p1, p2) = (&s.levels[0].psi, &s.levels[1].psi);
        write_file(path, |w| {
            writeln!(w, "z_nm,psi1_per_sqrt_nm,psi2_per_sqrt_nm,V_GHz")?;
            for (i, z) in s.z_values().iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    sci(*z),
                    sci(p1[i]),
                    sci(p2[i]),
                    sci(potential.energy_at(*z))
                )?;
            }
            Ok(())
        })?;
    }
    r.emit(args.out.report.as_ref())
}

pub fn rabi(cfg: &Config, args: &RabiArgs) -> Result<(), Failure> {
    let p = register(cfg)?;
    let sp = p
        .sites
        .get(args.site)
        .ok_or_else(|| Failure::Usage(format!("--site {} but the register has {} sites", args.site, p.len())))?;
    let e_rf = args.e_rf.unwrap_or(cfg.simulation.microwave_field);
    let omega = dynamics::rabi_rate(e_rf, sp.z12);
    let duration = match args.duration {
        Some(d) => d,
        None if omega > 0.0 => 4.0 * 2.0 * PI / omega.hypot(args.detuning),
        None => return Err(Failure::Usage("zero Rabi rate: pass --duration".into())),
    };
    let run = rabi_experiment(
        &p,
        args.site,
        e_rf,
        duration,
        &RabiOptions {
            detuning: args.detuning,
            samples: args.samples,
        },
    )?;
    let tr = &run.trajectory;
    let formula: Vec<f64> = tr
        .times
        .iter()
        .map(|&t| rabi_formula(omega, args.detuning, t))
        .collect();
    let deviation = tr
        .populations
        .iter()
        .zip(&formula)
        .map(|(p, f)| (p[0] - f).abs())
        .fold(0.0, f64::max);

    if let Some(path) = &args.out {
        write_file(path, |w| {
            writeln!(w, "t_ns,p_excited,p_formula")?;
            for ((t, p), f) in tr.times.iter().zip(&tr.populations).zip(&formula) {
                writeln!(w, "{},{},{}", sci(*t), sci(p[0]), sci(*f))?;
            }
            Ok(())
        })?;
    }
    let mut r = Report::default();
    r.text("site", args.site);
    r.num("e_rf_V_per_cm", e_rf);
    r.num("z12_nm", sp.z12);
    r.num("rabi_rate_rad_per_ns", run.rabi_rate);
    r.num("rabi_rate_per_s", run.rabi_rate * 1e9);
    r.num("detuning_rad_per_ns", args.detuning);
    r.num("duration_ns", duration);
    r.num("final_p_excited", tr.populations.last().map_or(0.0, |p| p[0]));
    r.num("max_deviation_from_formula", deviation);
    r.emit(args.report.as_ref())
}

fn g_label(g: f64) -> String {
    if g.fract() == 0.0 {
        format!("{g:.1}")
    } else {
        format!("{g}")
    }
}

pub fn lz_sweep(cfg: &Config, args: &LzArgs) -> Result<(), Failure> {
    if args.g.is_empty() {
        return Err(Failure::Usage("--g needs at least one value".into()));
    }
    if let Some(g) = args.g.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
        return Err(Failure::Usage(format!("--g values must be non-negative, got {g}")));
    }
    // α = 1 throughout, so Ω_sw = g and time is already in units of 1/√α.
    let g_max = args.g.iter().copied().fold(0.0, f64::max);
    let half_span = args.half_span.unwrap_or(cfg.simulation.sweep_tail * g_max.max(1.0));
    let options = LzOptions {
        half_span: Some(half_span),
        samples: args.samples,
        rtol: cfg.simulation.rtol,
    };
    let runs = args
        .g
        .iter()
        .map(|&g| dynamics::lz_sweep_experiment(&QubitParams::pair(g), g, &options))
        .collect::<crate::Result<Vec<_>>>()?;

    if let Some(path) = &args.out {
        write_file(path, |w| {
            let mut header = vec!["alpha_t".to_string()];
            header.extend(args.g.iter().map(|g| format!("p2_g{}", g_label(*g))));
            writeln!(w, "{}", header.join(","))?;
            for (k, t) in runs[0].trajectory.times.iter().enumerate() {
                let mut row = vec![sci(runs[0].alpha.sqrt() * (t - half_span))];
                row.extend(runs.iter().map(|run| sci(run.trajectory.populations[k][1])));
                writeln!(w, "{}", row.join(","))?;
            }
            Ok(())
        })?;
    }
    let mut r = Report::default();
    r.num("alpha_rad2_per_ns2", 1.0);
    r.num("half_span_ns", half_span);
    for run in &runs {
        let g = g_label(run.g);
        r.num(format_args!("g{g}.survival"), run.survival);
        r.num(format_args!("g{g}.raw_survival"), run.raw_survival);
        r.num(format_args!("g{g}.prediction"), run.prediction);
        r.num(
            format_args!("g{g}.final_p2"),
            run.trajectory.populations.last().map_or(0.0, |p| p[1]),
        );
    }
    r.emit(args.report.as_ref())
}

fn parse_initial(bits: &str, n: usize) -> Result<usize, Failure> {
    if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Failure::Usage(format!(
            "--initial must be {n} characters of 0/1, got `{bits}`"
        )));
    }
    Ok(bits
        .chars()
        .enumerate()
        .filter(|(_, c)| *c == '1')
        .map(|(i, _)| 1 << i)
        .sum())
}

pub fn simulate(cfg: &Config, args: &SimulateArgs) -> Result<(), Failure> {
    let p = register(cfg)?;
    let n = p.len();
    let circuit = load_circuit(&args.circuit.circuit, n)?;
    let index = match &args.initial {
        Some(b) => parse_initial(b, n)?,
        None => 0,
    };
    let b = budget(cfg, &p, cfg.decoherence.working_frequency)?;
    let (schedule, report) = control::compile(&circuit, &p, &cfg.compile_options(b.t2_inv))?;
    let pure = RegisterState::basis(n, index)?;
    let (initial, rates) = if args.lindblad {
        (pure.to_density()?, Some(vec![b.site_rates(); n]))
    } else {
        (pure.clone(), None)
    };
    let mut options = cfg.evolve_options();
    options.coherences = true;
    let tr = evolve(
        &p,
        &schedule,
        &initial,
        rates.as_deref(),
        &Sampling::Uniform(args.samples),
        &options,
    )?;
    let mut fin = tr.final_state.clone();
    report.correct_frame(&mut fin);

    if let Some(path) = &args.out {
        write_file(path, |w| tr.write_csv(w))?;
    }
    let mut r = Report::default();
    r.text("n_qubits", n);
    r.text("gates", circuit.gates.len());
    r.text("initial", args.initial.as_deref().unwrap_or(&"0".repeat(n)));
    r.text("lindblad", args.lindblad);
    r.num("duration_ns", report.duration);
    r.num("budget_ratio", report.budget_ratio);
    for (s, pe) in fin.excitation_probabilities().iter().enumerate() {
        r.num(format_args!("final_p_excited_{s}"), *pe);
    }
    if circuit.gates.iter().any(|g| matches!(g, Gate::SweepSwap { .. })) {
        r.text("fidelity", "n/a");
    } else {
        let RegisterState::Pure { amplitudes, .. } = &pure else {
            unreachable!("basis states are pure")
        };
        let target = control::ideal_state(&circuit, amplitudes)?;
        r.num("fidelity", fin.fidelity_with(&target));
    }
    for w in report.warnings.iter().chain(&report.violations) {
        r.text("warning", w);
    }
    r.emit(args.report.as_ref())
}

pub fn compile(cfg: &Config, args: &CompileArgs) -> Result<(), Failure> {
    let p = register(cfg)?;
    let circuit = load_circuit(&args.circuit.circuit, p.len())?;
    let b = budget(cfg, &p, cfg.decoherence.working_frequency)?;
    let (schedule, report) = control::compile(&circuit, &p, &cfg.compile_options(b.t2_inv))?;
    if let Some(path) = &args.out {
        write_file(path, |w| schedule.write_csv(w))?;
    }
    Report(report.to_string()).emit(args.report.as_ref())
}

pub fn rates(cfg: &Config, args: &RatesArgs) -> Result<(), Failure> {
    let p = register(cfg)?;
    let omega = args.omega.unwrap_or(cfg.decoherence.working_frequency);
    let b = budget(cfg, &p, omega)?;
    let consts = cfg.constants();
    let sim = b.site_rates();
    let mut r = Report::default();
    r.num("temperature_K", cfg.device.temperature);
    r.num("E_eff_V_per_cm", b.e_eff);
    r.num("delta_T_cm", b.delta_t);
    r.num("delta_T_over_rB_4", (b.delta_t / (consts.bohr_nm * 1e-7)).powi(4));
    r.num(
        "ripplon_energy_K",
        decoherence::ripplon_energy(defaults::RIPPLON_K_MAX, &consts),
    );
    r.num("tau_intra_inv_per_s", b.tau_intra_inv);
    r.num("T1_inv_per_s", b.t1_inv);
    r.num("T2_inv_per_s", b.t2_inv);
    r.num("Omega_per_s", b.omega);
    r.num("Omega_T1", b.omega_t1);
    r.num("Omega_T2", b.omega_t2);
    r.num("simulation_T1_ns", sim.t1);
    r.num("simulation_T2_ns", sim.t2);
    r.emit(args.out.report.as_ref())
}

pub fn readout(cfg: &Config, args: &ReadoutArgs) -> Result<(), Failure> {
    let consts = cfg.constants();
    let field = match args.field {
        Some(f) => f,
        None => readout::find_operating_field(&consts, args.duration, args.target)?,
    };
    let pulse = ReadoutPulse::new(field, args.duration)?;
    let m = readout::tunneling_rates(&pulse, &consts);
    let (p_detect, p_false) = readout::readout_fidelity(&m, args.duration);
    let mut r = Report::default();
    r.num("extraction_field_V_per_cm", field);
    r.text("operating_point", args.field.is_none());
    r.num("duration_ns", args.duration);
    r.num("gamma1_per_s", m.gamma1());
    r.num("gamma2_per_s", m.gamma2());
    r.num("ratio", m.ratio());
    r.text("excited_over_barrier", m.excited.over_barrier());
    r.num("p_detect_excited", p_detect);
    r.num("p_false_ground", p_false);
    r.num("assignment_fidelity", 1.0 - 0.5 * (p_false + 1.0 - p_detect));
    r.emit(args.out.report.as_ref())
}
