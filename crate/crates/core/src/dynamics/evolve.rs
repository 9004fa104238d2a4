use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::hamiltonian::Generator;
use super::integrator::Dop853;
use super::schedule::{sci, ControlSchedule};
use super::state::{RegisterState, STATE_TOLERANCE};
use crate::defaults;
use crate::device::QubitParams;
use crate::error::{Error, Result};

/// Per-site relaxation (T1) and coherence (T2) times, ns. `f64::INFINITY`
/// disables a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteRates {
    pub t1: f64,
    pub t2: f64,
}

impl SiteRates {
    pub const NONE: SiteRates = SiteRates {
        t1: f64::INFINITY,
        t2: f64::INFINITY,
    };

    /// (γ₁, κ): amplitude damping rate and the rate of the √κ·σz channel.
    fn lindblad_rates(&self, site: usize) -> Result<(f64, f64)> {
        if !(self.t1 > 0.0 && self.t2 > 0.0) {
            return Err(Error::range("dynamics", format!("T1/T2 on site {site}")));
        }
        let g1 = 1.0 / self.t1;
        let g2 = 1.0 / self.t2;
        let pure = g2 - 0.5 * g1;
        if pure < -1e-12 * g2.max(g1) {
            return Err(Error::RateConsistency { site });
        }
        Ok((g1, 0.5 * pure.max(0.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// `n` equally spaced samples including both ends (n ≥ 2).
    Uniform(usize),
    /// Strictly increasing times in [0, duration].
    Times(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Record |⟨σ⁺_n σ⁻_m⟩| for every coupled pair.
    pub coherences: bool,
    /// Keep the full state at every sample.
    pub keep_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: defaults::RTOL,
            atol: defaults::ATOL,
            coherences: false,
            keep_states: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// populations[k][n]: excitation probability of site n at times[k].
    pub populations: Vec<Vec<f64>>,
    pub coherence_pairs: Vec<(usize, usize)>,
    /// coherences[k][p] for coherence_pairs[p].
    pub coherences: Vec<Vec<f64>>,
    pub states: Vec<RegisterState>,
    pub final_state: RegisterState,
}

impl Trajectory {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.final_state.n_sites();
        let mut header = vec!["t_ns".to_string()];
        header.extend((0..n).map(|s| format!("p_excited_{s}")));
        header.extend(self.coherence_pairs.iter().map(|(a, b)| format!("coherence_{a}_{b}")));
        writeln!(w, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![sci(*t)];
            row.extend(self.populations[k].iter().map(|p| sci(*p)));
            if let Some(c) = self.coherences.get(k) {
                row.extend(c.iter().map(|x| sci(*x)));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn sample_times(sampling: &Sampling, duration: f64) -> Result<Vec<f64>> {
    match sampling {
        Sampling::Uniform(n) => {
            if *n < 2 {
                return Err(Error::range("dynamics", "sample count (need ≥ 2)"));
            }
            Ok((0..*n).map(|k| duration * k as f64 / (*n - 1) as f64).collect())
        }
        Sampling::Times(t) => {
            let ok = t.windows(2).all(|w| w[0] < w[1])
                && t.first().is_some_and(|&t0| t0 >= 0.0)
                && t.last().is_some_and(|&t1| t1 <= duration);
            if !ok {
                return Err(Error::range("dynamics", "sample times"));
            }
            Ok(t.clone())
        }
    }
}

/// Integrate the register under the schedule. With `rates` the evolution is
/// Lindblad (density matrix); without, Schrödinger on whatever state is given.
pub fn evolve(
    params: &QubitParams,
    schedule: &ControlSchedule,
    initial: &RegisterState,
    rates: Option<&[SiteRates]>,
    sampling: &Sampling,
    options: &EvolveOptions,
) -> Result<Trajectory> {
    let n = params.len();
    if schedule.n_sites() != n || initial.n_sites() != n {
        return Err(Error::State(format!(
            "site counts differ: register {n}, schedule {}, state {}",
            schedule.n_sites(),
            initial.n_sites()
        )));
    }
    if !(schedule.duration >= 0.0 && schedule.duration.is_finite()) {
        return Err(Error::range("dynamics", "schedule duration"));
    }
    initial.check()?;
    let lindblad: Option<Vec<(f64, f64)>> = match rates {
        None => None,
        Some(r) => {
            if r.len() != n {
                return Err(Error::State(format!("{} rate entries for {n} sites", r.len())));
            }
            Some(
                r.iter()
                    .enumerate()
                    .map(|(s, r)| r.lindblad_rates(s))
                    .collect::<Result<_>>()?,
            )
        }
    };
    let mut state = match (&lindblad, initial) {
        (Some(_), s) => s.to_density()?,
        (None, s) => s.clone(),
    };

    let samples = sample_times(sampling, schedule.duration)?;
    let mut events: Vec<f64> = schedule.breakpoints();
    events.extend(&samples);
    events.sort_by(f64::total_cmp);
    events.dedup();

    let generator = Generator::new(params);
    let pairs: Vec<(usize, usize)> = if options.coherences {
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| params.coupling[[a, b]] != 0.0)
            .collect()
    } else {
        Vec::new()
    };

    let mut traj = Trajectory {
        times: Vec::with_capacity(samples.len()),
        populations: Vec::with_capacity(samples.len()),
        coherence_pairs: pairs.clone(),
        coherences: Vec::new(),
        states: Vec::new(),
        final_state: state.clone(),
    };
    let record = |t: f64, s: &RegisterState, traj: &mut Trajectory| {
        traj.times.push(t);
        traj.populations.push(s.excitation_probabilities());
        if options.coherences {
            traj.coherences
                .push(pairs.iter().map(|&(a, b)| s.exchange_coherence(a, b)).collect());
        }
        if options.keep_states {
            traj.states.push(s.clone());
        }
    };

    let mut integrator = Dop853::new(options.rtol, options.atol);
    let mut next_sample = 0;
    let mut buf = flatten(&state);
    let dim = state.dim();
    let mut t_prev = events[0];
    if next_sample < samples.len() && samples[next_sample] == t_prev {
        record(t_prev, &state, &mut traj);
        next_sample += 1;
    }
    let mut phase = vec![C64::new(0.0, 0.0); dim];
    for &t in &events[1..] {
        let probe = 0.5 * (t_prev + t);
        // Diagonal energies are linear in t on each interval; integrate them
        // analytically and evolve only the off-diagonal part numerically.
        let e0 = diagonal_energies(&schedule.controls_with_probe(t_prev, probe).detuning, dim);
        let e1: Vec<f64> = diagonal_energies(&schedule.controls_with_probe(t, probe).detuning, dim)
            .iter()
            .zip(&e0)
            .map(|(b, a)| (b - a) / (t - t_prev))
            .collect();
        let phases_at = |tt: f64, out: &mut [C64]| {
            let tau = tt - t_prev;
            for b in 0..dim {
                out[b] = C64::from_polar(1.0, -(e0[b] * tau + 0.5 * e1[b] * tau * tau));
            }
        };
        let off_diagonal = |tt: f64| {
            let mut c = schedule.controls_with_probe(tt, probe);
            c.detuning.iter_mut().for_each(|d| *d = 0.0);
            c
        };
        match &lindblad {
            None => {
                let mut u = vec![C64::new(0.0, 0.0); dim];
                let mut psi = vec![C64::new(0.0, 0.0); dim];
                integrator.integrate(
                    |tt, y, dy| {
                        phases_at(tt, &mut u);
                        for b in 0..dim {
                            psi[b] = y[b] * u[b];
                        }
                        generator.apply(&off_diagonal(tt), &psi, dy);
                        for b in 0..dim {
                            let v = dy[b] * u[b].conj();
                            dy[b] = C64::new(v.im, -v.re);
                        }
                    },
                    t_prev,
                    t,
                    &mut buf,
                )?;
                phases_at(t, &mut phase);
                for b in 0..dim {
                    buf[b] *= phase[b];
                }
            }
            Some(rates) => {
                let mut u = vec![C64::new(0.0, 0.0); dim];
                let mut row = vec![C64::new(0.0, 0.0); dim];
                let mut hrow = vec![C64::new(0.0, 0.0); dim];
                let mut b = vec![C64::new(0.0, 0.0); dim * dim];
                let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
                let mut scratch = vec![C64::new(0.0, 0.0); dim * dim];
                integrator.integrate(
                    |tt, y, dy| {
                        phases_at(tt, &mut u);
                        rotate(&u, y, &mut rho, false);
                        lindblad_rhs(
                            &generator,
                            &off_diagonal(tt),
                            rates,
                            dim,
                            &rho,
                            dy,
                            &mut row,
                            &mut hrow,
                            &mut b,
                        );
                        scratch.copy_from_slice(dy);
                        rotate(&u, &scratch, dy, true);
                    },
                    t_prev,
                    t,
                    &mut buf,
                )?;
                phases_at(t, &mut phase);
                let rotated = buf.clone();
                rotate(&phase, &rotated, &mut buf, false);
            }
        }
        unflatten(&buf, &mut state);
        if next_sample < samples.len() && samples[next_sample] == t {
            record(t, &state, &mut traj);
            next_sample += 1;
        }
        t_prev = t;
    }
    if (state.trace() - 1.0).abs() > 1e3 * STATE_TOLERANCE {
        return Err(Error::State(format!("norm drifted to {}", state.trace())));
    }
    traj.final_state = state;
    Ok(traj)
}

/// dρ/dt = −i[H, ρ] + Σ_n γ₁D[σ⁻_n]ρ + κD[σz_n]ρ, row-major ρ.
#[allow(clippy::too_many_arguments)]
fn lindblad_rhs(
    g: &Generator,
    c: &super::schedule::Controls,
    rates: &[(f64, f64)],
    dim: usize,
    rho: &[C64],
    out: &mut [C64],
    row: &mut [C64],
    hrow: &mut [C64],
    b: &mut [C64],
) {
    // B = ρH, row i of B = conj(H conj(row_i ρ)) since H is Hermitian.
    for i in 0..dim {
        for j in 0..dim {
            row[j] = rho[i * dim + j].conj();
        }
        g.apply(c, row, hrow);
        for j in 0..dim {
            b[i * dim + j] = hrow[j].conj();
        }
    }
    // Hρ = (ρH)†
    for i in 0..dim {
        for j in 0..dim {
            let comm = b[j * dim + i].conj() - b[i * dim + j];
            out[i * dim + j] = C64::new(comm.im, -comm.re);
        }
    }
    for (n, &(g1, kappa)) in rates.iter().enumerate() {
        let bit = 1 << n;
        for i in 0..dim {
            let ni = (i & bit != 0) as u8 as f64;
            for j in 0..dim {
                let nj = (j & bit != 0) as u8 as f64;
                let idx = i * dim + j;
                let mut d = rho[idx] * (-0.5 * g1 * (ni + nj));
                if i & bit == 0 && j & bit == 0 {
                    d += rho[(i | bit) * dim + (j | bit)] * g1;
                }
                if ni != nj {
                    d -= rho[idx] * (2.0 * kappa);
                }
                out[idx] += d;
            }
        }
    }
}

/// E_b = Σ_n ±Δ_n/2 for every basis state.
fn diagonal_energies(detuning: &[f64], dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|b| {
            detuning
                .iter()
                .enumerate()
                .map(|(n, d)| if b >> n & 1 == 1 { 0.5 * d } else { -0.5 * d })
                .sum()
        })
        .collect()
}

/// out_ab = u_a ū_b x_ab, or its inverse.
fn rotate(u: &[C64], x: &[C64], out: &mut [C64], inverse: bool) {
    let dim = u.len();
    for a in 0..dim {
        for b in 0..dim {
            let f = u[a] * u[b].conj();
            out[a * dim + b] = x[a * dim + b] * if inverse { f.conj() } else { f };
        }
    }
}

fn flatten(s: &RegisterState) -> Vec<C64> {
    match s {
        RegisterState::Pure { amplitudes, .. } => amplitudes.to_vec(),
        RegisterState::Density { rho, .. } => rho.iter().copied().collect(),
    }
}

fn unflatten(buf: &[C64], s: &mut RegisterState) {
    match s {
        RegisterState::Pure { amplitudes, .. } => {
            *amplitudes = Array1::from(buf.to_vec());
        }
        RegisterState::Density { rho, .. } => {
            let dim = rho.nrows();
            *rho = Array2::from_shape_vec((dim, dim), buf.to_vec()).expect("shape");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::schedule::{MicrowavePulse, PulseTarget};
    use std::f64::consts::PI;

    fn single(duration: f64, rabi: f64) -> (QubitParams, ControlSchedule) {
        let p = QubitParams::synthetic(Array2::zeros((1, 1)), 1.0).unwrap();
        let mut s = ControlSchedule::new(1, duration);
        s.add_pulse(MicrowavePulse::rectangular(
            PulseTarget::Site(0),
            rabi,
            0.0,
            0.0,
            duration,
        ))
        .unwrap();
        (p, s)
    }

    #[test]
    fn resonant_rabi_matches_sin_squared() {
        let (p, s) = single(20.0, 1.3);
        let tr = evolve(
            &p,
            &s,
            &RegisterState::ground(1).unwrap(),
            None,
            &Sampling::Uniform(41),
            &EvolveOptions::default(),
        )
        .unwrap();
        for (t, pop) in tr.times.iter().zip(&tr.populations) {
            let exact = (0.5 * 1.3 * t).sin().powi(2);
            assert!((pop[0] - exact).abs() < 1e-7);
        }
    }

    #[test]
    fn free_decay_follows_t1() {
        let p = QubitParams::synthetic(Array2::zeros((1, 1)), 1.0).unwrap();
        let s = ControlSchedule::new(1, 30.0);
        let rates = [SiteRates { t1: 10.0, t2: 20.0 }];
        let tr = evolve(
            &p,
            &s,
            &RegisterState::basis(1, 1).unwrap(),
            Some(&rates),
            &Sampling::Uniform(4),
            &EvolveOptions::default(),
        )
        .unwrap();
        for (t, pop) in tr.times.iter().zip(&tr.populations) {
            assert!((pop[0] - (-t / 10.0).exp()).abs() < 1e-8);
        }
        tr.final_state.check().unwrap();
    }

    #[test]
    fn free_coherence_decays_with_t2() {
        // |+⟩ under pure dephasing: |ρ01| = ½·exp(−t/T2)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = RegisterState::pure(1, Array1::from(vec![C64::new(h, 0.0), C64::new(h, 0.0)])).unwrap();
        let p = QubitParams::synthetic(Array2::zeros((1, 1)), 1.0).unwrap();
        let mut s = ControlSchedule::new(1, 40.0);
        s.hold(0, 0.0, 40.0, 0.7).unwrap();
        let rates = [SiteRates {
            t1: f64::INFINITY,
            t2: 25.0,
        }];
        let tr = evolve(
            &p,
            &s,
            &plus,
            Some(&rates),
            &Sampling::Uniform(2),
            &EvolveOptions::default(),
        )
        .unwrap();
        let RegisterState::Density { rho, .. } = &tr.final_state else {
            unreachable!()
        };
        let c = rho[[0, 1]].norm();
        assert!((c - 0.5 * (-40.0f64 / 25.0).exp()).abs() < 1e-8, "{c}");
        // detuning only rotates the phase
        assert!((rho[[1, 0]] - C64::from_polar(c, -0.7 * 40.0)).norm() < 1e-7);
    }

    #[test]
    fn inconsistent_rates_rejected() {
        let (p, s) = single(1.0, 1.0);
        let rates = [SiteRates { t1: 10.0, t2: 30.0 }];
        let r = evolve(
            &p,
            &s,
            &RegisterState::ground(1).unwrap(),
            Some(&rates),
            &Sampling::Uniform(2),
            &EvolveOptions::default(),
        );
        assert_eq!(r.unwrap_err(), Error::RateConsistency { site: 0 });
    }

    #[test]
    fn resonant_exchange_swaps_at_quarter_period() {
        let w = 0.3;
        let p = QubitParams::pair(w);
        let t = PI / (2.0 * w);
        let s = ControlSchedule::new(2, t);
        let tr = evolve(
            &p,
            &s,
            &RegisterState::basis(2, 0b01).unwrap(),
            None,
            &Sampling::Uniform(3),
            &EvolveOptions {
                coherences: true,
                ..Default::default()
            },
        )
        .unwrap();
        let last = tr.populations.last().unwrap();
        assert!(last[0] < 1e-8 && (last[1] - 1.0).abs() < 1e-8);
        assert!((tr.coherences[1][0] - 0.5).abs() < 1e-8);
        let mut out = Vec::new();
        tr.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("t_ns,p_excited_0,p_excited_1,coherence_0_1\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
