use std::f64::consts::PI;

use helium_qc::decoherence::{t1_estimate, t2_estimate};
use helium_qc::defaults;
use helium_qc::device::{swap_frequency, QubitParams};
use helium_qc::dynamics::{
    build_hamiltonian, evolve, lz_prediction, lz_sweep_experiment, ControlSchedule, EvolveOptions, LzOptions,
    MicrowavePulse, PulseTarget, RegisterState, Sampling, STATE_TOLERANCE,
};
use helium_qc::units::{convert, Quantity, Unit};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = Unit> {
    prop::sample::select(Unit::all().to_vec())
}

fn three_sites(w01: f64, w12: f64, w02: f64) -> QubitParams {
    let mut c = Array2::zeros((3, 3));
    for (a, b, w) in [(0, 1, w01), (1, 2, w12), (0, 2, w02)] {
        c[[a, b]] = w;
        c[[b, a]] = w;
    }
    QubitParams::synthetic(c, 4.0).unwrap()
}

fn amplitudes(s: &RegisterState) -> &Array1<C64> {
    match s {
        RegisterState::Pure { amplitudes, .. } => amplitudes,
        RegisterState::Density { .. } => panic!("expected a pure state"),
    }
}

fn energy(h: &Array2<C64>, psi: &Array1<C64>) -> f64 {
    psi.iter().zip(h.dot(psi).iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

fn opts(rtol: f64) -> EvolveOptions {
    EvolveOptions {
        rtol,
        keep_states: true,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_round_trip(v in -1e6f64..1e6, from in unit(), to in unit()) {
        prop_assume!(from.dimension() == to.dimension());
        let there = convert(Quantity::new(v, from), to).unwrap();
        let back = convert(there, from).unwrap();
        prop_assert!((back.value - v).abs() <= 1e-12 * v.abs().max(1e-300));
    }

    #[test]
    fn coupling_is_symmetric_and_dipolar(za in 0.5f64..20.0, zb in 0.5f64..20.0, d in 50.0f64..5000.0, k in 1.1f64..4.0) {
        let w = swap_frequency(za, zb, d);
        prop_assert_eq!(w, swap_frequency(zb, za, d));
        let scaled = swap_frequency(za, zb, k * d) * k.powi(3);
        prop_assert!((scaled - w).abs() <= 1e-12 * w);
    }

    #[test]
    fn estimators_scale_with_displacement(delta in 1e-12f64..1e-9, k in 1.5f64..10.0) {
        let (r, p) = (1.0e12, 5.0e9);
        let t1 = t1_estimate(delta, 7.6, r);
        let t2 = t2_estimate(delta, 7.6, p);
        prop_assert!((t1_estimate(k * delta, 7.6, r) / t1 / (k * k) - 1.0).abs() < 1e-12);
        prop_assert!((t2_estimate(k * delta, 7.6, p) / t2 / k.powi(4) - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unitary_evolution_preserves_norm(
        w in (0.05f64..0.6, 0.05f64..0.6, 0.0f64..0.3),
        d in prop::array::uniform3(-1.5f64..1.5),
        rabi in 0.1f64..1.0,
        phase in 0.0f64..6.3,
        start in 0usize..8,
    ) {
        let p = three_sites(w.0, w.1, w.2);
        let mut s = ControlSchedule::new(3, 100.0);
        for (site, det) in d.iter().enumerate() {
            s.add_ramp(site, 0.0, 100.0, *det, -0.5 * det).unwrap();
        }
        s.add_pulse(MicrowavePulse::rectangular(PulseTarget::Site(start % 3), rabi, phase, 10.0, 70.0)).unwrap();
        let run = evolve(&p, &s, &RegisterState::basis(3, start).unwrap(), None, &Sampling::Uniform(21), &opts(defaults::RTOL)).unwrap();
        let drift = run.states.iter().map(|s| (s.trace() - 1.0).abs()).fold(0.0, f64::max);
        prop_assert!(drift < STATE_TOLERANCE, "norm drift {drift:e} per 100 ns");
    }

    #[test]
    fn exchange_conserves_excitations_and_energy(
        w in (0.05f64..0.6, 0.05f64..0.6, 0.0f64..0.3),
        d in prop::array::uniform3(-1.0f64..1.0),
        re in prop::array::uniform8(-1.0f64..1.0),
        im in prop::array::uniform8(-1.0f64..1.0),
    ) {
        let p = three_sites(w.0, w.1, w.2);
        let mut s = ControlSchedule::new(3, 50.0);
        for (site, det) in d.iter().enumerate() {
            s.hold(site, 0.0, 50.0, *det).unwrap();
        }
        let mut psi = Array1::from_shape_fn(8, |i| C64::new(re[i], im[i]));
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        psi.mapv_inplace(|z| z / norm);
        let run = evolve(&p, &s, &RegisterState::pure(3, psi.clone()).unwrap(), None, &Sampling::Uniform(11), &opts(1e-10)).unwrap();
        let h = build_hamiltonian(&p, &s, 25.0).unwrap();
        let e0 = energy(&h, &psi);
        let n0: f64 = run.populations[0].iter().sum();
        for (k, st) in run.states.iter().enumerate() {
            let n: f64 = run.populations[k].iter().sum();
            prop_assert!((n - n0).abs() < 1e-8, "excitation number {n} vs {n0}");
            let e = energy(&h, amplitudes(st));
            prop_assert!((e - e0).abs() < 1e-8 * e0.abs().max(1.0), "⟨H⟩ {e} vs {e0}");
        }
    }
}

#[test]
fn tighter_tolerance_reduces_error() {
    // Chirped drive on one site of a coupled pair; reference at rtol 1e-13.
    let p = QubitParams::pair(0.4);
    let mut s = ControlSchedule::new(2, 40.0);
    s.add_ramp(0, 0.0, 40.0, -2.0, 2.0).unwrap();
    s.add_pulse(MicrowavePulse::rectangular(PulseTarget::Site(0), 0.8, 0.0, 0.0, 40.0))
        .unwrap();
    let run = |rtol: f64| {
        let r = evolve(
            &p,
            &s,
            &RegisterState::ground(2).unwrap(),
            None,
            &Sampling::Uniform(2),
            &opts(rtol),
        )
        .unwrap();
        amplitudes(&r.final_state).clone()
    };
    let reference = run(1e-13);
    let errs: Vec<f64> = [1e-6, 1e-7, 1e-8]
        .iter()
        .map(|r| (run(*r) - &reference).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn zero_hamiltonian_is_identity() {
    let p = QubitParams::synthetic(Array2::zeros((3, 3)), 4.0).unwrap();
    let s = ControlSchedule::new(3, 30.0);
    let psi = Array1::from_shape_fn(8, |i| C64::from_polar(8f64.sqrt().recip(), 0.9 * i as f64));
    let run = evolve(
        &p,
        &s,
        &RegisterState::pure(3, psi.clone()).unwrap(),
        None,
        &Sampling::Uniform(5),
        &opts(1e-9),
    )
    .unwrap();
    let out = amplitudes(&run.final_state);
    let dev = out
        .iter()
        .zip(psi.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-14, "{dev:e}");
}

#[test]
fn detuned_rabi_peaks_at_one_half() {
    // Δ = Ω_R: the generalized Rabi formula caps the excitation at 1/2.
    let omega = 0.6;
    let w = omega * 2f64.sqrt();
    let t_peak = PI / w;
    let p = QubitParams::synthetic(Array2::zeros((1, 1)), 4.0).unwrap();
    let mut s = ControlSchedule::new(1, 3.0 * t_peak);
    s.hold(0, 0.0, 3.0 * t_peak, omega).unwrap();
    s.add_pulse(MicrowavePulse::rectangular(
        PulseTarget::Site(0),
        omega,
        0.0,
        0.0,
        3.0 * t_peak,
    ))
    .unwrap();
    let times: Vec<f64> = (0..=600).map(|k| 3.0 * t_peak * k as f64 / 600.0).collect();
    let run = evolve(
        &p,
        &s,
        &RegisterState::ground(1).unwrap(),
        None,
        &Sampling::Times(times),
        &opts(1e-10),
    )
    .unwrap();
    let max = run.populations.iter().map(|p| p[0]).fold(0.0, f64::max);
    assert!((max - 0.5).abs() < 1e-4, "{max}");
}

#[test]
fn landau_zener_asymptotes() {
    let at = |g: f64| lz_sweep_experiment(&QubitParams::pair(0.3), g, &LzOptions::default()).unwrap();
    let one = at(1.0);
    assert!(
        (one.survival / lz_prediction(1.0) - 1.0).abs() < 0.02,
        "{}",
        one.survival
    );
    let two = at(2.0);
    assert!((two.survival - lz_prediction(2.0)).abs() < 5e-6, "{}", two.survival);
}
