use helium_qc_web::{LzCurves, RabiTrace, VerticalStates};

#[test]
fn vertical_states_are_normalized_and_blue_shift() {
    let zero = VerticalStates::compute(0.0, 2).unwrap();
    let z = zero.z();
    let h = z[1] - z[0];
    for psi in [zero.psi1(), zero.psi2()] {
        assert_eq!(psi.len(), z.len());
        let norm: f64 = psi.iter().map(|p| p * p * h).sum();
        assert!((norm - 1.0).abs() < 1e-6, "{norm}");
    }
    assert_eq!(zero.potential().len(), z.len());
    assert!(
        (zero.transition_ghz() / 118.4 - 1.0).abs() < 0.01,
        "{}",
        zero.transition_ghz()
    );
    let pressed = VerticalStates::compute(10.0, 2).unwrap();
    assert!(pressed.transition_ghz() > zero.transition_ghz());
    assert!(pressed.dipole_nm() > 0.0 && pressed.dipole_nm() < 2.0 * zero.dipole_nm());
}

#[test]
fn lz_curves_follow_the_asymptote() {
    let c = LzCurves::compute(&[0.2, 0.45, 1.0], 101).unwrap();
    assert_eq!(c.count(), 3);
    assert_eq!(c.alpha_t().len(), 101);
    assert!(c.alpha_t()[0] < 0.0 && *c.alpha_t().last().unwrap() > 0.0);
    let finals: Vec<f64> = (0..3).map(|i| *c.curve(i).last().unwrap()).collect();
    assert!(finals[0] < finals[1] && finals[1] < finals[2], "{finals:?}");
    for (s, p) in c.survival().iter().zip(c.prediction()) {
        assert!((s - p).abs() < 0.01, "{s} vs {p}");
    }
    assert!(c.curve(7).is_empty());
}

#[test]
fn rabi_trace_matches_formula() {
    for detuning in [0.0, 0.5] {
        let r = RabiTrace::compute(1.0, detuning, 2.0, 121).unwrap();
        assert!((r.rabi_rate() - 0.6484).abs() < 1e-3, "{}", r.rabi_rate());
        let dev = r
            .simulated()
            .iter()
            .zip(r.formula())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-6, "detuning {detuning}: {dev}");
    }
    assert!(RabiTrace::compute(0.0, 0.0, 2.0, 11).is_err());
}
