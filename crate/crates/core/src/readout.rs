//! State-selective tunneling readout: under a reversed (extracting) field
//! the electron escapes through the barrier −Λe²/z − eE·z, exponentially
//! faster from the excited level.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::gauss_legendre;
use crate::units::{self, Constants};

/// Quadrature order for the action integral.
const QUADRATURE_POINTS: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutPulse {
    /// Magnitude of the extracting field, V/cm.
    pub extraction_field: f64,
    /// ns
    pub duration: f64,
}

impl ReadoutPulse {
    pub fn new(extraction_field: f64, duration: f64) -> Result<Self> {
        if !(extraction_field > 0.0 && extraction_field.is_finite()) {
            return Err(Error::range(
                "readout",
                format!("extraction field {extraction_field} V/cm"),
            ));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::range("readout", format!("pulse duration {duration} ns")));
        }
        Ok(ReadoutPulse {
            extraction_field,
            duration,
        })
    }
}

/// Escape of one vertical level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEscape {
    /// Level energy E_m/h, GHz (negative).
    pub energy: f64,
    /// Attempt frequency |E_m|/ħ, s⁻¹.
    pub attempt_frequency: f64,
    /// ∫√(2m(V − E))/ħ dz across the forbidden region; 0 over the barrier.
    pub action: f64,
    /// Classical turning points (nm), when a barrier exists.
    pub turning_points: Option<(f64, f64)>,
    /// Γ, s⁻¹.
    pub rate: f64,
}

impl LevelEscape {
    pub fn over_barrier(&self) -> bool {
        self.turning_points.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutModel {
    pub ground: LevelEscape,
    pub excited: LevelEscape,
}

impl ReadoutModel {
    pub fn gamma1(&self) -> f64 {
        self.ground.rate
    }

    pub fn gamma2(&self) -> f64 {
        self.excited.rate
    }

    pub fn ratio(&self) -> f64 {
        self.excited.rate / self.ground.rate
    }
}

/// Escape rate of a level at energy `energy` (GHz, negative) through
/// V(z) = −A/z − F z, with A = Λe²/h (GHz·nm) and F = eE/h (GHz/nm).
pub fn level_escape(energy: f64, image_strength: f64, field_slope: f64) -> LevelEscape {
    let eps = -energy;
    let attempt_frequency = 2.0 * PI * eps.abs() * 1e9;
    if field_slope <= 0.0 {
        return LevelEscape {
            energy,
            attempt_frequency,
            action: f64::INFINITY,
            turning_points: Some((image_strength / eps, f64::INFINITY)),
            rate: 0.0,
        };
    }
    let disc = eps * eps - 4.0 * field_slope * image_strength;
    if !(disc > 0.0) {
        return LevelEscape {
            energy,
            attempt_frequency,
            action: 0.0,
            turning_points: None,
            rate: attempt_frequency,
        };
    }
    // Turning points are the roots of F z² − ε z + A = 0; the smaller root
    // comes from the stable form to avoid cancellation.
    let q = 0.5 * (eps + disc.sqrt());
    let (z1, z2) = (image_strength / q, q / field_slope);
    let action = barrier_action(z1, z2, field_slope, units::kinetic_ghz_nm2());
    LevelEscape {
        energy,
        attempt_frequency,
        action,
        turning_points: Some((z1, z2)),
        rate: attempt_frequency * (-2.0 * action).exp(),
    }
}

/// ∫_{z1}^{z2} √((F/K)(z − z1)(z2 − z)/z) dz by the substitution
/// z = z1 + (z2 − z1)(1 − cos θ)/2, which makes the integrand smooth.
pub fn barrier_action(z1: f64, z2: f64, field_slope: f64, kinetic: f64) -> f64 {
    let (x, w) = gauss_legendre(QUADRATURE_POINTS);
    let half = 0.5 * (z2 - z1);
    let sum: f64 = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let theta = 0.5 * PI * (xi + 1.0);
            let z = z1 + half * (1.0 - theta.cos());
            let s = theta.sin();
            wi * half * half * s * s / z.sqrt()
        })
        .sum();
    (field_slope / kinetic).sqrt() * 0.5 * PI * sum
}

/// Γ₁, Γ₂ for the two lowest levels, using the zero-field hydrogenic
/// energies −R/m² (sudden approximation).
pub fn tunneling_rates(pulse: &ReadoutPulse, constants: &Constants) -> ReadoutModel {
    let a = constants.image_strength();
    let f = units::field_ghz_per_vcm_nm() * pulse.extraction_field;
    let r = constants.rydberg_ghz;
    ReadoutModel {
        ground: level_escape(-r, a, f),
        excited: level_escape(-r / 4.0, a, f),
    }
}

/// (p_detect_excited, p_false_ground) after `duration` ns.
pub fn readout_fidelity(model: &ReadoutModel, duration: f64) -> (f64, f64) {
    let p = |rate: f64| -(-rate * duration * 1e-9).exp_m1();
    (p(model.gamma2()), p(model.gamma1()))
}

/// Extraction field (V/cm) at which the ground state escapes with
/// probability ≈ Γ₁·duration = `target` during a pulse of `duration` ns.
pub fn find_operating_field(constants: &Constants, duration: f64, target: f64) -> Result<f64> {
    if !(duration > 0.0 && target > 0.0 && target < 1.0) {
        return Err(Error::range("readout", "operating-point target"));
    }
    let want = target / (duration * 1e-9);
    let gamma1 = |e: f64| {
        tunneling_rates(
            &ReadoutPulse {
                extraction_field: e,
                duration,
            },
            constants,
        )
        .gamma1()
    };
    // Upper bracket: the ground level reaches the barrier top.
    let f_top = constants.rydberg_ghz.powi(2) / (4.0 * constants.image_strength());
    let mut hi = f_top / units::field_ghz_per_vcm_nm();
    let mut lo = hi * 1e-3;
    if !(gamma1(lo) < want && gamma1(hi) > want) {
        return Err(Error::range(
            "readout",
            "no extraction field reaches the requested escape probability",
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma1(mid) < want {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
