//! Vertical (out-of-plane) states of an electron above the helium surface.
//!
//! The electron sees the image potential −Λe²/z plus the pressing-field term
//! eE⊥z, with a hard wall at the surface. The Schrödinger equation is
//! discretized with three-point finite differences on a uniform grid
//! (ψ = 0 at z = 0 and at z_max) and the lowest levels are extracted with
//! Sturm bisection plus inverse iteration.

use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;
use crate::units::{coulomb_ghz_nm, field_ghz_per_vcm_nm, kinetic_ghz_nm2, Constants};

/// Grid points per Bohr radius below which a solve is rejected.
pub const MIN_POINTS_PER_BOHR: f64 = 32.0;
/// The box must reach this many n²·r_B for n requested levels.
pub const MIN_EXTENT_BOHR_PER_LEVEL_SQ: f64 = 5.0;
/// Relative energy disagreement between full and half resolution that
/// triggers a resolution error.
pub const CONVERGENCE_TOLERANCE: f64 = 5e-3;
/// Field step used for the finite-difference Stark slope, V/cm.
pub const STARK_PROBE_FIELD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalPotential {
    pub lambda_image: f64,
    /// V/cm; positive values press the electron toward the surface.
    pub pressing_field: f64,
}

impl VerticalPotential {
    pub fn new(constants: &Constants, pressing_field: f64) -> Self {
        VerticalPotential {
            lambda_image: constants.lambda_image,
            pressing_field,
        }
    }

    pub fn with_field(&self, pressing_field: f64) -> Self {
        VerticalPotential {
            pressing_field,
            ..*self
        }
    }

    /// Λe²/h, GHz·nm
    pub fn image_strength(&self) -> f64 {
        self.lambda_image * coulomb_ghz_nm()
    }

    /// eE⊥/h, GHz/nm
    pub fn field_slope(&self) -> f64 {
        self.pressing_field * field_ghz_per_vcm_nm()
    }

    /// V(z)/h in GHz for z > 0 (nm).
    pub fn energy_at(&self, z: f64) -> f64 {
        -self.image_strength() / z + self.field_slope() * z
    }

    /// Effective Bohr radius ħ²/(Λmₑe²), nm.
    pub fn bohr_radius(&self) -> f64 {
        2.0 * kinetic_ghz_nm2() / self.image_strength()
    }

    /// Top of the barrier for an extracting (negative) field: position and energy.
    pub fn barrier_top(&self) -> Option<(f64, f64)> {
        if self.pressing_field >= 0.0 {
            return None;
        }
        let a = self.image_strength();
        let f = -self.field_slope();
        Some(((a / f).sqrt(), -2.0 * (a * f).sqrt()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_max: f64,
    /// Interior points (excluding the two walls).
    pub points: usize,
}

impl GridSpec {
    pub fn new(z_max: f64, points: usize) -> Self {
        GridSpec { z_max, points }
    }

    pub fn spacing(&self) -> f64 {
        self.z_max / (self.points + 1) as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing()
    }

    /// Same extent, half as many points.
    pub fn coarsened(&self) -> Self {
        GridSpec {
            z_max: self.z_max,
            points: self.points / 2,
        }
    }

    /// Same extent, twice as many points.
    pub fn refined(&self) -> Self {
        GridSpec {
            z_max: self.z_max,
            points: self.points * 2 + 1,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            z_max: 640.0,
            points: 8192,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Principal index, m ≥ 1.
    pub index: usize,
    /// E_m/h, GHz.
    pub energy: f64,
    /// ψ_m at the grid points, normalized so that Σψ²Δz = 1, positive
    /// next to the wall.
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerticalSpectrum {
    pub potential: VerticalPotential,
    pub grid: GridSpec,
    pub levels: Vec<Level>,
    /// Set for extracting fields: levels are quasi-bound states of the box.
    pub metastable: bool,
}

impl VerticalSpectrum {
    pub fn level(&self, m: usize) -> Result<&Level> {
        if m == 0 || m > self.levels.len() {
            return Err(Error::range(
                "spectrum",
                format!("level {m} (solved 1..={})", self.levels.len()),
            ));
        }
        Ok(&self.levels[m - 1])
    }

    pub fn energy(&self, m: usize) -> Result<f64> {
        Ok(self.level(m)?.energy)
    }

    /// (E₂ − E₁)/h in GHz.
    pub fn transition_frequency(&self) -> Result<f64> {
        Ok(self.energy(2)? - self.energy(1)?)
    }

    pub fn z_values(&self) -> Vec<f64> {
        (0..self.grid.points).map(|i| self.grid.z(i)).collect()
    }

    /// ⟨m|z|m'⟩ in nm.
    pub fn dipole_matrix_element(&self, m: usize, m2: usize) -> Result<f64> {
        dipole_matrix_element(self, m, m2)
    }
}

fn hamiltonian(potential: &VerticalPotential, grid: &GridSpec) -> SymTridiagonal {
    let dz = grid.spacing();
    let kin = kinetic_ghz_nm2() / (dz * dz);
    let diag = (0..grid.points)
        .map(|i| 2.0 * kin + potential.energy_at(grid.z(i)))
        .collect();
    SymTridiagonal::new(diag, vec![-kin; grid.points - 1])
}

/// Lowest eigenpairs that belong to the surface well. For extracting fields
/// the box also holds states beyond the barrier; those are skipped.
fn surface_levels(
    potential: &VerticalPotential,
    grid: &GridSpec,
    n_levels: usize,
    with_vectors: bool,
) -> Result<Vec<(f64, Option<Vec<f64>>)>> {
    let h = hamiltonian(potential, grid);
    let barrier = potential.barrier_top();
    let mut found = Vec::with_capacity(n_levels);
    let mut k = 0;
    while found.len() < n_levels && k < h.len() {
        let e = h.eigenvalue(k);
        k += 1;
        match barrier {
            None => {
                let v = with_vectors.then(|| h.eigenvector(e));
                found.push((e, v));
            }
            Some((z_top, e_top)) => {
                if e >= e_top {
                    break;
                }
                let v = h.eigenvector(e);
                let inner: f64 = v
                    .iter()
                    .enumerate()
                    .take_while(|(i, _)| grid.z(*i) < z_top)
                    .map(|(_, x)| x * x)
                    .sum();
                if inner > 0.5 {
                    found.push((e, with_vectors.then_some(v)));
                }
            }
        }
    }
    if found.len() < n_levels {
        return Err(Error::SpectrumTruncated {
            requested: n_levels,
            found: found.len(),
        });
    }
    Ok(found)
}

/// Solve for the lowest `n_levels` vertical states.
pub fn solve_vertical(potential: &VerticalPotential, n_levels: usize, grid: &GridSpec) -> Result<VerticalSpectrum> {
    if n_levels == 0 {
        return Err(Error::range("spectrum", "n_levels must be at least 1"));
    }
    let r_b = potential.bohr_radius();
    if grid.points < 16 || grid.spacing() > r_b / MIN_POINTS_PER_BOHR {
        return Err(Error::Resolution(format!(
            "grid spacing {:.4} nm exceeds r_B/{MIN_POINTS_PER_BOHR} = {:.4} nm",
            grid.spacing(),
            r_b / MIN_POINTS_PER_BOHR
        )));
    }
    let extent = MIN_EXTENT_BOHR_PER_LEVEL_SQ * (n_levels * n_levels) as f64 * r_b;
    if grid.z_max < extent {
        return Err(Error::Resolution(format!(
            "box of {} nm is shorter than {extent:.1} nm needed for {n_levels} levels",
            grid.z_max
        )));
    }

    let fine = surface_levels(potential, grid, n_levels, true)?;
    let coarse = surface_levels(potential, &grid.coarsened(), n_levels, false)?;
    for (m, ((ef, _), (ec, _))) in fine.iter().zip(&coarse).enumerate() {
        let rel = (ef - ec).abs() / ef.abs().max(f64::MIN_POSITIVE);
        if rel > CONVERGENCE_TOLERANCE {
            return Err(Error::Resolution(format!(
                "level {} moved by {:.3}% between {} and {} points",
                m + 1,
                100.0 * rel,
                grid.coarsened().points,
                grid.points
            )));
        }
    }

    let dz = grid.spacing();
    let levels = fine
        .into_iter()
        .enumerate()
        .map(|(i, (energy, v))| {
            let mut psi = v.expect("vectors requested");
            let scale = 1.0 / dz.sqrt();
            let sign = psi.iter().find(|x| x.abs() > 1e-300).map_or(1.0, |x| x.signum());
            psi.iter_mut().for_each(|x| *x *= sign * scale);
            Level {
                index: i + 1,
                energy,
                psi,
            }
        })
        .collect();

    Ok(VerticalSpectrum {
        potential: *potential,
        grid: *grid,
        levels,
        metastable: potential.pressing_field < 0.0,
    })
}

/// ⟨m|z|m'⟩ = ∫ψ_m z ψ_m' dz in nm, evaluated with the grid quadrature.
pub fn dipole_matrix_element(spec: &VerticalSpectrum, m: usize, m2: usize) -> Result<f64> {
    let a = &spec.level(m)?.psi;
    let b = &spec.level(m2)?.psi;
    let dz = spec.grid.spacing();
    // Accumulate in a fixed, index-symmetric order so that ⟨m|z|m'⟩ == ⟨m'|z|m⟩ exactly.
    Ok(a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| (x * y) * spec.grid.z(i))
        .sum::<f64>()
        * dz)
}

/// Transition-frequency slope d[(E₂−E₁)/h]/dE⊥ in GHz/(V/cm), from two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarkSensitivity {
    /// Centered finite difference of the solved transition frequency.
    pub finite_difference: f64,
    /// e(⟨2|z|2⟩ − ⟨1|z|1⟩)/h at the operating field.
    pub hellmann_feynman: f64,
}

impl StarkSensitivity {
    pub fn value(&self) -> f64 {
        self.finite_difference
    }
}

pub fn stark_sensitivity(potential: &VerticalPotential, grid: &GridSpec) -> Result<StarkSensitivity> {
    let center = solve_vertical(potential, 2, grid)?;
    stark_sensitivity_from(&center, grid)
}

/// Same as [`stark_sensitivity`] when the spectrum at the operating field is
/// already available.
pub fn stark_sensitivity_from(center: &VerticalSpectrum, grid: &GridSpec) -> Result<StarkSensitivity> {
    let potential = center.potential;
    let e0 = potential.pressing_field;
    let d = STARK_PROBE_FIELD;
    let up = solve_vertical(&potential.with_field(e0 + d), 2, grid)?;
    let down = solve_vertical(&potential.with_field(e0 - d), 2, grid)?;
    let fd = (up.transition_frequency()? - down.transition_frequency()?) / (2.0 * d);
    let hf = field_ghz_per_vcm_nm() * (dipole_matrix_element(center, 2, 2)? - dipole_matrix_element(center, 1, 1)?);
    if ((fd - hf) / hf).abs() > 0.01 {
        return Err(Error::Resolution(format!(
            "Stark slope estimators disagree: finite difference {fd:.6}, Hellmann-Feynman {hf:.6} GHz/(V/cm)"
        )));
    }
    Ok(StarkSensitivity {
        finite_difference: fd,
        hellmann_feynman: hf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zero_field() -> VerticalPotential {
        VerticalPotential::new(&Constants::default(), 0.0)
    }

    #[test]
    fn hydrogenic_levels_at_zero_field() {
        let c = Constants::default();
        let s = solve_vertical(&zero_field(), 4, &GridSpec::default()).unwrap();
        for m in 1..=4 {
            let exact = -c.rydberg_ghz / (m * m) as f64;
            assert_relative_eq!(s.energy(m).unwrap(), exact, max_relative = 1e-3);
        }
        assert!(!s.metastable);
    }

    #[test]
    fn wavefunctions_are_orthonormal() {
        let s = solve_vertical(&zero_field(), 4, &GridSpec::default()).unwrap();
        let dz = s.grid.spacing();
        for a in &s.levels {
            for b in &s.levels {
                let overlap: f64 = a.psi.iter().zip(&b.psi).map(|(x, y)| x * y).sum::<f64>() * dz;
                if a.index == b.index {
                    assert!((overlap - 1.0).abs() < 1e-8, "norm {overlap}");
                } else {
                    assert!(overlap.abs() < 1e-7, "overlap {overlap}");
                }
            }
        }
    }

    #[test]
    fn dipole_elements_match_analytic_hydrogen() {
        let c = Constants::default();
        let s = solve_vertical(&zero_field(), 2, &GridSpec::default()).unwrap();
        assert_relative_eq!(
            s.dipole_matrix_element(1, 1).unwrap(),
            1.5 * c.bohr_nm,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            s.dipole_matrix_element(2, 2).unwrap(),
            6.0 * c.bohr_nm,
            max_relative = 1e-3
        );
        let z12 = s.dipole_matrix_element(1, 2).unwrap();
        let z21 = s.dipole_matrix_element(2, 1).unwrap();
        assert_eq!(z12, z21);
        // 96√2/243 r_B; the sign follows the positive-at-the-wall convention.
        assert_relative_eq!(z12.abs(), 96.0 * 2f64.sqrt() / 243.0 * c.bohr_nm, max_relative = 1e-3);
    }

    #[test]
    fn unsolved_level_is_range_error() {
        let s = solve_vertical(&zero_field(), 2, &GridSpec::default()).unwrap();
        assert!(matches!(s.dipole_matrix_element(1, 3), Err(Error::Range { .. })));
        assert!(s.level(0).is_err());
    }

    #[test]
    fn coarse_grid_rejected() {
        let err = solve_vertical(&zero_field(), 2, &GridSpec::new(640.0, 500)).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
        let err = solve_vertical(&zero_field(), 4, &GridSpec::new(200.0, 8192)).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
        assert!(solve_vertical(&zero_field(), 0, &GridSpec::default()).is_err());
    }

    #[test]
    fn strong_extraction_truncates() {
        let p = VerticalPotential::new(&Constants::default(), -300.0);
        let err = solve_vertical(&p, 4, &GridSpec::default()).unwrap_err();
        assert!(matches!(err, Error::SpectrumTruncated { .. }), "{err:?}");
    }

    #[test]
    fn weak_extraction_is_metastable() {
        let p = VerticalPotential::new(&Constants::default(), -1.0);
        let s = solve_vertical(&p, 2, &GridSpec::default()).unwrap();
        assert!(s.metastable);
        assert!(s.transition_frequency().unwrap() > 100.0);
    }

    #[test]
    fn stark_estimators_agree() {
        let s = stark_sensitivity(&zero_field(), &GridSpec::default()).unwrap();
        assert!((s.finite_difference / s.hellmann_feynman - 1.0).abs() < 0.01);
        let c = Constants::default();
        let perturbative = field_ghz_per_vcm_nm() * 4.5 * c.bohr_nm;
        assert_relative_eq!(s.hellmann_feynman, perturbative, max_relative = 2e-3);
        assert!((0.5..=1.5).contains(&s.value()));
    }
}
