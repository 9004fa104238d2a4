//! Electrode geometry → per-qubit control fields, confinement, magnetic gaps
//! and interqubit couplings, using the spherical-electrode field model.

use ndarray::Array2;

use crate::defaults;
use crate::error::{Error, Result};
use crate::spectrum::{self, GridSpec, VerticalPotential};
use crate::units::{si, Constants};

/// Γ above which the electron layer crystallizes.
pub const WIGNER_CRYSTAL_GAMMA: f64 = 130.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    /// In-plane position, µm.
    pub x: f64,
    pub y: f64,
    /// Electrode voltage V_n, mV.
    pub voltage: f64,
}

impl Site {
    pub fn new(x: f64, y: f64, voltage: f64) -> Self {
        Site { x, y, voltage }
    }

    /// Distance to another site, nm.
    pub fn distance_nm(&self, other: &Site) -> f64 {
        1e3 * (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    /// Electrode sphere radius R_el, nm.
    pub electrode_radius: f64,
    /// Depth h of the electrode center below the surface, nm.
    pub depth: f64,
    pub sites: Vec<Site>,
    /// B⊥, T.
    pub magnetic_field: f64,
    /// K
    pub temperature: f64,
    /// Capacitor contribution to E⊥, V/cm.
    pub base_pressing_field: f64,
    /// n_e, cm⁻².
    pub electron_density: f64,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        let d_um = defaults::SITE_SPACING_NM * 1e-3;
        DeviceSpec {
            electrode_radius: defaults::ELECTRODE_RADIUS_NM,
            depth: defaults::ELECTRODE_DEPTH_NM,
            sites: vec![Site::new(0.0, 0.0, 0.0), Site::new(d_um, 0.0, 0.0)],
            magnetic_field: defaults::MAGNETIC_FIELD_T,
            temperature: defaults::TEMPERATURE_K,
            base_pressing_field: defaults::BASE_PRESSING_FIELD,
            electron_density: defaults::ELECTRON_DENSITY_CM2,
        }
    }
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.electrode_radius > 0.0 && self.electrode_radius < self.depth) {
            return Err(Error::Geometry(format!(
                "electrode radius {} nm must lie in (0, depth = {} nm)",
                self.electrode_radius, self.depth
            )));
        }
        for (i, a) in self.sites.iter().enumerate() {
            for (j, b) in self.sites.iter().enumerate().skip(i + 1) {
                if !(a.distance_nm(b) > 0.0) {
                    return Err(Error::Geometry(format!("sites {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    fn site(&self, site: usize) -> Result<&Site> {
        self.sites
            .get(site)
            .ok_or_else(|| Error::range("device", format!("site {site} of {}", self.sites.len())))
    }

    /// dE⊥/dV_n = R_el/h², in (V/cm) per mV.
    pub fn field_per_millivolt(&self) -> f64 {
        // mV → V is 1e-3, nm⁻¹ → cm⁻¹ is 1e7
        self.electrode_radius / (self.depth * self.depth) * 1e4
    }

    /// E⊥ at a site: capacitor field plus V_n·R_el/h², V/cm.
    pub fn pressing_field(&self, site: usize) -> Result<f64> {
        let s = self.site(site)?;
        Ok(self.base_pressing_field + s.voltage * self.field_per_millivolt())
    }

    /// In-plane level spacing ħΩ∥ in K.
    pub fn inplane_spacing(&self, site: usize) -> Result<f64> {
        let s = self.site(site)?;
        let r = self.electrode_radius * 1e-9;
        let h = self.depth * 1e-9;
        if h <= r {
            return Err(Error::Geometry("electrode must be submerged (h > R_el)".into()));
        }
        let curvature =
            si::e_squared() * r / (h * h - r * r).powi(2) + si::ELEMENTARY_CHARGE * r * (s.voltage * 1e-3) / h.powi(3);
        if !(curvature > 0.0) {
            return Err(Error::UnconfinedSite { site });
        }
        let omega = (curvature / si::ELECTRON_MASS).sqrt();
        Ok(si::HBAR * omega / si::BOLTZMANN)
    }
}

/// Cyclotron gap ħeB⊥/mₑc in K.
pub fn magnetic_gap(field_tesla: f64) -> f64 {
    si::HBAR * si::ELEMENTARY_CHARGE * field_tesla / si::ELECTRON_MASS / si::BOLTZMANN
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Liquid,
    Crystal,
}

/// Plasma parameter Γ = e²(πn_e)^½/k_BT and the resulting phase.
pub fn coulomb_coupling(density_cm2: f64, temperature: f64) -> Result<(f64, Phase)> {
    if !(density_cm2 > 0.0 && temperature > 0.0) {
        return Err(Error::range("device", "density and temperature must be positive"));
    }
    let n_m2 = density_cm2 * 1e4;
    let gamma = si::e_squared() * (std::f64::consts::PI * n_m2).sqrt() / (si::BOLTZMANN * temperature);
    let phase = if gamma > WIGNER_CRYSTAL_GAMMA {
        Phase::Crystal
    } else {
        Phase::Liquid
    };
    Ok((gamma, phase))
}

/// Swap frequency e²|z12|²/(ħd³) between two sites, rad/ns.
pub fn swap_frequency(z12_a: f64, z12_b: f64, distance_nm: f64) -> f64 {
    let z2 = (z12_a.abs() * 1e-9) * (z12_b.abs() * 1e-9);
    let d = distance_nm * 1e-9;
    si::e_squared() * z2 / (si::HBAR * d * d * d) * 1e-9
}

/// Symmetric Ω_sw matrix (rad/ns). The pair value uses the geometric mean of
/// the two sites' |⟨1|z|2⟩|, given per site in nm.
pub fn coupling_matrix(spec: &DeviceSpec, z12: &[f64]) -> Result<Array2<f64>> {
    let n = spec.sites.len();
    if z12.len() != n {
        return Err(Error::range(
            "device",
            format!("{} matrix elements for {n} sites", z12.len()),
        ));
    }
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let d = spec.sites[i].distance_nm(&spec.sites[j]);
            if !(d > 0.0) {
                return Err(Error::Geometry(format!("sites {i} and {j} coincide")));
            }
            let w = swap_frequency(z12[i], z12[j], d);
            out[[i, j]] = w;
            out[[j, i]] = w;
        }
    }
    Ok(out)
}

/// Derived parameters of one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteParams {
    /// Ω_n/2π = (E₂−E₁)/h, GHz.
    pub bohr_frequency: f64,
    /// V/cm
    pub pressing_field: f64,
    /// GHz/(V/cm)
    pub stark_sensitivity: f64,
    /// nm
    pub z11: f64,
    pub z22: f64,
    pub z12: f64,
    /// ħΩ∥, K.
    pub inplane_spacing: f64,
    /// Angular detuning per electrode millivolt, rad/ns per mV.
    pub detuning_per_mv: f64,
}

impl SiteParams {
    /// A site with only the quantities the dynamics needs; used for synthetic
    /// registers in tests and demos.
    pub fn synthetic(z12: f64) -> Self {
        SiteParams {
            bohr_frequency: 0.0,
            pressing_field: 0.0,
            stark_sensitivity: 0.0,
            z11: 0.0,
            z22: 0.0,
            z12,
            inplane_spacing: 0.0,
            detuning_per_mv: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitParams {
    pub sites: Vec<SiteParams>,
    /// Ω_sw(n, m), rad/ns; symmetric with zero diagonal.
    pub coupling: Array2<f64>,
}

impl QubitParams {
    pub fn new(sites: Vec<SiteParams>, coupling: Array2<f64>) -> Result<Self> {
        let n = sites.len();
        if coupling.dim() != (n, n) {
            return Err(Error::range("device", "coupling matrix shape"));
        }
        for i in 0..n {
            if coupling[[i, i]] != 0.0 {
                return Err(Error::range("device", "coupling matrix diagonal must be zero"));
            }
            for j in 0..n {
                let w = coupling[[i, j]];
                if !(w >= 0.0 && w.is_finite()) || w != coupling[[j, i]] {
                    return Err(Error::range(
                        "device",
                        "coupling matrix must be symmetric and non-negative",
                    ));
                }
            }
        }
        Ok(QubitParams { sites, coupling })
    }

    /// Register of `n` synthetic sites with the given couplings (rad/ns).
    pub fn synthetic(coupling: Array2<f64>, z12: f64) -> Result<Self> {
        let n = coupling.nrows();
        QubitParams::new(vec![SiteParams::synthetic(z12); n], coupling)
    }

    /// Two sites coupled by `omega_sw` (rad/ns).
    pub fn pair(omega_sw: f64) -> Self {
        let mut c = Array2::zeros((2, 2));
        c[[0, 1]] = omega_sw;
        c[[1, 0]] = omega_sw;
        QubitParams::synthetic(c, 0.0).expect("valid pair")
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn max_coupling(&self) -> f64 {
        self.coupling.iter().copied().fold(0.0, f64::max)
    }
}

/// Compose the device model with the vertical spectrum to obtain per-site
/// parameters and the coupling matrix.
pub fn qubit_params(spec: &DeviceSpec, constants: &Constants) -> Result<QubitParams> {
    qubit_params_on(spec, constants, &GridSpec::default())
}

pub fn qubit_params_on(spec: &DeviceSpec, constants: &Constants, grid: &GridSpec) -> Result<QubitParams> {
    spec.validate()?;
    // Sites at the same field share one solve.
    let mut solved: Vec<(f64, SiteParams)> = Vec::new();
    let mut sites = Vec::with_capacity(spec.sites.len());
    for n in 0..spec.sites.len() {
        let field = spec.pressing_field(n)?;
        let inplane = spec.inplane_spacing(n)?;
        let base = match solved.iter().find(|(f, _)| *f == field) {
            Some((_, p)) => *p,
            None => {
                let potential = VerticalPotential::new(constants, field);
                let s = spectrum::solve_vertical(&potential, 2, grid)?;
                let stark = spectrum::stark_sensitivity_from(&s, grid)?;
                let p = SiteParams {
                    bohr_frequency: s.transition_frequency()?,
                    pressing_field: field,
                    stark_sensitivity: stark.value(),
                    z11: s.dipole_matrix_element(1, 1)?,
                    z22: s.dipole_matrix_element(2, 2)?,
                    z12: s.dipole_matrix_element(1, 2)?,
                    inplane_spacing: 0.0,
                    detuning_per_mv: 2.0 * std::f64::consts::PI * stark.value() * spec.field_per_millivolt(),
                };
                solved.push((field, p));
                p
            }
        };
        sites.push(SiteParams {
            inplane_spacing: inplane,
            ..base
        });
    }
    let z12: Vec<f64> = sites.iter().map(|s| s.z12).collect();
    let coupling = coupling_matrix(spec, &z12)?;
    QubitParams::new(sites, coupling)
}
