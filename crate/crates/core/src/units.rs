//! Unit system and physical constants.
//!
//! Internal base units: length in nm, energy as a frequency E/h in GHz,
//! angular frequencies and rates in rad/ns, time in ns, electric field in
//! V/cm, voltage in mV, temperature in K. Raw `f64` values inside numerical
//! kernels are always in these units; [`Quantity`] carries a unit tag at the
//! boundaries (configuration files, reports).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// CODATA 2018 values in SI.
pub mod si {
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

    /// Gaussian e², i.e. e²/(4πε₀), in J·m.
    pub fn e_squared() -> f64 {
        ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY)
    }
}

/// CGS values, used by the ripplon and relaxation-rate estimators.
pub mod cgs {
    pub const HBAR: f64 = 1.054_571_817e-27; // erg s
    pub const BOLTZMANN: f64 = 1.380_649e-16; // erg/K
    pub const ELEMENTARY_CHARGE: f64 = 4.803_204_712_570_263e-10; // statC
    /// 1 statvolt = 299.792458 V.
    pub const VOLTS_PER_STATVOLT: f64 = 299.792_458;
}

/// Dielectric constant of liquid helium.
pub const HELIUM_DIELECTRIC: f64 = 1.057;
/// Surface tension of liquid helium at low temperature, erg/cm².
pub const HELIUM_SURFACE_TENSION: f64 = 0.378;
/// Density of liquid helium at low temperature, g/cm³.
pub const HELIUM_DENSITY: f64 = 0.145;

/// ħ²/2mₑ expressed as (E/h)·z², in GHz·nm².
pub fn kinetic_ghz_nm2() -> f64 {
    si::HBAR * si::HBAR / (2.0 * si::ELECTRON_MASS) / si::PLANCK * 1e18 * 1e-9
}

/// e² (Gaussian) expressed as (E/h)·z, in GHz·nm.
pub fn coulomb_ghz_nm() -> f64 {
    si::e_squared() / si::PLANCK * 1e9 * 1e-9
}

/// e·E·z / h for E = 1 V/cm and z = 1 nm, in GHz.
pub fn field_ghz_per_vcm_nm() -> f64 {
    si::ELEMENTARY_CHARGE * 100.0 * 1e-9 / si::PLANCK * 1e-9
}

/// Material-dependent constants derived from the helium dielectric constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub epsilon_helium: f64,
    /// Image-potential strength Λ = (ε−1)/(4(ε+1)).
    pub lambda_image: f64,
    /// Effective Rydberg R/h, GHz.
    pub rydberg_ghz: f64,
    /// Effective Rydberg R/k_B, K.
    pub rydberg_k: f64,
    /// Effective Bohr radius, nm.
    pub bohr_nm: f64,
    /// erg/cm²
    pub surface_tension: f64,
    /// g/cm³
    pub helium_density: f64,
}

impl Constants {
    pub fn derive(epsilon: f64) -> Result<Self> {
        derive_constants(epsilon)
    }

    /// Angular Rydberg frequency R/ħ in s⁻¹.
    pub fn rydberg_rate(&self) -> f64 {
        2.0 * PI * self.rydberg_ghz * 1e9
    }

    /// Λe²/h in GHz·nm, the coefficient of the image potential.
    pub fn image_strength(&self) -> f64 {
        self.lambda_image * coulomb_ghz_nm()
    }
}

impl Default for Constants {
    fn default() -> Self {
        derive_constants(HELIUM_DIELECTRIC).expect("helium dielectric constant is valid")
    }
}

/// Derive Λ, R and r_B from the dielectric constant of the substrate liquid.
pub fn derive_constants(epsilon: f64) -> Result<Constants> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(Error::InvalidMaterial(format!(
            "dielectric constant must exceed 1, got {epsilon}"
        )));
    }
    let lambda = (epsilon - 1.0) / (4.0 * (epsilon + 1.0));
    let e2 = si::e_squared();
    let rydberg_j = lambda * lambda * e2 * e2 * si::ELECTRON_MASS / (2.0 * si::HBAR * si::HBAR);
    let bohr_m = si::HBAR * si::HBAR / (lambda * si::ELECTRON_MASS * e2);
    Ok(Constants {
        epsilon_helium: epsilon,
        lambda_image: lambda,
        rydberg_ghz: rydberg_j / si::PLANCK * 1e-9,
        rydberg_k: rydberg_j / si::BOLTZMANN,
        bohr_nm: bohr_m * 1e9,
        surface_tension: HELIUM_SURFACE_TENSION,
        helium_density: HELIUM_DENSITY,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Dimensionless,
    /// Energies, frequencies, temperatures and rates (all related by h, ħ, k_B).
    Energy,
    Length,
    Time,
    Field,
    Voltage,
    MagneticField,
    ArealDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    One,
    Kelvin,
    MilliKelvin,
    GigaHertz,
    MegaHertz,
    Hertz,
    ElectronVolt,
    MilliElectronVolt,
    Joule,
    /// Angular frequency in rad/ns.
    RadPerNs,
    /// Rate or angular frequency in s⁻¹ (rad/s).
    PerSecond,
    Nanometer,
    Micrometer,
    Angstrom,
    Centimeter,
    Meter,
    Nanosecond,
    Microsecond,
    Second,
    VoltPerCm,
    VoltPerM,
    MilliVolt,
    Volt,
    Tesla,
    Gauss,
    PerCm2,
    PerM2,
}

const ALL_UNITS: [Unit; 27] = [
    Unit::One,
    Unit::Kelvin,
    Unit::MilliKelvin,
    Unit::GigaHertz,
    Unit::MegaHertz,
    Unit::Hertz,
    Unit::ElectronVolt,
    Unit::MilliElectronVolt,
    Unit::Joule,
    Unit::RadPerNs,
    Unit::PerSecond,
    Unit::Nanometer,
    Unit::Micrometer,
    Unit::Angstrom,
    Unit::Centimeter,
    Unit::Meter,
    Unit::Nanosecond,
    Unit::Microsecond,
    Unit::Second,
    Unit::VoltPerCm,
    Unit::VoltPerM,
    Unit::MilliVolt,
    Unit::Volt,
    Unit::Tesla,
    Unit::Gauss,
    Unit::PerCm2,
    Unit::PerM2,
];

impl Unit {
    pub fn all() -> &'static [Unit] {
        &ALL_UNITS
    }

    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            One => Dimension::Dimensionless,
            Kelvin | MilliKelvin | GigaHertz | MegaHertz | Hertz | ElectronVolt | MilliElectronVolt | Joule
            | RadPerNs | PerSecond => Dimension::Energy,
            Nanometer | Micrometer | Angstrom | Centimeter | Meter => Dimension::Length,
            Nanosecond | Microsecond | Second => Dimension::Time,
            VoltPerCm | VoltPerM => Dimension::Field,
            MilliVolt | Volt => Dimension::Voltage,
            Tesla | Gauss => Dimension::MagneticField,
            PerCm2 | PerM2 => Dimension::ArealDensity,
        }
    }

    /// Multiplier taking a value in this unit to the internal unit of its dimension.
    pub fn to_internal_factor(self) -> f64 {
        use Unit::*;
        let kelvin_ghz = si::BOLTZMANN / si::PLANCK * 1e-9;
        let ev_ghz = si::ELEMENTARY_CHARGE / si::PLANCK * 1e-9;
        match self {
            One => 1.0,
            Kelvin => kelvin_ghz,
            MilliKelvin => kelvin_ghz * 1e-3,
            GigaHertz => 1.0,
            MegaHertz => 1e-3,
            Hertz => 1e-9,
            ElectronVolt => ev_ghz,
            MilliElectronVolt => ev_ghz * 1e-3,
            Joule => 1.0 / si::PLANCK * 1e-9,
            RadPerNs => 1.0 / (2.0 * PI),
            PerSecond => 1e-9 / (2.0 * PI),
            Nanometer => 1.0,
            Micrometer => 1e3,
            Angstrom => 0.1,
            Centimeter => 1e7,
            Meter => 1e9,
            Nanosecond => 1.0,
            Microsecond => 1e3,
            Second => 1e9,
            VoltPerCm => 1.0,
            VoltPerM => 1e-2,
            MilliVolt => 1.0,
            Volt => 1e3,
            Tesla => 1.0,
            Gauss => 1e-4,
            PerCm2 => 1.0,
            PerM2 => 1e-4,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            One => "",
            Kelvin => "K",
            MilliKelvin => "mK",
            GigaHertz => "GHz",
            MegaHertz => "MHz",
            Hertz => "Hz",
            ElectronVolt => "eV",
            MilliElectronVolt => "meV",
            Joule => "J",
            RadPerNs => "rad/ns",
            PerSecond => "1/s",
            Nanometer => "nm",
            Micrometer => "um",
            Angstrom => "A",
            Centimeter => "cm",
            Meter => "m",
            Nanosecond => "ns",
            Microsecond => "us",
            Second => "s",
            VoltPerCm => "V/cm",
            VoltPerM => "V/m",
            MilliVolt => "mV",
            Volt => "V",
            Tesla => "T",
            Gauss => "G",
            PerCm2 => "cm^-2",
            PerM2 => "m^-2",
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unit = match s {
            "" | "1" => Unit::One,
            "µm" | "μm" => Unit::Micrometer,
            "Å" => Unit::Angstrom,
            "s^-1" | "s-1" | "Hz_rad" => Unit::PerSecond,
            "ns^-1" => Unit::RadPerNs,
            "cm-2" | "1/cm^2" => Unit::PerCm2,
            _ => {
                return ALL_UNITS
                    .iter()
                    .copied()
                    .find(|u| u.symbol() == s)
                    .ok_or_else(|| Error::UnknownUnit(s.to_string()))
            }
        };
        Ok(unit)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Quantity { value, unit }
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    /// Value in the internal unit of this quantity's dimension.
    pub fn to_internal(&self) -> f64 {
        self.value * self.unit.to_internal_factor()
    }

    pub fn from_internal(value: f64, unit: Unit) -> Self {
        Quantity {
            value: value / unit.to_internal_factor(),
            unit,
        }
    }

    /// Internal value, checking the dimension first.
    pub fn internal_as(&self, dimension: Dimension) -> Result<f64> {
        if self.dimension() != dimension {
            return Err(Error::Unit {
                from: self.unit.symbol().to_string(),
                to: format!("{dimension:?}"),
            });
        }
        Ok(self.to_internal())
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit == Unit::One {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} {}", self.value, self.unit)
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    /// Parses `"<number> <unit>"`; the unit may be omitted for dimensionless values.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, unit) = match s.find(char::is_whitespace) {
            Some(i) => (&s[..i], s[i..].trim()),
            None => (s, ""),
        };
        let value: f64 = num
            .parse()
            .map_err(|_| Error::UnknownUnit(format!("cannot parse number `{num}`")))?;
        Ok(Quantity::new(value, unit.parse()?))
    }
}

/// Rescale `q` into `target`. Energy, frequency, temperature and rate units
/// interconvert through h, ħ and k_B.
pub fn convert(q: Quantity, target: Unit) -> Result<Quantity> {
    if q.unit.dimension() != target.dimension() {
        return Err(Error::Unit {
            from: q.unit.symbol().to_string(),
            to: target.symbol().to_string(),
        });
    }
    if q.unit == target {
        return Ok(q);
    }
    Ok(Quantity::from_internal(q.to_internal(), target))
}
