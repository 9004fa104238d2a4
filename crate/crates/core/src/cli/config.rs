//! Line-oriented run configuration:
//!
//! ```text
//! [constants]
//! epsilon = 1.057
//! [device]
//! depth = 500 nm
//! [sites]
//! site = 0 0 um 0 mV
//! site = 0.5 0 um 0 mV
//! ```
//!
//! Every physical value carries its unit; unknown sections and keys are
//! rejected. Sections that are left out keep their defaults. A `[sites]`
//! header with no `site` lines gives an empty register.

use std::fmt;

use crate::control::{CompileOptions, Limits};
use crate::decoherence::{DecoherenceModel, SurfaceDisplacement};
use crate::defaults;
use crate::device::{DeviceSpec, Site};
use crate::dynamics::{Envelope, EvolveOptions};
use crate::spectrum::GridSpec;
use crate::units::{self, Constants, Dimension, Quantity, Unit};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: String,
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}:{}: {}", self.file, self.line, self.message)
        } else {
            write!(f, "{}:{}: {}: {}", self.file, self.line, self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_sites: usize,
    /// Vertical box, nm.
    pub grid_extent: f64,
    pub grid_points: usize,
    /// V/cm
    pub microwave_field: f64,
    pub envelope: Envelope,
    pub global_drive: bool,
    pub park_factor: f64,
    /// rad/ns
    pub min_park_detuning: f64,
    pub sweep_tail: f64,
    /// mV
    pub max_voltage: f64,
    /// rad/ns
    pub max_rabi_rate: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let grid = GridSpec::default();
        SimulationConfig {
            rtol: defaults::RTOL,
            atol: defaults::ATOL,
            max_sites: defaults::MAX_PURE_SITES,
            grid_extent: grid.z_max,
            grid_points: grid.points,
            microwave_field: defaults::MICROWAVE_FIELD,
            envelope: Envelope::Rectangular,
            global_drive: false,
            park_factor: defaults::PARK_FACTOR,
            min_park_detuning: defaults::MIN_PARK_DETUNING,
            sweep_tail: defaults::SWEEP_TAIL_FACTOR,
            max_voltage: defaults::MAX_VOLTAGE_MV,
            max_rabi_rate: defaults::MAX_RABI_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceConfig {
    pub model: DecoherenceModel,
    /// s⁻¹
    pub working_frequency: f64,
    pub budget_threshold: f64,
}

impl Default for DecoherenceConfig {
    fn default() -> Self {
        DecoherenceConfig {
            model: DecoherenceModel::default(),
            working_frequency: defaults::WORKING_FREQUENCY,
            budget_threshold: defaults::BUDGET_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub epsilon: f64,
    pub device: DeviceSpec,
    pub simulation: SimulationConfig,
    pub decoherence: DecoherenceConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            epsilon: units::HELIUM_DIELECTRIC,
            device: DeviceSpec::default(),
            simulation: SimulationConfig::default(),
            decoherence: DecoherenceConfig::default(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Constants,
    Device,
    Sites,
    Simulation,
    Decoherence,
}

struct Cursor<'a> {
    file: &'a str,
    line: usize,
    key: &'a str,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError {
            file: self.file.to_string(),
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    /// Value expressed in `unit`, after checking the dimension matches.
    fn quantity(&self, value: &str, unit: Unit) -> Result<f64, ConfigError> {
        let q: Quantity = value.parse().map_err(|e| self.err(format!("{e}")))?;
        if unit != Unit::One && q.unit == Unit::One {
            return Err(self.err(format!("missing unit (expected e.g. `{}`)", unit.symbol())));
        }
        let v = units::convert(q, unit).map_err(|e| self.err(format!("{e}")))?.value;
        if !v.is_finite() {
            return Err(self.err("value must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, value: &str, unit: Unit) -> Result<f64, ConfigError> {
        let v = self.quantity(value, unit)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.err("must be positive"))
        }
    }

    fn non_negative(&self, value: &str, unit: Unit) -> Result<f64, ConfigError> {
        let v = self.quantity(value, unit)?;
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(self.err("must not be negative"))
        }
    }

    fn count(&self, value: &str) -> Result<usize, ConfigError> {
        value
            .trim()
            .parse()
            .map_err(|_| self.err(format!("expected a non-negative integer, got `{value}`")))
    }

    fn flag(&self, value: &str) -> Result<bool, ConfigError> {
        match value.trim() {
            "true" | "yes" | "on" => Ok(true),
            "false" | "no" | "off" => Ok(false),
            v => Err(self.err(format!("expected true or false, got `{v}`"))),
        }
    }
}

impl Config {
    /// Parse configuration text; `file` only labels diagnostics.
    pub fn parse(text: &str, file: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut section: Option<Section> = None;
        let mut seen: Vec<(&'static str, &str)> = Vec::new();
        let mut sites_declared = false;
        let mut sites = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cur = Cursor {
                file,
                line: i + 1,
                key: "",
            };
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| cur.err(format!("malformed section header `{line}`")))?
                    .trim();
                section = Some(match name {
                    "constants" => Section::Constants,
                    "device" => Section::Device,
                    "sites" => {
                        sites_declared = true;
                        Section::Sites
                    }
                    "simulation" => Section::Simulation,
                    "decoherence" => Section::Decoherence,
                    _ => return Err(cur.err(format!("unknown section [{name}]"))),
                });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cur.err(format!("expected `key = value unit`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            cur.key = key;
            let Some(sec) = section else {
                return Err(cur.err("key outside any [section]"));
            };
            let sec_name = section_name(sec);
            if sec != Section::Sites {
                if seen.contains(&(sec_name, key)) {
                    return Err(cur.err("duplicate key"));
                }
                seen.push((sec_name, key));
            }
            let unknown = || cur.err(format!("unknown key in [{sec_name}]"));
            match sec {
                Section::Constants => match key {
                    "epsilon" => cfg.epsilon = cur.quantity(value, Unit::One)?,
                    _ => return Err(unknown()),
                },
                Section::Device => {
                    let d = &mut cfg.device;
                    match key {
                        "electrode_radius" => d.electrode_radius = cur.positive(value, Unit::Nanometer)?,
                        "depth" => d.depth = cur.positive(value, Unit::Nanometer)?,
                        "magnetic_field" => d.magnetic_field = cur.quantity(value, Unit::Tesla)?,
                        "temperature" => d.temperature = cur.positive(value, Unit::Kelvin)?,
                        "base_pressing_field" => d.base_pressing_field = cur.quantity(value, Unit::VoltPerCm)?,
                        "electron_density" => d.electron_density = cur.positive(value, Unit::PerCm2)?,
                        _ => return Err(unknown()),
                    }
                }
                Section::Sites => match key {
                    "site" => sites.push(parse_site(&cur, value)?),
                    _ => return Err(unknown()),
                },
                Section::Simulation => {
                    let s = &mut cfg.simulation;
                    match key {
                        "rtol" => s.rtol = cur.positive(value, Unit::One)?,
                        "atol" => s.atol = cur.positive(value, Unit::One)?,
                        "max_sites" => s.max_sites = cur.count(value)?,
                        "grid_extent" => s.grid_extent = cur.positive(value, Unit::Nanometer)?,
                        "grid_points" => s.grid_points = cur.count(value)?,
                        "microwave_field" => s.microwave_field = cur.non_negative(value, Unit::VoltPerCm)?,
                        "envelope" => {
                            s.envelope = match value {
                                "rectangular" => Envelope::Rectangular,
                                "raised_cosine" => Envelope::RaisedCosine,
                                _ => return Err(cur.err("expected rectangular or raised_cosine")),
                            }
                        }
                        "global_drive" => s.global_drive = cur.flag(value)?,
                        "park_factor" => s.park_factor = cur.positive(value, Unit::One)?,
                        "min_park_detuning" => s.min_park_detuning = cur.positive(value, Unit::RadPerNs)?,
                        "sweep_tail" => s.sweep_tail = cur.positive(value, Unit::One)?,
                        "max_voltage" => s.max_voltage = cur.positive(value, Unit::MilliVolt)?,
                        "max_rabi_rate" => s.max_rabi_rate = cur.positive(value, Unit::RadPerNs)?,
                        _ => return Err(unknown()),
                    }
                }
                Section::Decoherence => {
                    let d = &mut cfg.decoherence;
                    match key {
                        "surface_displacement" => {
                            d.model.displacement = if value == "thermal" {
                                SurfaceDisplacement::Thermal {
                                    k_min: defaults::RIPPLON_K_MIN,
                                    k_max: defaults::RIPPLON_K_MAX,
                                }
                            } else {
                                SurfaceDisplacement::Fixed(cur.non_negative(value, Unit::Centimeter)?)
                            }
                        }
                        "image_field" => d.model.image_field = cur.non_negative(value, Unit::VoltPerCm)?,
                        "t2_prefactor" => {
                            d.model.t2_prefactor = if value == "auto" {
                                None
                            } else {
                                Some(cur.positive(value, Unit::PerSecond)?)
                            }
                        }
                        "working_frequency" => d.working_frequency = cur.non_negative(value, Unit::PerSecond)?,
                        "budget_threshold" => d.budget_threshold = cur.positive(value, Unit::One)?,
                        _ => return Err(unknown()),
                    }
                }
            }
        }
        if sites_declared {
            cfg.device.sites = sites;
        }
        let whole = |message: String| ConfigError {
            file: file.to_string(),
            line: 0,
            key: String::new(),
            message,
        };
        Constants::derive(cfg.epsilon).map_err(|e| whole(format!("epsilon: {e}")))?;
        cfg.device.validate().map_err(|e| whole(e.to_string()))?;
        if cfg.device.sites.len() > cfg.simulation.max_sites {
            return Err(whole(format!(
                "{} sites exceed max_sites = {}",
                cfg.device.sites.len(),
                cfg.simulation.max_sites
            )));
        }
        Ok(cfg)
    }

    pub fn constants(&self) -> Constants {
        Constants::derive(self.epsilon).expect("validated on parse")
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.simulation.grid_extent, self.simulation.grid_points)
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            rtol: self.simulation.rtol,
            atol: self.simulation.atol,
            ..EvolveOptions::default()
        }
    }

    /// Compiler settings; `t2_inv` comes from the rate budget.
    pub fn compile_options(&self, t2_inv: f64) -> CompileOptions {
        let s = &self.simulation;
        CompileOptions {
            microwave_field: s.microwave_field,
            rabi_rate: None,
            envelope: s.envelope,
            global_drive: s.global_drive,
            park_factor: s.park_factor,
            min_park_detuning: s.min_park_detuning,
            sweep_tail: s.sweep_tail,
            limits: Limits {
                max_voltage_mv: s.max_voltage,
                max_rabi_rate: s.max_rabi_rate,
                budget_threshold: self.decoherence.budget_threshold,
            },
            t2_inv,
        }
    }
}

fn section_name(s: Section) -> &'static str {
    match s {
        Section::Constants => "constants",
        Section::Device => "device",
        Section::Sites => "sites",
        Section::Simulation => "simulation",
        Section::Decoherence => "decoherence",
    }
}

/// `x y <length unit> V <voltage unit>`
fn parse_site(cur: &Cursor<'_>, value: &str) -> Result<Site, ConfigError> {
    let tok: Vec<&str> = value.split_whitespace().collect();
    if tok.len() != 5 {
        return Err(cur.err("expected `x y <length unit> voltage <voltage unit>`, e.g. `0.5 0 um 0 mV`"));
    }
    let unit: Unit = tok[2].parse().map_err(|e| cur.err(format!("{e}")))?;
    if unit.dimension() != Dimension::Length {
        return Err(cur.err(format!("`{}` is not a length unit", tok[2])));
    }
    let x = cur.quantity(&format!("{} {}", tok[0], tok[2]), Unit::Micrometer)?;
    let y = cur.quantity(&format!("{} {}", tok[1], tok[2]), Unit::Micrometer)?;
    let v = cur.quantity(&format!("{} {}", tok[3], tok[4]), Unit::MilliVolt)?;
    Ok(Site::new(x, y, v))
}

/// Re-emits every value, so that parsing the output gives back an equal
/// `Config`.
impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.device;
        writeln!(f, "[constants]")?;
        writeln!(f, "epsilon = {}", self.epsilon)?;
        writeln!(f, "\n[device]")?;
        writeln!(f, "electrode_radius = {} nm", d.electrode_radius)?;
        writeln!(f, "depth = {} nm", d.depth)?;
        writeln!(f, "magnetic_field = {} T", d.magnetic_field)?;
        writeln!(f, "temperature = {} K", d.temperature)?;
        writeln!(f, "base_pressing_field = {} V/cm", d.base_pressing_field)?;
        writeln!(f, "electron_density = {} cm^-2", d.electron_density)?;
        writeln!(f, "\n[sites]")?;
        for s in &d.sites {
            writeln!(f, "site = {} {} um {} mV", s.x, s.y, s.voltage)?;
        }
        let s = &self.simulation;
        writeln!(f, "\n[simulation]")?;
        writeln!(f, "rtol = {}", s.rtol)?;
        writeln!(f, "atol = {}", s.atol)?;
        writeln!(f, "max_sites = {}", s.max_sites)?;
        writeln!(f, "grid_extent = {} nm", s.grid_extent)?;
        writeln!(f, "grid_points = {}", s.grid_points)?;
        writeln!(f, "microwave_field = {} V/cm", s.microwave_field)?;
        let env = match s.envelope {
            Envelope::Rectangular => "rectangular",
            Envelope::RaisedCosine => "raised_cosine",
        };
        writeln!(f, "envelope = {env}")?;
        writeln!(f, "global_drive = {}", s.global_drive)?;
        writeln!(f, "park_factor = {}", s.park_factor)?;
        writeln!(f, "min_park_detuning = {} rad/ns", s.min_park_detuning)?;
        writeln!(f, "sweep_tail = {}", s.sweep_tail)?;
        writeln!(f, "max_voltage = {} mV", s.max_voltage)?;
        writeln!(f, "max_rabi_rate = {} rad/ns", s.max_rabi_rate)?;
        let c = &self.decoherence;
        writeln!(f, "\n[decoherence]")?;
        match c.model.displacement {
            SurfaceDisplacement::Fixed(x) => writeln!(f, "surface_displacement = {x} cm")?,
            SurfaceDisplacement::Thermal { .. } => writeln!(f, "surface_displacement = thermal")?,
        }
        writeln!(f, "image_field = {} V/cm", c.model.image_field)?;
        match c.model.t2_prefactor {
            Some(p) => writeln!(f, "t2_prefactor = {p} 1/s")?,
            None => writeln!(f, "t2_prefactor = auto")?,
        }
        writeln!(f, "working_frequency = {} 1/s", c.working_frequency)?;
        writeln!(f, "budget_threshold = {}", c.budget_threshold)
    }
}
