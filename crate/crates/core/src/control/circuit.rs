use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx {
        theta: f64,
        site: usize,
    },
    Ry {
        theta: f64,
        site: usize,
    },
    Rz {
        theta: f64,
        site: usize,
    },
    /// Landau–Zener sweep of two sites through resonance with adiabaticity g.
    SweepSwap {
        a: usize,
        b: usize,
        g: f64,
    },
    Iswap {
        a: usize,
        b: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn sites(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { site, .. } | Gate::Ry { site, .. } | Gate::Rz { site, .. } => vec![site],
            Gate::SweepSwap { a, b, .. } | Gate::Iswap { a, b } => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "RX",
            Gate::Ry { .. } => "RY",
            Gate::Rz { .. } => "RZ",
            Gate::SweepSwap { .. } => "SWEEP_SWAP",
            Gate::Iswap { .. } => "ISWAP",
            Gate::Cnot { .. } => "CNOT",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx { theta, site } | Gate::Ry { theta, site } | Gate::Rz { theta, site } => {
                write!(f, "{} {} {}", self.name(), theta, site)
            }
            Gate::SweepSwap { a, b, g } => write!(f, "SWEEP_SWAP {a} {b} {g}"),
            Gate::Iswap { a, b } => write!(f, "ISWAP {a} {b}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        check_gate(&gate, self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| check_gate(g, self.n_qubits))
    }

    /// Parse the line format: `RX theta site`, `RY theta site`,
    /// `RZ theta site`, `SWEEP_SWAP a b g`, `ISWAP a b`, `CNOT c t`.
    /// `#` starts a comment. Angles accept `pi` expressions such as
    /// `-3pi/4` or `pi/2`.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let mut c = Circuit::new(n_qubits);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let gate = parse_gate(line).map_err(|e| Error::Circuit(format!("line {}: {e}", i + 1)))?;
            check_gate(&gate, n_qubits).map_err(|e| match e {
                Error::Circuit(m) => Error::Circuit(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
            c.gates.push(gate);
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn check_gate(g: &Gate, n: usize) -> Result<()> {
    let sites = g.sites();
    if let Some(s) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::Circuit(format!(
            "{}: site {s} outside register of {n}",
            g.name()
        )));
    }
    if sites.len() == 2 && sites[0] == sites[1] {
        return Err(Error::Circuit(format!(
            "{}: both operands are site {}",
            g.name(),
            sites[0]
        )));
    }
    match *g {
        Gate::Rx { theta, .. } | Gate::Ry { theta, .. } | Gate::Rz { theta, .. } if !theta.is_finite() => {
            Err(Error::Circuit(format!("{}: angle must be finite", g.name())))
        }
        Gate::SweepSwap { g: gg, .. } if !(gg > 0.0 && gg.is_finite()) => {
            Err(Error::Circuit(format!("SWEEP_SWAP: g must be positive, got {gg}")))
        }
        _ => Ok(()),
    }
}

fn parse_gate(line: &str) -> std::result::Result<Gate, String> {
    let tok: Vec<&str> = line.split_whitespace().collect();
    let name = tok[0].to_ascii_uppercase();
    let want = |n: usize| {
        if tok.len() == n + 1 {
            Ok(())
        } else {
            Err(format!("{name} takes {n} arguments, got {}", tok.len() - 1))
        }
    };
    let site = |s: &str| s.parse::<usize>().map_err(|_| format!("bad site index `{s}`"));
    match name.as_str() {
        "RX" | "RY" | "RZ" => {
            want(2)?;
            let theta = parse_angle(tok[1])?;
            let site = site(tok[2])?;
            Ok(match name.as_str() {
                "RX" => Gate::Rx { theta, site },
                "RY" => Gate::Ry { theta, site },
                _ => Gate::Rz { theta, site },
            })
        }
        "SWEEP_SWAP" => {
            want(3)?;
            let g = tok[3].parse::<f64>().map_err(|_| format!("bad g `{}`", tok[3]))?;
            Ok(Gate::SweepSwap {
                a: site(tok[1])?,
                b: site(tok[2])?,
                g,
            })
        }
        "ISWAP" => {
            want(2)?;
            Ok(Gate::Iswap {
                a: site(tok[1])?,
                b: site(tok[2])?,
            })
        }
        "CNOT" => {
            want(2)?;
            Ok(Gate::Cnot {
                control: site(tok[1])?,
                target: site(tok[2])?,
            })
        }
        _ => Err(format!("unknown gate `{}`", tok[0])),
    }
}

/// `1.5`, `pi`, `-pi/2`, `3pi/4`, `3*pi/4`, `0.25*pi`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("bad angle `{s}`");
    let lower = s.to_ascii_lowercase();
    let Some(idx) = lower.find("pi") else {
        return lower.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&lower[..idx], &lower[idx + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(coeff * PI / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("3*PI/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn parse_and_print() {
        let text = "# bell pair\nRY pi/2 0\nCNOT 0 1  # entangle\n\nSWEEP_SWAP 1 0 2\nISWAP 0 1\nRZ -0.3 1\n";
        let c = Circuit::parse(text, 2).unwrap();
        assert_eq!(c.gates.len(), 5);
        assert_eq!(c.gates[1], Gate::Cnot { control: 0, target: 1 });
        let again = Circuit::parse(&c.to_string(), 2).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn errors_name_the_line() {
        let e = Circuit::parse("RX pi 0\nRX pi 2\n", 2).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(Circuit::parse("SWEEP_SWAP 0 1 0\n", 2).is_err());
        assert!(Circuit::parse("CNOT 1 1\n", 2).is_err());
        assert!(Circuit::parse("FOO 1\n", 2).is_err());
        assert!(Circuit::parse("RX pi\n", 2).is_err());
    }
}
