use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Linear detuning ramp on [start, end), rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub start: f64,
    pub end: f64,
    pub from: f64,
    pub to: f64,
}

impl Ramp {
    pub fn value_at(&self, t: f64) -> f64 {
        self.from + (self.to - self.from) * (t - self.start) / (self.end - self.start)
    }

    /// ∫Δ dt over the ramp.
    pub fn area(&self) -> f64 {
        0.5 * (self.from + self.to) * (self.end - self.start)
    }
}

/// Piecewise-linear Bohr-frequency offset of one site from the rotating
/// frame. Outside every ramp the offset is zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetuningChannel {
    pub ramps: Vec<Ramp>,
}

impl DetuningChannel {
    fn active(&self, probe: f64) -> Option<&Ramp> {
        let i = self.ramps.partition_point(|r| r.start <= probe);
        i.checked_sub(1).map(|i| &self.ramps[i]).filter(|r| probe < r.end)
    }

    /// Right-continuous value at `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        self.active(t).map_or(0.0, |r| r.value_at(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Rectangular,
    /// sin² rise and fall over the full pulse; half the area of a rectangle.
    RaisedCosine,
}

impl Envelope {
    /// Pulse area divided by (peak Rabi rate × duration).
    pub fn area_fraction(self) -> f64 {
        match self {
            Envelope::Rectangular => 1.0,
            Envelope::RaisedCosine => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseTarget {
    Site(usize),
    Global,
}

impl PulseTarget {
    fn hits(self, site: usize) -> bool {
        match self {
            PulseTarget::Site(s) => s == site,
            PulseTarget::Global => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrowavePulse {
    pub target: PulseTarget,
    /// Peak Rabi rate Ω_R, rad/ns.
    pub rabi_rate: f64,
    /// Carrier offset from the rotating frame, rad/ns.
    pub carrier_detuning: f64,
    /// rad, canonicalized to [0, 2π) when added to a schedule.
    pub phase: f64,
    pub start: f64,
    pub end: f64,
    pub envelope: Envelope,
}

impl MicrowavePulse {
    pub fn rectangular(target: PulseTarget, rabi_rate: f64, phase: f64, start: f64, end: f64) -> Self {
        MicrowavePulse {
            target,
            rabi_rate,
            carrier_detuning: 0.0,
            phase,
            start,
            end,
            envelope: Envelope::Rectangular,
        }
    }

    pub fn amplitude_at(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::Rectangular => self.rabi_rate,
            Envelope::RaisedCosine => {
                let s = (PI * (t - self.start) / (self.end - self.start)).sin();
                self.rabi_rate * s * s
            }
        }
    }

    pub fn phase_at(&self, t: f64) -> f64 {
        self.phase - self.carrier_detuning * (t - self.start)
    }
}

/// Control values at one instant: per-site detuning Δ_n (rad/ns) and drive
/// coefficient (Ω_R/2)·e^{iφ} multiplying |1⟩⟨0|.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub detuning: Vec<f64>,
    pub drive: Vec<C64>,
}

/// Time-ordered control channels for an N-site register.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    pub duration: f64,
    pub detuning: Vec<DetuningChannel>,
    pub pulses: Vec<MicrowavePulse>,
}

impl ControlSchedule {
    pub fn new(n_sites: usize, duration: f64) -> Self {
        ControlSchedule {
            duration,
            detuning: vec![DetuningChannel::default(); n_sites],
            pulses: Vec::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.detuning.len()
    }

    fn check_interval(&self, start: f64, end: f64) -> Result<()> {
        if !(start.is_finite() && end.is_finite() && 0.0 <= start && start < end && end <= self.duration) {
            return Err(Error::Scheduling(format!(
                "interval [{start}, {end}] outside [0, {}] or empty",
                self.duration
            )));
        }
        Ok(())
    }

    pub fn add_ramp(&mut self, site: usize, start: f64, end: f64, from: f64, to: f64) -> Result<()> {
        self.check_interval(start, end)?;
        if !(from.is_finite() && to.is_finite()) {
            return Err(Error::Scheduling("non-finite detuning".into()));
        }
        let channel = self
            .detuning
            .get_mut(site)
            .ok_or_else(|| Error::range("dynamics", format!("site {site}")))?;
        let i = channel.ramps.partition_point(|r| r.start < start);
        let clash_before = i > 0 && channel.ramps[i - 1].end > start;
        let clash_after = i < channel.ramps.len() && channel.ramps[i].start < end;
        if clash_before || clash_after {
            return Err(Error::Scheduling(format!(
                "detuning ramps overlap on site {site} near t = {start} ns"
            )));
        }
        channel.ramps.insert(i, Ramp { start, end, from, to });
        Ok(())
    }

    pub fn hold(&mut self, site: usize, start: f64, end: f64, value: f64) -> Result<()> {
        self.add_ramp(site, start, end, value, value)
    }

    pub fn add_pulse(&mut self, mut pulse: MicrowavePulse) -> Result<()> {
        self.check_interval(pulse.start, pulse.end)?;
        if !(pulse.rabi_rate.is_finite() && pulse.carrier_detuning.is_finite() && pulse.phase.is_finite()) {
            return Err(Error::Scheduling("non-finite pulse parameter".into()));
        }
        if let PulseTarget::Site(s) = pulse.target {
            if s >= self.n_sites() {
                return Err(Error::range("dynamics", format!("pulse target site {s}")));
            }
        }
        for other in &self.pulses {
            let overlap = pulse.start < other.end && other.start < pulse.end;
            let shared = (0..self.n_sites()).any(|s| pulse.target.hits(s) && other.target.hits(s));
            if overlap && shared {
                return Err(Error::Scheduling(format!(
                    "pulses overlap on a shared site in [{}, {}] ns",
                    pulse.start.max(other.start),
                    pulse.end.min(other.end)
                )));
            }
        }
        pulse.phase = pulse.phase.rem_euclid(TAU);
        let i = self.pulses.partition_point(|p| p.start <= pulse.start);
        self.pulses.insert(i, pulse);
        Ok(())
    }

    /// Sorted, deduplicated times at which any channel changes form,
    /// including 0 and the duration.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut t = vec![0.0, self.duration];
        for ch in &self.detuning {
            for r in &ch.ramps {
                t.push(r.start);
                t.push(r.end);
            }
        }
        for p in &self.pulses {
            t.push(p.start);
            t.push(p.end);
        }
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    /// Controls at time `t`, with channel pieces selected at `probe`. Inside
    /// an integration interval `probe` is the interval midpoint so that the
    /// endpoints use the interval's own piece.
    pub fn controls_with_probe(&self, t: f64, probe: f64) -> Controls {
        let n = self.n_sites();
        let detuning = self
            .detuning
            .iter()
            .map(|ch| ch.active(probe).map_or(0.0, |r| r.value_at(t)))
            .collect();
        let mut drive = vec![C64::new(0.0, 0.0); n];
        for p in &self.pulses {
            if p.start <= probe && probe < p.end {
                let c = C64::from_polar(0.5 * p.amplitude_at(t), p.phase_at(t));
                for (s, d) in drive.iter_mut().enumerate() {
                    if p.target.hits(s) {
                        *d += c;
                    }
                }
            }
        }
        Controls { detuning, drive }
    }

    pub fn controls_at(&self, t: f64) -> Result<Controls> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::range(
                "dynamics",
                format!("t = {t} ns outside [0, {}]", self.duration),
            ));
        }
        // At the final instant use the last piece.
        let probe = if t == self.duration && t > 0.0 {
            t - f64::EPSILON * t.max(1.0)
        } else {
            t
        };
        Ok(self.controls_with_probe(t, probe))
    }

    /// Largest |Δ| over the schedule for each site, with the time it occurs.
    pub fn peak_detuning(&self) -> Vec<(f64, f64)> {
        self.detuning
            .iter()
            .map(|ch| {
                ch.ramps.iter().fold((0.0, 0.0), |(best, at), r| {
                    let (v, t) = if r.from.abs() >= r.to.abs() {
                        (r.from.abs(), r.start)
                    } else {
                        (r.to.abs(), r.end)
                    };
                    if v > best {
                        (v, t)
                    } else {
                        (best, at)
                    }
                })
            })
            .collect()
    }

    /// CSV of channel breakpoints: one row per ramp or pulse.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "channel,site,t0_ns,t1_ns,v0,v1,phase_rad,carrier_rad_per_ns,envelope"
        )?;
        for (s, ch) in self.detuning.iter().enumerate() {
            for r in &ch.ramps {
                writeln!(
                    w,
                    "detuning,{s},{},{},{},{},,,",
                    sci(r.start),
                    sci(r.end),
                    sci(r.from),
                    sci(r.to)
                )?;
            }
        }
        for p in &self.pulses {
            let site = match p.target {
                PulseTarget::Site(s) => s.to_string(),
                PulseTarget::Global => "all".to_string(),
            };
            let env = match p.envelope {
                Envelope::Rectangular => "rectangular",
                Envelope::RaisedCosine => "raised-cosine",
            };
            writeln!(
                w,
                "microwave,{site},{},{},{},{},{},{},{env}",
                sci(p.start),
                sci(p.end),
                sci(p.rabi_rate),
                sci(p.rabi_rate),
                sci(p.phase),
                sci(p.carrier_detuning)
            )?;
        }
        Ok(())
    }
}

/// Fixed scientific formatting with nine significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramps_evaluate_piecewise() {
        let mut s = ControlSchedule::new(1, 10.0);
        s.add_ramp(0, 0.0, 4.0, 0.0, 4.0).unwrap();
        s.hold(0, 4.0, 10.0, -1.0).unwrap();
        assert_eq!(s.controls_at(2.0).unwrap().detuning[0], 2.0);
        // right-continuous at the join
        assert_eq!(s.controls_at(4.0).unwrap().detuning[0], -1.0);
        assert_eq!(s.controls_at(10.0).unwrap().detuning[0], -1.0);
        // inside an interval, the probe picks the piece
        assert_eq!(s.controls_with_probe(4.0, 3.0).detuning[0], 4.0);
        assert!(s.controls_at(10.5).is_err());
        assert_eq!(s.breakpoints(), vec![0.0, 4.0, 10.0]);
    }

    #[test]
    fn overlapping_ramps_rejected() {
        let mut s = ControlSchedule::new(1, 10.0);
        s.hold(0, 2.0, 5.0, 1.0).unwrap();
        assert!(matches!(s.hold(0, 4.0, 6.0, 1.0), Err(Error::Scheduling(_))));
        assert!(matches!(s.hold(0, 1.0, 3.0, 1.0), Err(Error::Scheduling(_))));
        assert!(s.hold(0, 5.0, 6.0, 1.0).is_ok());
        assert!(s.hold(0, 0.0, 2.0, 1.0).is_ok());
        assert!(s.hold(0, 9.0, 11.0, 1.0).is_err());
    }

    #[test]
    fn overlapping_pulses_on_one_site_rejected() {
        let mut s = ControlSchedule::new(2, 10.0);
        s.add_pulse(MicrowavePulse::rectangular(PulseTarget::Site(0), 1.0, 0.0, 0.0, 5.0))
            .unwrap();
        s.add_pulse(MicrowavePulse::rectangular(PulseTarget::Site(1), 1.0, 0.0, 2.0, 6.0))
            .unwrap();
        let err = s
            .add_pulse(MicrowavePulse::rectangular(PulseTarget::Global, 1.0, 0.0, 4.0, 8.0))
            .unwrap_err();
        assert!(matches!(err, Error::Scheduling(_)));
    }

    #[test]
    fn phases_canonicalized() {
        let mut s = ControlSchedule::new(1, 1.0);
        s.add_pulse(MicrowavePulse::rectangular(
            PulseTarget::Site(0),
            1.0,
            -PI / 2.0,
            0.0,
            1.0,
        ))
        .unwrap();
        assert!((s.pulses[0].phase - 1.5 * PI).abs() < 1e-15);
        let c = s.controls_at(0.5).unwrap();
        assert!((c.drive[0] - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn raised_cosine_area() {
        let p = MicrowavePulse {
            envelope: Envelope::RaisedCosine,
            ..MicrowavePulse::rectangular(PulseTarget::Site(0), 2.0, 0.0, 1.0, 3.0)
        };
        let n = 10_000;
        let h = 2.0 / n as f64;
        let area: f64 = (0..n).map(|k| p.amplitude_at(1.0 + (k as f64 + 0.5) * h) * h).sum();
        assert!((area - 2.0 * 2.0 * Envelope::RaisedCosine.area_fraction()).abs() < 1e-6);
    }
}
