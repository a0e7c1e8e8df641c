//! Gaussian drive pulses and the time-dependent drive Hamiltonian.
//!
//! Pulse area convention: the instantaneous Rabi frequency is `Ω(t) = 2|ε(t)|`
//! and `area = ∫Ω dt`, so an emitter pulse of area π fully inverts g ↔ 1.
//! The FWHM refers to the field envelope, not the intensity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hilbert::{cavity_annihilation, emitter_embedded, HilbertDims, Level, Operator, C64};
use crate::model::HBAR_UEV_PS;

/// Half-width of the window (in units of FWHM) outside which a pulse is
/// treated as switched off.
pub const ACTIVE_HALF_WIDTH_FWHM: f64 = 6.0;

/// Emitter pulses closer than this many FWHM trigger an overlap warning.
pub const OVERLAP_WARNING_FWHM: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseTarget {
    /// Probe feeding the cavity mode (`a`).
    Cavity,
    /// Control on the g ↔ 1 emitter transition (`σ_g1`).
    EmitterG1,
}

impl FromStr for PulseTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cavity" => Ok(PulseTarget::Cavity),
            "emitter_g1" => Ok(PulseTarget::EmitterG1),
            other => Err(Error::param(
                "target",
                format!("unknown pulse target `{other}` (expected cavity or emitter_g1)"),
            )),
        }
    }
}

impl fmt::Display for PulseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseTarget::Cavity => write!(f, "cavity"),
            PulseTarget::EmitterG1 => write!(f, "emitter_g1"),
        }
    }
}

/// Standard deviation of a Gaussian with the given FWHM.
pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
}

/// Peak field amplitude (rad/ps) that yields `area` for a Gaussian of the
/// given FWHM.
pub fn amplitude_from_area(area: f64, fwhm: f64) -> Result<f64> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(Error::param("fwhm_ps", format!("must be > 0, got {fwhm}")));
    }
    let s = fwhm_to_sigma(fwhm);
    Ok(area / (2.0 * s * (2.0 * std::f64::consts::PI).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPulse {
    pub target: PulseTarget,
    /// Centre time, ps.
    pub t0: f64,
    /// Field-envelope FWHM, ps.
    pub fwhm: f64,
    /// Pulse area, rad.
    pub area: f64,
    /// Carrier offset from the frame carrier, μeV.
    pub detuning: f64,
    /// Carrier phase, rad.
    pub phase: f64,
}

impl GaussianPulse {
    pub fn new(target: PulseTarget, t0: f64, fwhm: f64, area: f64) -> Self {
        Self {
            target,
            t0,
            fwhm,
            area,
            detuning: 0.0,
            phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm > 0.0) || !self.fwhm.is_finite() {
            return Err(Error::param("fwhm_ps", format!("must be > 0, got {}", self.fwhm)));
        }
        if !(self.area >= 0.0) || !self.area.is_finite() {
            return Err(Error::param("area", format!("must be >= 0, got {}", self.area)));
        }
        for (name, v) in [("t0_ps", self.t0), ("detuning_ueV", self.detuning), ("phase", self.phase)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        fwhm_to_sigma(self.fwhm)
    }

    pub fn peak_amplitude(&self) -> f64 {
        amplitude_from_area(self.area, self.fwhm).unwrap_or(0.0)
    }

    /// Complex envelope `ε(t)` in rad/ps.
    pub fn envelope(&self, t: f64) -> C64 {
        let s = self.sigma();
        let x = (t - self.t0) / s;
        let mag = self.peak_amplitude() * (-0.5 * x * x).exp();
        C64::from_polar(mag, self.phase - self.detuning * t / HBAR_UEV_PS)
    }

    pub fn active_window(&self) -> (f64, f64) {
        let h = ACTIVE_HALF_WIDTH_FWHM * self.fwhm;
        (self.t0 - h, self.t0 + h)
    }

    pub fn is_active(&self, t: f64) -> bool {
        let (a, b) = self.active_window();
        t >= a && t <= b
    }
}

/// Non-fatal schedule findings.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleWarning {
    /// Two emitter pulses overlap; their areas no longer simply add.
    EmitterOverlap { first: usize, second: usize, separation: f64 },
}

impl fmt::Display for ScheduleWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleWarning::EmitterOverlap { first, second, separation } => write!(
                f,
                "emitter pulses {} and {} are only {separation} ps apart; pulse areas do not add",
                first + 1,
                second + 1
            ),
        }
    }
}

/// Checks pulse validity and ordering; returns overlap warnings.
pub fn validate_schedule(pulses: &[GaussianPulse]) -> Result<Vec<ScheduleWarning>> {
    for (k, p) in pulses.iter().enumerate() {
        p.validate().map_err(|e| match e {
            Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                field: format!("pulse.{}.{}", k + 1, field),
                reason,
            },
            other => other,
        })?;
    }
    for (k, w) in pulses.windows(2).enumerate() {
        if w[1].t0 < w[0].t0 {
            return Err(Error::InvalidSchedule(format!(
                "pulses must be sorted by t0: pulse {} at {} ps precedes pulse {} at {} ps",
                k + 1,
                w[0].t0,
                k + 2,
                w[1].t0
            )));
        }
    }
    let mut warnings = Vec::new();
    let emitter: Vec<(usize, &GaussianPulse)> = pulses
        .iter()
        .enumerate()
        .filter(|(_, p)| p.target == PulseTarget::EmitterG1)
        .collect();
    for w in emitter.windows(2) {
        let (i, a) = w[0];
        let (j, b) = w[1];
        let sep = b.t0 - a.t0;
        if sep < OVERLAP_WARNING_FWHM * a.fwhm.max(b.fwhm) {
            warnings.push(ScheduleWarning::EmitterOverlap { first: i, second: j, separation: sep });
        }
    }
    Ok(warnings)
}

/// Time-ordered pulse list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSchedule {
    pulses: Vec<GaussianPulse>,
}

impl PulseSchedule {
    pub fn new(pulses: Vec<GaussianPulse>) -> Result<Self> {
        validate_schedule(&pulses)?;
        Ok(Self { pulses })
    }

    /// Sorts by `t0` before validating.
    pub fn from_unsorted(mut pulses: Vec<GaussianPulse>) -> Result<Self> {
        pulses.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        Self::new(pulses)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn pulses(&self) -> &[GaussianPulse] {
        &self.pulses
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn warnings(&self) -> Vec<ScheduleWarning> {
        validate_schedule(&self.pulses).unwrap_or_default()
    }

    /// Inserts a pulse keeping the schedule sorted.
    pub fn with_pulse(&self, pulse: GaussianPulse) -> Result<Self> {
        let mut pulses = self.pulses.clone();
        pulses.push(pulse);
        Self::from_unsorted(pulses)
    }

    pub fn concat(&self, other: &PulseSchedule) -> Result<Self> {
        let mut pulses = self.pulses.clone();
        pulses.extend_from_slice(&other.pulses);
        Self::from_unsorted(pulses)
    }

    /// Summed envelopes `(ε_cavity, ε_emitter)` of the pulses active at `t`.
    pub fn drive_amplitudes(&self, t: f64) -> (C64, C64) {
        let mut cav = C64::new(0.0, 0.0);
        let mut emi = C64::new(0.0, 0.0);
        for p in self.pulses.iter().filter(|p| p.is_active(t)) {
            match p.target {
                PulseTarget::Cavity => cav += p.envelope(t),
                PulseTarget::EmitterG1 => emi += p.envelope(t),
            }
        }
        (cav, emi)
    }

    pub fn any_active(&self, t: f64) -> bool {
        self.pulses.iter().any(|p| p.is_active(t))
    }

    pub fn min_fwhm(&self) -> Option<f64> {
        self.pulses.iter().map(|p| p.fwhm).reduce(f64::min)
    }
}

/// `H_in(t) = ε_p* a + ε_c* σ_g1 + H.c.` in rad/ps.
pub fn drive_hamiltonian(schedule: &PulseSchedule, t: f64, dims: HilbertDims) -> Operator {
    let (eps_p, eps_c) = schedule.drive_amplitudes(t);
    let a = cavity_annihilation(dims);
    let s_g1 = emitter_embedded(Level::G, Level::One, dims);
    let half = a
        .scale_complex(eps_p.conj())
        .add(&s_g1.scale_complex(eps_c.conj()))
        .expect("same space");
    half.add(&half.dag()).expect("same space")
}
