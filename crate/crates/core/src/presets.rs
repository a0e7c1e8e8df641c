//! Ready-made experiments: probe, switch-on, and the switch-off variants.
//!
//! The second (and third) control pulse is placed on an extremum of the
//! photon population found in a preliminary run without it, since cavity
//! and emitter losses shift the extrema away from the lossless timing.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::config::{ExperimentConfig, SpectrumWindow};
use crate::error::{Error, Result};
use crate::evolution::EvolutionResult;
use crate::observables::{find_extrema, photon_series, Extremum, ExtremumKind};
use crate::pulses::{GaussianPulse, PulseSchedule, PulseTarget, ACTIVE_HALF_WIDTH_FWHM};

pub const PROBE_T0_PS: f64 = 2.0;
pub const PROBE_FWHM_PS: f64 = 0.4;
/// Peak `<a†a>` ≈ (area/2)² = 0.01.
pub const PROBE_AREA: f64 = 0.2;
pub const CONTROL_T0_PS: f64 = 25.0;
pub const CONTROL_FWHM_PS: f64 = 0.2;
pub const DEFAULT_LEAD_PS: f64 = 5.0;
pub const DEFAULT_DEPHASING_UEV: f64 = 5.0;

/// Spectrum windows attached to every preset: one before the switch-on
/// pulse and a long one after it, long enough to resolve the doublet.
pub const PRE_SWITCH_WINDOW: SpectrumWindow = SpectrumWindow { start: 3.0, width: 15.0 };
pub const POST_SWITCH_WINDOW: SpectrumWindow = SpectrumWindow { start: 27.0, width: 90.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Probe, then switch-on at 25 ps.
    Fig1c,
    /// Switch-off at the first population maximum.
    Fig2a,
    /// Switch-off attempt at the first population minimum.
    Fig2b,
    /// As `Fig2b`, plus a third pulse at the following minimum.
    Fig2c,
    /// Switch-off halfway between the first minimum and maximum.
    Fig2d,
    /// `Fig2b` with pure dephasing on both emitter levels.
    Fig3,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1c,
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig2c,
        Preset::Fig2d,
        Preset::Fig3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1c => "fig1c",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Fig2d => "fig2d",
            Preset::Fig3 => "fig3",
        }
    }

    /// Configuration of the first pass (probe and switch-on pulse only).
    pub fn base_config(self, opts: &PresetOptions) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::reference();
        cfg.schedule = PulseSchedule::new(vec![
            GaussianPulse::new(PulseTarget::Cavity, PROBE_T0_PS, PROBE_FWHM_PS, PROBE_AREA),
            control_pulse(CONTROL_T0_PS),
        ])
        .expect("static schedule is valid");
        cfg.outputs.spectra = vec![PRE_SWITCH_WINDOW, POST_SWITCH_WINDOW];
        if self == Preset::Fig3 {
            cfg.params.gamma_d1 = opts.dephasing_uev;
            cfg.params.gamma_d2 = opts.dephasing_uev;
        }
        cfg
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset {
                name: s.to_string(),
                valid: Preset::ALL.map(Preset::name).join(", "),
            })
    }
}

/// Knobs that are not part of the experiment config itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetOptions {
    /// Extrema are searched only after switch-on time + lead.
    pub lead_ps: f64,
    /// Pure dephasing applied to both emitter levels in `fig3`, μeV.
    pub dephasing_uev: f64,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            lead_ps: DEFAULT_LEAD_PS,
            dephasing_uev: DEFAULT_DEPHASING_UEV,
        }
    }
}

impl PresetOptions {
    /// Handles `preset.lead_ps` and `preset.dephasing_ueV`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parsed: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::param(key, format!("cannot parse `{value}`")))?;
        if !parsed.is_finite() || parsed < 0.0 {
            return Err(Error::param(key, format!("must be finite and >= 0, got {parsed}")));
        }
        match key {
            "preset.lead_ps" => self.lead_ps = parsed,
            "preset.dephasing_ueV" => self.dephasing_uev = parsed,
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }
}

/// Where an extra control pulse went, and why.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub time: f64,
    pub target: PlacementTarget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlacementTarget {
    Maximum,
    Minimum,
    Midpoint,
}

#[derive(Clone, Debug)]
pub struct PresetRun {
    pub preset: Preset,
    /// Final configuration including every placed pulse.
    pub config: ExperimentConfig,
    pub result: EvolutionResult,
    pub placements: Vec<Placement>,
}

pub fn control_pulse(t0: f64) -> GaussianPulse {
    GaussianPulse::new(PulseTarget::EmitterG1, t0, CONTROL_FWHM_PS, PI)
}

/// Runs a preset from its default configuration.
pub fn run_preset(preset: Preset, opts: &PresetOptions) -> Result<PresetRun> {
    run_preset_with(preset, preset.base_config(opts), opts)
}

/// Runs a preset starting from a caller-supplied first-pass configuration
/// (e.g. the defaults with overrides applied).
pub fn run_preset_with(preset: Preset, base: ExperimentConfig, opts: &PresetOptions) -> Result<PresetRun> {
    base.validate()?;
    let first = base.run()?;
    let switch_on = last_pulse_time(&base);
    let after = switch_on + opts.lead_ps;

    let target = match preset {
        Preset::Fig1c => {
            return Ok(PresetRun {
                preset,
                config: base,
                result: first,
                placements: Vec::new(),
            })
        }
        Preset::Fig2a => PlacementTarget::Maximum,
        Preset::Fig2b | Preset::Fig2c | Preset::Fig3 => PlacementTarget::Minimum,
        Preset::Fig2d => PlacementTarget::Midpoint,
    };

    let t2 = locate(&first, after, target)?;
    let second = with_control(&base, t2)?;
    let mut placements = vec![Placement { time: t2, target }];
    let mut result = second.run()?;
    let mut config = second;

    if preset == Preset::Fig2c {
        let after = t2 + ACTIVE_HALF_WIDTH_FWHM * CONTROL_FWHM_PS;
        let t3 = locate(&result, after, PlacementTarget::Minimum)?;
        config = with_control(&config, t3)?;
        result = config.run()?;
        placements.push(Placement {
            time: t3,
            target: PlacementTarget::Minimum,
        });
    }

    Ok(PresetRun {
        preset,
        config,
        result,
        placements,
    })
}

/// Time of the first photon-population extremum of the requested kind after
/// `after_t`; for `Midpoint`, halfway between the first minimum and the first
/// maximum.
pub fn locate(result: &EvolutionResult, after_t: f64, target: PlacementTarget) -> Result<f64> {
    let extrema = find_extrema(&photon_series(result), after_t)?;
    let first = |kind: ExtremumKind| -> Result<Extremum> {
        extrema.iter().copied().find(|e| e.kind == kind).ok_or_else(|| {
            Error::Analysis(format!(
                "no photon-population {kind:?} after t = {after_t} ps; extend time.end_ps"
            ))
        })
    };
    Ok(match target {
        PlacementTarget::Maximum => first(ExtremumKind::Max)?.time,
        PlacementTarget::Minimum => first(ExtremumKind::Min)?.time,
        PlacementTarget::Midpoint => {
            0.5 * (first(ExtremumKind::Max)?.time + first(ExtremumKind::Min)?.time)
        }
    })
}

fn last_pulse_time(cfg: &ExperimentConfig) -> f64 {
    cfg.schedule
        .pulses()
        .iter()
        .filter(|p| p.target == PulseTarget::EmitterG1)
        .map(|p| p.t0)
        .fold(cfg.time.start, f64::max)
}

fn with_control(cfg: &ExperimentConfig, t0: f64) -> Result<ExperimentConfig> {
    let mut next = cfg.clone();
    next.schedule = cfg.schedule.with_pulse(control_pulse(t0))?;
    next.validate()?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }

    #[test]
    fn unknown_preset_lists_valid_names() {
        let err = "fig9".parse::<Preset>().unwrap_err();
        let msg = err.to_string();
        for p in Preset::ALL {
            assert!(msg.contains(p.name()), "{msg}");
        }
    }

    #[test]
    fn base_schedules() {
        let opts = PresetOptions::default();
        let cfg = Preset::Fig1c.base_config(&opts);
        let pulses = cfg.schedule.pulses();
        assert_eq!(pulses.len(), 2);
        assert_eq!(pulses[0].target, PulseTarget::Cavity);
        assert_eq!(pulses[0].fwhm, 0.4);
        assert_eq!(pulses[1].t0, 25.0);
        assert_eq!(pulses[1].area, PI);
        assert_eq!(cfg.params.gamma_d1, 0.0);
        let fig3 = Preset::Fig3.base_config(&opts);
        assert_eq!(fig3.params.gamma_d1, 5.0);
        assert_eq!(fig3.params.gamma_d2, 5.0);
        // the preset configs survive the text format
        assert_eq!(crate::config::parse_config(&fig3.to_text()).unwrap(), fig3);
    }

    #[test]
    fn options_parse() {
        let mut o = PresetOptions::default();
        o.set("preset.lead_ps", "3").unwrap();
        o.set("preset.dephasing_ueV", "2.5").unwrap();
        assert_eq!(o.lead_ps, 3.0);
        assert_eq!(o.dephasing_uev, 2.5);
        assert!(o.set("preset.lead_ps", "-1").is_err());
        assert!(o.set("preset.other", "1").is_err());
    }
}
