//! Experiment configuration: a flat `key = value` text format.
//!
//! ```text
//! # physics
//! params.g_ueV = 100
//! params.gamma_a_ueV = 20
//! pulse.0.target = cavity
//! pulse.0.t0_ps = 2
//! pulse.0.fwhm_ps = 0.4
//! pulse.0.area = 0.2
//! ```
//!
//! Parsing is strict: unknown or duplicated keys are errors, and `g`,
//! `gamma_a` and every pulse area must be given explicitly. Everything else
//! falls back to the reference defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionResult, IntegratorConfig, TimeSpan};
use crate::hilbert::{DensityMatrix, HilbertDims, Level};
use crate::model::{FrameSpec, SystemModel, SystemParams};
use crate::observables::{coherent_series, omega_grid, windowed_spectrum, SpectrumResult};
use crate::pulses::{GaussianPulse, PulseSchedule, PulseTarget};

pub const DEFAULT_N_MAX: usize = 4;
pub const DEFAULT_T_START_PS: f64 = 0.0;
pub const DEFAULT_T_END_PS: f64 = 130.0;
pub const DEFAULT_SPECTRUM_WIDTH_PS: f64 = 15.0;
pub const DEFAULT_OMEGA_HALF_WIDTH_UEV: f64 = 400.0;
pub const DEFAULT_OMEGA_STEP_UEV: f64 = 1.0;

/// One `S(T, ω)` evaluation window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumWindow {
    pub start: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    /// Write the observable time series.
    pub observables: bool,
    pub spectra: Vec<SpectrumWindow>,
    pub omega_half_width: f64,
    pub omega_step: f64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            observables: true,
            spectra: Vec::new(),
            omega_half_width: DEFAULT_OMEGA_HALF_WIDTH_UEV,
            omega_step: DEFAULT_OMEGA_STEP_UEV,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    pub frame: FrameSpec,
    pub schedule: PulseSchedule,
    pub integrator: IntegratorConfig,
    pub n_max: usize,
    pub time: TimeSpan,
    pub outputs: OutputSpec,
}

impl ExperimentConfig {
    /// Reference parameters, resonant frame, no pulses.
    pub fn reference() -> Self {
        let params = SystemParams::reference();
        Self {
            params,
            frame: FrameSpec::resonant(&params),
            schedule: PulseSchedule::empty(),
            integrator: IntegratorConfig::default(),
            n_max: DEFAULT_N_MAX,
            time: TimeSpan {
                start: DEFAULT_T_START_PS,
                end: DEFAULT_T_END_PS,
            },
            outputs: OutputSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(rename_param_field)?;
        self.frame.validate()?;
        HilbertDims::new(self.n_max)?;
        for (k, p) in self.schedule.pulses().iter().enumerate() {
            p.validate().map_err(|e| prefix_field(e, &format!("pulse.{k}.")))?;
        }
        self.integrator.validate()?;
        TimeSpan::new(self.time.start, self.time.end).map_err(|_| {
            Error::param(
                "time.end_ps",
                format!("must exceed time.start_ps = {}", self.time.start),
            )
        })?;
        let out = &self.outputs;
        if !(out.omega_half_width > 0.0) || !(out.omega_step > 0.0) {
            return Err(Error::param(
                "output.omega_step_ueV",
                "frequency grid half-width and step must be > 0",
            ));
        }
        for (k, w) in out.spectra.iter().enumerate() {
            if !w.start.is_finite() || !(w.width > 0.0) || !w.width.is_finite() {
                return Err(Error::param(
                    format!("output.spectrum.{k}.width_ps"),
                    format!("need finite start and width > 0, got {} / {}", w.start, w.width),
                ));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Result<HilbertDims> {
        HilbertDims::new(self.n_max)
    }

    pub fn model(&self) -> Result<SystemModel> {
        SystemModel::new(self.params, self.frame, self.dims()?)
    }

    /// Empty cavity, emitter in the ground state.
    pub fn initial_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::basis(self.dims()?, 0, Level::G)
    }

    pub fn run(&self) -> Result<EvolutionResult> {
        self.validate()?;
        evolve(
            &self.model()?,
            &self.schedule,
            &self.initial_state()?,
            self.time,
            &self.integrator,
        )
    }

    /// Frequency offsets shared by every spectrum of this experiment, μeV.
    pub fn omega_grid(&self) -> Vec<f64> {
        omega_grid(self.outputs.omega_half_width, self.outputs.omega_step)
    }

    /// The configured spectrum windows evaluated on a finished run.
    pub fn spectra(&self, result: &EvolutionResult) -> Result<Vec<SpectrumResult>> {
        let coh = coherent_series(result);
        let omegas = self.omega_grid();
        self.outputs
            .spectra
            .iter()
            .map(|w| windowed_spectrum(&coh, w.start, w.width, &omegas))
            .collect()
    }

    pub fn to_text(&self) -> String {
        serialize_config(self)
    }

    /// Current value of a key in serialized form.
    pub fn get(&self, key: &str) -> Option<String> {
        entries_of(self).into_iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Replaces (or adds) one key and re-validates the whole config.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_many(&[(key, value)])
    }

    /// Applies several assignments at once, so that e.g. a new pulse can be
    /// added with all its required keys.
    pub fn set_many<K: AsRef<str>, V: AsRef<str>>(&mut self, assignments: &[(K, V)]) -> Result<()> {
        let mut map: BTreeMap<String, String> = entries_of(self).into_iter().collect();
        for (k, v) in assignments {
            let (k, v) = (k.as_ref().trim(), v.as_ref().trim());
            if !is_valid_key(k) {
                return Err(Error::UnknownKey(k.to_string()));
            }
            map.insert(k.to_string(), v.to_string());
        }
        let text: String = map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        *self = parse_config(&text)?;
        Ok(())
    }
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut table = Table::parse(text)?;
    let cfg = build(&mut table)?;
    table.finish()?;
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical text form; `parse_config(serialize_config(c)) == c`.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut section = String::new();
    for (k, v) in entries_of(cfg) {
        let head = k.split('.').next().unwrap_or("");
        if head != section && !out.is_empty() {
            out.push('\n');
        }
        section = head.to_string();
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

fn num(v: f64) -> String {
    // Debug prints the shortest string that parses back to the same f64
    format!("{v:?}")
}

fn entries_of(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let p = &cfg.params;
    let i = &cfg.integrator;
    let mut e: Vec<(String, String)> = vec![
        ("n_max".into(), cfg.n_max.to_string()),
        ("params.g_ueV".into(), num(p.g)),
        ("params.gamma_a_ueV".into(), num(p.gamma_a)),
        ("params.gamma_1_ueV".into(), num(p.gamma_1)),
        ("params.gamma_2_ueV".into(), num(p.gamma_2)),
        ("params.gamma_d1_ueV".into(), num(p.gamma_d1)),
        ("params.gamma_d2_ueV".into(), num(p.gamma_d2)),
        ("params.omega_1_eV".into(), num(p.omega_1)),
        ("params.omega_2_eV".into(), num(p.omega_2)),
        ("params.omega_cav_eV".into(), num(p.omega_cav)),
        ("frame.control_carrier_eV".into(), num(cfg.frame.control_carrier)),
        ("frame.probe_carrier_eV".into(), num(cfg.frame.probe_carrier)),
    ];
    for (k, pulse) in cfg.schedule.pulses().iter().enumerate() {
        e.push((format!("pulse.{k}.target"), pulse.target.to_string()));
        e.push((format!("pulse.{k}.t0_ps"), num(pulse.t0)));
        e.push((format!("pulse.{k}.fwhm_ps"), num(pulse.fwhm)));
        e.push((format!("pulse.{k}.area"), num(pulse.area)));
        e.push((format!("pulse.{k}.detuning_ueV"), num(pulse.detuning)));
        e.push((format!("pulse.{k}.phase"), num(pulse.phase)));
    }
    e.extend([
        ("integrator.rel_tol".into(), num(i.rel_tol)),
        ("integrator.abs_tol".into(), num(i.abs_tol)),
        ("integrator.dt_initial_ps".into(), num(i.dt_initial)),
        ("integrator.dt_max_ps".into(), num(i.dt_max)),
        ("integrator.dt_min_ps".into(), num(i.dt_min)),
        ("integrator.sample_dt_ps".into(), num(i.sample_dt)),
        ("integrator.store_states".into(), i.store_states.to_string()),
        ("integrator.check_positivity".into(), i.check_positivity.to_string()),
        ("time.start_ps".into(), num(cfg.time.start)),
        ("time.end_ps".into(), num(cfg.time.end)),
        ("output.observables".into(), cfg.outputs.observables.to_string()),
        ("output.omega_half_width_ueV".into(), num(cfg.outputs.omega_half_width)),
        ("output.omega_step_ueV".into(), num(cfg.outputs.omega_step)),
    ]);
    for (k, w) in cfg.outputs.spectra.iter().enumerate() {
        e.push((format!("output.spectrum.{k}.start_ps"), num(w.start)));
        e.push((format!("output.spectrum.{k}.width_ps"), num(w.width)));
    }
    e
}

fn is_valid_key(key: &str) -> bool {
    !key.is_empty()
        && key.split('.').all(|part| !part.is_empty())
        && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// Raw `key -> (value, line)` entries awaiting consumption.
struct Table {
    entries: BTreeMap<String, (String, usize)>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigSyntax {
                line,
                reason: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !is_valid_key(key) {
                return Err(Error::ConfigSyntax {
                    line,
                    reason: format!("malformed key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(Error::ConfigSyntax {
                    line,
                    reason: format!("missing value for `{key}`"),
                });
            }
            if let Some((_, first)) = entries.insert(key.to_string(), (value.to_string(), line)) {
                return Err(Error::ConfigSyntax {
                    line,
                    reason: format!("duplicate key `{key}` (first set on line {first})"),
                });
            }
        }
        Ok(Self { entries })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((value, line)) => value.parse().map(Some).map_err(|_| {
                Error::param(key, format!("line {line}: cannot parse `{value}`"))
            }),
        }
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?.ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    /// Sorted distinct indices `N` of keys shaped `prefix.N.*`; they must
    /// run contiguously from 0.
    fn indices(&self, prefix: &str) -> Result<Vec<usize>> {
        let mut found = std::collections::BTreeSet::new();
        for (key, (_, line)) in &self.entries {
            let Some(rest) = key.strip_prefix(prefix).and_then(|r| r.strip_prefix('.')) else {
                continue;
            };
            let idx = rest.split('.').next().unwrap_or("");
            let n: usize = idx.parse().map_err(|_| Error::ConfigSyntax {
                line: *line,
                reason: format!("`{key}`: expected a numeric index after `{prefix}.`"),
            })?;
            found.insert(n);
        }
        let out: Vec<usize> = found.into_iter().collect();
        if let Some(pos) = out.iter().enumerate().position(|(pos, &n)| pos != n) {
            return Err(Error::MissingKey(format!("{prefix}.{pos}.*")));
        }
        Ok(out)
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, _)) => Err(Error::UnknownKey(key)),
        }
    }
}

fn build(t: &mut Table) -> Result<ExperimentConfig> {
    let n_max = t.or("n_max", DEFAULT_N_MAX)?;

    let omega_1 = t.or("params.omega_1_eV", SystemParams::OMEGA_1_EV)?;
    let omega_2 = t.or("params.omega_2_eV", 2.0 * omega_1 + SystemParams::BINDING_EV)?;
    let omega_cav = t.or("params.omega_cav_eV", omega_2 - omega_1)?;
    let reference = SystemParams::reference();
    let params = SystemParams {
        g: t.require("params.g_ueV")?,
        gamma_a: t.require("params.gamma_a_ueV")?,
        gamma_1: t.or("params.gamma_1_ueV", reference.gamma_1)?,
        gamma_2: t.or("params.gamma_2_ueV", reference.gamma_2)?,
        gamma_d1: t.or("params.gamma_d1_ueV", reference.gamma_d1)?,
        gamma_d2: t.or("params.gamma_d2_ueV", reference.gamma_d2)?,
        omega_1,
        omega_2,
        omega_cav,
    };
    let resonant = FrameSpec::resonant(&params);
    let frame = FrameSpec {
        control_carrier: t.or("frame.control_carrier_eV", resonant.control_carrier)?,
        probe_carrier: t.or("frame.probe_carrier_eV", resonant.probe_carrier)?,
    };

    let mut pulses = Vec::new();
    for k in t.indices("pulse")? {
        let key = |name: &str| format!("pulse.{k}.{name}");
        let target: String = t.require(&key("target"))?;
        let target: PulseTarget = target
            .parse()
            .map_err(|e| prefix_field(e, &format!("pulse.{k}.")))?;
        let pulse = GaussianPulse {
            target,
            t0: t.require(&key("t0_ps"))?,
            fwhm: t.require(&key("fwhm_ps"))?,
            area: t.require(&key("area"))?,
            detuning: t.or(&key("detuning_ueV"), 0.0)?,
            phase: t.or(&key("phase"), 0.0)?,
        };
        pulse
            .validate()
            .map_err(|e| prefix_field(e, &format!("pulse.{k}.")))?;
        pulses.push(pulse);
    }
    let schedule = PulseSchedule::from_unsorted(pulses)?;

    let d = IntegratorConfig::default();
    let integrator = IntegratorConfig {
        rel_tol: t.or("integrator.rel_tol", d.rel_tol)?,
        abs_tol: t.or("integrator.abs_tol", d.abs_tol)?,
        dt_initial: t.or("integrator.dt_initial_ps", d.dt_initial)?,
        dt_max: t.or("integrator.dt_max_ps", d.dt_max)?,
        dt_min: t.or("integrator.dt_min_ps", d.dt_min)?,
        sample_dt: t.or("integrator.sample_dt_ps", d.sample_dt)?,
        store_states: t.or("integrator.store_states", d.store_states)?,
        check_positivity: t.or("integrator.check_positivity", d.check_positivity)?,
    };
    let time = TimeSpan {
        start: t.or("time.start_ps", DEFAULT_T_START_PS)?,
        end: t.or("time.end_ps", DEFAULT_T_END_PS)?,
    };

    let mut spectra = Vec::new();
    for k in t.indices("output.spectrum")? {
        spectra.push(SpectrumWindow {
            start: t.require(&format!("output.spectrum.{k}.start_ps"))?,
            width: t.or(&format!("output.spectrum.{k}.width_ps"), DEFAULT_SPECTRUM_WIDTH_PS)?,
        });
    }
    let outputs = OutputSpec {
        observables: t.or("output.observables", true)?,
        spectra,
        omega_half_width: t.or("output.omega_half_width_ueV", DEFAULT_OMEGA_HALF_WIDTH_UEV)?,
        omega_step: t.or("output.omega_step_ueV", DEFAULT_OMEGA_STEP_UEV)?,
    };

    Ok(ExperimentConfig {
        params,
        frame,
        schedule,
        integrator,
        n_max,
        time,
        outputs,
    })
}

fn prefix_field(err: Error, prefix: &str) -> Error {
    match err {
        Error::InvalidParameter { field, reason } => Error::InvalidParameter {
            field: format!("{prefix}{field}"),
            reason,
        },
        other => other,
    }
}

fn rename_param_field(err: Error) -> Error {
    match err {
        Error::InvalidParameter { field, reason } => {
            let unit = if field.starts_with("omega") { "eV" } else { "ueV" };
            Error::InvalidParameter {
                field: format!("params.{field}_{unit}"),
                reason,
            }
        }
        other => other,
    }
}
