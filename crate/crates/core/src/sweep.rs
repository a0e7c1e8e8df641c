//! One-dimensional parameter sweeps over any numeric config key.
//!
//! Every grid point is an independent run, so the points are evaluated on
//! the rayon pool when the `parallel` feature is enabled. Output order is
//! always the grid order.

use std::fmt;
use std::str::FromStr;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::evolution::EvolutionResult;
use crate::observables::{coherent_fraction, fit_exponential, oscillation_contrast, photon_series};

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "RABI_SWITCH_THREADS";

/// The reduction window opens this long after the latest pulse...
pub const REDUCTION_DELAY_PS: f64 = 2.0;
/// ...and lasts this long (clipped to the end of the run).
pub const REDUCTION_SPAN_PS: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    /// Coherent fraction at the end of the reduction window.
    FinalCoherentFraction,
    /// Detrended peak-to-trough contrast of `<a†a>` over the window.
    OscillationContrast,
    /// Exponential decay rate of `<a†a>` over the window, 1/ps.
    DecayFitRate,
}

impl Reduction {
    pub const ALL: [Reduction; 3] = [
        Reduction::FinalCoherentFraction,
        Reduction::OscillationContrast,
        Reduction::DecayFitRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reduction::FinalCoherentFraction => "final_coherent_fraction",
            Reduction::OscillationContrast => "oscillation_contrast",
            Reduction::DecayFitRate => "decay_fit_rate",
        }
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Reduction::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| {
            Error::param(
                "reduce",
                format!(
                    "unknown reduction `{s}` (expected one of {})",
                    Reduction::ALL.map(Reduction::name).join(", ")
                ),
            )
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Config key to vary, e.g. `pulse.2.t0_ps`.
    pub field: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub reduction: Reduction,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::param("steps", format!("must be >= 2, got {}", self.steps)));
        }
        if !self.from.is_finite() || !self.to.is_finite() || !(self.from < self.to) {
            return Err(Error::param(
                "from",
                format!("need finite from < to, got {} / {}", self.from, self.to),
            ));
        }
        Ok(())
    }

    /// Evenly spaced grid including both ends.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub reduced: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub field: String,
    pub reduction: Reduction,
    pub rows: Vec<SweepRow>,
}

/// How grid points are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon pool; identical to `Sequential` without the `parallel` feature.
    #[default]
    Parallel,
}

pub fn run_sweep(cfg: &ExperimentConfig, spec: &SweepSpec) -> Result<SweepTable> {
    run_sweep_with(cfg, spec, Execution::default())
}

pub fn run_sweep_with(cfg: &ExperimentConfig, spec: &SweepSpec, execution: Execution) -> Result<SweepTable> {
    spec.validate()?;
    if cfg.get(&spec.field).is_none() {
        return Err(Error::UnknownKey(spec.field.clone()));
    }
    let values = spec.values();
    // build every config up front so validation errors surface before compute
    let configs = values
        .iter()
        .map(|v| {
            let mut c = cfg.clone();
            c.integrator.store_states = false;
            c.set(&spec.field, &format!("{v:?}"))?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;

    let eval = |c: &ExperimentConfig| -> Result<f64> {
        let result = c.run()?;
        reduce(c, &result, spec.reduction)
    };
    let reduced = match execution {
        Execution::Sequential => configs.iter().map(eval).collect::<Result<Vec<_>>>()?,
        Execution::Parallel => parallel_map(&configs, eval)?,
    };
    Ok(SweepTable {
        field: spec.field.clone(),
        reduction: spec.reduction,
        rows: values
            .into_iter()
            .zip(reduced)
            .map(|(value, reduced)| SweepRow { value, reduced })
            .collect(),
    })
}

/// Reduction window `[t_last + 2, t_last + 42]` ps, clipped to the run.
pub fn reduction_window(cfg: &ExperimentConfig) -> (f64, f64) {
    let last = cfg
        .schedule
        .pulses()
        .iter()
        .map(|p| p.t0)
        .fold(cfg.time.start, f64::max);
    let start = (last + REDUCTION_DELAY_PS).min(cfg.time.end);
    let end = (start + REDUCTION_SPAN_PS).min(cfg.time.end);
    (start, end)
}

pub fn reduce(cfg: &ExperimentConfig, result: &EvolutionResult, reduction: Reduction) -> Result<f64> {
    let (start, end) = reduction_window(cfg);
    if !(end > start) {
        return Err(Error::Analysis(format!(
            "no room for the reduction window after the last pulse (run ends at {} ps)",
            cfg.time.end
        )));
    }
    match reduction {
        Reduction::FinalCoherentFraction => coherent_fraction(result)
            .at(end)
            .ok_or_else(|| Error::Analysis(format!("no sample at t = {end} ps"))),
        Reduction::OscillationContrast => oscillation_contrast(&photon_series(result), start, end),
        Reduction::DecayFitRate => Ok(fit_exponential(&photon_series(result), start, end)?.rate),
    }
}

/// Thread cap from [`THREADS_ENV`]; `None` when unset or not a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(items: &[T], f: F) -> Result<Vec<f64>>
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    let work = || items.par_iter().map(&f).collect::<Result<Vec<_>>>();
    match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::param(THREADS_ENV, e.to_string()))?
            .install(work),
        None => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(items: &[T], f: F) -> Result<Vec<f64>>
where
    F: Fn(&T) -> Result<f64>,
{
    items.iter().map(f).collect()
}
