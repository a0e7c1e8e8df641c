//! Lindblad simulation of a single-mode cavity coupled to a cascade
//! three-level emitter `|g>, |1>, |2>`, driven by a weak cavity probe and
//! π control pulses on the `g–1` transition.
//!
//! A control pulse moves the emitter population between `|g>` and `|1>`.
//! With the emitter in `|1>` the cavity is resonant with the `1–2`
//! transition and photons undergo vacuum Rabi oscillations; with the emitter
//! in `|g>` the cavity field simply decays. The crate covers the operator
//! algebra ([`hilbert`]), the model ([`model`], [`pulses`]), time evolution
//! ([`evolution`], [`ode`]), analysis ([`observables`]), a closed-form
//! single-excitation reference ([`oracle`]) and the experiment layer
//! ([`config`], [`presets`], [`sweep`], [`output`]).
//!
//! Units throughout: energies in μeV (transition energies in eV), times in ps.
//!
//! ```no_run
//! use rabi_switch::presets::{run_preset, Preset, PresetOptions};
//!
//! let run = run_preset(Preset::Fig2a, &PresetOptions::default()).unwrap();
//! println!("second pulse at {:.2} ps", run.placements[0].time);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod evolution;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod output;
pub mod ode;
pub mod presets;
pub mod pulses;
pub mod sweep;

pub use error::{Error, Result};
