//! `rabi-switch`: run experiments, presets, sweeps and spectrograms from the
//! command line. Every verb writes CSV files plus the effective `config.txt`
//! into its output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rabi_switch::config::{parse_config, ExperimentConfig};
use rabi_switch::evolution::TimeSpan;
use rabi_switch::observables::{coherent_series, spectrogram};
use rabi_switch::output::{
    ensure_dir, write_config, write_csv, write_spectra_csv, write_spectrogram_csv, write_sweep_csv,
};
use rabi_switch::presets::{run_preset_with, Preset, PresetOptions};
use rabi_switch::sweep::{run_sweep, Reduction, SweepSpec};
use rabi_switch::{Error, Result};

#[derive(Parser)]
#[command(name = "rabi-switch", version, about = "Optical switching of vacuum Rabi oscillations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a built-in scenario (fig1c, fig2a, fig2b, fig2c, fig2d, fig3).
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// `key=value`; config keys, or `preset.lead_ps` / `preset.dephasing_ueV`.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Pure dephasing applied by fig3, μeV.
        #[arg(long)]
        dephasing: Option<f64>,
        /// Search for placement extrema starting this long after the first control pulse, ps.
        #[arg(long)]
        lead: Option<f64>,
    },
    /// Scan one numeric config key and reduce every run to a scalar.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// final_coherent_fraction, oscillation_contrast or decay_fit_rate.
        #[arg(long)]
        reduce: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sliding-window spectra of the cavity field with stride window/3.
    Spectrogram {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, allow_negative_numbers = true)]
        t1: f64,
        #[arg(long)]
        window: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn split_assignment(s: &str) -> Result<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::InvalidParameter {
            field: "--override".into(),
            reason: format!("expected key=value, got `{s}`"),
        })
}

fn write_run_outputs(
    cfg: &ExperimentConfig,
    result: &rabi_switch::evolution::EvolutionResult,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    if cfg.outputs.observables {
        write_csv(result, &out.join("observables.csv"))?;
    }
    write_spectra_csv(&cfg.spectra(result)?, &out.join("spectra.csv"))?;
    write_config(cfg, &out.join("config.txt"))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, out } => {
            let cfg = load(&config)?;
            let result = cfg.run()?;
            write_run_outputs(&cfg, &result, &out)?;
            println!("{} samples written to {}", result.len(), out.display());
        }
        Command::Preset {
            name,
            out,
            overrides,
            dephasing,
            lead,
        } => {
            let preset: Preset = name.parse()?;
            let mut opts = PresetOptions::default();
            if let Some(d) = dephasing {
                opts.dephasing_uev = d;
            }
            if let Some(l) = lead {
                opts.lead_ps = l;
            }
            let mut config_overrides = Vec::new();
            for s in &overrides {
                let (k, v) = split_assignment(s)?;
                if k.starts_with("preset.") {
                    opts.set(k, v)?;
                } else {
                    config_overrides.push((k, v));
                }
            }
            let mut base = preset.base_config(&opts);
            base.set_many(&config_overrides)?;
            let run = run_preset_with(preset, base, &opts)?;
            write_run_outputs(&run.config, &run.result, &out)?;
            for p in &run.placements {
                println!("placed control pulse at {:.3} ps ({:?})", p.time, p.target);
            }
            println!("{preset}: {} samples written to {}", run.result.len(), out.display());
        }
        Command::Sweep {
            config,
            field,
            from,
            to,
            steps,
            reduce,
            out,
        } => {
            let cfg = load(&config)?;
            let spec = SweepSpec {
                field,
                from,
                to,
                steps,
                reduction: reduce.parse::<Reduction>()?,
            };
            let table = run_sweep(&cfg, &spec)?;
            ensure_dir(&out)?;
            write_sweep_csv(&table, &out.join("sweep.csv"))?;
            write_config(&cfg, &out.join("config.txt"))?;
            println!("{} sweep points written to {}", table.rows.len(), out.display());
        }
        Command::Spectrogram {
            config,
            t0,
            t1,
            window,
            out,
        } => {
            let mut cfg = load(&config)?;
            // the last window must fit inside the run
            if cfg.time.end < t1 + window {
                cfg.time = TimeSpan::new(cfg.time.start, t1 + window)?;
            }
            cfg.integrator.store_states = false;
            let result = cfg.run()?;
            let spectra = spectrogram(&coherent_series(&result), t0, t1, window, &cfg.omega_grid())?;
            ensure_dir(&out)?;
            write_spectrogram_csv(&spectra, &out.join("spectrogram.csv"))?;
            write_config(&cfg, &out.join("config.txt"))?;
            println!("{} windows written to {}", spectra.len(), out.display());
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Integration { .. } => 2,
        Error::Io { .. } | Error::Csv { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // malformed arguments count as a validation error
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
