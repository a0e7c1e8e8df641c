//! CSV emission. Floats are written in shortest round-trip form.

use std::fs;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::evolution::EvolutionResult;
use crate::observables::SpectrumResult;
use crate::sweep::SweepTable;

pub const OBSERVABLE_HEADER: [&str; 10] = [
    "t_ps", "n_photon", "coh_re", "coh_im", "coh_sq", "pop_g", "pop_1", "pop_2", "purity", "trace_err",
];

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per sample with the columns of [`OBSERVABLE_HEADER`].
pub fn write_csv(result: &EvolutionResult, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(OBSERVABLE_HEADER).map_err(&err)?;
    let o = &result.observables;
    for (i, &t) in result.times.iter().enumerate() {
        let c = o.coherent[i];
        let row = [
            t,
            o.n_photon[i],
            c.re,
            c.im,
            c.norm_sqr(),
            o.pop_g[i],
            o.pop_1[i],
            o.pop_2[i],
            o.purity[i],
            o.trace_err[i],
        ];
        w.write_record(row.map(num)).map_err(&err)?;
    }
    finish(w, path)
}

/// Long format `start_ps,width_ps,omega_ueV,S`, one block per spectrum.
pub fn write_spectra_csv(spectra: &[SpectrumResult], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(["start_ps", "width_ps", "omega_ueV", "S"]).map_err(&err)?;
    for s in spectra {
        for (&om, &v) in s.omegas.iter().zip(&s.values) {
            w.write_record([num(s.start), num(s.width), num(om), num(v)]).map_err(&err)?;
        }
    }
    finish(w, path)
}

/// Long format `T_ps,omega_ueV,S` for external plotting.
pub fn write_spectrogram_csv(spectra: &[SpectrumResult], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(["T_ps", "omega_ueV", "S"]).map_err(&err)?;
    for s in spectra {
        for (&om, &v) in s.omegas.iter().zip(&s.values) {
            w.write_record([num(s.start), num(om), num(v)]).map_err(&err)?;
        }
    }
    finish(w, path)
}

/// Header `<field>,<reduction>`, rows in grid order.
pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record([table.field.as_str(), table.reduction.name()]).map_err(&err)?;
    for row in &table.rows {
        w.write_record([num(row.value), num(row.reduced)]).map_err(&err)?;
    }
    finish(w, path)
}

/// The effective configuration, so a run can be reproduced from its outputs.
pub fn write_config(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    fs::write(path, cfg.to_text()).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
