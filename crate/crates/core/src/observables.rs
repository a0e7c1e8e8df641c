//! Derived quantities: populations, coherent part of the cavity field,
//! windowed spectra, extremum location, exponential fits and negativity.

use crate::error::{Error, Result};
use crate::evolution::EvolutionResult;
use crate::hilbert::{
    cavity_annihilation, emitter_embedded, expectation, hermitian_eigenvalues, number_operator,
    CMatrix, DensityMatrix, Level, C64,
};
use crate::model::HBAR_UEV_PS;

/// Below this photon number the coherent fraction is reported as 0.
pub const COHERENT_FRACTION_FLOOR: f64 = 1e-12;

/// Extrema less prominent than this fraction of the series range are noise.
pub const EXTREMUM_PROMINENCE: f64 = 1e-4;

/// A sampled time series.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T = f64> {
    pub times: Vec<f64>,
    pub values: Vec<T>,
}

impl<T: Copy> Series<T> {
    pub fn new(times: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Analysis(format!(
                "series has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Analysis("series times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Samples with `t` in `[start, end]`.
    pub fn window(&self, start: f64, end: f64) -> Series<T> {
        let lo = self.times.partition_point(|&t| t < start);
        let hi = self.times.partition_point(|&t| t <= end);
        Series {
            times: self.times[lo..hi].to_vec(),
            values: self.values[lo..hi].to_vec(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Series<U> {
        Series {
            times: self.times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl Series<f64> {
    /// Linear interpolation; `None` outside the sampled range.
    pub fn at(&self, t: f64) -> Option<f64> {
        interpolate(&self.times, &self.values, t)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Series<C64> {
    pub fn at(&self, t: f64) -> Option<C64> {
        let re: Vec<f64> = self.values.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.values.iter().map(|z| z.im).collect();
        Some(C64::new(
            interpolate(&self.times, &re, t)?,
            interpolate(&self.times, &im, t)?,
        ))
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> Option<f64> {
    let (first, last) = (*times.first()?, *times.last()?);
    let eps = 1e-9 * (last - first).abs().max(1.0);
    if t < first - eps || t > last + eps {
        return None;
    }
    let i = times.partition_point(|&x| x < t);
    if i == 0 {
        return Some(values[0]);
    }
    if i >= times.len() {
        return Some(values[times.len() - 1]);
    }
    let (t0, t1) = (times[i - 1], times[i]);
    let w = (t - t0) / (t1 - t0);
    Some(values[i - 1] * (1.0 - w) + values[i] * w)
}

fn states(result: &EvolutionResult) -> Result<&[DensityMatrix]> {
    result.states.as_deref().ok_or(Error::MissingStates)
}

fn real_series_from_states(result: &EvolutionResult, op: &crate::hilbert::Operator) -> Result<Series> {
    let values = states(result)?
        .iter()
        .map(|rho| expectation(rho, op).map(|z| z.re))
        .collect::<Result<Vec<_>>>()?;
    Ok(Series {
        times: result.times.clone(),
        values,
    })
}

/// `<a†a>(t)` from the stored states.
pub fn photon_population(result: &EvolutionResult) -> Result<Series> {
    real_series_from_states(result, &number_operator(result.dims))
}

/// `<σ_ℓℓ>(t)` from the stored states.
pub fn emitter_population(result: &EvolutionResult, level: Level) -> Result<Series> {
    real_series_from_states(result, &emitter_embedded(level, level, result.dims))
}

/// `<a>(t)` from the stored states.
pub fn coherent_amplitude(result: &EvolutionResult) -> Result<Series<C64>> {
    let a = cavity_annihilation(result.dims);
    let values = states(result)?
        .iter()
        .map(|rho| expectation(rho, &a))
        .collect::<Result<Vec<_>>>()?;
    Ok(Series {
        times: result.times.clone(),
        values,
    })
}

/// `|<a>|² / <a†a>`, or 0 where the cavity is essentially empty.
pub fn coherent_fraction_value(n_photon: f64, coherent: C64) -> f64 {
    if n_photon < COHERENT_FRACTION_FLOOR {
        0.0
    } else {
        coherent.norm_sqr() / n_photon
    }
}

/// Coherent fraction along a run, from the per-sample observable table.
pub fn coherent_fraction(result: &EvolutionResult) -> Series {
    let obs = &result.observables;
    Series {
        times: result.times.clone(),
        values: obs
            .n_photon
            .iter()
            .zip(&obs.coherent)
            .map(|(&n, &c)| coherent_fraction_value(n, c))
            .collect(),
    }
}

/// Photon number from the per-sample table (no stored states needed).
pub fn photon_series(result: &EvolutionResult) -> Series {
    Series {
        times: result.times.clone(),
        values: result.observables.n_photon.clone(),
    }
}

/// `<a>` from the per-sample table.
pub fn coherent_series(result: &EvolutionResult) -> Series<C64> {
    Series {
        times: result.times.clone(),
        values: result.observables.coherent.clone(),
    }
}

/// `S(T, ω)` on a grid of frequency offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// Offsets from the cavity (frame) frequency, μeV.
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    /// Window start `T`, ps.
    pub start: f64,
    /// Window length `Δ`, ps.
    pub width: f64,
}

impl SpectrumResult {
    /// Local maxima whose height exceeds `rel_threshold` times the global
    /// maximum, as `(omega, value)`, with parabolic refinement of `omega`.
    pub fn peaks(&self, rel_threshold: f64) -> Vec<(f64, f64)> {
        let max = self.values.iter().copied().fold(0.0, f64::max);
        let v = &self.values;
        let mut out = Vec::new();
        for i in 1..v.len().saturating_sub(1) {
            if v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > rel_threshold * max {
                let (w, val) = parabolic_vertex(
                    self.omegas[i] - self.omegas[i - 1],
                    self.omegas[i],
                    v[i - 1],
                    v[i],
                    v[i + 1],
                );
                out.push((w, val));
            }
        }
        out
    }
}

/// Uniform frequency grid `[-half_width, half_width]` with the given step (μeV).
pub fn omega_grid(half_width: f64, step: f64) -> Vec<f64> {
    let n = (half_width / step).round() as i64;
    (-n..=n).map(|k| k as f64 * step).collect()
}

/// `S(T, ω) = |∫_T^{T+Δ} <a>(t) e^{iωt/ħ} dt|²` by the trapezoidal rule.
///
/// The sign of the exponent is chosen so that a field component
/// `<a> ∝ e^{-iω₀t/ħ}` (oscillating at `+ω₀` above the frame carrier)
/// peaks at `ω = ω₀`.
pub fn windowed_spectrum(
    coh: &Series<C64>,
    start: f64,
    width: f64,
    omega_grid: &[f64],
) -> Result<SpectrumResult> {
    if !(width > 0.0) {
        return Err(Error::Analysis(format!("window length must be > 0, got {width}")));
    }
    let end = start + width;
    let (first, last) = match (coh.times.first(), coh.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Analysis("empty series".into())),
    };
    let eps = 1e-9 * (last - first).abs().max(1.0);
    if start < first - eps || end > last + eps {
        return Err(Error::Analysis(format!(
            "window [{start}, {end}] ps lies outside the data range [{first}, {last}] ps"
        )));
    }
    // window nodes: interpolated end points plus interior samples
    let mut nodes: Vec<(f64, C64)> = vec![(start, coh.at(start).expect("inside range"))];
    let inner = coh.window(start, end);
    for (&t, &z) in inner.times.iter().zip(&inner.values) {
        if t > start + eps && t < end - eps {
            nodes.push((t, z));
        }
    }
    nodes.push((end, coh.at(end).expect("inside range")));

    let values = omega_grid
        .iter()
        .map(|&w| {
            let k = w / HBAR_UEV_PS;
            let mut acc = C64::new(0.0, 0.0);
            for pair in nodes.windows(2) {
                let (t0, z0) = pair[0];
                let (t1, z1) = pair[1];
                let f0 = z0 * C64::from_polar(1.0, k * t0);
                let f1 = z1 * C64::from_polar(1.0, k * t1);
                acc += (f0 + f1) * (0.5 * (t1 - t0));
            }
            acc.norm_sqr()
        })
        .collect();
    Ok(SpectrumResult {
        omegas: omega_grid.to_vec(),
        values,
        start,
        width,
    })
}

/// Window starts `t0, t0 + Δ/3, …` not exceeding `t1`, one spectrum each.
pub fn spectrogram(
    coh: &Series<C64>,
    t0: f64,
    t1: f64,
    width: f64,
    omega_grid: &[f64],
) -> Result<Vec<SpectrumResult>> {
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Analysis(format!("need finite t0 <= t1, got {t0} / {t1}")));
    }
    if !(width > 0.0) {
        return Err(Error::Analysis(format!("window length must be > 0, got {width}")));
    }
    let stride = width / 3.0;
    let count = ((t1 - t0) / stride + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|k| windowed_spectrum(coh, t0 + k as f64 * stride, width, omega_grid))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub time: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

fn parabolic_vertex(h: f64, t1: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        return (t1, y1);
    }
    let delta = (0.5 * (y0 - y2) / denom).clamp(-1.0, 1.0);
    let value = y1 - 0.25 * (y0 - y2) * delta;
    (t1 + delta * h, value)
}

/// Interior local extrema of a uniformly sampled series at times `> after_t`,
/// located by three-point quadratic interpolation. Extrema whose prominence
/// is below `1e-4` of the series range are dropped, so adding a constant
/// never changes the result.
pub fn find_extrema(series: &Series, after_t: f64) -> Result<Vec<Extremum>> {
    let v = &series.values;
    let t = &series.times;
    if v.len() < 3 {
        return Err(Error::Analysis(format!(
            "need at least 3 samples to locate extrema, got {}",
            v.len()
        )));
    }
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = EXTREMUM_PROMINENCE * (hi - lo);

    // raw candidates, collapsing flat plateaus to their centre
    let mut raw: Vec<(usize, ExtremumKind)> = Vec::new();
    let mut i = 1;
    while i + 1 < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        if j + 1 >= v.len() {
            break;
        }
        let (prev, next) = (v[i - 1], v[j + 1]);
        let mid = (i + j) / 2;
        if v[i] > prev && v[i] > next {
            raw.push((mid, ExtremumKind::Max));
        } else if v[i] < prev && v[i] < next {
            raw.push((mid, ExtremumKind::Min));
        }
        i = j + 1;
    }

    let mut out = Vec::new();
    for (k, &(idx, kind)) in raw.iter().enumerate() {
        // prominence against the neighbouring opposite extrema (or series ends)
        let left = if k > 0 { v[raw[k - 1].0] } else { v[0] };
        let right = if k + 1 < raw.len() { v[raw[k + 1].0] } else { v[v.len() - 1] };
        let prominence = match kind {
            ExtremumKind::Max => (v[idx] - left).min(v[idx] - right),
            ExtremumKind::Min => (left - v[idx]).min(right - v[idx]),
        };
        if prominence < threshold {
            continue;
        }
        let h = t[idx + 1] - t[idx];
        let (time, value) = parabolic_vertex(h, t[idx], v[idx - 1], v[idx], v[idx + 1]);
        if time > after_t {
            out.push(Extremum { time, value, kind });
        }
    }
    Ok(out)
}

/// Least-squares fit of `log(y) = log(A) - rate·t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFit {
    /// Decay rate, 1/ps.
    pub rate: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub samples: usize,
}

pub fn fit_exponential(series: &Series, t_start: f64, t_end: f64) -> Result<ExpFit> {
    let w = series.window(t_start, t_end);
    if w.len() < 3 {
        return Err(Error::Analysis(format!(
            "exponential fit needs at least 3 samples in [{t_start}, {t_end}], got {}",
            w.len()
        )));
    }
    if let Some((t, v)) = w.times.iter().zip(&w.values).find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::Analysis(format!(
            "exponential fit needs positive values; got {v} at t = {t} ps"
        )));
    }
    let logs: Vec<f64> = w.values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, r2) = linear_regression(&w.times, &logs);
    Ok(ExpFit {
        rate: -slope,
        amplitude: intercept.exp(),
        r_squared: r2,
        samples: w.len(),
    })
}

/// Ordinary least squares `y = slope·x + intercept`; returns `(slope, intercept, R²)`.
pub(crate) fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    (slope, intercept, r2)
}

/// Partial transpose over the emitter factor.
pub fn partial_transpose_emitter(rho: &DensityMatrix) -> Result<CMatrix> {
    let dims = rho
        .dims()
        .ok_or_else(|| Error::Analysis("partial transpose needs a composite state".into()))?;
    let nc = dims.cavity();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for e in 0..3 {
        for f in 0..3 {
            for n in 0..nc {
                for k in 0..nc {
                    out[(e * nc + n, f * nc + k)] = m[(f * nc + n, e * nc + k)];
                }
            }
        }
    }
    Ok(out)
}

/// Sum of |negative eigenvalues| of the emitter partial transpose.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose_emitter(rho)?;
    Ok(hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(f64::abs)
        .sum())
}

/// Detrended peak-to-trough contrast: the series is divided by its
/// exponential fit over the window, then `(max - min) / (max + min)`.
pub fn oscillation_contrast(series: &Series, t_start: f64, t_end: f64) -> Result<f64> {
    let fit = fit_exponential(series, t_start, t_end)?;
    let w = series.window(t_start, t_end);
    let ratios: Vec<f64> = w
        .times
        .iter()
        .zip(&w.values)
        .map(|(&t, &v)| v / (fit.amplitude * (-fit.rate * t).exp()))
        .collect();
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((hi - lo) / (hi + lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{CVector, HilbertDims, KetState, Space};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn grid(t0: f64, t1: f64, dt: f64) -> Vec<f64> {
        let n = ((t1 - t0) / dt).round() as usize;
        (0..=n).map(|k| t0 + k as f64 * dt).collect()
    }

    #[test]
    fn coherent_fraction_guard() {
        assert_eq!(coherent_fraction_value(0.0, C64::new(0.0, 0.0)), 0.0);
        assert_eq!(coherent_fraction_value(1e-13, C64::new(1e-7, 0.0)), 0.0);
        assert_abs_diff_eq!(coherent_fraction_value(0.04, C64::new(0.0, 0.2)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectrum_of_single_tone() {
        let w0 = 60.0;
        let times = grid(0.0, 40.0, 0.05);
        let vals = times.iter().map(|&t| C64::from_polar(1.0, -w0 * t / HBAR_UEV_PS)).collect();
        let s = Series::new(times, vals).unwrap();
        let omegas = omega_grid(400.0, 1.0);
        let spec = windowed_spectrum(&s, 5.0, 30.0, &omegas).unwrap();
        let (i_max, _) = spec
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_abs_diff_eq!(spec.omegas[i_max], w0, epsilon = 0.5);
        // sinc² window: |∫ e^{i x t}|² = (2 sin(xΔ/2)/x)²
        for (&w, &v) in spec.omegas.iter().zip(&spec.values) {
            let x = (w - w0) / HBAR_UEV_PS;
            let exact = if x.abs() < 1e-12 { 30.0 * 30.0 } else { (2.0 * (x * 15.0).sin() / x).powi(2) };
            assert_abs_diff_eq!(v, exact, epsilon = 1e-3 * 900.0);
        }
        assert!(spec.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn spectrum_zero_and_range() {
        let times = grid(0.0, 10.0, 0.05);
        let s = Series::new(times.clone(), vec![C64::new(0.0, 0.0); times.len()]).unwrap();
        let spec = windowed_spectrum(&s, 1.0, 5.0, &omega_grid(50.0, 5.0)).unwrap();
        assert!(spec.values.iter().all(|&v| v == 0.0));
        assert!(windowed_spectrum(&s, 8.0, 5.0, &[0.0]).is_err());
        assert!(windowed_spectrum(&s, -1.0, 5.0, &[0.0]).is_err());
    }

    #[test]
    fn spectrum_global_phase_and_scaling() {
        let times = grid(0.0, 30.0, 0.05);
        let vals: Vec<C64> = times
            .iter()
            .map(|&t| C64::new((0.15 * t).cos() * (-0.01 * t).exp(), 0.1 * (0.02 * t).sin()))
            .collect();
        let s = Series::new(times, vals).unwrap();
        let om = omega_grid(300.0, 2.0);
        let base = windowed_spectrum(&s, 2.0, 20.0, &om).unwrap();
        let rotated = s.map(|z| z * C64::from_polar(1.0, 1.234));
        let r = windowed_spectrum(&rotated, 2.0, 20.0, &om).unwrap();
        for (a, b) in base.values.iter().zip(&r.values) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10 * a.max(1.0));
        }
        let total = |sp: &SpectrumResult| sp.values.iter().sum::<f64>();
        for k in [2.0, 4.0] {
            let scaled = windowed_spectrum(&s.map(|z| z * k), 2.0, 20.0, &om).unwrap();
            assert_abs_diff_eq!(total(&scaled) / total(&base), k * k, epsilon = 1e-9);
        }
    }

    #[test]
    fn extrema_of_cosine() {
        let times = grid(0.0, 100.0, 0.05);
        let vals = times.iter().map(|&t| (2.0 * PI * t / 20.0).cos()).collect();
        let s = Series::new(times, vals).unwrap();
        let ex = find_extrema(&s, 0.0).unwrap();
        let maxima: Vec<f64> = ex.iter().filter(|e| e.kind == ExtremumKind::Max).map(|e| e.time).collect();
        assert_eq!(maxima.len(), 4);
        for (k, t) in maxima.iter().enumerate() {
            assert_abs_diff_eq!(*t, 20.0 * (k + 1) as f64, epsilon = 0.01);
        }
        let minima = ex.iter().filter(|e| e.kind == ExtremumKind::Min).count();
        assert_eq!(minima, 5);
        // after_t filters, constant offset does not move anything
        let shifted = s.map(|v| v + 3.0);
        let ex2 = find_extrema(&shifted, 0.0).unwrap();
        assert_eq!(ex.len(), ex2.len());
        for (a, b) in ex.iter().zip(&ex2) {
            assert_abs_diff_eq!(a.time, b.time, epsilon = 1e-9);
        }
        let first = find_extrema(&s, 45.0).unwrap()[0];
        assert_eq!(first.kind, ExtremumKind::Min);
        assert_abs_diff_eq!(first.time, 50.0, epsilon = 0.01);
    }

    #[test]
    fn extrema_edge_cases() {
        let times = grid(0.0, 10.0, 0.05);
        let vals = times.iter().map(|&t| (-0.3 * t).exp()).collect();
        let s = Series::new(times, vals).unwrap();
        assert!(find_extrema(&s, 0.0).unwrap().is_empty());
        let short = Series::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(find_extrema(&short, 0.0).is_err());
    }

    #[test]
    fn exponential_fit() {
        let times = grid(0.0, 50.0, 0.05);
        let vals = times.iter().map(|&t| 2.0 * (-0.03 * t).exp()).collect();
        let s = Series::new(times.clone(), vals).unwrap();
        let fit = fit_exponential(&s, 5.0, 40.0).unwrap();
        assert_abs_diff_eq!(fit.rate, 0.03, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.amplitude, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-9);

        let mut with_zero: Vec<f64> = times.iter().map(|&t| (-0.03 * t).exp()).collect();
        with_zero[200] = 0.0;
        let z = Series::new(times, with_zero).unwrap();
        assert!(fit_exponential(&z, 5.0, 40.0).is_err());
    }

    #[test]
    fn negativity_values() {
        let dims = HilbertDims::new(2).unwrap();
        let prod = DensityMatrix::basis(dims, 1, Level::One).unwrap();
        assert_abs_diff_eq!(negativity(&prod).unwrap(), 0.0, epsilon = 1e-10);

        let mut v = CVector::zeros(dims.total());
        v[dims.index(Level::One, 1)] = C64::new(FRAC_1_SQRT_2, 0.0);
        v[dims.index(Level::Two, 0)] = C64::new(FRAC_1_SQRT_2, 0.0);
        let bell = DensityMatrix::from_ket(&KetState::from_amplitudes(Space::Composite(dims), v).unwrap());
        assert_abs_diff_eq!(negativity(&bell).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn contrast_of_pure_decay_is_small() {
        let times = grid(0.0, 60.0, 0.05);
        let decay = Series::new(times.clone(), times.iter().map(|&t| (-0.03 * t).exp()).collect()).unwrap();
        assert!(oscillation_contrast(&decay, 0.0, 60.0).unwrap() < 1e-10);
        let osc = Series::new(
            times.clone(),
            times.iter().map(|&t| (-0.03 * t).exp() * (0.5 + 0.5 * (0.3 * t).cos().powi(2))).collect(),
        )
        .unwrap();
        assert!(oscillation_contrast(&osc, 0.0, 60.0).unwrap() > 0.2);
    }
}
