//! Master-equation time evolution.
//!
//! `dρ/dt = -i[H(t), ρ] + Σ_μ (L_μ ρ L_μ† - ½{L_μ†L_μ, ρ})` with
//! `H(t) = drift + coupling + H_in(t)`, all in rad/ps.
//!
//! The integrators work on a compiled sparse form of the generator
//! (`H_eff = H - i/2 Σ L†L` plus the jump operators as triplet lists); the
//! dense [`lindblad_rhs`] is the reference form of the same map.

use crate::error::{Error, Result};
use crate::hilbert::{
    cavity_annihilation, emitter_embedded, hermitian_eigenvalues, hermiticity_error,
    CMatrix, DensityMatrix, HilbertDims, KetState, Level, Operator, Space, C64, ONE,
};
use crate::model::SystemModel;
use crate::ode::{integrate_dopri5, integrate_rk4, AdaptiveConfig, StepBound, StepStats};
use crate::pulses::{drive_hamiltonian, PulseSchedule};

/// Top-Fock population above which a run is flagged as under-truncated.
pub const TRUNCATION_GUARD: f64 = 1e-6;

/// Sampled states whose trace drifts further than this are renormalized.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-9;

/// Step cap between pulses, ps.
pub const FREE_DT_MAX: f64 = 0.5;

/// Inside a pulse window the step is capped at `fwhm / PULSE_STEP_DIVISOR`.
pub const PULSE_STEP_DIVISOR: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_initial: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    /// Output grid spacing, ps.
    pub sample_dt: f64,
    /// Keep every sampled density matrix in the result.
    pub store_states: bool,
    /// Eigen-decompose each sampled state to track positivity.
    pub check_positivity: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            dt_initial: 1e-3,
            dt_max: FREE_DT_MAX,
            dt_min: 1e-10,
            sample_dt: 0.05,
            store_states: true,
            check_positivity: true,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::param("integrator.rel_tol", "must be > 0"));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::param("integrator.abs_tol", "must be > 0"));
        }
        if !(self.dt_min > 0.0) || !(self.dt_min <= self.dt_initial && self.dt_initial <= self.dt_max) {
            return Err(Error::param(
                "integrator.dt_initial_ps",
                format!(
                    "need 0 < dt_min <= dt_initial <= dt_max, got {} / {} / {}",
                    self.dt_min, self.dt_initial, self.dt_max
                ),
            ));
        }
        if !(self.sample_dt > 0.0) || !self.sample_dt.is_finite() {
            return Err(Error::param("integrator.sample_dt_ps", "must be > 0"));
        }
        Ok(())
    }

    fn adaptive(&self) -> AdaptiveConfig {
        AdaptiveConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            dt_initial: self.dt_initial,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
        }
    }
}

/// Closed time interval in ps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSpan {
    pub start: f64,
    pub end: f64,
}

impl TimeSpan {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() || end <= start {
            return Err(Error::param(
                "time",
                format!("need finite start < end, got [{start}, {end}]"),
            ));
        }
        Ok(Self { start, end })
    }

    /// Uniform grid `start + k·dt` up to and including `end` (within 1e-9 dt).
    pub fn sample_grid(&self, dt: f64) -> Vec<f64> {
        let n = ((self.end - self.start) / dt + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * dt).collect()
    }
}

/// Run-level health figures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    /// `+inf` when positivity checks were disabled.
    pub min_eigenvalue: f64,
    pub max_top_fock_population: f64,
    /// Set when the top Fock level exceeded [`TRUNCATION_GUARD`].
    pub truncation_flag: bool,
    pub renormalized_samples: usize,
    pub steps: StepStats,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_top_fock_population: 0.0,
            truncation_flag: false,
            renormalized_samples: 0,
            steps: StepStats::default(),
        }
    }
}

/// Standard per-sample observables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableTable {
    /// `<a†a>`
    pub n_photon: Vec<f64>,
    /// `<a>` in the rotating frame
    pub coherent: Vec<C64>,
    pub pop_g: Vec<f64>,
    pub pop_1: Vec<f64>,
    pub pop_2: Vec<f64>,
    pub purity: Vec<f64>,
    /// `|Tr ρ - 1|` before any renormalization
    pub trace_err: Vec<f64>,
}

impl ObservableTable {
    pub const REAL_COLUMNS: [&'static str; 9] = [
        "n_photon", "coh_re", "coh_im", "coh_sq", "pop_g", "pop_1", "pop_2", "purity", "trace_err",
    ];

    fn with_capacity(n: usize) -> Self {
        Self {
            n_photon: Vec::with_capacity(n),
            coherent: Vec::with_capacity(n),
            pop_g: Vec::with_capacity(n),
            pop_1: Vec::with_capacity(n),
            pop_2: Vec::with_capacity(n),
            purity: Vec::with_capacity(n),
            trace_err: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n_photon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_photon.is_empty()
    }

    /// Real-valued column by CSV name.
    pub fn real_series(&self, name: &str) -> Option<Vec<f64>> {
        Some(match name {
            "n_photon" => self.n_photon.clone(),
            "coh_re" => self.coherent.iter().map(|z| z.re).collect(),
            "coh_im" => self.coherent.iter().map(|z| z.im).collect(),
            "coh_sq" => self.coherent.iter().map(|z| z.norm_sqr()).collect(),
            "pop_g" => self.pop_g.clone(),
            "pop_1" => self.pop_1.clone(),
            "pop_2" => self.pop_2.clone(),
            "purity" => self.purity.clone(),
            "trace_err" => self.trace_err.clone(),
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub dims: HilbertDims,
    pub times: Vec<f64>,
    pub states: Option<Vec<DensityMatrix>>,
    pub observables: ObservableTable,
    pub diagnostics: Diagnostics,
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample_dt(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    /// Index of the sample closest to `t`.
    pub fn index_near(&self, t: f64) -> Option<usize> {
        if self.times.is_empty() {
            return None;
        }
        let i = self.times.partition_point(|&x| x < t);
        let candidates = [i.saturating_sub(1), i.min(self.times.len() - 1)];
        candidates
            .into_iter()
            .min_by(|&a, &b| (self.times[a] - t).abs().total_cmp(&(self.times[b] - t).abs()))
    }
}

/// Sparse matrix as `(row, col, value)` triplets.
#[derive(Clone, Debug, Default)]
struct Triplets(Vec<(usize, usize, C64)>);

impl Triplets {
    fn from_dense(m: &CMatrix) -> Self {
        let mut out = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    out.push((i, j, m[(i, j)]));
                }
            }
        }
        Triplets(out)
    }
}

/// The master-equation generator compiled for repeated evaluation on flat,
/// row-major density matrices.
struct Generator<'a> {
    dim: usize,
    schedule: &'a PulseSchedule,
    /// `H_0 - i/2 Σ L†L`
    heff_static: Triplets,
    a: Triplets,
    s_g1: Triplets,
    jumps: Vec<Triplets>,
    heff: Vec<(usize, usize, C64)>,
}

impl<'a> Generator<'a> {
    fn new(model: &SystemModel, schedule: &'a PulseSchedule) -> Self {
        let dims = model.dims;
        let mut heff = model.static_hamiltonian().into_matrix();
        let mut jumps = Vec::new();
        for j in &model.jumps {
            let l = j.scaled();
            let ldl = l.dag().mul(&l).expect("same space").into_matrix();
            heff -= ldl * C64::new(0.0, 0.5);
            jumps.push(Triplets::from_dense(l.matrix()));
        }
        Self {
            dim: dims.total(),
            schedule,
            heff_static: Triplets::from_dense(&heff),
            a: Triplets::from_dense(cavity_annihilation(dims).matrix()),
            s_g1: Triplets::from_dense(emitter_embedded(Level::G, Level::One, dims).matrix()),
            jumps,
            heff: Vec::new(),
        }
    }

    /// Refreshes the effective Hamiltonian triplets for time `t`.
    fn update(&mut self, t: f64) {
        self.heff.clear();
        self.heff.extend_from_slice(&self.heff_static.0);
        let (eps_p, eps_c) = self.schedule.drive_amplitudes(t);
        for (ops, eps) in [(&self.a, eps_p), (&self.s_g1, eps_c)] {
            if eps == C64::new(0.0, 0.0) {
                continue;
            }
            for &(i, j, v) in &ops.0 {
                // ε* X + ε X†
                self.heff.push((i, j, eps.conj() * v));
                self.heff.push((j, i, eps * v.conj()));
            }
        }
    }

    /// `dρ = -i(H_eff ρ - ρ H_eff†) + Σ L ρ L†`.
    fn apply_density(&mut self, t: f64, rho: &[C64], out: &mut [C64]) {
        self.update(t);
        let d = self.dim;
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let mi = C64::new(0.0, -1.0);
        for &(i, j, v) in &self.heff {
            // -i H_eff ρ : row i += -i v ρ[j, :]
            let c = mi * v;
            let (src, dst) = (j * d, i * d);
            for k in 0..d {
                out[dst + k] += c * rho[src + k];
            }
            // +i ρ H_eff† : column i += i conj(v) ρ[:, j]
            let c2 = C64::new(0.0, 1.0) * v.conj();
            for k in 0..d {
                out[k * d + i] += c2 * rho[k * d + j];
            }
        }
        for l in &self.jumps {
            for &(i, j, v) in &l.0 {
                for &(k, m, w) in &l.0 {
                    out[i * d + k] += v * rho[j * d + m] * w.conj();
                }
            }
        }
    }

    /// `dψ = -i H ψ` (Hermitian part only; dissipation must be absent).
    fn apply_ket(&mut self, t: f64, psi: &[C64], out: &mut [C64]) {
        self.update(t);
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let mi = C64::new(0.0, -1.0);
        for &(i, j, v) in &self.heff {
            out[i] += mi * v * psi[j];
        }
    }

    fn step_bound(&self, t: f64, dt_max: f64) -> StepBound {
        let active = self
            .schedule
            .pulses()
            .iter()
            .filter(|p| p.is_active(t))
            .map(|p| p.fwhm)
            .reduce(f64::min);
        match active {
            Some(fwhm) => StepBound { max_step: dt_max.min(fwhm / PULSE_STEP_DIVISOR), barrier: None },
            None => {
                let barrier = self
                    .schedule
                    .pulses()
                    .iter()
                    .map(|p| p.active_window().0)
                    .filter(|&s| s > t)
                    .reduce(f64::min);
                StepBound { max_step: dt_max, barrier }
            }
        }
    }
}

/// Dense reference evaluation of the Lindblad right-hand side.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    t: f64,
    model: &SystemModel,
    schedule: &PulseSchedule,
) -> Result<CMatrix> {
    if rho.space() != model.space() {
        return Err(Error::DimensionMismatch {
            expected: model.dims.total(),
            got: rho.matrix().nrows(),
        });
    }
    let h = model
        .static_hamiltonian()
        .add(&drive_hamiltonian(schedule, t, model.dims))?;
    let r = rho.matrix();
    let hm = h.matrix();
    let mut out = (hm * r - r * hm) * C64::new(0.0, -1.0);
    for j in &model.jumps {
        let l = j.scaled();
        let lm = l.matrix();
        let ld = lm.adjoint();
        let ldl = &ld * lm;
        out += lm * r * &ld;
        out -= (&ldl * r + r * &ldl) * C64::new(0.5, 0.0);
    }
    Ok(out)
}

/// Accumulates observables and diagnostics at each sample.
struct Recorder {
    dims: HilbertDims,
    cfg: IntegratorConfig,
    a: CMatrix,
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    obs: ObservableTable,
    diag: Diagnostics,
}

impl Recorder {
    fn new(dims: HilbertDims, cfg: IntegratorConfig, n: usize) -> Self {
        Self {
            dims,
            cfg,
            a: cavity_annihilation(dims).into_matrix(),
            times: Vec::with_capacity(n),
            states: Vec::new(),
            obs: ObservableTable::with_capacity(n),
            diag: Diagnostics::default(),
        }
    }

    fn record_flat(&mut self, t: f64, rho_flat: &[C64]) {
        let d = self.dims.total();
        let m = CMatrix::from_row_slice(d, d, rho_flat);
        self.record_matrix(t, m);
    }

    fn record_ket(&mut self, t: f64, psi: &[C64]) {
        let v = nalgebra::DVector::from_column_slice(psi);
        self.record_matrix(t, &v * v.adjoint());
    }

    fn record_matrix(&mut self, t: f64, mut m: CMatrix) {
        let dims = self.dims;
        let nc = dims.cavity();
        let tr = m.trace();
        let trace_err = (tr - ONE).norm();
        if trace_err > RENORMALIZE_THRESHOLD && tr.re > 0.0 {
            m /= C64::new(tr.re, 0.0);
            self.diag.renormalized_samples += 1;
        }
        self.diag.max_trace_error = self.diag.max_trace_error.max(trace_err);
        self.diag.max_hermiticity_error = self.diag.max_hermiticity_error.max(hermiticity_error(&m));
        if self.cfg.check_positivity {
            let min_ev = hermitian_eigenvalues(&m).into_iter().fold(f64::INFINITY, f64::min);
            self.diag.min_eigenvalue = self.diag.min_eigenvalue.min(min_ev);
        }

        let mut n_photon = 0.0;
        let mut pops = [0.0; 3];
        let mut top = 0.0;
        for e in 0..3 {
            for n in 0..nc {
                let p = m[(e * nc + n, e * nc + n)].re;
                pops[e] += p;
                n_photon += n as f64 * p;
                if n == dims.n_max() {
                    top += p;
                }
            }
        }
        // <a> = Tr(ρ a) = Σ_ij ρ_ij a_ji
        let mut coh = C64::new(0.0, 0.0);
        for e in 0..3 {
            for n in 0..dims.n_max() {
                let i = e * nc + n;
                coh += m[(i + 1, i)] * self.a[(i, i + 1)];
            }
        }
        self.diag.max_top_fock_population = self.diag.max_top_fock_population.max(top);
        if top > TRUNCATION_GUARD {
            self.diag.truncation_flag = true;
        }

        self.times.push(t);
        self.obs.n_photon.push(n_photon);
        self.obs.coherent.push(coh);
        self.obs.pop_g.push(pops[0]);
        self.obs.pop_1.push(pops[1]);
        self.obs.pop_2.push(pops[2]);
        self.obs.purity.push(m.iter().map(|z| z.norm_sqr()).sum());
        self.obs.trace_err.push(trace_err);
        if self.cfg.store_states {
            self.states.push(
                DensityMatrix::from_matrix_unchecked(Space::Composite(dims), m)
                    .expect("recorder keeps dimensions"),
            );
        }
    }

    fn finish(mut self, steps: StepStats) -> EvolutionResult {
        self.diag.steps = steps;
        EvolutionResult {
            dims: self.dims,
            times: self.times,
            states: self.cfg.store_states.then_some(self.states),
            observables: self.obs,
            diagnostics: self.diag,
        }
    }
}

fn check_inputs(model: &SystemModel, schedule: &PulseSchedule, space: Space) -> Result<()> {
    if space != model.space() {
        return Err(Error::DimensionMismatch {
            expected: model.dims.total(),
            got: space.dim(),
        });
    }
    crate::pulses::validate_schedule(schedule.pulses())?;
    Ok(())
}

fn flatten_row_major(m: &CMatrix) -> Vec<C64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Adaptive Dormand–Prince evolution of the density matrix, sampled on the
/// uniform grid `t_span.start + k·sample_dt`.
pub fn evolve(
    model: &SystemModel,
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    t_span: TimeSpan,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult> {
    cfg.validate()?;
    check_inputs(model, schedule, rho0.space())?;
    let samples = t_span.sample_grid(cfg.sample_dt);
    let mut rec = Recorder::new(model.dims, *cfg, samples.len());
    let mut gen = Generator::new(model, schedule);
    let y0 = flatten_row_major(rho0.matrix());
    let bound_gen = Generator::new(model, schedule);
    let dt_max = cfg.dt_max;
    let stats = integrate_dopri5(
        |t, y, dy| gen.apply_density(t, y, dy),
        &y0,
        t_span.start,
        t_span.end,
        &samples,
        &cfg.adaptive(),
        |t| bound_gen.step_bound(t, dt_max),
        |_, t, y| rec.record_flat(t, y),
    )?;
    Ok(rec.finish(stats))
}

/// Fixed-step classical RK4 evolution with the same output contract as
/// [`evolve`]; `dt` is an upper bound on the step between samples.
pub fn evolve_fixed_rk4(
    model: &SystemModel,
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    t_span: TimeSpan,
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult> {
    cfg.validate()?;
    check_inputs(model, schedule, rho0.space())?;
    let samples = t_span.sample_grid(cfg.sample_dt);
    let mut rec = Recorder::new(model.dims, *cfg, samples.len());
    let mut gen = Generator::new(model, schedule);
    let y0 = flatten_row_major(rho0.matrix());
    rec.record_flat(samples[0], &y0);
    let stats = integrate_rk4(
        |t, y, dy| gen.apply_density(t, y, dy),
        &y0,
        t_span.start,
        &samples[1..],
        dt,
        |_, t, y| rec.record_flat(t, y),
    )?;
    Ok(rec.finish(stats))
}

/// Closed-system Schrödinger evolution; the model must carry no dissipation.
pub fn evolve_pure(
    model: &SystemModel,
    schedule: &PulseSchedule,
    psi0: &KetState,
    t_span: TimeSpan,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult> {
    cfg.validate()?;
    check_inputs(model, schedule, psi0.space())?;
    if model.params.has_dissipation() || !model.jumps.is_empty() {
        return Err(Error::param(
            "params",
            "pure-state evolution requires all decay and dephasing rates to be zero",
        ));
    }
    let samples = t_span.sample_grid(cfg.sample_dt);
    let mut rec = Recorder::new(model.dims, *cfg, samples.len());
    let mut gen = Generator::new(model, schedule);
    let bound_gen = Generator::new(model, schedule);
    let y0: Vec<C64> = psi0.amplitudes().iter().copied().collect();
    let dt_max = cfg.dt_max;
    let stats = integrate_dopri5(
        |t, y, dy| gen.apply_ket(t, y, dy),
        &y0,
        t_span.start,
        t_span.end,
        &samples,
        &cfg.adaptive(),
        |t| bound_gen.step_bound(t, dt_max),
        |_, t, y| rec.record_ket(t, y),
    )?;
    Ok(rec.finish(stats))
}

/// Expectation of `op` along a stored trajectory.
pub fn expectation_series(result: &EvolutionResult, op: &Operator) -> Result<Vec<C64>> {
    let states = result.states.as_ref().ok_or(Error::MissingStates)?;
    states
        .iter()
        .map(|rho| crate::hilbert::expectation(rho, op))
        .collect()
}
