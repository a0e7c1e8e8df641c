//! The master-equation right-hand side against an explicitly vectorized
//! Liouvillian assembled from hand-written matrix elements.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rabi_switch::evolution::lindblad_rhs;
use rabi_switch::hilbert::{DensityMatrix, HilbertDims, Space};
use rabi_switch::model::{FrameSpec, SystemModel, SystemParams};
use rabi_switch::pulses::{GaussianPulse, PulseSchedule, PulseTarget};

const HBAR: f64 = 658.211_956_9;
const UEV_PER_EV: f64 = 1e6;

fn zeros(d: usize) -> DMatrix<C> {
    DMatrix::zeros(d, d)
}

/// `|n, level><m, level'|` with emitter-major indexing.
fn idx(n_max: usize, level: usize, n: usize) -> usize {
    level * (n_max + 1) + n
}

struct Oracle {
    h_static: DMatrix<C>,
    jumps: Vec<DMatrix<C>>,
    n_max: usize,
}

impl Oracle {
    fn new(p: &SystemParams, f: &FrameSpec, n_max: usize) -> Self {
        let d = 3 * (n_max + 1);
        let mut h = zeros(d);
        let e1 = (p.omega_1 - f.control_carrier) * UEV_PER_EV / HBAR;
        let e2 = (p.omega_2 - f.control_carrier - f.probe_carrier) * UEV_PER_EV / HBAR;
        let ec = (p.omega_cav - f.probe_carrier) * UEV_PER_EV / HBAR;
        let g = p.g / HBAR;
        for n in 0..=n_max {
            for lvl in 0..3 {
                let i = idx(n_max, lvl, n);
                let level_energy = [0.0, e1, e2][lvl];
                h[(i, i)] = C::new(level_energy + ec * n as f64, 0.0);
            }
            // g sqrt(n+1) |n+1, 1><n, 2| + h.c.
            if n < n_max {
                let a = idx(n_max, 1, n + 1);
                let b = idx(n_max, 2, n);
                let v = C::new(g * ((n + 1) as f64).sqrt(), 0.0);
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        let mut jumps = Vec::new();
        let mut push = |rate_uev: f64, elems: Vec<(usize, usize, f64)>| {
            if rate_uev > 0.0 {
                let mut m = zeros(d);
                let s = (rate_uev / HBAR).sqrt();
                for (r, c, v) in elems {
                    m[(r, c)] = C::new(s * v, 0.0);
                }
                jumps.push(m);
            }
        };
        let per_n = |from: usize, to: usize| -> Vec<(usize, usize, f64)> {
            (0..=n_max).map(|n| (idx(n_max, to, n), idx(n_max, from, n), 1.0)).collect()
        };
        push(p.gamma_2, per_n(2, 1));
        push(p.gamma_1, per_n(1, 0));
        push(p.gamma_d1, per_n(1, 1));
        push(p.gamma_d2, per_n(2, 2));
        let cavity: Vec<_> = (0..3)
            .flat_map(|lvl| {
                (1..=n_max).map(move |n| (idx(n_max, lvl, n - 1), idx(n_max, lvl, n), (n as f64).sqrt()))
            })
            .collect();
        push(p.gamma_a, cavity);
        Self {
            h_static: h,
            jumps,
            n_max,
        }
    }

    fn hamiltonian(&self, schedule: &PulseSchedule, t: f64) -> DMatrix<C> {
        let mut h = self.h_static.clone();
        let n_max = self.n_max;
        for p in schedule.pulses() {
            if !p.is_active(t) {
                continue;
            }
            let eps = p.envelope(t);
            match p.target {
                PulseTarget::Cavity => {
                    for lvl in 0..3 {
                        for n in 1..=n_max {
                            let lo = idx(n_max, lvl, n - 1);
                            let hi = idx(n_max, lvl, n);
                            let s = (n as f64).sqrt();
                            // eps* a + eps a†
                            h[(lo, hi)] += eps.conj() * s;
                            h[(hi, lo)] += eps * s;
                        }
                    }
                }
                PulseTarget::EmitterG1 => {
                    for n in 0..=n_max {
                        let g = idx(n_max, 0, n);
                        let one = idx(n_max, 1, n);
                        h[(g, one)] += eps.conj();
                        h[(one, g)] += eps;
                    }
                }
            }
        }
        h
    }

    /// Column-major vectorized generator: vec(AXB) = (Bᵀ ⊗ A) vec(X).
    fn liouvillian(&self, schedule: &PulseSchedule, t: f64) -> DMatrix<C> {
        let h = self.hamiltonian(schedule, t);
        let d = h.nrows();
        let id = DMatrix::<C>::identity(d, d);
        let mi = C::new(0.0, -1.0);
        let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * mi;
        for j in &self.jumps {
            let jd_j = j.adjoint() * j;
            l += j.conjugate().kronecker(j);
            l -= id.kronecker(&jd_j) * C::new(0.5, 0.0);
            l -= jd_j.transpose().kronecker(&id) * C::new(0.5, 0.0);
        }
        l
    }
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<C> {
    let a = DMatrix::<C>::from_fn(d, d, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn check(params: SystemParams, frame: FrameSpec, n_max: usize, times: &[f64]) {
    let dims = HilbertDims::new(n_max).unwrap();
    let model = SystemModel::new(params, frame, dims).unwrap();
    let mut detuned_probe = GaussianPulse::new(PulseTarget::Cavity, 2.0, 0.4, 0.7);
    detuned_probe.detuning = 35.0;
    detuned_probe.phase = 0.4;
    let mut control = GaussianPulse::new(PulseTarget::EmitterG1, 25.0, 0.2, std::f64::consts::PI);
    control.phase = -1.1;
    let schedule = PulseSchedule::new(vec![detuned_probe, control]).unwrap();
    let oracle = Oracle::new(&params, &frame, n_max);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = dims.total();
    for &t in times {
        let rho = random_density(&mut rng, d);
        let state = DensityMatrix::from_matrix(Space::Composite(dims), rho.clone()).unwrap();
        let got = lindblad_rhs(&state, t, &model, &schedule).unwrap();
        let vec_rho = DMatrix::from_column_slice(d * d, 1, rho.as_slice());
        let want = oracle.liouvillian(&schedule, t) * vec_rho;
        let want = DMatrix::from_column_slice(d, d, want.as_slice());
        let err = (&got - &want).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "t = {t}: max elementwise deviation {err:e}");
    }
}

#[test]
fn reference_parameters() {
    let p = SystemParams::reference();
    check(p, FrameSpec::resonant(&p), 4, &[0.0, 1.9, 2.0, 2.3, 10.0, 24.9, 25.0, 25.07]);
}

#[test]
fn every_channel_and_detuned_frame() {
    let p = SystemParams {
        gamma_d1: 3.0,
        gamma_d2: 7.0,
        ..SystemParams::reference()
    };
    let frame = FrameSpec {
        control_carrier: p.omega_1 + 40e-6,
        probe_carrier: p.omega_cav - 100e-6,
    };
    check(p, frame, 3, &[1.8, 2.0, 25.0, 25.1, 60.0]);
}

#[test]
fn lossless_small_cutoff() {
    let p = SystemParams::reference().lossless();
    check(p, FrameSpec::resonant(&p), 1, &[2.0, 25.0]);
}
