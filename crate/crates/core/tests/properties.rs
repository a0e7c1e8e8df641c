use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;

use rabi_switch::config::{parse_config, serialize_config, ExperimentConfig, SpectrumWindow};
use rabi_switch::evolution::TimeSpan;
use rabi_switch::hilbert::{expectation, tensor_embed, DensityMatrix, HilbertDims, Operator, Space};
use rabi_switch::observables::{find_extrema, Series};
use rabi_switch::pulses::{GaussianPulse, PulseSchedule, PulseTarget};

fn complex() -> impl Strategy<Value = C> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C::new(re, im))
}

fn matrix(d: usize) -> impl Strategy<Value = DMatrix<C>> {
    prop::collection::vec(complex(), d * d).prop_map(move |v| DMatrix::from_vec(d, d, v))
}

fn emitter_op() -> impl Strategy<Value = Operator> {
    matrix(3).prop_map(|m| Operator::from_matrix(Space::Emitter, m).unwrap())
}

fn cavity_op(n_max: usize) -> impl Strategy<Value = Operator> {
    matrix(n_max + 1).prop_map(move |m| Operator::from_matrix(Space::Cavity(n_max), m).unwrap())
}

fn max_diff(a: &Operator, b: &Operator) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn tensor_mixed_product(a in emitter_op(), c in emitter_op(), b in cavity_op(2), d in cavity_op(2)) {
        let dims = HilbertDims::new(2).unwrap();
        let lhs = tensor_embed(Some(&a), Some(&b), dims).unwrap()
            .mul(&tensor_embed(Some(&c), Some(&d), dims).unwrap()).unwrap();
        let rhs = tensor_embed(Some(&a.mul(&c).unwrap()), Some(&b.mul(&d).unwrap()), dims).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn tensor_bilinear(a in emitter_op(), a2 in emitter_op(), b in cavity_op(3), s in complex()) {
        let dims = HilbertDims::new(3).unwrap();
        let lhs = tensor_embed(Some(&a.add(&a2.scale_complex(s)).unwrap()), Some(&b), dims).unwrap();
        let rhs = tensor_embed(Some(&a), Some(&b), dims).unwrap()
            .add(&tensor_embed(Some(&a2), Some(&b), dims).unwrap().scale_complex(s)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn expectation_of_identity_is_trace(m in matrix(12)) {
        let dims = HilbertDims::new(3).unwrap();
        let rho = &m * m.adjoint();
        let rho = &rho / rho.trace();
        let state = DensityMatrix::from_matrix(Space::Composite(dims), rho).unwrap();
        let id = Operator::identity(Space::Composite(dims));
        let e = expectation(&state, &id).unwrap();
        prop_assert!((e - state.trace()).norm() < 1e-12);
    }

    #[test]
    fn extrema_times_ignore_offset(
        amp in 0.1..3.0f64,
        period in 4.0..20.0f64,
        phase in 0.0..std::f64::consts::TAU,
        offset in -50.0..50.0f64,
    ) {
        let times: Vec<f64> = (0..800).map(|k| 0.1 * k as f64).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|t| amp * (2.0 * std::f64::consts::PI * t / period + phase).cos())
            .collect();
        let shifted: Vec<f64> = values.iter().map(|v| v + offset + 60.0).collect();
        let base: Vec<f64> = values.iter().map(|v| v + 60.0).collect();
        let a = find_extrema(&Series::new(times.clone(), base).unwrap(), 0.0).unwrap();
        let b = find_extrema(&Series::new(times, shifted).unwrap(), 0.0).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.kind, y.kind);
            prop_assert!((x.time - y.time).abs() < 1e-9);
        }
    }

    #[test]
    fn config_round_trip(cfg in config()) {
        let text = serialize_config(&cfg);
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(serialize_config(&back), text);
    }
}

fn pulse() -> impl Strategy<Value = GaussianPulse> {
    (
        prop::bool::ANY,
        0.0..200.0f64,
        0.01..3.0f64,
        0.0..10.0f64,
        -500.0..500.0f64,
        -7.0..7.0f64,
    )
        .prop_map(|(cav, t0, fwhm, area, detuning, phase)| GaussianPulse {
            target: if cav { PulseTarget::Cavity } else { PulseTarget::EmitterG1 },
            t0,
            fwhm,
            area,
            detuning,
            phase,
        })
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    (
        (1usize..8, 0.0..500.0f64, 0.0..100.0f64, 0.0..50.0f64, 0.0..50.0f64),
        (0.0..20.0f64, 0.0..20.0f64, 1.0..2.0f64, -1e-3..1e-3f64),
        prop::collection::vec(pulse(), 0..5),
        (1e-12..1e-3f64, 1e-15..1e-6f64, 0.01..1.0f64, prop::bool::ANY, prop::bool::ANY),
        (-10.0..10.0f64, 1.0..300.0f64),
        prop::collection::vec((0.0..100.0f64, 0.5..100.0f64), 0..3),
    )
        .prop_map(|(phys, rates, pulses, integ, time, windows)| {
            let (n_max, g, gamma_a, gamma_1, gamma_2) = phys;
            let (gd1, gd2, omega_1, binding) = rates;
            let (rel_tol, abs_tol, sample_dt, store, pos) = integ;
            let mut cfg = ExperimentConfig::reference();
            cfg.n_max = n_max;
            cfg.params.g = g;
            cfg.params.gamma_a = gamma_a;
            cfg.params.gamma_1 = gamma_1;
            cfg.params.gamma_2 = gamma_2;
            cfg.params.gamma_d1 = gd1;
            cfg.params.gamma_d2 = gd2;
            cfg.params.omega_1 = omega_1;
            cfg.params.omega_2 = 2.0 * omega_1 + binding;
            cfg.params.omega_cav = cfg.params.omega_2 - omega_1;
            cfg.frame.control_carrier = omega_1;
            cfg.frame.probe_carrier = cfg.params.omega_cav;
            cfg.schedule = PulseSchedule::from_unsorted(pulses).unwrap();
            cfg.integrator.rel_tol = rel_tol;
            cfg.integrator.abs_tol = abs_tol;
            cfg.integrator.sample_dt = sample_dt;
            cfg.integrator.store_states = store;
            cfg.integrator.check_positivity = pos;
            cfg.time = TimeSpan::new(time.0, time.0 + time.1).unwrap();
            cfg.outputs.spectra = windows
                .into_iter()
                .map(|(start, width)| SpectrumWindow { start, width })
                .collect();
            cfg
        })
}
