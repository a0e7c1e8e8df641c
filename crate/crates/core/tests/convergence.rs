//! Fixed-step RK4 must converge at fourth order through pulsed dynamics.

use std::f64::consts::PI;

use rabi_switch::evolution::{evolve, evolve_fixed_rk4, EvolutionResult, IntegratorConfig, TimeSpan};
use rabi_switch::hilbert::{DensityMatrix, HilbertDims, Level};
use rabi_switch::model::{FrameSpec, SystemModel, SystemParams};
use rabi_switch::pulses::{GaussianPulse, PulseSchedule, PulseTarget};

fn setup() -> (SystemModel, PulseSchedule, DensityMatrix, TimeSpan, IntegratorConfig) {
    let params = SystemParams::reference();
    let dims = HilbertDims::new(3).unwrap();
    let model = SystemModel::new(params, FrameSpec::resonant(&params), dims).unwrap();
    let schedule = PulseSchedule::new(vec![
        GaussianPulse::new(PulseTarget::Cavity, 1.5, 0.4, 0.6),
        GaussianPulse::new(PulseTarget::EmitterG1, 4.0, 0.2, PI),
    ])
    .unwrap();
    let rho0 = DensityMatrix::basis(dims, 0, Level::G).unwrap();
    let cfg = IntegratorConfig {
        sample_dt: 0.5,
        ..Default::default()
    };
    (model, schedule, rho0, TimeSpan::new(0.0, 12.0).unwrap(), cfg)
}

fn max_diff(a: &EvolutionResult, b: &EvolutionResult) -> f64 {
    let (sa, sb) = (a.states.as_ref().unwrap(), b.states.as_ref().unwrap());
    sa.iter()
        .zip(sb)
        .map(|(x, y)| (x.matrix() - y.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

#[test]
fn rk4_richardson_ratio() {
    let (model, schedule, rho0, span, cfg) = setup();
    let run = |dt| evolve_fixed_rk4(&model, &schedule, &rho0, span, dt, &cfg).unwrap();
    let (a, b, c) = (run(0.02), run(0.01), run(0.005));
    let e1 = max_diff(&a, &b);
    let e2 = max_diff(&b, &c);
    let ratio = e1 / e2;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio} (e1 {e1:e}, e2 {e2:e})");
}

#[test]
fn adaptive_matches_fine_rk4() {
    let (model, schedule, rho0, span, cfg) = setup();
    let rk4 = evolve_fixed_rk4(&model, &schedule, &rho0, span, 1e-3, &cfg).unwrap();
    let tight = IntegratorConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        ..cfg
    };
    let adaptive = evolve(&model, &schedule, &rho0, span, &tight).unwrap();
    assert_eq!(rk4.times, adaptive.times);
    let d = max_diff(&rk4, &adaptive);
    assert!(d < 1e-9, "max deviation {d:e}");
}

#[test]
fn tolerance_controls_error() {
    let (model, schedule, rho0, span, cfg) = setup();
    let reference = evolve_fixed_rk4(&model, &schedule, &rho0, span, 5e-4, &cfg).unwrap();
    let errs: Vec<f64> = [1e-5, 1e-7, 1e-9]
        .iter()
        .map(|&rel_tol| {
            let c = IntegratorConfig {
                rel_tol,
                abs_tol: rel_tol * 1e-3,
                ..cfg
            };
            max_diff(&evolve(&model, &schedule, &rho0, span, &c).unwrap(), &reference)
        })
        .collect();
    // loose tolerances are capped by the in-pulse step limit, hence >= only
    assert!(errs[0] >= errs[1] && errs[1] >= errs[2] && errs[0] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-8, "{errs:?}");
}
