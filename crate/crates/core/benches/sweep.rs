use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rabi_switch::config::ExperimentConfig;
use rabi_switch::evolution::TimeSpan;
use rabi_switch::presets::{Preset, PresetOptions};
use rabi_switch::sweep::{run_sweep_with, Execution, Reduction, SweepSpec};

fn config() -> ExperimentConfig {
    // probe plus a single switch-on pulse, whose arrival time is swept
    let mut cfg = Preset::Fig1c.base_config(&PresetOptions::default());
    cfg.time = TimeSpan::new(0.0, 60.0).unwrap();
    cfg
}

fn sweep(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("arrival_time_sweep");
    group.sample_size(10);
    for steps in [4usize, 16] {
        let spec = SweepSpec {
            field: "pulse.1.t0_ps".into(),
            from: 20.0,
            to: 30.0,
            steps,
            reduction: Reduction::FinalCoherentFraction,
        };
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, steps), &spec, |b, spec| {
                b.iter(|| run_sweep_with(&cfg, spec, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
