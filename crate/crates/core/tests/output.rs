use std::fs;

use rabi_switch::config::{parse_config, ExperimentConfig};
use rabi_switch::evolution::{ObservableTable, TimeSpan};
use rabi_switch::output::{write_config, write_csv, write_sweep_csv, OBSERVABLE_HEADER};
use rabi_switch::sweep::{run_sweep_with, Execution, Reduction, SweepSpec};

fn short_run() -> (ExperimentConfig, rabi_switch::evolution::EvolutionResult) {
    let mut cfg = ExperimentConfig::reference();
    cfg.time = TimeSpan::new(0.0, 6.0).unwrap();
    let result = cfg.run().unwrap();
    (cfg, result)
}

#[test]
fn observables_round_trip_at_full_precision() {
    let (_, result) = short_run();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("observables.csv");
    write_csv(&result, &path).unwrap();

    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, OBSERVABLE_HEADER);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), result.len());

    let o = &result.observables;
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], result.times[i]);
        assert_eq!(row[1], o.n_photon[i]);
        assert_eq!(row[2], o.coherent[i].re);
        assert_eq!(row[3], o.coherent[i].im);
        assert_eq!(row[4], o.coherent[i].norm_sqr());
        assert_eq!(row[5], o.pop_g[i]);
        assert_eq!(row[8], o.purity[i]);
        assert_eq!(row[9], o.trace_err[i]);
    }
}

#[test]
fn empty_result_writes_header_only() {
    let (_, mut result) = short_run();
    result.times.clear();
    result.states = None;
    result.observables = ObservableTable::default();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv(&result, &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), format!("{}\n", OBSERVABLE_HEADER.join(",")));
}

#[test]
fn written_config_reproduces_the_run() {
    let (cfg, result) = short_run();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.txt");
    write_config(&cfg, &path).unwrap();
    let back = parse_config(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.run().unwrap().observables, result.observables);
}

#[test]
fn sweep_output_is_deterministic() {
    let (mut cfg, _) = short_run();
    cfg.time = TimeSpan::new(0.0, 12.0).unwrap();
    let spec = SweepSpec {
        field: "params.gamma_a_ueV".into(),
        from: 10.0,
        to: 30.0,
        steps: 2,
        reduction: Reduction::FinalCoherentFraction,
    };
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (k, exec) in [Execution::Parallel, Execution::Parallel, Execution::Sequential].into_iter().enumerate() {
        let table = run_sweep_with(&cfg, &spec, exec).unwrap();
        assert_eq!(table.rows.len(), 2);
        let path = dir.path().join(format!("sweep{k}.csv"));
        write_sweep_csv(&table, &path).unwrap();
        texts.push(fs::read(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
    let text = String::from_utf8(texts.remove(0)).unwrap();
    assert!(text.starts_with("params.gamma_a_ueV,final_coherent_fraction\n10.0,"), "{text}");
    assert_eq!(text.lines().count(), 3);
}
