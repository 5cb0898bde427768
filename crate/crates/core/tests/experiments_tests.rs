use dualcore_vqe::experiments::{
    self, ExperimentConfig, ExperimentKind, ModelPoint, OutputFormat, RowStatus, CSV_HEADER,
};
use dualcore_vqe::{Architecture, TrainingConfig};

fn small(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig {
        num_qubits: 4,
        layers_per_block: 1,
        separable_stages: 2,
        n_i: 1,
        training: TrainingConfig {
            restarts: 2,
            max_iterations: 60,
            rng_seed: 17,
            ..TrainingConfig::default()
        },
        ..ExperimentConfig::for_experiment(kind)
    }
}

fn check_bounds(rows: &[experiments::ResultRow]) {
    for r in rows.iter().filter(|r| r.is_ok()) {
        let (e_gs, e_var) = (r.e_gs.unwrap(), r.e_var.unwrap());
        assert!(e_var >= e_gs - 1e-9);
        assert!(r.infidelity.unwrap() >= r.discarded_weight.unwrap() - 1e-9);
        for v in [r.epsilon, r.epsilon_signed, r.infidelity, r.discarded_weight] {
            assert!(v.unwrap().is_finite());
        }
    }
}

#[test]
fn one_by_one_xyz_grid_gives_one_row() {
    let mut c = small(ExperimentKind::XyzGrid);
    c.h_x = Some(vec![0.5]);
    c.j_y = Some(vec![1.0]);
    c.j_z = Some(vec![1.0]);
    let rows = experiments::run(&c).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].status, RowStatus::Worst);
    assert_eq!(rows[0].model, "xyz");
    check_bounds(&rows);
}

#[test]
fn tfim_scan_covers_grid_times_architectures() {
    let mut c = small(ExperimentKind::TfimScan);
    c.h_x = Some(vec![0.0, 0.6, 1.5]);
    let rows = experiments::run(&c).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r.status == RowStatus::Worst).count(), 2);
    // zero field: the exact ground state is a product state
    let zero = rows.iter().find(|r| r.model_params == "j=1;h_x=0" && r.architecture == Architecture::Separable);
    assert!(zero.unwrap().discarded_weight.unwrap() < 1e-12);
    check_bounds(&rows);
    let csv = experiments::to_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let cols = CSV_HEADER.split(',').count();
    for l in lines {
        assert_eq!(l.split(',').count(), cols);
    }
}

#[test]
fn failing_points_become_error_rows() {
    let mut c = small(ExperimentKind::TfimScan);
    c.h_x = Some(vec![0.5]);
    // the pair lies inside module 0, so the dual-core build fails
    c.remote_pairs = Some(vec![(0, 1)]);
    let rows = experiments::run(&c).unwrap();
    assert_eq!(rows.len(), 2);
    let err = rows.iter().find(|r| r.architecture == Architecture::DualCore).unwrap();
    assert_eq!(err.status, RowStatus::Error);
    assert!(err.e_var.is_none() && !err.message.is_empty());
    assert!(rows.iter().any(|r| r.architecture == Architecture::Separable && r.is_ok()));
    let csv = experiments::to_csv(&rows);
    assert!(csv.contains(",error,"));
}

#[test]
fn interconnect_sweep_rows_per_count() {
    let mut c = small(ExperimentKind::InterconnectSweep);
    c.n_interconnect = Some(vec![0, 1, 2]);
    c.models = Some(vec![ModelPoint::Tfim { h_x: 0.9 }, ModelPoint::Spin1]);
    let rows = experiments::run(&c).unwrap();
    assert_eq!(rows.len(), 6);
    for (r, k) in rows.iter().zip([0, 1, 2, 0, 1, 2]) {
        assert_eq!(r.n_i, k);
        assert!(r.is_ok());
    }
    check_bounds(&rows);
}

#[test]
fn spin1_energies_exclude_pair_offset() {
    let mut c = small(ExperimentKind::Spin1Scan);
    c.sizes = Some(vec![4]);
    c.architectures = Some(vec![Architecture::DualCore]);
    let rows = experiments::run(&c).unwrap();
    let e = rows[0].e_gs.unwrap();
    assert!((e - dualcore_vqe::spin1_direct_ed(2, 1.0).unwrap()).abs() < 1e-8);
}

#[test]
fn all_to_all_and_compare() {
    let mut c = small(ExperimentKind::AllToAllSweep);
    c.layers = Some(vec![1, 2]);
    c.models = Some(vec![ModelPoint::Tfim { h_x: 0.73 }]);
    let rows = experiments::run(&c).unwrap();
    assert_eq!(rows.iter().map(|r| r.num_layers).collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(rows[1].param_count, 2 * (8 + 6));

    let mut c = small(ExperimentKind::CompareArchitectures);
    c.all_to_all_layers = 2;
    c.models = Some(vec![ModelPoint::Tfim { h_x: 0.73 }]);
    let rows = experiments::run(&c).unwrap();
    let archs: Vec<_> = rows.iter().map(|r| r.architecture).collect();
    assert_eq!(archs, vec![Architecture::Separable, Architecture::DualCore, Architecture::AllToAll]);
    check_bounds(&rows);
}

#[test]
fn output_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(ExperimentKind::TfimScan);
    c.h_x = Some(vec![0.4, 1.2]);
    let paths = [dir.path().join("a/r.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let rows = experiments::run(&c).unwrap();
        experiments::write_rows(&rows, p, OutputFormat::Csv).unwrap();
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());

    let rows = experiments::run(&c).unwrap();
    let p = dir.path().join("r.json");
    experiments::write_rows(&rows, &p, OutputFormat::Json).unwrap();
    let back: serde_json::Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(back.as_array().unwrap().len(), 4);
    assert_eq!(back[0]["wall_time"], 0.0);
}

#[test]
fn invalid_configs_are_config_errors() {
    let mut c = small(ExperimentKind::TfimScan);
    c.h_x = Some(vec![]);
    assert!(experiments::run(&c).unwrap_err().is_config_error());
    let mut c = small(ExperimentKind::Spin1Scan);
    c.sizes = Some(vec![14]);
    assert!(experiments::run(&c).unwrap_err().is_config_error());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"experiment": "xyz_grid"}"#).unwrap();
    assert!(ExperimentConfig::from_file_for(ExperimentKind::TfimScan, &p).is_err());
    assert!(ExperimentConfig::from_file_for(ExperimentKind::XyzGrid, &p).is_ok());
    assert!(ExperimentConfig::from_file_for(ExperimentKind::XyzGrid, &dir.path().join("missing.json")).is_err());
}

#[test]
fn validation_suite_passes() {
    let checks = experiments::run_validation().unwrap();
    assert!(checks.len() >= 5);
    for c in &checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
}
