use std::path::Path;

use proptest::prelude::*;
use smoothpath::runner::checkpoint::CHECKPOINT_FILE;
use smoothpath::runner::config::{ConfigError, RunConfig};
use smoothpath::runner::presets::{preset, PRESET_NAMES};
use smoothpath::runner::report::report;
use smoothpath::runner::{resume, run, RunOptions, RunnerError};
use smoothpath::sampler::ScaleStrategy;

fn small_ho() -> RunConfig {
    let mut c = preset("ho-B").unwrap();
    c.name = "small-ho".into();
    c.simulation.centers_per_axis = vec![20];
    c.simulation.ensemble_size = 6;
    c.simulation.n_iteration = 2000;
    c.simulation.resync_interval = 500;
    c.measurement.measure_from = 1000;
    c.measurement.snapshot_interval = 500;
    c.validate().unwrap();
    c
}

fn small_gauge(name: &str) -> RunConfig {
    let mut c = preset(name).unwrap();
    let space = 2.0 * std::f64::consts::PI.sqrt();
    let sim = &mut c.simulation;
    sim.centers_per_axis = vec![2, 2, 2, 4];
    sim.space_period_len = Some(space);
    sim.time_period_len = 2.0 * space;
    sim.ensemble_size = 3;
    sim.n_iteration = 400;
    sim.measurement_interval = 50;
    sim.resync_interval = 200;
    let m = &mut c.measurement;
    m.measure_from = 200;
    m.snapshot_interval = 100;
    m.value_samples = 3;
    let loops = m.loops.as_mut().unwrap();
    loops.time_extent_len = space - 0.25;
    loops.space_extents_len = vec![0.5, 1.0, 1.5];
    loops.loops_per_set = 2;
    c.validate().unwrap();
    c
}

/// Every file of a run directory except the wall-clock metadata.
fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "metadata.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn opts(workers: usize, stop_after: Option<u64>) -> RunOptions {
    RunOptions { workers, stop_after }
}

#[test]
fn presets_round_trip_through_toml() {
    for name in PRESET_NAMES {
        let c = preset(name).unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c, "{name}");
    }
    assert!(matches!(preset("ho-D"), Err(ConfigError::UnknownPreset(_))));
}

#[test]
fn oscillator_presets_carry_the_three_conditions() {
    let a = preset("ho-A").unwrap().simulation;
    let b = preset("ho-B").unwrap().simulation;
    let c = preset("ho-C").unwrap().simulation;
    assert_eq!((a.n_sum(), b.n_sum(), c.n_sum()), (50, 100, 200));
    assert_eq!(a.scale, ScaleStrategy::Fixed { width_len: 1.0 });
    assert_eq!(b.scale, ScaleStrategy::RandomUniform { min_width_len: 0.2, max_width_len: 1.0 });
    assert_eq!(c.scale, ScaleStrategy::Fixed { width_len: 0.2 });
    for s in [a, b, c] {
        assert_eq!((s.time_period_len, s.amplitude_cutoff_amp, s.ensemble_size, s.n_iteration), (20.0, 3.0, 400, 10_000));
    }
    let su2 = preset("su2-paper").unwrap().simulation;
    assert_eq!(su2.centers_per_axis, vec![7, 7, 7, 14]);
    assert_eq!(su2.ensemble_size, 50);
    let xi = su2.space_period_len.unwrap() / (7.0 * std::f64::consts::PI.sqrt());
    assert!((xi - 1.0).abs() < 1e-15);
    assert_eq!(su2.time_period_len, 2.0 * su2.space_period_len.unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn edited_configs_round_trip(seed in 0u64..=i64::MAX as u64, lo in 0.05f64..0.5, span in 0.01f64..1.0, n in 1usize..300) {
        let mut c = preset("ho-B").unwrap();
        c.simulation.seed = seed;
        c.simulation.scale = ScaleStrategy::RandomUniform { min_width_len: lo, max_width_len: lo + span };
        c.simulation.centers_per_axis = vec![n];
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn schema_version_and_bad_values_are_rejected() {
    let text = small_ho().to_toml().unwrap().replace("schema_version = 1", "schema_version = 7");
    assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Schema { found: 7 })));
    let text = small_ho().to_toml().unwrap().replace("ensemble_size = 6", "ensemble_size = 0");
    assert!(RunConfig::from_toml(&text).is_err());
    assert!(RunConfig::from_toml("schema_version = 1\nname = 3").is_err());
    let mut c = small_ho();
    c.simulation.seed = u64::MAX;
    assert!(c.validate().is_err());
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    for config in [small_ho(), small_gauge("su2-desk")] {
        let one = tempfile::tempdir().unwrap();
        let three = tempfile::tempdir().unwrap();
        run(&config, one.path(), &opts(1, None)).unwrap();
        run(&config, three.path(), &opts(3, None)).unwrap();
        let a = artifacts(one.path());
        assert!(a.iter().any(|(n, _)| n == "series.csv"));
        assert_eq!(a, artifacts(three.path()), "{}", config.name);
    }
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    for config in [small_ho(), small_gauge("u1-desk")] {
        let whole = tempfile::tempdir().unwrap();
        let split = tempfile::tempdir().unwrap();
        let full = run(&config, whole.path(), &opts(2, None)).unwrap();
        let half = config.simulation.n_iteration / 2;
        let partial = run(&config, split.path(), &opts(1, Some(half))).unwrap();
        assert!(partial.results.is_none());
        assert_eq!(partial.checkpoint.iteration, half);
        assert!(report(split.path()).is_err());
        let resumed = resume(split.path(), Some(&config), &opts(2, None)).unwrap();
        assert_eq!(format!("{:?}", resumed.results), format!("{:?}", full.results));
        assert_eq!(artifacts(whole.path()), artifacts(split.path()), "{}", config.name);
    }
}

#[test]
fn gauge_run_writes_loop_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&small_gauge("su2-desk"), dir.path(), &opts(1, None)).unwrap();
    let r = out.results.unwrap();
    for f in ["loops.csv", "potential.csv", "histogram_values.csv", "histogram_coefficients.csv", "ensemble_series.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let table = r.loops.as_ref().unwrap();
    assert_eq!(table.paths(), 3);
    assert!(table.averages().iter().all(|&(_, _, m, _)| (-1.0..=1.0).contains(&m)));
    assert!(r.scalar("final_lagrangian_mean").unwrap().0 > 0.0);
}

#[test]
fn refuses_to_overwrite_or_resume_mismatches() {
    let config = small_ho();
    let dir = tempfile::tempdir().unwrap();
    run(&config, dir.path(), &opts(1, Some(1000))).unwrap();
    let again = run(&config, dir.path(), &opts(1, None)).unwrap_err();
    assert!(matches!(again, RunnerError::OutputExists(_)));

    let mut other = config.clone();
    other.simulation.seed += 1;
    let e = resume(dir.path(), Some(&other), &opts(1, None)).unwrap_err();
    assert_eq!(e.exit_code(), 3);

    let cp = dir.path().join(CHECKPOINT_FILE);
    let text = std::fs::read_to_string(&cp).unwrap();
    std::fs::write(&cp, text.replacen("\"version\":1", "\"version\":99", 1)).unwrap();
    assert_eq!(resume(dir.path(), None, &opts(1, None)).unwrap_err().exit_code(), 3);

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(resume(empty.path(), None, &opts(1, None)).unwrap_err().exit_code(), 3);
    assert!(matches!(run(&config, dir.path(), &opts(1, Some(777))), Err(RunnerError::OutputExists(_))));
    let fresh = tempfile::tempdir().unwrap();
    assert_eq!(run(&config, fresh.path(), &opts(1, Some(777))).unwrap_err().exit_code(), 2);
}

#[test]
fn report_compares_against_references() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(report(dir.path()), Err(RunnerError::MissingArtifact(_))));
    run(&small_ho(), dir.path(), &opts(1, None)).unwrap();
    let r = report(dir.path()).unwrap();
    let v = r.rows.iter().find(|row| row.quantity == "final_potential_mean").unwrap();
    assert_eq!(v.reference, Some(0.25));
    let text = r.to_string();
    assert!(text.contains("final_q2_mean") && text.contains("0.5000"));
}
