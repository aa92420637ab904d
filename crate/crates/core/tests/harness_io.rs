use usea::engine::Variant;
use usea::harness::export::{load_raw_json, load_summary_csv, save_json, save_summary_csv, RawResults};
use usea::harness::stats::mean;
use usea::harness::{run_experiment, summarize, AlgorithmSpec, ExperimentSpec};
use usea::operators::Operator;
use usea::problems::Benchmark;

fn tiny(op: Operator, v: Variant) -> AlgorithmSpec {
    let mut a = AlgorithmSpec::new(op, v);
    a.pop_size = 8;
    a.fes = 30;
    a.surrogate_settings.forest.n_trees = 5;
    a
}

fn spec(runs: usize, workers: Option<usize>) -> ExperimentSpec {
    ExperimentSpec {
        algorithms: vec![tiny(Operator::eda(), Variant::Usea), tiny(Operator::eda(), Variant::Baseline)],
        problems: vec![Benchmark::Ellipsoid, Benchmark::Ackley],
        dims: vec![3, 6],
        runs,
        base_seed: 17,
        reference: None,
        workers,
        output: Default::default(),
    }
}

#[test]
fn summary_mean_is_mean_of_finals() {
    let mut s = spec(3, Some(1));
    s.problems.truncate(1);
    s.dims.truncate(1);
    s.algorithms.truncate(1);
    let res = run_experiment(&s).unwrap();
    assert_eq!(res.records.len(), 3);
    let finals = res.finals(Benchmark::Ellipsoid, 3, "USEA-EDA");
    assert_eq!(res.summary.cells[0].mean, mean(&finals));
}

#[test]
fn any_cell_reruns_in_isolation() {
    let s = spec(2, None);
    let res = run_experiment(&s).unwrap();
    for rec in &res.records {
        let cell = &s.cells()[rec.cell];
        let alone = usea::engine::usea_run(&s.config(cell, rec.run)).unwrap();
        assert_eq!(Some(alone.final_best.f), rec.final_best());
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = run_experiment(&spec(2, Some(1))).unwrap();
    let b = run_experiment(&spec(2, Some(3))).unwrap();
    assert_eq!(a.summary, b.summary);
    let fa: Vec<_> = a.records.iter().map(|r| r.final_best()).collect();
    let fb: Vec<_> = b.records.iter().map(|r| r.final_best()).collect();
    assert_eq!(fa, fb);
}

#[test]
fn files_round_trip_and_restat() {
    let res = run_experiment(&spec(3, None)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_summary_csv(&res.summary.cells, dir.path().join("s.csv")).unwrap();
    save_json(&RawResults::new(&res.summary.reference, res.records.clone()), dir.path().join("r.json")).unwrap();
    assert_eq!(load_summary_csv(dir.path().join("s.csv")).unwrap(), res.summary.cells);
    let raw = load_raw_json(dir.path().join("r.json")).unwrap();
    assert_eq!(summarize(&raw.records, &raw.reference).unwrap(), res.summary);
    // mean ranks average to (k + 1) / 2 per dimension
    for d in [3, 6] {
        let ranks: Vec<f64> = res.summary.mean_ranks.iter().filter(|r| r.dim == d).map(|r| r.mean_rank).collect();
        assert!((mean(&ranks).unwrap() - 1.5).abs() < 1e-12);
    }
}
