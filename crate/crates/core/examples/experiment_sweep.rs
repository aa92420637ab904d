//! A small multi-run sweep with summary statistics and CSV/JSON export.
//!
//! ```bash
//! cargo run --release --example experiment_sweep -- out/sweep
//! ```

use usea::engine::Variant;
use usea::harness::export::{save_json, save_summary_csv, RawResults};
use usea::harness::{run_experiment, AlgorithmSpec, ExperimentSpec};
use usea::operators::Operator;
use usea::problems::Benchmark;

fn main() -> usea::error::Result<()> {
    let small = |op: Operator, v: Variant| {
        let mut a = AlgorithmSpec::new(op, v);
        a.pop_size = 20;
        a.fes = 150;
        a
    };
    let spec = ExperimentSpec {
        algorithms: vec![
            small(Operator::eda(), Variant::Usea),
            small(Operator::ga(), Variant::Usea),
            small(Operator::eda(), Variant::Baseline),
        ],
        problems: vec![Benchmark::Ellipsoid, Benchmark::Ackley],
        dims: vec![8],
        runs: 5,
        base_seed: 100,
        reference: None,
        workers: None,
        output: Default::default(),
    };
    println!("{}", serde_json::to_string_pretty(&spec).unwrap());

    let result = run_experiment(&spec)?;
    for c in &result.summary.cells {
        println!(
            "{:<10} {:<12} mean {:>9.3}  median {:>9.3}  rank {}  {}",
            c.problem,
            c.algorithm,
            c.mean.unwrap_or(f64::NAN),
            c.median.unwrap_or(f64::NAN),
            c.rank.unwrap_or(f64::NAN),
            c.mark.map_or("(reference)".to_string(), |m| m.to_string())
        );
    }
    for r in &result.summary.mean_ranks {
        println!("mean rank {}: {:.2}", r.algorithm, r.mean_rank);
    }

    if let Some(dir) = std::env::args().nth(1) {
        save_summary_csv(&result.summary.cells, format!("{dir}/summary.csv"))?;
        save_json(&RawResults::new(&result.summary.reference, result.records), format!("{dir}/raw.json"))?;
        println!("written to {dir}");
    }
    Ok(())
}
