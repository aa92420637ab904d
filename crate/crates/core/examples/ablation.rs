//! USEA against its ablations and the plain baseline on one problem.
//!
//! ```bash
//! cargo run --release --example ablation -- Rosenbrock 5
//! ```

use usea::engine::{usea_run, UseaConfig, Variant};
use usea::harness::stats::median;
use usea::problems::Benchmark;

fn main() -> usea::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let problem: Benchmark = args.next().as_deref().unwrap_or("Rosenbrock").parse()?;
    let runs: u64 = args.next().map_or(Ok(5), |s| s.parse()).unwrap_or(5);

    println!("{} n=10, N=20, FEs=200, {runs} runs", problem.name());
    for variant in Variant::ALL {
        let mut finals = vec![];
        let mut evaluated_per_gen = 0;
        for seed in 0..runs {
            let cfg = UseaConfig::new(problem, 10).with_variant(variant).with_budget(20, 200).with_seed(seed);
            let t = usea_run(&cfg)?;
            evaluated_per_gen = t.generations[0].evaluated;
            finals.push(t.final_best.f);
        }
        let cfg = UseaConfig::new(problem, 10).with_variant(variant);
        println!(
            "  {:<12} median {:>10.4}   ({} evaluation(s) per generation)",
            cfg.label(),
            median(&finals).unwrap(),
            evaluated_per_gen
        );
    }
    Ok(())
}
