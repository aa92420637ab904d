//! One USEA-EDA run on the 10-D Ellipsoid with a 300-evaluation budget.
//!
//! ```bash
//! cargo run --release --example quickstart
//! ```

use usea::engine::{usea_run, UseaConfig};
use usea::problems::Benchmark;

fn main() -> usea::error::Result<()> {
    let config = UseaConfig::new(Benchmark::Ellipsoid, 10).with_budget(30, 300).with_seed(7);
    let trace = usea_run(&config)?;

    println!("{} on Ellipsoid n=10, N=30, FEs=300", config.label());
    for fes in [30, 60, 100, 150, 200, 250, 300] {
        println!("  after {fes:>3} evaluations: best {:.4}", trace.best_curve[fes - 1]);
    }
    println!("final best {:.4} in {:.2}s", trace.final_best.f, trace.wall_clock);

    // every generation after the initial design spends one real evaluation
    let g = &trace.generations[0];
    println!(
        "generation 0: evaluated {} offspring, kept {} un-evaluated (predicted {:.2}..{:.2})",
        g.evaluated,
        g.unevaluated_count,
        g.unevaluated_prediction_min.unwrap_or(f64::NAN),
        g.unevaluated_prediction_max.unwrap_or(f64::NAN)
    );
    Ok(())
}
