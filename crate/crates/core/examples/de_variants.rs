//! USEA-DE under each mutation strategy.
//!
//! ```bash
//! cargo run --release --example de_variants
//! ```

use usea::engine::{usea_run, UseaConfig};
use usea::harness::stats::mean;
use usea::operators::{DeParams, DeVariant, GaParams, Operator};
use usea::problems::Benchmark;

fn main() -> usea::error::Result<()> {
    let variants = [DeVariant::Rand1, DeVariant::Rand2, DeVariant::Best1, DeVariant::Best2, DeVariant::CurrentToBest1];
    println!("USEA-DE on Ellipsoid n=10, N=20, FEs=200, 4 runs");
    for variant in variants {
        let op = Operator::De {
            de: DeParams { variant, ..DeParams::default() },
            mutation: GaParams::default(),
        };
        let finals = (0..4)
            .map(|seed| {
                let cfg = UseaConfig::new(Benchmark::Ellipsoid, 10)
                    .with_operator(op.clone())
                    .with_budget(20, 200)
                    .with_seed(seed);
                usea_run(&cfg).map(|t| t.final_best.f)
            })
            .collect::<Result<Vec<_>, _>>()?;
        println!("  {:<18} mean final best {:.3}", variant.name(), mean(&finals).unwrap());
    }
    Ok(())
}
