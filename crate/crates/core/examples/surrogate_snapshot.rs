//! Random-forest mean, spread and expected improvement on the 1-D case
//! function, next to the rank-based choice the optimizer makes.
//!
//! ```bash
//! cargo run --release --example surrogate_snapshot -- out/fig8
//! ```

use usea::harness::demos::{case_study_1d, SelectionRole, SnapshotSetup};
use usea::rng::RngStream;

fn main() -> usea::error::Result<()> {
    let report = case_study_1d(&SnapshotSetup::default(), &RngStream::new(11))?;

    println!("training points:");
    for (x, f) in &report.training {
        println!("  x = {x:6.3}  f = {f:8.4}");
    }
    let a = &report.ei_argmax;
    println!("EI is largest at x = {:.3} (mean {:.3}, std {:.3}, EI {:.4})", a.x, a.mean, a.std, a.ei);

    let chosen = report.offspring.iter().find(|o| o.role == SelectionRole::Evaluate).unwrap();
    let kept: Vec<f64> = report
        .offspring
        .iter()
        .filter(|o| o.role == SelectionRole::Unevaluated)
        .map(|o| o.x)
        .collect();
    println!("rank 1 offspring (evaluated): x = {:.3}, predicted {:.3}", chosen.x, chosen.prediction);
    println!(
        "{} un-evaluated parents span x in [{:.2}, {:.2}]",
        kept.len(),
        kept.iter().copied().fold(f64::INFINITY, f64::min),
        kept.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    );

    if let Some(dir) = std::env::args().nth(1) {
        report.write_dir(&dir)?;
        println!("grid, offspring and training tables written to {dir}");
    }
    Ok(())
}
