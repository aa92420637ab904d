//! How un-evaluated parents move the offspring distribution.
//!
//! Parents sit around x = 2 on `-x sin x`, while the surrogate-screened
//! un-evaluated solutions sit near the optimum around x = 8. Each operator
//! generates 10,000 offspring with and without them.
//!
//! ```bash
//! cargo run --release --example offspring_shift -- out/fig3
//! ```

use std::fs::File;
use std::io::BufWriter;

use usea::harness::demos::{demo_operators, offspring_distribution_demo, ShiftSetup};
use usea::rng::RngStream;

fn main() -> usea::error::Result<()> {
    let out = std::env::args().nth(1);
    let setup = ShiftSetup::default();
    let rng = RngStream::new(3);

    for op in demo_operators() {
        let report = offspring_distribution_demo(&op, &setup, &rng.derive(op.short_name()))?;
        println!(
            "{:<4} offspring in [6, 10]: {:>5.1}% with P_u, {:>5.1}% without",
            report.operator,
            100.0 * report.fraction_with,
            100.0 * report.fraction_without
        );
        let peak = report.histogram.iter().max_by_key(|h| h.with_unevaluated).unwrap();
        println!("     densest bin with P_u: [{:.1}, {:.1})", peak.lower, peak.upper);
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir)?;
            let path = format!("{dir}/fig3_{}.csv", report.operator.to_lowercase());
            report.write_csv(BufWriter::new(File::create(&path)?))?;
        }
    }
    Ok(())
}
