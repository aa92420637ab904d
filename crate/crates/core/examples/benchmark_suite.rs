//! The benchmark registry: domains, known optima and a random point.
//!
//! ```bash
//! cargo run --example benchmark_suite
//! ```

use usea::problems::{problem_registry, Benchmark};
use usea::rng::RngStream;
use usea::sampling::lhs_init;

fn main() -> usea::error::Result<()> {
    let mut rng = RngStream::new(0);
    let names = Benchmark::LZG.iter().chain(Benchmark::YLL.iter()).map(|b| b.name());
    println!("{:<12} {:>22} {:>12} {:>14}", "problem", "domain", "f(x*)", "f(random)");
    for name in names.chain(std::iter::once("CaseStudy1D")) {
        let p = problem_registry(name, 20)?;
        let b = p.bounds();
        let at_opt = p.evaluate(&p.optimizer(), &mut rng)?;
        let x = lhs_init(1, b, &mut rng)?.xs().remove(0);
        let at_random = p.evaluate(&x, &mut rng)?;
        println!(
            "{:<12} {:>22} {:>12.4} {:>14.4}{}",
            p.name(),
            format!("[{}, {}]^{}", b.lower()[0], b.upper()[0], p.dim()),
            at_opt,
            at_random,
            if p.is_stochastic() { "  (noisy)" } else { "" }
        );
    }
    Ok(())
}
