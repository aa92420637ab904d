//! Random forest versus Gaussian process: fit quality on held-out points
//! and the effect inside USEA.
//!
//! ```bash
//! cargo run --release --example surrogate_comparison
//! ```

use usea::engine::{usea_run, UseaConfig};
use usea::problems::{Benchmark, Problem};
use usea::rng::RngStream;
use usea::sampling::lhs_init;
use usea::surrogate::{fit, SurrogateKind, SurrogateSettings, TrainingSet};

fn main() -> usea::error::Result<()> {
    let problem = Problem::new(Benchmark::Ackley, 5)?;
    let mut rng = RngStream::new(5);
    let sample = |n: usize, rng: &mut RngStream| -> usea::error::Result<TrainingSet> {
        let xs = lhs_init(n, problem.bounds(), rng)?.xs();
        let ys = xs.iter().map(|x| problem.evaluate(x, rng)).collect::<Result<Vec<_>, _>>()?;
        TrainingSet::new(xs, ys)
    };
    let train = sample(60, &mut rng)?;
    let test = sample(200, &mut rng)?;

    for kind in [SurrogateKind::Rf, SurrogateKind::Gp] {
        let model = fit(kind, &train, &SurrogateSettings::default(), &RngStream::new(1))?;
        let pred = model.predict(&test.inputs)?;
        let rmse = (pred.iter().zip(&test.targets).map(|(p, y)| (p - y).powi(2)).sum::<f64>() / pred.len() as f64).sqrt();
        // share of test pairs ordered the same way by model and truth
        let mut agree = 0;
        let mut pairs = 0;
        for i in 0..pred.len() {
            for j in i + 1..pred.len() {
                pairs += 1;
                agree += ((pred[i] < pred[j]) == (test.targets[i] < test.targets[j])) as usize;
            }
        }
        println!("{kind}: RMSE {rmse:.3}, pairwise order agreement {:.1}%", 100.0 * agree as f64 / pairs as f64);
    }

    for kind in [SurrogateKind::Rf, SurrogateKind::Gp] {
        let cfg = UseaConfig::new(Benchmark::Ackley, 5).with_surrogate(kind).with_budget(20, 150).with_seed(2);
        let t = usea_run(&cfg)?;
        println!("USEA-EDA with {kind}: best {:.4}, {} GP fallbacks, {:.2}s", t.final_best.f, t.fallback_count(), t.wall_clock);
    }
    Ok(())
}
