//! Variable-width histogram model behind the EDA operator, and what
//! adding un-evaluated points to its training set does.
//!
//! ```bash
//! cargo run --example vwh_model
//! ```

use usea::operators::{vwh_build, vwh_sample, Histogram};
use usea::rng::RngStream;
use usea::types::{Bounds, DecisionVector, Population};

fn column(values: &[f64]) -> Population {
    Population::offspring(values.iter().map(|&v| DecisionVector::new(vec![v]).unwrap()).collect())
}

fn show(title: &str, h: &Histogram) {
    println!("{title}");
    for (k, p) in h.probabilities.iter().enumerate() {
        println!("  [{:>6.3}, {:>6.3})  p = {:.4}", h.edges[k], h.edges[k + 1], p);
    }
}

fn main() -> usea::error::Result<()> {
    let bounds = Bounds::uniform(1, 0.0, 10.0)?;

    let evaluated = column(&[2.0, 3.0, 4.0, 5.0]);
    let model = vwh_build(&evaluated, 5, &bounds)?;
    show("P_e = {2, 3, 4, 5}, K = 5", &model.dims[0]);

    let both = column(&[2.0, 3.0, 4.0, 5.0, 7.5, 8.0]);
    let model = vwh_build(&both, 5, &bounds)?;
    show("P_e plus un-evaluated {7.5, 8.0}", &model.dims[0]);

    let samples = vwh_sample(&model, 2000, &mut RngStream::new(1));
    let high = samples.iter().filter(|s| s.x()[0] > 6.0).count();
    println!("samples above 6: {high} of 2000");
    Ok(())
}
