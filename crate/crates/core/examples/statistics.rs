//! The statistics used to compare algorithms: rank-sum test, mean rank
//! and the improvement metric.
//!
//! ```bash
//! cargo run --example statistics
//! ```

use usea::harness::stats::{improvement_metric, mean_rank, wilcoxon_rank_sum};

fn main() -> usea::error::Result<()> {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0];
    let b = [10.0, 11.0, 12.0, 13.0, 14.0];
    let t = wilcoxon_rank_sum(&a, &b, 0.05)?;
    println!("a vs b: W = {}, p = {:.4} ({}), mark {}", t.rank_sum, t.p_value, if t.exact { "exact" } else { "normal" }, t.mark);
    let t = wilcoxon_rank_sum(&b, &a, 0.05)?;
    println!("b vs a: mark {}", t.mark);

    let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin() + 1.0).collect();
    let y: Vec<f64> = x.iter().map(|v| v + 0.4).collect();
    let t = wilcoxon_rank_sum(&x, &y, 0.05)?;
    println!("30 vs 30 shifted by 0.4: p = {:.4}, mark {}", t.p_value, t.mark);

    // rows are problems, columns algorithms; entries are mean final bests
    let table = vec![vec![9.7, 71.7, 15.0], vec![4.9, 29.6, 4.9], vec![3.1, 2.2, 8.0]];
    println!("mean ranks: {:?}", mean_rank(&table)?);

    println!("I(100 -> 50) = {}%", improvement_metric(100.0, 50.0)?);
    println!("I(100 -> 150) = {}%", improvement_metric(100.0, 150.0)?);
    Ok(())
}
