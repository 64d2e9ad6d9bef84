//! Sweeps the consistency threshold and prints the flip fraction and
//! zero-shot accuracy at each value, averaged over seeds.
//!
//! cargo run --release --example theta_sweep -- [seeds]

use hyperattr::dataset::{generate_synthetic, SyntheticSpec};
use hyperattr::experiment::{default_theta_grid, hold_out_classes, sweep_theta, ZeroShotTask};
use hyperattr::pipeline::{feature_graph, PropagationConfig};
use hyperattr::zsc::DEFAULT_RIDGE_LAMBDA;

fn main() -> hyperattr::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let grid = default_theta_grid();
    let mut flips = vec![0.0; grid.len()];
    let mut accs = vec![0.0; grid.len()];
    for seed in 0..seeds {
        let data = generate_synthetic(&SyntheticSpec { seed, ..Default::default() })?;
        let split = hold_out_classes(&data.features, &[3, 4])?;
        let task = ZeroShotTask::new(&split.train, &split.test, &data.class_attrs, DEFAULT_RIDGE_LAMBDA)?;
        let graph = feature_graph(split.train.rows(), &PropagationConfig::default())?;
        let observed = data.observed.select_samples(&split.train_indices);
        for (k, row) in sweep_theta(&graph, &observed, 2.0, &grid, &task)?.iter().enumerate() {
            flips[k] += row.flip_fraction / seeds as f64;
            accs[k] += row.mean_class_accuracy / seeds as f64;
        }
    }
    println!("theta  flip_fraction  mean_class_accuracy");
    for ((theta, f), a) in grid.iter().zip(&flips).zip(&accs) {
        println!("{theta:>5.1}  {f:>13.4}  {a:>19.4}");
    }
    Ok(())
}
