//! Trains the ridge map on three classes and classifies the two held-out
//! classes, with and without refinement of the training attributes.
//!
//! cargo run --release --example zero_shot_eval -- [seed]

use hyperattr::dataset::{generate_synthetic, SyntheticSpec};
use hyperattr::experiment::{hold_out_classes, ZeroShotTask};
use hyperattr::pipeline::{propagate_attributes, PropagationConfig};
use hyperattr::zsc::DEFAULT_RIDGE_LAMBDA;

fn main() -> hyperattr::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let data = generate_synthetic(&SyntheticSpec { seed, ..Default::default() })?;
    let split = hold_out_classes(&data.features, &[3, 4])?;
    let task = ZeroShotTask::new(&split.train, &split.test, &data.class_attrs, DEFAULT_RIDGE_LAMBDA)?;

    let clean = data.ground_truth.select_samples(&split.train_indices);
    let noisy = data.observed.select_samples(&split.train_indices);
    let refined = propagate_attributes(split.train.rows(), &noisy, &PropagationConfig::default())?.refined;

    for (name, targets) in [("ground truth", &clean), ("noisy", &noisy), ("refined", &refined)] {
        let result = task.evaluate(targets)?;
        println!("{name:<13} mean class accuracy {:.4}", result.mean_class_accuracy);
        for (class, acc) in &result.per_class_accuracy {
            println!("    class {class}: {acc:.4}");
        }
    }
    Ok(())
}
