//! Embeds raw feature rows into the Poincaré ball and prints hyperbolic and
//! Euclidean distances side by side.
//!
//! cargo run --example hyperbolic_distances

use hyperattr::geometry::{euclidean_distance, pairwise_distances};
use hyperattr::{embed_features, hyperbolic_distance, PoincarePoint};
use ndarray::array;

fn main() -> hyperattr::Result<()> {
    let features = array![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [0.0, 3.0]];
    let points = embed_features(features.view(), 0.9)?;
    println!("scale factor {:.4}", points.scale_factor());

    let origin = PoincarePoint::origin(2);
    println!("  i  norm    d_hyp(0, x)  d_euc(0, x)");
    for i in 0..points.len() {
        let p = points.point(i);
        println!(
            "{i:>3}  {:.3}  {:>11.4}  {:>11.4}",
            p.norm(),
            hyperbolic_distance(&origin, &p)?,
            p.norm()
        );
    }

    // equal Euclidean steps grow in hyperbolic length toward the boundary
    let rows = points.rows();
    for (a, b) in [(0, 1), (1, 2), (2, 3)] {
        println!(
            "step {a}->{b}: euclidean {:.4}, hyperbolic {:.4}",
            euclidean_distance(rows.row(a), rows.row(b)),
            hyperbolic_distance(&points.point(a), &points.point(b))?
        );
    }

    let matrix = pairwise_distances(&points)?;
    println!("pairwise hyperbolic distances:\n{:.3}", matrix.values());
    Ok(())
}
