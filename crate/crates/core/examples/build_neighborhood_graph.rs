//! Builds relative neighborhood graphs under both metrics and the complete
//! graph on a synthetic dataset, then prints their statistics.
//!
//! cargo run --release --example build_neighborhood_graph -- [seed]

use hyperattr::dataset::{generate_synthetic, SyntheticSpec};
use hyperattr::graph::write_edge_list;
use hyperattr::pipeline::{feature_graph, PropagationConfig};
use hyperattr::{graph_stats, Metric, Topology};

fn main() -> hyperattr::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let data = generate_synthetic(&SyntheticSpec { seed, ..Default::default() })?;

    println!("graph                      edges  min  max  mean    connected  cross-class");
    for (metric, topology) in [
        (Metric::Hyperbolic, Topology::RelativeNeighborhood),
        (Metric::Euclidean, Topology::RelativeNeighborhood),
        (Metric::Hyperbolic, Topology::Complete),
    ] {
        let config = PropagationConfig { metric, topology, ..Default::default() };
        let graph = feature_graph(data.features.rows(), &config)?;
        let s = graph_stats(&graph);
        let labels = data.features.labels();
        let cross = graph.edges().iter().filter(|e| labels[e.i] != labels[e.j]).count();
        println!(
            "{:<10} {:<14} {:>6}  {:>3}  {:>3}  {:>5.2}  {:>9}  {cross:>11}",
            metric.to_string(),
            topology.to_string(),
            s.edge_count,
            s.min_degree,
            s.max_degree,
            s.mean_degree,
            s.connected
        );
    }

    let graph = feature_graph(data.features.rows(), &PropagationConfig::default())?;
    let mut head = Vec::new();
    write_edge_list(&graph, &mut head).expect("writing to memory");
    println!("\nfirst lines of the edge list:");
    for line in String::from_utf8_lossy(&head).lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
