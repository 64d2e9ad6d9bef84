//! Reference implementations used as independent oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points of dimension `d` uniformly in a box, scaled so every point
/// sits strictly inside the unit ball.
pub fn random_ball_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Array2<f64> {
    let limit = 0.95 / (d as f64).sqrt();
    Array2::from_shape_fn((n, d), |_| rng.random_range(-limit..limit))
}

/// Straight triple loop over the relative neighborhood condition.
pub fn rng_oracle(d: ArrayView2<'_, f64>) -> BTreeSet<(usize, usize)> {
    let n = d.nrows();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut keep = true;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if d[[i, j]] > d[[i, k]].max(d[[j, k]]) {
                    keep = false;
                    break;
                }
            }
            if keep {
                edges.insert((i, j));
            }
        }
    }
    edges
}

/// Prim's algorithm on a dense matrix.
pub fn mst_oracle(d: ArrayView2<'_, f64>) -> BTreeSet<(usize, usize)> {
    let n = d.nrows();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    best[0] = 0.0;
    let mut edges = BTreeSet::new();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap())
            .unwrap();
        in_tree[v] = true;
        if parent[v] != usize::MAX {
            let p = parent[v];
            edges.insert((p.min(v), p.max(v)));
        }
        for u in 0..n {
            if !in_tree[u] && d[[v, u]] < best[u] {
                best[u] = d[[v, u]];
                parent[u] = v;
            }
        }
    }
    edges
}

/// Plain Euclidean distance matrix.
pub fn euclidean_matrix(points: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = points.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let diff = &points.row(i) - &points.row(j);
        diff.dot(&diff).sqrt()
    })
}

/// Hyperbolic distance straight from the arcosh formula.
pub fn hyperbolic_oracle(a: &[f64], b: &[f64]) -> f64 {
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    (1.0 + 2.0 * sq(&diff) / ((1.0 - sq(a)) * (1.0 - sq(b)))).acosh()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(m: &Array2<f64>) -> Array2<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[[r, col]].abs().partial_cmp(&a[[s, col]].abs()).unwrap())
            .unwrap();
        for k in 0..n {
            a.swap([col, k], [pivot, k]);
            inv.swap([col, k], [pivot, k]);
        }
        let p = a[[col, col]];
        for k in 0..n {
            a[[col, k]] /= p;
            inv[[col, k]] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[[r, col]];
                for k in 0..n {
                    a[[r, k]] -= f * a[[col, k]];
                    inv[[r, k]] -= f * inv[[col, k]];
                }
            }
        }
    }
    inv
}

/// `W = A X (X^T X + lambda I)^-1` via an explicit inverse.
pub fn ridge_oracle(x: &Array2<f64>, targets: &Array2<f64>, lambda: f64) -> Array2<f64> {
    let d = x.ncols();
    let gram = x.t().dot(x) + Array2::<f64>::eye(d) * lambda;
    targets.dot(x).dot(&invert(&gram))
}

pub fn random_binary(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<u8> {
    Array2::from_shape_fn((rows, cols), |_| u8::from(rng.random::<bool>()))
}

/// Proptest settings without on-disk regression files.
pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases: n,
        failure_persistence: None,
        ..Default::default()
    }
}
