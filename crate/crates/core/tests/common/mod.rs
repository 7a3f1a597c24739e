//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use graphconfig_core::{rat, rat_int};
use graphconfig_core::{AffineRhs, MetricGraph, ParametricPolytope, Rational, Restraints};
use rand::Rng;

/// The fixed graphs every graph-quantified check runs over.
pub fn test_graphs() -> Vec<(&'static str, MetricGraph)> {
    vec![
        ("single-edge", MetricGraph::parse("a b 1\n").unwrap()),
        (
            "three-star",
            MetricGraph::parse("h v1 1\nh v2 1\nh v3 1\n").unwrap(),
        ),
        (
            "triangle",
            MetricGraph::parse("a b 2\na c 1/2\nc b 1/2\n").unwrap(),
        ),
        (
            "parallel",
            MetricGraph::parse("a b 1\na b 3\nb c 2\n").unwrap(),
        ),
        ("corolla-2", MetricGraph::corolla(2).unwrap()),
        ("corolla-3", MetricGraph::corolla(3).unwrap()),
    ]
}

/// A connected random graph with at most `max_edges` edges; loops are
/// allowed on input (they subdivide away).
pub fn random_graph<R: Rng>(rng: &mut R, max_edges: usize) -> MetricGraph {
    loop {
        let target = rng.gen_range(2..=max_edges);
        let nodes = rng.gen_range(2..=target + 1);
        let names: Vec<String> = (0..nodes).map(|i| format!("w{i}")).collect();
        let mut list: Vec<(String, String, Rational)> = Vec::new();
        let len = |rng: &mut R| rat(rng.gen_range(1..=6), rng.gen_range(1..=4));
        // spanning tree first
        for v in 1..nodes {
            let u = rng.gen_range(0..v);
            list.push((names[u].clone(), names[v].clone(), len(rng)));
        }
        while list.len() < target {
            let u = rng.gen_range(0..nodes);
            // small chance of a loop, which the parser subdivides into two
            // edges; keep the final count within bounds
            let v = if rng.gen_ratio(1, 8) {
                u
            } else {
                rng.gen_range(0..nodes)
            };
            if u == v && list.len() + 2 > max_edges {
                continue;
            }
            list.push((names[u].clone(), names[v].clone(), len(rng)));
        }
        if let Ok(g) = MetricGraph::from_named_edges(&list) {
            if g.edge_count() <= max_edges {
                return g;
            }
        }
    }
}

/// A random bounded parametric system: a box plus extra rows of the
/// two-variable forms, with right hand sides affine in `pairs` restraint
/// components.
pub fn random_system<R: Rng>(
    rng: &mut R,
    dim: usize,
    pairs: usize,
    extra_rows: usize,
) -> ParametricPolytope {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..dim {
        let mut lo = vec![0i64; dim];
        lo[i] = -1;
        labels.push(format!("B^{i}_lo"));
        rows.push(lo);
        rhs.push(AffineRhs::constant(rat_int(0)));
        let mut hi = vec![0i64; dim];
        hi[i] = 1;
        labels.push(format!("B^{i}_hi"));
        rows.push(hi);
        rhs.push(AffineRhs::constant(rat(
            rng.gen_range(1..=4),
            rng.gen_range(1..=2),
        )));
    }
    for k in 0..extra_rows {
        let mut row = vec![0i64; dim];
        let i = rng.gen_range(0..dim);
        row[i] = if rng.gen_bool(0.5) { 1 } else { -1 };
        if dim > 1 && rng.gen_bool(0.7) {
            let mut j = rng.gen_range(0..dim);
            while j == i {
                j = rng.gen_range(0..dim);
            }
            row[j] = if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        let constant = rat(rng.gen_range(0..=5), rng.gen_range(1..=2));
        let b = if pairs > 0 && rng.gen_bool(0.8) {
            AffineRhs::with_pair(constant, rng.gen_range(0..pairs), -1)
        } else {
            AffineRhs::constant(constant)
        };
        labels.push(format!("X^{k}"));
        rows.push(row);
        rhs.push(b);
    }
    ParametricPolytope::new(dim, labels, rows, rhs).unwrap()
}

pub fn random_restraints<R: Rng>(rng: &mut R, pairs: usize) -> Restraints {
    Restraints::new(
        (0..pairs)
            .map(|_| rat(rng.gen_range(0..=8), rng.gen_range(1..=4)))
            .collect(),
    )
    .unwrap()
}
