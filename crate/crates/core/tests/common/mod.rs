#![allow(dead_code)]

use lapsep::Graph;
use rand::Rng;

pub fn fixture(name: &str) -> Vec<String> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{path}: {e}"))
        .lines()
        .map(str::to_string)
        .collect()
}

pub fn fixture_graphs(name: &str) -> Vec<Graph> {
    fixture(name).iter().map(|l| Graph::from_graph6(l).unwrap()).collect()
}

/// G(n, p) with p drawn from [lo, hi].
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Graph {
    let p = rng.gen_range(lo..=hi);
    let mut g = Graph::empty(n).unwrap();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Random graph with at least one edge and at least one non-edge.
pub fn random_noncomplete<R: Rng>(rng: &mut R, n: usize) -> Graph {
    loop {
        let g = random_graph(rng, n, 0.1, 0.95);
        if g.has_edges() && !g.is_complete() {
            return g;
        }
    }
}

pub fn random_nonempty<R: Rng>(rng: &mut R, n: usize) -> Graph {
    loop {
        let g = random_graph(rng, n, 0.05, 1.0);
        if g.has_edges() {
            return g;
        }
    }
}
