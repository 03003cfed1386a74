//! Seed-reproducible generation of candidate plumbing trees for corpus
//! verification: random labeled trees with weights drawn subject to the
//! weight-plus-degree bound, optionally filtered to negative-definite
//! rational graphs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::lattice;
use crate::rationality;

#[derive(Debug, Clone)]
pub struct GeneratorParams {
    pub max_vertices: usize,
    /// Most negative weight to draw; must be -2 or below.
    pub weight_min: i64,
    pub seed: u64,
    pub count: usize,
    /// Keep only graphs that are negative definite and Laufer-rational.
    pub require_rational: bool,
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.weight_min > -2 {
            return Err(Error::InvalidParams(format!(
                "weight_min must be -2 or below, got {}",
                self.weight_min
            )));
        }
        if self.max_vertices == 0 {
            return Err(Error::InvalidParams("max_vertices must be positive".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidParams("count must be positive".into()));
        }
        Ok(())
    }
}

/// Deterministic candidate stream. Identical parameters (seed included)
/// always produce the identical sequence of graphs.
pub struct CandidateStream {
    params: GeneratorParams,
    rng: ChaCha8Rng,
    emitted: usize,
    attempts: u64,
}

impl CandidateStream {
    /// Total trees drawn so far, including rejected ones; progress
    /// diagnostics for callers on slow parameter sets.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }
}

pub fn generate_candidates(params: &GeneratorParams) -> Result<CandidateStream> {
    params.validate()?;
    Ok(CandidateStream {
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        params: params.clone(),
        emitted: 0,
        attempts: 0,
    })
}

impl Iterator for CandidateStream {
    type Item = PlumbingGraph;

    fn next(&mut self) -> Option<PlumbingGraph> {
        if self.emitted >= self.params.count {
            return None;
        }
        loop {
            self.attempts += 1;
            let Some(g) = draw_tree(&mut self.rng, &self.params) else {
                continue;
            };
            if self.params.require_rational {
                let q = lattice::build_intersection_form(&g);
                if !lattice::is_negative_definite(&q) {
                    continue;
                }
                match rationality::laufer_rationality(&g) {
                    Ok(t) if t.is_rational() => {}
                    _ => continue,
                }
            }
            self.emitted += 1;
            return Some(g);
        }
    }
}

/// One random labeled tree with weights; None when the degree sequence
/// leaves some vertex without a feasible weight.
fn draw_tree(rng: &mut ChaCha8Rng, params: &GeneratorParams) -> Option<PlumbingGraph> {
    let n = rng.gen_range(1..=params.max_vertices);
    let edges: Vec<(usize, usize)> = if n <= 1 {
        Vec::new()
    } else if n == 2 {
        vec![(0, 1)]
    } else {
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        prufer_decode(&seq, n)
    };
    let mut degree = vec![0usize; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut vertices = Vec::with_capacity(n);
    for (i, &d) in degree.iter().enumerate() {
        // weight w must satisfy w <= -2 and w + degree <= 1
        let upper = (-2i64).min(1 - d as i64);
        if upper < params.weight_min {
            return None;
        }
        let w = rng.gen_range(params.weight_min..=upper);
        vertices.push((format!("v{}", i + 1), w));
    }
    let named: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (format!("v{}", a + 1), format!("v{}", b + 1)))
        .collect();
    Some(PlumbingGraph::new(vertices, &named).expect("generated trees are valid"))
}

/// Standard Prüfer decoding: a sequence of length n-2 over {0..n-1} gives a
/// labeled tree on n vertices.
fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&i| degree[i] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().expect("prufer invariant");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
        if degree[s] == 1 {
            leaf_heap.push(std::cmp::Reverse(s));
        }
    }
    let mut last: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    debug_assert_eq!(last.len(), 2);
    let (a, b) = (last.remove(0), last.remove(0));
    edges.push((a.min(b), a.max(b)));
    edges
}
