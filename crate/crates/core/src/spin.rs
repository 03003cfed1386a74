//! Spin structures of the plumbed boundary: the mod-2 reduction moves for
//! H_1(Y; Z/2) and the enumeration of Wu sets with their characteristic
//! vectors.
//!
//! Wu sets are enumerated two ways. The authoritative method solves
//! Q x = diag(Q) over GF(2) (the characteristic condition in full); the
//! leaf-move lifting procedure is kept as an independent cross-check.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::lattice::{self, CharVector, IntersectionForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(w: i64) -> Self {
        if w.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Leaf moves on weight parities: an even leaf erases itself together with
/// its neighbour; an odd leaf erases itself and flips the neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMove {
    EvenLeaf,
    OddLeaf,
}

impl ReductionMove {
    /// 1 for the even-leaf move, 2 for the odd-leaf move.
    pub fn code(self) -> u8 {
        match self {
            ReductionMove::EvenLeaf => 1,
            ReductionMove::OddLeaf => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub mv: ReductionMove,
    /// Canonical index of the erased leaf.
    pub leaf: usize,
    /// Canonical index of its neighbour at the time of the move.
    pub neighbour: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    /// Surviving vertices with their weight parity at termination.
    pub residual: Vec<(usize, Parity)>,
    /// Residual vertex count.
    pub p: usize,
    /// Residual even-parity count = dim H_1(Y; Z/2).
    pub q: usize,
}

/// Intermediate parity-graph state used during reduction and lifting.
#[derive(Clone)]
struct ParityState {
    alive: Vec<bool>,
    parity: Vec<Parity>,
    adj: Vec<BTreeSet<usize>>,
}

impl ParityState {
    fn of(g: &PlumbingGraph) -> Self {
        let n = g.len();
        let mut adj = vec![BTreeSet::new(); n];
        for (a, b) in g.edges() {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        ParityState {
            alive: vec![true; n],
            parity: (0..n).map(|i| Parity::of(g.weight(i))).collect(),
            adj,
        }
    }

    fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    fn erase(&mut self, v: usize) {
        self.alive[v] = false;
        let nbrs: Vec<usize> = self.adj[v].iter().copied().collect();
        for w in nbrs {
            self.adj[w].remove(&v);
        }
        self.adj[v].clear();
    }

    fn has_edges(&self) -> bool {
        self.adj.iter().any(|s| !s.is_empty())
    }

    fn apply(&mut self, step: &ReductionStep) {
        match step.mv {
            ReductionMove::EvenLeaf => {
                self.erase(step.leaf);
                self.erase(step.neighbour);
            }
            ReductionMove::OddLeaf => {
                self.erase(step.leaf);
                self.parity[step.neighbour] = self.parity[step.neighbour].flip();
            }
        }
    }
}

/// Reduce the graph to an edgeless one by leaf moves, lowest canonical
/// index first, and report the residual parities. The even-parity residual
/// count q is dim H_1(Y; Z/2).
pub fn reduce_mod2(g: &PlumbingGraph) -> ReductionTrace {
    let mut state = ParityState::of(g);
    let mut steps = Vec::new();
    while state.has_edges() {
        let leaf = (0..g.len())
            .find(|&i| state.alive[i] && state.degree(i) == 1)
            .expect("a forest with an edge has a leaf");
        let neighbour = *state.adj[leaf].iter().next().unwrap();
        let mv = match state.parity[leaf] {
            Parity::Even => ReductionMove::EvenLeaf,
            Parity::Odd => ReductionMove::OddLeaf,
        };
        let step = ReductionStep { mv, leaf, neighbour };
        state.apply(&step);
        steps.push(step);
    }
    let residual: Vec<(usize, Parity)> = (0..g.len())
        .filter(|&i| state.alive[i])
        .map(|i| (i, state.parity[i]))
        .collect();
    let p = residual.len();
    let q = residual
        .iter()
        .filter(|(_, par)| *par == Parity::Even)
        .count();
    ReductionTrace {
        steps,
        residual,
        p,
        q,
    }
}

/// Replay a trace's steps against the original graph; used to check that a
/// trace is faithful.
pub fn replay_reduction(g: &PlumbingGraph, trace: &ReductionTrace) -> Vec<(usize, Parity)> {
    let mut state = ParityState::of(g);
    for step in &trace.steps {
        state.apply(step);
    }
    (0..g.len())
        .filter(|&i| state.alive[i])
        .map(|i| (i, state.parity[i]))
        .collect()
}

/// A spin structure presented by its Wu set of vertices together with the
/// induced characteristic vector c_S = Q 1_S.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WuSet {
    pub members: BTreeSet<usize>,
    pub char_vector: CharVector,
}

impl WuSet {
    pub fn ids<'g>(&self, g: &'g PlumbingGraph) -> Vec<&'g str> {
        self.members.iter().map(|&i| g.id(i)).collect()
    }
}

/// c_S = Q 1_S: the weight at members of S, the S-neighbour count
/// elsewhere. Errors when the result is not characteristic (S is then not
/// a Wu set).
pub fn wu_char_vector(
    g: &PlumbingGraph,
    q: &IntersectionForm,
    s: &BTreeSet<usize>,
) -> Result<CharVector> {
    if let Some(&bad) = s.iter().find(|&&i| i >= g.len()) {
        return Err(Error::NotWuSet(format!("vertex index {bad} out of range")));
    }
    let indicator: Vec<BigInt> = (0..g.len())
        .map(|i| BigInt::from(u8::from(s.contains(&i))))
        .collect();
    let c = CharVector(q.matrix().mul_vec(&indicator));
    if !lattice::is_characteristic(q, &c) {
        return Err(Error::NotWuSet(
            "induced vector is not characteristic".into(),
        ));
    }
    Ok(c)
}

/// Is S independent in the graph (no two members adjacent)?
pub fn is_independent(g: &PlumbingGraph, s: &BTreeSet<usize>) -> bool {
    g.edges().all(|(a, b)| !(s.contains(&a) && s.contains(&b)))
}

/// All Wu sets, by solving Q x = diag(Q) over GF(2). Exactly 2^q sets are
/// returned, sorted by indicator vector.
pub fn enumerate_wu_sets(g: &PlumbingGraph, q: &IntersectionForm) -> Result<Vec<WuSet>> {
    let n = g.len();
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|i| (0..n).map(|j| u8::from(q.entry(i, j).is_odd())).collect())
        .collect();
    let rhs: Vec<u8> = (0..n).map(|i| (g.weight(i).rem_euclid(2)) as u8).collect();
    for (i, r) in rhs.iter().enumerate() {
        rows[i].push(*r);
    }
    let solutions = gf2_solve_all(rows, n);
    let sets = solutions.expect("characteristic solutions always exist for symmetric forms");
    let mut out = Vec::with_capacity(sets.len());
    for x in sets {
        let members: BTreeSet<usize> = (0..n).filter(|&i| x[i] == 1).collect();
        let char_vector = wu_char_vector(g, q, &members)?;
        out.push(WuSet {
            members,
            char_vector,
        });
    }
    out.sort_by(|a, b| {
        let ka: Vec<u8> = (0..n).map(|i| u8::from(a.members.contains(&i))).collect();
        let kb: Vec<u8> = (0..n).map(|i| u8::from(b.members.contains(&i))).collect();
        ka.cmp(&kb)
    });
    Ok(out)
}

/// Gaussian elimination over GF(2) on an augmented system; returns every
/// solution (particular + full kernel span), or None when inconsistent.
fn gf2_solve_all(mut rows: Vec<Vec<u8>>, n: usize) -> Option<Vec<Vec<u8>>> {
    let m = rows.len();
    let mut pivot_col: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..m).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(r, pr);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] == 1 {
                for k in 0..=n {
                    row[k] ^= pivot_row[k];
                }
            }
        }
        pivot_col.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    // consistency
    for row in rows.iter().skip(r) {
        if row[..n].iter().all(|&x| x == 0) && row[n] == 1 {
            return None;
        }
    }
    let pivot_set: BTreeSet<usize> = pivot_col.iter().copied().collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();
    let mut particular = vec![0u8; n];
    for (i, &c) in pivot_col.iter().enumerate() {
        particular[c] = rows[i][n];
    }
    let mut kernel: Vec<Vec<u8>> = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![0u8; n];
        v[f] = 1;
        for (i, &c) in pivot_col.iter().enumerate() {
            v[c] = rows[i][f];
        }
        kernel.push(v);
    }
    let mut out = Vec::with_capacity(1 << kernel.len());
    for mask in 0u64..(1u64 << kernel.len()) {
        let mut x = particular.clone();
        for (b, k) in kernel.iter().enumerate() {
            if mask >> b & 1 == 1 {
                for i in 0..n {
                    x[i] ^= k[i];
                }
            }
        }
        out.push(x);
    }
    Some(out)
}

/// Wu sets by the reverse-move lifting procedure: start from the subsets of
/// the edgeless residual graph that contain every odd vertex, then undo the
/// reduction moves one at a time. Adjacency for the even-leaf rule is read
/// in the graph state at the moment the move was applied. Every lifted set
/// is validated against the characteristic condition.
pub fn enumerate_wu_sets_by_lifting(
    g: &PlumbingGraph,
    q: &IntersectionForm,
) -> Result<Vec<WuSet>> {
    let trace = reduce_mod2(g);
    // snapshot the state before each step
    let mut states: Vec<ParityState> = Vec::with_capacity(trace.steps.len());
    let mut state = ParityState::of(g);
    for step in &trace.steps {
        states.push(state.clone());
        state.apply(step);
    }
    // base subsets on the residual: all odd vertices, any subset of evens
    let odd: BTreeSet<usize> = trace
        .residual
        .iter()
        .filter(|(_, p)| *p == Parity::Odd)
        .map(|(i, _)| *i)
        .collect();
    let evens: Vec<usize> = trace
        .residual
        .iter()
        .filter(|(_, p)| *p == Parity::Even)
        .map(|(i, _)| *i)
        .collect();
    let mut families: Vec<BTreeSet<usize>> = Vec::with_capacity(1 << evens.len());
    for mask in 0u64..(1u64 << evens.len()) {
        let mut s = odd.clone();
        for (b, &v) in evens.iter().enumerate() {
            if mask >> b & 1 == 1 {
                s.insert(v);
            }
        }
        families.push(s);
    }
    // undo moves, last first
    for (step, before) in trace.steps.iter().zip(&states).rev() {
        for s in &mut families {
            match step.mv {
                ReductionMove::OddLeaf => {
                    if !s.contains(&step.neighbour) {
                        s.insert(step.leaf);
                    }
                }
                ReductionMove::EvenLeaf => {
                    let count = before.adj[step.neighbour]
                        .iter()
                        .filter(|u| s.contains(u))
                        .count();
                    let w_parity = before.parity[step.neighbour];
                    if Parity::of(count as i64) != w_parity {
                        s.insert(step.leaf);
                    }
                }
            }
        }
    }
    let mut out = Vec::with_capacity(families.len());
    for members in families {
        let char_vector = wu_char_vector(g, q, &members)?;
        out.push(WuSet {
            members,
            char_vector,
        });
    }
    let n = g.len();
    out.sort_by(|a, b| {
        let ka: Vec<u8> = (0..n).map(|i| u8::from(a.members.contains(&i))).collect();
        let kb: Vec<u8> = (0..n).map(|i| u8::from(b.members.contains(&i))).collect();
        ka.cmp(&kb)
    });
    out.dedup();
    Ok(out)
}
