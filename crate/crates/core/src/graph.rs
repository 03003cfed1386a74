//! Weighted plumbing forests: the data model, the plumb text format, and
//! the graph-level moves (blow-down normalization, framing reduction,
//! disjoint union with an extra (-2)-vertex).
//!
//! Vertices carry string ids and signed integer weights. The declaration
//! order is canonical and fixes every matrix indexing downstream. Each
//! connected component must be a tree; forests are accepted everywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    vertices: Vec<Vertex>,
    /// Canonical index pairs with i < j.
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    index: BTreeMap<String, usize>,
}

impl PlumbingGraph {
    pub fn empty() -> Self {
        PlumbingGraph {
            vertices: Vec::new(),
            edges: BTreeSet::new(),
            adj: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    /// Build and validate a graph from (id, weight) pairs in declaration
    /// order plus edges named by id.
    pub fn new(vertices: Vec<(String, i64)>, edges: &[(String, String)]) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut vs = Vec::with_capacity(vertices.len());
        for (i, (id, weight)) in vertices.into_iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id));
            }
            vs.push(Vertex { id, weight });
        }
        let mut g = PlumbingGraph {
            vertices: vs,
            edges: BTreeSet::new(),
            adj: Vec::new(),
            index,
        };
        let mut dsu = Dsu::new(g.vertices.len());
        for (a, b) in edges {
            let ia = *g.index.get(a).ok_or_else(|| Error::UnknownId(a.clone()))?;
            let ib = *g.index.get(b).ok_or_else(|| Error::UnknownId(b.clone()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a.clone()));
            }
            let key = (ia.min(ib), ia.max(ib));
            if !g.edges.insert(key) {
                return Err(Error::ParallelEdge(a.clone(), b.clone()));
            }
            if !dsu.union(ia, ib) {
                return Err(Error::Cycle(a.clone(), b.clone()));
            }
        }
        g.rebuild_adjacency();
        Ok(g)
    }

    fn rebuild_adjacency(&mut self) {
        self.adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.vertices[i].weight
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Connected components as sorted lists of canonical indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.len());
        for &(a, b) in &self.edges {
            dsu.union(a, b);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.len() {
            groups.entry(dsu.find(i)).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Canonical plumb serialization: one vertices line, one edges line,
    /// ids in declaration order, edges sorted by canonical index pair.
    pub fn to_plumb(&self) -> String {
        let mut out = String::from("vertices:");
        for v in &self.vertices {
            out.push_str(&format!(" {}:{}", v.id, v.weight));
        }
        out.push_str("\nedges:");
        for &(a, b) in &self.edges {
            out.push_str(&format!(" {}-{}", self.vertices[a].id, self.vertices[b].id));
        }
        out.push('\n');
        out
    }

    /// Parse the plumb text format. Lines are `vertices: id:w ...` followed
    /// by `edges: a-b ...`, both cumulative; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices: Vec<(String, i64)> = Vec::new();
        let mut edges: Vec<(String, String, usize)> = Vec::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut in_edges = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = raw.split('#').next().unwrap_or("");
            let mut tokens = body.split_whitespace();
            let Some(head) = tokens.next() else { continue };
            match head {
                "vertices:" => {
                    if in_edges {
                        return Err(Error::Parse {
                            line,
                            msg: "vertices line after edges line".into(),
                        });
                    }
                    for tok in tokens {
                        let (id, w) = tok.split_once(':').ok_or_else(|| Error::Parse {
                            line,
                            msg: format!("expected id:weight, got `{tok}`"),
                        })?;
                        validate_id(id, line)?;
                        let weight: i64 = w.parse().map_err(|_| Error::Parse {
                            line,
                            msg: format!("invalid weight `{w}` for vertex `{id}`"),
                        })?;
                        if seen.insert(id.to_string(), line).is_some() {
                            return Err(Error::Parse {
                                line,
                                msg: format!("duplicate vertex id `{id}`"),
                            });
                        }
                        vertices.push((id.to_string(), weight));
                    }
                }
                "edges:" => {
                    in_edges = true;
                    for tok in tokens {
                        let (a, b) = tok.split_once('-').ok_or_else(|| Error::Parse {
                            line,
                            msg: format!("expected id-id, got `{tok}`"),
                        })?;
                        if a.is_empty() || b.is_empty() {
                            return Err(Error::Parse {
                                line,
                                msg: format!("expected id-id, got `{tok}`"),
                            });
                        }
                        edges.push((a.to_string(), b.to_string(), line));
                    }
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected `vertices:` or `edges:`, got `{other}`"),
                    });
                }
            }
        }
        let plain: Vec<(String, String)> = edges
            .iter()
            .map(|(a, b, _)| (a.clone(), b.clone()))
            .collect();
        PlumbingGraph::new(vertices, &plain).map_err(|e| match e {
            // annotate structural errors with the offending edge's line
            Error::UnknownId(id) => {
                let line = edges
                    .iter()
                    .find(|(a, b, _)| *a == id || *b == id)
                    .map(|t| t.2)
                    .unwrap_or(0);
                Error::Parse {
                    line,
                    msg: format!("unknown vertex id `{id}` in edge"),
                }
            }
            Error::SelfLoop(id) => {
                let line = edges
                    .iter()
                    .find(|(a, b, _)| *a == id && *b == id)
                    .map(|t| t.2)
                    .unwrap_or(0);
                Error::Parse {
                    line,
                    msg: format!("self-loop at `{id}`"),
                }
            }
            Error::ParallelEdge(a, b) => {
                let line = edges
                    .iter()
                    .rev()
                    .find(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a))
                    .map(|t| t.2)
                    .unwrap_or(0);
                Error::Parse {
                    line,
                    msg: format!("parallel edge {a}-{b}"),
                }
            }
            Error::Cycle(a, b) => {
                let line = edges
                    .iter()
                    .find(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a))
                    .map(|t| t.2)
                    .unwrap_or(0);
                Error::Parse {
                    line,
                    msg: format!("edge {a}-{b} closes a cycle"),
                }
            }
            other => other,
        })
    }
}

impl fmt::Display for PlumbingGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plumb())
    }
}

fn validate_id(id: &str, line: usize) -> Result<()> {
    if id.is_empty() {
        return Err(Error::Parse {
            line,
            msg: "empty vertex id".into(),
        });
    }
    if id.contains([':', '-', '#']) {
        return Err(Error::Parse {
            line,
            msg: format!("vertex id `{id}` contains a reserved character"),
        });
    }
    Ok(())
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when x and y were already connected.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx] = ry;
        true
    }
}

/// Repeatedly blow down (-1)-vertices of degree <= 2 until none remain.
/// Degree 0: delete. Degree 1: delete, add +1 to the neighbour. Degree 2:
/// delete, add +1 to both neighbours, join them by an edge. The boundary
/// 3-manifold is unchanged. A (-1)-vertex that never drops below degree 3
/// blocks the normalization and is reported as an error.
pub fn blow_down_normalize(g: &PlumbingGraph) -> Result<PlumbingGraph> {
    let mut current = g.clone();
    loop {
        let minus_ones: Vec<usize> = (0..current.len())
            .filter(|&i| current.weight(i) == -1)
            .collect();
        if minus_ones.is_empty() {
            return Ok(current);
        }
        let target = minus_ones.iter().copied().find(|&i| current.degree(i) <= 2);
        let Some(v) = target else {
            let worst = minus_ones[0];
            return Err(Error::BlowDownObstructed {
                id: current.id(worst).to_string(),
                degree: current.degree(worst),
            });
        };
        let nbrs: Vec<usize> = current.neighbours(v).to_vec();
        let mut vertices: Vec<(String, i64)> = Vec::with_capacity(current.len() - 1);
        let mut remap = vec![usize::MAX; current.len()];
        for i in 0..current.len() {
            if i == v {
                continue;
            }
            let mut w = current.weight(i);
            if nbrs.contains(&i) {
                w += 1;
            }
            remap[i] = vertices.len();
            vertices.push((current.id(i).to_string(), w));
        }
        let mut edges: Vec<(String, String)> = Vec::new();
        for (a, b) in current.edges() {
            if a == v || b == v {
                continue;
            }
            edges.push((current.id(a).to_string(), current.id(b).to_string()));
        }
        if nbrs.len() == 2 {
            edges.push((
                current.id(nbrs[0]).to_string(),
                current.id(nbrs[1]).to_string(),
            ));
        }
        current = PlumbingGraph::new(vertices, &edges)?;
    }
}

/// Decrease the framing of `v` by 2 while carrying the vertex set `wu`
/// along unchanged. Requires `v` outside the set with an S-neighbour count
/// that matches the weight in parity and does not exceed -weight; this
/// keeps the carried class characteristic for the new form.
pub fn framing_reduction_step(
    g: &PlumbingGraph,
    wu: &BTreeSet<usize>,
    v: usize,
) -> Result<(PlumbingGraph, BTreeSet<usize>)> {
    if v >= g.len() {
        return Err(Error::FramingPrecondition(format!(
            "vertex index {v} out of range"
        )));
    }
    if wu.contains(&v) {
        return Err(Error::FramingPrecondition(format!(
            "vertex `{}` lies in the Wu set",
            g.id(v)
        )));
    }
    let in_set = g.neighbours(v).iter().filter(|n| wu.contains(n)).count() as i64;
    let w = g.weight(v);
    if in_set % 2 != w.rem_euclid(2) {
        return Err(Error::FramingPrecondition(format!(
            "vertex `{}` has {} set neighbours, parity mismatch with weight {}",
            g.id(v),
            in_set,
            w
        )));
    }
    if in_set > -w {
        return Err(Error::FramingPrecondition(format!(
            "vertex `{}` has {} set neighbours, more than {}",
            g.id(v),
            in_set,
            -w
        )));
    }
    let vertices: Vec<(String, i64)> = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, vx)| {
            let w = if i == v { vx.weight - 2 } else { vx.weight };
            (vx.id.clone(), w)
        })
        .collect();
    let edges: Vec<(String, String)> = g
        .edges()
        .map(|(a, b)| (g.id(a).to_string(), g.id(b).to_string()))
        .collect();
    Ok((PlumbingGraph::new(vertices, &edges)?, wu.clone()))
}

/// Disjoint union with a fresh isolated (-2)-vertex, adding it to the
/// carried vertex set. The boundary gains an RP^3 connected summand.
pub fn disjoint_union_with_rp3(
    g: &PlumbingGraph,
    wu: &BTreeSet<usize>,
) -> (PlumbingGraph, BTreeSet<usize>) {
    let mut fresh = String::from("w");
    let mut k = 0u32;
    while g.index_of(&fresh).is_some() {
        k += 1;
        fresh = format!("w{k}");
    }
    let mut vertices: Vec<(String, i64)> = g
        .vertices()
        .iter()
        .map(|v| (v.id.clone(), v.weight))
        .collect();
    vertices.push((fresh, -2));
    let edges: Vec<(String, String)> = g
        .edges()
        .map(|(a, b)| (g.id(a).to_string(), g.id(b).to_string()))
        .collect();
    let out = PlumbingGraph::new(vertices, &edges).expect("adding an isolated vertex is valid");
    let mut set = wu.clone();
    set.insert(out.len() - 1);
    (out, set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> PlumbingGraph {
        PlumbingGraph::parse(s).unwrap()
    }

    #[test]
    fn parse_single_vertex() {
        let g = parse("vertices: a:-2\nedges:");
        assert_eq!(g.len(), 1);
        assert_eq!(g.weight(0), -2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_two_vertex_chain() {
        let g = parse("vertices: a:-2 b:-2\nedges: a-b");
        assert_eq!(g.len(), 2);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn parse_rejects_parallel_edge() {
        let err = PlumbingGraph::parse("vertices: a:-2 b:-2\nedges: a-b b-a").unwrap_err();
        assert!(err.to_string().contains("parallel edge"), "{err}");
    }

    #[test]
    fn parse_rejects_duplicate_id() {
        let err = PlumbingGraph::parse("vertices: a:-2 a:-3\nedges:").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn parse_rejects_unknown_id() {
        let err = PlumbingGraph::parse("vertices: a:-2\nedges: a-b").unwrap_err();
        assert!(err.to_string().contains("unknown vertex id `b`"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn parse_rejects_cycle_and_self_loop() {
        let err =
            PlumbingGraph::parse("vertices: a:-2 b:-2 c:-2\nedges: a-b b-c c-a").unwrap_err();
        assert!(err.to_string().contains("cycle"), "{err}");
        let err = PlumbingGraph::parse("vertices: a:-2\nedges: a-a").unwrap_err();
        assert!(err.to_string().contains("self-loop"), "{err}");
    }

    #[test]
    fn parse_rejects_vertices_after_edges() {
        let err = PlumbingGraph::parse("vertices: a:-2\nedges:\nvertices: b:-2").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn parse_rejects_bad_weight_and_bad_token() {
        assert!(PlumbingGraph::parse("vertices: a:x\nedges:").is_err());
        assert!(PlumbingGraph::parse("vertices: a\nedges:").is_err());
        assert!(PlumbingGraph::parse("nonsense: a:-2").is_err());
    }

    #[test]
    fn comments_and_multiline_accumulate() {
        let g = parse("# a chain\nvertices: a:-2 # one\nvertices: b:-3\nedges: a-b # tail\n");
        assert_eq!(g.len(), 2);
        assert_eq!(g.weight(1), -3);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn serialize_then_parse_roundtrip() {
        let g = parse("vertices: a:-2 b:-2 c:-7\nedges: b-c a-b");
        let text = g.to_plumb();
        let h = parse(&text);
        assert_eq!(g, h);
        assert_eq!(text, h.to_plumb());
        let empty = PlumbingGraph::empty();
        assert_eq!(empty, parse(&empty.to_plumb()));
    }

    #[test]
    fn blow_down_isolated_minus_one() {
        let g = parse("vertices: a:-1\nedges:");
        let out = blow_down_normalize(&g).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn blow_down_degree_one() {
        let g = parse("vertices: a:-1 b:-3\nedges: a-b");
        let out = blow_down_normalize(&g).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.id(0), "b");
        assert_eq!(out.weight(0), -2);
    }

    #[test]
    fn blow_down_degree_two() {
        let g = parse("vertices: a:-3 b:-1 c:-3\nedges: a-b b-c");
        let out = blow_down_normalize(&g).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.weight(0), -2);
        assert_eq!(out.weight(1), -2);
        assert!(out.has_edge(0, 1));
    }

    #[test]
    fn blow_down_cascades() {
        // blowing down b turns a into a (-1), which then disappears
        let g = parse("vertices: a:-2 b:-1\nedges: a-b");
        let out = blow_down_normalize(&g).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn blow_down_refuses_degree_three() {
        let g = parse("vertices: c:-1 a:-2 b:-3 d:-7\nedges: c-a c-b c-d");
        let err = blow_down_normalize(&g).unwrap_err();
        assert!(matches!(err, Error::BlowDownObstructed { degree: 3, .. }));
    }

    #[test]
    fn framing_reduction_on_a3_chain() {
        let g = parse("vertices: a:-2 c:-2 b:-2\nedges: a-c c-b");
        let s: BTreeSet<usize> = [0, 2].into_iter().collect();
        let (g2, s2) = framing_reduction_step(&g, &s, 1).unwrap();
        assert_eq!(g2.weight(1), -4);
        assert_eq!(s2, s);
        // second application at the same vertex is still legal
        let (g3, s3) = framing_reduction_step(&g2, &s2, 1).unwrap();
        assert_eq!(g3.weight(1), -6);
        assert_eq!(s3, s);
    }

    #[test]
    fn framing_reduction_rejects_member_vertex() {
        let g = parse("vertices: v:-2\nedges:");
        let s: BTreeSet<usize> = [0].into_iter().collect();
        assert!(framing_reduction_step(&g, &s, 0).is_err());
    }

    #[test]
    fn framing_reduction_rejects_parity_mismatch() {
        // one set neighbour vs even weight
        let g = parse("vertices: a:-2 b:-2\nedges: a-b");
        let s: BTreeSet<usize> = [0].into_iter().collect();
        assert!(framing_reduction_step(&g, &s, 1).is_err());
    }

    #[test]
    fn disjoint_union_adds_isolated_vertex() {
        let (g1, s1) = disjoint_union_with_rp3(&PlumbingGraph::empty(), &BTreeSet::new());
        assert_eq!(g1.len(), 1);
        assert_eq!(g1.weight(0), -2);
        assert_eq!(s1, [0].into_iter().collect());

        let g = parse("vertices: a:-2 b:-2\nedges: a-b");
        let (g2, s2) = disjoint_union_with_rp3(&g, &BTreeSet::new());
        assert_eq!(g2.len(), 3);
        assert_eq!(g2.degree(2), 0);
        assert_eq!(s2, [2].into_iter().collect());
        assert_eq!(g2.components().len(), 2);
    }

    #[test]
    fn fresh_id_avoids_collision() {
        let g = parse("vertices: w:-2\nedges:");
        let (g2, _) = disjoint_union_with_rp3(&g, &BTreeSet::new());
        assert_eq!(g2.id(1), "w1");
    }
}
