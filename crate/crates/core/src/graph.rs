//! Graph types, constructions and example families.
//!
//! Vertex numbering is part of the contract: every construction documents
//! where each input vertex lands so that golden values stay stable.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<bool>>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `(min, max)` and sorting.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
        }
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &set {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Ok(Graph { n, edges: set.into_iter().collect(), adj })
    }

    fn from_adj(adj: Vec<Vec<bool>>) -> Self {
        let n = adj.len();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if adj[u][v] {
                    edges.push((u, v));
                }
            }
        }
        Graph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.adj[v][u])
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| if self.adj[i][j] { 1.0 } else { 0.0 })
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                self.degree(i) as f64
            } else if self.adj[i][j] {
                -1.0
            } else {
                0.0
            }
        })
    }

    pub fn complement(&self) -> Graph {
        let adj = (0..self.n)
            .map(|u| (0..self.n).map(|v| u != v && !self.adj[u][v]).collect())
            .collect();
        Graph::from_adj(adj)
    }

    /// `G ⊕ H`: vertices of `h` are shifted by `self.n()`.
    pub fn disjoint_union(&self, h: &Graph) -> Graph {
        let off = self.n;
        let edges = self.edges.iter().copied().chain(h.edges.iter().map(|&(u, v)| (u + off, v + off)));
        Graph::new(self.n + h.n, edges).expect("union of valid graphs")
    }

    /// `G ⋈ H`: disjoint union plus every edge between the two vertex sets.
    pub fn join(&self, h: &Graph) -> Graph {
        let mut adj = self.disjoint_union(h).adj;
        for u in 0..self.n {
            for v in self.n..self.n + h.n {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
        Graph::from_adj(adj)
    }

    /// Replaces vertex `v` by the clique `{k v, ..., k v + k - 1}` and every edge
    /// by a complete bipartite graph between the two cliques.
    pub fn expansion(&self, k: usize) -> Result<Graph, Error> {
        if k == 0 {
            return Err(Error::InvalidParameter("expansion factor must be at least 1".into()));
        }
        let n = self.n * k;
        let adj = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| a != b && (a / k == b / k || self.adj[a / k][b / k]))
                    .collect()
            })
            .collect();
        Ok(Graph::from_adj(adj))
    }

    /// Whether `set` is a clique.
    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| self.adj[u][v]))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.adj[u][v]))
    }

    /// Two-colouring with parts listed in increasing order, if one exists.
    /// Each connected component puts its smallest vertex in part 1.
    pub fn bipartition(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut color = vec![usize::MAX; self.n];
        for s in 0..self.n {
            if color[s] != usize::MAX {
                continue;
            }
            color[s] = 0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in self.neighbors(u).collect::<Vec<_>>() {
                    if color[v] == usize::MAX {
                        color[v] = 1 - color[u];
                        stack.push(v);
                    } else if color[v] == color[u] {
                        return None;
                    }
                }
            }
        }
        let a = (0..self.n).filter(|&v| color[v] == 0).collect();
        let b = (0..self.n).filter(|&v| color[v] == 1).collect();
        Some((a, b))
    }

    /// Bipartite view with the given parts (in the listed order).
    pub fn as_bipartite_with(&self, part1: &[usize], part2: &[usize]) -> Result<BipartiteGraph, Error> {
        if part1.len() + part2.len() != self.n {
            return Err(Error::InvalidGraph("parts do not cover the vertex set".into()));
        }
        let mut pos = vec![None; self.n];
        for (i, &v) in part1.iter().enumerate() {
            pos[v] = Some((0, i));
        }
        for (j, &v) in part2.iter().enumerate() {
            if pos[v].is_some() {
                return Err(Error::InvalidGraph(format!("vertex {v} in both parts")));
            }
            pos[v] = Some((1, j));
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            match (pos[u], pos[v]) {
                (Some((0, i)), Some((1, j))) => edges.push((i, j)),
                (Some((1, j)), Some((0, i))) => edges.push((i, j)),
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidGraph(format!("edge ({u},{v}) inside a part")));
                }
                _ => return Err(Error::InvalidGraph("parts do not cover the vertex set".into())),
            }
        }
        BipartiteGraph::new(part1.len(), part2.len(), edges)
    }

    /// Bipartite view from [`Graph::bipartition`].
    pub fn as_bipartite(&self) -> Result<BipartiteGraph, Error> {
        let (a, b) = self
            .bipartition()
            .ok_or_else(|| Error::InvalidGraph("graph is not bipartite".into()))?;
        self.as_bipartite_with(&a, &b)
    }

    /// Short stable fingerprint of the vertex count and edge list.
    pub fn digest(&self) -> String {
        digest_of(b'g', self.n, 0, &self.edges)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edges.len())
    }
}

fn digest_of(tag: u8, a: usize, b: usize, edges: &[(usize, usize)]) -> String {
    // FNV-1a over a canonical byte encoding.
    let mut h: u64 = 0xcbf29ce484222325;
    let mut feed = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    feed(tag as u64);
    feed(a as u64);
    feed(b as u64);
    for &(u, v) in edges {
        feed(u as u64);
        feed(v as u64);
    }
    format!("{h:016x}")
}

/// Bipartite graph with parts `0..n1` and `0..n2`; edges are `(i, j)` with
/// `i` in part 1 and `j` in part 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    n1: usize,
    n2: usize,
    edges: Vec<(usize, usize)>,
    bi: Vec<Vec<bool>>,
}

impl BipartiteGraph {
    pub fn new(n1: usize, n2: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n1 || j >= n2 {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range for parts {n1}/{n2}")));
            }
            if !set.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i},{j})")));
            }
        }
        let mut bi = vec![vec![false; n2]; n1];
        for &(i, j) in &set {
            bi[i][j] = true;
        }
        Ok(BipartiteGraph { n1, n2, edges: set.into_iter().collect(), bi })
    }

    fn from_bi(bi: Vec<Vec<bool>>, n2: usize) -> Self {
        let n1 = bi.len();
        let edges = (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .filter(|&(i, j)| bi[i][j])
            .collect();
        BipartiteGraph { n1, n2, edges, bi }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bi[i][j]
    }

    pub fn is_balanced(&self) -> bool {
        self.n1 == self.n2
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n1 * self.n2
    }

    /// Common degree if every vertex on both sides has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg1: Vec<usize> = (0..self.n1).map(|i| self.bi[i].iter().filter(|&&b| b).count()).collect();
        let deg2: Vec<usize> = (0..self.n2).map(|j| (0..self.n1).filter(|&i| self.bi[i][j]).count()).collect();
        let d = deg1.first().or(deg2.first()).copied().unwrap_or(0);
        deg1.iter().chain(&deg2).all(|&x| x == d).then_some(d)
    }

    /// `n1 x n2` biadjacency matrix `M_G`.
    pub fn biadjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n1, self.n2, |i, j| if self.bi[i][j] { 1.0 } else { 0.0 })
    }

    /// General graph on `n1 + n2` vertices; part-2 vertex `j` becomes `n1 + j`.
    pub fn flatten(&self) -> Graph {
        Graph::new(self.n(), self.edges.iter().map(|&(i, j)| (i, self.n1 + j))).expect("valid flattening")
    }

    /// Complement inside `V1 x V2`.
    pub fn bipartite_complement(&self) -> BipartiteGraph {
        let bi = self.bi.iter().map(|row| row.iter().map(|b| !b).collect()).collect();
        BipartiteGraph::from_bi(bi, self.n2)
    }

    /// Sign vector `f = χ^{V1} - χ^{V2}` in flattened order.
    pub fn sign_vector(&self) -> Vec<f64> {
        (0..self.n()).map(|v| if v < self.n1 { 1.0 } else { -1.0 }).collect()
    }

    /// `C = ½ [[0, J], [J, 0]]` in flattened order, so `x'Cx = x(V1) x(V2)`.
    pub fn objective_matrix(&self) -> DMatrix<f64> {
        let n1 = self.n1;
        DMatrix::from_fn(self.n(), self.n(), |a, b| if (a < n1) != (b < n1) { 0.5 } else { 0.0 })
    }

    /// Whether no edge joins `a` (part 1) to `b` (part 2).
    pub fn is_biindependent(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|&i| i < self.n1 && b.iter().all(|&j| j < self.n2 && !self.bi[i][j]))
    }

    pub fn digest(&self) -> String {
        digest_of(b'b', self.n1, self.n2, &self.edges)
    }
}

impl fmt::Display for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BipartiteGraph(n1={}, n2={}, m={})", self.n1, self.n2, self.edges.len())
    }
}

/// Pair `(A, B)` with `A` in part 1 and `B` in part 2, indices sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiindependentPair {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl BiindependentPair {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        BiindependentPair { a, b }
    }

    pub fn sum(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn product(&self) -> usize {
        self.a.len() * self.b.len()
    }

    /// `|A||B| / (|A| + |B|)`, defined as 0 for the empty pair.
    pub fn ratio(&self) -> crate::Rational {
        if self.sum() == 0 {
            crate::Rational::from_integer(0)
        } else {
            crate::Rational::new(self.product() as i64, self.sum() as i64)
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.a.len() == self.b.len()
    }

    pub fn is_valid_in(&self, g: &BipartiteGraph) -> bool {
        g.is_biindependent(&self.a, &self.b)
    }
}

/// `B(G)`: parts `V` and `V'`, edge `(i, j')` iff `{i, j}` is an edge.
pub fn bipartite_double(g: &Graph) -> BipartiteGraph {
    let bi = (0..g.n).map(|i| (0..g.n).map(|j| g.adj[i][j]).collect()).collect();
    BipartiteGraph::from_bi(bi, g.n)
}

/// `B0(G)`: `B(G)` plus the edges `(i, i')`.
pub fn extended_bipartite_double(g: &Graph) -> BipartiteGraph {
    let bi = (0..g.n).map(|i| (0..g.n).map(|j| i == j || g.adj[i][j]).collect()).collect();
    BipartiteGraph::from_bi(bi, g.n)
}

/// The fixed 6-vertex, 10-edge graph with clique number 3 used by the
/// half-size reduction.
pub fn f_graph() -> Graph {
    Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 4), (2, 5), (1, 3)])
        .expect("fixed edge list")
}

/// `H_G`. Part layout (identical on both sides): vertex `v` of `G` is index
/// `v`; edge number `e` (in `G.edges()` order) owns the block
/// `n + e(n+1) .. n + (e+1)(n+1)`, which is `L_e` on side 1 and `R_e` on side 2.
pub fn hardness_gadget(g: &Graph) -> BipartiteGraph {
    let n = g.n();
    let m = g.m();
    let size = n + m * (n + 1);
    let mut edges = Vec::new();
    for v in 0..n {
        edges.push((v, v));
    }
    for (e, &(u, w)) in g.edges().iter().enumerate() {
        let block = n + e * (n + 1)..n + (e + 1) * (n + 1);
        for i in block.clone() {
            for j in block.clone() {
                edges.push((i, j));
            }
        }
        for j in block {
            edges.push((u, j));
            edges.push((w, j));
        }
    }
    BipartiteGraph::new(size, size, edges).expect("gadget edges are distinct")
}

/// Parameters of the half-size reduction for an input with `2n` vertices and
/// `m` edges: `(n, t, missing)` where `t` is minimal with `C(t,2) >= 9n²+n+m`
/// and `missing = C(t,2) - (9n²+n+m)`.
pub fn half_size_parameters(vertices: usize, m: usize) -> Result<(usize, usize, usize), Error> {
    if vertices % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "half-size reduction needs an even vertex count, got {vertices}"
        )));
    }
    let n = vertices / 2;
    let target = 9 * n * n + n + m;
    let mut t: usize = 0;
    while t * t.saturating_sub(1) / 2 < target {
        t += 1;
    }
    Ok((n, t, t * (t - 1) / 2 - target))
}

/// `H = ((G ⋈ F^(n)) ⋈ K_t) ⊕ H0`. Layout: `G` first, then `F^(n)`, then
/// `K_t`, then `H0`, whose edges are the lexicographically first pairs.
pub fn half_size_reduction(g: &Graph) -> Result<Graph, Error> {
    let (n, t, missing) = half_size_parameters(g.n(), g.m())?;
    let fx = if n == 0 { family::empty(0) } else { f_graph().expansion(n)? };
    let h = g.join(&fx).join(&family::complete(t));
    let mut h0_edges = Vec::with_capacity(missing);
    'outer: for u in 0..t {
        for v in (u + 1)..t {
            if h0_edges.len() == missing {
                break 'outer;
            }
            h0_edges.push((u, v));
        }
    }
    let h0 = Graph::new(t, h0_edges)?;
    Ok(h.disjoint_union(&h0))
}

/// Deterministic example families.
pub mod family {
    use super::*;

    pub fn perfect_matching(n: usize) -> BipartiteGraph {
        BipartiteGraph::new(n, n, (0..n).map(|i| (i, i))).expect("matching")
    }

    /// `K_{n,n}` minus the matching `(i, i)`.
    pub fn crown(n: usize) -> BipartiteGraph {
        perfect_matching(n).bipartite_complement()
    }

    pub fn complete_bipartite(n1: usize, n2: usize) -> BipartiteGraph {
        BipartiteGraph::new(n1, n2, (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j)))).expect("complete")
    }

    pub fn empty_bipartite(n1: usize, n2: usize) -> BipartiteGraph {
        BipartiteGraph::new(n1, n2, []).expect("empty")
    }

    /// Cycle `0-1-...-(n-1)-0`.
    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle")
    }

    /// Even cycle with parts `{0,2,4,..}` and `{1,3,5,..}`.
    pub fn cycle_bipartite(n: usize) -> Result<BipartiteGraph, Error> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("bipartite cycle needs even n >= 4, got {n}")));
        }
        let evens: Vec<usize> = (0..n).step_by(2).collect();
        let odds: Vec<usize> = (1..n).step_by(2).collect();
        cycle(n).as_bipartite_with(&evens, &odds)
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))).expect("complete")
    }

    pub fn empty(n: usize) -> Graph {
        Graph::new(n, []).expect("empty")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path")
    }

    /// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i - i+5`.
    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((5 + i, 5 + (i + 2) % 5));
            e.push((i, i + 5));
        }
        Graph::new(10, e).expect("petersen")
    }

    /// Hypercube `Q_r` on `{0,1}^r` (bit strings as integers).
    pub fn hypercube_graph(r: usize) -> Graph {
        let n = 1usize << r;
        Graph::new(n, (0..n).flat_map(|x| (0..r).map(move |b| (x, x ^ (1 << b)))).filter(|&(x, y)| x < y))
            .expect("hypercube")
    }

    /// Even-weight strings (increasing) as part 1, odd-weight as part 2.
    pub fn hypercube(r: usize) -> BipartiteGraph {
        let (even, odd) = hypercube_parts(r);
        hypercube_graph(r).as_bipartite_with(&even, &odd).expect("hypercube is bipartite")
    }

    pub fn hypercube_parts(r: usize) -> (Vec<usize>, Vec<usize>) {
        let n = 1usize << r;
        let even = (0..n).filter(|x| x.count_ones() % 2 == 0).collect();
        let odd = (0..n).filter(|x| x.count_ones() % 2 == 1).collect();
        (even, odd)
    }
}

/// JSON representation of a graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GraphFile {
    General { n: usize, edges: Vec<[usize; 2]> },
    Bipartite { n1: usize, n2: usize, edges: Vec<[usize; 2]> },
}

/// Either kind of graph, as read from a file or family spec.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGraph {
    General(Graph),
    Bipartite(BipartiteGraph),
}

impl AnyGraph {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let f: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match f {
            GraphFile::General { n, edges } => Ok(AnyGraph::General(Graph::new(n, edges.into_iter().map(|[u, v]| (u, v)))?)),
            GraphFile::Bipartite { n1, n2, edges } => Ok(AnyGraph::Bipartite(BipartiteGraph::new(
                n1,
                n2,
                edges.into_iter().map(|[i, j]| (i, j)),
            )?)),
        }
    }

    pub fn to_json(&self) -> String {
        let f = match self {
            AnyGraph::General(g) => GraphFile::General { n: g.n(), edges: g.edges().iter().map(|&(u, v)| [u, v]).collect() },
            AnyGraph::Bipartite(g) => GraphFile::Bipartite {
                n1: g.n1(),
                n2: g.n2(),
                edges: g.edges().iter().map(|&(i, j)| [i, j]).collect(),
            },
        };
        serde_json::to_string(&f).expect("graph serializes")
    }

    pub fn digest(&self) -> String {
        match self {
            AnyGraph::General(g) => g.digest(),
            AnyGraph::Bipartite(g) => g.digest(),
        }
    }
}
