//! Exact parameters by enumeration, with witnesses.

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::graph::{extended_bipartite_double, family, hardness_gadget, BiindependentPair, BipartiteGraph, Graph};
use crate::{Error, Rational};

/// Default cap on the number of maximal independent sets visited.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Fixed-width bitset over vertex indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bits {
    w: Vec<u64>,
}

impl Bits {
    pub fn empty(n: usize) -> Self {
        Bits { w: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    pub fn insert(&mut self, i: usize) {
        self.w[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.w[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.w[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    pub fn len(&self) -> usize {
        self.w.iter().map(|x| x.count_ones() as usize).sum()
    }

    pub fn and(&self, o: &Bits) -> Bits {
        Bits { w: self.w.iter().zip(&o.w).map(|(a, b)| a & b).collect() }
    }

    pub fn and_not(&self, o: &Bits) -> Bits {
        Bits { w: self.w.iter().zip(&o.w).map(|(a, b)| a & !b).collect() }
    }

    pub fn and_count(&self, o: &Bits) -> usize {
        self.w.iter().zip(&o.w).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.w.iter().enumerate().flat_map(|(k, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    return None;
                }
                let t = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(64 * k + t)
            })
        })
    }
}

/// Calls `visit` on every maximal independent set of `g` (pivoting
/// Bron-Kerbosch on the complement). Fails once more than `budget` sets
/// have been reported.
pub fn for_each_maximal_independent_set(
    g: &Graph,
    budget: u64,
    mut visit: impl FnMut(&Bits),
) -> Result<u64, Error> {
    let n = g.n();
    let compat: Vec<Bits> = (0..n)
        .map(|v| {
            let mut b = Bits::empty(n);
            for u in 0..n {
                if u != v && !g.has_edge(u, v) {
                    b.insert(u);
                }
            }
            b
        })
        .collect();
    let mut count = 0u64;
    let mut r = Bits::empty(n);
    bron_kerbosch(&compat, &mut r, Bits::full(n), Bits::empty(n), &mut count, budget, &mut visit)?;
    Ok(count)
}

fn bron_kerbosch(
    nb: &[Bits],
    r: &mut Bits,
    mut p: Bits,
    mut x: Bits,
    count: &mut u64,
    budget: u64,
    visit: &mut impl FnMut(&Bits),
) -> Result<(), Error> {
    if p.is_empty() {
        if x.is_empty() {
            *count += 1;
            if *count > budget {
                return Err(Error::Budget(budget));
            }
            visit(r);
        }
        return Ok(());
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&u| (p.and_count(&nb[u]), std::cmp::Reverse(u)))
        .expect("nonempty");
    let cand: Vec<usize> = p.and_not(&nb[pivot]).iter().collect();
    for v in cand {
        r.insert(v);
        bron_kerbosch(nb, r, p.and(&nb[v]), x.and(&nb[v]), count, budget, visit)?;
        r.remove(v);
        p.remove(v);
        x.insert(v);
    }
    Ok(())
}

/// Maximum matching size by Hopcroft-Karp.
pub fn maximum_matching(g: &BipartiteGraph) -> usize {
    let (n1, n2) = (g.n1(), g.n2());
    let adj: Vec<Vec<usize>> = (0..n1).map(|i| (0..n2).filter(|&j| g.has_edge(i, j)).collect()).collect();
    const NIL: usize = usize::MAX;
    let mut mate1 = vec![NIL; n1];
    let mut mate2 = vec![NIL; n2];
    let mut dist = vec![0usize; n1];
    let mut size = 0;
    loop {
        // Breadth-first layering from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for i in 0..n1 {
            if mate1[i] == NIL {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                let k = mate2[j];
                if k == NIL {
                    found = true;
                } else if dist[k] == usize::MAX {
                    dist[k] = dist[i] + 1;
                    queue.push_back(k);
                }
            }
        }
        if !found {
            break;
        }
        fn augment(i: usize, adj: &[Vec<usize>], m1: &mut [usize], m2: &mut [usize], dist: &mut [usize]) -> bool {
            for &j in &adj[i] {
                let k = m2[j];
                if k == usize::MAX || (dist[k] == dist[i] + 1 && augment(k, adj, m1, m2, dist)) {
                    m1[i] = j;
                    m2[j] = i;
                    return true;
                }
            }
            dist[i] = usize::MAX;
            false
        }
        for i in 0..n1 {
            if mate1[i] == NIL && augment(i, &adj, &mut mate1, &mut mate2, &mut dist) {
                size += 1;
            }
        }
    }
    size
}

/// `α(G) = n1 + n2 - ν(G)` by König's theorem.
pub fn alpha_bipartite(g: &BipartiteGraph) -> usize {
    g.n() - maximum_matching(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub alpha: BiindependentPair,
    pub alpha_bal: BiindependentPair,
    pub g: BiindependentPair,
    pub h: BiindependentPair,
    pub g_bal: BiindependentPair,
    pub h_bal: BiindependentPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactReport {
    pub alpha: usize,
    pub alpha_bal: usize,
    pub g: usize,
    #[serde(with = "crate::rational_json")]
    pub h: Rational,
    pub g_bal: usize,
    #[serde(with = "crate::rational_json")]
    pub h_bal: Rational,
    pub witnesses: Witnesses,
    /// Number of maximal independent sets visited.
    pub maximal_sets: u64,
}

impl ExactReport {
    /// Re-checks every witness against `g` and the reported values.
    pub fn witnesses_valid(&self, g: &BipartiteGraph) -> bool {
        let w = &self.witnesses;
        let all = [&w.alpha, &w.alpha_bal, &w.g, &w.h, &w.g_bal, &w.h_bal];
        all.iter().all(|p| p.is_valid_in(g))
            && w.alpha.sum() == self.alpha
            && w.alpha_bal.sum() == self.alpha_bal
            && w.alpha_bal.is_balanced()
            && w.g.product() == self.g
            && w.h.ratio() == self.h
            && w.g_bal.product() == self.g_bal
            && w.g_bal.is_balanced()
            && w.h_bal.ratio() == self.h_bal
            && w.h_bal.is_balanced()
    }
}

/// Keeps the best key seen, breaking ties toward the lexicographically
/// smallest pair.
struct Best<K: Ord> {
    key: Option<K>,
    pair: BiindependentPair,
}

impl<K: Ord> Best<K> {
    fn new() -> Self {
        Best { key: None, pair: BiindependentPair::new(vec![], vec![]) }
    }

    fn offer(&mut self, key: K, pair: impl FnOnce() -> BiindependentPair) {
        match &self.key {
            Some(k) if key < *k => {}
            Some(k) if key == *k => {
                let p = pair();
                if p < self.pair {
                    self.pair = p;
                }
            }
            _ => {
                self.key = Some(key);
                self.pair = pair();
            }
        }
    }
}

/// Exact `α, α_bal, g, h, g_bal, h_bal` by enumerating maximal independent
/// sets. Witnesses are the lexicographically smallest optimal maximal pairs;
/// balanced witnesses keep the smallest indices on the larger side.
pub fn exact_bipartite_parameters(g: &BipartiteGraph, budget: u64) -> Result<ExactReport, Error> {
    let n1 = g.n1();
    let flat = g.flatten();
    let mut alpha = Best::new();
    let mut gg = Best::new();
    let mut hh = Best::new();
    let mut bal = Best::new();
    let count = for_each_maximal_independent_set(&flat, budget, |set| {
        let a: Vec<usize> = set.iter().filter(|&v| v < n1).collect();
        let b: Vec<usize> = set.iter().filter(|&v| v >= n1).map(|v| v - n1).collect();
        let (x, y) = (a.len(), b.len());
        let pair = || BiindependentPair::new(a.clone(), b.clone());
        alpha.offer(x + y, pair);
        gg.offer(x * y, pair);
        let ratio = if x + y == 0 { Rational::from_integer(0) } else { Rational::new((x * y) as i64, (x + y) as i64) };
        hh.offer(ratio, pair);
        let k = x.min(y);
        bal.offer(k, || BiindependentPair::new(a[..k].to_vec(), b[..k].to_vec()));
    })?;
    let k = bal.key.unwrap_or(0);
    let bal_pair = bal.pair;
    Ok(ExactReport {
        alpha: alpha.key.unwrap_or(0),
        alpha_bal: 2 * k,
        g: gg.key.unwrap_or(0),
        h: hh.key.unwrap_or_else(|| Rational::from_integer(0)),
        g_bal: k * k,
        h_bal: Rational::new(k as i64, 2),
        witnesses: Witnesses {
            alpha: alpha.pair,
            alpha_bal: bal_pair.clone(),
            g: gg.pair,
            h: hh.pair,
            g_bal: bal_pair.clone(),
            h_bal: bal_pair,
        },
        maximal_sets: count,
    })
}

/// Parameters of a general graph defined through its doubles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralReport {
    /// `g(B0(G))`: largest `|A||B|` over disjoint `A, B` with no edge between.
    pub g_bi: usize,
    #[serde(with = "crate::rational_json")]
    pub h_bi: Rational,
    /// `g(B0(complement))`: largest biclique `|A||B|` in `G`.
    pub g_bc: usize,
    #[serde(with = "crate::rational_json")]
    pub h_bc: Rational,
}

/// `g_bi, h_bi, g_bc, h_bc`. For bipartite `G` the biclique values are
/// computed a second time on the bipartite complement and must agree.
pub fn exact_general_parameters(g: &Graph, budget: u64) -> Result<GeneralReport, Error> {
    let bi = exact_bipartite_parameters(&extended_bipartite_double(g), budget)?;
    let bc = exact_bipartite_parameters(&extended_bipartite_double(&g.complement()), budget)?;
    if let Ok(b) = g.as_bipartite() {
        let alt = exact_bipartite_parameters(&b.bipartite_complement(), budget)?;
        if alt.g != bc.g || alt.h != bc.h {
            return Err(Error::Precondition(format!(
                "biclique routes disagree: g {} vs {}, h {} vs {}",
                bc.g, alt.g, bc.h, alt.h
            )));
        }
    }
    Ok(GeneralReport { g_bi: bi.g, h_bi: bi.h, g_bc: bc.g, h_bc: bc.h })
}

/// Maximum clique by branch and bound with a greedy colouring bound.
/// `budget` caps the number of search nodes.
pub fn max_clique(g: &Graph, budget: u64) -> Result<Vec<usize>, Error> {
    let n = g.n();
    let nb: Vec<Bits> = (0..n)
        .map(|v| {
            let mut b = Bits::empty(n);
            for u in g.neighbors(v) {
                b.insert(u);
            }
            b
        })
        .collect();
    let mut best = Vec::new();
    let mut cur = Vec::new();
    let mut nodes = 0u64;
    expand(&nb, &mut cur, Bits::full(n), &mut best, &mut nodes, budget)?;
    best.sort_unstable();
    Ok(best)
}

/// Greedy colouring of `p`; returns vertices with their colour numbers in
/// nondecreasing colour order.
fn colour_order(nb: &[Bits], p: &Bits) -> Vec<(usize, usize)> {
    let mut rest = p.clone();
    let mut out = Vec::new();
    let mut colour = 0;
    while !rest.is_empty() {
        colour += 1;
        let mut q = rest.clone();
        loop {
            let Some(v) = q.iter().next() else { break };
            rest.remove(v);
            q.remove(v);
            q = q.and_not(&nb[v]);
            out.push((v, colour));
        }
    }
    out
}

fn expand(nb: &[Bits], cur: &mut Vec<usize>, mut p: Bits, best: &mut Vec<usize>, nodes: &mut u64, budget: u64) -> Result<(), Error> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::Budget(budget));
    }
    let order = colour_order(nb, &p);
    for &(v, c) in order.iter().rev() {
        if cur.len() + c <= best.len() {
            return Ok(());
        }
        cur.push(v);
        let np = p.and(&nb[v]);
        if np.is_empty() {
            if cur.len() > best.len() {
                *best = cur.clone();
            }
        } else {
            expand(nb, cur, np, best, nodes, budget)?;
        }
        cur.pop();
        p.remove(v);
    }
    Ok(())
}

/// Clique number `ω(G)`.
pub fn omega(g: &Graph, budget: u64) -> Result<usize, Error> {
    Ok(max_clique(g, budget)?.len())
}

/// Independence number of a general graph, `ω` of the complement.
pub fn alpha_general(g: &Graph, budget: u64) -> Result<usize, Error> {
    omega(&g.complement(), budget)
}

/// `(ω(G) >= |V|/2, α(H_G) = α_bal(H_G))` for inputs with
/// `|E| = |V|(|V|-2)/4`; the two flags are computed independently.
pub fn verify_gadget_equivalence(g: &Graph, budget: u64) -> Result<(bool, bool), Error> {
    let n = g.n();
    if n % 2 != 0 || 4 * g.m() != n * n.saturating_sub(2) {
        return Err(Error::Precondition(format!(
            "gadget equivalence needs |V| even and |E| = |V|(|V|-2)/4; got |V| = {n}, |E| = {}",
            g.m()
        )));
    }
    let clique = 2 * omega(g, budget)? >= n;
    let h = hardness_gadget(g);
    let alpha = alpha_bipartite(&h);
    let report = exact_bipartite_parameters(&h, budget)?;
    if report.alpha != alpha {
        return Err(Error::Precondition(format!(
            "enumeration alpha {} disagrees with matching alpha {alpha}",
            report.alpha
        )));
    }
    Ok((clique, report.alpha_bal == alpha))
}

/// `a(0) = 0`, `a(2r) = 4^r - C(2r, r)`, `a(2r+1) = 2 a(2r)`.
pub fn a_sequence(r: u32) -> u128 {
    let s = r / 2;
    let even = 4u128.pow(s) - binomial(2 * s as u128, s as u128);
    if r % 2 == 0 {
        even
    } else {
        2 * even
    }
}

/// Witness sets from the weight-threshold construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypercubeWitnesses {
    pub r: usize,
    /// Disjoint vertex sets of `Q_r` (bit strings as integers) with no edge
    /// between them, each of size `a(r)/2`.
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    /// Balanced biindependent pair of `family::hypercube(r + 1)` of total
    /// size `a(r)`, indexed by position within each parity class.
    pub balanced: BiindependentPair,
}

/// For `r = 2s`: `L = {|x| <= s-1}`, `U = {|x| >= s+1}`. For `r = 2s+1`: the
/// same sets in `Q_{2s}` with a free last coordinate. The balanced pair
/// appends a parity bit so that `L` lands on even and `U` on odd weight.
pub fn hypercube_witnesses(r: usize) -> Result<HypercubeWitnesses, Error> {
    if r == 0 || r > 30 {
        return Err(Error::InvalidParameter(format!("hypercube witnesses need 1 <= r <= 30, got {r}")));
    }
    let s = r / 2;
    let base = 2 * s;
    let weight = |x: usize| (x & ((1 << base) - 1)).count_ones() as usize;
    let n = 1usize << r;
    let lower: Vec<usize> = (0..n).filter(|&x| weight(x) + 1 <= s).collect();
    let upper: Vec<usize> = (0..n).filter(|&x| weight(x) > s).collect();
    let (even, odd) = family::hypercube_parts(r + 1);
    let lift = |x: usize, bit: usize| x | (bit << r);
    let a: Vec<usize> = lower
        .iter()
        .map(|&x| {
            let y = lift(x, (x.count_ones() % 2) as usize);
            even.binary_search(&y).expect("even weight")
        })
        .collect();
    let b: Vec<usize> = upper
        .iter()
        .map(|&x| {
            let y = lift(x, (x.count_ones() as usize + 1) % 2);
            odd.binary_search(&y).expect("odd weight")
        })
        .collect();
    Ok(HypercubeWitnesses { r, lower, upper, balanced: BiindependentPair::new(a, b) })
}

impl HypercubeWitnesses {
    /// Checks disjointness, non-adjacency, balance and the `a(r)` sizes.
    pub fn validate(&self) -> bool {
        let q = family::hypercube_graph(self.r);
        let half = a_sequence(self.r as u32) as usize / 2;
        let disjoint = self.lower.iter().all(|x| !self.upper.contains(x));
        let no_edges = self.lower.iter().all(|&x| self.upper.iter().all(|&y| !q.has_edge(x, y)));
        let big = family::hypercube(self.r + 1);
        disjoint
            && no_edges
            && self.lower.len() == half
            && self.upper.len() == half
            && self.balanced.is_balanced()
            && self.balanced.sum() == 2 * half
            && self.balanced.is_valid_in(&big)
    }
}

/// Outcome of checking the exact relation chain on one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub holds: bool,
    pub failures: Vec<String>,
}

/// Checks `α_bal/4 = √g_bal/2 = h_bal <= h <= √g/2 <= α/4` and the
/// equivalence `h = α/4 ⇔ √g/2 = α/4 ⇔ α = α_bal`, all in exact arithmetic.
pub fn verify_relation_chain(r: &ExactReport) -> RelationReport {
    let mut failures = Vec::new();
    let quarter_alpha = Rational::new(r.alpha as i64, 4);
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    check(Rational::new(r.alpha_bal as i64, 4) == r.h_bal, "alpha_bal/4 = h_bal");
    check(4 * r.g_bal == r.alpha_bal * r.alpha_bal, "sqrt(g_bal)/2 = alpha_bal/4");
    check(r.h_bal <= r.h, "h_bal <= h");
    check(r.h * r.h * 4 <= Rational::from_integer(r.g as i64), "h <= sqrt(g)/2");
    check(4 * r.g <= r.alpha * r.alpha, "sqrt(g)/2 <= alpha/4");
    let e1 = r.h == quarter_alpha;
    let e2 = 4 * r.g == r.alpha * r.alpha;
    let e3 = r.alpha == r.alpha_bal;
    check(e1 == e2 && e2 == e3, "h = alpha/4 <=> sqrt(g)/2 = alpha/4 <=> alpha = alpha_bal");
    RelationReport { holds: failures.is_empty(), failures }
}
