//! Finite groups given by multiplication tables, product-free sets and the
//! bipartite Cayley graph.

use serde::{Deserialize, Serialize};

use crate::graph::{BiindependentPair, BipartiteGraph};
use crate::spectral::{h_hat, singular_values};
use crate::Error;

/// Largest group order accepted by [`max_product_free`].
pub const DEFAULT_ORDER_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates the Latin-square property, associativity and an identity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, Error> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty multiplication table".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!("row {a} has length {}", row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidParameter(format!("row {a} is not a permutation")));
                }
            }
        }
        for b in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if std::mem::replace(&mut seen[row[b]], true) {
                    return Err(Error::InvalidParameter(format!("column {b} is not a permutation")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidParameter("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidParameter(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let f: GroupFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if f.order != f.table.len() {
            return Err(Error::Parse(format!("order {} but {} rows", f.order, f.table.len())));
        }
        FiniteGroup::from_table(f.table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GroupFile { order: self.order(), table: self.table.clone() }).expect("serializes")
    }

    pub fn cyclic(n: usize) -> Self {
        Self::product_of_cyclic(&[n])
    }

    /// `Z_{a1} x Z_{a2} x ...` with mixed-radix element numbering.
    pub fn product_of_cyclic(orders: &[usize]) -> Self {
        let n: usize = orders.iter().product();
        let digits = |mut x: usize| {
            orders
                .iter()
                .map(|&o| {
                    let d = x % o;
                    x /= o;
                    d
                })
                .collect::<Vec<_>>()
        };
        let table = (0..n)
            .map(|a| {
                let da = digits(a);
                (0..n)
                    .map(|b| {
                        let db = digits(b);
                        let mut x = 0;
                        for k in (0..orders.len()).rev() {
                            x = x * orders[k] + (da[k] + db[k]) % orders[k];
                        }
                        x
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table).expect("cyclic products are groups")
    }

    /// Symmetric group on `k` points; element `i` is the `i`-th permutation
    /// in lexicographic order, product `(p q)(x) = p(q(x))`.
    pub fn symmetric(k: usize) -> Self {
        let perms = permutations(k);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("permutation");
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| index(&q.iter().map(|&x| p[x]).collect::<Vec<_>>())).collect())
            .collect();
        FiniteGroup::from_table(table).expect("symmetric group")
    }

    /// Dihedral group of order `2m`: element `s^f r^k` is numbered `f*m + k`.
    pub fn dihedral(m: usize) -> Self {
        let n = 2 * m;
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let (fa, ka) = (a / m, a % m);
                        let (fb, kb) = (b / m, b % m);
                        // r^k s = s r^{-k}
                        let k = if fb == 0 { (ka + kb) % m } else { (m - ka % m + kb) % m };
                        ((fa + fb) % 2) * m + k
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table).expect("dihedral group")
    }

    /// Odd permutations among the elements of [`FiniteGroup::symmetric`]`(k)`.
    pub fn symmetric_odd_elements(k: usize) -> Vec<usize> {
        permutations(k)
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let inv = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                inv % 2 == 1
            })
            .map(|(i, _)| i)
            .collect()
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in 0..k {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(k, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn check_subset(g: &FiniteGroup, a: &[usize]) -> Result<(), Error> {
    match a.iter().find(|&&x| x >= g.order()) {
        Some(x) => Err(Error::InvalidParameter(format!("element {x} outside a group of order {}", g.order()))),
        None => Ok(()),
    }
}

/// Whether `ab ∉ A` for all `a, b ∈ A`.
pub fn is_product_free(g: &FiniteGroup, a: &[usize]) -> Result<bool, Error> {
    check_subset(g, a)?;
    let mut member = vec![false; g.order()];
    for &x in a {
        member[x] = true;
    }
    Ok(a.iter().all(|&x| a.iter().all(|&y| !member[g.mul(x, y)])))
}

/// Exact largest product-free set, lexicographically smallest among optima.
pub fn max_product_free(g: &FiniteGroup, cap: usize) -> Result<(usize, Vec<usize>), Error> {
    let n = g.order();
    if n > cap {
        return Err(Error::Budget(cap as u64));
    }
    // Branch over elements in order, including before excluding.
    fn rec(g: &FiniteGroup, next: usize, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        let n = g.order();
        if cur.len() + (n - next) <= best.len() {
            return;
        }
        if next == n {
            *best = cur.clone();
            return;
        }
        let x = next;
        let ok = x != g.identity() && {
            cur.push(x);
            let free = cur.iter().all(|&a| cur.iter().all(|&b| !cur.contains(&g.mul(a, b))));
            cur.pop();
            free
        };
        if ok {
            cur.push(x);
            rec(g, next + 1, cur, best);
            cur.pop();
        }
        rec(g, next + 1, cur, best);
    }
    let mut best = Vec::new();
    rec(g, 0, &mut Vec::new(), &mut best);
    Ok((best.len(), best))
}

/// Bipartite Cayley graph: both parts are copies of the group and `(u, v)`
/// is an edge iff `uv ∈ A`.
pub fn cayley_bipartite(g: &FiniteGroup, a: &[usize]) -> Result<BipartiteGraph, Error> {
    check_subset(g, a)?;
    if a.is_empty() {
        return Err(Error::InvalidParameter("connection set must be nonempty".into()));
    }
    let n = g.order();
    let mut member = vec![false; n];
    for &x in a {
        member[x] = true;
    }
    let edges = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| member[g.mul(u, v)]);
    BipartiteGraph::new(n, n, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GowersReport {
    pub order: usize,
    pub size: usize,
    pub k: u32,
    pub lambda2: f64,
    /// `√(|A|(n - |A|)/k)`.
    pub lambda2_bound: f64,
    pub lambda2_ok: bool,
    pub h_hat: f64,
    /// `|A|/2 <= ĥ`, the pair of copies of `A` being biindependent.
    pub half_size_ok: bool,
    /// `n / (1 + k^{1/3})`.
    pub cap: f64,
    pub cap_ok: bool,
}

/// Spectral bounds on a product-free set with caller-supplied minimum
/// nontrivial representation dimension `k`.
pub fn gowers_report(g: &FiniteGroup, a: &[usize], k: u32, tol: f64) -> Result<GowersReport, Error> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if !is_product_free(g, &a)? {
        return Err(Error::Precondition("set is not product-free".into()));
    }
    let cayley = cayley_bipartite(g, &a)?;
    debug_assert!(BiindependentPair::new(a.clone(), a.clone()).is_valid_in(&cayley));
    let n = g.order() as f64;
    let size = a.len() as f64;
    let lambda2 = singular_values(&cayley).get(1).copied().unwrap_or(0.0);
    let lambda2_bound = (size * (n - size) / k as f64).sqrt();
    let h = h_hat(&cayley)?;
    let cap = n / (1.0 + (k as f64).cbrt());
    Ok(GowersReport {
        order: g.order(),
        size: a.len(),
        k,
        lambda2,
        lambda2_bound,
        lambda2_ok: lambda2 <= lambda2_bound + tol,
        h_hat: h,
        half_size_ok: size / 2.0 <= h + tol,
        cap,
        cap_ok: size <= cap + tol,
    })
}
