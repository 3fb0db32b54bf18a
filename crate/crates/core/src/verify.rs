//! Property suites behind `bibound verify`.
//!
//! Each suite mixes fixed corpora with seeded random instances and records
//! every counterexample instead of stopping at the first. Computation errors
//! count as failures; only an exhausted enumeration budget aborts a suite.

use std::collections::BTreeSet;

use bibound_sdp::{BlockValue, Entry, SolverConfig, Status};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::{
    self, a_sequence, alpha_bipartite, exact_bipartite_parameters, exact_general_parameters, for_each_maximal_independent_set,
    hypercube_witnesses, omega, verify_gadget_equivalence, verify_relation_chain,
};
use crate::graph::{
    bipartite_double, extended_bipartite_double, f_graph, family, half_size_parameters, half_size_reduction,
    hardness_gadget, AnyGraph, BipartiteGraph, Graph,
};
use crate::groups::{cayley_bipartite, gowers_report, is_product_free, max_product_free, FiniteGroup};
use crate::models::{complete_arrow_border, model_phi, model_theta, solve_bound, solve_value, Bound, Certified, Side, ThetaForm};
use crate::report::{bipartite_report, ReportConfig, ALL_IDS};
use crate::spectral::{self, haemers_phi_h, haemers_phi_prime, spectral_summary};
use crate::{Error, Rational};

pub const SUITES: [&str; 7] = ["relations", "gadgets", "spectral", "sdp-duality", "balanced", "groups", "examples"];

/// Largest duality gap, relative to `1 + |value|`, accepted from the solver.
pub const CERT_GAP: f64 = 1e-8;
/// Most negative eigenvalue accepted in a returned PSD block.
pub const CERT_EIG: f64 = 1e-8;
/// Largest primal residual, relative to `1 + max |b|`.
pub const CERT_RESIDUAL: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub solver: SolverConfig,
    pub budget: u64,
    /// Absolute tolerance between solver values and closed forms.
    pub tol: f64,
    /// Slack for inequalities, relative to `1 + |rhs|`.
    pub slack: f64,
    /// Random instances per randomized check.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            solver: SolverConfig::default(),
            budget: exact::DEFAULT_BUDGET,
            tol: 1e-6,
            slack: 1e-6,
            samples: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub case: String,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub failures: Vec<Failure>,
    /// Every optimal solver result produced along the way.
    #[serde(skip)]
    pub certified: Vec<Certified>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport, Error> {
    let mut cx = Ctx {
        cfg,
        rep: SuiteReport { suite: name.to_string(), checks: 0, failures: Vec::new(), certified: Vec::new() },
    };
    match name {
        "relations" => relations(&mut cx)?,
        "gadgets" => gadgets(&mut cx)?,
        "spectral" => spectral_links(&mut cx)?,
        "sdp-duality" => duality(&mut cx)?,
        "balanced" => balanced(&mut cx)?,
        "groups" => groups(&mut cx)?,
        "examples" => examples(&mut cx)?,
        _ => return Err(Error::InvalidParameter(format!("unknown suite {name}; expected one of {}", SUITES.join(", ")))),
    }
    Ok(cx.rep)
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    rep: SuiteReport,
}

impl Ctx<'_> {
    fn check(&mut self, case: &str, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.rep.checks += 1;
        if !ok {
            self.fail(case, check, detail());
        }
    }

    fn fail(&mut self, case: &str, check: &str, detail: String) {
        self.rep.failures.push(Failure { case: case.to_string(), check: check.to_string(), detail });
    }

    fn close(&mut self, case: &str, check: &str, got: f64, want: f64, tol: f64) {
        self.check(case, check, (got - want).abs() <= tol, || format!("got {got:.10}, expected {want:.10} (tol {tol:e})"));
    }

    /// `a <= b` up to the configured slack.
    fn le(&mut self, case: &str, check: &str, a: f64, b: f64) {
        let tol = self.cfg.slack * (1.0 + b.abs());
        self.check(case, check, a <= b + tol, || format!("{a:.10} > {b:.10}"));
    }

    fn eq_exact<T: PartialEq + std::fmt::Debug>(&mut self, case: &str, check: &str, got: T, want: T) {
        let ok = got == want;
        self.check(case, check, ok, || format!("got {got:?}, expected {want:?}"));
    }

    /// Unwraps `r`, recording anything but a budget error as a failure.
    fn ok<T>(&mut self, case: &str, check: &str, r: Result<T, Error>) -> Result<Option<T>, Error> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::Budget(b)) => Err(Error::Budget(b)),
            Err(e) => {
                self.rep.checks += 1;
                self.fail(case, check, e.to_string());
                Ok(None)
            }
        }
    }

    fn bound(&mut self, case: &str, b: Bound, g: &BipartiteGraph, side: Side) -> Result<Option<f64>, Error> {
        let r = solve_bound(b, g, side, &self.cfg.solver);
        Ok(self.ok(case, b.id(), r)?.map(|v| {
            self.rep.certified.extend(v.certified);
            v.value
        }))
    }

    fn primal(&mut self, case: &str, b: Bound, g: &BipartiteGraph) -> Result<Option<f64>, Error> {
        self.bound(case, b, g, Side::Primal)
    }

    fn theta(&mut self, case: &str, g: &Graph, form: ThetaForm) -> Result<Option<f64>, Error> {
        let r = solve_value(model_theta(g, form, Side::Primal), &self.cfg.solver);
        Ok(self.ok(case, "theta", r)?.map(|(v, c)| {
            self.rep.certified.push(c);
            v
        }))
    }
}

// ---------------------------------------------------------------------------
// Certificates

fn block_entry(v: &BlockValue, i: usize, j: usize) -> f64 {
    match v {
        BlockValue::Matrix(m) => m[(i, j)],
        BlockValue::Vector(x) => x[i],
    }
}

fn inner(entries: &[Entry], x: &[BlockValue]) -> f64 {
    entries
        .iter()
        .map(|e| {
            let w = if e.i == e.j { 1.0 } else { 2.0 };
            w * e.v * block_entry(&x[e.block], e.i, e.j)
        })
        .sum()
}

/// Re-checks a solver result against its problem data: optimal status,
/// duality gap, cone membership of both iterates, the objective recomputed
/// from `X`, and primal residuals. Returns the violated items.
pub fn certificate_issues(c: &Certified) -> Vec<String> {
    let (p, r) = (&c.problem, &c.result);
    let mut out = Vec::new();
    if r.status != Status::Optimal {
        out.push(format!("status {:?}", r.status));
        return out;
    }
    let v = r.primal_value;
    let gap = (r.primal_value - r.dual_value).abs();
    if gap > CERT_GAP * (1.0 + v.abs()) {
        out.push(format!("duality gap {gap:e} at value {v}"));
    }
    let lo = r.min_cone_eigenvalue(p);
    if lo < -CERT_EIG {
        out.push(format!("cone eigenvalue {lo:e}"));
    }
    let obj = inner(&p.objective, &r.x) + p.offset;
    if (obj - v).abs() > CERT_RESIDUAL * (1.0 + v.abs()) {
        out.push(format!("objective recomputes to {obj}, reported {v}"));
    }
    let scale = 1.0 + p.constraints.iter().map(|k| k.rhs.abs()).fold(0.0, f64::max);
    let res = p.constraints.iter().map(|k| (inner(&k.entries, &r.x) - k.rhs).abs()).fold(0.0, f64::max);
    if res > CERT_RESIDUAL * scale {
        out.push(format!("primal residual {res:e}"));
    }
    let by: f64 = p.constraints.iter().zip(&r.y).map(|(k, y)| k.rhs * y).sum::<f64>() + p.offset;
    if (by - r.dual_value).abs() > CERT_RESIDUAL * (1.0 + v.abs()) {
        out.push(format!("dual value recomputes to {by}, reported {}", r.dual_value));
    }
    out
}

// ---------------------------------------------------------------------------
// Instances

/// `count` seeded random bipartite graphs with at most `max_vertices`
/// vertices, each part nonempty and edge density drawn uniformly.
pub fn seeded_bipartite(seed: u64, count: usize, max_vertices: usize) -> Vec<BipartiteGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_bipartite(&mut rng, max_vertices)).collect()
}

fn random_bipartite(rng: &mut ChaCha8Rng, max_vertices: usize) -> BipartiteGraph {
    let n1 = rng.random_range(1..max_vertices);
    let n2 = rng.random_range(1..=max_vertices - n1);
    let p: f64 = rng.random_range(0.0..1.0);
    let pairs: Vec<_> = (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    let edges: Vec<_> = pairs.into_iter().filter(|_| rng.random_bool(p)).collect();
    BipartiteGraph::new(n1, n2, edges).expect("random edges are distinct")
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p: f64 = rng.random_range(0.0..1.0);
    let pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let edges: Vec<_> = pairs.into_iter().filter(|_| rng.random_bool(p)).collect();
    Graph::new(n, edges).expect("random edges are distinct")
}

/// Random graph on `n` vertices with exactly `m` edges.
fn random_graph_with_edges(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Graph {
    let mut pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    for i in 0..m {
        let j = rng.random_range(i..pairs.len());
        pairs.swap(i, j);
    }
    pairs.truncate(m);
    Graph::new(n, pairs).expect("distinct pairs")
}

/// Random regular balanced bipartite graph: the biadjacency matrix is a
/// circulant with `r` distinct shifts.
fn random_circulant(rng: &mut ChaCha8Rng, n: usize, r: usize) -> BipartiteGraph {
    let mut shifts: Vec<usize> = (0..n).collect();
    for i in 0..r {
        let j = rng.random_range(i..n);
        shifts.swap(i, j);
    }
    shifts.truncate(r);
    let edges: Vec<_> = (0..n).flat_map(|i| shifts.iter().map(move |&s| (i, (i + s) % n))).collect();
    BipartiteGraph::new(n, n, edges).expect("circulant")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k % 2 == 0 { i } else { 0 };
            cur.swap(j, k - 1);
        }
        // The loop performs one swap too many; undo it.
        let j = if k % 2 == 0 { k - 1 } else { 0 };
        cur.swap(j, k - 1);
    }
    heap(n, &mut cur, &mut out);
    out
}

/// One representative per isomorphism class of graphs on `n <= 6` vertices,
/// optionally restricted to exactly `edges` edges. Each representative is
/// the edge mask that is smallest under relabelling.
pub fn graph_classes(n: usize, edges: Option<usize>) -> Result<Vec<Graph>, Error> {
    if n > 6 {
        return Err(Error::InvalidParameter(format!("isomorphism classes enumerated for n <= 6, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (k, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = k;
        index[v][u] = k;
    }
    let perms = permutations(n);
    let images: Vec<Vec<usize>> =
        perms.iter().map(|p| pairs.iter().map(|&(u, v)| index[p[u]][p[v]]).collect()).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        if edges.is_some_and(|m| mask.count_ones() as usize != m) {
            continue;
        }
        let canonical = images.iter().all(|img| {
            let mut t = 0u32;
            for (k, &i) in img.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    t |= 1 << i;
                }
            }
            t >= mask
        });
        if canonical {
            let e = (0..pairs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| pairs[k]);
            out.push(Graph::new(n, e)?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Oracles

/// `(α, α_bal, g, h)` by trying every subset of the first part.
fn naive_bipartite(g: &BipartiteGraph) -> (usize, usize, usize, Rational) {
    let (n1, n2) = (g.n1(), g.n2());
    let mut best = (0, 0, 0, Rational::from_integer(0));
    for mask in 0u32..(1 << n1) {
        let a = mask.count_ones() as usize;
        let b = (0..n2).filter(|&j| (0..n1).all(|i| mask >> i & 1 == 0 || !g.has_edge(i, j))).count();
        best.0 = best.0.max(a + b);
        best.1 = best.1.max(2 * a.min(b));
        best.2 = best.2.max(a * b);
        if a + b > 0 {
            best.3 = best.3.max(Rational::new((a * b) as i64, (a + b) as i64));
        }
    }
    best
}

/// `(g_bi, h_bi)`: disjoint `A, B` with no edge between, by brute force.
fn naive_bi(g: &Graph) -> (usize, Rational) {
    let n = g.n();
    let mut best = (0, Rational::from_integer(0));
    for mask in 0u32..(1 << n) {
        let a = mask.count_ones() as usize;
        let b = (0..n).filter(|&v| mask >> v & 1 == 0 && (0..n).all(|u| mask >> u & 1 == 0 || !g.has_edge(u, v))).count();
        best.0 = best.0.max(a * b);
        if a + b > 0 {
            best.1 = best.1.max(Rational::new((a * b) as i64, (a + b) as i64));
        }
    }
    best
}

fn naive_omega(g: &Graph) -> usize {
    let n = g.n();
    (0u32..(1 << n))
        .filter(|&m| {
            let s: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
            g.is_clique(&s)
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn naive_product_free(g: &FiniteGroup) -> (usize, Vec<Vec<usize>>) {
    let n = g.order();
    let mut best = 0;
    let mut all = Vec::new();
    for mask in 1u32..(1 << n) {
        let a: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
        let free = a.iter().all(|&x| a.iter().all(|&y| mask >> g.mul(x, y) & 1 == 0));
        if free {
            best = best.max(a.len());
            all.push(a);
        }
    }
    (best, all)
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// relations

fn relations(cx: &mut Ctx) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let rcfg = ReportConfig { solver: cx.cfg.solver, budget: cx.cfg.budget, slack: cx.cfg.slack };
    let mut graphs = vec![
        BipartiteGraph::new(2, 2, [(0, 0)])?,
        family::perfect_matching(3),
        family::crown(4),
        family::cycle_bipartite(6)?,
        family::complete_bipartite(2, 3),
        family::empty_bipartite(2, 3),
    ];
    graphs.extend((0..cx.cfg.samples).map(|_| random_bipartite(&mut rng, 14)));
    for g in &graphs {
        let case = format!("{g} {}", g.digest());
        let case = case.as_str();
        let Some(ex) = cx.ok(case, "exact", exact_bipartite_parameters(g, cx.cfg.budget))? else { continue };
        cx.check(case, "witnesses", ex.witnesses_valid(g), || format!("{:?}", ex.witnesses));
        let chain = verify_relation_chain(&ex);
        cx.check(case, "exact chain", chain.holds, || chain.failures.join("; "));
        cx.eq_exact(case, "König alpha", alpha_bipartite(g), ex.alpha);
        if g.n1() <= 10 {
            let (a, ab, gg, h) = naive_bipartite(g);
            cx.eq_exact(case, "naive oracle", (a, ab, gg, h), (ex.alpha, ex.alpha_bal, ex.g, ex.h));
        }
        let Some(rep) = cx.ok(case, "report", bipartite_report(g, &ALL_IDS, &rcfg))? else { continue };
        for v in rep.violations() {
            cx.fail(case, &v.relation, format!("{} vs {}", v.lhs, v.rhs));
        }
        cx.rep.checks += rep.checks.len();
        let val = |id: &str| rep.value(id).unwrap_or(f64::NAN);
        let (h, g_, h1, g1, h1p) = (val("h"), val("g"), val("h1"), val("g1"), val("h1_prime"));
        let alpha = ex.alpha as f64;
        cx.le(case, "h <= sqrt(g)/2", h, 0.5 * g_.sqrt());
        cx.le(case, "sqrt(g)/2 <= h1", 0.5 * g_.sqrt(), h1);
        cx.le(case, "h1 <= sqrt(g1)/2", h1, 0.5 * g1.max(0.0).sqrt());
        cx.le(case, "sqrt(g1)/2 <= alpha/4", 0.5 * g1.max(0.0).sqrt(), alpha / 4.0);
        cx.le(case, "h <= h1'", h, h1p);
        cx.le(case, "h1' <= h1", h1p, h1);
        let (lb, gb, hb, tb) = (val("las_bal1"), val("g_bal1"), val("h_bal1"), val("theta_bal"));
        cx.le(case, "las_bal1/4 <= sqrt(g_bal1)/2", lb / 4.0, 0.5 * gb.max(0.0).sqrt());
        cx.le(case, "sqrt(g_bal1)/2 <= h_bal1", 0.5 * gb.max(0.0).sqrt(), hb);
        cx.close(case, "h_bal1 = theta_bal/4", hb, tb / 4.0, cx.cfg.tol * (1.0 + hb.abs()));
        cx.rep.certified.extend(rep.certified);
    }

    // Both routes to the general-graph parameters, against brute force.
    for _ in 0..cx.cfg.samples.div_ceil(4) {
        let n = rng.random_range(1..=7);
        let g = random_graph(&mut rng, n);
        let case = format!("{g} {}", g.digest());
        let Some(r) = cx.ok(&case, "general parameters", exact_general_parameters(&g, cx.cfg.budget))? else { continue };
        cx.eq_exact(&case, "g_bi, h_bi", (r.g_bi, r.h_bi), naive_bi(&g));
        cx.eq_exact(&case, "g_bc, h_bc", (r.g_bc, r.h_bc), naive_bi(&g.complement()));
    }

    constructions(cx, &mut rng)
}

fn constructions(cx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<(), Error> {
    for _ in 0..cx.cfg.samples.div_ceil(4) {
        let n = rng.random_range(1..=6);
        let g = random_graph(rng, n);
        let k = rng.random_range(1..=4);
        let h = random_graph(rng, k);
        let case = format!("{g} {}", g.digest());
        let case = case.as_str();
        let b = bipartite_double(&g);
        let b0 = extended_bipartite_double(&g);
        let block = (0..n).all(|i| (0..n).all(|j| b.has_edge(i, j) == g.has_edge(i, j) && b0.has_edge(i, j) == (i == j || g.has_edge(i, j))));
        cx.check(case, "double block form", block, || "biadjacency differs from A or A + I".into());
        cx.eq_exact(case, "complement involution", g.complement().complement(), g.clone());
        cx.eq_exact(case, "bipartite complement involution", b.bipartite_complement().bipartite_complement(), b.clone());
        let (wg, wh) = (omega(&g, cx.cfg.budget)?, omega(&h, cx.cfg.budget)?);
        cx.eq_exact(case, "omega oracle", wg, naive_omega(&g));
        let u = g.disjoint_union(&h);
        cx.eq_exact(case, "union counts", (u.n(), u.m(), omega(&u, cx.cfg.budget)?), (g.n() + h.n(), g.m() + h.m(), wg.max(wh)));
        let j = g.join(&h);
        cx.eq_exact(
            case,
            "join counts",
            (j.n(), j.m(), omega(&j, cx.cfg.budget)?),
            (g.n() + h.n(), g.m() + h.m() + g.n() * h.n(), wg + wh),
        );
        for k in 1..=3 {
            let Some(x) = cx.ok(case, "expansion", g.expansion(k))? else { continue };
            cx.eq_exact(
                case,
                &format!("expansion {k} counts"),
                (x.n(), x.m(), omega(&x, cx.cfg.budget)?),
                (k * n, k * (k - 1) / 2 * n + k * k * g.m(), k * wg),
            );
        }
        let text = AnyGraph::General(g.clone()).to_json();
        let back = cx.ok(case, "json", AnyGraph::from_json(&text))?;
        cx.check(case, "json round trip", back == Some(AnyGraph::General(g.clone())), || text.clone());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gadgets

/// Checks the structure of the maximal independent sets of `H_G`. Each one
/// is fixed by a vertex subset `A` (side-1 copies of `A`, side-2 copies of the
/// rest) and a choice, per edge, of `L_e` or `R_e`, where `R_e` is allowed only
/// for edges inside `V \ A`. So there are `sum_A 2^{e(V \ A)}` of them, all of
/// size `n + m(n+1)`, and the `2^n` sets taking `R_e` for every edge inside
/// `V \ A` are among them.
fn gadget_structure(cx: &mut Ctx, g: &Graph) -> Result<(), Error> {
    let case = format!("{g} {:?}", g.edges());
    let (n, m) = (g.n(), g.m());
    let h = hardness_gadget(g);
    let size = n + m * (n + 1);
    let side = h.n1();
    let block = |e: usize| n + e * (n + 1)..n + (e + 1) * (n + 1);
    let mut canonical = BTreeSet::new();
    let mut bad = Vec::new();
    let count = for_each_maximal_independent_set(&h.flatten(), cx.cfg.budget, |set| {
        let in_a = |v: usize| set.contains(v);
        let mut ok = set.len() == size && (0..n).all(|v| set.contains(v) != set.contains(side + v));
        let mut all_right = true;
        for (e, &(u, w)) in g.edges().iter().enumerate() {
            let left = block(e).all(|i| set.contains(i) && !set.contains(side + i));
            let right = block(e).all(|i| set.contains(side + i) && !set.contains(i));
            let inside = !in_a(u) && !in_a(w);
            ok &= left || (right && inside);
            all_right &= right || !inside;
        }
        let a: Vec<usize> = (0..n).filter(|&v| in_a(v)).collect();
        if !ok {
            bad.push(a.clone());
        }
        if all_right {
            canonical.insert(a);
        }
    })?;
    let expected: u64 = (0u32..(1 << n))
        .map(|mask| 1u64 << g.edges().iter().filter(|&&(u, w)| mask >> u & 1 == 0 && mask >> w & 1 == 0).count())
        .sum();
    cx.check(&case, "maximal sets have the subset shape", bad.is_empty(), || format!("offending subsets {bad:?}"));
    cx.eq_exact(&case, "number of maximal sets", count, expected);
    cx.eq_exact(&case, "one canonical set per vertex subset", canonical.len(), 1usize << n);
    cx.eq_exact(&case, "alpha(H_G) = n + m(n+1)", alpha_bipartite(&h), size);
    Ok(())
}

fn gadgets(cx: &mut Ctx) -> Result<(), Error> {
    for n in 1..=5 {
        for g in graph_classes(n, None)? {
            gadget_structure(cx, &g)?;
            if n < 2 {
                // One vertex: g = g_bal = 0 while α = 1 and α_bal = 0.
                continue;
            }
            // α = α_bal ⇔ g = g_bal ⇔ h = h_bal ⇔ h = α/4 ⇔ √g/2 = α/4 ⇔ h = √g/2.
            let case = format!("{g} {:?}", g.edges());
            let r = exact_bipartite_parameters(&hardness_gadget(&g), cx.cfg.budget)?;
            let quarter = Rational::new(r.alpha as i64, 4);
            let flags = [
                r.alpha == r.alpha_bal,
                r.g == r.g_bal,
                r.h == r.h_bal,
                r.h == quarter,
                4 * r.g == r.alpha * r.alpha,
                r.h * r.h * 4 == Rational::from_integer(r.g as i64),
            ];
            cx.check(&case, "equality conditions on H_G agree", flags.iter().all(|&f| f == flags[0]), || format!("{flags:?}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let mut qualifying: Vec<Graph> = Vec::new();
    for n in [2, 4, 6] {
        qualifying.extend(graph_classes(n, Some(n * (n - 2) / 4))?);
    }
    qualifying.extend((0..cx.cfg.samples.div_ceil(20)).map(|_| random_graph_with_edges(&mut rng, 8, 12)));
    for g in &qualifying {
        let case = format!("{g} {:?}", g.edges());
        if let Some((clique, bal)) = cx.ok(&case, "gadget equivalence", verify_gadget_equivalence(g, cx.cfg.budget))? {
            cx.check(&case, "half-size clique iff alpha = alpha_bal", clique == bal, || format!("clique {clique}, balanced {bal}"));
        }
    }
    let path = family::path(4);
    let r = verify_gadget_equivalence(&path, cx.cfg.budget);
    cx.check("P4", "edge condition enforced", matches!(r, Err(Error::Precondition(_))), || format!("{r:?}"));

    let f = f_graph();
    cx.eq_exact("F", "F graph", (f.n(), f.m(), omega(&f, cx.cfg.budget)?), (6, 10, 3));

    for n in [2, 4] {
        for g in graph_classes(n, None)? {
            let case = format!("{g} {:?}", g.edges());
            let Some(h) = cx.ok(&case, "half-size reduction", half_size_reduction(&g))? else { continue };
            let (k, t, _) = half_size_parameters(g.n(), g.m())?;
            let (wg, wh) = (omega(&g, cx.cfg.budget)?, omega(&h, cx.cfg.budget)?);
            cx.eq_exact(&case, "reduction vertex count", h.n(), 8 * k + 2 * t);
            cx.eq_exact(&case, "reduction edge count", 4 * h.m(), h.n() * (h.n() - 2));
            cx.eq_exact(&case, "reduction clique number", wh, wg + 3 * k + t);
            cx.eq_exact(&case, "half-size clique preserved", 2 * wh >= h.n(), 2 * wg >= g.n());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// spectral

/// Small regular graphs whose automorphisms act transitively on vertices
/// and on edges.
pub fn symmetric_corpus() -> Vec<(String, Graph)> {
    let mut v = vec![
        ("C4".to_string(), family::cycle(4)),
        ("C5".to_string(), family::cycle(5)),
        ("C6".to_string(), family::cycle(6)),
        ("Petersen".to_string(), family::petersen()),
        ("K4".to_string(), family::complete(4)),
    ];
    for n in 4..=6 {
        v.push((format!("crown{n}"), family::crown(n).flatten()));
    }
    v.push(("Q3".to_string(), family::hypercube_graph(3)));
    v
}

/// Regular balanced bipartite graphs with known eigenvalue-bound behaviour.
fn regular_bipartite_corpus() -> Vec<(String, BipartiteGraph)> {
    let mut v = Vec::new();
    for n in 2..=6 {
        v.push((format!("matching{n}"), family::perfect_matching(n)));
    }
    for n in 3..=6 {
        v.push((format!("crown{n}"), family::crown(n)));
    }
    for n in (4..=10).step_by(2) {
        v.push((format!("C{n}"), family::cycle_bipartite(n).expect("even cycle")));
    }
    v.push(("Q3".to_string(), family::hypercube(3)));
    v.push(("Q4".to_string(), family::hypercube(4)));
    v
}

fn spectral_links(cx: &mut Ctx) -> Result<(), Error> {
    let tol = 10.0 * cx.cfg.tol;
    for n in 3..=12 {
        let s = spectral_summary(&family::cycle(n));
        let mut want: Vec<f64> = (0..n).map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        want.sort_by(|a, b| b.total_cmp(a));
        let d = max_diff(&s.adjacency, &want);
        cx.check(&format!("C{n}"), "cycle eigenvalues", d <= 1e-9, || format!("max deviation {d:e}"));
    }
    for r in 1..=5 {
        let s = spectral_summary(&family::hypercube_graph(r));
        let mut want = Vec::new();
        for k in 0..=r {
            let mult = (0..k).fold(1usize, |acc, i| acc * (r - i) / (i + 1));
            want.extend(std::iter::repeat_n(r as f64 - 2.0 * k as f64, mult));
        }
        let d = max_diff(&s.adjacency, &want);
        cx.check(&format!("Q{r}"), "hypercube eigenvalues", d <= 1e-9, || format!("max deviation {d:e}"));
    }

    for (name, g) in symmetric_corpus() {
        let case = name.as_str();
        // B(G) has spectrum ±λ(G).
        let mut want: Vec<f64> = spectral_summary(&g).adjacency.iter().flat_map(|&l| [l, -l]).collect();
        want.sort_by(|a, b| b.total_cmp(a));
        let got = sorted_eigenvalues(bipartite_double(&g).flatten().adjacency());
        let d = max_diff(&got, &want);
        cx.check(case, "double spectrum", d <= 1e-9, || format!("max deviation {d:e}"));

        let b0 = extended_bipartite_double(&g);
        let half_phi_h = if g.m() == 0 { 0.0 } else { haemers_phi_h(&g)? / 2.0 };
        if let Some(h1) = cx.primal(case, Bound::H1, &b0)? {
            cx.close(case, "h1(B0(G)) = phi_H(G)/2", h1, half_phi_h, tol);
            let gc = g.complement();
            if gc.m() > 0 {
                if let Some((phi, c)) = cx.ok(case, "phi", solve_value_lmi(model_phi(&gc), &cx.cfg.solver))? {
                    cx.rep.certified.push(c);
                    cx.close(case, "h1(B0(G)) = phi(complement)/2", h1, phi / 2.0, tol);
                    if let Some((phi_p, c)) = cx.ok(case, "phi'", haemers_phi_prime(&gc, &cx.cfg.solver))? {
                        cx.rep.certified.push(c);
                        cx.le(case, "phi <= phi'", phi, phi_p);
                        cx.le(case, "phi' <= phi_H", phi_p, 2.0 * half_phi_h);
                        cx.close(case, "phi' = phi_H on symmetric graphs", phi_p, 2.0 * half_phi_h, tol);
                    }
                }
            }
        }
        if let Some(cmp) = cx.ok(case, "compare doubles", spectral::compare_double_bounds(&g))? {
            cx.le(case, "phi_H/2 <= h_hat(B0)", cmp.half_phi_h, cmp.h_hat_extended_double);
            let equal = (cmp.h_hat_extended_double - cmp.half_phi_h).abs() <= 1e-9;
            cx.check(case, "equality predicate", equal == cmp.equality_predicted, || format!("{cmp:?}"));
            if let Some(direct) = cx.ok(case, "h_hat(B0)", spectral::h_hat_extended_double_direct(&g))? {
                cx.close(case, "h_hat(B0) two routes", cmp.h_hat_extended_double, direct, 1e-9);
            }
            let b = bipartite_double(&g);
            if let Some(hh) = cx.ok(case, "h_hat(B)", spectral::h_hat(&b))? {
                cx.close(case, "2 h_hat(B) two routes", cmp.twice_h_hat_double, 2.0 * hh, 1e-9);
                cx.le(case, "hoffman <= 2 h_hat(B)", cmp.hoffman, 2.0 * hh);
            }
            let theta = cx.theta(case, &g, ThetaForm::Trace)?;
            let h1b = cx.primal(case, Bound::H1, &b)?;
            if let (Some(t), Some(h)) = (theta, h1b) {
                cx.le(case, "theta <= 2 h1(B)", t, 2.0 * h);
                cx.le(case, "theta <= hoffman", t, cmp.hoffman);
            }
        }
        if let Ok(bip) = g.as_bipartite() {
            if !bip.is_balanced() {
                continue;
            }
            let gc = g.complement();
            let k = bip.bipartite_complement();
            let a = cx.primal(case, Bound::H1, &extended_bipartite_double(&gc))?;
            let b = cx.primal(case, Bound::H1, &k)?;
            if let (Some(a), Some(b)) = (a, b) {
                cx.close(case, "h1(B0(complement)) = h1(bipartite complement)", a, b, tol);
            }
            if let Some(c) = cx.ok(case, "complement bounds", spectral::bipartite_complement_bounds(&bip))? {
                cx.le(case, "h_hat(bip. complement) <= phi_H(complement)/2", c.h_hat_complement, c.half_phi_h_complement);
                let strict = c.h_hat_complement < c.half_phi_h_complement - 1e-9;
                cx.check(case, "strictness predicate", strict == c.strict_predicted, || format!("{c:?}"));
                if let Some(hk) = cx.ok(case, "h_hat", spectral::h_hat(&k))? {
                    cx.close(case, "h_hat(bip. complement) two routes", c.h_hat_complement, hk, 1e-9);
                }
                let phi = haemers_phi_h(&gc)?;
                cx.close(case, "phi_H(complement) two routes", c.half_phi_h_complement, phi / 2.0, 1e-9);
            }
        }
    }

    // ĥ <= ½√ĝ with equality iff r <= 3λ2; h1 <= ĥ and g1 <= ĝ.
    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let mut corpus = regular_bipartite_corpus();
    for _ in 0..cx.cfg.samples.div_ceil(10) {
        let n = rng.random_range(3..=7);
        let r = rng.random_range(1..n);
        let g = random_circulant(&mut rng, n, r);
        corpus.push((format!("{g} {:?}", g.edges()), g));
    }
    for (name, g) in &corpus {
        let case = name.as_str();
        let (Some(hh), Some(gh)) = (cx.ok(case, "h_hat", spectral::h_hat(g))?, cx.ok(case, "g_hat", spectral::g_hat(g))?) else {
            continue;
        };
        let s = spectral::singular_values(g);
        let (r, l2) = (g.regular_degree().unwrap_or(0) as f64, s.get(1).copied().unwrap_or(0.0));
        cx.le(case, "h_hat <= sqrt(g_hat)/2", hh, 0.5 * gh.sqrt());
        // Complete bipartite graphs have l2 = 0 and both sides vanish.
        if r > 0.0 && l2 > 1e-9 {
            let equal = (hh - 0.5 * gh.sqrt()).abs() <= 1e-9;
            cx.check(case, "h_hat = sqrt(g_hat)/2 iff r <= 3 l2", equal == (r <= 3.0 * l2 + 1e-12), || {
                format!("h_hat {hh}, g_hat {gh}, r {r}, l2 {l2}")
            });
        }
        if let Some(h1) = cx.primal(case, Bound::H1, g)? {
            cx.le(case, "h1 <= h_hat", h1, hh);
        }
        if let Some(g1) = cx.primal(case, Bound::G1, g)? {
            cx.le(case, "g1 <= g_hat", g1, gh);
        }
        if let Some(hs) = cx.primal(case, Bound::HHatSdp, g)? {
            cx.close(case, "h_hat program = closed form", hs, hh, tol);
        }
    }
    Ok(())
}

fn solve_value_lmi(p: bibound_sdp::SdpProblem, cfg: &SolverConfig) -> Result<(f64, Certified), Error> {
    crate::models::solve_lmi_value(p, cfg)
}

// ---------------------------------------------------------------------------
// sdp-duality

fn duality(cx: &mut Ctx) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let mut graphs = vec![
        BipartiteGraph::new(2, 2, [(0, 0)])?,
        family::perfect_matching(3),
        family::crown(4),
        family::cycle_bipartite(6)?,
        family::hypercube(3),
        family::complete_bipartite(2, 3),
        family::empty_bipartite(2, 3),
        BipartiteGraph::new(1, 4, [(0, 0), (0, 1), (0, 2), (0, 3)])?,
    ];
    graphs.extend((0..cx.cfg.samples.div_ceil(4)).map(|_| random_bipartite(&mut rng, 10)));
    for g in &graphs {
        let case = format!("{g} {:?}", g.edges());
        let case = case.as_str();
        for b in Bound::ALL {
            let p = cx.bound(case, b, g, Side::Primal)?;
            let d = cx.bound(case, b, g, Side::Dual)?;
            if let (Some(p), Some(d)) = (p, d) {
                cx.close(case, &format!("{} primal = dual", b.id()), p, d, cx.cfg.tol * (1.0 + p.abs()));
            }
        }
        let alpha = alpha_bipartite(g) as f64;
        let flat = g.flatten();
        for form in [ThetaForm::Trace, ThetaForm::Arrow] {
            if let Some(t) = cx.theta(case, &flat, form)? {
                cx.close(case, &format!("theta ({form:?}) = alpha"), t, alpha, cx.cfg.tol * (1.0 + alpha));
            }
        }
    }

    for (name, g) in [("C5", family::cycle(5)), ("Petersen", family::petersen()), ("C7", family::cycle(7))] {
        let a = cx.theta(name, &g, ThetaForm::Trace)?;
        let b = cx.theta(name, &g, ThetaForm::Arrow)?;
        if let (Some(a), Some(b)) = (a, b) {
            cx.close(name, "theta forms agree", a, b, cx.cfg.tol * (1.0 + a));
        }
    }
    if let Some(t) = cx.theta("C5", &family::cycle(5), ThetaForm::Trace)? {
        cx.close("C5", "theta(C5) = sqrt 5", t, 5f64.sqrt(), cx.cfg.tol);
    }

    // Relabelling both parts leaves every bound unchanged; repeated solves
    // are bitwise reproducible.
    for _ in 0..cx.cfg.samples.div_ceil(10) {
        let g = random_bipartite(&mut rng, 10);
        let mut p1: Vec<usize> = (0..g.n1()).collect();
        let mut p2: Vec<usize> = (0..g.n2()).collect();
        for i in (1..p1.len()).rev() {
            p1.swap(i, rng.random_range(0..=i));
        }
        for i in (1..p2.len()).rev() {
            p2.swap(i, rng.random_range(0..=i));
        }
        let relabelled = BipartiteGraph::new(g.n1(), g.n2(), g.edges().iter().map(|&(i, j)| (p1[i], p2[j])))?;
        let case = format!("{g} {:?}", g.edges());
        for b in [Bound::H1, Bound::G1, Bound::HBal1, Bound::LasBal1] {
            let x = cx.primal(&case, b, &g)?;
            let y = cx.primal(&case, b, &relabelled)?;
            let z = cx.primal(&case, b, &g)?;
            if let (Some(x), Some(y), Some(z)) = (x, y, z) {
                cx.close(&case, &format!("{} relabelling", b.id()), x, y, cx.cfg.tol * (1.0 + x.abs()));
                cx.check(&case, &format!("{} reproducible", b.id()), x.to_bits() == z.to_bits(), || format!("{x} vs {z}"));
            }
        }
    }

    // Border completion on random matrices on both sides of <J, X> = 1.
    for _ in 0..cx.cfg.samples {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=n);
        let r = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
        let mut x = &r * r.transpose();
        x /= x.trace();
        let total = x.sum();
        let want_ok = rng.random_bool(0.7);
        if want_ok && total < 1.0 {
            // Mix in J/n, which has trace 1 and <J, J/n> = n.
            let s = ((1.0 - total) / (n as f64 - total)).min(1.0) * 1.01;
            x = x * (1.0 - s.min(1.0)) + DMatrix::from_element(n, n, 1.0 / n as f64) * s.min(1.0);
        }
        let total = x.sum();
        let case = format!("random X (n = {n}, <J,X> = {total:.4})");
        match complete_arrow_border(&x, 1e-9) {
            Ok(v) => {
                let rest = &x - &v * v.transpose();
                let lo = sorted_eigenvalues(rest).last().copied().unwrap_or(0.0);
                cx.check(&case, "border accepted only if <J,X> >= 1", total >= 1.0 - 1e-9, || format!("{total}"));
                cx.close(&case, "e'x = 1", v.sum(), 1.0, 1e-9);
                cx.check(&case, "X - xx' psd", lo >= -1e-9, || format!("min eigenvalue {lo:e}"));
            }
            Err(e) => cx.check(&case, "border rejected only if <J,X> < 1", total < 1.0 + 1e-9, || e.to_string()),
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// balanced

fn balanced(cx: &mut Ctx) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let graphs: Vec<BipartiteGraph> = (0..cx.cfg.samples).map(|_| random_bipartite(&mut rng, 14)).collect();
    for g in &graphs {
        balanced_chain(cx, g)?;
    }
    for (name, g) in regular_bipartite_corpus() {
        balanced_symmetric(cx, &name, &g)?;
    }

    let edge = BipartiteGraph::new(2, 2, [(0, 0)])?;
    let lb = cx.primal("single-edge", Bound::LasBal1, &edge)?;
    let gb = cx.primal("single-edge", Bound::GBal1, &edge)?;
    let hb = cx.primal("single-edge", Bound::HBal1, &edge)?;
    if let (Some(lb), Some(gb), Some(hb)) = (lb, gb, hb) {
        let s = 0.5 * gb.sqrt();
        cx.check("single-edge", "strict balanced chain", lb / 4.0 + 1e-3 < s && s + 1e-3 < hb, || format!("{lb} {gb} {hb}"));
    }
    Ok(())
}

fn balanced_chain(cx: &mut Ctx, g: &BipartiteGraph) -> Result<(), Error> {
    let case = format!("{g} {:?}", g.edges());
    let case = case.as_str();
    let mut v = std::collections::BTreeMap::new();
    for b in [
        Bound::Las1,
        Bound::H1,
        Bound::G1,
        Bound::LasBal1,
        Bound::ThetaBal,
        Bound::GBal1,
        Bound::HBal1,
        Bound::ThetaBalHat,
        Bound::LasBalHat,
        Bound::GBalHat,
        Bound::LasBalTilde,
    ] {
        match cx.primal(case, b, g)? {
            Some(x) => v.insert(b, x),
            None => return Ok(()),
        };
    }
    let ex = exact_bipartite_parameters(g, cx.cfg.budget)?;
    let sq = |x: f64| 0.5 * x.max(0.0).sqrt();
    let tol = cx.cfg.tol;
    let (lb, tb, gb, hb) = (v[&Bound::LasBal1], v[&Bound::ThetaBal], v[&Bound::GBal1], v[&Bound::HBal1]);
    cx.le(case, "las_bal1/4 <= sqrt(g_bal1)/2", lb / 4.0, sq(gb));
    cx.le(case, "sqrt(g_bal1)/2 <= h_bal1", sq(gb), hb);
    cx.close(case, "h_bal1 = theta_bal/4", hb, tb / 4.0, tol * (1.0 + hb));
    // sqrt(g_bal1)/2 = theta_bal/4 iff las_bal1 = theta_bal. Near-ties
    // within the solver's resolution are not classified.
    let d1 = tb / 4.0 - sq(gb);
    let d2 = tb - lb;
    let (tight, loose) = (1e-6 * (1.0 + tb), 1e-3 * (1.0 + tb));
    let decided = (d1 <= tight || d1 >= loose) && (d2 <= tight || d2 >= loose);
    if decided {
        cx.check(case, "balanced equality cases coincide", (d1 <= tight) == (d2 <= tight), || format!("gaps {d1:e}, {d2:e}"));
    }
    cx.le(case, "alpha_bal <= las_bal1", ex.alpha_bal as f64, lb);
    cx.le(case, "g_bal <= g_bal1", ex.g_bal as f64, gb);
    cx.le(case, "h_bal <= h_bal1", crate::to_f64(&ex.h_bal), hb);
    cx.le(case, "las_bal1 <= las1", lb, v[&Bound::Las1]);
    cx.le(case, "h_bal1 <= h1", hb, v[&Bound::H1]);
    cx.le(case, "g_bal1 <= g1", gb, v[&Bound::G1]);
    let (lh, th, gh, lt) = (v[&Bound::LasBalHat], v[&Bound::ThetaBalHat], v[&Bound::GBalHat], v[&Bound::LasBalTilde]);
    cx.le(case, "las_bal1 <= las_bal_hat", lb, lh);
    cx.le(case, "theta_bal <= theta_bal_hat", tb, th);
    cx.le(case, "g_bal1 <= g_bal_hat", gb, gh);
    cx.le(case, "las_bal_hat/4 <= sqrt(g_bal_hat)/2", lh / 4.0, sq(gh));
    cx.le(case, "sqrt(g_bal_hat)/2 <= theta_bal_hat/4", sq(gh), th / 4.0);
    cx.le(case, "las_bal_tilde <= las_bal_hat", lt, lh);
    cx.le(case, "las_bal1 <= las_bal_tilde", lb, lt);
    Ok(())
}

fn balanced_symmetric(cx: &mut Ctx, case: &str, g: &BipartiteGraph) -> Result<(), Error> {
    let tol = cx.cfg.tol;
    let Some(hh) = cx.ok(case, "h_hat", spectral::h_hat(g))? else { return Ok(()) };
    let Some(cf) = cx.ok(case, "closed form", spectral::theta_bal_hat_closed_form(g))? else { return Ok(()) };
    cx.close(case, "closed form = 4 h_hat", cf, 4.0 * hh, 1e-9);
    let th = cx.primal(case, Bound::ThetaBalHat, g)?;
    let lh = cx.primal(case, Bound::LasBalHat, g)?;
    let lt = cx.primal(case, Bound::LasBalTilde, g)?;
    let gh = cx.primal(case, Bound::GBalHat, g)?;
    if let Some(th) = th {
        cx.close(case, "theta_bal_hat = 2n l2/(r + l2)", th, cf, tol);
        cx.close(case, "theta_bal_hat = 4 h_hat", th, 4.0 * hh, tol);
        if let Some(lh) = lh {
            cx.close(case, "las_bal_hat = theta_bal_hat", lh, th, tol);
        }
        if let Some(lt) = lt {
            cx.close(case, "las_bal_tilde = theta_bal_hat", lt, th, tol);
        }
    }
    if let Some(gh) = gh {
        cx.close(case, "sqrt(g_bal_hat)/2 = h_hat", 0.5 * gh.max(0.0).sqrt(), hh, tol);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// groups

/// Named groups of order at most 12.
pub fn group_corpus() -> Vec<(String, FiniteGroup)> {
    let mut v: Vec<(String, FiniteGroup)> = (1..=12).map(|n| (format!("Z{n}"), FiniteGroup::cyclic(n))).collect();
    v.push(("Z2xZ2".into(), FiniteGroup::product_of_cyclic(&[2, 2])));
    v.push(("Z2xZ4".into(), FiniteGroup::product_of_cyclic(&[2, 4])));
    v.push(("Z3xZ3".into(), FiniteGroup::product_of_cyclic(&[3, 3])));
    v.push(("S3".into(), FiniteGroup::symmetric(3)));
    v.push(("D4".into(), FiniteGroup::dihedral(4)));
    v
}

fn groups(cx: &mut Ctx) -> Result<(), Error> {
    for (name, g) in group_corpus() {
        let case = name.as_str();
        let (best, all) = naive_product_free(&g);
        if let Some((size, set)) = cx.ok(case, "max product-free", max_product_free(&g, crate::groups::DEFAULT_ORDER_CAP))? {
            cx.eq_exact(case, "max product-free size", size, best);
            cx.check(case, "max product-free witness", is_product_free(&g, &set)? && set.len() == size, || format!("{set:?}"));
        }
        // Every product-free set, with k = 1 (valid for any group).
        for a in &all {
            let Some(r) = cx.ok(case, "gowers report", gowers_report(&g, a, 1, 1e-9))? else { continue };
            cx.check(case, "lambda2 bound", r.lambda2_ok, || format!("{a:?}: {r:?}"));
            cx.check(case, "|A|/2 <= h_hat", r.half_size_ok, || format!("{a:?}: {r:?}"));
            cx.check(case, "size cap", r.cap_ok, || format!("{a:?}: {r:?}"));
            let cayley = cayley_bipartite(&g, a)?;
            cx.check(case, "A x A biindependent in Cayley graph", cayley.is_biindependent(a, a), || format!("{a:?}"));
        }
        let text = g.to_json();
        let back = cx.ok(case, "json", FiniteGroup::from_json(&text))?;
        cx.check(case, "json round trip", back.as_ref() == Some(&g), || text.clone());
    }
    let odd = FiniteGroup::symmetric_odd_elements(3);
    let s3 = FiniteGroup::symmetric(3);
    cx.check("S3", "transpositions are product-free", is_product_free(&s3, &odd)?, || format!("{odd:?}"));

    let malformed: [(&str, Vec<Vec<usize>>); 5] = [
        ("empty", vec![]),
        ("ragged", vec![vec![0, 1], vec![1]]),
        ("not latin", vec![vec![0, 1], vec![1, 1]]),
        ("out of range", vec![vec![0, 2], vec![2, 0]]),
        // Latin square of order 5 with identity 0 in which 1 has order 2.
        (
            "not associative",
            vec![vec![0, 1, 2, 3, 4], vec![1, 0, 3, 4, 2], vec![2, 4, 0, 1, 3], vec![3, 2, 4, 0, 1], vec![4, 3, 1, 2, 0]],
        ),
    ];
    for (name, t) in malformed {
        let r = FiniteGroup::from_table(t);
        cx.check(name, "malformed table rejected", r.is_err(), || "accepted".into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// examples

/// `h(B0(C_n))` and `g(B0(C_n))` from the case formulas.
pub fn cycle_double_exact(n: usize) -> (Rational, usize) {
    let k = n as i64;
    if n % 2 == 0 {
        (Rational::new(k - 2, 4), (n - 2) * (n - 2) / 4)
    } else {
        (Rational::new((k - 1) * (k - 3), 4 * (k - 2)), (n - 1) * (n - 3) / 4)
    }
}

fn examples(cx: &mut Ctx) -> Result<(), Error> {
    let tol = cx.cfg.tol;
    let edge = BipartiteGraph::new(2, 2, [(0, 0)])?;
    let ex = exact_bipartite_parameters(&edge, cx.cfg.budget)?;
    cx.eq_exact("single-edge", "exact values", (ex.alpha, ex.alpha_bal, ex.g, ex.h), (3, 2, 2, Rational::new(2, 3)));
    let goldens = [
        (Bound::H1, std::f64::consts::FRAC_1_SQRT_2),
        (Bound::HBal1, 2.0 / 3.0),
        (Bound::GBal1, 4.0 / 3.0),
        (Bound::LasBal1, 2.25),
        (Bound::ThetaBal, 8.0 / 3.0),
    ];
    for (b, want) in goldens {
        if let Some(v) = cx.primal("single-edge", b, &edge)? {
            cx.close("single-edge", b.id(), v, want, tol);
        }
    }
    if let Some(v) = cx.primal("single-edge", Bound::H1Prime, &edge)? {
        cx.check("single-edge", "h1' <= 0.70706", v <= 0.70706, || format!("{v}"));
        cx.check("single-edge", "h1' + 5e-5 < h1", v + 5e-5 < std::f64::consts::FRAC_1_SQRT_2, || format!("{v}"));
    }

    for n in 2..=8 {
        let case = format!("matching{n}");
        let g = family::perfect_matching(n);
        let nf = n as f64;
        expect_h1_g1(cx, &case, &g, nf / 4.0, Some(nf * nf / 4.0))?;
        let ex = exact_bipartite_parameters(&g, cx.cfg.budget)?;
        let gg = (n / 2) * n.div_ceil(2);
        cx.eq_exact(&case, "exact g, h", (ex.g, ex.h), (gg, Rational::new(gg as i64, n as i64)));
    }

    for n in 3..=8 {
        let case = format!("crown{n}");
        let g = family::crown(n);
        let nf = n as f64;
        let g1 = if n >= 4 { nf * nf / (8.0 * (nf - 2.0)) } else { 1.0 };
        expect_h1_g1(cx, &case, &g, 0.5, Some(g1))?;
        if n >= 5 {
            if let (Some(h1), Some(g1)) = (cx.primal(&case, Bound::H1, &g)?, cx.primal(&case, Bound::G1, &g)?) {
                let margin = 0.5 * g1.sqrt() - h1;
                cx.check(&case, "h1 < sqrt(g1)/2 by 1e-3", margin >= 1e-3, || format!("margin {margin}"));
            }
        }
        let ex = exact_bipartite_parameters(&g, cx.cfg.budget)?;
        cx.eq_exact(&case, "exact g, h", (ex.g, ex.h), (1, Rational::new(1, 2)));
        let c = spectral::bipartite_complement_bounds(&g)?;
        cx.close(&case, "4 h_hat(bip. complement)^2 = n^2/4", c.four_h_hat_sq, nf * nf / 4.0, 1e-9);
        let phi = nf * nf / (nf + 2.0);
        cx.close(&case, "phi_H(complement)^2", c.phi_h_sq, phi * phi, 1e-9);
        cx.check(&case, "n^2/4 < phi_H^2", c.four_h_hat_sq < c.phi_h_sq, || format!("{c:?}"));
    }

    for n in (4..=12).step_by(2) {
        let case = format!("C{n}");
        let c = (2.0 * std::f64::consts::PI / n as f64).cos();
        let want = n as f64 / 4.0 * c / (c + 1.0);
        expect_h1_g1(cx, &case, &family::cycle_bipartite(n)?, want, None)?;
    }
    for n in 3..=9 {
        let case = format!("B0(C{n})");
        let nf = n as f64;
        let c1 = (std::f64::consts::PI / nf).cos();
        let c2 = (2.0 * std::f64::consts::PI / nf).cos();
        let half_phi = if n % 2 == 0 { nf / 4.0 * c1 * c1 } else { nf / 4.0 * (2.0 * c1 - 1.0) };
        let b0 = extended_bipartite_double(&family::cycle(n));
        cx.close(&case, "phi_H(C_n)/2 closed form", haemers_phi_h(&family::cycle(n))? / 2.0, half_phi, 1e-9);
        if let Some(h1) = cx.primal(&case, Bound::H1, &b0)? {
            cx.close(&case, "h1", h1, half_phi, tol);
        }
        cx.close(&case, "h_hat", spectral::h_hat(&b0)?, nf / 4.0 * (2.0 * c2 + 1.0) / (c2 + 2.0), 1e-9);
        let ex = exact_bipartite_parameters(&b0, cx.cfg.budget)?;
        cx.eq_exact(&case, "exact h, g", (ex.h, ex.g), cycle_double_exact(n));
    }

    for r in 2..=5 {
        let case = format!("Q{r}");
        let q = family::hypercube(r);
        let want = 2f64.powi(r as i32 - 3) * (r as f64 - 2.0) / (r as f64 - 1.0);
        expect_h1_g1(cx, &case, &q, want, None)?;
        let ex = exact_bipartite_parameters(&q, cx.cfg.budget)?;
        cx.eq_exact(&case, "alpha_bal = a(r-1)", ex.alpha_bal as u128, a_sequence(r as u32 - 1));
        let lower = Rational::new(a_sequence(r as u32 - 1) as i64, 4);
        cx.check(&case, "h >= a(r-1)/4", ex.h >= lower, || format!("h = {}", ex.h));
    }
    for r in 1..=8 {
        let w = hypercube_witnesses(r)?;
        cx.check(&format!("Q{r}"), "weight-threshold witnesses", w.validate(), || format!("{w:?}"));
    }
    Ok(())
}

/// `h1 = ĥ = h` and optionally `g1 = ĝ = g` (values within tolerance).
fn expect_h1_g1(cx: &mut Ctx, case: &str, g: &BipartiteGraph, h: f64, gv: Option<f64>) -> Result<(), Error> {
    let tol = cx.cfg.tol;
    if let Some(h1) = cx.primal(case, Bound::H1, g)? {
        cx.close(case, "h1", h1, h, tol);
    }
    if let Some(hh) = cx.ok(case, "h_hat", spectral::h_hat(g))? {
        cx.close(case, "h_hat", hh, h, 1e-9);
    }
    if let Some(gv) = gv {
        if let Some(g1) = cx.primal(case, Bound::G1, g)? {
            cx.close(case, "g1", g1, gv, tol);
        }
        if let Some(gh) = cx.ok(case, "g_hat", spectral::g_hat(g))? {
            cx.close(case, "g_hat", gh, gv, 1e-9);
        }
    }
    Ok(())
}
