//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Every tolerance and time limit is pinned below.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bibound::exact::*;
use bibound::graph::family;
use bibound::groups::*;
use bibound::models::*;
use bibound::report::{bipartite_report, ReportConfig, ALL_IDS};
use bibound::spectral::*;
use bibound::verify::{certificate_issues, graph_classes, seeded_bipartite};
use bibound::*;
use bibound_sdp::SolverConfig;
use nalgebra::SymmetricEigen;

/// Solver values against closed forms.
const TOL: f64 = 1e-6;
/// Spectral-link equalities.
const LINK_TOL: f64 = 1e-5;
/// Inequalities between solver values.
const SLACK: f64 = 1e-6;
/// Product-free half-size inequality.
const GROUP_TOL: f64 = 1e-9;
/// Certificate duality gap, relative to `1 + |value|`.
const CERT_GAP: f64 = 1e-8;
/// Smallest eigenvalue allowed in a returned PSD block.
const CERT_EIG: f64 = 1e-8;
/// Primal against dual model.
const DUAL_TOL: f64 = 1e-6;
/// Crown strictness margin for `h1 < sqrt(g1)/2`.
const CROWN_MARGIN: f64 = 1e-3;
/// Seed of the random bipartite corpus.
const SEED: u64 = 1;

#[derive(Default)]
struct Run {
    checks: usize,
    failures: Vec<String>,
    certified: Vec<Certified>,
}

impl Run {
    fn check(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check(|| format!("{what}: got {got:.10}, want {want:.10}"), (got - want).abs() <= tol);
    }

    fn le(&mut self, what: &str, a: f64, b: f64) {
        self.check(|| format!("{what}: {a:.10} > {b:.10}"), a <= b + SLACK);
    }

    fn bound_side(&mut self, b: Bound, g: &BipartiteGraph, side: Side) -> f64 {
        match solve_bound(b, g, side, &SolverConfig::default()) {
            Ok(v) => {
                self.certified.extend(v.certified);
                v.value
            }
            Err(e) => {
                self.check(|| format!("{} ({side:?}) on {g}: {e}", b.id()), false);
                f64::NAN
            }
        }
    }

    fn bound(&mut self, b: Bound, g: &BipartiteGraph) -> f64 {
        self.bound_side(b, g, Side::Primal)
    }

    /// Solves `b` on `g` and compares against `want`.
    fn expect(&mut self, what: &str, b: Bound, g: &BipartiteGraph, want: f64, tol: f64) -> f64 {
        let v = self.bound(b, g);
        self.close(what, v, want, tol);
        v
    }

    fn exact(&mut self, g: &BipartiteGraph) -> ExactReport {
        exact_bipartite_parameters(g, DEFAULT_BUDGET).unwrap_or_else(|e| panic!("exact values of {g}: {e}"))
    }
}

fn rat(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn single_edge() -> BipartiteGraph {
    BipartiteGraph::new(2, 2, [(0, 0)]).unwrap()
}

fn golden(run: &mut Run) {
    let g = single_edge();
    let ex = run.exact(&g);
    let got = (ex.alpha, ex.alpha_bal, ex.g, ex.h);
    run.check(|| format!("exact values {got:?}"), got == (3, 2, 2, Rational::new(2, 3)));
    let h1 = run.bound(Bound::H1, &g);
    run.close("h1", h1, 0.7071068, TOL);
    let h1p = run.bound(Bound::H1Prime, &g);
    run.check(|| format!("h1' = {h1p} above 0.70706"), h1p <= 0.70706);
    run.check(|| format!("h1' = {h1p} within 5e-5 of sqrt(2)/2"), h1p <= 0.5f64.sqrt() - 5e-5);
    run.expect("h_bal1", Bound::HBal1, &g, 2.0 / 3.0, TOL);
    run.expect("g_bal1", Bound::GBal1, &g, 4.0 / 3.0, TOL);
    run.expect("las_bal1", Bound::LasBal1, &g, 9.0 / 4.0, TOL);
    run.expect("theta_bal", Bound::ThetaBal, &g, 8.0 / 3.0, TOL);
}

fn matching(run: &mut Run) {
    for n in 2..=8 {
        let g = family::perfect_matching(n);
        let nf = n as f64;
        let label = |s: &str| format!("M_{n} {s}");
        run.expect(&label("h1"), Bound::H1, &g, nf / 4.0, TOL);
        run.close(&label("h_hat"), h_hat(&g).unwrap(), nf / 4.0, TOL);
        run.expect(&label("g1"), Bound::G1, &g, nf * nf / 4.0, TOL);
        run.close(&label("g_hat"), g_hat(&g).unwrap(), nf * nf / 4.0, TOL);
        let ex = run.exact(&g);
        let want = (n / 2) * n.div_ceil(2);
        run.check(|| label(&format!("g = {}", ex.g)), ex.g == want);
        run.check(|| label(&format!("h = {}", ex.h)), ex.h == Rational::new(want as i64, n as i64));
    }
}

fn crown(run: &mut Run) {
    for n in 3..=8 {
        let g = family::crown(n);
        let nf = n as f64;
        let h1 = run.bound(Bound::H1, &g);
        let g1 = run.bound(Bound::G1, &g);
        run.close(&format!("crown {n} h1"), h1, 0.5, TOL);
        if n >= 4 {
            run.close(&format!("crown {n} g1"), g1, nf * nf / (8.0 * (nf - 2.0)), TOL);
        }
        if n >= 5 {
            let margin = 0.5 * g1.sqrt() - h1;
            run.check(|| format!("crown {n}: sqrt(g1)/2 - h1 = {margin}"), margin >= CROWN_MARGIN);
        }
        let ex = run.exact(&g);
        run.check(|| format!("crown {n}: g = {}, h = {}", ex.g, ex.h), ex.g == 1 && ex.h == Rational::new(1, 2));
    }
}

/// `φ_H(C_n)` from the Laplacian spectrum `2 - 2cos(2πk/n)`.
fn phi_h_cycle(n: usize) -> f64 {
    let mu = |k: usize| 2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos();
    n as f64 / 2.0 * (1.0 - mu(1) / mu(n / 2))
}

fn cycles(run: &mut Run) {
    for n in (4..=12).step_by(2) {
        let g = family::cycle_bipartite(n).unwrap();
        let c = (2.0 * PI / n as f64).cos();
        run.expect(&format!("h1(C_{n})"), Bound::H1, &g, n as f64 / 4.0 * c / (c + 1.0), TOL);
    }
    for n in 3..=9 {
        let b0 = extended_bipartite_double(&family::cycle(n));
        run.expect(&format!("h1(B0(C_{n}))"), Bound::H1, &b0, phi_h_cycle(n) / 2.0, TOL);
        let ex = run.exact(&b0);
        let k = n as i64;
        let (h, g) = if n % 2 == 0 {
            (Rational::new(k - 2, 4), (k - 2) * (k - 2) / 4)
        } else {
            (Rational::new((k - 1) * (k - 3), 4 * (k - 2)), (k - 1) * (k - 3) / 4)
        };
        run.check(|| format!("B0(C_{n}): h = {}, g = {}; want {h}, {g}", ex.h, ex.g), ex.h == h && ex.g as i64 == g);
    }
}

fn hypercubes(run: &mut Run) {
    // a(1), ..., a(4)
    let a = [0, 2, 4, 10];
    for r in 2..=5 {
        let g = family::hypercube(r);
        let rf = r as f64;
        let want = 2f64.powi(r as i32 - 3) * (rf - 2.0) / (rf - 1.0);
        run.expect(&format!("h1(Q_{r})"), Bound::H1, &g, want, TOL);
        let ex = run.exact(&g);
        run.check(|| format!("alpha_bal(Q_{r}) = {}", ex.alpha_bal), ex.alpha_bal == a[r - 2]);
        run.check(|| format!("a({}) = {}", r - 1, a_sequence(r as u32 - 1)), a_sequence(r as u32 - 1) == a[r - 2] as u128);
    }
    for r in 1..=8 {
        let ok = hypercube_witnesses(r).map(|w| w.validate()).unwrap_or(false);
        run.check(|| format!("witnesses for r = {r}"), ok);
    }
}

fn gadgets(run: &mut Run) {
    let four = graph_classes(4, None).unwrap();
    let six = graph_classes(6, Some(6)).unwrap();
    run.check(|| format!("{} four-vertex classes", four.len()), four.len() == 11);
    run.check(|| format!("{} six-vertex six-edge classes", six.len()), six.len() == 21);
    for g in four.iter().chain(&six) {
        let (n, m) = (g.n(), g.m());
        let h = hardness_gadget(g);
        let alpha = alpha_bipartite(&h);
        run.check(|| format!("{g}: alpha(H_G) = {alpha}"), alpha == n + m * (n + 1));
        let ex = run.exact(&h);
        run.check(|| format!("{g}: enumerated alpha {}", ex.alpha), ex.alpha == alpha);
        // Only graphs with |E| = |V|(|V|-2)/4 carry the equivalence.
        match verify_gadget_equivalence(g, DEFAULT_BUDGET) {
            Ok((clique, bal)) => run.check(|| format!("{g} {:?}: clique {clique}, balanced {bal}", g.edges()), clique == bal),
            Err(Error::Precondition(_)) => run.check(|| format!("{g}: precondition rejected a qualifying graph"), 4 * m != n * (n - 2)),
            Err(e) => run.check(|| format!("{g}: {e}"), false),
        }
    }
}

fn chains(run: &mut Run) {
    let cfg = ReportConfig::default();
    let graphs = seeded_bipartite(SEED, 200, 14);
    run.check(|| format!("{} graphs", graphs.len()), graphs.len() == 200 && graphs.iter().all(|g| g.n() <= 14));
    for g in &graphs {
        let ex = run.exact(g);
        let chain = verify_relation_chain(&ex);
        run.check(|| format!("{g}: exact chain {:?}", chain.failures), chain.holds);
        let rep = match bipartite_report(g, &ALL_IDS, &cfg) {
            Ok(r) => r,
            Err(e) => {
                run.check(|| format!("{g}: report {e}"), false);
                continue;
            }
        };
        for v in rep.violations() {
            run.check(|| format!("{g}: {} ({} vs {})", v.relation, v.lhs, v.rhs), false);
        }
        let val = |id: &str| rep.value(id).unwrap_or(f64::NAN);
        let (h, gg, alpha) = (rat(ex.h), ex.g as f64, ex.alpha as f64);
        let (h1, g1, h1p) = (val("h1"), val("g1"), val("h1_prime"));
        run.le("h <= sqrt(g)/2", h, 0.5 * gg.sqrt());
        run.le("sqrt(g)/2 <= h1", 0.5 * gg.sqrt(), h1);
        run.le("h1 <= sqrt(g1)/2", h1, 0.5 * g1.sqrt());
        run.le("sqrt(g1)/2 <= alpha/4", 0.5 * g1.sqrt(), alpha / 4.0);
        run.le("h <= h1'", h, h1p);
        run.le("h1' <= h1", h1p, h1);
        let (lb, gb, hb, tb) = (val("las_bal1"), val("g_bal1"), val("h_bal1"), val("theta_bal"));
        run.le("alpha_bal <= las_bal1", ex.alpha_bal as f64, lb);
        run.le("las_bal1/4 <= sqrt(g_bal1)/2", lb / 4.0, 0.5 * gb.max(0.0).sqrt());
        run.le("sqrt(g_bal1)/2 <= h_bal1", 0.5 * gb.max(0.0).sqrt(), hb);
        run.close("h_bal1 = theta_bal/4", hb, tb / 4.0, SLACK);
        run.le("h_bal1 <= h1", hb, h1);
        run.certified.extend(rep.certified);
    }
}

fn spectral_links(run: &mut Run) {
    let mut corpus: Vec<(String, Graph)> = vec![
        ("C4".into(), family::cycle(4)),
        ("C5".into(), family::cycle(5)),
        ("C6".into(), family::cycle(6)),
        ("Petersen".into(), family::petersen()),
        ("K4".into(), family::complete(4)),
        ("Q3".into(), family::hypercube(3).flatten()),
    ];
    corpus.extend((4..=6).map(|n| (format!("crown {n}"), family::crown(n).flatten())));
    let cfg = SolverConfig::default();
    for (name, g) in &corpus {
        // every member is vertex- and edge-transitive
        let phi = haemers_phi_h(g).unwrap();
        let b0 = extended_bipartite_double(g);
        run.expect(&format!("{name}: h1(B0) = phi_H/2"), Bound::H1, &b0, phi / 2.0, LINK_TOL);

        let c = compare_double_bounds(g).unwrap();
        run.le(&format!("{name}: phi_H/2 <= h_hat(B0)"), c.half_phi_h, c.h_hat_extended_double);
        let direct = h_hat(&b0).unwrap();
        run.close(&format!("{name}: h_hat(B0) from B0"), c.h_hat_extended_double, direct, LINK_TOL);
        let equal = (c.h_hat_extended_double - c.half_phi_h).abs() <= 1e-9;
        run.check(|| format!("{name}: equality {equal}, predicted {}", c.equality_predicted), equal == c.equality_predicted);

        let bd = bipartite_double(g);
        let twice = 2.0 * h_hat(&bd).unwrap();
        run.close(&format!("{name}: 2 h_hat(B(G))"), c.twice_h_hat_double, twice, LINK_TOL);
        run.le(&format!("{name}: Hoffman <= 2 h_hat(B(G))"), hoffman_bound(g).unwrap(), twice);
        let theta = match solve_value(model_theta(g, ThetaForm::Trace, Side::Primal), &cfg) {
            Ok((v, c)) => {
                run.certified.push(c);
                v
            }
            Err(e) => panic!("theta of {name}: {e}"),
        };
        let h1 = run.bound(Bound::H1, &bd);
        run.le(&format!("{name}: theta <= 2 h1(B(G))"), theta, 2.0 * h1);

        if let Ok(b) = g.as_bipartite() {
            let gc = g.complement();
            let bc = b.bipartite_complement();
            let lhs = run.bound(Bound::H1, &extended_bipartite_double(&gc));
            let rhs = run.bound(Bound::H1, &bc);
            run.close(&format!("{name}: h1(B0(complement)) = h1(bipartite complement)"), lhs, rhs, LINK_TOL);
            let cc = bipartite_complement_bounds(&b).unwrap();
            run.close(&format!("{name}: h_hat(bipartite complement)"), cc.h_hat_complement, h_hat(&bc).unwrap(), LINK_TOL);
            run.close(&format!("{name}: phi_H(complement)/2"), cc.half_phi_h_complement, haemers_phi_h(&gc).unwrap() / 2.0, LINK_TOL);
            run.le(&format!("{name}: h_hat(bc) <= phi_H(complement)/2"), cc.h_hat_complement, cc.half_phi_h_complement);
            let sv = singular_values(&b);
            let (r, l2, n) = (sv[0], sv.get(1).copied().unwrap_or(0.0), b.n1() as f64);
            let predicted = l2 < r - 1e-9 && r < n;
            let strict = cc.h_hat_complement < cc.half_phi_h_complement - 1e-9;
            run.check(|| format!("{name}: strict {strict}, lambda2 < r < n {predicted}"), strict == predicted);
        }
    }
}

fn balanced(run: &mut Run) {
    let mut graphs: Vec<BipartiteGraph> = (2..=6).map(family::perfect_matching).collect();
    graphs.extend((3..=7).map(family::crown));
    graphs.extend([4, 6, 8, 10].map(|n| family::cycle_bipartite(n).unwrap()));
    graphs.extend([family::hypercube(3), family::hypercube(4)]);
    for g in &graphs {
        let sv = singular_values(g);
        let (r, l2, n) = (sv[0], sv[1], g.n1() as f64);
        let closed = 2.0 * n * l2 / (r + l2);
        let hh = h_hat(g).unwrap();
        let tbh = run.bound(Bound::ThetaBalHat, g);
        run.close(&format!("{g}: theta_bal_hat = 2n l2/(r+l2)"), tbh, closed, TOL);
        run.close(&format!("{g}: theta_bal_hat = 4 h_hat"), tbh, 4.0 * hh, TOL);
        run.expect(&format!("{g}: las_bal_hat"), Bound::LasBalHat, g, tbh, TOL);
        run.expect(&format!("{g}: las_bal_tilde"), Bound::LasBalTilde, g, tbh, TOL);
        let gbh = run.bound(Bound::GBalHat, g);
        run.close(&format!("{g}: sqrt(g_bal_hat)/2 = h_hat"), 0.5 * gbh.max(0.0).sqrt(), hh, TOL);
    }
}

fn groups(run: &mut Run) {
    let mut corpus: Vec<(String, FiniteGroup, bool)> =
        (1..=12).map(|n| (format!("Z{n}"), FiniteGroup::cyclic(n), true)).collect();
    corpus.push(("Z2xZ2".into(), FiniteGroup::product_of_cyclic(&[2, 2]), true));
    corpus.push(("S3".into(), FiniteGroup::symmetric(3), false));
    corpus.push(("D4".into(), FiniteGroup::dihedral(4), false));
    for (name, g, abelian) in &corpus {
        run.check(|| format!("{name}: abelian flag"), g.is_abelian() == *abelian);
        let n = g.order();
        let mut best = 0;
        let mut sets = Vec::new();
        for mask in 1u32..1 << n {
            let a: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
            if a.iter().all(|&x| a.iter().all(|&y| mask >> g.mul(x, y) & 1 == 0)) {
                best = best.max(a.len());
                sets.push(a);
            }
        }
        let (k, found) = max_product_free(g, DEFAULT_ORDER_CAP).unwrap();
        run.check(|| format!("{name}: max product-free {k}, brute force {best}"), k == best);
        run.check(|| format!("{name}: returned set {found:?}"), found.len() == k && is_product_free(g, &found).unwrap());
        // k = 1 covers S3, whose sign character is one-dimensional.
        for a in sets {
            let rep = gowers_report(g, &a, 1, GROUP_TOL).unwrap();
            run.check(|| format!("{name} {a:?}: lambda2 {} > {}", rep.lambda2, rep.lambda2_bound), rep.lambda2_ok);
            run.check(|| format!("{name} {a:?}: |A| above cap {}", rep.cap), rep.cap_ok);
            run.check(|| format!("{name} {a:?}: |A|/2 > h_hat {}", rep.h_hat), a.len() as f64 / 2.0 <= rep.h_hat + GROUP_TOL);
        }
    }
}

fn min_eigenvalue(m: &nalgebra::DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

fn certification(run: &mut Run, earlier: Vec<Certified>) {
    let mut graphs = vec![
        single_edge(),
        family::perfect_matching(4),
        family::crown(5),
        family::cycle_bipartite(8).unwrap(),
        family::hypercube(3),
        family::complete_bipartite(2, 3),
    ];
    graphs.extend(seeded_bipartite(SEED + 1, 10, 10));
    for g in &graphs {
        for b in Bound::ALL {
            let p = run.bound_side(b, g, Side::Primal);
            let d = run.bound_side(b, g, Side::Dual);
            run.check(|| format!("{} on {g}: primal {p}, dual {d}", b.id()), (p - d).abs() <= DUAL_TOL);
        }
    }
    let all: Vec<Certified> = earlier.into_iter().chain(std::mem::take(&mut run.certified)).collect();
    run.check(|| "no certified results".into(), !all.is_empty());
    for c in &all {
        let r = &c.result;
        let name = &c.problem.name;
        let gap = (r.primal_value - r.dual_value).abs();
        run.check(|| format!("{name}: gap {gap:e}"), gap <= CERT_GAP * (1.0 + r.primal_value.abs()));
        let eig = r
            .x
            .iter()
            .filter_map(|v| v.matrix())
            .map(min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        run.check(|| format!("{name}: PSD block eigenvalue {eig:e}"), eig >= -CERT_EIG);
        let issues = certificate_issues(c);
        run.check(|| format!("{name}: {issues:?}"), issues.is_empty());
    }
    println!("    {} certified results re-checked", all.len());
}

struct Criterion {
    title: &'static str,
    limit: Duration,
    body: fn(&mut Run),
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { title: "single-edge golden values", limit: Duration::from_secs(5), body: golden },
        Criterion { title: "perfect matchings", limit: Duration::from_secs(30), body: matching },
        Criterion { title: "crown graphs", limit: Duration::from_secs(60), body: crown },
        Criterion { title: "cycles and extended doubles", limit: Duration::from_secs(120), body: cycles },
        Criterion { title: "hypercubes", limit: Duration::from_secs(120), body: hypercubes },
        Criterion { title: "hardness gadget", limit: Duration::from_secs(600), body: gadgets },
        Criterion { title: "inequality chains on seeded graphs", limit: Duration::from_secs(900), body: chains },
        Criterion { title: "spectral links", limit: Duration::from_secs(600), body: spectral_links },
        Criterion { title: "balanced symmetric programs", limit: Duration::from_secs(300), body: balanced },
        Criterion { title: "product-free sets", limit: Duration::from_secs(300), body: groups },
    ];
    let mut failed = 0;
    let mut certified = Vec::new();
    let mut report = |k: usize, title: &str, limit: Duration, f: &mut dyn FnMut(&mut Run)| {
        let start = Instant::now();
        let mut run = Run::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut run)));
        let elapsed = start.elapsed();
        if let Err(p) = outcome {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            run.failures.push(format!("panicked: {}", msg.unwrap_or_default()));
        }
        if elapsed > limit {
            run.failures.push(format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()));
        }
        let ok = run.failures.is_empty();
        println!(
            "{} criterion {k:>2}: {title} ({} checks, {:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            run.checks,
            elapsed.as_secs_f64()
        );
        for f in run.failures.iter().take(10) {
            println!("    {f}");
        }
        if !ok {
            failed += 1;
        }
        run.certified
    };
    for (k, c) in criteria.iter().enumerate() {
        let got = report(k + 1, c.title, c.limit, &mut |r| (c.body)(r));
        certified.extend(got);
    }
    let mut earlier = Some(certified);
    report(11, "solver certification", Duration::from_secs(600), &mut |r| {
        certification(r, earlier.take().unwrap_or_default())
    });
    if failed == 0 {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
