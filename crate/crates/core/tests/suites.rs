use bibound::graph::family;
use bibound::report::{bipartite_report, general_report, ReportConfig, ALL_IDS};
use bibound::verify::*;
use bibound::*;

fn run(name: &str) {
    let r = run_suite(name, &VerifyConfig::default()).unwrap();
    assert!(r.checks > 0, "{name} ran no checks");
    let shown: Vec<String> = r.failures.iter().take(10).map(|f| format!("{} | {} | {}", f.case, f.check, f.detail)).collect();
    assert!(r.passed(), "{name}: {} failures\n{}", r.failures.len(), shown.join("\n"));
    for c in &r.certified {
        assert!(certificate_issues(c).is_empty(), "{name}: {} {:?}", c.problem.name, certificate_issues(c));
    }
}

#[test]
fn suite_relations() {
    run("relations");
}

#[test]
fn suite_gadgets() {
    run("gadgets");
}

#[test]
fn suite_spectral() {
    run("spectral");
}

#[test]
fn suite_sdp_duality() {
    run("sdp-duality");
}

#[test]
fn suite_balanced() {
    run("balanced");
}

#[test]
fn suite_groups() {
    run("groups");
}

#[test]
fn suite_examples() {
    run("examples");
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(run_suite("nope", &VerifyConfig::default()).is_err());
    assert_eq!(SUITES.len(), 7);
}

#[test]
fn seeded_corpus_is_reproducible() {
    let a = seeded_bipartite(7, 20, 12);
    assert_eq!(a, seeded_bipartite(7, 20, 12));
    assert_ne!(a, seeded_bipartite(8, 20, 12));
    assert!(a.iter().all(|g| g.n() <= 12 && g.n1() >= 1 && g.n2() >= 1));
}

#[test]
fn full_report_on_crown() {
    let g = family::crown(5);
    let rep = bipartite_report(&g, &ALL_IDS, &ReportConfig::default()).unwrap();
    assert!(rep.violations().is_empty(), "{:?}", rep.violations());
    assert!(rep.checks.len() > 20);
    assert!((rep.value("h1").unwrap() - 0.5).abs() < 1e-6);
    assert!((rep.value("g1").unwrap() - 25.0 / 24.0).abs() < 1e-6);
    assert_eq!(rep.entries["h"].exact.as_ref().map(|f| (f.num, f.den)), Some((1, 2)));
    assert_eq!(rep.digest, g.digest());
    for c in &rep.certified {
        assert!(certificate_issues(c).is_empty());
    }
}

#[test]
fn report_on_irregular_graph_skips_spectral_entries() {
    let g = BipartiteGraph::new(2, 2, [(0, 0)]).unwrap();
    let rep = bipartite_report(&g, &ALL_IDS, &ReportConfig::default()).unwrap();
    assert!(rep.violations().is_empty());
    assert!((rep.value("h_bal1").unwrap() - 2.0 / 3.0).abs() < 1e-6);
    assert!(rep.value("h_hat").is_none());
    assert!(rep.entries["h_hat"].status.contains("not regular"));
}

#[test]
fn general_report_on_petersen() {
    let rep = general_report(&family::petersen(), &ALL_IDS, &ReportConfig::default()).unwrap();
    assert!(rep.violations().is_empty(), "{:?}", rep.violations());
    assert!((rep.value("theta").unwrap() - 4.0).abs() < 1e-6);
    assert!((rep.value("hoffman").unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn unknown_bound_id() {
    let g = family::crown(3);
    assert!(matches!(bipartite_report(&g, &["h9"], &ReportConfig::default()), Err(Error::InvalidParameter(_))));
}

#[test]
fn tampered_certificate_is_flagged() {
    let g = family::crown(4);
    let v = models::solve_bound(models::Bound::H1, &g, models::Side::Primal, &Default::default()).unwrap();
    let mut c = v.certified.unwrap();
    assert!(certificate_issues(&c).is_empty());
    c.result.primal_value += 0.1;
    assert!(!certificate_issues(&c).is_empty());
}

#[test]
fn cycle_doubles_by_formula() {
    for n in 3..=9 {
        let (h, g) = cycle_double_exact(n);
        let ex = exact::exact_bipartite_parameters(&extended_bipartite_double(&family::cycle(n)), exact::DEFAULT_BUDGET).unwrap();
        assert_eq!((h, g), (ex.h, ex.g), "n = {n}");
    }
}
