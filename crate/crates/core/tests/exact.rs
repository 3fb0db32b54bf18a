use bibound::exact::*;
use bibound::graph::{f_graph, family};
use bibound::*;
use proptest::prelude::*;

fn bipartite_strategy(max_side: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(a, b)| {
        proptest::collection::vec(any::<bool>(), a * b).prop_map(move |bits| {
            let e = (0..a * b).filter(|&k| bits[k]).map(|k| (k / b, k % b));
            BipartiteGraph::new(a, b, e).unwrap()
        })
    })
}

/// Every biindependent pair is dominated by `(A, right side minus N(A))`,
/// so scanning subsets of the left side is enough.
fn naive(g: &BipartiteGraph) -> (usize, usize, Rational, usize) {
    let b = g.biadjacency();
    let (mut alpha, mut prod, mut ratio, mut bal) = (0, 0, Rational::from_integer(0), 0);
    for mask in 0u32..1 << g.n1() {
        let x = mask.count_ones() as usize;
        let y = (0..g.n2()).filter(|&j| (0..g.n1()).all(|i| mask >> i & 1 == 0 || b[(i, j)] == 0.0)).count();
        alpha = alpha.max(x + y);
        prod = prod.max(x * y);
        if x + y > 0 {
            ratio = ratio.max(Rational::new((x * y) as i64, (x + y) as i64));
        }
        bal = bal.max(x.min(y));
    }
    (alpha, prod, ratio, bal)
}

fn single_edge() -> BipartiteGraph {
    BipartiteGraph::new(2, 2, [(0, 0)]).unwrap()
}

#[test]
fn single_edge_values() {
    let r = exact_bipartite_parameters(&single_edge(), DEFAULT_BUDGET).unwrap();
    assert_eq!((r.alpha, r.g, r.h, r.alpha_bal), (3, 2, Rational::new(2, 3), 2));
    assert_eq!((r.g_bal, r.h_bal), (1, Rational::new(1, 2)));
    assert!(r.witnesses_valid(&single_edge()));
}

#[test]
fn matching_and_crown_values() {
    let m = exact_bipartite_parameters(&family::perfect_matching(5), DEFAULT_BUDGET).unwrap();
    assert_eq!((m.alpha, m.g, m.h), (5, 6, Rational::new(6, 5)));
    let c = exact_bipartite_parameters(&family::crown(6), DEFAULT_BUDGET).unwrap();
    assert_eq!((c.alpha, c.g, c.h, c.alpha_bal), (6, 1, Rational::new(1, 2), 2));
    assert_eq!(c.h_bal, Rational::from_integer(1) / 2);
    for n in 2..=8 {
        let m = exact_bipartite_parameters(&family::perfect_matching(n), DEFAULT_BUDGET).unwrap();
        let k = n as i64;
        assert_eq!(m.g as i64, (k / 2) * (k - k / 2));
        assert!(verify_relation_chain(&m).holds);
    }
}

#[test]
fn complete_bipartite_has_no_balanced_pair() {
    let r = exact_bipartite_parameters(&family::complete_bipartite(3, 4), DEFAULT_BUDGET).unwrap();
    assert_eq!((r.alpha, r.alpha_bal, r.g, r.h), (4, 0, 0, Rational::from_integer(0)));
}

#[test]
fn general_parameters() {
    let k4 = exact_general_parameters(&family::complete(4), DEFAULT_BUDGET).unwrap();
    assert_eq!((k4.g_bi, k4.g_bc), (0, 4));
    assert_eq!(k4.h_bc, Rational::from_integer(1));
    let e4 = exact_general_parameters(&family::empty(4), DEFAULT_BUDGET).unwrap();
    assert_eq!((e4.g_bi, e4.g_bc), (4, 0));
    let c6 = exact_general_parameters(&family::cycle(6), DEFAULT_BUDGET).unwrap();
    assert_eq!(c6.g_bc, 2);
}

#[test]
fn cliques() {
    assert_eq!(omega(&family::complete(5), DEFAULT_BUDGET).unwrap(), 5);
    assert_eq!(omega(&family::cycle(5), DEFAULT_BUDGET).unwrap(), 2);
    assert_eq!(omega(&family::petersen(), DEFAULT_BUDGET).unwrap(), 2);
    assert_eq!(omega(&family::empty(3), DEFAULT_BUDGET).unwrap(), 1);
    assert_eq!(alpha_general(&family::petersen(), DEFAULT_BUDGET).unwrap(), 4);
    assert_eq!(alpha_general(&f_graph(), DEFAULT_BUDGET).unwrap(), omega(&f_graph().complement(), DEFAULT_BUDGET).unwrap());
    let k = max_clique(&f_graph(), DEFAULT_BUDGET).unwrap();
    assert_eq!(k.len(), 3);
    assert!(k.iter().all(|&u| k.iter().all(|&v| u == v || f_graph().has_edge(u, v))));
}

#[test]
fn maximal_sets_of_a_path() {
    let mut sets = Vec::new();
    let count = for_each_maximal_independent_set(&family::path(4), 100, |s| sets.push(s.iter().collect::<Vec<_>>())).unwrap();
    sets.sort();
    assert_eq!(count, 3);
    assert_eq!(sets, [vec![0, 2], vec![0, 3], vec![1, 3]]);
}

#[test]
fn budget_is_enforced() {
    let g = family::perfect_matching(12);
    assert!(matches!(exact_bipartite_parameters(&g, 1000), Err(Error::Budget(1000))));
    assert!(exact_bipartite_parameters(&g, 1 << 12).is_ok());
}

#[test]
fn gadget_equivalence_cases() {
    let two_edges = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
    assert_eq!(verify_gadget_equivalence(&two_edges, DEFAULT_BUDGET).unwrap(), (true, true));
    let p3_k1 = Graph::new(4, [(0, 1), (1, 2)]).unwrap();
    assert_eq!(verify_gadget_equivalence(&p3_k1, DEFAULT_BUDGET).unwrap(), (true, true));
    let c6 = family::cycle(6);
    assert_eq!(verify_gadget_equivalence(&c6, DEFAULT_BUDGET).unwrap(), (false, false));
    assert!(matches!(verify_gadget_equivalence(&family::cycle(4), DEFAULT_BUDGET), Err(Error::Precondition(_))));
    assert_eq!(alpha_bipartite(&hardness_gadget(&family::path(2))), 5);
}

#[test]
fn a_sequence_values() {
    let a: Vec<u128> = (0..=6).map(a_sequence).collect();
    assert_eq!(a, [0, 0, 2, 4, 10, 20, 44]);
    let ratio = a_sequence(12) as f64 / 4096.0;
    assert!((0.7..=1.0).contains(&ratio));
}

#[test]
fn hypercube_witness_sets() {
    let w = hypercube_witnesses(2).unwrap();
    assert_eq!((w.lower.clone(), w.upper.clone()), (vec![0], vec![3]));
    for r in 1..=8 {
        assert!(hypercube_witnesses(r).unwrap().validate(), "r = {r}");
    }
    assert!(hypercube_witnesses(0).is_err());
    for r in 2..=5 {
        let ex = exact_bipartite_parameters(&family::hypercube(r), DEFAULT_BUDGET).unwrap();
        assert_eq!(ex.alpha_bal as u128, a_sequence(r as u32 - 1), "r = {r}");
    }
}

#[test]
fn relation_chain_flags_bad_reports() {
    let mut r = exact_bipartite_parameters(&single_edge(), DEFAULT_BUDGET).unwrap();
    assert!(verify_relation_chain(&r).holds);
    r.h = Rational::from_integer(5);
    let bad = verify_relation_chain(&r);
    assert!(!bad.holds && !bad.failures.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enumeration_matches_naive_scan(g in bipartite_strategy(6)) {
        let r = exact_bipartite_parameters(&g, DEFAULT_BUDGET).unwrap();
        let (alpha, prod, ratio, bal) = naive(&g);
        prop_assert_eq!(r.alpha, alpha);
        prop_assert_eq!(r.g, prod);
        prop_assert_eq!(r.h, ratio);
        prop_assert_eq!(r.alpha_bal, 2 * bal);
        prop_assert!(r.witnesses_valid(&g));
        prop_assert!(verify_relation_chain(&r).holds);
    }

    #[test]
    fn matching_agrees_with_enumeration(g in bipartite_strategy(7)) {
        let r = exact_bipartite_parameters(&g, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(alpha_bipartite(&g), r.alpha);
        prop_assert!(maximum_matching(&g) <= g.n1().min(g.n2()));
    }
}
