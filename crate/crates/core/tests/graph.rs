use bibound::exact::{omega, DEFAULT_BUDGET};
use bibound::graph::{f_graph, family, half_size_parameters};
use bibound::verify::graph_classes;
use bibound::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut e = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        e.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::new(n, e).unwrap()
        })
    })
}

fn bipartite_strategy(max_side: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(a, b)| {
        proptest::collection::vec(any::<bool>(), a * b).prop_map(move |bits| {
            let e = (0..a * b).filter(|&k| bits[k]).map(|k| (k / b, k % b));
            BipartiteGraph::new(a, b, e).unwrap()
        })
    })
}

/// Brute-force isomorphism test for tiny graphs.
fn isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.n() != h.n() || g.m() != h.m() {
        return false;
    }
    let n = g.n();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(k: usize, perm: &mut Vec<usize>, g: &Graph, h: &Graph) -> bool {
        if k == perm.len() {
            return g.edges().iter().all(|&(u, v)| h.has_edge(perm[u], perm[v]));
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if rec(k + 1, perm, g, h) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    rec(0, &mut perm, g, h)
}

#[test]
fn constructor_rejects_bad_edges() {
    assert!(Graph::new(3, [(0, 0)]).is_err());
    assert!(Graph::new(3, [(0, 3)]).is_err());
    assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
    assert!(BipartiteGraph::new(2, 2, [(0, 2)]).is_err());
    assert!(BipartiteGraph::new(2, 2, [(1, 1), (1, 1)]).is_err());
}

#[test]
fn double_of_an_edge_is_a_matching() {
    let b = bipartite_double(&family::path(2));
    assert_eq!((b.n1(), b.n2()), (2, 2));
    assert_eq!(b.edges(), &[(0, 1), (1, 0)]);
}

#[test]
fn double_of_triangle_is_six_cycle() {
    let b = bipartite_double(&family::cycle(3));
    assert_eq!(b.regular_degree(), Some(2));
    assert!(isomorphic(&b.flatten(), &family::cycle(6)));
}

#[test]
fn extended_doubles() {
    assert_eq!(extended_bipartite_double(&family::empty(4)), family::perfect_matching(4));
    assert!(extended_bipartite_double(&family::cycle(3)).is_complete());
}

/// `x -> (x mod 2^(r-1), last bit)` maps `Q_r` onto `B0(Q_{r-1})`, with the
/// copy chosen by parity so that edges land across the parts.
#[test]
fn hypercube_is_extended_double_of_smaller_hypercube() {
    for r in 2..=5 {
        let q = family::hypercube_graph(r);
        let d = extended_bipartite_double(&family::hypercube_graph(r - 1)).flatten();
        let half = 1usize << (r - 1);
        let map = |x: usize| {
            let low = x % half;
            let copy = (low.count_ones() as usize + (x / half)) % 2;
            copy * half + low
        };
        assert_eq!(q.m(), d.m());
        for &(x, y) in q.edges() {
            assert!(d.has_edge(map(x), map(y)), "r = {r}: {x}-{y}");
        }
    }
}

#[test]
fn complements() {
    assert_eq!(family::complete_bipartite(3, 3).bipartite_complement().m(), 0);
    assert_eq!(family::perfect_matching(4).bipartite_complement(), family::crown(4));
}

#[test]
fn expansion_join_examples() {
    let k6 = family::complete(2).expansion(3).unwrap();
    assert_eq!((k6.n(), k6.m()), (6, 15));
    let wheel = family::cycle(5).join(&family::complete(1));
    assert_eq!((wheel.n(), wheel.m()), (6, 10));
    assert!(family::cycle(4).expansion(0).is_err());
}

#[test]
fn family_shapes() {
    let c = family::crown(5);
    assert_eq!((c.n1(), c.n2(), c.m(), c.regular_degree()), (5, 5, 20, Some(4)));
    let q = family::hypercube(3);
    assert_eq!((q.n1(), q.n2(), q.m(), q.regular_degree()), (4, 4, 12, Some(3)));
    let c6 = family::cycle_bipartite(6).unwrap();
    assert_eq!(c6.flatten().m(), 6);
    assert_eq!(family::cycle(6).as_bipartite().unwrap().m(), 6);
    assert_eq!(family::cycle(6).bipartition().unwrap(), (vec![0, 2, 4], vec![1, 3, 5]));
    assert!(family::cycle_bipartite(5).is_err());
    assert!(family::cycle(5).as_bipartite().is_err());
    let p = family::petersen();
    assert_eq!((p.n(), p.m(), p.regular_degree()), (10, 15, Some(3)));
}

#[test]
fn fixed_six_vertex_graph() {
    let f = f_graph();
    assert_eq!((f.n(), f.m()), (6, 10));
    assert_eq!(omega(&f, DEFAULT_BUDGET).unwrap(), 3);
}

#[test]
fn hardness_gadget_layout() {
    let h = hardness_gadget(&family::path(2));
    assert_eq!((h.n1(), h.n2()), (5, 5));
    // matching, 3x3 block, and both endpoints joined to R_e
    assert_eq!(h.m(), 2 + 9 + 6);
    let two_edges = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
    assert_eq!(hardness_gadget(&two_edges).n1(), 4 + 2 * 5);
}

#[test]
fn half_size_reduction_counts() {
    let h = half_size_reduction(&family::cycle(6)).unwrap();
    assert_eq!(half_size_parameters(6, 6).unwrap().1, 14);
    assert_eq!((h.n(), h.m()), (52, 650));
    assert!(half_size_reduction(&family::cycle(5)).is_err());
}

#[test]
fn small_graph_class_counts() {
    let counts: Vec<usize> = (1..=5).map(|n| graph_classes(n, None).unwrap().len()).collect();
    assert_eq!(counts, [1, 2, 4, 11, 34]);
    assert_eq!(graph_classes(6, Some(6)).unwrap().len(), 21);
    assert!(graph_classes(7, None).is_err());
}

#[test]
fn json_files() {
    let b = AnyGraph::Bipartite(family::crown(3));
    assert_eq!(AnyGraph::from_json(&b.to_json()).unwrap(), b);
    let text = r#"{"type":"general","n":3,"edges":[[0,1],[1,2]]}"#;
    assert_eq!(AnyGraph::from_json(text).unwrap(), AnyGraph::General(family::path(3)));
    assert!(AnyGraph::from_json(r#"{"type":"general","n":2,"edges":[[0,2]]}"#).is_err());
    assert!(AnyGraph::from_json("{").is_err());
}

#[test]
fn pair_accessors() {
    let p = BiindependentPair::new(vec![1, 0], vec![2]);
    assert_eq!((p.sum(), p.product()), (3, 2));
    assert_eq!(p.ratio(), Rational::new(2, 3));
    assert_eq!(BiindependentPair::new(vec![], vec![]).ratio(), Rational::from_integer(0));
    assert!(!p.is_balanced());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_biadjacency_is_adjacency(g in graph_strategy(9)) {
        let a = g.adjacency();
        prop_assert_eq!(bipartite_double(&g).biadjacency(), a.clone());
        let n = g.n();
        prop_assert_eq!(extended_bipartite_double(&g).biadjacency(), a + DMatrix::identity(n, n));
    }

    #[test]
    fn complement_is_involution(g in graph_strategy(9), b in bipartite_strategy(6)) {
        prop_assert_eq!(g.complement().complement(), g.clone());
        prop_assert_eq!(g.complement().m() + g.m(), g.n() * (g.n() - 1) / 2);
        prop_assert_eq!(b.bipartite_complement().bipartite_complement(), b.clone());
        let j = DMatrix::from_element(b.n1(), b.n2(), 1.0);
        prop_assert_eq!(b.bipartite_complement().biadjacency(), j - b.biadjacency());
    }

    #[test]
    fn construction_counts(g in graph_strategy(6), h in graph_strategy(6), k in 1usize..=3) {
        let u = g.disjoint_union(&h);
        prop_assert_eq!((u.n(), u.m()), (g.n() + h.n(), g.m() + h.m()));
        let j = g.join(&h);
        prop_assert_eq!((j.n(), j.m()), (g.n() + h.n(), g.m() + h.m() + g.n() * h.n()));
        let x = g.expansion(k).unwrap();
        prop_assert_eq!((x.n(), x.m()), (k * g.n(), k * (k - 1) / 2 * g.n() + k * k * g.m()));
        prop_assert_eq!(omega(&x, DEFAULT_BUDGET).unwrap(), k * omega(&g, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn half_size_reduction_meets_edge_condition(g in graph_strategy(10)) {
        prop_assume!(g.n() % 2 == 0);
        let h = half_size_reduction(&g).unwrap();
        prop_assert_eq!(4 * h.m(), h.n() * (h.n() - 2));
    }

    #[test]
    fn flatten_round_trip(b in bipartite_strategy(6)) {
        let f = b.flatten();
        let left: Vec<usize> = (0..b.n1()).collect();
        let right: Vec<usize> = (b.n1()..b.n()).collect();
        prop_assert_eq!(f.as_bipartite_with(&left, &right).unwrap(), b.clone());
        prop_assert_eq!(b.sign_vector().iter().sum::<f64>(), b.n1() as f64 - b.n2() as f64);
    }
}
