use bibound::groups::*;
use bibound::verify::group_corpus;
use bibound::Error;
use proptest::prelude::*;

/// Largest product-free subset by scanning every subset.
fn brute_force(g: &FiniteGroup) -> usize {
    let n = g.order();
    (0u32..1 << n)
        .filter(|&mask| {
            let a: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            a.iter().all(|&x| a.iter().all(|&y| mask >> g.mul(x, y) & 1 == 0))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

#[test]
fn tables_are_validated() {
    assert!(FiniteGroup::from_table(vec![]).is_err());
    assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
    assert!(FiniteGroup::from_table(vec![vec![0, 2], vec![1, 0]]).is_err());
    // Latin square without associativity
    let loop5 = vec![
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    assert!(FiniteGroup::from_table(loop5).is_err());
    let z3 = FiniteGroup::from_table(vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]]).unwrap();
    assert_eq!(z3.identity(), 2);
}

#[test]
fn named_groups() {
    assert_eq!(FiniteGroup::cyclic(7).order(), 7);
    assert!(FiniteGroup::cyclic(7).is_abelian());
    let p = FiniteGroup::product_of_cyclic(&[2, 2, 3]);
    assert_eq!(p.order(), 12);
    assert!(p.is_abelian());
    let d = FiniteGroup::dihedral(5);
    assert_eq!(d.order(), 10);
    assert!(!d.is_abelian());
    let s = FiniteGroup::symmetric(4);
    assert_eq!(s.order(), 24);
    assert!(!s.is_abelian());
    assert_eq!(FiniteGroup::symmetric_odd_elements(4).len(), 12);
    assert!(is_product_free(&s, &FiniteGroup::symmetric_odd_elements(4)).unwrap());
}

#[test]
fn json_round_trip() {
    let d = FiniteGroup::dihedral(4);
    assert_eq!(FiniteGroup::from_json(&d.to_json()).unwrap(), d);
    assert!(FiniteGroup::from_json(r#"{"order":2,"table":[[0,1],[1,1]]}"#).is_err());
    assert!(FiniteGroup::from_json(r#"{"order":3,"table":[[0,1],[1,0]]}"#).is_err());
}

#[test]
fn product_free_sets() {
    let z5 = FiniteGroup::cyclic(5);
    assert!(is_product_free(&z5, &[2, 3]).unwrap());
    assert!(!is_product_free(&z5, &[1, 2]).unwrap());
    assert!(!is_product_free(&z5, &[0]).unwrap());
    assert!(is_product_free(&z5, &[9]).is_err());
    let expected = [(2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (8, 4), (9, 3), (10, 5)];
    for (n, size) in expected {
        let (k, set) = max_product_free(&FiniteGroup::cyclic(n), DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(k, size, "Z_{n}");
        assert!(is_product_free(&FiniteGroup::cyclic(n), &set).unwrap());
    }
    assert_eq!(max_product_free(&FiniteGroup::symmetric(3), 20).unwrap().0, 3);
    assert!(matches!(max_product_free(&FiniteGroup::symmetric(4), 20), Err(Error::Budget(20))));
}

#[test]
fn search_matches_brute_force_on_corpus() {
    for (name, g) in group_corpus() {
        if g.order() > 16 {
            continue;
        }
        let (k, set) = max_product_free(&g, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(k, brute_force(&g), "{name}");
        assert_eq!(set.len(), k);
    }
}

#[test]
fn cayley_graph_is_regular() {
    let g = FiniteGroup::dihedral(4);
    let c = cayley_bipartite(&g, &[1, 2, 5]).unwrap();
    assert_eq!((c.n1(), c.n2(), c.regular_degree()), (8, 8, Some(3)));
    assert!(cayley_bipartite(&g, &[]).is_err());
    assert!(cayley_bipartite(&g, &[8]).is_err());
}

#[test]
fn spectral_report() {
    let s3 = FiniteGroup::symmetric(3);
    let odd = FiniteGroup::symmetric_odd_elements(3);
    let r = gowers_report(&s3, &odd, 1, 1e-9).unwrap();
    assert_eq!((r.order, r.size), (6, 3));
    assert!(r.lambda2_ok && r.half_size_ok && r.cap_ok);
    assert!(matches!(gowers_report(&s3, &[0], 1, 1e-9), Err(Error::Precondition(_))));
    assert!(gowers_report(&s3, &odd, 0, 1e-9).is_err());
    // a set above n/(1 + k^{1/3}) for an overstated k
    let big = gowers_report(&s3, &odd, 8, 1e-9).unwrap();
    assert!(!big.cap_ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Characters of an abelian group bound the second singular value.
    #[test]
    fn abelian_sets_satisfy_spectral_bounds(n in 2usize..=12, seed in any::<u32>()) {
        let g = FiniteGroup::cyclic(n);
        let a: Vec<usize> = (0..n).filter(|&i| seed >> i & 1 == 1).collect();
        prop_assume!(!a.is_empty() && is_product_free(&g, &a).unwrap());
        let r = gowers_report(&g, &a, 1, 1e-9).unwrap();
        prop_assert!(r.lambda2_ok && r.half_size_ok);
    }

    #[test]
    fn search_matches_brute_force(n in 1usize..=14) {
        let g = FiniteGroup::cyclic(n);
        prop_assert_eq!(max_product_free(&g, 20).unwrap().0, brute_force(&g));
    }
}
