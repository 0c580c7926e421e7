mod common;

use common::*;
use plu::conditions::{check_star, check_star_n, failure_is_consistent, star_failure_witness};
use plu::connectivity::{is_connected, is_n_connected};
use plu::morphism::{check_map, enumerate_pmorphisms, factor_through};
use plu::oracle::enumerate_domain_posets;
use plu::{PMorphism, Poset, Variety};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn star_domains() -> &'static [Arc<Poset>] {
    static D: OnceLock<Vec<Arc<Poset>>> = OnceLock::new();
    D.get_or_init(|| {
        enumerate_domain_posets(4, Variety::Omega)
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect()
    })
}

fn naive_pmorphisms(x: &Poset, y: &Poset) -> Vec<Vec<usize>> {
    let (nx, ny) = (x.len(), y.len());
    let total = ny.pow(nx as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let map: Vec<usize> = (0..nx)
            .map(|_| {
                let v = c % ny;
                c /= ny;
                v
            })
            .collect();
        if check_map(x, y, &map).is_ok() {
            out.push(map);
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(config(2_000))]

    #[test]
    fn order_axioms_and_restriction(seed in any::<u64>()) {
        let p = random_poset(&mut rng(seed), 12);
        prop_assert!(p.check_axioms());
        for n in 1..=3 {
            let r = p.restrict_n(n);
            prop_assert!(r.in_pn(n));
            prop_assert_eq!(r.restrict_n(n), r.clone());
        }
    }

    #[test]
    fn joins_are_least_upper_bounds(seed in any::<u64>()) {
        let p = random_poset(&mut rng(seed), 8);
        for a in 0..p.len() {
            for b in 0..p.len() {
                if let Some(j) = p.join(a, b) {
                    prop_assert!(p.leq(a, j) && p.leq(b, j));
                    prop_assert!(p.upper_bounds(a, b).iter().all(|u| p.leq(j, u)));
                }
            }
        }
    }

    #[test]
    fn star_conditions_agree(seed in any::<u64>()) {
        let p = random_poset(&mut rng(seed), 8);
        let all_n = (1..=p.minimals().len().max(1)).all(|n| check_star_n(&p, n));
        prop_assert_eq!(check_star(&p), all_n);
        for n in 1..=3 {
            // Only this direction holds in general; see restriction_can_repair_star_n.
            if check_star_n(&p, n) {
                prop_assert!(check_star_n(&p.restrict_n(n), n));
            }
            if p.in_pn(n) {
                prop_assert_eq!(check_star_n(&p, n), check_star_n(&p.restrict_n(n), n));
            }
            let w = star_failure_witness(&p, n);
            prop_assert_eq!(w.is_none(), check_star_n(&p, n));
            if let Some(f) = w {
                prop_assert!(failure_is_consistent(&p, &f));
            }
        }
    }

    #[test]
    fn pmorphism_enumeration_matches_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = Arc::new(random_poset(&mut r, 4));
        let y = Arc::new(random_poset(&mut r, 4));
        let mut got: Vec<Vec<usize>> = enumerate_pmorphisms(&x, &y).unwrap().iter().map(|u| u.map().to_vec()).collect();
        got.sort();
        prop_assert_eq!(got, naive_pmorphisms(&x, &y));
    }

    #[test]
    fn pmorphisms_commute_with_min(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = star_domains()[r.gen_range(0..star_domains().len())].clone();
        let y = Arc::new(random_poset(&mut r, 6));
        for u in enumerate_pmorphisms(&x, &y).unwrap() {
            for e in 0..x.len() {
                let img = plu::BitSet::from_indices(y.len(), x.min_below(e).iter().map(|m| u.apply(m)));
                prop_assert_eq!(&img, y.min_below(u.apply(e)));
            }
            prop_assert!(factor_through(&u, &u).unwrap().is_some());
        }
    }

    #[test]
    fn odot_laws_on_random_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_poset(&mut r, 5);
        let y = random_poset(&mut r, 5);
        prop_assert_eq!(odot_laws(&x, &y, &[1, 2, 3]), Ok(()));
    }

    #[test]
    fn duality_laws_on_random_posets(seed in any::<u64>()) {
        let p = random_poset(&mut rng(seed), 7);
        prop_assert_eq!(duality_round_trip(&p), Ok(()));
    }
}

proptest! {
    #![proptest_config(config(10_000))]

    #[test]
    fn connectedness_matches_definition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_poset(&mut r, 7);
        let y = random_subset(&mut r, p.len());
        prop_assert_eq!(is_connected(&p, &y), naive_connected(&p, &y));
        let n = r.gen_range(1..=3);
        let q = p.restrict_n(n);
        let yq = random_subset(&mut r, q.len());
        prop_assert_eq!(is_n_connected(&q, &yq, n).unwrap(), naive_n_connected(&q, &yq, n));
        if is_connected(&q, &yq) {
            prop_assert!(is_n_connected(&q, &yq, n).unwrap());
        }
    }

    #[test]
    fn extending_connected_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_poset(&mut r, 7);
        let y = sample_connected(&mut r, &p, None);
        prop_assert!(ext_con(&p, &y).is_ok(), "{:?}", ext_con(&p, &y));
        let n = r.gen_range(1..=3);
        let q = p.restrict_n(n);
        let yq = sample_connected(&mut r, &q, Some(n));
        prop_assert!(up_set_n_con(&q, &yq, n).is_ok(), "{:?}", up_set_n_con(&q, &yq, n));
    }

    #[test]
    fn images_of_star_domains_are_connected(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = star_domains()[r.gen_range(0..star_domains().len())].clone();
        let y = Arc::new(random_poset(&mut r, 7));
        prop_assert_eq!(range_con(&x, &y, None).map(|_| ()), Ok(()));
        let n = r.gen_range(1..=3);
        let xn = Arc::new(x.restrict_n(n));
        let yn = Arc::new(y.restrict_n(n));
        if check_star_n(&xn, n) {
            prop_assert_eq!(range_con(&xn, &yn, Some(n)).map(|_| ()), Ok(()));
        }
    }
}

#[test]
fn restriction_can_repair_star_n() {
    // x3, x4 sit over x0 with upper bounds x5 (over x0) and x6 (over x0, x1).
    // Without x6 the pair has the join x5.
    let p = Poset::from_covers(
        &["x0", "x1", "x2", "x3", "x4", "x5", "x6"],
        &[
            ("x0", "x2"),
            ("x1", "x6"),
            ("x2", "x3"),
            ("x2", "x4"),
            ("x3", "x5"),
            ("x3", "x6"),
            ("x4", "x5"),
            ("x4", "x6"),
        ],
    )
    .unwrap();
    assert!(!check_star_n(&p, 1));
    assert!(check_star_n(&p.restrict_n(1), 1));
}

#[test]
fn factor_through_is_transitive_on_chain_pairs() {
    let mut r = rng(SEED);
    for _ in 0..200 {
        let y = Arc::new(random_poset(&mut r, 5));
        let ds = star_domains();
        let us: Vec<PMorphism> = (0..3)
            .flat_map(|_| enumerate_pmorphisms(&ds[r.gen_range(0..ds.len())], &y).unwrap())
            .collect();
        for a in &us {
            for b in &us {
                if factor_through(a, b).unwrap().is_none() {
                    continue;
                }
                for c in &us {
                    if factor_through(b, c).unwrap().is_some() {
                        assert!(factor_through(a, c).unwrap().is_some());
                    }
                }
            }
        }
    }
}
