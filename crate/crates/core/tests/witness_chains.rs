use plu::canon::posets_up_to;
use plu::conditions::{CaseTag, StarFailure, Subcase};
use plu::morphism::factor_through;
use plu::poset::Poset;
use plu::typecheck::{unification_type, UnificationType};
use plu::witness::{dominating_successor, ChainContext, Lemma};
use plu::{Budget, Error, PMorphism, Variety};
use std::sync::Arc;

fn gap(n: usize, a: &str, b: &str, subcase: Subcase) -> StarFailure {
    StarFailure {
        n,
        a: a.into(),
        b: b.into(),
        case_tag: CaseTag::Gap,
        c: Some("c".into()),
        d: Some("d".into()),
        subcase,
    }
}

fn context(p: Poset, v: Variety, f: StarFailure) -> ChainContext {
    let p = Arc::new(p);
    ChainContext::from_failure(p.clone(), v, p.all(), f).unwrap()
}

fn links_ok(ctx: &ChainContext, steps: usize) -> Result<(), Error> {
    let lo = ctx.level.max(1);
    for m in lo..lo + steps {
        ctx.chain_link(m)?;
    }
    Ok(())
}

/// p, q below a; p, q, r below b (through pq, pr, qr); c, d above a, b; z on top.
fn nested() -> Poset {
    Poset::from_covers(
        &["p", "q", "r", "pq", "pr", "qr", "a", "b", "c", "d", "z"],
        &[
            ("p", "pq"),
            ("q", "pq"),
            ("pq", "a"),
            ("pq", "b"),
            ("p", "pr"),
            ("r", "pr"),
            ("q", "qr"),
            ("r", "qr"),
            ("pr", "b"),
            ("qr", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "z"),
            ("d", "z"),
        ],
    )
    .unwrap()
}

/// a over p, q; b over q, r.
fn crossing() -> Poset {
    Poset::from_covers(
        &["p", "q", "r", "pr", "a", "b", "c", "d", "z"],
        &[
            ("p", "a"),
            ("q", "a"),
            ("q", "b"),
            ("r", "b"),
            ("p", "pr"),
            ("r", "pr"),
            ("pr", "c"),
            ("pr", "d"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "z"),
            ("d", "z"),
        ],
    )
    .unwrap()
}

/// a, b over the same two minimals.
fn twins() -> Poset {
    Poset::from_covers(
        &["x", "y", "a", "b", "c", "d", "z"],
        &[
            ("x", "a"),
            ("y", "a"),
            ("x", "b"),
            ("y", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "z"),
            ("d", "z"),
        ],
    )
    .unwrap()
}

#[test]
fn chains_from_small_type_zero_posets_validate() {
    let mut built = 0;
    for p in posets_up_to(6) {
        if p.is_empty() {
            continue;
        }
        for v in [Variety::Omega, Variety::B1, Variety::Bn(2), Variety::Bn(3)] {
            if unification_type(&p, v).ok() != Some(UnificationType::TypeZero) {
                continue;
            }
            match ChainContext::for_target(Arc::new(p.clone()), v, &Budget::default()) {
                // A missing z only surfaces when a row needs it.
                Ok(ctx) => match links_ok(&ctx, 3) {
                    Ok(()) => built += 1,
                    Err(Error::ContextMismatch(_)) => {}
                    Err(e) => panic!("{v} {:?} on {:?}: {e}", ctx.lemma, p.covers()),
                },
                Err(Error::ContextMismatch(_)) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
    assert!(built > 300);
}

#[test]
fn nested_min_sets() {
    for v in [Variety::Omega, Variety::Bn(3)] {
        let ctx = context(nested(), v, gap(3, "a", "b", Subcase::LeftInRight));
        assert_eq!(ctx.lemma, if v == Variety::Omega { Lemma::PdlC } else { Lemma::CaseBII });
        links_ok(&ctx, 4).unwrap();
    }
    let ctx = context(nested(), Variety::Omega, gap(3, "b", "a", Subcase::RightInLeft));
    assert!(ctx.swapped);
    links_ok(&ctx, 3).unwrap();
}

#[test]
fn nested_min_sets_below_bound_fail_validation() {
    // The literal table with k < n puts an "otherwise" subset under a d-shaped one.
    let ctx = context(nested(), Variety::Bn(4), gap(3, "a", "b", Subcase::LeftInRight));
    let lo = ctx.level;
    let res = (lo..lo + 4).try_for_each(|m| ctx.chain(m).map(|_| ()));
    assert!(matches!(res, Err(Error::ChainInvalid(_))));
}

#[test]
fn crossing_min_sets() {
    for v in [Variety::Omega, Variety::Bn(3), Variety::Bn(4)] {
        let ctx = context(crossing(), v, gap(3, "a", "b", Subcase::Incomparable));
        links_ok(&ctx, 4).unwrap();
    }
}

#[test]
fn equal_min_sets() {
    let ctx = context(twins(), Variety::Omega, gap(2, "a", "b", Subcase::EqualMin));
    assert_eq!(ctx.lemma, Lemma::PdlB);
    links_ok(&ctx, 4).unwrap();
    for n in [2, 3] {
        let ctx = context(twins(), Variety::Bn(n), gap(2, "a", "b", Subcase::EqualMin));
        assert_eq!(ctx.lemma, Lemma::CaseBI);
        links_ok(&ctx, 4).unwrap();
    }
}

#[test]
fn chain_steps_are_strict() {
    let ctx = context(crossing(), Variety::Omega, gap(3, "a", "b", Subcase::Incomparable));
    for m in 3..6 {
        let (um, next) = (ctx.chain(m).unwrap(), ctx.chain(m + 1).unwrap());
        assert!(factor_through(&um, &next).unwrap().is_some());
    }
}

#[test]
fn successor_for_incomparable_min_sets_breaks_at_top_indices() {
    // For T = {1..n-2, m, m+1}, u_{m+1}(T) = c, but every candidate in P(m)
    // above {1..n-2, m} is sent to d or z, so ν cannot dominate u_{m+1}.
    let ctx = context(crossing(), Variety::Omega, gap(3, "a", "b", Subcase::Incomparable));
    for m in [3, 4] {
        let um = ctx.chain(m).unwrap();
        let id = PMorphism::identity(um.dom().clone());
        match dominating_successor(&ctx, &um, &id, m) {
            Err(Error::ChainInvalid(msg)) => assert!(msg.contains("does not factor")),
            other => panic!("expected the factorization to fail, got {:?}", other.map(|s| s.via_eta)),
        }
    }
}

#[test]
fn successor_for_equal_min_sets_without_top() {
    let p = Poset::from_covers(&["x", "y", "a", "b"], &[("x", "a"), ("y", "a"), ("x", "b"), ("y", "b")]).unwrap();
    let f = StarFailure {
        n: 2,
        a: "a".into(),
        b: "b".into(),
        case_tag: CaseTag::NoTop,
        c: None,
        d: None,
        subcase: Subcase::EqualMin,
    };
    let ctx = context(p, Variety::Bn(2), f);
    assert_eq!(ctx.lemma, Lemma::CaseAI);
    assert!(matches!(
        dominating_successor(&ctx, &ctx.chain(3).unwrap(), &PMorphism::identity(ctx.chain(3).unwrap().dom().clone()), 3),
        Err(Error::InvalidParameter(_))
    ));
    for m in [7, 8] {
        let um = ctx.chain(m).unwrap();
        let id = PMorphism::identity(um.dom().clone());
        let s = dominating_successor(&ctx, &um, &id, m).unwrap();
        assert!(s.via_eta);
        assert!(factor_through(&um, &s.nu).unwrap().is_some());
        assert!(factor_through(&ctx.chain(m + 1).unwrap(), &s.nu).unwrap().is_some());
    }
}

#[test]
fn successor_rejects_bad_factorization() {
    let ctx = context(crossing(), Variety::Omega, gap(3, "a", "b", Subcase::Incomparable));
    let u3 = ctx.chain(3).unwrap();
    let u4 = ctx.chain(4).unwrap();
    let id = PMorphism::identity(u3.dom().clone());
    assert!(matches!(
        dominating_successor(&ctx, &u4, &id, 3),
        Err(Error::FactorizationNotVerified(_))
    ));
}
