//! Bounded brute-force checks of the type classification: every verdict is
//! "verified up to bound k" over all unifiers with at most `k` domain elements.

use crate::canon::posets_up_to;
use crate::conditions::is_projective_dual;
use crate::error::{Error, Result};
use crate::io::{morphism_json, PosetDoc};
use crate::morphism::{enumerate_pmorphisms_with, factor_through_with, Budget, PMorphism};
use crate::poset::Poset;
use crate::typecheck::{minimal_complete_set, type_report, UnificationType};
use crate::variety::Variety;
use crate::witness::ChainContext;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;

/// Largest domain size the enumerator accepts.
pub const MAX_DOMAIN_SIZE: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Verdict {
    fn pass(name: &str, detail: String) -> Verdict {
        Verdict {
            name: name.into(),
            passed: true,
            detail,
            counterexample: None,
        }
    }

    fn fail(name: &str, detail: String, counterexample: Option<Value>) -> Verdict {
        Verdict {
            name: name.into(),
            passed: false,
            detail,
            counterexample,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub target: PosetDoc,
    pub variety: Variety,
    pub bound: usize,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub utype: Option<UnificationType>,
    pub unifier_count: usize,
    pub verdicts: Vec<Verdict>,
}

impl OracleReport {
    fn new(target: &Poset, variety: Variety, bound: usize) -> OracleReport {
        OracleReport {
            target: PosetDoc::of(target),
            variety,
            bound,
            utype: None,
            unifier_count: 0,
            verdicts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }
}

/// Posets with `1..=k` elements, up to isomorphism, that can serve as
/// unifier domains in `variety`.
pub fn enumerate_domain_posets(k: usize, variety: Variety) -> Result<Vec<Poset>> {
    if k == 0 {
        return Err(Error::InvalidParameter("the domain bound must be at least 1".into()));
    }
    if k > MAX_DOMAIN_SIZE {
        return Err(Error::SizeLimitExceeded(MAX_DOMAIN_SIZE as u64));
    }
    Ok(posets_up_to(k)
        .into_iter()
        .filter(|p| is_projective_dual(p, variety))
        .collect())
}

pub fn enumerate_unifiers(p: &Arc<Poset>, variety: Variety, k: usize) -> Result<Vec<PMorphism>> {
    enumerate_unifiers_with(p, variety, k, &Budget::default())
}

/// All unifiers into `p` with at most `k` domain elements, domains in
/// canonical order and maps lexicographic within a domain.
pub fn enumerate_unifiers_with(p: &Arc<Poset>, variety: Variety, k: usize, budget: &Budget) -> Result<Vec<PMorphism>> {
    if p.is_empty() {
        return Err(Error::Unsolvable);
    }
    let domains = enumerate_domain_posets(k, variety)?;
    let per: Vec<Result<Vec<PMorphism>>> = domains
        .into_par_iter()
        .map(|d| enumerate_pmorphisms_with(&Arc::new(d), p, budget))
        .collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

/// Index of the first `w` (in order) for which `pred` is false.
fn first_failure<T: Sync>(items: &[T], pred: impl Fn(&T) -> Result<bool> + Sync + Send) -> Result<Option<usize>> {
    let results: Vec<Result<bool>> = items.par_iter().map(pred).collect();
    for (i, r) in results.into_iter().enumerate() {
        if !r? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn complete_verdict(unifiers: &[PMorphism], candidates: &[PMorphism], k: usize, budget: &Budget) -> Result<Verdict> {
    let bad = first_failure(unifiers, |w| {
        for c in candidates {
            if factor_through_with(w, c, budget)?.is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    Ok(match bad {
        None => Verdict::pass(
            "complete_set",
            format!("all {} unifiers factor through a candidate; verified up to bound {k}", unifiers.len()),
        ),
        Some(i) => Verdict::fail(
            "complete_set",
            format!("a unifier factors through no candidate; checked up to bound {k}"),
            Some(morphism_json(&unifiers[i])),
        ),
    })
}

pub fn complete_set_check(p: &Arc<Poset>, variety: Variety, candidates: &[PMorphism], k: usize) -> Result<OracleReport> {
    complete_set_check_with(p, variety, candidates, k, &Budget::default())
}

pub fn complete_set_check_with(
    p: &Arc<Poset>,
    variety: Variety,
    candidates: &[PMorphism],
    k: usize,
    budget: &Budget,
) -> Result<OracleReport> {
    let unifiers = enumerate_unifiers_with(p, variety, k, budget)?;
    let mut rep = OracleReport::new(p, variety, k);
    rep.unifier_count = unifiers.len();
    rep.verdicts.push(complete_verdict(&unifiers, candidates, k, budget)?);
    Ok(rep)
}

fn minimality_verdict(candidates: &[PMorphism], budget: &Budget) -> Result<Verdict> {
    for i in 0..candidates.len() {
        for j in 0..candidates.len() {
            if i != j {
                if let Some(psi) = factor_through_with(&candidates[i], &candidates[j], budget)? {
                    return Ok(Verdict::fail(
                        "minimality",
                        format!("candidate {i} factors through candidate {j}"),
                        Some(json!({
                            "lower": morphism_json(&candidates[i]),
                            "upper": morphism_json(&candidates[j]),
                            "factor": morphism_json(&psi),
                        })),
                    ));
                }
            }
        }
    }
    Ok(Verdict::pass(
        "minimality",
        format!("{} candidates pairwise incomparable", candidates.len()),
    ))
}

pub fn minimality_check(candidates: &[PMorphism]) -> Result<OracleReport> {
    minimality_check_with(candidates, &Budget::default())
}

pub fn minimality_check_with(candidates: &[PMorphism], budget: &Budget) -> Result<OracleReport> {
    let target = candidates.first().map(|u| u.cod().as_ref().clone()).unwrap_or_else(Poset::empty);
    for u in candidates {
        if **u.cod() != target {
            return Err(Error::CodomainMismatch("candidates have different targets".into()));
        }
    }
    let mut rep = OracleReport::new(&target, Variety::Omega, 0);
    rep.unifier_count = candidates.len();
    rep.verdicts.push(minimality_verdict(candidates, budget)?);
    Ok(rep)
}

fn no_dominator_verdict(u: &PMorphism, unifiers: &[PMorphism], k: usize, budget: &Budget) -> Result<Verdict> {
    let hit = first_failure(unifiers, |w| Ok(factor_through_with(u, w, budget)?.is_none()))?;
    Ok(match hit {
        None => Verdict::pass(
            "no_dominator",
            format!("none of {} unifiers dominates; verified up to bound {k}", unifiers.len()),
        ),
        Some(i) => Verdict::fail(
            "no_dominator",
            format!("a unifier with {} elements dominates", unifiers[i].dom().len()),
            Some(morphism_json(&unifiers[i])),
        ),
    })
}

pub fn no_dominator_check(u: &PMorphism, variety: Variety, k: usize) -> Result<OracleReport> {
    no_dominator_check_with(u, variety, k, &Budget::default())
}

pub fn no_dominator_check_with(u: &PMorphism, variety: Variety, k: usize, budget: &Budget) -> Result<OracleReport> {
    let unifiers = enumerate_unifiers_with(u.cod(), variety, k, budget)?;
    let mut rep = OracleReport::new(u.cod(), variety, k);
    rep.unifier_count = unifiers.len();
    rep.verdicts.push(no_dominator_verdict(u, &unifiers, k, budget)?);
    Ok(rep)
}

pub fn verify_type(p: &Arc<Poset>, variety: Variety, k: usize) -> Result<OracleReport> {
    verify_type_with(p, variety, k, &Budget::default())
}

/// Cross-checks the computed type: completeness and minimality of the
/// produced set for finite types, chain links and a bounded no-dominator
/// check for type 0.
pub fn verify_type_with(p: &Arc<Poset>, variety: Variety, k: usize, budget: &Budget) -> Result<OracleReport> {
    let report = type_report(p, variety, budget)?;
    let mut rep = OracleReport::new(p, variety, k);
    rep.utype = Some(report.utype);
    let unifiers = enumerate_unifiers_with(p, variety, k, budget)?;
    rep.unifier_count = unifiers.len();
    if report.utype != UnificationType::TypeZero {
        let set = minimal_complete_set(p, variety, budget)?;
        let bad = set.iter().position(|u| !is_projective_dual(u.dom(), variety));
        rep.verdicts.push(match bad {
            None => Verdict::pass("candidates_are_unifiers", format!("{} candidates", set.len())),
            Some(i) => Verdict::fail(
                "candidates_are_unifiers",
                format!("candidate {i} has a domain outside the class"),
                Some(morphism_json(&set[i])),
            ),
        });
        if let UnificationType::Finite(j) = report.utype {
            rep.verdicts.push(if set.len() == j {
                Verdict::pass("set_size", format!("{j} candidates"))
            } else {
                Verdict::fail("set_size", format!("type {j} but {} candidates", set.len()), None)
            });
        }
        rep.verdicts.push(complete_verdict(&unifiers, &set, k, budget)?);
        rep.verdicts.push(minimality_verdict(&set, budget)?);
        return Ok(rep);
    }
    let ctx = match ChainContext::for_target(p.clone(), variety, budget) {
        Ok(ctx) => ctx,
        Err(e @ Error::ContextMismatch(_)) => {
            rep.verdicts
                .push(Verdict::fail("witness_chain", format!("no chain construction applies: {e}"), None));
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let lo = ctx.level.max(1);
    let top = ctx.undominated_index(k);
    let mut links = Ok(());
    for m in lo..top {
        if let Err(e) = ctx.chain_link(m) {
            links = Err(e);
            break;
        }
    }
    let um = match links.and_then(|_| ctx.chain(top)) {
        Ok(um) => um,
        Err(e @ (Error::ChainInvalid(_) | Error::ContextMismatch(_))) => {
            rep.verdicts.push(Verdict::fail("witness_chain", e.to_string(), None));
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    rep.verdicts.push(Verdict::pass(
        "witness_chain",
        format!("{:?} chain u_{lo}..u_{top} valid with inclusion links", ctx.lemma),
    ));
    rep.verdicts.push(no_dominator_verdict(&um, &unifiers, k, budget)?);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{chain, poset_g, poset_p, poset_r};
    use crate::typecheck::minimal_complete_set;
    use crate::witness::witness_chain_g;

    #[test]
    fn domain_posets() {
        let one = enumerate_domain_posets(1, Variety::Omega).unwrap();
        assert_eq!(one.len(), 1);
        let two = enumerate_domain_posets(2, Variety::Omega).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[1], chain(2));
        assert!(matches!(enumerate_domain_posets(9, Variety::Omega), Err(Error::SizeLimitExceeded(_))));
        // B0 domains are the non-empty antichains.
        let b0 = enumerate_domain_posets(4, Variety::B0).unwrap();
        assert_eq!(b0.len(), 4);
        assert!(b0.iter().all(|p| p.covers().is_empty()));
    }

    #[test]
    fn unifiers_into_g() {
        let g = Arc::new(poset_g());
        let us = enumerate_unifiers(&g, Variety::Omega, 1).unwrap();
        assert_eq!(us.len(), 1);
        assert_eq!(us[0].apply_label("0").unwrap(), "a");
        assert!(matches!(
            enumerate_unifiers(&Arc::new(Poset::empty()), Variety::Omega, 2),
            Err(Error::Unsolvable)
        ));
    }

    #[test]
    fn r_is_complete_and_minimal() {
        let r = Arc::new(poset_r());
        let set = minimal_complete_set(&r, Variety::Omega, &Budget::default()).unwrap();
        assert!(complete_set_check(&r, Variety::Omega, &set, 4).unwrap().passed());
        assert!(minimality_check(&set).unwrap().passed());
        let dup = vec![set[0].clone(), set[0].clone()];
        assert!(!minimality_check(&dup).unwrap().passed());
        // One inclusion alone misses the other copy.
        let rep = complete_set_check(&r, Variety::Omega, &set[..1], 4).unwrap();
        assert!(rep.failures().next().unwrap().counterexample.is_some());
    }

    #[test]
    fn g_chain_dominators() {
        let u2 = witness_chain_g(2, Variety::Omega).unwrap();
        let u3 = witness_chain_g(3, Variety::Omega).unwrap();
        assert!(!minimality_check(&[u2, u3]).unwrap().passed());
        let u1 = witness_chain_g(1, Variety::Omega).unwrap();
        assert!(!no_dominator_check(&u1, Variety::Omega, 6).unwrap().passed());
        let u4 = witness_chain_g(4, Variety::Omega).unwrap();
        assert!(no_dominator_check(&u4, Variety::Omega, 3).unwrap().passed());
        let p3 = Arc::new(poset_p(3).unwrap());
        let id = PMorphism::identity(p3);
        assert!(!no_dominator_check(&id, Variety::Omega, 7).unwrap().passed());
    }

    #[test]
    fn verify_examples() {
        let g = Arc::new(poset_g());
        let rep = verify_type(&g, Variety::Omega, 3).unwrap();
        assert_eq!(rep.utype, Some(UnificationType::TypeZero));
        assert!(rep.passed(), "{:?}", rep.verdicts);
        let rep = verify_type(&Arc::new(poset_r()), Variety::Omega, 4).unwrap();
        assert_eq!(rep.utype, Some(UnificationType::Finite(2)));
        assert!(rep.passed());
        let rep = verify_type(&Arc::new(chain(1)), Variety::B0, 3).unwrap();
        assert_eq!(rep.utype, Some(UnificationType::Finite(1)));
        assert!(rep.passed());
    }
}
