//! The join conditions `(*)`, `(*_n)` and `(*_0)`, projectivity of duals, and
//! minimal failure witnesses.

use crate::bits::BitSet;
use crate::poset::Poset;
use crate::variety::Variety;
use serde::Serialize;

/// Whether the pair `(x, y)` has a join whose min-set is `min x ∪ min y`.
fn pair_ok(p: &Poset, x: usize, y: usize) -> bool {
    match p.join(x, y) {
        Some(j) => *p.min_below(j) == p.min_below(x).union(p.min_below(y)),
        None => false,
    }
}

/// `(*)`: every pair has a join whose min-set is the union of theirs.
pub fn check_star(p: &Poset) -> bool {
    (0..p.len()).all(|x| (x + 1..p.len()).all(|y| pair_ok(p, x, y)))
}

/// `(*_n)` for `n >= 1`; `(*_0)` is non-emptiness.
pub fn check_star_n(p: &Poset, n: usize) -> bool {
    if n == 0 {
        return !p.is_empty();
    }
    (0..p.len()).all(|x| {
        (x + 1..p.len()).all(|y| p.min_below(x).union(p.min_below(y)).len() > n || pair_ok(p, x, y))
    })
}

/// Whether `D(P)` is projective in `v`, read on the dual side: non-empty,
/// in the right class, and satisfying the matching join condition.
pub fn is_projective_dual(p: &Poset, v: Variety) -> bool {
    if p.is_empty() {
        return false;
    }
    match v.level() {
        None => check_star(p),
        Some(0) => p.in_pn(0),
        Some(n) => p.in_pn(n) && check_star_n(p, n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// No upper bound of `a, b` has min-set `min a ∪ min b`.
    NoTop,
    /// Two incomparable minimal upper bounds `c, d` with that min-set.
    Gap,
    /// Upper bounds with that min-set exist and have a single minimal one,
    /// yet the join is missing because of bounds with larger min-sets.
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subcase {
    EqualMin,
    LeftInRight,
    RightInLeft,
    Incomparable,
}

/// Witness for the failure of `(*_n)` at the least failing level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarFailure {
    pub n: usize,
    pub a: String,
    pub b: String,
    pub case_tag: CaseTag,
    pub c: Option<String>,
    pub d: Option<String>,
    pub subcase: Subcase,
}

pub fn subcase_of(ma: &BitSet, mb: &BitSet) -> Subcase {
    if ma == mb {
        Subcase::EqualMin
    } else if ma.is_subset(mb) {
        Subcase::LeftInRight
    } else if mb.is_subset(ma) {
        Subcase::RightInLeft
    } else {
        Subcase::Incomparable
    }
}

/// Upper bounds of `a, b` whose min-set equals `min a ∪ min b`.
pub fn exact_upper_bounds(p: &Poset, a: usize, b: usize) -> BitSet {
    let s = p.min_below(a).union(p.min_below(b));
    BitSet::from_indices(
        p.len(),
        p.upper_bounds(a, b).iter().filter(|&e| *p.min_below(e) == s),
    )
}

fn classify(p: &Poset, a: usize, b: usize) -> (CaseTag, Option<usize>, Option<usize>) {
    let exact = exact_upper_bounds(p, a, b);
    if exact.is_empty() {
        return (CaseTag::NoTop, None, None);
    }
    let minimal: Vec<usize> = p.minimal_in(&exact).iter().collect();
    if minimal.len() >= 2 {
        return (CaseTag::Gap, Some(minimal[0]), Some(minimal[1]));
    }
    (CaseTag::Other, None, None)
}

/// If `(*_{n_cap})` fails, the witness at the least failing level `k`: the
/// first failing pair in index order that is `NoTop` or `Gap` (falling back to
/// the first failing pair), with the first pair of minimal exact upper bounds
/// for `Gap`.
pub fn star_failure_witness(p: &Poset, n_cap: usize) -> Option<StarFailure> {
    let mut failing: Vec<(usize, usize, usize)> = Vec::new();
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            let k = p.min_below(a).union(p.min_below(b)).len();
            if k <= n_cap && !pair_ok(p, a, b) {
                failing.push((k, a, b));
            }
        }
    }
    let k = failing.iter().map(|f| f.0).min()?;
    let at_k: Vec<(usize, usize)> = failing.iter().filter(|f| f.0 == k).map(|f| (f.1, f.2)).collect();
    let mut chosen = None;
    for &(a, b) in &at_k {
        let cls = classify(p, a, b);
        if cls.0 != CaseTag::Other {
            chosen = Some((a, b, cls));
            break;
        }
    }
    let (a, b, (tag, c, d)) = chosen.unwrap_or_else(|| {
        let (a, b) = at_k[0];
        (a, b, classify(p, a, b))
    });
    Some(StarFailure {
        n: k,
        a: p.label(a).to_string(),
        b: p.label(b).to_string(),
        case_tag: tag,
        c: c.map(|i| p.label(i).to_string()),
        d: d.map(|i| p.label(i).to_string()),
        subcase: subcase_of(p.min_below(a), p.min_below(b)),
    })
}

/// The invariants a [`StarFailure`] must satisfy on `p`.
pub fn failure_is_consistent(p: &Poset, f: &StarFailure) -> bool {
    let (Some(a), Some(b)) = (p.index_of(&f.a), p.index_of(&f.b)) else {
        return false;
    };
    let s = p.min_below(a).union(p.min_below(b));
    if s.len() != f.n || subcase_of(p.min_below(a), p.min_below(b)) != f.subcase {
        return false;
    }
    if pair_ok(p, a, b) {
        return false;
    }
    match f.case_tag {
        CaseTag::NoTop => exact_upper_bounds(p, a, b).is_empty() && f.c.is_none() && f.d.is_none(),
        CaseTag::Gap => {
            let (Some(c), Some(d)) = (
                f.c.as_deref().and_then(|l| p.index_of(l)),
                f.d.as_deref().and_then(|l| p.index_of(l)),
            ) else {
                return false;
            };
            let ub = p.upper_bounds(a, b);
            let between = ub.intersection(&p.down(c).intersection(p.down(d)));
            c != d
                && *p.min_below(c) == s
                && *p.min_below(d) == s
                && ub.contains(c)
                && ub.contains(d)
                && between.is_empty()
        }
        CaseTag::Other => !exact_upper_bounds(p, a, b).is_empty(),
    }
}
