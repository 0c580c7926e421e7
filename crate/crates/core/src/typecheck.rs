//! Unification types of dual posets in each variety, with evidence and
//! minimal complete sets.

use crate::bits::BitSet;
use crate::conditions::{check_star, check_star_n, star_failure_witness, StarFailure};
use crate::connectivity::{max_connected_with, max_n_connected_with, Family};
use crate::error::{Error, Result};
use crate::morphism::{Budget, PMorphism};
use crate::poset::Poset;
use crate::variety::Variety;
use serde::{Serialize, Serializer};
use std::fmt;
use std::sync::Arc;

/// Position on the scale `1 < 2 < ... < ω < ∞ < 0`; the derived order follows it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnificationType {
    Finite(usize),
    TypeOmega,
    TypeInfinity,
    TypeZero,
}

impl fmt::Display for UnificationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnificationType::Finite(k) => write!(f, "{k}"),
            UnificationType::TypeOmega => write!(f, "omega"),
            UnificationType::TypeInfinity => write!(f, "infinity"),
            UnificationType::TypeZero => write!(f, "0"),
        }
    }
}

impl Serialize for UnificationType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Type of the whole variety: 1 for Boolean algebras, 0 otherwise.
pub fn variety_type(v: Variety) -> UnificationType {
    match v {
        Variety::B0 => UnificationType::Finite(1),
        _ => UnificationType::TypeZero,
    }
}

/// A principal down-set `↓x` lacking the join or meet of `a, b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeFailure {
    pub x: String,
    pub a: String,
    pub b: String,
    pub missing: &'static str,
}

fn lattice_failure(p: &Poset) -> Option<LatticeFailure> {
    for x in 0..p.len() {
        let d = p.subposet(p.down(x));
        for a in 0..d.len() {
            for b in a + 1..d.len() {
                let missing = if d.join(a, b).is_none() {
                    "join"
                } else if d.meet(a, b).is_none() {
                    "meet"
                } else {
                    continue;
                };
                return Some(LatticeFailure {
                    x: p.label(x).to_string(),
                    a: d.label(a).to_string(),
                    b: d.label(b).to_string(),
                    missing,
                });
            }
        }
    }
    None
}

fn require_pn(p: &Poset, n: usize) -> Result<()> {
    if p.in_pn(n) {
        Ok(())
    } else {
        Err(Error::VarietyMismatch(format!(
            "some element has {} minimals below it, more than {n}",
            p.max_min_size()
        )))
    }
}

/// Every principal down-set is a lattice.
pub fn down_sets_are_lattices(p: &Poset) -> Result<bool> {
    require_pn(p, 1)?;
    Ok(lattice_failure(p).is_none())
}

/// One maximal (n-)connected set and its verdict.
#[derive(Clone, Debug, Serialize)]
pub struct SetVerdict {
    pub elements: Vec<String>,
    pub satisfies_condition: bool,
    pub failure: Option<StarFailure>,
    #[serde(skip)]
    pub carrier: BitSet,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Maximal (n-)connected sets with per-set condition verdicts.
    ConnectedSets { exhaustive: bool, sets: Vec<SetVerdict> },
    /// The lattice test on principal down-sets.
    DownSets { failure: Option<LatticeFailure> },
    /// Every non-empty antichain is its own projective dual.
    Boolean,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    pub variety: Variety,
    #[serde(rename = "type")]
    pub utype: UnificationType,
    pub evidence: Evidence,
}

impl TypeReport {
    /// The first maximal set failing its condition, with the failure witness.
    pub fn failing_set(&self) -> Option<(&BitSet, &StarFailure)> {
        match &self.evidence {
            Evidence::ConnectedSets { sets, .. } => {
                sets.iter().find_map(|s| s.failure.as_ref().map(|f| (&s.carrier, f)))
            }
            _ => None,
        }
    }
}

fn connected_evidence(p: &Poset, fam: Family, n: Option<usize>) -> (UnificationType, Evidence) {
    let sets: Vec<SetVerdict> = fam
        .sets
        .into_iter()
        .map(|carrier| {
            let y = p.subposet(&carrier);
            let ok = match n {
                None => check_star(&y),
                Some(n) => check_star_n(&y, n),
            };
            let failure = if ok { None } else { star_failure_witness(&y, n.unwrap_or(usize::MAX)) };
            SetVerdict {
                elements: p.labels_of(&carrier),
                satisfies_condition: ok,
                failure,
                carrier,
            }
        })
        .collect();
    let t = if sets.iter().all(|s| s.satisfies_condition) {
        UnificationType::Finite(sets.len())
    } else {
        UnificationType::TypeZero
    };
    (
        t,
        Evidence::ConnectedSets {
            exhaustive: fam.exhaustive,
            sets,
        },
    )
}

pub fn type_report(p: &Poset, v: Variety, budget: &Budget) -> Result<TypeReport> {
    if p.is_empty() {
        return Err(Error::Unsolvable);
    }
    let (utype, evidence) = match v {
        Variety::Omega => connected_evidence(p, max_connected_with(p, budget)?, None),
        Variety::Bn(n) => connected_evidence(p, max_n_connected_with(p, n, budget)?, Some(n)),
        Variety::B1 => {
            require_pn(p, 1)?;
            let failure = lattice_failure(p);
            let t = if failure.is_none() {
                UnificationType::Finite(1)
            } else {
                UnificationType::TypeZero
            };
            (t, Evidence::DownSets { failure })
        }
        Variety::B0 => {
            require_pn(p, 0)?;
            (UnificationType::Finite(1), Evidence::Boolean)
        }
    };
    Ok(TypeReport {
        variety: v,
        utype,
        evidence,
    })
}

pub fn unification_type(p: &Poset, v: Variety) -> Result<UnificationType> {
    Ok(type_report(p, v, &Budget::default())?.utype)
}

/// The unifier `η: R -> X` with `R = {(x, y) : y <= x}`, ordered by
/// `(x, y) <= (x', y')` iff `x = x'` and `y <= y'`, and `η(x, y) = y`.
pub fn pairs_unifier(x: &Arc<Poset>) -> Result<PMorphism> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..x.len() {
        pairs.extend(x.down(a).iter().map(|b| (a, b)));
    }
    let labels: Vec<String> = pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", x.label(a), x.label(b)))
        .collect();
    let r = Poset::from_fn(&labels, |i, j| pairs[i].0 == pairs[j].0 && x.leq(pairs[i].1, pairs[j].1))?;
    PMorphism::new(Arc::new(r), x.clone(), pairs.iter().map(|p| p.1).collect())
}

/// A minimal complete set of unifiers when the type is finite.
pub fn minimal_complete_set(x: &Arc<Poset>, v: Variety, budget: &Budget) -> Result<Vec<PMorphism>> {
    let report = type_report(x, v, budget)?;
    if report.utype == UnificationType::TypeZero {
        return Err(Error::TypeIsZero);
    }
    match report.evidence {
        Evidence::ConnectedSets { sets, .. } => sets
            .iter()
            .map(|s| PMorphism::inclusion(x.clone(), &s.carrier))
            .collect(),
        Evidence::DownSets { .. } => Ok(vec![pairs_unifier(x)?]),
        Evidence::Boolean => Ok(vec![PMorphism::identity(x.clone())]),
    }
}
