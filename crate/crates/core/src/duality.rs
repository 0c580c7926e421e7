//! Finite duality between p-lattices and posets: down-set lattices,
//! join-irreducibles, preimage homomorphisms and the generator algebras.

use crate::bits::BitSet;
use crate::canon::down_sets;
use crate::conditions::is_projective_dual;
use crate::error::{Error, Result};
use crate::io::PosetDoc;
use crate::morphism::PMorphism;
use crate::poset::{antichain, Poset};
use crate::variety::Variety;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::collections::HashMap;
use std::sync::Arc;

/// Largest poset `dual_lattice` accepts.
pub const MAX_DUAL_POSET: usize = 16;
/// Largest carrier built for a lattice.
pub const MAX_CARRIER: usize = 4096;
/// Largest lattice accepted from user input, where every axiom is checked.
pub const MAX_CHECKED_LATTICE: usize = 256;

/// A finite distributive lattice with its pseudocomplement `neg`.
#[derive(Clone, Debug)]
pub struct PLattice {
    order: Poset,
    neg: Vec<usize>,
    bot: usize,
    top: usize,
}

impl PartialEq for PLattice {
    fn eq(&self, o: &PLattice) -> bool {
        self.order == o.order
    }
}

impl PLattice {
    /// Validates a bounded distributive lattice and derives `neg`.
    pub fn from_order(order: Poset) -> Result<PLattice> {
        let n = order.len();
        if n == 0 {
            return Err(Error::InvalidParameter("a lattice has at least one element".into()));
        }
        if n > MAX_CHECKED_LATTICE {
            return Err(Error::SizeLimitExceeded(MAX_CHECKED_LATTICE as u64));
        }
        let all = order.all();
        let bot = order.least_of(&all).ok_or_else(|| Error::InvalidParameter("no least element".into()))?;
        let top = order
            .greatest_of(&all)
            .ok_or_else(|| Error::InvalidParameter("no greatest element".into()))?;
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (Some(m), Some(j)) = (order.meet(a, b), order.join(a, b)) else {
                    return Err(Error::InvalidParameter(format!(
                        "{} and {} lack a meet or join",
                        order.label(a),
                        order.label(b)
                    )));
                };
                meet[a * n + b] = m;
                join[a * n + b] = j;
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if meet[a * n + join[b * n + c]] != join[meet[a * n + b] * n + meet[a * n + c]] {
                        return Err(Error::InvalidParameter(format!(
                            "not distributive at {}, {}, {}",
                            order.label(a),
                            order.label(b),
                            order.label(c)
                        )));
                    }
                }
            }
        }
        let neg = (0..n)
            .map(|a| {
                let disjoint = BitSet::from_indices(n, (0..n).filter(|&b| meet[a * n + b] == bot));
                order.greatest_of(&disjoint).expect("finite distributive lattices are pseudocomplemented")
            })
            .collect();
        Ok(PLattice { order, neg, bot, top })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &Poset {
        &self.order
    }

    pub fn label(&self, a: usize) -> &str {
        self.order.label(a)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.order.index_of(label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order.leq(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.order.meet(a, b).expect("lattice")
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.order.join(a, b).expect("lattice")
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    fn tables(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = self.meet(a, b);
                join[a * n + b] = self.join(a, b);
            }
        }
        (meet, join)
    }

    /// `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)` on all triples.
    pub fn is_distributive(&self) -> bool {
        let n = self.len();
        let (m, j) = self.tables();
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m[a * n + j[b * n + c]] == j[m[a * n + b] * n + m[a * n + c]])))
    }

    /// `neg(a)` is the largest `b` with `a ∧ b = bot`, for every `a`.
    pub fn neg_is_pseudocomplement(&self) -> bool {
        let n = self.len();
        let (m, _) = self.tables();
        (0..n).all(|a| {
            let na = self.neg[a];
            m[a * n + na] == self.bot && (0..n).all(|b| m[a * n + b] != self.bot || self.leq(b, na))
        })
    }

    pub fn to_json(&self) -> Value {
        let n = self.len();
        let mut leq = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) {
                    leq.push(json!([self.label(a), self.label(b)]));
                }
            }
        }
        let mut neg = Map::new();
        for a in 0..n {
            neg.insert(self.label(a).to_string(), Value::String(self.label(self.neg[a]).to_string()));
        }
        json!({
            "elements": self.order.labels(),
            "leq": leq,
            "neg": neg,
            "bot": self.label(self.bot),
            "top": self.label(self.top),
        })
    }
}

/// Unknown fields are ignored so CLI reports can be fed back in.
#[derive(Deserialize)]
struct AlgebraDoc {
    elements: Vec<String>,
    #[serde(default)]
    leq: Option<Vec<(String, String)>>,
    #[serde(default)]
    covers: Option<Vec<(String, String)>>,
    #[serde(default)]
    neg: Option<HashMap<String, String>>,
    #[serde(default)]
    bot: Option<String>,
    #[serde(default)]
    top: Option<String>,
}

/// Parses an algebra document. Any `neg`, `bot` or `top` given must agree
/// with the values derived from the order.
pub fn parse_algebra(text: &str) -> Result<PLattice> {
    let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let order = PosetDoc {
        elements: doc.elements,
        covers: doc.covers,
        leq: doc.leq,
    }
    .build()?;
    let l = PLattice::from_order(order)?;
    let disagree = |what: &str| Error::Parse(format!("given {what} disagrees with the order"));
    if let Some(neg) = doc.neg {
        for (a, b) in neg {
            let ia = l.index_of(&a).ok_or_else(|| Error::UnknownLabel(a.clone()))?;
            if l.label(l.neg(ia)) != b {
                return Err(disagree("neg"));
            }
        }
    }
    if doc.bot.is_some_and(|b| b != l.label(l.bot)) {
        return Err(disagree("bot"));
    }
    if doc.top.is_some_and(|t| t != l.label(l.top)) {
        return Err(disagree("top"));
    }
    Ok(l)
}

fn set_label(p: &Poset, s: &BitSet) -> String {
    if s.is_empty() {
        "\u{2205}".into()
    } else {
        format!("{{{}}}", p.labels_of(s).join(","))
    }
}

/// `D(P)` together with the down-set behind each element.
fn down_set_lattice(p: &Poset) -> Result<(PLattice, Vec<BitSet>)> {
    if p.len() > MAX_DUAL_POSET {
        return Err(Error::SizeLimitExceeded(MAX_DUAL_POSET as u64));
    }
    let sets = down_sets(p);
    if sets.len() > MAX_CARRIER {
        return Err(Error::SizeLimitExceeded(MAX_CARRIER as u64));
    }
    let n = sets.len();
    let labels: Vec<String> = sets.iter().map(|s| set_label(p, s)).collect();
    let rows = (0..n)
        .map(|j| BitSet::from_indices(n, (0..n).filter(|&i| sets[i].is_subset(&sets[j]))))
        .collect();
    let order = Poset::from_down_rows(labels, rows);
    let index: HashMap<&BitSet, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let neg = sets
        .iter()
        .map(|s| index[&p.all().difference(&p.up_set(s))])
        .collect();
    let bot = index[&p.empty_set()];
    let top = index[&p.all()];
    Ok((PLattice { order, neg, bot, top }, sets))
}

/// Down-sets of `p` under inclusion, `neg(U) = P ∖ ↑U`.
pub fn dual_lattice(p: &Poset) -> Result<PLattice> {
    Ok(down_set_lattice(p)?.0)
}

/// Join-irreducible elements (exactly one lower cover) with the induced order.
pub fn dual_poset(l: &PLattice) -> Poset {
    let n = l.len();
    let mut lower = vec![0usize; n];
    for (_, b) in l.order.covers() {
        lower[b] += 1;
    }
    let ji = BitSet::from_indices(n, (0..n).filter(|&a| lower[a] == 1));
    l.order.subposet(&ji)
}

/// The smallest `B_n` containing `l`: the least `n` with the dual in `P_n`.
pub fn variety_membership(l: &PLattice) -> Variety {
    let j = dual_poset(l);
    if j.in_pn(0) {
        Variety::B0
    } else {
        Variety::bn(j.max_min_size())
    }
}

/// Whether `l` is projective in `v`, by the dual criterion.
pub fn is_projective(l: &PLattice, v: Variety) -> bool {
    is_projective_dual(&dual_poset(l), v)
}

pub fn boolean_algebra(n: usize) -> Result<PLattice> {
    if 1usize.checked_shl(n as u32).is_none_or(|c| c > MAX_CARRIER) {
        return Err(Error::SizeLimitExceeded(MAX_CARRIER as u64));
    }
    dual_lattice(&antichain(n))
}

/// The Boolean algebra with `n` atoms under a new top `1'`.
pub fn b_bar(n: usize) -> Result<PLattice> {
    let base = boolean_algebra(n)?;
    let k = base.len();
    if k + 1 > MAX_CARRIER {
        return Err(Error::SizeLimitExceeded(MAX_CARRIER as u64));
    }
    let mut labels = base.order.labels().to_vec();
    labels.push("1'".into());
    let mut rows: Vec<BitSet> = (0..k)
        .map(|j| BitSet::from_indices(k + 1, base.order.down(j).iter()))
        .collect();
    rows.push(BitSet::full(k + 1));
    let order = Poset::from_down_rows(labels, rows);
    let neg = (0..=k)
        .map(|a| {
            if a == base.bot {
                k
            } else if a == k {
                base.bot
            } else {
                base.neg[a]
            }
        })
        .collect();
    Ok(PLattice {
        order,
        neg,
        bot: base.bot,
        top: k,
    })
}

/// A map between two p-lattices, given by its table.
#[derive(Clone, Debug)]
pub struct LatticeHom {
    pub dom: Arc<PLattice>,
    pub cod: Arc<PLattice>,
    pub map: Vec<usize>,
}

impl LatticeHom {
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// The first operation the map fails to preserve, if any.
    pub fn preservation_failure(&self) -> Option<String> {
        let (d, c, h) = (&*self.dom, &*self.cod, &self.map);
        let l = |a: usize| d.label(a).to_string();
        if h[d.bot] != c.bot {
            return Some("0".into());
        }
        if h[d.top] != c.top {
            return Some("1".into());
        }
        for a in 0..d.len() {
            if h[d.neg(a)] != c.neg(h[a]) {
                return Some(format!("neg at {}", l(a)));
            }
            for b in 0..d.len() {
                if h[d.meet(a, b)] != c.meet(h[a], h[b]) {
                    return Some(format!("meet at {}, {}", l(a), l(b)));
                }
                if h[d.join(a, b)] != c.join(h[a], h[b]) {
                    return Some(format!("join at {}, {}", l(a), l(b)));
                }
            }
        }
        None
    }

    pub fn is_homomorphism(&self) -> bool {
        self.preservation_failure().is_none()
    }
}

/// `U ↦ f⁻¹(U)` from `D(y)` to `D(x)` for a monotone `f: x -> y`.
pub fn hom_from_monotone(x: &Poset, y: &Poset, map: &[usize]) -> Result<LatticeHom> {
    if map.len() != x.len() || map.iter().any(|&t| t >= y.len()) {
        return Err(Error::PartialMap("the map must send every element into the codomain".into()));
    }
    for a in 0..x.len() {
        for b in x.up(a).iter() {
            if !y.leq(map[a], map[b]) {
                return Err(Error::InvalidParameter(format!(
                    "map is not monotone at {} <= {}",
                    x.label(a),
                    x.label(b)
                )));
            }
        }
    }
    let (dx, sx) = down_set_lattice(x)?;
    let (dy, sy) = down_set_lattice(y)?;
    let index: HashMap<&BitSet, usize> = sx.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let h = sy
        .iter()
        .map(|u| {
            let pre = BitSet::from_indices(x.len(), (0..x.len()).filter(|&a| u.contains(map[a])));
            index[&pre]
        })
        .collect();
    Ok(LatticeHom {
        dom: Arc::new(dy),
        cod: Arc::new(dx),
        map: h,
    })
}

/// The homomorphism `D(cod u) -> D(dom u)` dual to `u`.
pub fn hom_from_pmorphism(u: &PMorphism) -> Result<LatticeHom> {
    hom_from_monotone(u.dom(), u.cod(), u.map())
}
