//! p-morphisms: validation, enumeration, composition and factorization.

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::poset::Poset;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Default node cap for exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Node cap for exhaustive searches. Exceeding it is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub nodes: u64,
}

impl Budget {
    pub fn new(nodes: u64) -> Budget {
        Budget { nodes }
    }

    /// `PLU_BUDGET` if set to an integer, else [`DEFAULT_BUDGET`].
    pub fn from_env() -> Budget {
        let nodes = std::env::var("PLU_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Budget { nodes }
    }

    pub(crate) fn meter(&self) -> Meter {
        Meter {
            limit: self.nodes,
            used: 0,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}

pub(crate) struct Meter {
    limit: u64,
    used: u64,
}

impl Meter {
    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::SizeLimitExceeded(self.limit));
        }
        Ok(())
    }
}

/// First violated p-morphism condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `x <= y` in the domain but the images are not ordered.
    NotMonotone { x: String, y: String },
    /// The image of `min(x)` differs from `min(u(x))`.
    MinNotPreserved { x: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotMonotone { x, y } => {
                write!(f, "monotonicity fails: {x} <= {y} but images are not ordered")
            }
            Violation::MinNotPreserved { x } => {
                write!(f, "min-preservation fails at {x}")
            }
        }
    }
}

/// Checks both p-morphism conditions for an index map.
pub fn check_map(dom: &Poset, cod: &Poset, map: &[usize]) -> std::result::Result<(), Violation> {
    for x in 0..dom.len() {
        for y in dom.up(x).iter() {
            if !cod.leq(map[x], map[y]) {
                return Err(Violation::NotMonotone {
                    x: dom.label(x).to_string(),
                    y: dom.label(y).to_string(),
                });
            }
        }
    }
    for x in 0..dom.len() {
        let img = BitSet::from_indices(cod.len(), dom.min_below(x).iter().map(|m| map[m]));
        if img != *cod.min_below(map[x]) {
            return Err(Violation::MinNotPreserved {
                x: dom.label(x).to_string(),
            });
        }
    }
    Ok(())
}

/// Label-level validation. Errors on unknown labels or a partial map; returns
/// the first violated condition otherwise.
pub fn check_pmorphism(
    dom: &Poset,
    cod: &Poset,
    map: &HashMap<String, String>,
) -> Result<std::result::Result<(), Violation>> {
    let idx = label_map_to_indices(dom, cod, map)?;
    Ok(check_map(dom, cod, &idx))
}

fn label_map_to_indices(dom: &Poset, cod: &Poset, map: &HashMap<String, String>) -> Result<Vec<usize>> {
    for k in map.keys() {
        dom.idx(k)?;
    }
    dom.labels()
        .iter()
        .map(|l| {
            let t = map.get(l).ok_or_else(|| Error::PartialMap(l.clone()))?;
            cod.idx(t)
        })
        .collect()
}

/// A validated p-morphism between finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMorphism {
    dom: Arc<Poset>,
    cod: Arc<Poset>,
    map: Vec<usize>,
}

impl PMorphism {
    /// Validates `map` and wraps it.
    pub fn new(dom: Arc<Poset>, cod: Arc<Poset>, map: Vec<usize>) -> Result<PMorphism> {
        if map.len() != dom.len() {
            return Err(Error::PartialMap(format!("{} of {} elements mapped", map.len(), dom.len())));
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= cod.len()) {
            return Err(Error::UnknownElement(format!("codomain index {bad}")));
        }
        check_map(&dom, &cod, &map).map_err(|v| Error::NotPMorphism(v.to_string()))?;
        Ok(PMorphism { dom, cod, map })
    }

    pub(crate) fn new_unchecked(dom: Arc<Poset>, cod: Arc<Poset>, map: Vec<usize>) -> PMorphism {
        debug_assert!(check_map(&dom, &cod, &map).is_ok());
        PMorphism { dom, cod, map }
    }

    pub fn from_labels(dom: Arc<Poset>, cod: Arc<Poset>, map: &HashMap<String, String>) -> Result<PMorphism> {
        let idx = label_map_to_indices(&dom, &cod, map)?;
        PMorphism::new(dom, cod, idx)
    }

    pub fn identity(p: Arc<Poset>) -> PMorphism {
        let map = (0..p.len()).collect();
        PMorphism {
            dom: p.clone(),
            cod: p,
            map,
        }
    }

    /// Inclusion of the subposet on `s` into `host`. Valid only when `s`
    /// contains the host minimals below each of its members.
    pub fn inclusion(host: Arc<Poset>, s: &BitSet) -> Result<PMorphism> {
        let sub = Arc::new(host.subposet(s));
        let map = s.iter().collect();
        PMorphism::new(sub, host, map)
    }

    pub fn dom(&self) -> &Arc<Poset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<Poset> {
        &self.cod
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_label(&self, x: &str) -> Result<&str> {
        Ok(self.cod.label(self.map[self.dom.idx(x)?]))
    }

    pub fn image(&self) -> BitSet {
        BitSet::from_indices(self.cod.len(), self.map.iter().copied())
    }

    /// `(dom label, cod label)` pairs in domain order.
    pub fn label_pairs(&self) -> Vec<(String, String)> {
        (0..self.dom.len())
            .map(|x| (self.dom.label(x).to_string(), self.cod.label(self.map[x]).to_string()))
            .collect()
    }
}

/// `g ∘ f`.
pub fn compose(g: &PMorphism, f: &PMorphism) -> Result<PMorphism> {
    if **f.cod() != **g.dom() {
        return Err(Error::DomainMismatch("codomain of f is not the domain of g".into()));
    }
    let map = f.map.iter().map(|&y| g.map[y]).collect();
    Ok(PMorphism::new_unchecked(f.dom.clone(), g.cod.clone(), map))
}

/// Backtracking search for p-morphisms `dom -> cod` where `x` may only map
/// into `cands[x]`. Elements are assigned in index order so that results come
/// out lexicographically. `visit` returns `false` to stop.
pub(crate) fn search(
    dom: &Poset,
    cod: &Poset,
    cands: &[BitSet],
    meter: &mut Meter,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<()> {
    let n = dom.len();
    if n == 0 {
        visit(&[]);
        return Ok(());
    }
    // For each position p, the elements whose min condition becomes checkable
    // once p is assigned: all of {x} ∪ min(x) have index <= p, with max = p.
    let mut min_ready: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        let last = dom.min_below(x).iter().chain([x]).max().unwrap();
        min_ready[last].push(x);
    }
    let mut map = vec![usize::MAX; n];
    let mut stopped = false;
    rec(dom, cod, cands, &min_ready, 0, &mut map, meter, visit, &mut stopped)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    dom: &Poset,
    cod: &Poset,
    cands: &[BitSet],
    min_ready: &[Vec<usize>],
    p: usize,
    map: &mut Vec<usize>,
    meter: &mut Meter,
    visit: &mut dyn FnMut(&[usize]) -> bool,
    stopped: &mut bool,
) -> Result<()> {
    if p == dom.len() {
        if !visit(map) {
            *stopped = true;
        }
        return Ok(());
    }
    'cand: for t in cands[p].iter() {
        meter.tick()?;
        for y in 0..p {
            if dom.leq(y, p) && !cod.leq(map[y], t) {
                continue 'cand;
            }
            if dom.leq(p, y) && !cod.leq(t, map[y]) {
                continue 'cand;
            }
        }
        map[p] = t;
        for &x in &min_ready[p] {
            let img = BitSet::from_indices(cod.len(), dom.min_below(x).iter().map(|m| map[m]));
            if img != *cod.min_below(map[x]) {
                continue 'cand;
            }
        }
        rec(dom, cod, cands, min_ready, p + 1, map, meter, visit, stopped)?;
        if *stopped {
            return Ok(());
        }
    }
    map[p] = usize::MAX;
    Ok(())
}

fn all_candidates(dom: &Poset, cod: &Poset) -> Vec<BitSet> {
    (0..dom.len())
        .map(|x| {
            if dom.minimals().contains(x) {
                cod.minimals().clone()
            } else {
                cod.all()
            }
        })
        .collect()
}

/// All p-morphisms `x -> y`, in lexicographic order of their index maps.
pub fn enumerate_pmorphisms(x: &Arc<Poset>, y: &Arc<Poset>) -> Result<Vec<PMorphism>> {
    enumerate_pmorphisms_with(x, y, &Budget::default())
}

pub fn enumerate_pmorphisms_with(x: &Arc<Poset>, y: &Arc<Poset>, budget: &Budget) -> Result<Vec<PMorphism>> {
    let mut out = Vec::new();
    let mut meter = budget.meter();
    let cands = all_candidates(x, y);
    search(x, y, &cands, &mut meter, &mut |m| {
        out.push(PMorphism::new_unchecked(x.clone(), y.clone(), m.to_vec()));
        true
    })?;
    Ok(out)
}

/// Counts p-morphisms without materializing them.
pub fn count_pmorphisms(x: &Poset, y: &Poset, budget: &Budget) -> Result<usize> {
    let mut n = 0;
    let mut meter = budget.meter();
    search(x, y, &all_candidates(x, y), &mut meter, &mut |_| {
        n += 1;
        true
    })?;
    Ok(n)
}

/// `(u)_n`: the restriction of `u` to `(dom)_n -> (cod)_n`.
pub fn restrict_morphism_n(u: &PMorphism, n: usize) -> PMorphism {
    let d = Arc::new(u.dom.restrict_n(n));
    let c = Arc::new(u.cod.restrict_n(n));
    let map = (0..d.len())
        .map(|i| {
            let x = u.dom.index_of(d.label(i)).unwrap();
            c.index_of(u.cod.label(u.map[x])).unwrap()
        })
        .collect();
    PMorphism::new_unchecked(d, c, map)
}

/// A `psi: dom(u) -> dom(v)` with `v ∘ psi = u`, if one exists. The
/// lexicographically first such map is returned.
pub fn factor_through(u: &PMorphism, v: &PMorphism) -> Result<Option<PMorphism>> {
    factor_through_with(u, v, &Budget::default())
}

pub fn factor_through_with(u: &PMorphism, v: &PMorphism, budget: &Budget) -> Result<Option<PMorphism>> {
    if u.cod != v.cod {
        return Err(Error::CodomainMismatch("u and v have different codomains".into()));
    }
    let dv = v.dom.len();
    let mut fibres = vec![BitSet::new(dv); u.cod.len()];
    for (y, &t) in v.map.iter().enumerate() {
        fibres[t].insert(y);
    }
    let mut cands: Vec<BitSet> = (0..u.dom.len()).map(|x| fibres[u.map[x]].clone()).collect();
    for (x, c) in cands.iter_mut().enumerate() {
        if u.dom.minimals().contains(x) {
            c.intersect_with(v.dom.minimals());
        }
        if c.is_empty() {
            return Ok(None);
        }
    }
    let mut found = None;
    let mut meter = budget.meter();
    search(&u.dom, &v.dom, &cands, &mut meter, &mut |m| {
        found = Some(m.to_vec());
        false
    })?;
    Ok(found.map(|m| PMorphism::new_unchecked(u.dom.clone(), v.dom.clone(), m)))
}

/// `u ≼ v`.
pub fn is_more_specific(u: &PMorphism, v: &PMorphism, budget: &Budget) -> Result<bool> {
    Ok(factor_through_with(u, v, budget)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{antichain, chain, poset_g, poset_p};

    fn all_maps(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for m in &out {
                for t in 0..k {
                    let mut m2 = m.clone();
                    m2.push(t);
                    next.push(m2);
                }
            }
            out = next;
        }
        out
    }

    /// Naive oracle: all maps, filtered by the definition.
    fn naive(x: &Poset, y: &Poset) -> Vec<Vec<usize>> {
        all_maps(x.len(), y.len())
            .into_iter()
            .filter(|m| {
                let mono = (0..x.len()).all(|a| (0..x.len()).all(|b| !x.leq(a, b) || y.leq(m[a], m[b])));
                let mins = (0..x.len()).all(|a| {
                    let mut img: Vec<usize> = x.min_below(a).iter().map(|q| m[q]).collect();
                    img.sort();
                    img.dedup();
                    img == y.min_below(m[a]).to_vec()
                });
                mono && mins
            })
            .collect()
    }

    #[test]
    fn counts_match_spec_examples() {
        let p1 = Arc::new(poset_p(1).unwrap());
        let g = Arc::new(poset_g());
        assert_eq!(enumerate_pmorphisms(&p1, &g).unwrap().len(), 1);
        let p2 = Arc::new(poset_p(2).unwrap());
        assert_eq!(enumerate_pmorphisms(&p2, &p2).unwrap().len(), 4);
        assert_eq!(naive(&p2, &p2).len(), 4);
        let e = Arc::new(Poset::empty());
        assert_eq!(enumerate_pmorphisms(&g, &e).unwrap().len(), 0);
    }

    #[test]
    fn search_agrees_with_naive() {
        let ps: Vec<Poset> = vec![
            chain(1),
            chain(2),
            antichain(2),
            chain(3),
            poset_p(2).unwrap(),
            antichain(3),
            Poset::from_covers(&["a", "b", "c", "d"], &[("a", "c"), ("b", "c"), ("b", "d")]).unwrap(),
        ];
        for x in &ps {
            for y in &ps {
                let ax = Arc::new(x.clone());
                let ay = Arc::new(y.clone());
                let got: Vec<Vec<usize>> = enumerate_pmorphisms(&ax, &ay)
                    .unwrap()
                    .into_iter()
                    .map(|m| m.map().to_vec())
                    .collect();
                assert_eq!(got, naive(x, y));
            }
        }
    }

    #[test]
    fn constant_map_on_g_fails_min() {
        let g = poset_g();
        let f = g.idx("f").unwrap();
        let v = check_map(&g, &g, &[f; 6]).unwrap_err();
        assert_eq!(v, Violation::MinNotPreserved { x: "a".into() });
        assert!(check_map(&g, &g, &[0, 1, 2, 3, 4, 5]).is_ok());
    }

    #[test]
    fn label_check_errors() {
        let g = poset_g();
        let mut m: HashMap<String, String> = HashMap::new();
        m.insert("a".into(), "a".into());
        assert!(matches!(check_pmorphism(&g, &g, &m), Err(Error::PartialMap(_))));
        m.insert("zz".into(), "a".into());
        assert!(matches!(check_pmorphism(&g, &g, &m), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn compose_and_identity() {
        let p2 = Arc::new(poset_p(2).unwrap());
        let all = enumerate_pmorphisms(&p2, &p2).unwrap();
        let id = PMorphism::identity(p2.clone());
        for f in &all {
            assert_eq!(compose(&id, f).unwrap(), *f);
            assert_eq!(compose(f, &id).unwrap(), *f);
        }
        let g = Arc::new(poset_g());
        let idg = PMorphism::identity(g);
        assert!(compose(&idg, &id).is_err());
    }

    #[test]
    fn factor_through_basics() {
        let p2 = Arc::new(poset_p(2).unwrap());
        let all = enumerate_pmorphisms(&p2, &p2).unwrap();
        for u in &all {
            let psi = factor_through(u, u).unwrap().unwrap();
            assert_eq!(compose(u, &psi).unwrap(), *u);
        }
    }

    #[test]
    fn restriction_of_inclusion() {
        let p2 = Arc::new(poset_p(2).unwrap());
        let p3 = Arc::new(poset_p(3).unwrap());
        let s = p3.set_of(&["1", "2", "12"]).unwrap();
        let inc = PMorphism::inclusion(p3.clone(), &s).unwrap();
        assert_eq!(inc.dom().labels(), p2.labels());
        let r = restrict_morphism_n(&inc, 1);
        assert_eq!(r.dom().len(), 2);
        assert_eq!(r.cod().len(), 3);
        assert_eq!(r.label_pairs(), vec![("1".into(), "1".into()), ("2".into(), "2".into())]);
        let id = PMorphism::identity(p3.clone());
        let r2 = restrict_morphism_n(&id, 2);
        assert_eq!(r2, PMorphism::identity(Arc::new(p3.restrict_n(2))));
        assert_eq!(restrict_morphism_n(&id, 7), id);
    }

    #[test]
    fn budget_is_enforced() {
        let p = Arc::new(poset_p(3).unwrap());
        let r = enumerate_pmorphisms_with(&p, &p, &Budget::new(3));
        assert_eq!(r, Err(Error::SizeLimitExceeded(3)));
    }
}
