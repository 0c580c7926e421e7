//! Canonical forms, isomorphism tests and enumeration of posets up to
//! isomorphism.

use crate::bits::BitSet;
use crate::poset::Poset;
use std::collections::{BTreeMap, HashSet};

/// Canonical code of a poset together with the element order producing it.
#[derive(Clone, Debug)]
pub struct Canon {
    /// Order bits for each placed pair, lexicographically minimal.
    pub code: Vec<bool>,
    /// `perm[p]` is the element placed at canonical position `p`.
    pub perm: Vec<usize>,
}

fn refine_colors(p: &Poset) -> Vec<usize> {
    let n = p.len();
    let mut color: Vec<usize> = {
        let sig: Vec<(usize, usize)> = (0..n).map(|i| (p.down(i).len(), n - p.up(i).len())).collect();
        rank(&sig)
    };
    loop {
        let sig: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|i| {
                let mut d: Vec<usize> = p.down(i).iter().filter(|&j| j != i).map(|j| color[j]).collect();
                let mut u: Vec<usize> = p.up(i).iter().filter(|&j| j != i).map(|j| color[j]).collect();
                d.sort_unstable();
                u.sort_unstable();
                (color[i], d, u)
            })
            .collect();
        let next = rank(&sig);
        let classes = |c: &[usize]| c.iter().collect::<HashSet<_>>().len();
        if classes(&next) == classes(&color) {
            return next;
        }
        color = next;
    }
}

fn rank<T: Ord + Clone>(sig: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = sig.to_vec();
    sorted.sort();
    sorted.dedup();
    sig.iter().map(|s| sorted.binary_search(s).unwrap()).collect()
}

struct Search<'a> {
    p: &'a Poset,
    color: Vec<usize>,
    twin: Vec<usize>,
    best: Option<Vec<bool>>,
    best_perm: Vec<usize>,
}

impl Search<'_> {
    fn rec(&mut self, perm: &mut Vec<usize>, used: &mut BitSet, code: &mut Vec<bool>, slots: &[usize]) {
        let depth = perm.len();
        if depth == self.p.len() {
            if self.best.as_ref().is_none_or(|b| *code < *b) {
                self.best = Some(code.clone());
                self.best_perm = perm.clone();
            }
            return;
        }
        let want = slots[depth];
        let mut tried_twins: Vec<usize> = Vec::new();
        for x in 0..self.p.len() {
            if used.contains(x) || self.color[x] != want || tried_twins.contains(&self.twin[x]) {
                continue;
            }
            tried_twins.push(self.twin[x]);
            let start = code.len();
            for &q in perm.iter() {
                code.push(self.p.leq(x, q));
                code.push(self.p.leq(q, x));
            }
            let prune = match &self.best {
                Some(best) => code[..] > best[..code.len()],
                None => false,
            };
            if !prune {
                perm.push(x);
                used.insert(x);
                self.rec(perm, used, code, slots);
                used.remove(x);
                perm.pop();
            }
            code.truncate(start);
        }
    }
}

/// Canonical code and placement for `p`.
pub fn canonical(p: &Poset) -> Canon {
    let n = p.len();
    let color = refine_colors(p);
    let mut slots = color.clone();
    slots.sort_unstable();
    // Twin classes: elements with identical strict up and down sets are
    // interchangeable, so only one representative per class is branched on.
    let mut keys: BTreeMap<(Vec<usize>, Vec<usize>), usize> = BTreeMap::new();
    let twin = (0..n)
        .map(|i| {
            let d: Vec<usize> = p.down(i).iter().filter(|&j| j != i).collect();
            let u: Vec<usize> = p.up(i).iter().filter(|&j| j != i).collect();
            let next = keys.len();
            *keys.entry((d, u)).or_insert(next)
        })
        .collect();
    let mut s = Search {
        p,
        color,
        twin,
        best: None,
        best_perm: Vec::new(),
    };
    let mut perm = Vec::with_capacity(n);
    let mut used = BitSet::new(n);
    let mut code = Vec::new();
    s.rec(&mut perm, &mut used, &mut code, &slots);
    Canon {
        code: s.best.unwrap_or_default(),
        perm: s.best_perm,
    }
}

/// Canonical key: size plus canonical code. Equal keys iff isomorphic.
pub fn canonical_key(p: &Poset) -> (usize, Vec<bool>) {
    (p.len(), canonical(p).code)
}

pub fn is_isomorphic(a: &Poset, b: &Poset) -> bool {
    a.len() == b.len() && canonical(a).code == canonical(b).code
}

/// An order isomorphism `a -> b` as an index map, if one exists.
pub fn find_isomorphism(a: &Poset, b: &Poset) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let ca = canonical(a);
    let cb = canonical(b);
    if ca.code != cb.code {
        return None;
    }
    let mut map = vec![0; a.len()];
    for (pos, &x) in ca.perm.iter().enumerate() {
        map[x] = cb.perm[pos];
    }
    Some(map)
}

/// `p` reordered canonically and labelled `0..n`.
pub fn canonical_poset(p: &Poset) -> Poset {
    reorder(p, &canonical(p).perm)
}

fn reorder(p: &Poset, perm: &[usize]) -> Poset {
    let n = p.len();
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let down = (0..n)
        .map(|j| BitSet::from_indices(n, (0..n).filter(|&i| p.leq(perm[i], perm[j]))))
        .collect();
    Poset::from_down_rows(labels, down)
}

/// All down-sets of `p` (feasible for small posets).
pub fn down_sets(p: &Poset) -> Vec<BitSet> {
    let n = p.len();
    assert!(n <= 24, "down-set enumeration is exponential");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let s = BitSet::from_indices(n, (0..n).filter(|&i| mask >> i & 1 == 1));
        if p.is_down_set(&s) {
            out.push(s);
        }
    }
    out
}

fn extend_by_maximal(p: &Poset, below: &BitSet) -> Poset {
    let n = p.len();
    let labels: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let mut down: Vec<BitSet> = (0..n)
        .map(|j| BitSet::from_indices(n + 1, p.down(j).iter()))
        .collect();
    let mut top = BitSet::from_indices(n + 1, below.iter());
    top.insert(n);
    down.push(top);
    Poset::from_down_rows(labels, down)
}

fn next_level(level: &[Poset]) -> Vec<Poset> {
    let mut seen = HashSet::new();
    let mut next = Vec::new();
    for p in level {
        for d in down_sets(p) {
            let q = extend_by_maximal(p, &d);
            let c = canonical(&q);
            if seen.insert(c.code.clone()) {
                let r = reorder(&q, &c.perm);
                next.push((c.code, r));
            }
        }
    }
    next.sort_by(|a, b| a.0.cmp(&b.0));
    next.into_iter().map(|(_, p)| p).collect()
}

/// All posets with exactly `n` elements up to isomorphism, canonically
/// labelled and sorted by canonical code.
pub fn posets_of_size(n: usize) -> Vec<Poset> {
    let mut level = vec![Poset::empty()];
    for _ in 0..n {
        level = next_level(&level);
    }
    level
}

/// All posets with `1..=k` elements up to isomorphism, by size then code.
pub fn posets_up_to(k: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    let mut level = vec![Poset::empty()];
    for _ in 0..k {
        level = next_level(&level);
        out.extend(level.iter().cloned());
    }
    out
}
