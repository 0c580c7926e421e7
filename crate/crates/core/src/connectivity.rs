//! Connected and n-connected subsets and their maximal members.

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::morphism::Budget;
use crate::poset::Poset;
use std::collections::HashMap;

/// Largest carrier for which maximal sets are found by a full subset scan.
pub const EXHAUSTIVE_LIMIT: usize = 20;

fn contains_min_below(p: &Poset, y: &BitSet) -> bool {
    y.iter().all(|x| p.min_below(x).is_subset(y))
}

/// Clause (i) plus a joint cover with exact min-union inside `y` for every pair.
pub fn is_connected(p: &Poset, y: &BitSet) -> bool {
    if !contains_min_below(p, y) {
        return false;
    }
    let ys = y.to_vec();
    ys.iter().enumerate().all(|(i, &a)| {
        ys[i + 1..].iter().all(|&b| {
            let s = p.min_below(a).union(p.min_below(b));
            p.upper_bounds(a, b).iter().any(|z| y.contains(z) && *p.min_below(z) == s)
        })
    })
}

fn binom_sum(m: usize, n: usize) -> usize {
    let mut total = 0usize;
    let mut c = 1usize;
    for k in 1..=n.min(m) {
        c = c * (m - k + 1) / k;
        total += c;
    }
    total
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// The three n-connectedness clauses, assuming `p` is in the class for `n`.
fn n_connected_unchecked(p: &Poset, y: &BitSet, n: usize) -> bool {
    if !contains_min_below(p, y) {
        return false;
    }
    // (ii): every non-empty S ⊆ min(Y) with |S| <= n is some min(z), z ∈ Y.
    // Each min(z) is such an S, so it suffices to count the distinct ones.
    let m = y.intersection(p.minimals()).len();
    let mut present: Vec<&BitSet> = y.iter().map(|z| p.min_below(z)).filter(|s| s.len() <= n).collect();
    present.sort();
    present.dedup();
    if present.len() != binom_sum(m, n) {
        return false;
    }
    // (iii): within each class of equal small min-sets, the comparability
    // graph restricted to the class is connected.
    let ys = y.to_vec();
    let mut parent: Vec<usize> = (0..ys.len()).collect();
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            let (a, b) = (ys[i], ys[j]);
            if p.min_below(a) == p.min_below(b) && p.comparable(a, b) {
                let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                parent[ra] = rb;
            }
        }
    }
    let mut root_of: HashMap<&BitSet, usize> = HashMap::new();
    for (i, &a) in ys.iter().enumerate() {
        let s = p.min_below(a);
        if s.len() >= n {
            continue;
        }
        let r = find(&mut parent, i);
        if *root_of.entry(s).or_insert(r) != r {
            return false;
        }
    }
    true
}

pub fn is_n_connected(p: &Poset, y: &BitSet, n: usize) -> Result<bool> {
    if !p.in_pn(n) {
        return Err(Error::VarietyMismatch(format!("poset has elements with more than {n} minimals below")));
    }
    Ok(n_connected_unchecked(p, y, n))
}

/// Label-level wrapper reporting unknown labels.
pub fn is_connected_labels<S: AsRef<str>>(p: &Poset, y: &[S]) -> Result<bool> {
    Ok(is_connected(p, &p.set_of(y)?))
}

/// Maximal (n-)connected sets with a flag telling whether they came from a
/// full scan or from verified greedy growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub sets: Vec<BitSet>,
    pub exhaustive: bool,
}

#[derive(Clone, Copy)]
enum Kind {
    Plain,
    N(usize),
}

impl Kind {
    fn holds(self, p: &Poset, y: &BitSet) -> bool {
        match self {
            Kind::Plain => is_connected(p, y),
            Kind::N(n) => n_connected_unchecked(p, y, n),
        }
    }
}

/// Precomputed u32 masks for the subset scan.
struct Masks {
    n: usize,
    minb: Vec<u32>,
    comparable: Vec<u32>,
    exact: Vec<Vec<u32>>,
    minimals: u32,
}

fn to_mask(s: &BitSet) -> u32 {
    s.iter().fold(0, |acc, i| acc | 1 << i)
}

impl Masks {
    fn new(p: &Poset) -> Masks {
        let n = p.len();
        let minb: Vec<u32> = (0..n).map(|i| to_mask(p.min_below(i))).collect();
        let comparable = (0..n).map(|i| to_mask(&p.up(i).union(p.down(i)))).collect();
        let exact = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let s = minb[a] | minb[b];
                        p.upper_bounds(a, b).iter().filter(|&z| minb[z] == s).fold(0, |acc, z| acc | 1 << z)
                    })
                    .collect()
            })
            .collect();
        Masks {
            n,
            minb,
            comparable,
            exact,
            minimals: to_mask(p.minimals()),
        }
    }

    fn closed(&self, y: u32) -> bool {
        bits(y).all(|x| self.minb[x] & !y == 0)
    }

    fn connected(&self, y: u32) -> bool {
        self.closed(y) && bits(y).all(|a| bits(y >> a >> 1).all(|d| self.exact[a][a + 1 + d] & y != 0))
    }

    fn n_connected(&self, y: u32, n: usize) -> bool {
        if !self.closed(y) {
            return false;
        }
        let m = (y & self.minimals).count_ones() as usize;
        let mut present: Vec<u32> = bits(y).map(|z| self.minb[z]).filter(|s| s.count_ones() as usize <= n).collect();
        present.sort_unstable();
        present.dedup();
        if present.len() != binom_sum(m, n) {
            return false;
        }
        let ys: Vec<usize> = bits(y).collect();
        let mut parent: Vec<usize> = (0..self.n).collect();
        for &a in &ys {
            for b in bits(y & self.comparable[a]) {
                if self.minb[a] == self.minb[b] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut roots: Vec<(u32, usize)> = Vec::new();
        for &a in &ys {
            if (self.minb[a].count_ones() as usize) < n {
                let r = find(&mut parent, a);
                match roots.iter().find(|e| e.0 == self.minb[a]) {
                    Some(e) if e.1 != r => return false,
                    Some(_) => {}
                    None => roots.push((self.minb[a], r)),
                }
            }
        }
        true
    }

    fn holds(&self, kind: Kind, y: u32) -> bool {
        match kind {
            Kind::Plain => self.connected(y),
            Kind::N(n) => self.n_connected(y, n),
        }
    }
}

fn bits(mut y: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if y == 0 {
            None
        } else {
            let i = y.trailing_zeros() as usize;
            y &= y - 1;
            Some(i)
        }
    })
}

fn sort_sets(sets: &mut [BitSet]) {
    sets.sort_by_key(|s| s.to_vec());
}

fn scan(p: &Poset, kind: Kind, budget: &Budget) -> Result<Vec<BitSet>> {
    let masks = Masks::new(p);
    let n = p.len();
    let mut meter = budget.meter();
    let mut good: Vec<u32> = Vec::new();
    for y in 1u32..(1u32 << n) {
        meter.tick()?;
        if masks.holds(kind, y) {
            good.push(y);
        }
    }
    // Any member of the family lies below some maximal one of larger size,
    // so scanning by decreasing size leaves exactly the maximal sets.
    good.sort_by_key(|y| std::cmp::Reverse(y.count_ones()));
    let mut max: Vec<u32> = Vec::new();
    for y in good {
        if !max.iter().any(|&m| y & !m == 0) {
            max.push(y);
        }
    }
    let mut sets: Vec<BitSet> = max
        .into_iter()
        .map(|m| BitSet::from_indices(n, bits(m)))
        .collect();
    sort_sets(&mut sets);
    Ok(sets)
}

fn grow(p: &Poset, kind: Kind, mut y: BitSet) -> BitSet {
    loop {
        let mut changed = false;
        for x in 0..p.len() {
            if y.contains(x) {
                continue;
            }
            let mut small = y.clone();
            small.insert(x);
            small.union_with(p.min_below(x));
            let down = y.union(p.down(x));
            for t in [small, down] {
                if kind.holds(p, &t) {
                    y = t;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            return y;
        }
    }
}

fn greedy(p: &Poset, kind: Kind) -> Vec<BitSet> {
    let mut found: Vec<BitSet> = Vec::new();
    for x in 0..p.len() {
        let mut small = p.min_below(x).clone();
        small.insert(x);
        for seed in [p.down(x).clone(), small] {
            if !kind.holds(p, &seed) {
                continue;
            }
            let y = grow(p, kind, seed);
            if !found.contains(&y) {
                found.push(y);
            }
        }
    }
    let mut max: Vec<BitSet> = found
        .iter()
        .filter(|y| !found.iter().any(|o| o != *y && y.is_subset(o)))
        .cloned()
        .collect();
    sort_sets(&mut max);
    max
}

fn family(p: &Poset, kind: Kind, budget: &Budget) -> Result<Family> {
    if p.is_empty() {
        return Ok(Family {
            sets: vec![BitSet::new(0)],
            exhaustive: true,
        });
    }
    if p.len() <= EXHAUSTIVE_LIMIT {
        return Ok(Family {
            sets: scan(p, kind, budget)?,
            exhaustive: true,
        });
    }
    Ok(Family {
        sets: greedy(p, kind),
        exhaustive: false,
    })
}

/// All ⊆-maximal connected subsets, sorted by carrier.
pub fn max_connected(p: &Poset) -> Result<Vec<BitSet>> {
    Ok(max_connected_with(p, &Budget::default())?.sets)
}

pub fn max_connected_with(p: &Poset, budget: &Budget) -> Result<Family> {
    family(p, Kind::Plain, budget)
}

/// All ⊆-maximal n-connected subsets, sorted by carrier.
pub fn max_n_connected(p: &Poset, n: usize) -> Result<Vec<BitSet>> {
    Ok(max_n_connected_with(p, n, &Budget::default())?.sets)
}

pub fn max_n_connected_with(p: &Poset, n: usize, budget: &Budget) -> Result<Family> {
    if !p.in_pn(n) {
        return Err(Error::VarietyMismatch(format!("poset has elements with more than {n} minimals below")));
    }
    family(p, Kind::N(n), budget)
}
