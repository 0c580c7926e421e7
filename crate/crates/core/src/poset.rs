//! Finite posets stored as bit-matrix up/down rows, plus the named posets.

use crate::bits::BitSet;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// A finite partially ordered set with labelled elements.
///
/// Elements keep the order they were given at construction, and every
/// enumeration in the crate follows that order.
#[derive(Clone, Debug)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    minb: Vec<BitSet>,
    mins: BitSet,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.up == other.up
    }
}

impl Eq for Poset {}

fn index_labels<S: AsRef<str>>(labels: &[S]) -> Result<(Vec<String>, HashMap<String, usize>)> {
    let mut out = Vec::with_capacity(labels.len());
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        let l = l.as_ref().to_string();
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(l));
        }
        out.push(l);
    }
    Ok((out, index))
}

impl Poset {
    pub fn empty() -> Poset {
        Poset::from_down_rows(Vec::new(), Vec::new())
    }

    /// Builds the reflexive-transitive closure of a cover relation.
    pub fn from_covers<S: AsRef<str>, T: AsRef<str>>(labels: &[S], covers: &[(T, T)]) -> Result<Poset> {
        let (labels, index) = index_labels(labels)?;
        let n = labels.len();
        let mut down: Vec<BitSet> = (0..n).map(|i| BitSet::from_indices(n, [i])).collect();
        for (a, b) in covers {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownLabel(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownLabel(b.as_ref().to_string()))?;
            if ia == ib {
                continue;
            }
            down[ib].insert(ia);
        }
        warshall(&mut down);
        for i in 0..n {
            for j in down[i].iter() {
                if j != i && down[j].contains(i) {
                    return Err(Error::CycleDetected(labels[i].clone()));
                }
            }
        }
        Ok(Poset::from_down_rows(labels, down))
    }

    /// Builds a poset from the full order relation, given as `(a, b)` pairs
    /// meaning `a <= b`. Reflexive pairs may be omitted; the relation must
    /// already be transitive and antisymmetric.
    pub fn from_leq<S: AsRef<str>, T: AsRef<str>>(labels: &[S], leq: &[(T, T)]) -> Result<Poset> {
        let (labels, index) = index_labels(labels)?;
        let n = labels.len();
        let mut down: Vec<BitSet> = (0..n).map(|i| BitSet::from_indices(n, [i])).collect();
        for (a, b) in leq {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownLabel(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownLabel(b.as_ref().to_string()))?;
            down[ib].insert(ia);
        }
        verify_order(&labels, &down)?;
        Ok(Poset::from_down_rows(labels, down))
    }

    /// Builds a poset from a predicate `leq(i, j)` over indices, verifying the
    /// order axioms.
    pub fn from_fn<S: AsRef<str>>(labels: &[S], leq: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        let (labels, _) = index_labels(labels)?;
        let n = labels.len();
        let down: Vec<BitSet> = (0..n)
            .map(|j| BitSet::from_indices(n, (0..n).filter(|&i| i == j || leq(i, j))))
            .collect();
        verify_order(&labels, &down)?;
        Ok(Poset::from_down_rows(labels, down))
    }

    /// Trusted constructor from down rows (`down[j]` = indices below `j`).
    pub(crate) fn from_down_rows(labels: Vec<String>, down: Vec<BitSet>) -> Poset {
        let n = labels.len();
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut up: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for (j, row) in down.iter().enumerate() {
            for i in row.iter() {
                up[i].insert(j);
            }
        }
        let mut mins = BitSet::new(n);
        for i in 0..n {
            if down[i].len() == 1 {
                mins.insert(i);
            }
        }
        let minb = down.iter().map(|d| d.intersection(&mins)).collect();
        Poset {
            labels,
            index,
            up,
            down,
            minb,
            mins,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Index lookup that reports unknown labels as an error.
    pub fn idx(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<BitSet> {
        let mut s = BitSet::new(self.len());
        for l in labels {
            s.insert(self.idx(l.as_ref())?);
        }
        Ok(s)
    }

    pub fn labels_of(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn empty_set(&self) -> BitSet {
        BitSet::new(self.len())
    }

    pub fn all(&self) -> BitSet {
        BitSet::full(self.len())
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    #[inline]
    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    /// `↑i`, including `i`.
    pub fn up(&self, i: usize) -> &BitSet {
        &self.up[i]
    }

    /// `↓i`, including `i`.
    pub fn down(&self, i: usize) -> &BitSet {
        &self.down[i]
    }

    pub fn minimals(&self) -> &BitSet {
        &self.mins
    }

    pub fn maximals(&self) -> BitSet {
        BitSet::from_indices(self.len(), (0..self.len()).filter(|&i| self.up[i].len() == 1))
    }

    /// `min(P) ∩ ↓i`.
    pub fn min_below(&self, i: usize) -> &BitSet {
        &self.minb[i]
    }

    /// Union of the min-sets of the members of `s`.
    pub fn min_of_set(&self, s: &BitSet) -> BitSet {
        let mut r = self.empty_set();
        for i in s.iter() {
            r.union_with(&self.minb[i]);
        }
        r
    }

    pub fn up_set(&self, s: &BitSet) -> BitSet {
        let mut r = self.empty_set();
        for i in s.iter() {
            r.union_with(&self.up[i]);
        }
        r
    }

    pub fn down_set(&self, s: &BitSet) -> BitSet {
        let mut r = self.empty_set();
        for i in s.iter() {
            r.union_with(&self.down[i]);
        }
        r
    }

    pub fn is_down_set(&self, s: &BitSet) -> bool {
        self.down_set(s) == *s
    }

    /// Common upper bounds of `i` and `j`.
    pub fn upper_bounds(&self, i: usize, j: usize) -> BitSet {
        self.up[i].intersection(&self.up[j])
    }

    /// Least element of `s`, if any.
    pub fn least_of(&self, s: &BitSet) -> Option<usize> {
        s.iter().find(|&l| s.is_subset(&self.up[l]))
    }

    /// Greatest element of `s`, if any.
    pub fn greatest_of(&self, s: &BitSet) -> Option<usize> {
        s.iter().find(|&g| s.is_subset(&self.down[g]))
    }

    /// Minimal elements of the subset `s` under the induced order.
    pub fn minimal_in(&self, s: &BitSet) -> BitSet {
        let mut r = s.clone();
        for i in s.iter() {
            let mut below = self.down[i].intersection(s);
            below.remove(i);
            if !below.is_empty() {
                r.remove(i);
            }
        }
        r
    }

    /// Least upper bound of `i` and `j`.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        self.least_of(&self.upper_bounds(i, j))
    }

    /// Greatest lower bound of `i` and `j`.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        self.greatest_of(&self.down[i].intersection(&self.down[j]))
    }

    /// Least upper bound of a non-empty set.
    pub fn join_set(&self, s: &BitSet) -> Option<usize> {
        let mut it = s.iter();
        let first = it.next()?;
        let mut ub = self.up[first].clone();
        for i in it {
            ub.intersect_with(&self.up[i]);
        }
        self.least_of(&ub)
    }

    /// Induced subposet on `s`, keeping the host order of elements.
    pub fn subposet(&self, s: &BitSet) -> Poset {
        let keep: Vec<usize> = s.iter().collect();
        let m = keep.len();
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let down = keep
            .iter()
            .map(|&j| BitSet::from_indices(m, (0..m).filter(|&a| self.leq(keep[a], j))))
            .collect();
        Poset::from_down_rows(labels, down)
    }

    /// `(P)_n`: for `n >= 1` the subposet of elements with at most `n`
    /// minimals below; for `n = 0` the antichain of minimal elements.
    pub fn restrict_n(&self, n: usize) -> Poset {
        if n == 0 {
            let keep: Vec<usize> = self.mins.iter().collect();
            let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
            let down = (0..keep.len())
                .map(|j| BitSet::from_indices(keep.len(), [j]))
                .collect();
            return Poset::from_down_rows(labels, down);
        }
        self.subposet(&self.elements_with_min_at_most(n))
    }

    pub fn elements_with_min_at_most(&self, n: usize) -> BitSet {
        BitSet::from_indices(self.len(), (0..self.len()).filter(|&i| self.minb[i].len() <= n))
    }

    /// Membership in the class of posets with `|min(x)| <= n` everywhere
    /// (`n >= 1`), or of antichains (`n = 0`).
    pub fn in_pn(&self, n: usize) -> bool {
        if n == 0 {
            return self.mins.len() == self.len();
        }
        self.minb.iter().all(|m| m.len() <= n)
    }

    /// Largest `|min(x)|` over all elements (0 for the empty poset).
    pub fn max_min_size(&self) -> usize {
        self.minb.iter().map(|m| m.len()).max().unwrap_or(0)
    }

    /// Cover pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            for i in self.down[j].iter() {
                if i == j {
                    continue;
                }
                let between = self.up[i].intersection(&self.down[j]);
                if between.len() == 2 {
                    out.push((i, j));
                }
            }
        }
        out.sort();
        out
    }

    /// Checks reflexivity, antisymmetry and transitivity on all pairs and triples.
    pub fn check_axioms(&self) -> bool {
        verify_order(&self.labels, &self.down).is_ok()
    }

    /// The same order with new labels (same length, distinct).
    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Poset> {
        if labels.len() != self.len() {
            return Err(Error::InvalidParameter("label count differs".into()));
        }
        let (labels, _) = index_labels(labels)?;
        Ok(Poset::from_down_rows(labels, self.down.clone()))
    }

    /// Graphviz rendering of the Hasse diagram, bottom to top.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph poset {\n  rankdir=BT;\n");
        for (i, l) in self.labels.iter().enumerate() {
            s.push_str(&format!("  n{} [label={}];\n", i, dot_quote(l)));
        }
        for (i, j) in self.covers() {
            s.push_str(&format!("  n{} -> n{};\n", i, j));
        }
        s.push_str("}\n");
        s
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn warshall(down: &mut [BitSet]) {
    let n = down.len();
    for k in 0..n {
        let row_k = down[k].clone();
        for row in down.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
}

fn verify_order(labels: &[String], down: &[BitSet]) -> Result<()> {
    let n = labels.len();
    for i in 0..n {
        if !down[i].contains(i) {
            return Err(Error::NotAnOrder(format!("`{}` is not reflexive", labels[i])));
        }
        for j in down[i].iter() {
            if j != i && down[j].contains(i) {
                return Err(Error::CycleDetected(labels[i].clone()));
            }
            if !down[j].is_subset(&down[i]) {
                return Err(Error::NotAnOrder(format!(
                    "transitivity fails below `{}` via `{}`",
                    labels[i], labels[j]
                )));
            }
        }
    }
    Ok(())
}

/// Label of a subset of `{1..m}` given as a bit mask (bit `i-1` for `i`).
/// Digits are concatenated for `m <= 9`, comma-separated otherwise.
pub fn subset_label(mask: u64, m: usize) -> String {
    let items: Vec<String> = (1..=m)
        .filter(|i| mask >> (i - 1) & 1 == 1)
        .map(|i| i.to_string())
        .collect();
    if items.is_empty() {
        return "\u{2205}".to_string();
    }
    if m <= 9 {
        items.concat()
    } else {
        items.join(",")
    }
}

/// Parses a subset label produced by [`subset_label`].
pub fn parse_subset_label(label: &str, m: usize) -> Option<u64> {
    if label == "\u{2205}" {
        return Some(0);
    }
    let mut mask = 0u64;
    if m <= 9 {
        for c in label.chars() {
            let d = c.to_digit(10)? as usize;
            if d == 0 || d > m {
                return None;
            }
            mask |= 1 << (d - 1);
        }
    } else {
        for part in label.split(',') {
            let d: usize = part.parse().ok()?;
            if d == 0 || d > m {
                return None;
            }
            mask |= 1 << (d - 1);
        }
    }
    Some(mask)
}

/// Subset masks of `{1..m}` ordered by size, then lexicographically by the
/// sorted element list.
pub(crate) fn subset_masks(m: usize, include_empty: bool, max_size: usize) -> Vec<u64> {
    let mut v: Vec<u64> = (0..(1u64 << m))
        .filter(|&s| (include_empty || s != 0) && (s.count_ones() as usize) <= max_size)
        .collect();
    v.sort_by_key(|&s| {
        let items: Vec<u32> = (0..m as u32).filter(|i| s >> i & 1 == 1).collect();
        (s.count_ones(), items)
    });
    v
}

fn subset_poset(m: usize, include_empty: bool, max_size: usize) -> Poset {
    let masks = subset_masks(m, include_empty, max_size);
    let labels: Vec<String> = masks.iter().map(|&s| subset_label(s, m)).collect();
    let k = masks.len();
    let down = (0..k)
        .map(|j| BitSet::from_indices(k, (0..k).filter(|&i| masks[i] & !masks[j] == 0)))
        .collect();
    Poset::from_down_rows(labels, down)
}

const MAX_SUBSET_M: usize = 20;

fn check_m(m: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if m > MAX_SUBSET_M {
        return Err(Error::InvalidParameter(format!("m must be at most {MAX_SUBSET_M}")));
    }
    Ok(())
}

/// `P(m)`: non-empty subsets of `{1..m}` under inclusion.
pub fn poset_p(m: usize) -> Result<Poset> {
    check_m(m)?;
    Ok(subset_poset(m, false, m))
}

/// `𝒫(m)`: all subsets of `{1..m}` under inclusion, including `∅`.
pub fn poset_pow(m: usize) -> Result<Poset> {
    check_m(m)?;
    Ok(subset_poset(m, true, m))
}

/// `(P(m))_n`: non-empty subsets with at most `n` elements.
pub fn poset_p_n(m: usize, n: usize) -> Result<Poset> {
    check_m(m)?;
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(subset_poset(m, false, n))
}

/// The six-element poset G: `a` below `b` and `c`, both of those below `d`
/// and `e`, and `f` on top.
pub fn poset_g() -> Poset {
    Poset::from_covers(
        &["a", "b", "c", "d", "e", "f"],
        &[
            ("a", "b"),
            ("a", "c"),
            ("b", "d"),
            ("b", "e"),
            ("c", "d"),
            ("c", "e"),
            ("d", "f"),
            ("e", "f"),
        ],
    )
    .expect("G is a valid poset")
}

/// The two-element chain `0 < 1`.
pub fn poset_two() -> Poset {
    chain(2)
}

/// `Q(m, n) = (P(m))_n × 2 × 2`, labelled `(T,v,w)`.
pub fn poset_q(m: usize, n: usize) -> Result<Poset> {
    let base = poset_p_n(m, n)?;
    let k = base.len();
    let mut labels = Vec::with_capacity(k * 4);
    let mut coords = Vec::with_capacity(k * 4);
    for vw in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
        for t in 0..k {
            labels.push(format!("({},{},{})", base.label(t), vw.0, vw.1));
            coords.push((t, vw.0, vw.1));
        }
    }
    let total = coords.len();
    let down = (0..total)
        .map(|j| {
            let (tj, vj, wj) = coords[j];
            BitSet::from_indices(
                total,
                (0..total).filter(|&i| {
                    let (ti, vi, wi) = coords[i];
                    base.leq(ti, tj) && vi <= vj && wi <= wj
                }),
            )
        })
        .collect();
    Ok(Poset::from_down_rows(labels, down))
}

/// Chain `0 < 1 < ... < n-1`.
pub fn chain(n: usize) -> Poset {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let down = (0..n).map(|j| BitSet::from_indices(n, 0..=j)).collect();
    Poset::from_down_rows(labels, down)
}

/// Antichain with labels `p0, p1, ...`.
pub fn antichain(n: usize) -> Poset {
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let down = (0..n).map(|j| BitSet::from_indices(n, [j])).collect();
    Poset::from_down_rows(labels, down)
}

/// Two copies of `P(2)` glued under a common top: the smallest poset whose
/// maximal connected subsets are two disjoint copies.
pub fn poset_r() -> Poset {
    Poset::from_covers(
        &["1", "2", "12", "1'", "2'", "1'2'", "top"],
        &[
            ("1", "12"),
            ("2", "12"),
            ("1'", "1'2'"),
            ("2'", "1'2'"),
            ("12", "top"),
            ("1'2'", "top"),
        ],
    )
    .expect("R is a valid poset")
}
