//! Fixed-universe bit sets used for order rows and element sets.

use smallvec::SmallVec;
use std::fmt;

/// A set of element indices drawn from `0..universe`.
///
/// Up to 128 elements are stored inline; larger universes spill to the heap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet {
    words: SmallVec<[u64; 2]>,
}

impl BitSet {
    pub fn new(universe: usize) -> Self {
        let n = universe.div_ceil(64);
        BitSet {
            words: SmallVec::from_elem(0, n),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, it: I) -> Self {
        let mut s = Self::new(universe);
        for i in it {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        match self.words.get(i >> 6) {
            Some(w) => w >> (i & 63) & 1 == 1,
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, o: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(o.words.iter()) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, o: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(o.words.iter()) {
            *a &= *b;
        }
    }

    pub fn difference_with(&mut self, o: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(o.words.iter()) {
            *a &= !*b;
        }
    }

    pub fn union(&self, o: &BitSet) -> BitSet {
        let mut r = self.clone();
        r.union_with(o);
        r
    }

    pub fn intersection(&self, o: &BitSet) -> BitSet {
        let mut r = self.clone();
        r.intersect_with(o);
        r
    }

    pub fn difference(&self, o: &BitSet) -> BitSet {
        let mut r = self.clone();
        r.difference_with(o);
        r
    }

    pub fn is_subset(&self, o: &BitSet) -> bool {
        self.words
            .iter()
            .zip(o.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, o: &BitSet) -> bool {
        self.words.iter().zip(o.words.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut a = BitSet::new(130);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.to_vec(), vec![0, 64, 129]);
        assert_eq!(a.len(), 3);
        let b = BitSet::from_indices(130, [64, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![64]);
        assert_eq!(a.union(&b).len(), 4);
        assert!(!a.is_subset(&b));
        a.remove(0);
        a.remove(129);
        assert!(a.is_subset(&b));
        assert!(BitSet::new(0).is_empty());
        assert_eq!(BitSet::full(70).len(), 70);
    }
}
