//! Helpers shared by the property suites and the acceptance harness.
#![allow(dead_code)]

use plu::canon::is_isomorphic;
use plu::conditions::{check_star, check_star_n};
use plu::connectivity::{is_connected, is_n_connected, max_connected, max_n_connected};
use plu::duality::{dual_lattice, dual_poset, hom_from_pmorphism};
use plu::morphism::{compose, enumerate_pmorphisms_with};
use plu::product::{odot, odot_coords, odot_index};
use plu::{BitSet, Budget, PMorphism, Poset};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub const SEED: u64 = 20_240_917;

/// Random poset on `1..=max_n` elements: each pair `i < j` is related with a
/// per-poset density, then closed transitively.
pub fn random_poset(rng: &mut ChaCha8Rng, max_n: usize) -> Poset {
    let n = rng.gen_range(1..=max_n);
    let density: f64 = rng.gen_range(0.15..0.7);
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut pairs = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(density) {
                pairs.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    Poset::from_covers(&labels, &pairs).expect("index order is a linear extension")
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> BitSet {
    BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

fn mins_of(p: &Poset, y: &BitSet) -> BitSet {
    let mut m = p.empty_set();
    for v in y.iter() {
        m.union_with(p.min_below(v));
    }
    m
}

/// Connectedness read straight off the definition.
pub fn naive_connected(p: &Poset, y: &BitSet) -> bool {
    if !mins_of(p, y).is_subset(y) {
        return false;
    }
    y.iter().all(|a| {
        y.iter().all(|b| {
            let want = p.min_below(a).union(p.min_below(b));
            y.iter().any(|z| p.leq(a, z) && p.leq(b, z) && *p.min_below(z) == want)
        })
    })
}

/// n-connectedness read straight off the definition: non-empty `S` in
/// clause (ii), zigzags only for classes of size `< n` in clause (iii).
pub fn naive_n_connected(p: &Poset, y: &BitSet, n: usize) -> bool {
    let my = mins_of(p, y);
    if !my.is_subset(y) {
        return false;
    }
    let ms: Vec<usize> = my.iter().collect();
    for mask in 1u64..(1u64 << ms.len()) {
        if mask.count_ones() as usize > n {
            continue;
        }
        let s = BitSet::from_indices(p.len(), (0..ms.len()).filter(|i| mask >> i & 1 == 1).map(|i| ms[i]));
        if !y.iter().any(|z| *p.min_below(z) == s) {
            return false;
        }
    }
    for a in y.iter() {
        if p.min_below(a).len() >= n {
            continue;
        }
        // Zigzags through the class of a are paths in its comparability graph.
        let class: Vec<usize> = y.iter().filter(|&v| p.min_below(v) == p.min_below(a)).collect();
        let mut seen = vec![a];
        let mut i = 0;
        while i < seen.len() {
            let u = seen[i];
            for &v in &class {
                if !seen.contains(&v) && p.comparable(u, v) {
                    seen.push(v);
                }
            }
            i += 1;
        }
        if seen.len() != class.len() {
            return false;
        }
    }
    true
}

/// A connected (or n-connected) subset: a random subset if it qualifies,
/// otherwise a random maximal one.
pub fn sample_connected(rng: &mut ChaCha8Rng, p: &Poset, n: Option<usize>) -> BitSet {
    let y = random_subset(rng, p.len());
    let ok = match n {
        None => is_connected(p, &y),
        Some(n) => is_n_connected(p, &y, n).unwrap(),
    };
    if ok && !y.is_empty() {
        return y;
    }
    let fam = match n {
        None => max_connected(p).unwrap(),
        Some(n) => max_n_connected(p, n).unwrap(),
    };
    fam[rng.gen_range(0..fam.len())].clone()
}

/// Extension by a below-element with the same minimals preserves
/// connectedness. Returns the number of extensions checked.
pub fn ext_con(p: &Poset, y: &BitSet) -> Result<usize, String> {
    let mut checked = 0;
    for v in y.iter() {
        for x in p.down(v).iter() {
            if p.min_below(x) != p.min_below(v) {
                continue;
            }
            let mut z = y.clone();
            z.insert(x);
            checked += 1;
            if !is_connected(p, &z) || !naive_connected(p, &z) {
                return Err(format!("adding {} to {:?} under {}", p.label(x), p.labels_of(y), p.label(v)));
            }
        }
    }
    Ok(checked)
}

/// Extension by a comparable element with the same minimals preserves
/// n-connectedness.
pub fn up_set_n_con(p: &Poset, y: &BitSet, n: usize) -> Result<usize, String> {
    let mut checked = 0;
    for v in y.iter() {
        for x in 0..p.len() {
            if !p.comparable(x, v) || p.min_below(x) != p.min_below(v) {
                continue;
            }
            let mut z = y.clone();
            z.insert(x);
            checked += 1;
            if !is_n_connected(p, &z, n).unwrap() || !naive_n_connected(p, &z, n) {
                return Err(format!("adding {} to {:?} at n = {n}", p.label(x), p.labels_of(y)));
            }
        }
    }
    Ok(checked)
}

/// Images of p-morphisms out of `x` are connected (`n = None`) or
/// n-connected. Returns the number of morphisms checked.
pub fn range_con(x: &Arc<Poset>, y: &Arc<Poset>, n: Option<usize>) -> Result<usize, String> {
    let all = enumerate_pmorphisms_with(x, y, &Budget::new(1_000_000)).map_err(|e| e.to_string())?;
    for u in &all {
        let img = u.image();
        let ok = match n {
            None => is_connected(y, &img) && naive_connected(y, &img),
            Some(n) => is_n_connected(y, &img, n).unwrap() && naive_n_connected(y, &img, n),
        };
        if !ok {
            return Err(format!("image {:?} of {:?}", y.labels_of(&img), u.label_pairs()));
        }
    }
    Ok(all.len())
}

/// Minimal sets of `X ⊙ Y` and the (*)/(*_n) transfer, against the
/// coordinate formulas.
pub fn odot_laws(x: &Poset, y: &Poset, ns: &[usize]) -> Result<(), String> {
    let z = odot(x, y).map_err(|e| e.to_string())?;
    let (nx, ny) = (x.len(), y.len());
    let at = |c| odot_index(nx, ny, c);
    let lift = |c: (Option<&BitSet>, Option<&BitSet>)| {
        let mut s = z.empty_set();
        if let Some(mx) = c.0 {
            for m in mx.iter() {
                s.insert(at((Some(m), None)));
            }
        }
        if let Some(my) = c.1 {
            for m in my.iter() {
                s.insert(at((None, Some(m))));
            }
        }
        s
    };
    if *z.minimals() != lift((Some(x.minimals()), Some(y.minimals()))) {
        return Err("min(X ⊙ Y)".into());
    }
    for c in odot_coords(nx, ny) {
        let want = lift((c.0.map(|i| x.min_below(i)), c.1.map(|j| y.min_below(j))));
        if *z.min_below(at(c)) != want {
            return Err(format!("min below {}", z.label(at(c))));
        }
    }
    for &n in ns {
        if check_star_n(&z.restrict_n(n), n) != (check_star_n(x, n) && check_star_n(y, n)) {
            return Err(format!("(*_{n}) transfer"));
        }
    }
    if check_star(&z) != (check_star(x) && check_star(y)) {
        return Err("(*) transfer".into());
    }
    Ok(())
}

pub fn duality_round_trip(p: &Poset) -> Result<(), String> {
    let l = dual_lattice(p).map_err(|e| e.to_string())?;
    if !l.neg_is_pseudocomplement() || !l.is_distributive() {
        return Err(format!("D({:?}) is not a p-lattice", p.covers()));
    }
    if !is_isomorphic(&dual_poset(&l), p) {
        return Err(format!("J(D(P)) differs from P = {:?}", p.covers()));
    }
    Ok(())
}

/// Every p-morphism `x -> y` dualizes to a homomorphism. Returns the count.
pub fn homs_preserve(x: &Arc<Poset>, y: &Arc<Poset>) -> Result<usize, String> {
    let all = enumerate_pmorphisms_with(x, y, &Budget::new(1_000_000)).map_err(|e| e.to_string())?;
    for u in &all {
        let h = hom_from_pmorphism(u).map_err(|e| e.to_string())?;
        if let Some(f) = h.preservation_failure() {
            return Err(format!("{f} for {:?}", u.label_pairs()));
        }
    }
    Ok(all.len())
}

/// `h(g ∘ f) = h(f) ∘ h(g)` on all composable pairs.
pub fn contravariance(x: &Arc<Poset>, y: &Arc<Poset>, z: &Arc<Poset>) -> Result<usize, String> {
    let b = Budget::new(1_000_000);
    let fs: Vec<PMorphism> = enumerate_pmorphisms_with(x, y, &b).map_err(|e| e.to_string())?;
    let gs: Vec<PMorphism> = enumerate_pmorphisms_with(y, z, &b).map_err(|e| e.to_string())?;
    let mut n = 0;
    for f in &fs {
        let hf = hom_from_pmorphism(f).unwrap();
        for g in &gs {
            let hg = hom_from_pmorphism(g).unwrap();
            let hgf = hom_from_pmorphism(&compose(g, f).unwrap()).unwrap();
            let composed: Vec<usize> = hg.map.iter().map(|&a| hf.map[a]).collect();
            if hgf.map != composed {
                return Err(format!("{:?} after {:?}", g.label_pairs(), f.label_pairs()));
            }
            n += 1;
        }
    }
    Ok(n)
}
