//! The special product `X ⊙ Y`, its injections, the `η` isomorphisms and the
//! product of morphisms.

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::morphism::PMorphism;
use crate::poset::{poset_p, Poset};
use std::collections::HashSet;
use std::sync::Arc;

/// Reserved label for the fresh bottom.
pub const BOTTOM: &str = "\u{22A5}";

/// Coordinates of an element of `X ⊙ Y`; `None` stands for `⊥`.
pub type Coord = (Option<usize>, Option<usize>);

/// Element coordinates in product order: `X×{⊥}`, then `{⊥}×Y`, then `X×Y`
/// with the `X` coordinate varying slowest.
pub fn odot_coords(nx: usize, ny: usize) -> Vec<Coord> {
    let mut v = Vec::with_capacity(nx + ny + nx * ny);
    v.extend((0..nx).map(|x| (Some(x), None)));
    v.extend((0..ny).map(|y| (None, Some(y))));
    for x in 0..nx {
        v.extend((0..ny).map(|y| (Some(x), Some(y))));
    }
    v
}

/// Index of a coordinate pair within `odot(X, Y)`.
pub fn odot_index(nx: usize, ny: usize, c: Coord) -> usize {
    match c {
        (Some(x), None) => x,
        (None, Some(y)) => nx + y,
        (Some(x), Some(y)) => nx + ny + x * ny + y,
        (None, None) => panic!("(⊥,⊥) is not an element of the product"),
    }
}

fn check_reserved(p: &Poset) -> Result<()> {
    match p.labels().iter().find(|l| l.as_str() == BOTTOM) {
        Some(l) => Err(Error::ReservedLabel(l.clone())),
        None => Ok(()),
    }
}

fn coord_leq(x: &Poset, y: &Poset, a: Coord, b: Coord) -> bool {
    let left = match (a.0, b.0) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(p), Some(q)) => x.leq(p, q),
    };
    let right = match (a.1, b.1) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(p), Some(q)) => y.leq(p, q),
    };
    left && right
}

/// `X ⊙ Y`: `(⊥⊕X) × (⊥⊕Y)` with `(⊥,⊥)` removed.
pub fn odot(x: &Poset, y: &Poset) -> Result<Poset> {
    check_reserved(x)?;
    check_reserved(y)?;
    let coords = odot_coords(x.len(), y.len());
    let labels: Vec<String> = coords
        .iter()
        .map(|&(a, b)| {
            format!(
                "({},{})",
                a.map_or(BOTTOM, |i| x.label(i)),
                b.map_or(BOTTOM, |i| y.label(i))
            )
        })
        .collect();
    let mut seen = HashSet::new();
    for l in &labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    let n = coords.len();
    let down = (0..n)
        .map(|j| BitSet::from_indices(n, (0..n).filter(|&i| coord_leq(x, y, coords[i], coords[j]))))
        .collect();
    Ok(Poset::from_down_rows(labels, down))
}

/// `ι_X(x) = (x, ⊥)`.
pub fn inject_left(x: &Arc<Poset>, y: &Arc<Poset>) -> Result<PMorphism> {
    let z = Arc::new(odot(x, y)?);
    let map = (0..x.len()).map(|i| odot_index(x.len(), y.len(), (Some(i), None))).collect();
    Ok(PMorphism::new_unchecked(x.clone(), z, map))
}

/// `ι_Y(y) = (⊥, y)`.
pub fn inject_right(x: &Arc<Poset>, y: &Arc<Poset>) -> Result<PMorphism> {
    let z = Arc::new(odot(x, y)?);
    let map = (0..y.len()).map(|j| odot_index(x.len(), y.len(), (None, Some(j)))).collect();
    Ok(PMorphism::new_unchecked(y.clone(), z, map))
}

fn subset_mask(p: &Poset, i: usize) -> u64 {
    // Elements of P(m) are built so that the minimals {1},...,{m} are the
    // first m indices, in order.
    p.min_below(i).iter().fold(0u64, |acc, j| acc | 1 << j)
}

fn subset_index(p: &Poset, mask: u64) -> usize {
    let s = BitSet::from_indices(p.len(), (0..64).filter(|b| mask >> b & 1 == 1));
    p.join_set(&s).expect("P(m) has all non-empty joins")
}

/// `η_{m,k}: P(m+k) -> P(m) ⊙ P(k)`.
pub fn eta(m: usize, k: usize) -> Result<PMorphism> {
    if m < 1 || k < 1 {
        return Err(Error::InvalidParameter("eta needs m, k >= 1".into()));
    }
    let dom = Arc::new(poset_p(m + k)?);
    let pm = poset_p(m)?;
    let pk = poset_p(k)?;
    let cod = Arc::new(odot(&pm, &pk)?);
    let low = (1u64 << m) - 1;
    let map = (0..dom.len())
        .map(|t| {
            let mask = subset_mask(&dom, t);
            let left = mask & low;
            let right = mask >> m;
            let c = match (left, right) {
                (0, r) => (None, Some(subset_index(&pk, r))),
                (l, 0) => (Some(subset_index(&pm, l)), None),
                (l, r) => (Some(subset_index(&pm, l)), Some(subset_index(&pk, r))),
            };
            odot_index(pm.len(), pk.len(), c)
        })
        .collect();
    PMorphism::new(dom, cod, map)
}

/// Inverse of a bijective p-morphism, validated as a p-morphism.
pub fn inverse(u: &PMorphism) -> Result<PMorphism> {
    let n = u.cod().len();
    if u.dom().len() != n {
        return Err(Error::InvalidParameter("map is not a bijection".into()));
    }
    let mut inv = vec![usize::MAX; n];
    for (x, &y) in u.map().iter().enumerate() {
        if inv[y] != usize::MAX {
            return Err(Error::InvalidParameter("map is not injective".into()));
        }
        inv[y] = x;
    }
    PMorphism::new(u.cod().clone(), u.dom().clone(), inv)
}

/// `u1 ⊙ u2: X1 ⊙ X2 -> Y1 ⊙ Y2`, acting componentwise and fixing `⊥`.
pub fn odot_map(u1: &PMorphism, u2: &PMorphism) -> Result<PMorphism> {
    let (x1, x2) = (u1.dom(), u2.dom());
    let (y1, y2) = (u1.cod(), u2.cod());
    let dom = Arc::new(odot(x1, x2)?);
    let cod = Arc::new(odot(y1, y2)?);
    let map = odot_coords(x1.len(), x2.len())
        .into_iter()
        .map(|(a, b)| odot_index(y1.len(), y2.len(), (a.map(|i| u1.apply(i)), b.map(|j| u2.apply(j)))))
        .collect();
    PMorphism::new(dom, cod, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::morphism::{check_map, compose};

    #[test]
    fn carrier_and_minimals() {
        let p1 = poset_p(1).unwrap();
        let z = odot(&p1, &p1).unwrap();
        assert_eq!(z.len(), 3);
        assert!(is_isomorphic(&z, &poset_p(2).unwrap()));
        assert_eq!(z.labels_of(z.minimals()), vec!["(1,\u{22A5})", "(\u{22A5},1)"]);
    }

    #[test]
    fn reserved_label_rejected() {
        let bad = Poset::from_covers(&[BOTTOM], &[] as &[(&str, &str)]).unwrap();
        assert!(matches!(odot(&bad, &poset_p(1).unwrap()), Err(Error::ReservedLabel(_))));
    }

    #[test]
    fn empty_factor_is_copy() {
        let g = crate::poset::poset_g();
        let z = odot(&Poset::empty(), &g).unwrap();
        assert!(is_isomorphic(&z, &g));
    }

    #[test]
    fn eta_examples() {
        let e = eta(1, 1).unwrap();
        assert_eq!(e.apply_label("1").unwrap(), "(1,\u{22A5})");
        assert_eq!(e.apply_label("2").unwrap(), "(\u{22A5},1)");
        assert_eq!(e.apply_label("12").unwrap(), "(1,1)");
        let e = eta(2, 1).unwrap();
        assert_eq!(e.apply_label("13").unwrap(), "(1,1)");
        assert_eq!(e.apply_label("123").unwrap(), "(12,1)");
        assert!(eta(0, 1).is_err());
    }

    #[test]
    fn eta_inverse_is_pmorphism() {
        for m in 1..5 {
            for k in 1..=(5 - m) {
                let e = eta(m, k).unwrap();
                let inv = inverse(&e).unwrap();
                assert!(check_map(inv.dom(), inv.cod(), inv.map()).is_ok());
            }
        }
    }

    #[test]
    fn odot_map_identity_and_injections() {
        let x = Arc::new(poset_p(2).unwrap());
        let y = Arc::new(crate::poset::chain(2));
        let id = odot_map(&PMorphism::identity(x.clone()), &PMorphism::identity(y.clone())).unwrap();
        assert_eq!(id, PMorphism::identity(id.dom().clone()));
        let l = inject_left(&x, &y).unwrap();
        let r = inject_right(&x, &y).unwrap();
        assert_eq!(compose(&id, &l).unwrap(), l);
        assert_eq!(compose(&id, &r).unwrap(), r);
    }
}
