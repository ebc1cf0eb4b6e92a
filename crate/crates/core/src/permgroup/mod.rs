//! Concrete finite permutation groups at desk scale: element closure,
//! orbits, stabilizers, normalizers, and exhaustive subgroup enumeration up
//! to conjugacy.
//!
//! Groups are stored as explicit element lists, which keeps everything
//! exact and exhaustively verifiable at the orders this crate touches.
//! Larger groups (regular realizations of the built-in amalgams) live in
//! [`cayley::CayleyGroup`], which keeps only a coset table and does its
//! arithmetic on element indices.

mod cayley;
mod subgroups;

pub use cayley::CayleyGroup;

use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image array is not a bijection")]
    NotBijective,
    #[error("degree mismatch")]
    DegreeMismatch,
    #[error("element closure exceeded cap of {0}")]
    CapExceeded(usize),
    #[error("invalid cycle notation: {0}")]
    BadCycles(String),
}

/// A permutation of `{0..degree-1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm {
    img: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm { img: (0..degree as u32).collect() }
    }

    pub fn from_images(img: Vec<u32>) -> Result<Perm, PermError> {
        let mut seen = vec![false; img.len()];
        for &v in &img {
            if v as usize >= img.len() || seen[v as usize] {
                return Err(PermError::NotBijective);
            }
            seen[v as usize] = true;
        }
        Ok(Perm { img })
    }

    /// Parses disjoint cycles over 1-based points, e.g. `(1 2)(3 4)`.
    /// The identity is written `()`.
    pub fn from_cycle_notation(degree: usize, text: &str) -> Result<Perm, PermError> {
        let mut img: Vec<u32> = (0..degree as u32).collect();
        let mut moved = vec![false; degree];
        let text = text.trim();
        let mut rest = text;
        if rest.is_empty() {
            return Err(PermError::BadCycles("empty input".into()));
        }
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| PermError::BadCycles(format!("expected `(` in `{rest}`")))?;
            if !rest[..open].trim().is_empty() {
                return Err(PermError::BadCycles(format!("unexpected `{}`", &rest[..open])));
            }
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| PermError::BadCycles("unbalanced `(`".into()))?
                + open;
            let inner = &rest[open + 1..close];
            let pts: Result<Vec<usize>, _> = inner
                .split([' ', ','])
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>())
                .collect();
            let pts = pts.map_err(|e| PermError::BadCycles(e.to_string()))?;
            for &p in &pts {
                if p == 0 || p > degree {
                    return Err(PermError::BadCycles(format!("point {p} out of range")));
                }
                if moved[p - 1] {
                    return Err(PermError::BadCycles(format!("point {p} repeated")));
                }
                moved[p - 1] = true;
            }
            for i in 0..pts.len() {
                let from = pts[i] - 1;
                let to = pts[(i + 1) % pts.len()] - 1;
                img[from] = to as u32;
            }
            rest = rest[close + 1..].trim_start();
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.img[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.img
    }

    /// `self * other` applies `self` first, then `other`, matching the
    /// left-to-right reading of words.
    pub fn mul(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { img: self.img.iter().map(|&x| other.img[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut img = vec![0u32; self.img.len()];
        for (x, &y) in self.img.iter().enumerate() {
            img[y as usize] = x as u32;
        }
        Perm { img }
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut n = 1;
        while !p.is_identity() {
            p = p.mul(self);
            n += 1;
        }
        n
    }

    /// Nontrivial cycles, each rotated to start at its smallest point,
    /// sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.img.len()];
        let mut out = Vec::new();
        for start in 0..self.img.len() as u32 {
            if seen[start as usize] || self.apply(start) == start {
                seen[start as usize] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start as usize] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x as usize] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            out.push(cyc);
        }
        out
    }

    /// Sorted multiset of nontrivial cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable();
        t
    }
}

impl fmt::Display for Perm {
    /// 1-based cycle notation; identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S>(&self, s: S) -> Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        s.serialize_str(&self.to_string())
    }
}

/// A finite permutation group held as an explicit, deterministic element
/// list (breadth-first closure order over the generators).
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Breadth-first closure of the generators. The element list is in
    /// discovery order with the identity first; exceeding `cap` elements is
    /// an error.
    pub fn closure(degree: usize, gens: &[Perm], cap: usize) -> Result<PermGroup, PermError> {
        for g in gens {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch);
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut seen: HashSet<Perm> = HashSet::from([id]);
        let mut head = 0;
        while head < elements.len() {
            let cur = elements[head].clone();
            head += 1;
            for g in gens {
                let nxt = cur.mul(g);
                if seen.insert(nxt.clone()) {
                    if elements.len() + 1 > cap {
                        return Err(PermError::CapExceeded(cap));
                    }
                    elements.push(nxt);
                }
            }
        }
        Ok(PermGroup { degree, gens: gens.to_vec(), elements })
    }

    /// Wraps an already-closed element list (checked in debug builds).
    pub fn from_elements(degree: usize, gens: Vec<Perm>, elements: Vec<Perm>) -> PermGroup {
        debug_assert!(elements.contains(&Perm::identity(degree)));
        PermGroup { degree, gens, elements }
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup { degree, gens: Vec::new(), elements: vec![Perm::identity(degree)] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.contains(p)
    }

    /// Orbit partition of the domain; cells sorted, listed by smallest
    /// member.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start as usize] = true;
            let mut head = 0;
            while head < orbit.len() {
                let x = orbit[head];
                head += 1;
                for g in &self.gens {
                    let y = g.apply(x);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        orbit.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// The faithful intransitive Klein group test on 4 points: order 4,
    /// every non-identity element an involution, orbits two pairs.
    pub fn is_intransitive_klein(&self) -> bool {
        if self.degree != 4 || self.order() != 4 {
            return false;
        }
        if !self.elements.iter().all(|e| e.is_identity() || e.order() == 2) {
            return false;
        }
        let orbits = self.orbits();
        orbits.len() == 2 && orbits.iter().all(|o| o.len() == 2)
    }

    /// `{g in G : point^g = point}` as a group (all stabilizer elements as
    /// generators).
    pub fn point_stabilizer(&self, point: u32) -> PermGroup {
        let elements: Vec<Perm> =
            self.elements.iter().filter(|e| e.apply(point) == point).cloned().collect();
        PermGroup { degree: self.degree, gens: elements.clone(), elements }
    }

    /// `N_G(H)` by element filtering. `H` must be a subgroup of `G`.
    pub fn normalizer(&self, h: &PermGroup) -> PermGroup {
        let hset: HashSet<&Perm> = h.elements.iter().collect();
        let elements: Vec<Perm> = self
            .elements
            .iter()
            .filter(|g| {
                let ginv = g.inverse();
                h.elements.iter().all(|x| hset.contains(&ginv.mul(x).mul(g)))
            })
            .cloned()
            .collect();
        PermGroup { degree: self.degree, gens: elements.clone(), elements }
    }

    /// Restriction of the group's action to an invariant point subset.
    /// Points are relabeled by their position in `points`.
    pub fn restrict_to(&self, points: &[u32]) -> PermGroup {
        let index: HashMap<u32, u32> =
            points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let map = |perm: &Perm| -> Perm {
            Perm::from_images(
                points.iter().map(|&p| *index.get(&perm.apply(p)).expect("invariant set")).collect(),
            )
            .expect("restriction of a bijection")
        };
        let gens: Vec<Perm> = self.gens.iter().map(&map).collect();
        let mut elements: Vec<Perm> = self.elements.iter().map(&map).collect();
        elements.sort_unstable();
        elements.dedup();
        PermGroup { degree: points.len(), gens, elements }
    }

    /// Sorted multiset of element orders; with the group order this is the
    /// recognition fingerprint used for the small named groups.
    pub fn element_order_multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements.iter().map(|e| e.order()).collect();
        v.sort_unstable();
        v
    }
}

pub use subgroups::{SubgroupClassOptions, SubgroupSet};
