//! Finite group arithmetic backed by a coset table over the trivial
//! subgroup (the regular representation).
//!
//! Elements are coset indices `0..n` with 0 the identity; the element with
//! index `i` is the breadth-first transversal word `u_i`. Right
//! multiplication by a generator is a table column, multiplication by an
//! arbitrary element traces its transversal word, and conjugation by a
//! generator uses precomputed left-multiplication tables. This keeps groups
//! of order ~10^4 workable without storing any full permutation images.

use crate::cosetenum::{CosetTable, EnumError};
use crate::permgroup::{Perm, PermGroup};
use crate::presentation::{Presentation, Word};
use once_cell::sync::OnceCell;
use std::collections::{HashMap, HashSet};

/// The regular representation of a finite presented group.
#[derive(Debug)]
pub struct CayleyGroup {
    table: CosetTable,
    words: Vec<Word>,
    inv: Vec<u32>,
    /// `left[col][x] = g_col * x`, built on first use.
    left: OnceCell<Vec<Vec<u32>>>,
}

impl CayleyGroup {
    /// Enumerates the regular representation of `pres`; fails if the group
    /// is infinite or larger than `max_cosets` allows.
    pub fn from_presentation(pres: &Presentation, max_cosets: usize) -> Result<Self, EnumError> {
        let table = CosetTable::enumerate(pres, &[], max_cosets)?.standardize();
        Ok(Self::from_regular_table(table))
    }

    /// Wraps a complete coset table over the trivial subgroup.
    pub fn from_regular_table(table: CosetTable) -> Self {
        let words = table.transversal();
        let mut inv = vec![0u32; table.n()];
        for (i, w) in words.iter().enumerate() {
            inv[i] = table.trace(0, &w.inverse());
        }
        CayleyGroup { table, words, inv, left: OnceCell::new() }
    }

    pub fn order(&self) -> usize {
        self.table.n()
    }

    pub fn presentation(&self) -> &Presentation {
        self.table.presentation()
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    /// Transversal word of an element (over the presentation's generators).
    pub fn word_of(&self, x: u32) -> &Word {
        &self.words[x as usize]
    }

    /// The element an arbitrary word evaluates to.
    pub fn eval(&self, w: &Word) -> u32 {
        self.table.trace(0, w)
    }

    #[inline]
    pub fn mult(&self, a: u32, b: u32) -> u32 {
        self.table.trace(a, &self.words[b as usize])
    }

    #[inline]
    pub fn inverse(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn conjugate(&self, x: u32, g: u32) -> u32 {
        self.mult(self.mult(self.inverse(g), x), g)
    }

    fn left_tables(&self) -> &Vec<Vec<u32>> {
        self.left.get_or_init(|| {
            let w = self.presentation().width();
            let n = self.order() as u32;
            (0..w)
                .map(|col| {
                    let g = self.table.entry(0, col);
                    (0..n).map(|x| self.mult(g, x)).collect()
                })
                .collect()
        })
    }

    /// `x` conjugated by the generator living in table column `col`.
    #[inline]
    pub fn conjugate_by_col(&self, x: u32, col: usize) -> u32 {
        // g^-1 * x * g: left-multiply by the inverse column, then one step
        let left = self.left_tables();
        let y = left[col ^ 1][x as usize];
        self.table.entry(y, col)
    }

    pub fn element_order(&self, x: u32) -> usize {
        let mut y = x;
        let mut n = 1;
        while y != 0 {
            y = self.mult(y, x);
            n += 1;
        }
        n
    }

    /// Closure of a set of elements, as a sorted element list.
    pub fn closure_of(&self, seed: &[u32], cap: usize) -> Option<Vec<u32>> {
        let mut set: HashSet<u32> = HashSet::from([0]);
        let mut stack: Vec<u32> = vec![0];
        let mut gens: Vec<u32> = seed.to_vec();
        gens.extend(seed.iter().map(|&g| self.inverse(g)));
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = self.mult(x, g);
                if set.insert(y) {
                    if set.len() > cap {
                        return None;
                    }
                    stack.push(y);
                }
            }
        }
        let mut out: Vec<u32> = set.into_iter().collect();
        out.sort_unstable();
        Some(out)
    }

    /// All elements of `p`-power order (including the identity).
    pub fn p_elements(&self, p: usize) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&x| {
                let mut o = self.element_order(x);
                while o.is_multiple_of(p) {
                    o /= p;
                }
                o == 1
            })
            .collect()
    }

    /// A Sylow `p`-subgroup, grown by repeated normalizing extensions.
    pub fn sylow_subgroup(&self, p: usize) -> Vec<u32> {
        let mut target = 1usize;
        let mut n = self.order();
        while n.is_multiple_of(p) {
            n /= p;
            target *= p;
        }
        let pels = self.p_elements(p);
        let mut h: Vec<u32> = vec![0];
        while h.len() < target {
            let mut extended = false;
            for &g in &pels {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                // inside a p-group the normalizer grows, so some outside
                // p-element normalizes h; extension by it stays a p-group
                if !self.normalizes(g, &h) {
                    continue;
                }
                if let Some(k) = self.closure_of(&[&h[..], &[g][..]].concat(), target) {
                    if k.len() > h.len() && is_p_power(k.len(), p) {
                        h = k;
                        extended = true;
                        break;
                    }
                }
            }
            assert!(extended, "Sylow construction stalled");
        }
        h
    }

    fn normalizes(&self, g: u32, set: &[u32]) -> bool {
        set.iter().all(|&x| set.binary_search(&self.conjugate(x, g)).is_ok())
    }

    /// All subgroups of a small subgroup (given by its sorted element set).
    pub fn subgroups_within(&self, set: &[u32]) -> Vec<Vec<u32>> {
        let mut known: HashSet<Vec<u32>> = HashSet::new();
        known.insert(vec![0]);
        let mut frontier = vec![vec![0u32]];
        while let Some(h) = frontier.pop() {
            for &g in set {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let k = self
                    .closure_of(&[&h[..], &[g][..]].concat(), set.len())
                    .expect("closure inside a finite subgroup");
                if k.iter().all(|x| set.binary_search(x).is_ok()) && known.insert(k.clone()) {
                    frontier.push(k);
                }
            }
        }
        let mut out: Vec<Vec<u32>> = known.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Canonical fingerprint of a subgroup's conjugacy class: the smallest
    /// sorted element set in the orbit under conjugation.
    pub fn class_fingerprint(&self, set: &[u32]) -> Vec<u32> {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let start: Vec<u32> = set.to_vec();
        let mut queue = std::collections::VecDeque::from([start.clone()]);
        seen.insert(start);
        let width = self.presentation().width();
        let mut best: Option<Vec<u32>> = None;
        while let Some(cur) = queue.pop_front() {
            if best.as_ref().is_none_or(|b| cur < *b) {
                best = Some(cur.clone());
            }
            for col in 0..width {
                let mut img: Vec<u32> =
                    cur.iter().map(|&x| self.conjugate_by_col(x, col)).collect();
                img.sort_unstable();
                if seen.insert(img.clone()) {
                    queue.push_back(img);
                }
            }
        }
        best.unwrap()
    }

    /// Whether two subgroups are conjugate in this group.
    pub fn subgroups_conjugate(&self, a: &[u32], b: &[u32]) -> bool {
        a.len() == b.len() && self.class_fingerprint(a) == self.class_fingerprint(b)
    }

    /// One representative per conjugacy class of `p`-subgroups satisfying
    /// `keep` (applied to the sorted element set). Exhaustive: every
    /// p-subgroup is conjugate into the Sylow subgroup.
    pub fn p_subgroup_classes(
        &self,
        p: usize,
        mut keep: impl FnMut(&[u32]) -> bool,
    ) -> Vec<Vec<u32>> {
        let sylow = self.sylow_subgroup(p);
        let mut reps: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for sub in self.subgroups_within(&sylow) {
            if !keep(&sub) {
                continue;
            }
            let fp = self.class_fingerprint(&sub);
            if seen.insert(fp.clone()) {
                reps.push(fp);
            }
        }
        reps.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        reps
    }

    /// `N_G(H)` for a subgroup given by its sorted element set, by scanning
    /// all group elements.
    pub fn normalizer_of(&self, set: &[u32]) -> Vec<u32> {
        (0..self.order() as u32).filter(|&g| self.normalizes(g, set)).collect()
    }

    /// The permutation an element induces on another coset table over the
    /// same presentation (e.g. a small coset action of this group).
    pub fn perm_on(&self, other: &CosetTable, x: u32) -> Perm {
        let w = &self.words[x as usize];
        Perm::from_images((0..other.n() as u32).map(|c| other.trace(c, w)).collect())
            .expect("coset action is a permutation")
    }

    /// Explicit permutation group of a subgroup's right-regular action,
    /// restricted to small subgroups.
    pub fn subgroup_perm_group(&self, set: &[u32]) -> PermGroup {
        // right-regular action of the subgroup on itself
        let index: HashMap<u32, u32> =
            set.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let elements: Vec<Perm> = set
            .iter()
            .map(|&g| {
                Perm::from_images(set.iter().map(|&x| index[&self.mult(x, g)]).collect())
                    .expect("regular action")
            })
            .collect();
        PermGroup::from_elements(set.len(), elements.clone(), elements)
    }

    /// Sorted multiset of element orders of a subgroup set.
    pub fn order_multiset(&self, set: &[u32]) -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&x| self.element_order(x)).collect();
        v.sort_unstable();
        v
    }

    /// Greedy small generating set for a subgroup element set.
    pub fn generating_subset(&self, set: &[u32]) -> Vec<u32> {
        let mut gens: Vec<u32> = Vec::new();
        let mut have: Vec<u32> = vec![0];
        for &x in set {
            if have.binary_search(&x).is_err() {
                gens.push(x);
                have = self
                    .closure_of(&gens, set.len())
                    .expect("closure inside subgroup");
                if have.len() == set.len() {
                    break;
                }
            }
        }
        gens
    }
}

fn is_p_power(mut n: usize, p: usize) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn s4_cayley() -> CayleyGroup {
        let p = parse_presentation("gens: a b c\nrels: a^2, b^2, c^2, (ab)^3, (bc)^3, (ac)^2")
            .unwrap();
        CayleyGroup::from_presentation(&p, 10_000).unwrap()
    }

    #[test]
    fn arithmetic_consistency() {
        let g = s4_cayley();
        assert_eq!(g.order(), 24);
        for x in 0..g.order() as u32 {
            assert_eq!(g.mult(x, g.inverse(x)), 0);
            assert_eq!(g.mult(0, x), x);
            assert_eq!(g.mult(x, 0), x);
        }
        // associativity spot check
        for &(a, b, c) in &[(1u32, 5u32, 9u32), (3, 3, 7), (20, 11, 2)] {
            assert_eq!(g.mult(g.mult(a, b), c), g.mult(a, g.mult(b, c)));
        }
    }

    #[test]
    fn conjugation_by_column_matches_general() {
        let g = s4_cayley();
        let width = g.presentation().width();
        for x in 0..g.order() as u32 {
            for col in 0..width {
                let gen = g.table().entry(0, col);
                assert_eq!(g.conjugate_by_col(x, col), g.conjugate(x, gen));
            }
        }
    }

    #[test]
    fn sylow_and_p_subgroups_of_s4() {
        let g = s4_cayley();
        let syl2 = g.sylow_subgroup(2);
        assert_eq!(syl2.len(), 8);
        let syl3 = g.sylow_subgroup(3);
        assert_eq!(syl3.len(), 3);
        // 2-subgroup classes of S4: 1, two C2 classes, C4, two V4 classes, D4
        let classes = g.p_subgroup_classes(2, |_| true);
        assert_eq!(classes.len(), 7);
        let sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 2, 2, 4, 4, 4, 8]);
    }

    #[test]
    fn element_orders() {
        let g = s4_cayley();
        let mut orders: Vec<usize> = (0..24).map(|x| g.element_order(x)).collect();
        orders.sort_unstable();
        let mut expect = vec![1];
        expect.extend(std::iter::repeat_n(2, 9));
        expect.extend(std::iter::repeat_n(3, 8));
        expect.extend(std::iter::repeat_n(4, 6));
        assert_eq!(orders, expect);
    }

    #[test]
    fn normalizer_of_sylow_is_self() {
        let g = s4_cayley();
        let syl2 = g.sylow_subgroup(2);
        let n = g.normalizer_of(&syl2);
        assert_eq!(n.len(), 8, "D4 is self-normalizing in S4");
        let syl3 = g.sylow_subgroup(3);
        assert_eq!(g.normalizer_of(&syl3).len(), 6);
    }

    #[test]
    fn subgroup_perm_group_round_trip() {
        let g = s4_cayley();
        let syl3 = g.sylow_subgroup(3);
        let pg = g.subgroup_perm_group(&syl3);
        assert_eq!(pg.order(), 3);
        assert_eq!(pg.element_order_multiset(), vec![1, 3, 3]);
    }

    #[test]
    fn generating_subset_generates() {
        let g = s4_cayley();
        let syl2 = g.sylow_subgroup(2);
        let gens = g.generating_subset(&syl2);
        assert!(gens.len() <= 3);
        assert_eq!(g.closure_of(&gens, 100).unwrap(), syl2);
    }
}
