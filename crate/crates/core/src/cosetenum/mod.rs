//! Todd–Coxeter coset enumeration and operations on complete coset tables.
//!
//! A [`CosetTable`] records the action of a finitely presented group on the
//! right cosets of a finite-index subgroup: one row per coset, one column
//! per generator and per inverse generator. Tables produced here are always
//! complete (every entry defined) and compatible (the `g` and `g^-1`
//! columns are mutually inverse permutations, every relator acts trivially,
//! and every subgroup generator fixes the base coset 0).

mod enumerate;

pub use enumerate::{EnumError, Strategy};

use crate::permgroup::Perm;
use crate::presentation::{Letter, Presentation, Word};
use serde::Serialize;
use std::sync::Arc;

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

/// The completed action of a finitely presented group on the right cosets
/// of a subgroup. Coset 0 is the subgroup itself.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pres: Arc<Presentation>,
    subgens: Vec<Word>,
    n: usize,
    tab: Vec<u32>, // n rows of `pres.width()` columns
}

impl PartialEq for CosetTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.tab == other.tab && self.pres == other.pres
    }
}
impl Eq for CosetTable {}

impl CosetTable {
    /// Runs coset enumeration (HLT strategy) over `pres` relative to the
    /// subgroup generated by `subgens`.
    ///
    /// Fails with [`EnumError::ResourceExceeded`] once more than
    /// `max_cosets` cosets have been defined; the caller can distinguish
    /// "infinite index" from "needs more memory" only by retrying with a
    /// larger bound.
    pub fn enumerate(
        pres: &Presentation,
        subgens: &[Word],
        max_cosets: usize,
    ) -> Result<CosetTable, EnumError> {
        Self::enumerate_with(pres, subgens, max_cosets, Strategy::Hlt)
    }

    pub fn enumerate_with(
        pres: &Presentation,
        subgens: &[Word],
        max_cosets: usize,
        strategy: Strategy,
    ) -> Result<CosetTable, EnumError> {
        enumerate::run(pres, subgens, max_cosets, strategy)
    }

    pub(crate) fn from_parts(
        pres: Arc<Presentation>,
        subgens: Vec<Word>,
        n: usize,
        tab: Vec<u32>,
    ) -> CosetTable {
        debug_assert_eq!(tab.len(), n * pres.width());
        CosetTable { pres, subgens, n, tab }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn presentation_arc(&self) -> Arc<Presentation> {
        Arc::clone(&self.pres)
    }

    pub fn subgroup_generators(&self) -> &[Word] {
        &self.subgens
    }

    fn width(&self) -> usize {
        self.pres.width()
    }

    #[inline]
    pub fn entry(&self, coset: u32, col: usize) -> u32 {
        self.tab[coset as usize * self.width() + col]
    }

    /// Applies one letter to a coset.
    #[inline]
    pub fn step(&self, coset: u32, l: Letter) -> u32 {
        self.entry(coset, l.col())
    }

    /// Traces a word from a coset.
    pub fn trace(&self, start: u32, w: &Word) -> u32 {
        let mut c = start;
        for &l in w.letters() {
            c = self.step(c, l);
        }
        c
    }

    /// The permutation of cosets induced by right multiplication by `w`.
    pub fn action_of(&self, w: &Word) -> Perm {
        Perm::from_images((0..self.n as u32).map(|c| self.trace(c, w)).collect())
            .expect("coset table columns are permutations")
    }

    /// Number of orbits of the subgroup generated by `gens` on the cosets.
    pub fn orbit_count(&self, gens: &[Word]) -> usize {
        self.orbits(gens).len()
    }

    /// Orbits of `<gens>` on the cosets, each sorted, listed by smallest
    /// member.
    pub fn orbits(&self, gens: &[Word]) -> Vec<Vec<u32>> {
        let perms: Vec<Perm> = gens.iter().map(|w| self.action_of(w)).collect();
        let mut uf: Vec<u32> = (0..self.n as u32).collect();
        fn find(uf: &mut [u32], x: u32) -> u32 {
            let mut r = x;
            while uf[r as usize] != r {
                r = uf[r as usize];
            }
            let mut c = x;
            while uf[c as usize] != r {
                let nxt = uf[c as usize];
                uf[c as usize] = r;
                c = nxt;
            }
            r
        }
        for p in &perms {
            for x in 0..self.n as u32 {
                let y = p.apply(x);
                let (rx, ry) = (find(&mut uf, x), find(&mut uf, y));
                if rx != ry {
                    let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
                    uf[hi as usize] = lo;
                }
            }
        }
        let mut cells: Vec<Vec<u32>> = vec![Vec::new(); self.n];
        for x in 0..self.n as u32 {
            let r = find(&mut uf, x);
            cells[r as usize].push(x);
        }
        cells.into_iter().filter(|c| !c.is_empty()).collect()
    }

    /// Cosets fixed by every word in `gens`.
    ///
    /// When `gens` generate the subgroup G the table is over, the fixed
    /// cosets biject with N_A(G)/G: the coset `Gx` is fixed by all of G
    /// exactly when `xGx^-1 <= G`, and at equal finite index that forces
    /// `xGx^-1 = G`, i.e. `x` normalizes G.
    pub fn fixed_cosets(&self, gens: &[Word]) -> Vec<u32> {
        let perms: Vec<Perm> = gens.iter().map(|w| self.action_of(w)).collect();
        (0..self.n as u32)
            .filter(|&c| perms.iter().all(|p| p.apply(c) == c))
            .collect()
    }

    /// Renumbers cosets in breadth-first discovery order from coset 0,
    /// scanning generator columns in declared order. The result is a
    /// canonical form of the pointed action: two subgroups have equal
    /// standardized tables exactly when their coset actions are isomorphic
    /// fixing the base point.
    pub fn standardize(&self) -> CosetTable {
        self.standardize_from(0)
    }

    /// Standardization after rebasing at `base`: the table of the
    /// conjugate subgroup `u^-1 G u` where `base = G u`.
    pub fn standardize_from(&self, base: u32) -> CosetTable {
        let w = self.width();
        let mut label = vec![u32::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        label[base as usize] = 0;
        order.push(base);
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for col in 0..w {
                let d = self.entry(c, col);
                if label[d as usize] == u32::MAX {
                    label[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        debug_assert_eq!(order.len(), self.n, "coset table must be transitive");
        let mut tab = vec![0u32; self.n * w];
        for (new, &old) in order.iter().enumerate() {
            for col in 0..w {
                tab[new * w + col] = label[self.entry(old, col) as usize];
            }
        }
        CosetTable { pres: Arc::clone(&self.pres), subgens: self.subgens.clone(), n: self.n, tab }
    }

    /// Breadth-first transversal words: `transversal()[c]` maps coset 0 to
    /// coset `c`.
    pub fn transversal(&self) -> Vec<Word> {
        let w = self.width();
        let mut words: Vec<Option<Word>> = vec![None; self.n];
        words[0] = Some(Word::empty());
        let mut queue = std::collections::VecDeque::from([0u32]);
        while let Some(c) = queue.pop_front() {
            for col in 0..w {
                let d = self.entry(c, col);
                if words[d as usize].is_none() {
                    let next = words[c as usize]
                        .as_ref()
                        .unwrap()
                        .concat(&Word::from_letters([Letter::from_col(col)]));
                    words[d as usize] = Some(next);
                    queue.push_back(d);
                }
            }
        }
        words.into_iter().map(|o| o.expect("transitive table")).collect()
    }

    /// Schreier generator words `u_c g (u_{c.g})^-1` over the breadth-first
    /// transversal; they generate the subgroup the table is over. Words
    /// that reduce to the identity (the tree edges) are dropped.
    pub fn schreier_generators(&self) -> Vec<Word> {
        let trans = self.transversal();
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for c in 0..self.n as u32 {
            for g in 0..self.pres.gen_count() {
                let l = Letter::new(g, false);
                let d = self.step(c, l);
                let word = trans[c as usize]
                    .concat(&Word::from_letters([l]))
                    .concat(&trans[d as usize].inverse());
                if !word.is_empty() && seen.insert(word.clone()) {
                    out.push(word);
                }
            }
        }
        if out.is_empty() {
            // index 1: the subgroup is the whole group
            out = (0..self.pres.gen_count()).map(Word::gen).collect();
        }
        out
    }

    /// Whether the subgroup of `self` is contained in the subgroup of
    /// `other`. Both tables must be over the same presentation.
    pub fn contains_in(&self, other: &CosetTable) -> bool {
        assert_eq!(self.pres, other.pres, "tables over different presentations");
        self.schreier_generators().iter().all(|w| other.trace(0, w) == 0)
    }

    /// If the subgroup of `self` is contained in a conjugate of the
    /// subgroup of `other`, returns a coset of `other` witnessing it.
    pub fn contained_in_conjugate(&self, other: &CosetTable) -> Option<u32> {
        assert_eq!(self.pres, other.pres, "tables over different presentations");
        let gens = self.schreier_generators();
        (0..other.n as u32).find(|&c| gens.iter().all(|w| other.trace(c, w) == c))
    }

    /// Conjugacy test: returns a coset `w` of `self` such that rebasing at
    /// `w` gives `other`'s standardized table, if and only if the two
    /// subgroups are conjugate in the presented group.
    pub fn conjugate_test(&self, other: &CosetTable) -> Option<u32> {
        assert_eq!(self.pres, other.pres, "tables over different presentations");
        if self.n != other.n {
            return None;
        }
        let target = other.standardize();
        (0..self.n as u32).find(|&c| self.standardize_from(c).tab == target.tab)
    }

    /// Checks the completeness/compatibility invariants and that every
    /// relator acts trivially and every subgroup generator fixes coset 0.
    pub fn validate(&self) -> Result<(), String> {
        let w = self.width();
        for c in 0..self.n as u32 {
            for col in 0..w {
                let d = self.entry(c, col);
                if d as usize >= self.n {
                    return Err(format!("entry ({c},{col}) out of range"));
                }
                let back = col ^ 1;
                if self.entry(d, back) != c {
                    return Err(format!("columns {col}/{back} not mutually inverse at {c}"));
                }
            }
        }
        for r in self.pres.relators() {
            for c in 0..self.n as u32 {
                if self.trace(c, r) != c {
                    return Err(format!("relator {} moves coset {c}", self.pres.word_string(r)));
                }
            }
        }
        for s in &self.subgens {
            if self.trace(0, s) != 0 {
                return Err(format!(
                    "subgroup generator {} moves coset 0",
                    self.pres.word_string(s)
                ));
            }
        }
        Ok(())
    }

    /// Raw row-major table entries; used for canonical comparisons.
    pub fn raw(&self) -> &[u32] {
        &self.tab
    }

    pub fn to_json(&self) -> CosetTableJson {
        CosetTableJson {
            schema: 1,
            n: self.n,
            gens: self.pres.generators().to_vec(),
            subgroup: self.subgens.iter().map(|w| self.pres.word_string(w)).collect(),
            action: (0..self.pres.gen_count())
                .map(|g| (0..self.n as u32).map(|c| self.step(c, Letter::new(g, false))).collect())
                .collect(),
        }
    }
}

/// Serialized form of a coset table: the action array of each generator on
/// the cosets (inverse actions are implied).
#[derive(Serialize, Debug)]
pub struct CosetTableJson {
    pub schema: u32,
    pub n: usize,
    pub gens: Vec<String>,
    pub subgroup: Vec<String>,
    pub action: Vec<Vec<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::get_amalgam;
    use proptest::prelude::*;

    fn s4() -> &'static crate::presentation::AmalgamSpec {
        get_amalgam("S4").unwrap()
    }

    fn words(p: &Presentation, ss: &[&str]) -> Vec<Word> {
        ss.iter().map(|s| p.parse_word(s).unwrap()).collect()
    }

    #[test]
    fn l_over_b_has_index_four() {
        let spec = s4();
        let lp = &spec.l_pres.pres;
        let t = CosetTable::enumerate(lp, &words(lp, &["s", "t"]), 10_000).unwrap();
        assert_eq!(t.n(), 4);
        t.validate().unwrap();
        // t lies in the subgroup, so it fixes the base coset
        let perm = t.action_of(&lp.parse_word("t").unwrap());
        assert_eq!(perm.apply(0), 0);
    }

    #[test]
    fn full_generator_subgroup_gives_one_coset() {
        let spec = s4();
        let p = &spec.presentation;
        let all: Vec<Word> = (0..p.gen_count()).map(Word::gen).collect();
        let t = CosetTable::enumerate(p, &all, 10_000).unwrap();
        assert_eq!(t.n(), 1);
    }

    #[test]
    fn s4_maximal_lr_subgroup_has_index_six() {
        let spec = s4();
        let p = &spec.presentation;
        let t = CosetTable::enumerate(p, spec.max_lr_words.as_ref().unwrap(), 100_000).unwrap();
        assert_eq!(t.n(), 6);
        t.validate().unwrap();
        // exactly two fixed cosets: the normalizer contains the subgroup
        // with index 2
        let fixed = t.fixed_cosets(&t.schreier_generators());
        assert_eq!(fixed.len(), 2);
        assert!(fixed.contains(&0));
    }

    #[test]
    fn s4_lr_subgroup_orbit_counts() {
        let spec = s4();
        let p = &spec.presentation;
        let t = CosetTable::enumerate(p, spec.max_lr_words.as_ref().unwrap(), 100_000).unwrap();
        assert_eq!(t.orbit_count(&spec.l_words()), 1);
        assert_eq!(t.orbit_count(&spec.b_words()), 2);
        assert_eq!(t.orbit_count(&spec.r_words()), 2);
        assert_eq!(t.orbit_count(&[]), 6);
        let all: Vec<Word> = (0..p.gen_count()).map(Word::gen).collect();
        assert_eq!(t.orbit_count(&all), 1);
    }

    #[test]
    fn action_of_relator_is_identity() {
        let spec = s4();
        let p = &spec.presentation;
        let t = CosetTable::enumerate(p, spec.max_lr_words.as_ref().unwrap(), 100_000).unwrap();
        assert!(t.action_of(&Word::empty()).is_identity());
        for r in p.relators() {
            assert!(t.action_of(r).is_identity());
        }
    }

    #[test]
    fn resource_bound_reported_for_infinite_index() {
        // the whole group A is infinite, so enumerating over the trivial
        // subgroup must exceed any cap
        let spec = s4();
        let err = CosetTable::enumerate(&spec.presentation, &[], 2_000).unwrap_err();
        match err {
            EnumError::ResourceExceeded { max_cosets } => assert_eq!(max_cosets, 2_000),
        }
    }

    #[test]
    fn standardize_is_idempotent_and_relabel_invariant() {
        let spec = s4();
        let p = &spec.presentation;
        let t = CosetTable::enumerate(p, spec.max_lr_words.as_ref().unwrap(), 100_000).unwrap();
        let s = t.standardize();
        assert_eq!(s.standardize(), s);
        // manual relabeling: swap two cosets and check standardization agrees
        let w = p.width();
        let n = t.n();
        let map = |c: u32| -> u32 {
            match c {
                2 => 3,
                3 => 2,
                c => c,
            }
        };
        let mut tab = vec![0u32; n * w];
        for c in 0..n as u32 {
            for col in 0..w {
                tab[map(c) as usize * w + col] = map(t.entry(c, col));
            }
        }
        let relabeled = CosetTable::from_parts(t.presentation_arc(), t.subgens.clone(), n, tab);
        assert_eq!(relabeled.standardize(), s);
    }

    #[test]
    fn schreier_generators_fix_base_and_generate() {
        let spec = s4();
        let p = &spec.presentation;
        let t = CosetTable::enumerate(p, spec.max_lr_words.as_ref().unwrap(), 100_000).unwrap();
        let gens = t.schreier_generators();
        for g in &gens {
            assert_eq!(t.trace(0, g), 0);
        }
        // re-enumerating over the Schreier generators gives the same index
        let t2 = CosetTable::enumerate(p, &gens, 100_000).unwrap();
        assert_eq!(t2.n(), t.n());
        assert!(t.conjugate_test(&t2).is_some());

        // index 1 gives back the group's generators
        let all: Vec<Word> = (0..p.gen_count()).map(Word::gen).collect();
        let t1 = CosetTable::enumerate(p, &all, 10_000).unwrap();
        assert_eq!(t1.schreier_generators().len(), p.gen_count());
    }

    #[test]
    fn contains_reflexive_and_proper() {
        let spec = s4();
        let p = &spec.presentation;
        let g = CosetTable::enumerate(p, spec.max_lr_words.as_ref().unwrap(), 100_000).unwrap();
        let n =
            CosetTable::enumerate(p, spec.normalizer_words.as_ref().unwrap(), 100_000).unwrap();
        assert!(g.contains_in(&g));
        assert!(g.contains_in(&n), "maximal LR subgroup lies in its normalizer");
        assert!(!n.contains_in(&g));
    }

    #[test]
    fn conjugate_test_finds_conjugates() {
        let spec = s4();
        let p = &spec.presentation;
        let gens = spec.max_lr_words.as_ref().unwrap();
        let t = CosetTable::enumerate(p, gens, 100_000).unwrap();
        assert_eq!(t.conjugate_test(&t), Some(0));
        let by = p.parse_word("xs").unwrap();
        let conj: Vec<Word> = gens.iter().map(|g| g.conjugated_by(&by)).collect();
        let t2 = CosetTable::enumerate(p, &conj, 100_000).unwrap();
        t.conjugate_test(&t2).expect("conjugate subgroups detected");
    }

    #[test]
    fn index_two_subgroup_of_s4_row_is_normal() {
        // <x,y,s,a> has index 2 (t survives in the C2 x C2 abelianization),
        // and index-2 subgroups are normal: every Schreier generator must
        // act trivially on both cosets.
        let spec = s4();
        let p = &spec.presentation;
        let t = CosetTable::enumerate(p, &words(p, &["x", "y", "s", "a"]), 10_000).unwrap();
        assert_eq!(t.n(), 2);
        for g in t.schreier_generators() {
            assert!(t.action_of(&g).is_identity());
        }
    }

    #[test]
    fn json_shape() {
        let spec = s4();
        let lp = &spec.l_pres.pres;
        let t = CosetTable::enumerate(lp, &words(lp, &["s", "t"]), 10_000).unwrap();
        let j = serde_json::to_value(t.to_json()).unwrap();
        assert_eq!(j["n"], 4);
        assert_eq!(j["action"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn determinism_bit_identical() {
        let spec = s4();
        let p = &spec.presentation;
        let gens = spec.max_lr_words.as_ref().unwrap();
        let a = CosetTable::enumerate(p, gens, 100_000).unwrap();
        let b = CosetTable::enumerate(p, gens, 100_000).unwrap();
        assert_eq!(a.raw(), b.raw());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_conjugates_are_detected(seed in proptest::collection::vec((0usize..5, any::<bool>()), 1..6)) {
            let spec = s4();
            let p = &spec.presentation;
            let by = Word::from_letters(seed.into_iter().map(|(g, i)| Letter::new(g, i)));
            let gens = spec.max_lr_words.as_ref().unwrap();
            let base = CosetTable::enumerate(p, gens, 100_000).unwrap();
            let conj: Vec<Word> = gens.iter().map(|g| g.conjugated_by(&by)).collect();
            let other = CosetTable::enumerate(p, &conj, 100_000).unwrap();
            prop_assert!(base.conjugate_test(&other).is_some());
        }
    }
}
