//! Finite realizations of (L, B, R) amalgams, the local action map, and
//! validation of the amalgam conditions.
//!
//! An amalgam of index (d, 2) is a triple of finite groups with
//! `B = L ∩ R`, `|L:B| = d`, `|R:B| = 2`, and no nontrivial subgroup of `B`
//! normal in both `L` and `R`. Elements of `B` are identified between `L`
//! and `R` as words in the shared generators; no abstract isomorphism is
//! ever constructed.

use crate::cosetenum::{CosetTable, EnumError};
use crate::permgroup::{CayleyGroup, Perm, PermGroup};
use crate::presentation::{
    AmalgamSpec, Presentation, RestrictedPresentation, UnknownAmalgam, Word,
};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmalgamError {
    #[error("realization of {part} failed: {source}")]
    Realization {
        part: &'static str,
        #[source]
        source: EnumError,
    },
    #[error(transparent)]
    Unknown(#[from] UnknownAmalgam),
    #[error("word uses a generator outside {part}")]
    OutsidePart { part: &'static str },
}

/// Construction input: a presentation of some completion together with the
/// generator subsets of the three stabilizers.
#[derive(Clone, Debug)]
pub struct AmalgamInput {
    pub pres: Presentation,
    pub l_gens: Vec<usize>,
    pub b_gens: Vec<usize>,
    pub r_gens: Vec<usize>,
    pub valency: usize,
}

impl AmalgamInput {
    pub fn from_spec(spec: &AmalgamSpec) -> AmalgamInput {
        AmalgamInput {
            pres: spec.presentation.clone(),
            l_gens: spec.l_gens.clone(),
            b_gens: spec.b_gens.clone(),
            r_gens: spec.r_gens.clone(),
            valency: spec.valency(),
        }
    }
}

/// A realized amalgam: the three stabilizers as finite groups in their
/// regular representations, plus the coset action of `L` on `(L:B)` that
/// defines the local action map.
pub struct Amalgam {
    input: AmalgamInput,
    spec: Option<&'static AmalgamSpec>,
    l_pres: RestrictedPresentation,
    b_pres: RestrictedPresentation,
    r_pres: RestrictedPresentation,
    l: CayleyGroup,
    b: CayleyGroup,
    r: CayleyGroup,
    /// Action of `L` on the cosets of `B`, standardized; its points are the
    /// local domain, ordered by breadth-first discovery.
    rho_table: CosetTable,
}

pub const DEFAULT_REALIZE_CAP: usize = 2_000_000;

impl Amalgam {
    pub fn realize(input: AmalgamInput, cap: usize) -> Result<Amalgam, AmalgamError> {
        let l_pres = input.pres.restrict(&input.l_gens);
        let b_pres = input.pres.restrict(&input.b_gens);
        let r_pres = input.pres.restrict(&input.r_gens);
        let l = CayleyGroup::from_presentation(&l_pres.pres, cap)
            .map_err(|source| AmalgamError::Realization { part: "L", source })?;
        let b = CayleyGroup::from_presentation(&b_pres.pres, cap)
            .map_err(|source| AmalgamError::Realization { part: "B", source })?;
        let r = CayleyGroup::from_presentation(&r_pres.pres, cap)
            .map_err(|source| AmalgamError::Realization { part: "R", source })?;
        let b_words_in_l: Vec<Word> = input
            .b_gens
            .iter()
            .map(|&g| l_pres.to_sub(&Word::gen(g)).expect("B-generators lie in L"))
            .collect();
        let rho_table = CosetTable::enumerate(&l_pres.pres, &b_words_in_l, cap)
            .map_err(|source| AmalgamError::Realization { part: "(L:B)", source })?
            .standardize();
        Ok(Amalgam { input, spec: None, l_pres, b_pres, r_pres, l, b, r, rho_table })
    }

    pub fn from_registry(name: &str, cap: usize) -> Result<Amalgam, AmalgamError> {
        let spec = crate::presentation::get_amalgam(name)?;
        let mut am = Amalgam::realize(AmalgamInput::from_spec(spec), cap)?;
        am.spec = Some(spec);
        Ok(am)
    }

    pub fn spec(&self) -> Option<&'static AmalgamSpec> {
        self.spec
    }

    pub fn input(&self) -> &AmalgamInput {
        &self.input
    }

    pub fn presentation(&self) -> &Presentation {
        &self.input.pres
    }

    pub fn l(&self) -> &CayleyGroup {
        &self.l
    }

    pub fn b(&self) -> &CayleyGroup {
        &self.b
    }

    pub fn r(&self) -> &CayleyGroup {
        &self.r
    }

    pub fn l_pres(&self) -> &RestrictedPresentation {
        &self.l_pres
    }

    pub fn b_pres(&self) -> &RestrictedPresentation {
        &self.b_pres
    }

    pub fn r_pres(&self) -> &RestrictedPresentation {
        &self.r_pres
    }

    pub fn rho_table(&self) -> &CosetTable {
        &self.rho_table
    }

    pub fn local_degree(&self) -> usize {
        self.rho_table.n()
    }

    /// Evaluates a word (in completion coordinates, supported by `L`) to an
    /// element of the realized `L`.
    pub fn l_element(&self, w: &Word) -> Result<u32, AmalgamError> {
        let sub = self.l_pres.to_sub(w).ok_or(AmalgamError::OutsidePart { part: "L" })?;
        Ok(self.l.eval(&sub))
    }

    /// Evaluates a word supported by `R` to an element of the realized `R`.
    pub fn r_element(&self, w: &Word) -> Result<u32, AmalgamError> {
        let sub = self.r_pres.to_sub(w).ok_or(AmalgamError::OutsidePart { part: "R" })?;
        Ok(self.r.eval(&sub))
    }

    /// The image of an `L`-element under the local action map.
    pub fn rho_of_element(&self, x: u32) -> Perm {
        self.l.perm_on(&self.rho_table, x)
    }

    /// The image of a word (completion coordinates, `L`-supported) under
    /// the local action map.
    pub fn rho(&self, w: &Word) -> Result<Perm, AmalgamError> {
        Ok(self.rho_of_element(self.l_element(w)?))
    }

    /// Local action of the subgroup of `L` generated by `words` (completion
    /// coordinates): its image on the cosets of `B`.
    pub fn local_action(&self, words: &[Word]) -> Result<PermGroup, AmalgamError> {
        let gens: Vec<Perm> =
            words.iter().map(|w| self.rho(w)).collect::<Result<_, _>>()?;
        Ok(PermGroup::closure(self.local_degree(), &gens, 1 << 16)
            .expect("local action is a subgroup of a finite symmetric group"))
    }

    /// Local action of a set of `L`-elements.
    pub fn local_action_of_elements(&self, elements: &[u32]) -> PermGroup {
        let mut perms: Vec<Perm> = elements.iter().map(|&x| self.rho_of_element(x)).collect();
        perms.sort_unstable();
        perms.dedup();
        PermGroup::from_elements(self.local_degree(), perms.clone(), perms)
    }

    /// Indices of `B`'s elements inside the realized `L`.
    pub fn b_in_l(&self) -> Vec<u32> {
        self.embed_b(&self.l_pres, &self.l)
    }

    /// Indices of `B`'s elements inside the realized `R`.
    pub fn b_in_r(&self) -> Vec<u32> {
        self.embed_b(&self.r_pres, &self.r)
    }

    fn embed_b(&self, target_pres: &RestrictedPresentation, target: &CayleyGroup) -> Vec<u32> {
        (0..self.b.order() as u32)
            .map(|x| {
                let parent = self.b_pres.to_parent(self.b.word_of(x));
                let local = target_pres.to_sub(&parent).expect("B-words lie in the target part");
                target.eval(&local)
            })
            .collect()
    }

    /// Checks the amalgam conditions and reports each one.
    pub fn validate(&self) -> ValidationReport {
        let mut conditions = Vec::new();
        let d = self.input.valency;

        conditions.push(Condition {
            name: "B finite".into(),
            passed: true,
            detail: format!("|B| = {}", self.b.order()),
        });

        let index_l = self.local_degree();
        conditions.push(Condition {
            name: "|L:B| = d".into(),
            passed: index_l == d,
            detail: format!("|L:B| = {index_l}, d = {d}"),
        });

        let b_words_in_r: Vec<Word> = self
            .input
            .b_gens
            .iter()
            .map(|&g| self.r_pres.to_sub(&Word::gen(g)).expect("B-generators lie in R"))
            .collect();
        let index_r = CosetTable::enumerate(&self.r_pres.pres, &b_words_in_r, self.r.order() + 1)
            .map(|t| t.n())
            .unwrap_or(usize::MAX);
        conditions.push(Condition {
            name: "|R:B| = 2".into(),
            passed: index_r == 2,
            detail: format!("|R:B| = {index_r}"),
        });

        conditions.push(Condition {
            name: "|L| = d|B|".into(),
            passed: self.l.order() == d * self.b.order(),
            detail: format!("|L| = {}, d|B| = {}", self.l.order(), d * self.b.order()),
        });
        conditions.push(Condition {
            name: "|R| = 2|B|".into(),
            passed: self.r.order() == 2 * self.b.order(),
            detail: format!("|R| = {}, 2|B| = {}", self.r.order(), 2 * self.b.order()),
        });

        let core = self.faithfulness_core();
        let core_trivial = core.len() == 1;
        conditions.push(Condition {
            name: "no nontrivial subgroup of B normal in L and R".into(),
            passed: core_trivial,
            detail: if core_trivial {
                "core is trivial".into()
            } else {
                let witness = core.iter().find(|&&x| x != 0).unwrap();
                format!(
                    "core has order {}; witness {}",
                    core.len(),
                    self.input.pres.word_string(&self.b_pres.to_parent(self.b.word_of(*witness)))
                )
            },
        });

        conditions.push(Condition {
            name: "completion generated by L and R".into(),
            passed: true,
            detail: "holds by construction: the completion is presented on the union of the L- and R-generators".into(),
        });

        ValidationReport {
            schema: 1,
            amalgam: self.spec.map(|s| s.name.to_string()),
            orders: Orders {
                l: self.l.order(),
                b: self.b.order(),
                r: self.r.order(),
                valency: d,
            },
            passed: conditions.iter().all(|c| c.passed),
            conditions,
        }
    }

    /// The largest subgroup of `B` normal in both `L` and `R`, computed by
    /// the iterated two-sided core: alternately intersect with the largest
    /// subgroup normal in each part until stable. Returns sorted B-element
    /// indices.
    pub fn faithfulness_core(&self) -> Vec<u32> {
        let b_l = self.b_in_l();
        let b_r = self.b_in_r();
        let back_l: HashMap<u32, u32> =
            b_l.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let back_r: HashMap<u32, u32> =
            b_r.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();

        let mut m: Vec<u32> = (0..self.b.order() as u32).collect();
        loop {
            let in_l: Vec<u32> = m.iter().map(|&x| b_l[x as usize]).collect();
            let core_l = generator_invariant_core(&self.l, &in_l);
            let kept_l: Vec<u32> = core_l.iter().map(|x| back_l[x]).collect();

            let in_r: Vec<u32> = m.iter().map(|&x| b_r[x as usize]).collect();
            let core_r = generator_invariant_core(&self.r, &in_r);
            let kept_r: Vec<u32> = core_r.iter().map(|x| back_r[x]).collect();

            let mut next: Vec<u32> =
                kept_l.iter().filter(|x| kept_r.binary_search(x).is_ok() || kept_r.contains(x)).copied().collect();
            next.sort_unstable();
            if next == m {
                return m;
            }
            m = next;
        }
    }

    /// The presentation of the universal completion: the union of the L-
    /// and R-generators carrying all L- and R-relators. For registry
    /// entries this recovers the stored completion presentation (same
    /// generators, same relator set).
    pub fn assemble_universal(&self) -> Presentation {
        let mut union: Vec<usize> = self.input.l_gens.clone();
        for &g in &self.input.r_gens {
            if !union.contains(&g) {
                union.push(g);
            }
        }
        union.sort_unstable();
        let names: Vec<String> =
            union.iter().map(|&g| self.input.pres.generators()[g].clone()).collect();
        let reindex = |w: &Word| -> Word {
            Word::from_letters(w.letters().iter().map(|l| {
                crate::presentation::Letter::new(
                    union.iter().position(|&g| g == l.gen as usize).expect("generator in union"),
                    l.inverse,
                )
            }))
        };
        let mut relators: Vec<Word> = Vec::new();
        for r in self.l_pres.pres.relators() {
            let w = reindex(&self.l_pres.to_parent(r));
            if !relators.contains(&w) {
                relators.push(w);
            }
        }
        for r in self.r_pres.pres.relators() {
            let w = reindex(&self.r_pres.to_parent(r));
            if !relators.contains(&w) {
                relators.push(w);
            }
        }
        Presentation::new(names, relators).expect("assembled presentation is valid")
    }
}

/// Removes elements whose conjugates under the group's generators leave the
/// set; the fixpoint is the largest subset invariant under conjugation,
/// i.e. the largest subgroup of the input normal in the whole group (for
/// subgroup inputs). Returns a sorted element list.
fn generator_invariant_core(g: &CayleyGroup, set: &[u32]) -> Vec<u32> {
    use std::collections::HashSet;
    let width = g.presentation().width();
    let mut alive: HashSet<u32> = set.iter().copied().collect();
    let mut queue: Vec<u32> = Vec::new();
    for &x in set {
        if (0..width).any(|col| !alive.contains(&g.conjugate_by_col(x, col))) {
            queue.push(x);
        }
    }
    for &x in &queue {
        alive.remove(&x);
    }
    while let Some(y) = queue.pop() {
        // predecessors of y under generator conjugation
        for col in 0..width {
            let x = g.conjugate_by_col(y, col ^ 1);
            if alive.contains(&x) && !alive.contains(&g.conjugate_by_col(x, col)) {
                alive.remove(&x);
                queue.push(x);
            }
        }
    }
    let mut out: Vec<u32> = alive.into_iter().collect();
    out.sort_unstable();
    out
}

#[derive(Serialize, Debug)]
pub struct Condition {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize, Debug)]
pub struct Orders {
    pub l: usize,
    pub b: usize,
    pub r: usize,
    pub valency: usize,
}

#[derive(Serialize, Debug)]
pub struct ValidationReport {
    pub schema: u32,
    pub amalgam: Option<String>,
    pub orders: Orders,
    pub passed: bool,
    pub conditions: Vec<Condition>,
}
