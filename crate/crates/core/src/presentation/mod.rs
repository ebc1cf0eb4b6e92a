//! Words over inverse-closed generator alphabets, group presentations, the
//! line-oriented text format, and the registry of built-in amalgams.

mod parser;
mod registry;

pub use parser::{parse_presentation, ParseError};
pub use registry::{get_amalgam, AmalgamSpec, ArcTransitivity, UnknownAmalgam, AMALGAM_NAMES};

use serde::Serialize;
use std::fmt;

/// One signed generator occurrence inside a word.
///
/// `gen` indexes into the owning presentation's generator list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub gen: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen: gen as u16, inverse }
    }

    /// Column index in a coset table. Generator columns come in
    /// (g, g^-1) pairs in declaration order.
    pub fn col(self) -> usize {
        self.gen as usize * 2 + self.inverse as usize
    }

    pub fn from_col(col: usize) -> Self {
        Letter { gen: (col / 2) as u16, inverse: col % 2 == 1 }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// A freely reduced word in the generators of some presentation.
///
/// Words are immutable values. Every constructor reduces its input, so no
/// word ever contains an adjacent `g g^-1` pair; the empty word is the
/// identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Word {
    letters: Vec<Letter>,
}

fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last().is_some_and(|t| *t == l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// Builds a word from raw letters, freely reducing them.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word { letters: free_reduce(letters) }
    }

    /// The one-letter word for generator `gen`.
    pub fn gen(gen: usize) -> Self {
        Word { letters: vec![Letter::new(gen, false)] }
    }

    pub fn letter(gen: usize, inverse: bool) -> Self {
        Word { letters: vec![Letter::new(gen, inverse)] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, e: i32) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `self^by = by^-1 * self * by`.
    pub fn conjugated_by(&self, by: &Word) -> Word {
        by.inverse().concat(self).concat(by)
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.inverse().concat(&v.inverse()).concat(u).concat(v)
    }

    /// Free reduction. Words are reduced on construction, so this is the
    /// identity; it exists so the reduction contract is directly testable.
    pub fn reduce(&self) -> Word {
        Word::from_letters(self.letters.iter().copied())
    }

    /// Strips matching first/last inverse pairs until the word is cyclically
    /// reduced.
    pub fn cyclically_reduced(&self) -> Word {
        let mut l = self.letters.clone();
        while l.len() >= 2 && *l.first().unwrap() == l.last().unwrap().inv() {
            l.pop();
            l.remove(0);
        }
        Word { letters: l }
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.gen as usize).max()
    }

    /// True if every letter's generator is contained in `gens`.
    pub fn supported_by(&self, gens: &[usize]) -> bool {
        self.letters.iter().all(|l| gens.contains(&(l.gen as usize)))
    }
}

/// A finitely presented group: named generators plus freely reduced
/// relator words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    gens: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(gens: Vec<String>, relators: Vec<Word>) -> Result<Self, String> {
        if gens.is_empty() {
            return Err("empty generator list".into());
        }
        let mut seen = std::collections::HashSet::new();
        for g in &gens {
            if !seen.insert(g.clone()) {
                return Err(format!("duplicate generator `{g}`"));
            }
        }
        let relators: Vec<Word> = relators.into_iter().map(|w| w.reduce()).collect();
        for r in &relators {
            if let Some(m) = r.max_gen() {
                if m >= gens.len() {
                    return Err(format!("relator uses generator index {m} out of range"));
                }
            }
        }
        Ok(Presentation { gens, relators })
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g == name)
    }

    /// Table width used by coset tables over this presentation.
    pub fn width(&self) -> usize {
        self.gens.len() * 2
    }

    /// Parses a word in this presentation's generators from the relation
    /// grammar (`x^2`, `[x,y]`, `u=v`, ...).
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        parser::parse_word_in(self, text)
    }

    /// Renders a word using this presentation's generator names, collapsing
    /// runs into powers. The empty word renders as `1`.
    pub fn word_string(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        let ls = w.letters();
        let single = self.gens.iter().all(|g| g.len() == 1);
        while i < ls.len() {
            let mut j = i + 1;
            while j < ls.len() && ls[j] == ls[i] {
                j += 1;
            }
            let run = (j - i) as i64;
            let e = if ls[i].inverse { -run } else { run };
            if !out.is_empty() && !single {
                out.push('*');
            }
            out.push_str(&self.gens[ls[i].gen as usize]);
            if e != 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
            i = j;
        }
        out
    }

    /// Canonical text form accepted by [`parse_presentation`].
    pub fn format(&self) -> String {
        let mut out = String::from("gens:");
        for g in &self.gens {
            out.push(' ');
            out.push_str(g);
        }
        out.push('\n');
        out.push_str("rels:");
        for (i, r) in self.relators.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { ", " });
            out.push_str(&self.word_string(r));
        }
        out.push('\n');
        out
    }

    /// The sub-presentation on a generator subset, keeping exactly the
    /// relators supported by that subset.
    pub fn restrict(&self, gens: &[usize]) -> RestrictedPresentation {
        let names: Vec<String> = gens.iter().map(|&g| self.gens[g].clone()).collect();
        let relators: Vec<Word> = self
            .relators
            .iter()
            .filter(|r| r.supported_by(gens))
            .map(|r| translate(r, gens).expect("supported relator"))
            .collect();
        RestrictedPresentation {
            pres: Presentation::new(names, relators).expect("restriction of valid presentation"),
            parent_gens: gens.to_vec(),
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl Serialize for Presentation {
    fn serialize<S>(&self, s: S) -> Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Presentation", 2)?;
        st.serialize_field("gens", &self.gens)?;
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_string(r)).collect();
        st.serialize_field("relators", &rels)?;
        st.end()
    }
}

fn translate(w: &Word, gens: &[usize]) -> Option<Word> {
    let mut out = Vec::with_capacity(w.len());
    for l in w.letters() {
        let new = gens.iter().position(|&g| g == l.gen as usize)?;
        out.push(Letter::new(new, l.inverse));
    }
    Some(Word::from_letters(out))
}

/// A presentation obtained by restricting a parent presentation to a
/// generator subset, remembering the subset so words can be moved between
/// the two coordinate systems.
#[derive(Clone, Debug)]
pub struct RestrictedPresentation {
    pub pres: Presentation,
    /// For each local generator, its index in the parent presentation.
    pub parent_gens: Vec<usize>,
}

impl RestrictedPresentation {
    /// Rewrites a parent word over the subset generators, or `None` if it
    /// uses a generator outside the subset.
    pub fn to_sub(&self, w: &Word) -> Option<Word> {
        translate(w, &self.parent_gens)
    }

    /// Rewrites a local word back into parent coordinates.
    pub fn to_parent(&self, w: &Word) -> Word {
        Word::from_letters(
            w.letters()
                .iter()
                .map(|l| Letter::new(self.parent_gens[l.gen as usize], l.inverse)),
        )
    }
}
