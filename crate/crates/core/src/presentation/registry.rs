//! Built-in registry of the six index-(4,2) amalgams whose universal
//! completion acts 2-arc-transitively on the tetravalent tree with `Sym(4)`
//! local action.
//!
//! Each entry carries the presentation of the completion `A`, generator
//! subsets for the vertex/arc/edge stabilizers `L`, `B`, `R`, the
//! arc-reversing generator, named constant words, and the expected analysis
//! results (maximal LR-subgroup generators, normalizer generators, local
//! Klein-subgroup class representatives) that the pipeline re-derives and
//! checks.

use super::{parse_presentation, Presentation, RestrictedPresentation, Word};
use once_cell::sync::Lazy;
use serde::Serialize;
use thiserror::Error;

/// How far up the arc-transitivity ladder the completion acts on the tree.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ArcTransitivity {
    /// 2- or 3-arc-transitive, not 4-arc-transitive.
    TwoOrThree,
    /// 4-arc-transitive, not 5-arc-transitive.
    Four,
    /// 7-arc-transitive.
    Seven,
}

impl ArcTransitivity {
    pub fn label(self) -> &'static str {
        match self {
            ArcTransitivity::TwoOrThree => "2/3",
            ArcTransitivity::Four => "4",
            ArcTransitivity::Seven => "7",
        }
    }

    /// Upper bound on the transitivity level.
    pub fn upper_bound(self) -> u8 {
        match self {
            ArcTransitivity::TwoOrThree => 3,
            ArcTransitivity::Four => 4,
            ArcTransitivity::Seven => 7,
        }
    }
}

/// One registry entry.
#[derive(Clone, Debug)]
pub struct AmalgamSpec {
    pub name: &'static str,
    /// Presentation of the universal completion `A` on the full generator set.
    pub presentation: Presentation,
    /// Generator indices of the vertex stabilizer `L`.
    pub l_gens: Vec<usize>,
    /// Generator indices of the arc stabilizer `B`.
    pub b_gens: Vec<usize>,
    /// Generator indices of the edge stabilizer `R`.
    pub r_gens: Vec<usize>,
    /// Index of the arc-reversing generator `a`.
    pub arc_reversal: usize,
    /// Named constant words (in `A` coordinates), e.g. `alpha` for 7AT.
    pub constants: Vec<(&'static str, Word)>,
    /// Generators of the maximal LR-subgroup, when one exists.
    pub max_lr_words: Option<Vec<Word>>,
    /// Generators of its normalizer in `A`, when one exists.
    pub normalizer_words: Option<Vec<Word>>,
    /// Expected class representatives of the local Klein subgroups of `L`
    /// (2-subgroups with intransitive-Klein image on the 4 cosets of `B`).
    pub x_class_words: Vec<Vec<Word>>,
    pub arc_transitivity: ArcTransitivity,
    /// Restrictions of the presentation to the three stabilizers.
    pub l_pres: RestrictedPresentation,
    pub b_pres: RestrictedPresentation,
    pub r_pres: RestrictedPresentation,
}

impl AmalgamSpec {
    pub fn valency(&self) -> usize {
        4
    }

    /// Single-letter words for a generator index subset, in `A` coordinates.
    pub fn gen_words(&self, gens: &[usize]) -> Vec<Word> {
        gens.iter().map(|&g| Word::gen(g)).collect()
    }

    pub fn l_words(&self) -> Vec<Word> {
        self.gen_words(&self.l_gens)
    }

    pub fn b_words(&self) -> Vec<Word> {
        self.gen_words(&self.b_gens)
    }

    pub fn r_words(&self) -> Vec<Word> {
        self.gen_words(&self.r_gens)
    }

    pub fn constant(&self, name: &str) -> Option<&Word> {
        self.constants.iter().find(|(n, _)| *n == name).map(|(_, w)| w)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown amalgam `{0}` (expected one of S4, C3xS4, C3xS4star, S3xS4, 4AT, 7AT)")]
pub struct UnknownAmalgam(pub String);

pub const AMALGAM_NAMES: [&str; 6] = ["S4", "C3xS4", "C3xS4star", "S3xS4", "4AT", "7AT"];

/// Looks up a registry entry by name.
pub fn get_amalgam(name: &str) -> Result<&'static AmalgamSpec, UnknownAmalgam> {
    REGISTRY
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| UnknownAmalgam(name.to_string()))
}

struct RawEntry {
    name: &'static str,
    text: &'static str,
    l: &'static [&'static str],
    b: &'static [&'static str],
    r: &'static [&'static str],
    arc_rev: &'static str,
    constants: &'static [(&'static str, &'static str)],
    max_lr: Option<&'static [&'static str]>,
    normalizer: Option<&'static [&'static str]>,
    x_classes: &'static [&'static [&'static str]],
    level: ArcTransitivity,
}

const RAW: [RawEntry; 6] = [
    RawEntry {
        name: "S4",
        text: "gens: x y s t a\n\
               rels: x^2, y^2, s^3, t^2, a^2, [x,y], s^t=s^-1, x^s=y, y^s=xy, x^t=y, [s,a], [t,a]",
        l: &["x", "y", "s", "t"],
        b: &["s", "t"],
        r: &["s", "t", "a"],
        arc_rev: "a",
        constants: &[],
        max_lr: Some(&["xy", "t", "a", "a^x"]),
        normalizer: Some(&["x", "y", "t", "a"]),
        x_classes: &[&["xy", "t"]],
        level: ArcTransitivity::TwoOrThree,
    },
    RawEntry {
        name: "C3xS4",
        text: "gens: x y c d t a\n\
               rels: x^2, y^2, c^3, d^3, t^2, a^2, [x,y], [c,d], [c,x], [c,y], (tc)^2, (td)^2, \
               x^d=y, y^d=xy, x^t=y, c^a=d, [a,t]",
        l: &["x", "y", "c", "d", "t"],
        b: &["c", "d", "t"],
        r: &["c", "d", "t", "a"],
        arc_rev: "a",
        constants: &[],
        max_lr: Some(&["xy", "t", "a", "a^x"]),
        normalizer: Some(&["x", "y", "t", "a"]),
        x_classes: &[&["xy", "t"]],
        level: ArcTransitivity::TwoOrThree,
    },
    RawEntry {
        name: "C3xS4star",
        text: "gens: x y c d t a\n\
               rels: x^2, y^2, c^3, d^3, t^2, a^2=t, [x,y], [c,d], [c,x], [c,y], (tc)^2, (td)^2, \
               x^d=y, y^d=xy, x^t=y, c^a=d, d^a=c^-1",
        l: &["x", "y", "c", "d", "t"],
        b: &["c", "d", "t"],
        r: &["c", "d", "t", "a"],
        arc_rev: "a",
        constants: &[],
        max_lr: Some(&["xy", "t", "a", "a^x"]),
        normalizer: Some(&["x", "y", "t", "a"]),
        x_classes: &[&["xy", "t"]],
        level: ArcTransitivity::TwoOrThree,
    },
    RawEntry {
        name: "S3xS4",
        text: "gens: x y c d r s a\n\
               rels: x^2, y^2, c^3, d^3, r^2, s^2, a^2, [x,y], [c,d], [r,s], [c,x], [c,y], \
               c^r=c^-1, [d,r], [c,s], d^s=d^-1, x^d=y, y^d=xy, x^s=y, [r,x], [r,y], c^a=d, s^a=r",
        l: &["x", "y", "c", "d", "r", "s"],
        b: &["c", "d", "r", "s"],
        r: &["c", "d", "r", "s", "a"],
        arc_rev: "a",
        constants: &[],
        max_lr: Some(&["xy", "s", "r", "a", "a^x"]),
        normalizer: Some(&["x", "y", "s", "r", "a"]),
        x_classes: &[&["xy", "s"], &["xy", "sr"], &["rxy", "s"], &["xy", "r", "s"]],
        level: ArcTransitivity::TwoOrThree,
    },
    RawEntry {
        name: "4AT",
        text: "gens: t c d e x y a\n\
               rels: t^2, c^3, d^3, e^3, x^2, y^2, a^2, [c,d], [c,e], [d,e]=c, [x,y], (cx)^2, \
               (dx)^2, [e,x], (cy)^2, [d,y], (ey)^2, c^t=d^-1, y(et)^2e^-1te^-1, (et)^4x, \
               (ca)^2, d^a=e, x^a=y",
        l: &["t", "x", "y", "c", "d", "e"],
        b: &["x", "y", "c", "d", "e"],
        r: &["x", "y", "c", "d", "e", "a"],
        arc_rev: "a",
        constants: &[],
        max_lr: Some(&["t", "x", "y", "a", "(ca)^((cet)^-1)"]),
        normalizer: Some(&["t", "x", "y", "ete", "a", "(ca)^((cet)^-1)"]),
        x_classes: &[&["x", "y", "t"]],
        level: ArcTransitivity::Four,
    },
    RawEntry {
        name: "7AT",
        text: "gens: h p q r s t b c k a\n\
               rels: h^4, p^3, q^3, r^3, s^3, t^3, b^3, c^2, k^2, a^2, kh^2, \
               [p,q], [p,r], [p,s], [p,t], [p,b], [q,r], [q,s], [q,t], [q,b], \
               [r,s], [r,t], [b,s], [s,t]=p, [b,r]=q, [t,b]=qrsp^-1, \
               [k,c], (tk)^2, (rk)^2, [p,k], (qk)^2, (sk)^2, [b,k], (tc)^2, [r,c], (pc)^2, \
               (qc)^2, [s,c], (bc)^2, \
               [p,h], q^h=q^-1r, r^h=qr, s^h=pq^-1r^-1s^-1t^-1, t^h=p^-1qr^-1s^-1t, \
               (hbc)^2, (hb)^3, p^a=q^-1, r^a=s^-1, t^a=b^-1, [c,a], k^a=ck",
        l: &["h", "p", "q", "r", "s", "t", "b", "c", "k"],
        b: &["p", "q", "r", "s", "t", "b", "c", "k"],
        r: &["p", "q", "r", "s", "t", "b", "c", "k", "a"],
        arc_rev: "a",
        constants: &[("alpha", "pcq")],
        max_lr: None,
        normalizer: None,
        x_classes: &[&["pcq", "(pcq)^h"]],
        level: ArcTransitivity::Seven,
    },
];

static REGISTRY: Lazy<Vec<AmalgamSpec>> = Lazy::new(|| {
    RAW.iter().map(build_entry).collect()
});

fn build_entry(raw: &RawEntry) -> AmalgamSpec {
    let pres = parse_presentation(raw.text)
        .unwrap_or_else(|e| panic!("registry presentation {}: {e}", raw.name));
    let idx = |n: &str| {
        pres.generator_index(n)
            .unwrap_or_else(|| panic!("registry {}: unknown generator {n}", raw.name))
    };
    let gens = |ns: &[&str]| ns.iter().map(|n| idx(n)).collect::<Vec<_>>();
    let word = |s: &str| {
        pres.parse_word(s)
            .unwrap_or_else(|e| panic!("registry {} word `{s}`: {e}", raw.name))
    };
    let words = |ss: &[&str]| ss.iter().map(|s| word(s)).collect::<Vec<_>>();

    let l_gens = gens(raw.l);
    let b_gens = gens(raw.b);
    let r_gens = gens(raw.r);
    let arc_reversal = idx(raw.arc_rev);
    assert!(b_gens.iter().all(|g| l_gens.contains(g)), "{}: B-gens not within L", raw.name);
    assert!(b_gens.iter().all(|g| r_gens.contains(g)), "{}: B-gens not within R", raw.name);
    {
        let mut expect = b_gens.clone();
        expect.push(arc_reversal);
        let mut have = r_gens.clone();
        have.sort_unstable();
        expect.sort_unstable();
        assert_eq!(have, expect, "{}: R-gens must be B-gens plus the arc reversal", raw.name);
    }

    let l_pres = pres.restrict(&l_gens);
    let b_pres = pres.restrict(&b_gens);
    let r_pres = pres.restrict(&r_gens);

    AmalgamSpec {
        name: raw.name,
        l_gens,
        b_gens,
        r_gens,
        arc_reversal,
        constants: raw.constants.iter().map(|(n, s)| (*n, word(s))).collect(),
        max_lr_words: raw.max_lr.map(words),
        normalizer_words: raw.normalizer.map(words),
        x_class_words: raw.x_classes.iter().map(|ss| words(ss)).collect(),
        arc_transitivity: raw.level,
        l_pres,
        b_pres,
        r_pres,
        presentation: pres,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_shapes() {
        let s4 = get_amalgam("S4").unwrap();
        assert_eq!(s4.presentation.gen_count(), 5);
        assert_eq!(s4.presentation.relators().len(), 12);
        assert_eq!(s4.l_gens.len(), 4);
        assert_eq!(s4.b_gens.len(), 2);
        assert_eq!(s4.r_gens.len(), 3);

        let seven = get_amalgam("7AT").unwrap();
        assert_eq!(seven.presentation.gen_count(), 10);
        assert_eq!(seven.presentation.relators().len(), 51);
        assert_eq!(seven.b_gens.len(), 8);

        assert!(get_amalgam("bogus").is_err());
        for name in AMALGAM_NAMES {
            get_amalgam(name).unwrap();
        }
    }

    #[test]
    fn a_squared_equals_t_stored_as_relator() {
        let star = get_amalgam("C3xS4star").unwrap();
        let p = &star.presentation;
        let expect = p.parse_word("a^2t^-1").unwrap();
        assert!(p.relators().contains(&expect));
    }

    #[test]
    fn kh2_stored_as_khh() {
        let seven = get_amalgam("7AT").unwrap();
        let p = &seven.presentation;
        let expect = p.parse_word("khh").unwrap();
        assert!(p.relators().contains(&expect));
        assert_eq!(expect.len(), 3);
    }

    #[test]
    fn commutator_with_rhs_expands() {
        let four = get_amalgam("4AT").unwrap();
        let p = &four.presentation;
        let expect = p.parse_word("d^-1e^-1dec^-1").unwrap();
        assert!(p.relators().contains(&expect));
    }

    #[test]
    fn restrictions_take_exactly_supported_relators() {
        for name in AMALGAM_NAMES {
            let spec = get_amalgam(name).unwrap();
            let p = &spec.presentation;
            for (sub, gens) in [
                (&spec.l_pres, &spec.l_gens),
                (&spec.b_pres, &spec.b_gens),
                (&spec.r_pres, &spec.r_gens),
            ] {
                let expect: Vec<_> =
                    p.relators().iter().filter(|r| r.supported_by(gens)).cloned().collect();
                assert_eq!(sub.pres.relators().len(), expect.len(), "{name}");
                for (have, want) in sub.pres.relators().iter().zip(&expect) {
                    assert_eq!(&sub.to_parent(have), want, "{name}");
                }
            }
        }
    }

    #[test]
    fn every_relator_lives_in_l_or_r() {
        // This is what makes the universal completion reassemble verbatim.
        for name in AMALGAM_NAMES {
            let spec = get_amalgam(name).unwrap();
            for r in spec.presentation.relators() {
                assert!(
                    r.supported_by(&spec.l_gens) || r.supported_by(&spec.r_gens),
                    "{name}: relator {} not in L or R",
                    spec.presentation.word_string(r)
                );
            }
        }
    }

    #[test]
    fn round_trip_registry_presentations() {
        for name in AMALGAM_NAMES {
            let spec = get_amalgam(name).unwrap();
            let text = spec.presentation.format();
            let back = parse_presentation(&text).unwrap();
            assert_eq!(back, spec.presentation, "{name}");
        }
    }
}
