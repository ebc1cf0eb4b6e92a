//! Low-index subgroup enumeration: all subgroups of a finitely presented
//! group of index exactly `n` (or at most `n`), up to conjugacy, returned
//! as standardized coset tables.
//!
//! The search walks partial coset tables in scan order, propagating forced
//! deductions through relator rotations after every definition; a forced
//! coincidence is a contradiction (cosets in a subgroup table are
//! distinct). Conjugacy deduplication happens during the search: a partial
//! table is abandoned as soon as rebasing it at some coset and
//! standardizing compares lexicographically smaller, so exactly the
//! canonical representative of each class survives.

use crate::amalgam::Amalgam;
use crate::cosetenum::CosetTable;
use crate::presentation::{Presentation, Word};
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

/// Desk-scale bound: the analyses this crate performs never need more.
pub const MAX_INDEX: usize = 64;
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("index {0} exceeds the supported bound of {MAX_INDEX}")]
    IndexBound(usize),
    #[error("low-index search exceeded the node cap of {cap}{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    NodeCap { cap: u64, context: Option<String> },
}

#[derive(Debug, Clone, Copy)]
pub struct LowIndexOptions {
    /// Keep only subgroups of index exactly `n` instead of at most `n`.
    pub exact: bool,
    pub node_cap: u64,
    pub threads: usize,
}

impl Default for LowIndexOptions {
    fn default() -> Self {
        LowIndexOptions { exact: true, node_cap: DEFAULT_NODE_CAP, threads: 1 }
    }
}

/// One conjugacy class of subgroups, represented by the canonical
/// (minimal standardized) coset table in the class.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub table: CosetTable,
    pub index: usize,
    pub schreier_gens: Vec<Word>,
}

impl SubgroupClass {
    pub fn to_json(&self) -> SubgroupClassJson {
        let p = self.table.presentation();
        SubgroupClassJson {
            index: self.index,
            generators: self.schreier_gens.iter().map(|w| p.word_string(w)).collect(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct SubgroupClassJson {
    pub index: usize,
    pub generators: Vec<String>,
}

const UNDEF: u32 = u32::MAX;

/// Raw search output: completed tables as (coset count, row-major entries).
type RawTables = Vec<(usize, Vec<u32>)>;

/// Relator rotations grouped by leading column.
struct Rotations {
    by_col: Vec<Vec<Vec<usize>>>,
}

impl Rotations {
    fn build(pres: &Presentation) -> Rotations {
        let mut by_col: Vec<Vec<Vec<usize>>> = vec![Vec::new(); pres.width()];
        let mut cyc: Vec<Vec<usize>> = Vec::new();
        for r in pres.relators() {
            let c = r.cyclically_reduced();
            if c.is_empty() {
                continue;
            }
            let cols: Vec<usize> = c.letters().iter().map(|l| l.col()).collect();
            if !cyc.contains(&cols) {
                cyc.push(cols);
            }
        }
        for r in &cyc {
            for start in 0..r.len() {
                let rot: Vec<usize> = r[start..].iter().chain(r[..start].iter()).copied().collect();
                let lead = rot[0];
                if !by_col[lead].contains(&rot) {
                    by_col[lead].push(rot);
                }
            }
        }
        Rotations { by_col }
    }
}

struct Searcher<'a> {
    width: usize,
    n: usize,
    exact: bool,
    rot: &'a Rotations,
    tab: Vec<u32>,
    k: usize,
    trail: Vec<usize>, // positions set, for undo
    deds: Vec<(u32, usize)>,
    results: Vec<(usize, Vec<u32>)>,
    nodes: &'a AtomicU64,
    cap: u64,
    abort: &'a AtomicBool,
    // reusable buffers for the rebase comparison
    cmp_label: Vec<u32>,
    cmp_stamp: Vec<u64>,
    cmp_orig: Vec<u32>,
    cmp_gen: u64,
}

impl<'a> Searcher<'a> {
    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.tab[c as usize * self.width + col]
    }

    fn set_edge(&mut self, a: u32, col: usize, b: u32) {
        let pa = a as usize * self.width + col;
        let pb = b as usize * self.width + (col ^ 1);
        debug_assert_eq!(self.tab[pa], UNDEF);
        self.tab[pa] = b;
        self.trail.push(pa);
        if self.tab[pb] == UNDEF {
            self.tab[pb] = a;
            self.trail.push(pb);
        } else {
            debug_assert_eq!(self.tab[pb], a);
        }
        self.deds.push((a, col));
        self.deds.push((b, col ^ 1));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let pos = self.trail.pop().unwrap();
            self.tab[pos] = UNDEF;
        }
        self.deds.clear();
    }

    /// Scans one relator rotation from `start`; fills a single gap as a
    /// deduction, reports a forced coincidence as a contradiction.
    fn scan(&mut self, start: u32, cols: &[usize]) -> bool {
        let mut f = start;
        let mut i = 0usize;
        let mut b = start;
        let mut j = cols.len();
        while i < j {
            let d = self.get(f, cols[i]);
            if d == UNDEF {
                break;
            }
            f = d;
            i += 1;
        }
        if i == j {
            return f == b;
        }
        while j > i {
            let d = self.get(b, cols[j - 1] ^ 1);
            if d == UNDEF {
                break;
            }
            b = d;
            j -= 1;
        }
        if j == i {
            return f == b;
        }
        if j == i + 1 {
            self.set_edge(f, cols[i], b);
        }
        true
    }

    fn propagate(&mut self) -> bool {
        let rot = self.rot;
        while let Some((c, col)) = self.deds.pop() {
            for r in &rot.by_col[col] {
                if !self.scan(c, r) {
                    self.deds.clear();
                    return false;
                }
            }
        }
        true
    }

    /// Lexicographic comparison of the standardized rebase at `omega`
    /// against the current table; `true` means strictly smaller (prune).
    fn rebased_smaller(&mut self, omega: u32) -> bool {
        self.cmp_gen += 1;
        let gen = self.cmp_gen;
        self.cmp_orig.clear();
        self.cmp_label[omega as usize] = 0;
        self.cmp_stamp[omega as usize] = gen;
        self.cmp_orig.push(omega);
        let mut new_i = 0usize;
        while new_i < self.cmp_orig.len() {
            let old = self.cmp_orig[new_i];
            for col in 0..self.width {
                let d = self.get(old, col);
                if d == UNDEF {
                    return false; // inconclusive
                }
                let dl = if self.cmp_stamp[d as usize] == gen {
                    self.cmp_label[d as usize]
                } else {
                    let l = self.cmp_orig.len() as u32;
                    self.cmp_label[d as usize] = l;
                    self.cmp_stamp[d as usize] = gen;
                    self.cmp_orig.push(d);
                    l
                };
                let cur = self.get(new_i as u32, col);
                if cur == UNDEF {
                    return false; // inconclusive
                }
                match dl.cmp(&cur) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            new_i += 1;
        }
        false
    }

    /// First undefined position at or after `from` (entries before a
    /// node's branch point stay defined throughout its subtree).
    fn first_undefined(&self, from: usize) -> Option<usize> {
        let end = self.k * self.width;
        (from..end).find(|&pos| self.tab[pos] == UNDEF)
    }

    fn dfs(&mut self, from: usize) -> Result<(), SearchError> {
        if self.abort.load(Ordering::Relaxed) {
            return Err(SearchError::NodeCap { cap: self.cap, context: None });
        }
        let nodes = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if nodes > self.cap {
            self.abort.store(true, Ordering::Relaxed);
            return Err(SearchError::NodeCap { cap: self.cap, context: None });
        }
        for omega in 1..self.k as u32 {
            if self.rebased_smaller(omega) {
                return Ok(());
            }
        }
        let Some(pos) = self.first_undefined(from) else {
            if !self.exact || self.k == self.n {
                self.results.push((self.k, self.tab[..self.k * self.width].to_vec()));
            }
            return Ok(());
        };
        let (c, col) = ((pos / self.width) as u32, pos % self.width);
        let limit = if self.k < self.n { self.k + 1 } else { self.k };
        for beta in 0..limit as u32 {
            let new_coset = beta as usize == self.k;
            if !new_coset && self.get(beta, col ^ 1) != UNDEF {
                continue;
            }
            let mark = self.trail.len();
            let k_before = self.k;
            if new_coset {
                self.k += 1;
            }
            self.set_edge(c, col, beta);
            if self.propagate() {
                self.dfs(pos)?;
            } else {
                self.deds.clear();
            }
            self.undo_to(mark);
            self.k = k_before;
        }
        Ok(())
    }
}

/// Expands the search tree breadth-first for `depth` branch levels,
/// emitting the surviving partial tables as independent subtree tasks.
fn expand_tasks(
    s: &mut Searcher,
    from: usize,
    depth: usize,
    tasks: &mut Vec<(Vec<u32>, usize, usize)>,
) -> Result<(), SearchError> {
    for omega in 1..s.k as u32 {
        if s.rebased_smaller(omega) {
            return Ok(());
        }
    }
    let Some(pos) = s.first_undefined(from) else {
        if !s.exact || s.k == s.n {
            s.results.push((s.k, s.tab[..s.k * s.width].to_vec()));
        }
        return Ok(());
    };
    if depth == 0 {
        tasks.push((s.tab.clone(), s.k, pos));
        return Ok(());
    }
    let (c, col) = ((pos / s.width) as u32, pos % s.width);
    let limit = if s.k < s.n { s.k + 1 } else { s.k };
    for beta in 0..limit as u32 {
        let new_coset = beta as usize == s.k;
        if !new_coset && s.get(beta, col ^ 1) != UNDEF {
            continue;
        }
        let mark = s.trail.len();
        let k_before = s.k;
        if new_coset {
            s.k += 1;
        }
        s.set_edge(c, col, beta);
        if s.propagate() {
            expand_tasks(s, pos, depth - 1, tasks)?;
        } else {
            s.deds.clear();
        }
        s.undo_to(mark);
        s.k = k_before;
    }
    Ok(())
}

/// All subgroups of index exactly `n` (`exact`) or at most `n`, up to
/// conjugacy, as canonical standardized coset tables in deterministic
/// (index, table) order.
pub fn low_index(
    pres: &Presentation,
    n: usize,
    opts: LowIndexOptions,
) -> Result<Vec<SubgroupClass>, SearchError> {
    if n == 0 || n > MAX_INDEX {
        return Err(SearchError::IndexBound(n));
    }
    let rot = Rotations::build(pres);
    let width = pres.width();
    let nodes = AtomicU64::new(0);
    let abort = AtomicBool::new(false);

    let make = || Searcher {
        width,
        n,
        exact: opts.exact,
        rot: &rot,
        tab: vec![UNDEF; n * width],
        k: 1,
        trail: Vec::new(),
        deds: Vec::new(),
        results: Vec::new(),
        nodes: &nodes,
        cap: opts.node_cap,
        abort: &abort,
        cmp_label: vec![0; n],
        cmp_stamp: vec![0; n],
        cmp_orig: Vec::with_capacity(n),
        cmp_gen: 0,
    };

    let mut raw: RawTables;
    if opts.threads <= 1 {
        let mut s = make();
        s.dfs(0)?;
        raw = s.results;
    } else {
        // expand a frontier of shallow subtrees into independent tasks;
        // each task owns its own table copy
        let mut root = make();
        let mut tasks: Vec<(Vec<u32>, usize, usize)> = Vec::new();
        expand_tasks(&mut root, 0, 2, &mut tasks)?;
        raw = root.results.drain(..).collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("thread pool");
        use rayon::prelude::*;
        let outcomes: Vec<Result<RawTables, SearchError>> = pool.install(|| {
            tasks
                .par_iter()
                .map(|(tab, k, from)| {
                    let mut s = make();
                    s.tab = tab.clone();
                    s.k = *k;
                    s.dfs(*from)?;
                    Ok(s.results)
                })
                .collect()
        });
        for o in outcomes {
            raw.extend(o?);
        }
    }

    raw.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let pres_arc = Arc::new(pres.clone());
    let classes = raw
        .into_iter()
        .map(|(k, tab)| {
            let bare = CosetTable::from_parts(Arc::clone(&pres_arc), Vec::new(), k, tab);
            debug_assert_eq!(bare.standardize().raw(), bare.raw(), "search emits standardized tables");
            let schreier = bare.schreier_generators();
            let table =
                CosetTable::from_parts(Arc::clone(&pres_arc), schreier.clone(), k, bare.raw().to_vec());
            debug_assert!(table.validate().is_ok());
            SubgroupClass { table, index: k, schreier_gens: schreier }
        })
        .collect();
    Ok(classes)
}

/// Keeps the classes whose subgroup acts as an LR-group on the tree: the
/// vertex stabilizer is transitive on the cosets, the arc and edge
/// stabilizers each have two orbits, and the point stabilizer inside the
/// vertex stabilizer has intransitive-Klein local action.
pub fn filter_lr(am: &Amalgam, classes: &[SubgroupClass]) -> Vec<SubgroupClass> {
    let input = am.input();
    let l_words: Vec<Word> = input.l_gens.iter().map(|&g| Word::gen(g)).collect();
    let b_words: Vec<Word> = input.b_gens.iter().map(|&g| Word::gen(g)).collect();
    let r_words: Vec<Word> = input.r_gens.iter().map(|&g| Word::gen(g)).collect();
    classes
        .iter()
        .filter(|cl| {
            let t = &cl.table;
            if t.orbit_count(&l_words) != 1
                || t.orbit_count(&b_words) != 2
                || t.orbit_count(&r_words) != 2
            {
                return false;
            }
            // T ∩ L: elements of the vertex stabilizer lying in the subgroup
            let members: Vec<u32> = (0..am.l().order() as u32)
                .filter(|&e| {
                    let w = am.l_pres().to_parent(am.l().word_of(e));
                    t.trace(0, &w) == 0
                })
                .collect();
            am.local_action_of_elements(&members).is_intransitive_klein()
        })
        .cloned()
        .collect()
}

/// Discards classes properly contained in (a conjugate of) another listed
/// class.
pub fn maximal_members(classes: &[SubgroupClass]) -> Vec<SubgroupClass> {
    classes
        .iter()
        .filter(|cl| {
            !classes.iter().any(|other| {
                other.index < cl.index
                    && cl.table.contained_in_conjugate(&other.table).is_some()
            })
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{get_amalgam, parse_presentation};

    #[test]
    fn index_one_is_the_whole_group() {
        let p = parse_presentation("gens: x y\nrels: x^2, y^3").unwrap();
        let classes = low_index(&p, 1, Default::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].index, 1);
    }

    #[test]
    fn bound_enforced() {
        let p = parse_presentation("gens: x\nrels: x^2").unwrap();
        assert!(matches!(low_index(&p, 65, Default::default()), Err(SearchError::IndexBound(65))));
    }

    #[test]
    fn index_two_subgroups_of_s4_row_completion() {
        // the abelianization is C2 x C2 (x, y, s die; t and a survive),
        // so there are exactly three index-2 subgroups, all normal
        let spec = get_amalgam("S4").unwrap();
        let classes = low_index(&spec.presentation, 2, Default::default()).unwrap();
        assert_eq!(classes.len(), 3);
        for cl in &classes {
            for w in &cl.schreier_gens {
                assert!(cl.table.action_of(w).is_identity());
            }
        }
    }

    #[test]
    fn s4_vertex_stabilizer_subgroups_up_to_index_six() {
        // Sym(4): 11 conjugacy classes of subgroups in total, all of index
        // at most 24; index <= 6 keeps orders >= 4: three classes of order
        // 4, S3, D4, A4, S4 itself
        let spec = get_amalgam("S4").unwrap();
        let classes = low_index(
            &spec.l_pres.pres,
            6,
            LowIndexOptions { exact: false, ..Default::default() },
        )
        .unwrap();
        assert_eq!(classes.len(), 7);
        let mut indices: Vec<usize> = classes.iter().map(|c| c.index).collect();
        indices.sort_unstable();
        assert_eq!(indices, vec![1, 2, 3, 4, 6, 6, 6]);
    }

    #[test]
    fn classes_pairwise_nonconjugate_and_valid() {
        let spec = get_amalgam("S4").unwrap();
        let classes = low_index(&spec.presentation, 6, Default::default()).unwrap();
        assert!(!classes.is_empty());
        for cl in &classes {
            cl.table.validate().unwrap();
        }
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                assert!(classes[i].table.conjugate_test(&classes[j].table).is_none());
            }
        }
    }

    #[test]
    fn representatives_are_canonical_in_their_class() {
        // the returned table is minimal among all rebased standardizations
        let spec = get_amalgam("S4").unwrap();
        let classes = low_index(&spec.presentation, 6, Default::default()).unwrap();
        for cl in &classes {
            for w in 0..cl.table.n() as u32 {
                assert!(
                    cl.table.standardize_from(w).raw() >= cl.table.raw(),
                    "rebase at {w} beats the representative"
                );
            }
        }
    }

    #[test]
    fn different_index_tables_are_not_conjugate() {
        let spec = get_amalgam("S3xS4").unwrap();
        let p = &spec.presentation;
        let w = |s: &str| p.parse_word(s).unwrap();
        let t36 =
            CosetTable::enumerate(p, &[w("xy"), w("sr"), w("a"), w("a^x")], 100_000).unwrap();
        let t18 =
            CosetTable::enumerate(p, &[w("xy"), w("a"), w("a^x"), w("s"), w("r")], 100_000)
                .unwrap();
        assert_eq!((t36.n(), t18.n()), (36, 18));
        assert!(t36.conjugate_test(&t18).is_none(), "different index: not conjugate");
        assert!(t36.contains_in(&t18), "but the former lies in the latter");
    }

    #[test]
    fn s4_row_lr_filter_leaves_unique_class() {
        let am = Amalgam::from_registry("S4", 2_000_000).unwrap();
        let spec = am.spec().unwrap();
        let classes = low_index(&spec.presentation, 6, Default::default()).unwrap();
        let lr = filter_lr(&am, &classes);
        assert_eq!(lr.len(), 1, "unique LR class at index 6");
        // conjugate to the registry generators
        let printed =
            CosetTable::enumerate(&spec.presentation, spec.max_lr_words.as_ref().unwrap(), 100_000)
                .unwrap();
        assert!(lr[0].table.conjugate_test(&printed).is_some());
        // the whole-group class is filtered out
        let all = low_index(
            &spec.presentation,
            1,
            LowIndexOptions { exact: false, ..Default::default() },
        )
        .unwrap();
        assert!(filter_lr(&am, &all).is_empty());
    }

    #[test]
    fn threads_agree_with_sequential() {
        let spec = get_amalgam("S4").unwrap();
        let seq = low_index(&spec.presentation, 6, Default::default()).unwrap();
        let par = low_index(
            &spec.presentation,
            6,
            LowIndexOptions { threads: 4, ..Default::default() },
        )
        .unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(par.iter()) {
            assert_eq!(a.table.raw(), b.table.raw());
        }
    }

    #[test]
    fn maximal_members_cases() {
        let spec = get_amalgam("S4").unwrap();
        let classes = low_index(&spec.presentation, 6, Default::default()).unwrap();
        let lr = filter_lr(
            &Amalgam::from_registry("S4", 2_000_000).unwrap(),
            &classes,
        );
        assert_eq!(maximal_members(&lr).len(), 1, "singleton input survives");
    }

    #[test]
    fn node_cap_error() {
        let p = parse_presentation("gens: x y\nrels:").unwrap(); // free group: huge tree
        let err = low_index(
            &p,
            12,
            LowIndexOptions { node_cap: 50, ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(err, SearchError::NodeCap { cap: 50, .. }));
    }
}
