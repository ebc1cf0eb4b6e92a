//! Finite completions of the built-in amalgams: quotient the completion
//! presentation by extra relators, check that the kernel misses the
//! stabilizers, and build the coset graph the quotient acts on.

use super::{Graph, GraphError};
use crate::amalgam::Amalgam;
use crate::cosetenum::{CosetTable, EnumError};
use crate::permgroup::Perm;
use crate::presentation::{Presentation, Word};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompletionError {
    #[error("quotient did not close within {0} cosets")]
    Unbounded(usize),
    #[error("quotient order {order} outside the accepted range {min}..={max}")]
    OrderOutOfRange { order: usize, min: usize, max: usize },
    #[error("kernel meets {part}: |image| = {have}, expected {want}")]
    KernelMeets { part: &'static str, have: usize, want: usize },
    #[error("quotient does not act faithfully on the vertex cosets")]
    Unfaithful,
    #[error("coset graph is degenerate: {0}")]
    Degenerate(GraphError),
    #[error("no completion found within the search bounds")]
    NotFound,
    #[error(transparent)]
    Enum(#[from] EnumError),
}

/// A finite quotient of a built-in amalgam completion in which the
/// stabilizers survive with their full orders.
#[derive(Debug, Clone)]
pub struct FiniteCompletion {
    pub amalgam: String,
    pub extra_relators: Vec<Word>,
    pub order: usize,
    /// Quotient presentation (base relators plus the extra ones).
    pub presentation: Presentation,
    /// Action on the cosets of the vertex stabilizer image.
    pub vertex_table: CosetTable,
    /// Action on the cosets of the arc stabilizer image.
    pub arc_table: CosetTable,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletionJson {
    pub amalgam: String,
    pub extra_relators: Vec<String>,
    pub order: usize,
    pub vertices: usize,
}

impl FiniteCompletion {
    pub fn to_json(&self) -> CompletionJson {
        CompletionJson {
            amalgam: self.amalgam.clone(),
            extra_relators: self
                .extra_relators
                .iter()
                .map(|w| self.presentation.word_string(w))
                .collect(),
            order: self.order,
            vertices: self.vertex_table.n(),
        }
    }
}

/// Builds and checks the finite completion defined by adjoining
/// `extra` relators to the amalgam's completion presentation.
pub fn completion_from_relators(
    am: &Amalgam,
    extra: &[Word],
    max_cosets: usize,
) -> Result<FiniteCompletion, CompletionError> {
    let base = am.presentation();
    let mut relators: Vec<Word> = base.relators().to_vec();
    for w in extra {
        relators.push(w.clone());
    }
    let pres = Presentation::new(base.generators().to_vec(), relators)
        .expect("extending a valid presentation");

    let regular = CosetTable::enumerate(&pres, &[], max_cosets)
        .map_err(|_| CompletionError::Unbounded(max_cosets))?;
    let order = regular.n();

    let l_words: Vec<Word> = am.input().l_gens.iter().map(|&g| Word::gen(g)).collect();
    let b_words: Vec<Word> = am.input().b_gens.iter().map(|&g| Word::gen(g)).collect();
    let r_words: Vec<Word> = am.input().r_gens.iter().map(|&g| Word::gen(g)).collect();

    let vertex_table = CosetTable::enumerate(&pres, &l_words, max_cosets)?.standardize();
    let arc_table = CosetTable::enumerate(&pres, &b_words, max_cosets)?.standardize();
    let edge_table = CosetTable::enumerate(&pres, &r_words, max_cosets)?;

    // kernel misses L (hence B) and R exactly when the image orders match
    let l_image = order / vertex_table.n();
    if l_image != am.l().order() {
        return Err(CompletionError::KernelMeets {
            part: "L",
            have: l_image,
            want: am.l().order(),
        });
    }
    let r_image = order / edge_table.n();
    if r_image != am.r().order() {
        return Err(CompletionError::KernelMeets {
            part: "R",
            have: r_image,
            want: am.r().order(),
        });
    }
    let b_image = order / arc_table.n();
    if b_image != am.b().order() {
        return Err(CompletionError::KernelMeets {
            part: "B",
            have: b_image,
            want: am.b().order(),
        });
    }

    // faithfulness of the vertex action: only the identity fixes every coset
    let cayley = crate::permgroup::CayleyGroup::from_regular_table(regular);
    let faithful = (1..cayley.order() as u32).all(|x| {
        let w = cayley.word_of(x);
        (0..vertex_table.n() as u32).any(|c| vertex_table.trace(c, w) != c)
    });
    if !faithful {
        return Err(CompletionError::Unfaithful);
    }

    Ok(FiniteCompletion {
        amalgam: am.spec().map(|s| s.name.to_string()).unwrap_or_default(),
        extra_relators: extra.to_vec(),
        order,
        presentation: pres,
        vertex_table,
        arc_table,
    })
}

/// Builds the coset graph of a finite completion: vertices are the cosets
/// of the vertex stabilizer, and an arc coset `Bx` joins the vertex `Lx`
/// to the vertex of `Lax`. Returns the graph together with the action of
/// each presentation generator on the vertices.
pub fn build_coset_graph(fc: &FiniteCompletion) -> Result<(Graph, Vec<Perm>), CompletionError> {
    let n = fc.vertex_table.n();
    let arc_trans = fc.arc_table.transversal();
    let arc_rev = crate::presentation::get_amalgam(&fc.amalgam)
        .map(|s| s.arc_reversal)
        .unwrap_or(fc.presentation.gen_count() - 1);
    let a = Word::gen(arc_rev);

    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for omega in 0..fc.arc_table.n() as u32 {
        let u = &arc_trans[omega as usize];
        let ini = fc.vertex_table.trace(0, u);
        let rev_start = fc.arc_table.trace(0, &a);
        let rev = fc.arc_table.trace(rev_start, u);
        let ter = fc.vertex_table.trace(0, &arc_trans[rev as usize]);
        if !adj[ini as usize].contains(&ter) {
            adj[ini as usize].push(ter);
        }
    }
    let graph = Graph::new(adj).map_err(CompletionError::Degenerate)?;
    let perms: Vec<Perm> = (0..fc.presentation.gen_count())
        .map(|g| fc.vertex_table.action_of(&Word::gen(g)))
        .collect();
    Ok((graph, perms))
}

#[derive(Debug, Clone, Copy)]
pub struct CompletionSearch {
    pub min_order: usize,
    pub max_order: usize,
    pub max_power: u32,
    /// Enumeration cap per attempt; attempts that exceed it are skipped.
    pub attempt_cosets: usize,
}

impl Default for CompletionSearch {
    fn default() -> Self {
        CompletionSearch {
            min_order: 24,
            max_order: 20_000,
            max_power: 12,
            attempt_cosets: 300_000,
        }
    }
}

/// Bounded deterministic search for a finite completion: adjoin one extra
/// relator `(g_i g_j)^k` over ordered pairs of distinct generators, powers
/// ascending, and accept the first quotient that passes all checks and
/// yields a valid tetravalent coset graph.
pub fn find_completion(
    am: &Amalgam,
    search: CompletionSearch,
) -> Result<FiniteCompletion, CompletionError> {
    let gen_count = am.presentation().gen_count();
    for k in 2..=search.max_power {
        for i in 0..gen_count {
            for j in 0..gen_count {
                if i == j {
                    continue;
                }
                let w = Word::gen(i).concat(&Word::gen(j)).pow(k as i32);
                let fc = match completion_from_relators(am, &[w], search.attempt_cosets) {
                    Ok(fc) => fc,
                    Err(_) => continue,
                };
                if fc.order < search.min_order || fc.order > search.max_order {
                    continue;
                }
                if build_coset_graph(&fc).is_ok() {
                    return Ok(fc);
                }
            }
        }
    }
    Err(CompletionError::NotFound)
}
