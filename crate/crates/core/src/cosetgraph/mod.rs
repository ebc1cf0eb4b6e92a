//! Finite tetravalent graphs: construction from finite completions of
//! amalgams, automorphism search at desk scale, LR-group detection,
//! edge-decomposition extraction and exhaustive enumeration, and
//! self-duality testing.

mod completion;

pub use completion::{
    build_coset_graph, completion_from_relators, find_completion, CompletionError,
    CompletionSearch, FiniteCompletion,
};

use crate::permgroup::{Perm, PermGroup};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Desk-scale automorphism search bound.
pub const AUT_VERTEX_BOUND: usize = 512;
/// Exhaustive decomposition search bound.
pub const DECOMP_VERTEX_BOUND: usize = 64;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is not simple/symmetric: {0}")]
    Malformed(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {v} has degree {d}, expected 4")]
    NotTetravalent { v: u32, d: usize },
    #[error("vertex count {n} exceeds the bound of {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("automorphism count exceeded cap of {0}")]
    CapExceeded(usize),
    #[error("cycle product requires m, n >= 5 (got {m}, {n})")]
    ProductTooSmall { m: usize, n: usize },
    #[error("supplied permutation is not an automorphism")]
    NotAutomorphism,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A finite connected tetravalent simple graph with sorted adjacency
/// lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(mut adj: Vec<Vec<u32>>) -> Result<Graph, GraphError> {
        let n = adj.len();
        for (v, nb) in adj.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.len() != 4 {
                return Err(GraphError::NotTetravalent { v: v as u32, d: nb.len() });
            }
            for w in nb.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::Malformed(format!("repeated edge at vertex {v}")));
                }
            }
            if nb.iter().any(|&u| u as usize >= n) {
                return Err(GraphError::Malformed(format!("neighbor out of range at {v}")));
            }
            if nb.contains(&(v as u32)) {
                return Err(GraphError::Malformed(format!("loop at vertex {v}")));
            }
        }
        let g = Graph { adj };
        for v in 0..n as u32 {
            for &u in g.neighbors(v) {
                if !g.adj[u as usize].contains(&v) {
                    return Err(GraphError::Malformed(format!("edge {v}-{u} not symmetric")));
                }
            }
        }
        if g.bfs_order(0).len() != n {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.vertex_count() * 2);
        for v in 0..self.vertex_count() as u32 {
            for &u in self.neighbors(v) {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out
    }

    fn bfs_order(&self, start: u32) -> Vec<u32> {
        let mut seen = vec![false; self.vertex_count()];
        let mut order = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &u in self.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    order.push(u);
                }
            }
        }
        order
    }

    fn distances_from(&self, start: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[start as usize] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u as usize] == u32::MAX {
                    dist[u as usize] = dist[v as usize] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Text format: `n <count>` then one line `v: a b c d` per vertex,
    /// 0-based.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, first) = lines
            .next()
            .ok_or(GraphError::Parse { line: 1, message: "empty input".into() })?;
        let n: usize = first
            .trim()
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or(GraphError::Parse { line: ln + 1, message: "expected `n <count>`".into() })?;
        let mut adj = vec![Vec::new(); n];
        for (ln, line) in lines {
            let (v, rest) = line
                .split_once(':')
                .ok_or(GraphError::Parse { line: ln + 1, message: "expected `v: ...`".into() })?;
            let v: usize = v.trim().parse().map_err(|_| GraphError::Parse {
                line: ln + 1,
                message: "bad vertex id".into(),
            })?;
            if v >= n {
                return Err(GraphError::Parse { line: ln + 1, message: "vertex out of range".into() });
            }
            for tok in rest.split_whitespace() {
                let u: u32 = tok.parse().map_err(|_| GraphError::Parse {
                    line: ln + 1,
                    message: format!("bad neighbor `{tok}`"),
                })?;
                adj[v].push(u);
            }
        }
        Graph::new(adj)
    }

    pub fn format(&self) -> String {
        let mut out = format!("n {}\n", self.vertex_count());
        for v in 0..self.vertex_count() {
            out.push_str(&format!(
                "{v}: {}\n",
                self.adj[v].iter().map(|u| u.to_string()).collect::<Vec<_>>().join(" ")
            ));
        }
        out
    }
}

/// The Cartesian product of two cycles `C_m` and `C_n`: vertex `(i, j)` is
/// numbered `i + m*j`. Small cases are rejected; they carry extra
/// automorphisms that make them poor test instances.
pub fn product_graph(m: usize, n: usize) -> Result<Graph, GraphError> {
    if m < 5 || n < 5 {
        return Err(GraphError::ProductTooSmall { m, n });
    }
    let idx = |i: usize, j: usize| (i % m + m * (j % n)) as u32;
    let mut adj = vec![Vec::new(); m * n];
    for i in 0..m {
        for j in 0..n {
            adj[idx(i, j) as usize] = vec![
                idx(i + 1, j),
                idx(i + m - 1, j),
                idx(i, j + 1),
                idx(i, j + n - 1),
            ];
        }
    }
    Graph::new(adj)
}

/// Full automorphism group by backtracking over images in breadth-first
/// vertex order, pruned by all-pairs distance consistency.
pub fn automorphisms(g: &Graph, cap: usize) -> Result<PermGroup, GraphError> {
    let n = g.vertex_count();
    if n > AUT_VERTEX_BOUND {
        return Err(GraphError::TooLarge { n, bound: AUT_VERTEX_BOUND });
    }
    let dist: Vec<Vec<u32>> = (0..n as u32).map(|v| g.distances_from(v)).collect();
    let order = g.bfs_order(0);
    // bfs parent position: some earlier vertex adjacent to order[i]
    let pos_of: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let parent: Vec<usize> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == 0 {
                0
            } else {
                g.neighbors(v).iter().map(|&u| pos_of[&u]).filter(|&p| p < i).min().unwrap()
            }
        })
        .collect();

    let mut img = vec![u32::MAX; n];
    let mut used = vec![false; n];
    let mut found: Vec<Perm> = Vec::new();

    struct Ctx<'a> {
        g: &'a Graph,
        dist: &'a [Vec<u32>],
        order: &'a [u32],
        parent: &'a [usize],
        cap: usize,
    }

    fn rec(
        ctx: &Ctx,
        i: usize,
        img: &mut [u32],
        used: &mut [bool],
        found: &mut Vec<Perm>,
    ) -> Result<(), GraphError> {
        let n = ctx.order.len();
        if i == n {
            if found.len() >= ctx.cap {
                return Err(GraphError::CapExceeded(ctx.cap));
            }
            found.push(Perm::from_images(img.to_vec()).expect("bijection"));
            return Ok(());
        }
        let v = ctx.order[i];
        let candidates: Vec<u32> = if i == 0 {
            (0..n as u32).collect()
        } else {
            ctx.g.neighbors(img[ctx.order[ctx.parent[i]] as usize]).to_vec()
        };
        'next: for w in candidates {
            if used[w as usize] {
                continue;
            }
            for &u in &ctx.order[..i] {
                if ctx.dist[v as usize][u as usize] != ctx.dist[w as usize][img[u as usize] as usize]
                {
                    continue 'next;
                }
            }
            img[v as usize] = w;
            used[w as usize] = true;
            rec(ctx, i + 1, img, used, found)?;
            used[w as usize] = false;
            img[v as usize] = u32::MAX;
        }
        Ok(())
    }

    let ctx = Ctx { g, dist: &dist, order: &order, parent: &parent, cap };
    rec(&ctx, 0, &mut img, &mut used, &mut found)?;
    found.sort_unstable();
    Ok(PermGroup::from_elements(n, found.clone(), found))
}

/// An edge partition into two cycle classes; cycles are closed vertex
/// sequences starting at their smallest vertex, heading to the smaller
/// neighbor. The class containing the lexicographically smallest edge is
/// `left`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleDecomposition {
    pub left: Vec<Vec<u32>>,
    pub right: Vec<Vec<u32>>,
}

impl CycleDecomposition {
    /// Builds the decomposition from the edge set of the `left` class; the
    /// complement is `right`. Both classes must be spanning 2-regular.
    pub fn from_left_edges(g: &Graph, left_edges: &[(u32, u32)]) -> Option<CycleDecomposition> {
        let eset: std::collections::HashSet<(u32, u32)> = left_edges.iter().copied().collect();
        let in_left = |u: u32, v: u32| {
            eset.contains(&(u.min(v), u.max(v)))
        };
        let n = g.vertex_count();
        for v in 0..n as u32 {
            let cnt = g.neighbors(v).iter().filter(|&&u| in_left(v, u)).count();
            if cnt != 2 {
                return None;
            }
        }
        let extract = |keep: &dyn Fn(u32, u32) -> bool| -> Vec<Vec<u32>> {
            let mut seen = vec![false; n];
            let mut cycles = Vec::new();
            for start in 0..n as u32 {
                if seen[start as usize] {
                    continue;
                }
                // walk the 2-regular subgraph from the smallest unvisited
                // vertex toward its smaller neighbor
                let mut cycle = vec![start];
                seen[start as usize] = true;
                let mut prev = start;
                let mut cur = *g
                    .neighbors(start)
                    .iter()
                    .filter(|&&u| keep(start, u))
                    .min()
                    .expect("2-regular class");
                while cur != start {
                    seen[cur as usize] = true;
                    cycle.push(cur);
                    let next = *g
                        .neighbors(cur)
                        .iter()
                        .find(|&&u| keep(cur, u) && u != prev)
                        .expect("2-regular class");
                    prev = cur;
                    cur = next;
                }
                cycles.push(cycle);
            }
            cycles
        };
        let left = extract(&|u, v| in_left(u, v));
        let right = extract(&|u, v| g.has_edge(u, v) && !in_left(u, v));
        Some(CycleDecomposition { left, right })
    }

    pub fn left_edge_set(&self) -> Vec<(u32, u32)> {
        Self::cycle_edges(&self.left)
    }

    pub fn right_edge_set(&self) -> Vec<(u32, u32)> {
        Self::cycle_edges(&self.right)
    }

    fn cycle_edges(cycles: &[Vec<u32>]) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for c in cycles {
            for i in 0..c.len() {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                out.push((a.min(b), a.max(b)));
            }
        }
        out.sort_unstable();
        out
    }

    /// The unordered cycle partition, as a sorted list of sorted edge
    /// sets; the canonical key for comparing decompositions.
    pub fn cycle_partition(&self) -> Vec<Vec<(u32, u32)>> {
        let mut cells: Vec<Vec<(u32, u32)>> = self
            .left
            .iter()
            .chain(self.right.iter())
            .map(|c| {
                let mut es: Vec<(u32, u32)> = (0..c.len())
                    .map(|i| {
                        let (a, b) = (c[i], c[(i + 1) % c.len()]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                es.sort_unstable();
                es
            })
            .collect();
        cells.sort();
        cells
    }

    /// Cycle through `v` in the left (respectively right) class.
    fn cycle_through(cycles: &[Vec<u32>], v: u32) -> &Vec<u32> {
        cycles.iter().find(|c| c.contains(&v)).expect("vertex on one cycle per class")
    }

    /// Checks the partition shape: all edges covered exactly once, every
    /// vertex on exactly one cycle of each class.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut all: Vec<(u32, u32)> = self.left_edge_set();
        all.extend(self.right_edge_set());
        all.sort_unstable();
        let mut edges = g.edges();
        edges.sort_unstable();
        if all != edges {
            return false;
        }
        for v in 0..g.vertex_count() as u32 {
            if self.left.iter().filter(|c| c.contains(&v)).count() != 1
                || self.right.iter().filter(|c| c.contains(&v)).count() != 1
            {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LRVerdict {
    pub is_lr_group: bool,
    pub vertex_transitive: bool,
    pub edge_orbits: usize,
    pub arc_orbits: usize,
    pub local_action: String,
    pub group_order: usize,
    pub decomposition: Option<CycleDecomposition>,
    /// Present when the full automorphism group was computed: a
    /// label-swapping automorphism, if any.
    pub self_dual: Option<SelfDualWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfDualWitness {
    pub self_dual: bool,
    pub witness: Option<Perm>,
}

fn edge_orbit_sets(g: &Graph, group: &PermGroup) -> Vec<Vec<(u32, u32)>> {
    let edges = g.edges();
    let index: HashMap<(u32, u32), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut uf: Vec<usize> = (0..edges.len()).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut c = x;
        while uf[c] != r {
            let nxt = uf[c];
            uf[c] = r;
            c = nxt;
        }
        r
    }
    for p in group.generators() {
        for (i, &(u, v)) in edges.iter().enumerate() {
            let (a, b) = (p.apply(u), p.apply(v));
            let j = index[&(a.min(b), a.max(b))];
            let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
            if ri != rj {
                let (lo, hi) = (ri.min(rj), ri.max(rj));
                uf[hi] = lo;
            }
        }
    }
    let mut cells: HashMap<usize, Vec<(u32, u32)>> = HashMap::new();
    for (i, &e) in edges.iter().enumerate() {
        cells.entry(find(&mut uf, i)).or_default().push(e);
    }
    let mut out: Vec<Vec<(u32, u32)>> = cells.into_values().collect();
    out.sort();
    out
}

fn arc_orbit_count(g: &Graph, group: &PermGroup) -> usize {
    let mut arcs: Vec<(u32, u32)> = Vec::new();
    for v in 0..g.vertex_count() as u32 {
        for &u in g.neighbors(v) {
            arcs.push((v, u));
        }
    }
    let index: HashMap<(u32, u32), usize> =
        arcs.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut uf: Vec<usize> = (0..arcs.len()).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut c = x;
        while uf[c] != r {
            let nxt = uf[c];
            uf[c] = r;
            c = nxt;
        }
        r
    }
    for p in group.generators() {
        for (i, &(u, v)) in arcs.iter().enumerate() {
            let j = index[&(p.apply(u), p.apply(v))];
            let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
            if ri != rj {
                uf[rj.max(ri)] = rj.min(ri);
            }
        }
    }
    let mut roots: Vec<usize> = (0..arcs.len()).map(|i| find(&mut uf, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn describe_local_action(local: &PermGroup) -> String {
    if local.is_intransitive_klein() {
        return "V4-intransitive".to_string();
    }
    match (local.order(), local.is_transitive()) {
        (24, true) => "Sym(4)".to_string(),
        (12, true) => "Alt(4)".to_string(),
        (8, true) => "D4".to_string(),
        (4, true) => {
            if local.elements().iter().any(|e| e.order() == 4) {
                "C4".to_string()
            } else {
                "V4-transitive".to_string()
            }
        }
        (o, t) => format!("order-{o}-{}", if t { "transitive" } else { "intransitive" }),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    pub closure_cap: usize,
    /// Compute the full automorphism group (for the self-duality field)
    /// when the graph is within the desk-scale bound.
    pub with_self_dual: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { closure_cap: 1 << 20, with_self_dual: true }
    }
}

/// Decides whether `<gens>` is an LR-group of automorphisms of `g`, and if
/// so extracts the unique edge decomposition it preserves.
pub fn detect_lr(g: &Graph, gens: &[Perm], opts: DetectOptions) -> Result<LRVerdict, GraphError> {
    for p in gens {
        if p.degree() != g.vertex_count() {
            return Err(GraphError::NotAutomorphism);
        }
        for (u, v) in g.edges() {
            if !g.has_edge(p.apply(u), p.apply(v)) {
                return Err(GraphError::NotAutomorphism);
            }
        }
    }
    let group = PermGroup::closure(g.vertex_count(), gens, opts.closure_cap)
        .map_err(|_| GraphError::CapExceeded(opts.closure_cap))?;
    let vertex_transitive = group.is_transitive();
    let edge_sets = edge_orbit_sets(g, &group);
    let arc_orbits = arc_orbit_count(g, &group);

    let stab = group.point_stabilizer(0);
    let local = stab.restrict_to(g.neighbors(0));
    let local_label = describe_local_action(&local);

    let mut is_lr = vertex_transitive && edge_sets.len() == 2 && local.is_intransitive_klein();
    let mut decomposition = None;
    if is_lr {
        // label convention: the class containing the smallest edge is left
        let left_edges = &edge_sets[0];
        match CycleDecomposition::from_left_edges(g, left_edges) {
            Some(d) => {
                // reflection witnesses at a representative vertex: an
                // element fixing one cycle through the vertex pointwise
                // while reflecting the other there; vertex-transitivity
                // carries them to every vertex
                let v = 0u32;
                let c_left = CycleDecomposition::cycle_through(&d.left, v).clone();
                let c_right = CycleDecomposition::cycle_through(&d.right, v).clone();
                let has_reflection = |on: &Vec<u32>, fixed: &Vec<u32>| {
                    let nbrs: Vec<u32> = on
                        .iter()
                        .copied()
                        .filter(|&u| g.has_edge(v, u))
                        .collect();
                    stab.elements().iter().any(|e| {
                        nbrs.len() == 2
                            && e.apply(nbrs[0]) == nbrs[1]
                            && fixed.iter().all(|&u| e.apply(u) == u)
                    })
                };
                is_lr = has_reflection(&c_left, &c_right) && has_reflection(&c_right, &c_left);
                if is_lr {
                    decomposition = Some(d);
                }
            }
            None => is_lr = false,
        }
    }

    let self_dual = match (&decomposition, opts.with_self_dual) {
        (Some(d), true) if g.vertex_count() <= AUT_VERTEX_BOUND => {
            let aut = automorphisms(g, 1 << 20)?;
            let witness = check_self_dual(g, d, &aut);
            Some(SelfDualWitness { self_dual: witness.is_some(), witness })
        }
        _ => None,
    };

    Ok(LRVerdict {
        is_lr_group: is_lr,
        vertex_transitive,
        edge_orbits: edge_sets.len(),
        arc_orbits,
        local_action: local_label,
        group_order: group.order(),
        decomposition,
        self_dual,
    })
}

/// Searches a computed automorphism group for an element swapping the two
/// cycle classes. Cycle-length multisets give a fast negative.
pub fn check_self_dual(g: &Graph, c: &CycleDecomposition, aut: &PermGroup) -> Option<Perm> {
    let mut llen: Vec<usize> = c.left.iter().map(|x| x.len()).collect();
    let mut rlen: Vec<usize> = c.right.iter().map(|x| x.len()).collect();
    llen.sort_unstable();
    rlen.sort_unstable();
    if llen != rlen {
        return None;
    }
    let left = c.left_edge_set();
    let right = c.right_edge_set();
    let _ = g;
    aut.elements()
        .iter()
        .find(|p| {
            let mut img: Vec<(u32, u32)> = left
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = (p.apply(u), p.apply(v));
                    (a.min(b), a.max(b))
                })
                .collect();
            img.sort_unstable();
            img == right
        })
        .cloned()
}

/// Is there a group `X` with `sub <= X <= aut` and `|X : sub| = 2`?
/// Equivalent to finding `a` outside `sub` normalizing it with `a^2`
/// inside.
pub fn index_two_overgroup(aut: &PermGroup, sub: &PermGroup) -> Option<Perm> {
    let set: std::collections::HashSet<&Perm> = sub.elements().iter().collect();
    aut.elements()
        .iter()
        .find(|a| {
            if set.contains(a) {
                return false;
            }
            let ai = a.inverse();
            set.contains(&a.mul(a))
                && sub.elements().iter().all(|x| set.contains(&ai.mul(x).mul(a)))
        })
        .cloned()
}

/// Exhaustively enumerates the LR-decompositions of `g`: 2-colorings of
/// the edges with both classes spanning 2-regular, kept when the
/// label-preserving stabilizer in the automorphism group is
/// vertex-transitive and realizes the local reflections at every vertex.
pub fn all_lr_decompositions(g: &Graph) -> Result<Vec<CycleDecomposition>, GraphError> {
    let n = g.vertex_count();
    if n > DECOMP_VERTEX_BOUND {
        return Err(GraphError::TooLarge { n, bound: DECOMP_VERTEX_BOUND });
    }
    let aut = automorphisms(g, 1 << 20)?;
    let edges = g.edges();
    let m = edges.len();
    let incident: Vec<Vec<usize>> = {
        let mut inc = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            inc[u as usize].push(i);
            inc[v as usize].push(i);
        }
        inc
    };

    // edge permutation of every automorphism, forward and inverse
    let edge_index: HashMap<(u32, u32), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let edge_perms: Vec<Vec<usize>> = aut
        .elements()
        .iter()
        .map(|p| {
            edges
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = (p.apply(u), p.apply(v));
                    edge_index[&(a.min(b), a.max(b))]
                })
                .collect()
        })
        .collect();
    let edge_perms_inv: Vec<Vec<usize>> = edge_perms
        .iter()
        .map(|p| {
            let mut inv = vec![0usize; m];
            for (i, &j) in p.iter().enumerate() {
                inv[j] = i;
            }
            inv
        })
        .collect();

    let mut st = ColorSearch {
        g,
        aut: &aut,
        edge_perms: &edge_perms,
        edge_perms_inv: &edge_perms_inv,
        edges: &edges,
        incident: &incident,
        color: vec![2; m],
        counts: vec![[0usize; 2]; n],
        // a label-preserving vertex-transitive group needs >= n elements,
        // so a partial coloring compatible with fewer automorphisms than
        // that can never extend to an LR-decomposition
        alive: vec![true; aut.order()],
        alive_count: aut.order(),
        min_alive: n,
        edge_trail: Vec::new(),
        aut_trail: Vec::new(),
        found: Vec::new(),
    };
    st.search();
    Ok(st.found)
}

struct ColorSearch<'a> {
    g: &'a Graph,
    aut: &'a PermGroup,
    edge_perms: &'a [Vec<usize>],
    edge_perms_inv: &'a [Vec<usize>],
    edges: &'a [(u32, u32)],
    incident: &'a [Vec<usize>],
    color: Vec<u8>, // 0, 1, or 2 = unset
    counts: Vec<[usize; 2]>,
    alive: Vec<bool>,
    alive_count: usize,
    min_alive: usize,
    edge_trail: Vec<usize>,
    aut_trail: Vec<usize>,
    found: Vec<CycleDecomposition>,
}

impl ColorSearch<'_> {
    /// Sets an edge color, propagating forced moves (a vertex with two
    /// edges of one color forces its remaining edges to the other) and
    /// killing automorphisms that no longer preserve the classes.
    fn assign(&mut self, e: usize, c: u8) -> bool {
        let mut queue = vec![(e, c)];
        while let Some((e, c)) = queue.pop() {
            match self.color[e] {
                x if x == c => continue,
                2 => {}
                _ => return false,
            }
            self.color[e] = c;
            self.edge_trail.push(e);
            let (u, v) = self.edges[e];
            self.counts[u as usize][c as usize] += 1;
            self.counts[v as usize][c as usize] += 1;
            for &w in &[u, v] {
                if self.counts[w as usize][c as usize] > 2 {
                    return false;
                }
                if self.counts[w as usize][c as usize] == 2 {
                    for &f in &self.incident[w as usize] {
                        if self.color[f] == 2 {
                            queue.push((f, 1 - c));
                        }
                    }
                }
            }
            for ai in 0..self.alive.len() {
                if !self.alive[ai] {
                    continue;
                }
                let img = self.edge_perms[ai][e];
                let pre = self.edge_perms_inv[ai][e];
                if (self.color[img] != 2 && self.color[img] != c)
                    || (self.color[pre] != 2 && self.color[pre] != c)
                {
                    self.alive[ai] = false;
                    self.alive_count -= 1;
                    self.aut_trail.push(ai);
                }
            }
            if self.alive_count < self.min_alive {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, edge_mark: usize, aut_mark: usize) {
        while self.edge_trail.len() > edge_mark {
            let e = self.edge_trail.pop().unwrap();
            let c = self.color[e];
            self.color[e] = 2;
            let (u, v) = self.edges[e];
            self.counts[u as usize][c as usize] -= 1;
            self.counts[v as usize][c as usize] -= 1;
        }
        while self.aut_trail.len() > aut_mark {
            let ai = self.aut_trail.pop().unwrap();
            self.alive[ai] = true;
            self.alive_count += 1;
        }
    }

    fn search(&mut self) {
        let Some(e) = self.color.iter().position(|&c| c == 2) else {
            let left: Vec<(u32, u32)> = self
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| self.color[*i] == 0)
                .map(|(_, &e)| e)
                .collect();
            if let Some(d) = CycleDecomposition::from_left_edges(self.g, &left) {
                if decomposition_is_lr(self.g, self.aut, self.edge_perms, self.edges, &self.color)
                {
                    self.found.push(d);
                }
            }
            return;
        };
        // the first edge is pinned to the left class: {left, right} is an
        // unordered pair, so this halves the search without loss
        let choices: &[u8] = if e == 0 { &[0] } else { &[0, 1] };
        for &c in choices {
            let edge_mark = self.edge_trail.len();
            let aut_mark = self.aut_trail.len();
            if self.assign(e, c) {
                self.search();
            }
            self.undo(edge_mark, aut_mark);
        }
    }
}

/// Definition check for a complete 2-coloring: the color-preserving
/// subgroup of the automorphism group must be vertex-transitive and supply
/// the two pointwise-fixing reflections at every vertex.
fn decomposition_is_lr(
    g: &Graph,
    aut: &PermGroup,
    edge_perms: &[Vec<usize>],
    edges: &[(u32, u32)],
    color: &[u8],
) -> bool {
    let n = g.vertex_count();
    // stabilizer of both color classes
    let keepers: Vec<usize> = (0..aut.order())
        .filter(|&ai| {
            edge_perms[ai].iter().enumerate().all(|(e, &img)| color[e] == color[img])
        })
        .collect();
    if keepers.len() < n {
        return false;
    }
    // vertex transitivity of the stabilizer
    {
        let mut reach = vec![false; n];
        let mut stack = vec![0u32];
        reach[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &ai in &keepers {
                let w = aut.elements()[ai].apply(v);
                if !reach[w as usize] {
                    reach[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count < n {
            return false;
        }
    }
    // reflection witnesses at every vertex
    let d = {
        let left: Vec<(u32, u32)> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| color[*i] == 0)
            .map(|(_, &e)| e)
            .collect();
        match CycleDecomposition::from_left_edges(g, &left) {
            Some(d) => d,
            None => return false,
        }
    };
    for v in 0..n as u32 {
        let c_left = CycleDecomposition::cycle_through(&d.left, v);
        let c_right = CycleDecomposition::cycle_through(&d.right, v);
        for (on, fixed) in [(c_left, c_right), (c_right, c_left)] {
            let nbrs: Vec<u32> = on.iter().copied().filter(|&u| g.has_edge(v, u)).collect();
            let ok = keepers.iter().any(|&ai| {
                let e = &aut.elements()[ai];
                e.apply(v) == v
                    && e.apply(nbrs[0]) == nbrs[1]
                    && fixed.iter().all(|&u| e.apply(u) == u)
            });
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Whether two decompositions lie in one orbit of the automorphism group
/// (compared as unordered cycle partitions).
pub fn decompositions_equivalent(
    d1: &CycleDecomposition,
    d2: &CycleDecomposition,
    aut: &PermGroup,
) -> bool {
    let target = d2.cycle_partition();
    aut.elements().iter().any(|p| {
        let mut cells: Vec<Vec<(u32, u32)>> = d1
            .cycle_partition()
            .iter()
            .map(|cell| {
                let mut es: Vec<(u32, u32)> = cell
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (p.apply(u), p.apply(v));
                        (a.min(b), a.max(b))
                    })
                    .collect();
                es.sort_unstable();
                es
            })
            .collect();
        cells.sort();
        cells == target
    })
}

/// The dihedral-product generators of a cycle product graph: rotations and
/// reflections of each factor.
pub fn product_dihedral_gens(m: usize, n: usize) -> Vec<Perm> {
    let idx = |i: usize, j: usize| (i % m + m * (j % n)) as u32;
    let build = |f: &dyn Fn(usize, usize) -> u32| -> Perm {
        let mut img = vec![0u32; m * n];
        for i in 0..m {
            for j in 0..n {
                img[idx(i, j) as usize] = f(i, j);
            }
        }
        Perm::from_images(img).expect("bijection")
    };
    vec![
        build(&|i, j| idx(i + 1, j)),
        build(&|i, j| idx(m - i, j)),
        build(&|i, j| idx(i, j + 1)),
        build(&|i, j| idx(i, n - j)),
    ]
}
