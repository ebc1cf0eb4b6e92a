//! Exhaustive subgroup enumeration for small groups.
//!
//! Subgroups are built by extension: starting from the trivial group, each
//! known subgroup is extended by each outside element and closed. That
//! reaches every subgroup, since a chain `<g1>, <g1,g2>, ...` passes
//! through subgroups only. Conjugacy deduplication uses the sorted
//! element-index fingerprint of each subgroup.

use super::{Perm, PermError, PermGroup};
use std::collections::{HashMap, HashSet};

/// A subgroup given by the sorted indices of its elements inside the parent
/// group's element list.
pub type SubgroupSet = Vec<u32>;

#[derive(Clone, Copy, Debug)]
pub struct SubgroupClassOptions {
    /// Hard cap on the number of distinct subgroups visited.
    pub subgroup_cap: usize,
}

impl Default for SubgroupClassOptions {
    fn default() -> Self {
        SubgroupClassOptions { subgroup_cap: 200_000 }
    }
}

struct Indexed {
    mult: Vec<u32>,
    inv: Vec<u32>,
    order: usize,
}

impl Indexed {
    fn build(g: &PermGroup) -> Indexed {
        let order = g.order();
        let index: HashMap<&Perm, u32> =
            g.elements().iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        let mut mult = vec![0u32; order * order];
        for (i, a) in g.elements().iter().enumerate() {
            for (j, b) in g.elements().iter().enumerate() {
                mult[i * order + j] = index[&a.mul(b)];
            }
        }
        let mut inv = vec![0u32; order];
        for (i, a) in g.elements().iter().enumerate() {
            inv[i] = index[&a.inverse()];
        }
        Indexed { mult, inv, order }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mult[a as usize * self.order + b as usize]
    }

    fn close(&self, seed: &[u32]) -> SubgroupSet {
        let mut set: HashSet<u32> = HashSet::from([0]);
        let mut stack: Vec<u32> = vec![0];
        let mut gens: Vec<u32> = seed.to_vec();
        for &g in seed {
            gens.push(self.inv[g as usize]);
        }
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    stack.push(y);
                }
            }
        }
        let mut out: Vec<u32> = set.into_iter().collect();
        out.sort_unstable();
        out
    }

    fn conjugate_set(&self, set: &[u32], g: u32) -> SubgroupSet {
        let gi = self.inv[g as usize];
        let mut out: Vec<u32> =
            set.iter().map(|&x| self.mul(self.mul(gi, x), g)).collect();
        out.sort_unstable();
        out
    }
}

impl PermGroup {
    /// Every subgroup of the group, as sorted element-index sets, in
    /// deterministic (order, lexicographic) order.
    pub fn all_subgroups(&self, opts: SubgroupClassOptions) -> Result<Vec<SubgroupSet>, PermError> {
        let idx = Indexed::build(self);
        let mut known: HashSet<SubgroupSet> = HashSet::new();
        let trivial: SubgroupSet = vec![0];
        known.insert(trivial.clone());
        let mut frontier = vec![trivial];
        while let Some(h) = frontier.pop() {
            for g in 1..self.order() as u32 {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let mut seed = h.clone();
                seed.push(g);
                let k = idx.close(&seed);
                if known.insert(k.clone()) {
                    if known.len() > opts.subgroup_cap {
                        return Err(PermError::CapExceeded(opts.subgroup_cap));
                    }
                    frontier.push(k);
                }
            }
        }
        let mut out: Vec<SubgroupSet> = known.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// One representative per conjugacy class of subgroups satisfying the
    /// predicate; exhaustive. The representative is the lexicographically
    /// smallest member of its class, and classes are listed in
    /// deterministic order.
    pub fn subgroup_classes(
        &self,
        opts: SubgroupClassOptions,
        mut predicate: impl FnMut(&PermGroup) -> bool,
    ) -> Result<Vec<PermGroup>, PermError> {
        let all = self.all_subgroups(opts)?;
        let idx = Indexed::build(self);
        let mut seen: HashSet<SubgroupSet> = HashSet::new();
        let mut reps = Vec::new();
        for h in &all {
            if seen.contains(h) {
                continue;
            }
            // the whole conjugacy class of h
            let mut class: Vec<SubgroupSet> = Vec::new();
            for g in 0..self.order() as u32 {
                let c = idx.conjugate_set(h, g);
                if !class.contains(&c) {
                    class.push(c);
                }
            }
            let rep = class.iter().min().unwrap().clone();
            for c in class {
                seen.insert(c);
            }
            let sub = self.subgroup_from_indices(&rep);
            if predicate(&sub) {
                reps.push(sub);
            }
        }
        Ok(reps)
    }

    /// Materializes a subgroup from element indices.
    pub fn subgroup_from_indices(&self, set: &[u32]) -> PermGroup {
        let elements: Vec<Perm> =
            set.iter().map(|&i| self.elements()[i as usize].clone()).collect();
        PermGroup::from_elements(self.degree(), elements.clone(), elements)
    }

    /// Whether two subgroups (given as element-index sets) are conjugate in
    /// this group.
    pub fn sets_conjugate(&self, a: &[u32], b: &[u32]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let idx = Indexed::build(self);
        (0..self.order() as u32).any(|g| idx.conjugate_set(a, g) == b)
    }
}
