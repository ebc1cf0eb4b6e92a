//! The Todd–Coxeter machine: HLT-style relator scanning with a coincidence
//! queue, plus a Felsch-style deduction strategy behind a flag.
//!
//! Coincidences are resolved with the smallest-index survivor, and dead
//! cosets are compacted out before the table is returned, so identical
//! inputs produce bit-identical tables.

use super::CosetTable;
use crate::presentation::{Presentation, Word};
use std::collections::VecDeque;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EnumError {
    /// More cosets were needed than the cap allows. This signals a possibly
    /// infinite index; retry with a larger bound to tell "infinite" from
    /// "needs more memory".
    #[error("coset enumeration exceeded {max_cosets} cosets")]
    ResourceExceeded { max_cosets: usize },
}

/// Enumeration strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Relator-based scanning (scan and fill), row by row.
    #[default]
    Hlt,
    /// Definition-by-first-gap with full deduction processing.
    Felsch,
}

const UNDEF: u32 = u32::MAX;

struct Machine {
    width: usize,
    tab: Vec<u32>,
    p: Vec<u32>,
    dead_queue: VecDeque<u32>,
    defined: usize,
    cap: usize,
    /// Entries set since the last drain; used by the Felsch strategy.
    deductions: Vec<(u32, usize)>,
    track_deductions: bool,
}

impl Machine {
    fn new(width: usize, cap: usize) -> Machine {
        let mut m = Machine {
            width,
            tab: Vec::new(),
            p: Vec::new(),
            dead_queue: VecDeque::new(),
            defined: 0,
            cap,
            deductions: Vec::new(),
            track_deductions: false,
        };
        m.new_coset();
        m
    }

    fn rows(&self) -> usize {
        self.p.len()
    }

    fn new_coset(&mut self) -> u32 {
        let c = self.p.len() as u32;
        self.p.push(c);
        self.tab.extend(std::iter::repeat_n(UNDEF, self.width));
        self.defined += 1;
        c
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.tab[c as usize * self.width + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, v: u32) {
        self.tab[c as usize * self.width + col] = v;
    }

    /// Sets both directions of an edge and records the deduction.
    fn set_edge(&mut self, a: u32, col: usize, b: u32) {
        self.set(a, col, b);
        self.set(b, col ^ 1, a);
        if self.track_deductions {
            self.deductions.push((a, col));
            self.deductions.push((b, col ^ 1));
        }
    }

    #[inline]
    fn live(&self, c: u32) -> bool {
        self.p[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.p[r as usize] != r {
            r = self.p[r as usize];
        }
        let mut x = c;
        while self.p[x as usize] != r {
            let nxt = self.p[x as usize];
            self.p[x as usize] = r;
            x = nxt;
        }
        r
    }

    fn define(&mut self, c: u32, col: usize) -> Result<u32, EnumError> {
        if self.defined >= self.cap {
            return Err(EnumError::ResourceExceeded { max_cosets: self.cap });
        }
        let d = self.new_coset();
        self.set_edge(c, col, d);
        Ok(d)
    }

    /// Queues the merge of two coset classes; the smaller index survives.
    fn merge(&mut self, a: u32, b: u32) {
        let (mut x, mut y) = (self.rep(a), self.rep(b));
        if x != y {
            if x > y {
                std::mem::swap(&mut x, &mut y);
            }
            self.p[y as usize] = x;
            self.dead_queue.push_back(y);
        }
    }

    /// Processes a coincidence between two cosets, transplanting the rows
    /// of dead cosets onto their survivors.
    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(g) = self.dead_queue.pop_front() {
            for col in 0..self.width {
                let d = self.get(g, col);
                if d == UNDEF {
                    continue;
                }
                // drop the back reference into g
                self.set(d, col ^ 1, UNDEF);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let e = self.get(mu, col);
                if e != UNDEF {
                    self.merge(nu, e);
                } else {
                    let e2 = self.get(nu, col ^ 1);
                    if e2 != UNDEF {
                        self.merge(mu, e2);
                    } else {
                        self.set_edge(mu, col, nu);
                    }
                }
            }
        }
    }

    /// Scans `cols` from `start` both ways, filling gaps with new cosets.
    fn scan_and_fill(&mut self, start: u32, cols: &[usize]) -> Result<(), EnumError> {
        let mut f = start;
        let mut i = 0usize;
        let mut b = start;
        let mut j = cols.len();
        loop {
            while i < j {
                let d = self.get(f, cols[i]);
                if d == UNDEF {
                    break;
                }
                f = d;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
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
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            } else if j == i + 1 {
                self.set_edge(f, cols[i], b);
                return Ok(());
            } else {
                self.define(f, cols[i])?;
            }
        }
    }

    /// Scan without filling: completes forced deductions and coincidences
    /// but never creates cosets.
    fn scan(&mut self, start: u32, cols: &[usize]) {
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
            if f != b {
                self.coincidence(f, b);
            }
            return;
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
            if f != b {
                self.coincidence(f, b);
            }
        } else if j == i + 1 {
            self.set_edge(f, cols[i], b);
        }
    }

    /// Renumbers live cosets in increasing order into a dense table.
    fn compact(&mut self) -> (usize, Vec<u32>) {
        let mut map = vec![UNDEF; self.rows()];
        let mut n = 0u32;
        for c in 0..self.rows() as u32 {
            if self.live(c) {
                map[c as usize] = n;
                n += 1;
            }
        }
        let mut out = vec![UNDEF; n as usize * self.width];
        for c in 0..self.rows() as u32 {
            if !self.live(c) {
                continue;
            }
            for col in 0..self.width {
                let d = self.get(c, col);
                debug_assert_ne!(d, UNDEF, "complete table expected");
                debug_assert_ne!(map[d as usize], UNDEF, "live rows point to live cosets");
                out[map[c as usize] as usize * self.width + col] = map[d as usize];
            }
        }
        (n as usize, out)
    }
}

fn relator_cols(pres: &Presentation) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for r in pres.relators() {
        let cyc = r.cyclically_reduced();
        if cyc.is_empty() {
            continue;
        }
        let cols: Vec<usize> = cyc.letters().iter().map(|l| l.col()).collect();
        if !out.contains(&cols) {
            out.push(cols);
        }
    }
    // short relators propagate fastest
    out.sort_by_key(|c| c.len());
    out
}

pub fn run(
    pres: &Presentation,
    subgens: &[Word],
    max_cosets: usize,
    strategy: Strategy,
) -> Result<CosetTable, EnumError> {
    let rels = relator_cols(pres);
    let sub_cols: Vec<Vec<usize>> = subgens
        .iter()
        .map(|w| w.letters().iter().map(|l| l.col()).collect())
        .filter(|c: &Vec<usize>| !c.is_empty())
        .collect();

    let mut m = Machine::new(pres.width(), max_cosets);
    match strategy {
        Strategy::Hlt => run_hlt(&mut m, &rels, &sub_cols)?,
        Strategy::Felsch => run_felsch(&mut m, &rels, &sub_cols)?,
    }

    let (n, tab) = m.compact();
    Ok(CosetTable::from_parts(
        Arc::new(pres.clone()),
        subgens.to_vec(),
        n,
        tab,
    ))
}

fn run_hlt(m: &mut Machine, rels: &[Vec<usize>], subs: &[Vec<usize>]) -> Result<(), EnumError> {
    for s in subs {
        m.scan_and_fill(0, s)?;
    }
    let mut alpha: u32 = 0;
    while (alpha as usize) < m.rows() {
        if m.live(alpha) {
            for r in rels {
                m.scan_and_fill(alpha, r)?;
                if !m.live(alpha) {
                    break;
                }
            }
            if m.live(alpha) {
                for col in 0..m.width {
                    if m.get(alpha, col) == UNDEF {
                        m.define(alpha, col)?;
                    }
                }
            }
        }
        alpha += 1;
    }
    Ok(())
}

fn run_felsch(m: &mut Machine, rels: &[Vec<usize>], subs: &[Vec<usize>]) -> Result<(), EnumError> {
    // rotations of each relator, grouped by leading column
    let mut by_col: Vec<Vec<Vec<usize>>> = vec![Vec::new(); m.width];
    for r in rels {
        for start in 0..r.len() {
            let rot: Vec<usize> =
                r[start..].iter().chain(r[..start].iter()).copied().collect();
            let lead = rot[0];
            if !by_col[lead].contains(&rot) {
                by_col[lead].push(rot);
            }
        }
    }

    m.track_deductions = true;
    for s in subs {
        m.scan_and_fill(0, s)?;
    }
    drain_deductions(m, &by_col);

    let mut watermark = 0usize;
    loop {
        // first undefined entry in scan order among live cosets
        let mut found = None;
        let mut pos = watermark;
        while pos < m.rows() * m.width {
            let (c, col) = ((pos / m.width) as u32, pos % m.width);
            if m.live(c) && m.get(c, col) == UNDEF {
                found = Some((c, col));
                break;
            }
            pos += 1;
        }
        match found {
            None => return Ok(()),
            Some((c, col)) => {
                watermark = pos;
                m.define(c, col)?;
                let before = m.rows();
                drain_deductions(m, &by_col);
                // coincidences can undefine earlier entries
                if m.rows() == before && m.dead_queue.is_empty() && m.p.iter().enumerate().all(|(i, &v)| v == i as u32) {
                    // no coincidence happened; watermark stays valid
                } else {
                    watermark = 0;
                }
            }
        }
    }
}

fn drain_deductions(m: &mut Machine, by_col: &[Vec<Vec<usize>>]) {
    while let Some((c, col)) = m.deductions.pop() {
        if !m.live(c) {
            continue;
        }
        for rot in &by_col[col] {
            m.scan(c, rot);
            if !m.live(c) {
                break;
            }
        }
    }
}
