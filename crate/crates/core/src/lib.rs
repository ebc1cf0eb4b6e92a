//! Exact computation with rank-2 group amalgams and LR-structures on
//! tetravalent graphs.
//!
//! The crate is organised around a small number of exact combinatorial
//! engines:
//!
//! * [`presentation`] — words, finitely presented groups, a text format, and
//!   the registry of the six built-in index-(4,2) amalgams with `Sym(4)`
//!   local action;
//! * [`cosetenum`] — Todd–Coxeter coset enumeration and operations on
//!   complete coset tables (actions, orbits, standardization, conjugacy);
//! * [`permgroup`] — concrete finite permutation groups at desk scale,
//!   plus coset-table-backed finite group arithmetic for larger orders;
//! * [`amalgam`] — finite realizations of (L, B, R) triples, the local
//!   action map, and validation of the amalgam conditions;
//! * [`lowindex`] — exhaustive low-index subgroup search up to conjugacy;
//! * [`lranalysis`] — the end-to-end LR-subgroup classification pipeline
//!   over the built-in amalgams;
//! * [`cosetgraph`] — finite tetravalent graphs, automorphism search, and
//!   detection and classification of LR-decompositions.
//!
//! Everything is exact: all results are integers, words, tables or
//! permutations, and all algorithms are deterministic for fixed inputs.

pub mod amalgam;
pub mod cosetenum;
pub mod cosetgraph;
pub mod lowindex;
pub mod lranalysis;
pub mod permgroup;
pub mod presentation;
