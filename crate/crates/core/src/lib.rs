//! Exact combinatorics for facet-magic labelings of small regular polytopes.
//!
//! The pipeline for the 24-cell runs bottom-up:
//!
//! 1. [`incidence`] builds the vertex/cell incidence from exact coordinates.
//! 2. [`labelings`] enumerates the 0/1 labelings whose cell sums are all odd
//!    and builds the three-16-cell ternary labeling.
//! 3. [`construct`] superimposes three balanced binary labelings with the
//!    ternary one and reads the digit tuples in a mixed radix.
//! 4. [`symmetry`] generates the order-1152 group and counts orbits.
//!
//! [`solver`] is an independent backtracking search that works on any
//! [`IncidenceStructure`].

pub mod combinatorics;
pub mod construct;
mod error;
pub mod gf2;
pub mod half;
pub mod incidence;
pub mod labelings;
pub mod solver;
pub mod symmetry;

pub use construct::{
    compose, compose_permuted, construct_all, construct_from, enumerate_triples, summarize, superimpose, Construction,
    ConstructionSummary, DigitMap, MagicLabeling, Provenance, WeightScheme,
};
pub use error::{Error, Result};
pub use half::Half;
pub use incidence::{
    antipode_map, build_24cell, build_cube, build_tesseract, magic_sum, triangles, verify_labeling, Cell,
    IncidenceStructure, LabelingReport, Vertex,
};
pub use labelings::{
    complement, enumerate_parity_binary, parity_solutions_gf2, permute_trits, ternary_16cell, BinaryLabeling,
    ParityClassification, TernaryLabeling, TritPerm,
};
pub use solver::{orbit_report, solve, Checkpoint, SearchConfig, SearchOutcome};
pub use symmetry::{
    automorphisms, canonical_form, count_orbits, group_closure, symmetry_24cell, OrbitCount, Permutation, SymmetryGroup,
};
