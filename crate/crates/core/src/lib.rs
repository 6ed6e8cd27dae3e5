//! Exact computation with finitely generated subgroups of free groups.
//!
//! Subgroups are represented by rooted, folded core graphs
//! ([`StallingsGraph`]). On top of folding the crate provides intersections,
//! prefix restrictions and rank profiles, echelon-form checks against an
//! ordered basis together with the 1-generator endomorphism pipeline that
//! rebuilds an echelon subgroup, and a small experimental lab for testing
//! inertia, compression and the Hanna Neumann bound on enumerated instances.

pub mod core_graph;
pub mod echelon;
pub mod endo;
pub mod error;
pub mod lab;
pub mod subgroup_ops;
pub mod words;

pub use core_graph::{degree_formula_checks, CanonicalCode, Edge, GraphJson, StallingsGraph};
pub use echelon::{
    build_via_pipeline, change_coordinates, echelon_certificate, is_echelon_wrt,
    EchelonCertificate, Lemma1Pipeline, OrderedBasis,
};
pub use endo::{verify_fix_structure, Endomorphism, FixCertificate, OneGenEndo};
pub use error::{Error, Result};
pub use lab::{
    brute_force_members, enumerate_cores, for_each_core, hn_bound_scan, rank_chain_check,
    test_compressed, test_compressed_with, test_inert, CompressionMethod, CompressionOptions,
    CompressionReport, EnumBudget, EnumMode, HnReport, InertiaReport,
};
pub use subgroup_ops::{
    conjugate, intersect, is_basis, join, rank_profile, restrict_to_prefix, RankProfile,
};
pub use words::{free_reduce, parse_word_list, Alphabet, Letter, Word};
