//! Exact invariants of plumbed 3-manifolds given by negative-definite
//! weighted forests: first homology and spin structures via Wu sets, the
//! integer mubar invariant, Laufer rationality, and Heegaard Floer
//! correction terms d, together with machine checks of the identity
//! mubar = -4 d and the rational-homology-ball obstruction verdicts.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! every value the crate reports is an integer or a reduced fraction.

pub mod error;
pub mod generate;
pub mod graph;
pub mod invariants;
pub mod lattice;
pub mod matrix;
pub mod rationality;
pub mod spin;

pub use error::{Error, Result};
pub use generate::{generate_candidates, CandidateStream, GeneratorParams};
pub use graph::{
    blow_down_normalize, disjoint_union_with_rp3, framing_reduction_step, PlumbingGraph,
};
pub use invariants::{
    d_oracle, d_path, m_counter, mubar, obstruction_report, verify_theorem, CorrectionTerm,
    DetParity, MubarValue, ObstructionVerdict, TheoremReport,
};
pub use lattice::{
    build_intersection_form, char_square, enumerate_spinc_classes, is_negative_definite,
    lattice_summary, same_spinc, CharVector, H1Order, IntersectionForm, LatticeSummary,
};
pub use rationality::{laufer_rationality, lemma_precheck, LauferTrace, RationalityVerdict};
pub use spin::{enumerate_wu_sets, reduce_mod2, wu_char_vector, ReductionTrace, WuSet};
