//! Invertibility of `V(A, B, C)` for triples of one class.
//!
//! Row reduction turns `V(A, B, C)` into
//! `[B - A, C - A; B^2 - A^2, C^2 - A^2]`, so invertibility depends on which
//! of `B - A` and `C - A` are singular. Both singular: invertible exactly when
//! the left nullspaces differ. One singular: always invertible. Both
//! invertible: invertible exactly when `(B - A) B (B - A)^{-1}` and
//! `(C - A) C (C - A)^{-1}` differ. Every check here is computed two ways and
//! fails with [`Error::Violation`](crate::Error::Violation) on disagreement.

mod extension;
mod pair;

pub use extension::{
    canonical_form, commutator_det_check, extension_context, sdiff_det, xentries_check, CanonicalForm,
    ExtensionContext, FormTag,
};
pub use pair::{
    classify_triple, classify_triple_unchecked, idp_check, inv_diff_equivalence, mixed_m, pair_analysis, q_of,
    PairAnalysis, TripleCase, TripleClassification,
};

#[cfg(test)]
mod tests;
