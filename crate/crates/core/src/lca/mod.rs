//! Locally compact modules built from five atom kinds, morphisms between
//! their finite direct sums, and decidable equality of morphisms.

mod atom;
mod element;
mod expr;
mod morphism;
mod normal;

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

pub use atom::{AtomClass, AtomKind, LcaAtom, LcaObject};
pub use element::{eval_expr, generating_family, AtomValue, LcaElement};
pub use expr::PrimExpr;
pub use morphism::{
    equal_morphisms, is_rewiring_iso, mat_block, signed_permutation_of, Iso, LcaMorphism,
    MorphismComparison,
};
pub use normal::{normalize_expr, NormalForm};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LcaError {
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("element shape mismatch: {0}")]
    ElementShapeMismatch(String),
    #[error("normal form and evaluation disagree: {0}")]
    NormalFormVsEvalDisagreement(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("bad block layout: {0}")]
    BlockShape(String),
    #[error("not an isomorphism: {0}")]
    NotAnIso(String),
}

static DISAGREEMENTS: AtomicU64 = AtomicU64::new(0);

pub(crate) fn record_disagreement() {
    DISAGREEMENTS.fetch_add(1, Ordering::Relaxed);
}

/// Number of normal-form/evaluation disagreements seen by this process.
pub fn disagreement_count() -> u64 {
    DISAGREEMENTS.load(Ordering::Relaxed)
}
