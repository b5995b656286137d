//! Explicit comparison between two presentations of the relative group
//! `K_0(A, R)`: Bass–Swan triples on one side, Nenashev double exact
//! sequences in locally compact modules on the other.
//!
//! Everything is exact. Real matrices are represented by rational ones, and
//! morphisms of locally compact modules by a closed vocabulary of generators
//! with a rewriting normal form that is cross-checked against an
//! element-level evaluator.

pub mod algebra;
pub mod gillet_grayson;
pub mod lca;
pub mod matrix;
pub mod nenashev;
pub mod render;
pub mod sample;
pub mod sequences;
pub mod theta;

pub use algebra::{
    check_swan_morphism, delta, det_invariant, k0_class, make_triple, relation_b_combine,
    AlgebraError, BassSwanTriple, FreeModule, Order, SwanMorphism,
};
pub use matrix::{RatMatrix, Rational};
