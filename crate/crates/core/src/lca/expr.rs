use std::fmt;

use serde::{Deserialize, Serialize};

use super::atom::{AtomKind, LcaAtom};
use super::LcaError;
use crate::algebra::FreeModule;
use crate::matrix::RatMatrix;

/// A morphism between two atoms, written in the generator vocabulary.
///
/// `Comp(outer, inner)` is `outer ∘ inner`. `Mat` acts coordinatewise on
/// any pair of atoms of the same kind; entries must be integers unless both
/// ends are vector atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimExpr {
    Zero { src: LcaAtom, dst: LcaAtom },
    Id(LcaAtom),
    /// `P -> P_R`
    Iota(FreeModule),
    /// `P_R -> T_P`
    QuotT(FreeModule),
    /// `(p0, p1, ...) -> (p1, p2, ...)` on `⊕P`
    ShiftCoprod(FreeModule),
    /// `P -> ⊕P` at index 0
    InclCoprod0(FreeModule),
    /// `(t0, t1, ...) -> (0, t0, t1, ...)` on `∏T_P`
    ShiftProd(FreeModule),
    /// `∏T_P -> T_P`, the first coordinate
    ProjProd0(FreeModule),
    Mat {
        src: LcaAtom,
        dst: LcaAtom,
        matrix: RatMatrix,
    },
    Neg(Box<PrimExpr>),
    Comp(Box<PrimExpr>, Box<PrimExpr>),
    Sum(Box<PrimExpr>, Box<PrimExpr>),
}

impl PrimExpr {
    pub fn zero(src: &LcaAtom, dst: &LcaAtom) -> PrimExpr {
        PrimExpr::Zero {
            src: src.clone(),
            dst: dst.clone(),
        }
    }

    pub fn mat(src: LcaAtom, dst: LcaAtom, matrix: RatMatrix) -> PrimExpr {
        PrimExpr::Mat { src, dst, matrix }
    }

    pub fn comp(outer: PrimExpr, inner: PrimExpr) -> PrimExpr {
        PrimExpr::Comp(Box::new(outer), Box::new(inner))
    }

    pub fn sum(a: PrimExpr, b: PrimExpr) -> PrimExpr {
        PrimExpr::Sum(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: PrimExpr) -> PrimExpr {
        PrimExpr::Neg(Box::new(e))
    }

    pub fn is_literal_zero(&self) -> bool {
        matches!(self, PrimExpr::Zero { .. })
    }

    pub fn src(&self) -> LcaAtom {
        match self {
            PrimExpr::Zero { src, .. } | PrimExpr::Mat { src, .. } => src.clone(),
            PrimExpr::Id(a) => a.clone(),
            PrimExpr::Iota(p) | PrimExpr::InclCoprod0(p) => LcaAtom::Disc(p.clone()),
            PrimExpr::QuotT(p) => LcaAtom::Vect(p.clone()),
            PrimExpr::ShiftCoprod(p) => LcaAtom::CoprodDisc(p.clone()),
            PrimExpr::ShiftProd(p) | PrimExpr::ProjProd0(p) => LcaAtom::ProdTorus(p.clone()),
            PrimExpr::Neg(e) => e.src(),
            PrimExpr::Comp(_, inner) => inner.src(),
            PrimExpr::Sum(a, _) => a.src(),
        }
    }

    pub fn dst(&self) -> LcaAtom {
        match self {
            PrimExpr::Zero { dst, .. } | PrimExpr::Mat { dst, .. } => dst.clone(),
            PrimExpr::Id(a) => a.clone(),
            PrimExpr::Iota(p) => LcaAtom::Vect(p.clone()),
            PrimExpr::QuotT(p) | PrimExpr::ProjProd0(p) => LcaAtom::Torus(p.clone()),
            PrimExpr::ShiftCoprod(p) | PrimExpr::InclCoprod0(p) => LcaAtom::CoprodDisc(p.clone()),
            PrimExpr::ShiftProd(p) => LcaAtom::ProdTorus(p.clone()),
            PrimExpr::Neg(e) => e.dst(),
            PrimExpr::Comp(outer, _) => outer.dst(),
            PrimExpr::Sum(a, _) => a.dst(),
        }
    }

    /// Checks that every node is well typed.
    pub fn check(&self) -> Result<(), LcaError> {
        match self {
            PrimExpr::Mat { src, dst, matrix } => {
                let kind = src.kind();
                if kind != dst.kind() && src.dim() + dst.dim() > 0 {
                    return Err(LcaError::InvalidMatrix(format!(
                        "Mat between {src} and {dst} of different kinds"
                    )));
                }
                if matrix.rows() != dst.dim() || matrix.cols() != src.dim() {
                    return Err(LcaError::InvalidMatrix(format!(
                        "Mat {src} -> {dst} needs a {}x{} matrix, got {}x{}",
                        dst.dim(),
                        src.dim(),
                        matrix.rows(),
                        matrix.cols()
                    )));
                }
                if kind != AtomKind::Vect && !matrix.is_integral() {
                    return Err(LcaError::InvalidMatrix(format!(
                        "Mat on {src} must have integer entries"
                    )));
                }
                Ok(())
            }
            PrimExpr::Neg(e) => e.check(),
            PrimExpr::Comp(outer, inner) => {
                outer.check()?;
                inner.check()?;
                let (mid_a, mid_b) = (inner.dst(), outer.src());
                if mid_a != mid_b {
                    return Err(LcaError::EndpointMismatch(format!(
                        "composing through {mid_a} and {mid_b}"
                    )));
                }
                Ok(())
            }
            PrimExpr::Sum(a, b) => {
                a.check()?;
                b.check()?;
                if a.src() != b.src() || a.dst() != b.dst() {
                    return Err(LcaError::EndpointMismatch(format!(
                        "adding {} -> {} and {} -> {}",
                        a.src(),
                        a.dst(),
                        b.src(),
                        b.dst()
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Total number of shift generators; bounds the shift depth of any
    /// monomial in the normal form.
    pub fn shift_count(&self) -> usize {
        match self {
            PrimExpr::ShiftCoprod(_) | PrimExpr::ShiftProd(_) => 1,
            PrimExpr::Neg(e) => e.shift_count(),
            PrimExpr::Comp(a, b) => a.shift_count() + b.shift_count(),
            PrimExpr::Sum(a, b) => a.shift_count().max(b.shift_count()),
            _ => 0,
        }
    }
}

impl fmt::Display for PrimExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimExpr::Zero { .. } => write!(f, "0"),
            PrimExpr::Id(_) => write!(f, "1"),
            PrimExpr::Iota(p) => write!(f, "ι_{p}"),
            PrimExpr::QuotT(p) => write!(f, "q_{p}"),
            PrimExpr::ShiftCoprod(_) | PrimExpr::ShiftProd(_) => write!(f, "s"),
            PrimExpr::InclCoprod0(_) => write!(f, "in0"),
            PrimExpr::ProjProd0(_) => write!(f, "pr0"),
            PrimExpr::Mat { matrix, .. } => {
                write!(f, "[")?;
                for r in 0..matrix.rows() {
                    if r > 0 {
                        write!(f, ";")?;
                    }
                    let row: Vec<String> = matrix.row(r).iter().map(|x| x.to_string()).collect();
                    write!(f, "{}", row.join(","))?;
                }
                write!(f, "]")
            }
            PrimExpr::Neg(e) => write!(f, "-{e}"),
            PrimExpr::Comp(a, b) => write!(f, "{a}∘{b}"),
            PrimExpr::Sum(a, b) => write!(f, "({a} + {b})"),
        }
    }
}
