use serde::{Deserialize, Serialize};

use super::SeqError;
use crate::algebra::{FreeModule, SplitSequence};
use crate::gillet_grayson::{quotient_cg_morphism, quotient_cg_object, strip_zero_atoms};
use crate::lca::{AtomKind, Iso, LcaAtom, LcaMorphism, LcaObject, PrimExpr};
use crate::matrix::RatMatrix;

/// Why a sequence is exact. Each tag determines the three objects and the
/// two maps; validation recomputes them and compares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ExactnessCertificate {
    /// `P -> P_R -> T_P`
    LatticeInVector { p: FreeModule },
    /// `Q -> P_R -> T_Q` with maps `phi^-1 ∘ ι_Q` and `q_Q ∘ phi`.
    PhiTwisted {
        p: FreeModule,
        phi: RatMatrix,
        q: FreeModule,
    },
    /// `P -> ⊕P -> ⊕P` with `in0` and the shift.
    CoprodShift { p: FreeModule },
    /// `∏T_P -> ∏T_P -> T_P` with the shift and `pr0`.
    ProdShift { p: FreeModule },
    /// `X = X -> 0`
    IdentityLeft { x: LcaObject },
    /// `0 -> X = X`
    IdentityRight { x: LcaObject },
    ZeroSeq,
    DirectSum { parts: Vec<ExactnessCertificate> },
    /// The inner sequence conjugated by isomorphisms going from the new
    /// objects to the inner ones: `inc = mid⁻¹ ∘ inc₀ ∘ left`,
    /// `sur = right⁻¹ ∘ sur₀ ∘ mid`.
    RewiredByIso {
        inner: Box<ExactnessCertificate>,
        left: Iso,
        mid: Iso,
        right: Iso,
    },
    /// A split exact sequence of free modules, applied to one atom kind.
    SplitInduced { kind: AtomKind, split: SplitSequence },
    /// A direct summand of the parent, cut out by positions; the maps must
    /// not mix the summand with its complement.
    Summand {
        parent: Box<ExactnessCertificate>,
        left_pos: Vec<usize>,
        mid_pos: Vec<usize>,
        right_pos: Vec<usize>,
    },
    /// The image in the quotient by compactly generated objects, with the
    /// killed summands removed.
    CgQuotient { inner: Box<ExactnessCertificate> },
}

/// The data a certificate determines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub left: LcaObject,
    pub mid: LcaObject,
    pub right: LcaObject,
    pub inc: LcaMorphism,
    pub sur: LcaMorphism,
}

fn one(a: LcaAtom) -> LcaObject {
    LcaObject::atom(a)
}

fn single(e: PrimExpr) -> Result<LcaMorphism, SeqError> {
    Ok(LcaMorphism::from_expr(e)?)
}

fn bad(msg: impl Into<String>) -> SeqError {
    SeqError::InvalidCertificate(msg.into())
}

impl ExactnessCertificate {
    pub fn canonical(&self) -> Result<Canonical, SeqError> {
        use ExactnessCertificate as C;
        match self {
            C::LatticeInVector { p } => Ok(Canonical {
                left: one(LcaAtom::Disc(p.clone())),
                mid: one(LcaAtom::Vect(p.clone())),
                right: one(LcaAtom::Torus(p.clone())),
                inc: single(PrimExpr::Iota(p.clone()))?,
                sur: single(PrimExpr::QuotT(p.clone()))?,
            }),
            C::PhiTwisted { p, phi, q } => {
                let n = p.lattice_dim();
                if q.lattice_dim() != n || phi.rows() != n || phi.cols() != n {
                    return Err(bad("phi has the wrong shape"));
                }
                let inv = phi.inverse().ok_or_else(|| bad("phi is singular"))?;
                let (vp, vq) = (LcaAtom::Vect(p.clone()), LcaAtom::Vect(q.clone()));
                Ok(Canonical {
                    left: one(LcaAtom::Disc(q.clone())),
                    mid: one(vp.clone()),
                    right: one(LcaAtom::Torus(q.clone())),
                    inc: single(PrimExpr::comp(
                        PrimExpr::mat(vq.clone(), vp.clone(), inv),
                        PrimExpr::Iota(q.clone()),
                    ))?,
                    sur: single(PrimExpr::comp(
                        PrimExpr::QuotT(q.clone()),
                        PrimExpr::mat(vp, vq, phi.clone()),
                    ))?,
                })
            }
            C::CoprodShift { p } => Ok(Canonical {
                left: one(LcaAtom::Disc(p.clone())),
                mid: one(LcaAtom::CoprodDisc(p.clone())),
                right: one(LcaAtom::CoprodDisc(p.clone())),
                inc: single(PrimExpr::InclCoprod0(p.clone()))?,
                sur: single(PrimExpr::ShiftCoprod(p.clone()))?,
            }),
            C::ProdShift { p } => Ok(Canonical {
                left: one(LcaAtom::ProdTorus(p.clone())),
                mid: one(LcaAtom::ProdTorus(p.clone())),
                right: one(LcaAtom::Torus(p.clone())),
                inc: single(PrimExpr::ShiftProd(p.clone()))?,
                sur: single(PrimExpr::ProjProd0(p.clone()))?,
            }),
            C::IdentityLeft { x } => Ok(Canonical {
                left: x.clone(),
                mid: x.clone(),
                right: LcaObject::zero(),
                inc: LcaMorphism::identity(x),
                sur: LcaMorphism::zero(x, &LcaObject::zero()),
            }),
            C::IdentityRight { x } => Ok(Canonical {
                left: LcaObject::zero(),
                mid: x.clone(),
                right: x.clone(),
                inc: LcaMorphism::zero(&LcaObject::zero(), x),
                sur: LcaMorphism::identity(x),
            }),
            C::ZeroSeq => {
                let z = LcaObject::zero();
                Ok(Canonical {
                    left: z.clone(),
                    mid: z.clone(),
                    right: z.clone(),
                    inc: LcaMorphism::zero(&z, &z),
                    sur: LcaMorphism::zero(&z, &z),
                })
            }
            C::DirectSum { parts } => {
                let cs = parts
                    .iter()
                    .map(ExactnessCertificate::canonical)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Canonical {
                    left: LcaObject::concat_all(cs.iter().map(|c| &c.left)),
                    mid: LcaObject::concat_all(cs.iter().map(|c| &c.mid)),
                    right: LcaObject::concat_all(cs.iter().map(|c| &c.right)),
                    inc: LcaMorphism::direct_sum_all(cs.iter().map(|c| &c.inc)),
                    sur: LcaMorphism::direct_sum_all(cs.iter().map(|c| &c.sur)),
                })
            }
            C::RewiredByIso {
                inner,
                left,
                mid,
                right,
            } => {
                let c = inner.canonical()?;
                for (name, iso, obj) in [("left", left, &c.left), ("mid", mid, &c.mid), ("right", right, &c.right)] {
                    if iso.target() != obj {
                        return Err(bad(format!(
                            "{name} isomorphism ends in {}, expected {obj}",
                            iso.target()
                        )));
                    }
                    iso.validate()?;
                }
                Ok(Canonical {
                    left: left.source().clone(),
                    mid: mid.source().clone(),
                    right: right.source().clone(),
                    inc: mid.inv.compose(&c.inc)?.compose(&left.fwd)?,
                    sur: right.inv.compose(&c.sur)?.compose(&mid.fwd)?,
                })
            }
            C::SplitInduced { kind, split } => {
                split.validate()?;
                if *kind == AtomKind::Zero {
                    return Err(bad("split sequence on the zero atom"));
                }
                let (a, b, c) = (
                    LcaAtom::new(*kind, &split.sub),
                    LcaAtom::new(*kind, &split.mid),
                    LcaAtom::new(*kind, &split.quot),
                );
                Ok(Canonical {
                    inc: single(PrimExpr::mat(a.clone(), b.clone(), split.inc.clone()))?,
                    sur: single(PrimExpr::mat(b.clone(), c.clone(), split.proj.clone()))?,
                    left: one(a),
                    mid: one(b),
                    right: one(c),
                })
            }
            C::Summand {
                parent,
                left_pos,
                mid_pos,
                right_pos,
            } => {
                let c = parent.canonical()?;
                let lc = complement(c.left.len(), left_pos)?;
                let mc = complement(c.mid.len(), mid_pos)?;
                let rc = complement(c.right.len(), right_pos)?;
                for (m, rows, cols, what) in [
                    (&c.inc, mid_pos, &lc, "inclusion"),
                    (&c.inc, &mc, left_pos, "inclusion"),
                    (&c.sur, right_pos, &mc, "surjection"),
                    (&c.sur, &rc, mid_pos, "surjection"),
                ] {
                    if !m.sub_block(rows, cols).is_zero()? {
                        return Err(bad(format!("{what} mixes the summand with its complement")));
                    }
                }
                Ok(Canonical {
                    left: c.left.select(left_pos),
                    mid: c.mid.select(mid_pos),
                    right: c.right.select(right_pos),
                    inc: c.inc.sub_block(mid_pos, left_pos),
                    sur: c.sur.sub_block(right_pos, mid_pos),
                })
            }
            C::CgQuotient { inner } => {
                let c = inner.canonical()?;
                Ok(Canonical {
                    left: strip_zero_atoms(&quotient_cg_object(&c.left)),
                    mid: strip_zero_atoms(&quotient_cg_object(&c.mid)),
                    right: strip_zero_atoms(&quotient_cg_object(&c.right)),
                    inc: crate::gillet_grayson::strip_morphism(&quotient_cg_morphism(&c.inc)),
                    sur: crate::gillet_grayson::strip_morphism(&quotient_cg_morphism(&c.sur)),
                })
            }
        }
    }
}

/// Positions `0..n` not listed, in order; rejects repeats and overflow.
pub(crate) fn complement(n: usize, positions: &[usize]) -> Result<Vec<usize>, SeqError> {
    let mut seen = vec![false; n];
    for &p in positions {
        if p >= n || seen[p] {
            return Err(bad(format!("bad position list {positions:?} for {n} summands")));
        }
        seen[p] = true;
    }
    Ok((0..n).filter(|&i| !seen[i]).collect())
}
