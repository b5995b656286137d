//! Normal forms of atom-to-atom morphisms.
//!
//! Every composite of generators between two atoms collapses to one of a
//! handful of canonical words, decorated by matrices:
//!
//! | source → target | canonical word            |
//! |-----------------|---------------------------|
//! | D → D, V → V, T → T | `M`                   |
//! | D → V           | `M ∘ ι`                   |
//! | D → T           | `q ∘ M ∘ ι`, `M` mod 1    |
//! | V → T           | `q ∘ M`                   |
//! | D → ⊕           | `M ∘ in0`                 |
//! | ⊕ → ⊕           | `Σ_k M_k ∘ s^k`           |
//! | ∏ → ∏           | `Σ_k M_k ∘ s^k`           |
//! | ∏ → T           | `M ∘ pr0`                 |
//!
//! All other atom pairs only admit the zero map. The rewrite rules (matrix
//! fusion, `q∘ι = 0`, `pr0∘s = 0`, `s∘in0 = 0`, matrices commuting past
//! `ι`, `q`, shifts and `in0`/`pr0`, bilinearity, sign pushing) are applied
//! by composing normal forms directly, so rewriting always terminates and the
//! result is unique by construction.

use std::collections::BTreeMap;

use super::atom::{AtomKind, LcaAtom};
use super::expr::PrimExpr;
use super::LcaError;
use crate::matrix::{frac, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    src: LcaAtom,
    dst: LcaAtom,
    /// Shift power to coefficient matrix; non-sequence words only use 0.
    terms: BTreeMap<usize, RatMatrix>,
}

fn reachable(src: AtomKind, dst: AtomKind) -> bool {
    use AtomKind::*;
    matches!(
        (src, dst),
        (Disc, Disc)
            | (Vect, Vect)
            | (Torus, Torus)
            | (Disc, Vect)
            | (Disc, Torus)
            | (Vect, Torus)
            | (Disc, CoprodDisc)
            | (CoprodDisc, CoprodDisc)
            | (ProdTorus, ProdTorus)
            | (ProdTorus, Torus)
    )
}

impl NormalForm {
    pub fn zero(src: &LcaAtom, dst: &LcaAtom) -> Self {
        NormalForm {
            src: src.clone(),
            dst: dst.clone(),
            terms: BTreeMap::new(),
        }
    }

    fn with_terms(src: LcaAtom, dst: LcaAtom, terms: BTreeMap<usize, RatMatrix>) -> Self {
        let mut nf = NormalForm { src, dst, terms };
        nf.clean();
        nf
    }

    fn single(src: LcaAtom, dst: LcaAtom, power: usize, m: RatMatrix) -> Self {
        Self::with_terms(src, dst, BTreeMap::from([(power, m)]))
    }

    fn clean(&mut self) {
        if self.src.dim() == 0
            || self.dst.dim() == 0
            || !reachable(self.src.kind(), self.dst.kind())
        {
            self.terms.clear();
            return;
        }
        if self.src.kind() == AtomKind::Disc && self.dst.kind() == AtomKind::Torus {
            for m in self.terms.values_mut() {
                *m = m.map(frac);
            }
        }
        self.terms.retain(|_, m| !m.is_zero());
    }

    pub fn src(&self) -> &LcaAtom {
        &self.src
    }

    pub fn dst(&self) -> &LcaAtom {
        &self.dst
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<usize, RatMatrix> {
        &self.terms
    }

    /// The coefficient of the unshifted word, if that is the only term.
    pub fn single_matrix(&self) -> Option<&RatMatrix> {
        match self.terms.len() {
            1 => self.terms.get(&0),
            _ => None,
        }
    }

    pub fn max_power(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, m)| (*k, m.neg())).collect();
        Self::with_terms(self.src.clone(), self.dst.clone(), terms)
    }

    pub fn add(&self, other: &NormalForm) -> Result<Self, LcaError> {
        if self.src != other.src || self.dst != other.dst {
            return Err(LcaError::EndpointMismatch(format!(
                "adding {} -> {} and {} -> {}",
                self.src, self.dst, other.src, other.dst
            )));
        }
        let mut terms = self.terms.clone();
        for (k, m) in &other.terms {
            let entry = terms
                .entry(*k)
                .or_insert_with(|| RatMatrix::zeros(m.rows(), m.cols()));
            *entry = entry.add(m).map_err(|e| LcaError::InvalidMatrix(e.to_string()))?;
        }
        Ok(Self::with_terms(self.src.clone(), self.dst.clone(), terms))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &NormalForm) -> Result<Self, LcaError> {
        if inner.dst != self.src {
            return Err(LcaError::EndpointMismatch(format!(
                "composing through {} and {}",
                inner.dst, self.src
            )));
        }
        let (a, b, c) = (inner.src.kind(), inner.dst.kind(), self.dst.kind());
        use AtomKind::*;
        let mut terms: BTreeMap<usize, RatMatrix> = BTreeMap::new();
        for (gk, gm) in &self.terms {
            for (fk, fm) in &inner.terms {
                let power = match (a, b, c) {
                    // s ∘ M ∘ in0 = M ∘ s ∘ in0 = 0
                    (Disc, CoprodDisc, CoprodDisc) if *gk > 0 => continue,
                    // pr0 ∘ M ∘ s = M ∘ pr0 ∘ s = 0
                    (ProdTorus, ProdTorus, Torus) if *fk > 0 => continue,
                    _ => gk + fk,
                };
                let m = gm
                    .mul(fm)
                    .map_err(|e| LcaError::InvalidMatrix(e.to_string()))?;
                match terms.get_mut(&power) {
                    Some(acc) => *acc = acc.add(&m).expect("same shape"),
                    None => {
                        terms.insert(power, m);
                    }
                }
            }
        }
        Ok(Self::with_terms(inner.src.clone(), self.dst.clone(), terms))
    }

    /// Renders the normal form back into the generator language. The
    /// rendering is deterministic and `of_expr(render(nf)) == nf`.
    pub fn render(&self) -> PrimExpr {
        if self.terms.is_empty() {
            return PrimExpr::zero(&self.src, &self.dst);
        }
        let (src, dst) = (&self.src, &self.dst);
        let (p, q) = (
            src.module().expect("nonzero atom").clone(),
            dst.module().expect("nonzero atom").clone(),
        );
        use AtomKind::*;
        let vect = |m: &crate::algebra::FreeModule| LcaAtom::Vect(m.clone());
        let mut rendered: Vec<PrimExpr> = Vec::new();
        for (k, m) in &self.terms {
            let e = match (src.kind(), dst.kind()) {
                (Disc, Vect) => with_mat(&vect(&p), &vect(&q), m, PrimExpr::Iota(p.clone())),
                (Disc, Torus) => PrimExpr::comp(
                    PrimExpr::QuotT(q.clone()),
                    with_mat(&vect(&p), &vect(&q), m, PrimExpr::Iota(p.clone())),
                ),
                (Vect, Torus) => {
                    match with_mat(&vect(&p), &vect(&q), m, PrimExpr::Id(vect(&p))) {
                        PrimExpr::Id(_) => PrimExpr::QuotT(q.clone()),
                        PrimExpr::Neg(inner) if matches!(*inner, PrimExpr::Id(_)) => {
                            PrimExpr::neg(PrimExpr::QuotT(q.clone()))
                        }
                        inner => PrimExpr::comp(PrimExpr::QuotT(q.clone()), inner),
                    }
                }
                (Disc, CoprodDisc) => with_mat(
                    &LcaAtom::CoprodDisc(p.clone()),
                    dst,
                    m,
                    PrimExpr::InclCoprod0(p.clone()),
                ),
                (ProdTorus, Torus) => with_mat(
                    &LcaAtom::Torus(p.clone()),
                    dst,
                    m,
                    PrimExpr::ProjProd0(p.clone()),
                ),
                (CoprodDisc, CoprodDisc) | (ProdTorus, ProdTorus) => {
                    let shift = if src.kind() == CoprodDisc {
                        PrimExpr::ShiftCoprod(p.clone())
                    } else {
                        PrimExpr::ShiftProd(p.clone())
                    };
                    let mut word = PrimExpr::Id(src.clone());
                    for i in 0..*k {
                        word = if i == 0 {
                            shift.clone()
                        } else {
                            PrimExpr::comp(shift.clone(), word)
                        };
                    }
                    with_mat(src, dst, m, word)
                }
                _ => with_mat(src, dst, m, PrimExpr::Id(src.clone())),
            };
            rendered.push(e);
        }
        let mut it = rendered.into_iter();
        let first = it.next().expect("nonempty");
        it.fold(first, PrimExpr::sum)
    }

    pub fn of_expr(e: &PrimExpr) -> Result<NormalForm, LcaError> {
        Ok(match e {
            PrimExpr::Zero { src, dst } => NormalForm::zero(src, dst),
            PrimExpr::Id(a) => NormalForm::single(a.clone(), a.clone(), 0, RatMatrix::identity(a.dim())),
            PrimExpr::Iota(_)
            | PrimExpr::QuotT(_)
            | PrimExpr::InclCoprod0(_)
            | PrimExpr::ProjProd0(_) => {
                let (s, d) = (e.src(), e.dst());
                let n = s.dim();
                NormalForm::single(s, d, 0, RatMatrix::identity(n))
            }
            PrimExpr::ShiftCoprod(_) | PrimExpr::ShiftProd(_) => {
                let s = e.src();
                let n = s.dim();
                NormalForm::single(s.clone(), s, 1, RatMatrix::identity(n))
            }
            PrimExpr::Mat { src, dst, matrix } => {
                e.check()?;
                NormalForm::single(src.clone(), dst.clone(), 0, matrix.clone())
            }
            PrimExpr::Neg(inner) => NormalForm::of_expr(inner)?.neg(),
            PrimExpr::Comp(outer, inner) => {
                NormalForm::of_expr(outer)?.after(&NormalForm::of_expr(inner)?)?
            }
            PrimExpr::Sum(a, b) => NormalForm::of_expr(a)?.add(&NormalForm::of_expr(b)?)?,
        })
    }
}

/// `m ∘ word`, omitting `m` when it is `±1` on the same atom.
fn with_mat(src: &LcaAtom, dst: &LcaAtom, m: &RatMatrix, word: PrimExpr) -> PrimExpr {
    if src == dst && m.is_identity() {
        return word;
    }
    if src == dst && m.neg().is_identity() {
        return PrimExpr::neg(word);
    }
    let mat = PrimExpr::mat(src.clone(), dst.clone(), m.clone());
    if matches!(word, PrimExpr::Id(_)) {
        mat
    } else {
        PrimExpr::comp(mat, word)
    }
}

pub fn normalize_expr(e: &PrimExpr) -> Result<PrimExpr, LcaError> {
    Ok(NormalForm::of_expr(e)?.render())
}
