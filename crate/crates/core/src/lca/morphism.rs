use serde::{Deserialize, Serialize};

use super::atom::{AtomKind, LcaAtom, LcaObject};
use super::element::{eval_expr, generating_family, AtomValue, LcaElement};
use super::expr::PrimExpr;
use super::normal::NormalForm;
use super::{record_disagreement, LcaError};
use crate::matrix::RatMatrix;

/// A morphism of direct sums, as a matrix of atom morphisms indexed by
/// (target summand, source summand).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcaMorphism {
    source: LcaObject,
    target: LcaObject,
    blocks: Vec<Vec<PrimExpr>>,
}

impl LcaMorphism {
    pub fn new(
        source: LcaObject,
        target: LcaObject,
        blocks: Vec<Vec<PrimExpr>>,
    ) -> Result<LcaMorphism, LcaError> {
        let m = LcaMorphism {
            source,
            target,
            blocks,
        };
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<(), LcaError> {
        if self.blocks.len() != self.target.len()
            || self.blocks.iter().any(|r| r.len() != self.source.len())
        {
            return Err(LcaError::BlockShape(format!(
                "expected {}x{} blocks",
                self.target.len(),
                self.source.len()
            )));
        }
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                e.check()?;
                if e.src() != self.source.atoms()[j] || e.dst() != self.target.atoms()[i] {
                    return Err(LcaError::EndpointMismatch(format!(
                        "block ({i},{j}) goes {} -> {}, expected {} -> {}",
                        e.src(),
                        e.dst(),
                        self.source.atoms()[j],
                        self.target.atoms()[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn zero(source: &LcaObject, target: &LcaObject) -> LcaMorphism {
        let blocks = target
            .atoms()
            .iter()
            .map(|t| source.atoms().iter().map(|s| PrimExpr::zero(s, t)).collect())
            .collect();
        LcaMorphism {
            source: source.clone(),
            target: target.clone(),
            blocks,
        }
    }

    pub fn identity(obj: &LcaObject) -> LcaMorphism {
        let mut m = LcaMorphism::zero(obj, obj);
        for (i, a) in obj.atoms().iter().enumerate() {
            m.blocks[i][i] = PrimExpr::Id(a.clone());
        }
        m
    }

    /// A one-block morphism between single atoms.
    pub fn from_expr(e: PrimExpr) -> Result<LcaMorphism, LcaError> {
        e.check()?;
        let (s, d) = (e.src(), e.dst());
        Ok(LcaMorphism {
            source: LcaObject::atom(s),
            target: LcaObject::atom(d),
            blocks: vec![vec![e]],
        })
    }

    /// Sends source summand `i` to target summand `perm[i].0`, with sign
    /// `perm[i].1`. The target object is determined by the permutation.
    pub fn signed_permutation(
        source: &LcaObject,
        perm: &[(usize, i8)],
    ) -> Result<LcaMorphism, LcaError> {
        let n = source.len();
        if perm.len() != n {
            return Err(LcaError::NotAnIso(format!(
                "permutation of length {} on {} summands",
                perm.len(),
                n
            )));
        }
        let mut target: Vec<Option<LcaAtom>> = vec![None; n];
        for (i, (t, sign)) in perm.iter().enumerate() {
            if *t >= n || target[*t].is_some() || !(*sign == 1 || *sign == -1) {
                return Err(LcaError::NotAnIso(format!("{perm:?} is not a signed permutation")));
            }
            target[*t] = Some(source.atoms()[i].clone());
        }
        let target: LcaObject = target.into_iter().map(|a| a.expect("filled")).collect();
        let mut m = LcaMorphism::zero(source, &target);
        for (i, (t, sign)) in perm.iter().enumerate() {
            let id = PrimExpr::Id(source.atoms()[i].clone());
            m.blocks[*t][i] = if *sign == 1 { id } else { PrimExpr::neg(id) };
        }
        Ok(m)
    }

    pub fn source(&self) -> &LcaObject {
        &self.source
    }

    pub fn target(&self) -> &LcaObject {
        &self.target
    }

    pub fn blocks(&self) -> &[Vec<PrimExpr>] {
        &self.blocks
    }

    pub fn block(&self, i: usize, j: usize) -> &PrimExpr {
        &self.blocks[i][j]
    }

    pub fn set_block(&mut self, i: usize, j: usize, e: PrimExpr) -> Result<(), LcaError> {
        e.check()?;
        if e.src() != self.source.atoms()[j] || e.dst() != self.target.atoms()[i] {
            return Err(LcaError::EndpointMismatch(format!("block ({i},{j})")));
        }
        self.blocks[i][j] = e;
        Ok(())
    }

    /// `self ∘ inner`. Blocks are built as formal sums of composites;
    /// literal zero factors are dropped.
    pub fn compose(&self, inner: &LcaMorphism) -> Result<LcaMorphism, LcaError> {
        if inner.target != self.source {
            return Err(LcaError::EndpointMismatch(format!(
                "composing {} -> {} after {} -> {}",
                self.source, self.target, inner.source, inner.target
            )));
        }
        let mut out = LcaMorphism::zero(&inner.source, &self.target);
        for i in 0..self.target.len() {
            for j in 0..inner.source.len() {
                let mut acc: Option<PrimExpr> = None;
                for k in 0..self.source.len() {
                    let (g, f) = (&self.blocks[i][k], &inner.blocks[k][j]);
                    if g.is_literal_zero() || f.is_literal_zero() {
                        continue;
                    }
                    let term = match (g, f) {
                        (PrimExpr::Id(_), _) => f.clone(),
                        (_, PrimExpr::Id(_)) => g.clone(),
                        _ => PrimExpr::comp(g.clone(), f.clone()),
                    };
                    acc = Some(match acc {
                        None => term,
                        Some(a) => PrimExpr::sum(a, term),
                    });
                }
                if let Some(e) = acc {
                    out.blocks[i][j] = e;
                }
            }
        }
        Ok(out)
    }

    pub fn direct_sum(&self, other: &LcaMorphism) -> LcaMorphism {
        let source = self.source.concat(&other.source);
        let target = self.target.concat(&other.target);
        let mut out = LcaMorphism::zero(&source, &target);
        let (r0, c0) = (self.target.len(), self.source.len());
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out.blocks[i][j] = e.clone();
            }
        }
        for (i, row) in other.blocks.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out.blocks[r0 + i][c0 + j] = e.clone();
            }
        }
        out
    }

    pub fn direct_sum_all<'a>(parts: impl IntoIterator<Item = &'a LcaMorphism>) -> LcaMorphism {
        parts
            .into_iter()
            .fold(LcaMorphism::zero(&LcaObject::zero(), &LcaObject::zero()), |acc, m| {
                acc.direct_sum(m)
            })
    }

    pub fn neg(&self) -> LcaMorphism {
        let mut out = self.clone();
        for row in &mut out.blocks {
            for e in row.iter_mut() {
                if !e.is_literal_zero() {
                    *e = PrimExpr::neg(e.clone());
                }
            }
        }
        out
    }

    pub fn add(&self, other: &LcaMorphism) -> Result<LcaMorphism, LcaError> {
        if self.source != other.source || self.target != other.target {
            return Err(LcaError::EndpointMismatch("adding morphisms with different ends".into()));
        }
        let mut out = self.clone();
        for (i, row) in other.blocks.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.is_literal_zero() {
                    continue;
                }
                out.blocks[i][j] = if out.blocks[i][j].is_literal_zero() {
                    e.clone()
                } else {
                    PrimExpr::sum(out.blocks[i][j].clone(), e.clone())
                };
            }
        }
        Ok(out)
    }

    /// Restriction to the given source and target positions.
    pub fn sub_block(&self, rows: &[usize], cols: &[usize]) -> LcaMorphism {
        LcaMorphism {
            source: self.source.select(cols),
            target: self.target.select(rows),
            blocks: rows
                .iter()
                .map(|&i| cols.iter().map(|&j| self.blocks[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn normal_forms(&self) -> Result<Vec<Vec<NormalForm>>, LcaError> {
        self.blocks
            .iter()
            .map(|row| row.iter().map(NormalForm::of_expr).collect())
            .collect()
    }

    pub fn normalize(&self) -> Result<LcaMorphism, LcaError> {
        let blocks = self
            .normal_forms()?
            .iter()
            .map(|row| row.iter().map(NormalForm::render).collect())
            .collect();
        Ok(LcaMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks,
        })
    }

    pub fn eval(&self, x: &LcaElement) -> Result<LcaElement, LcaError> {
        if x.parts.len() != self.source.len() {
            return Err(LcaError::ElementShapeMismatch(format!(
                "element has {} parts, source has {} summands",
                x.parts.len(),
                self.source.len()
            )));
        }
        let mut parts = Vec::with_capacity(self.target.len());
        for (i, t) in self.target.atoms().iter().enumerate() {
            let mut acc = AtomValue::zero_of(t);
            for (j, xj) in x.parts.iter().enumerate() {
                let y = eval_expr(&self.blocks[i][j], xj)?;
                acc = acc.add(&y);
            }
            parts.push(acc);
        }
        Ok(LcaElement { parts })
    }

    fn shift_depth(&self) -> usize {
        self.blocks
            .iter()
            .flatten()
            .map(PrimExpr::shift_count)
            .max()
            .unwrap_or(0)
    }

    /// True if every block is zero.
    pub fn is_zero(&self) -> Result<bool, LcaError> {
        let z = LcaMorphism::zero(&self.source, &self.target);
        Ok(equal_morphisms(self, &z)?.equal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismComparison {
    pub equal: bool,
    /// First block (target, source) where the normal forms differ.
    pub differing_block: Option<(usize, usize)>,
    pub elements_checked: usize,
}

/// Decides equality by normal forms, then confirms the verdict by evaluating
/// both sides on a generating family of each source summand. If the two
/// methods disagree the rewrite system is unsound and an error is returned.
pub fn equal_morphisms(f: &LcaMorphism, g: &LcaMorphism) -> Result<MorphismComparison, LcaError> {
    if f.source != g.source || f.target != g.target {
        return Err(LcaError::EndpointMismatch(format!(
            "comparing {} -> {} with {} -> {}",
            f.source, f.target, g.source, g.target
        )));
    }
    f.check()?;
    g.check()?;
    let depth = 1 + f.shift_depth() + g.shift_depth();
    let mut checked = 0;
    let mut differing_block = None;
    for i in 0..f.target.len() {
        for j in 0..f.source.len() {
            let (a, b) = (&f.blocks[i][j], &g.blocks[i][j]);
            if a == b {
                continue;
            }
            let nf_equal = NormalForm::of_expr(a)? == NormalForm::of_expr(b)?;
            let mut eval_equal = true;
            for x in generating_family(&f.source.atoms()[j], depth) {
                checked += 1;
                if eval_expr(a, &x)? != eval_expr(b, &x)? {
                    eval_equal = false;
                    break;
                }
            }
            if nf_equal != eval_equal {
                record_disagreement();
                return Err(LcaError::NormalFormVsEvalDisagreement(format!(
                    "block ({i},{j}): normal forms say {nf_equal}, evaluation says {eval_equal}; {a} vs {b}"
                )));
            }
            if !nf_equal && differing_block.is_none() {
                differing_block = Some((i, j));
            }
        }
    }
    Ok(MorphismComparison {
        equal: differing_block.is_none(),
        differing_block,
        elements_checked: checked,
    })
}

/// True iff `f` is a signed permutation of identical atoms.
pub fn is_rewiring_iso(f: &LcaMorphism) -> bool {
    signed_permutation_of(f).is_some()
}

/// The signed permutation realised by `f`, if it is one: entry `j` is the
/// target position and sign of source summand `j`.
pub fn signed_permutation_of(f: &LcaMorphism) -> Option<Vec<(usize, i8)>> {
    if f.source.len() != f.target.len() || f.check().is_err() {
        return None;
    }
    let nfs = f.normal_forms().ok()?;
    let n = f.source.len();
    let mut perm: Vec<Option<(usize, i8)>> = vec![None; n];
    let mut hit = vec![false; n];
    for (i, row) in nfs.iter().enumerate() {
        for (j, nf) in row.iter().enumerate() {
            if nf.is_zero() {
                continue;
            }
            let (s, t) = (&f.source.atoms()[j], &f.target.atoms()[i]);
            if s != t || perm[j].is_some() || hit[i] {
                return None;
            }
            let m = nf.single_matrix()?;
            let sign = if m.is_identity() {
                1
            } else if m.neg().is_identity() {
                -1
            } else {
                return None;
            };
            perm[j] = Some((i, sign));
            hit[i] = true;
        }
    }
    // Zero-dimensional summands carry no data; pair each with an identical
    // free target, preferring its own position.
    for j in 0..n {
        if perm[j].is_some() {
            continue;
        }
        let s = &f.source.atoms()[j];
        if s.dim() != 0 {
            return None;
        }
        let i = std::iter::once(j)
            .chain(0..n)
            .find(|&i| !hit[i] && f.target.atoms()[i] == *s)?;
        perm[j] = Some((i, 1));
        hit[i] = true;
    }
    perm.into_iter().collect()
}

/// An isomorphism together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iso {
    pub fwd: LcaMorphism,
    pub inv: LcaMorphism,
}

impl Iso {
    pub fn new(fwd: LcaMorphism, inv: LcaMorphism) -> Result<Iso, LcaError> {
        let iso = Iso { fwd, inv };
        iso.validate()?;
        Ok(iso)
    }

    pub fn validate(&self) -> Result<(), LcaError> {
        if self.fwd.source != self.inv.target || self.fwd.target != self.inv.source {
            return Err(LcaError::NotAnIso("endpoints of the inverse do not match".into()));
        }
        let left = self.inv.compose(&self.fwd)?;
        let right = self.fwd.compose(&self.inv)?;
        if !equal_morphisms(&left, &LcaMorphism::identity(&self.fwd.source))?.equal
            || !equal_morphisms(&right, &LcaMorphism::identity(&self.fwd.target))?.equal
        {
            return Err(LcaError::NotAnIso("the given inverse is not two-sided".into()));
        }
        Ok(())
    }

    pub fn identity(obj: &LcaObject) -> Iso {
        Iso {
            fwd: LcaMorphism::identity(obj),
            inv: LcaMorphism::identity(obj),
        }
    }

    pub fn signed_permutation(source: &LcaObject, perm: &[(usize, i8)]) -> Result<Iso, LcaError> {
        let fwd = LcaMorphism::signed_permutation(source, perm)?;
        let mut inv_perm = vec![(0, 1); perm.len()];
        for (i, (t, s)) in perm.iter().enumerate() {
            inv_perm[*t] = (i, *s);
        }
        let inv = LcaMorphism::signed_permutation(fwd.target(), &inv_perm)?;
        Ok(Iso { fwd, inv })
    }

    /// Inverts a morphism whose block pattern is a permutation with
    /// invertible blocks (signed permutations, invertible matrices on vector
    /// atoms, unimodular matrices elsewhere).
    pub fn from_morphism(f: &LcaMorphism) -> Result<Iso, LcaError> {
        let n = f.source.len();
        if f.target.len() != n {
            return Err(LcaError::NotAnIso("different number of summands".into()));
        }
        let nfs = f.normal_forms()?;
        let mut inv = LcaMorphism::zero(&f.target, &f.source);
        let mut used_rows = vec![false; n];
        for j in 0..n {
            let s = &f.source.atoms()[j];
            let nonzero: Vec<usize> = (0..n).filter(|&i| !nfs[i][j].is_zero()).collect();
            let i = match nonzero.as_slice() {
                [i] => *i,
                [] if s.dim() == 0 => match (0..n)
                    .find(|&i| !used_rows[i] && f.target.atoms()[i].dim() == 0)
                {
                    Some(i) => {
                        used_rows[i] = true;
                        let t = f.target.atoms()[i].clone();
                        inv.blocks[j][i] = PrimExpr::zero(&t, s);
                        continue;
                    }
                    None => return Err(LcaError::NotAnIso("no partner for a zero summand".into())),
                },
                _ => return Err(LcaError::NotAnIso(format!("column {j} is not monomial"))),
            };
            if used_rows[i] {
                return Err(LcaError::NotAnIso(format!("row {i} is hit twice")));
            }
            used_rows[i] = true;
            let t = &f.target.atoms()[i];
            let m = nfs[i][j]
                .single_matrix()
                .ok_or_else(|| LcaError::NotAnIso(format!("block ({i},{j}) is not a matrix")))?;
            if s.kind() != t.kind() {
                return Err(LcaError::NotAnIso(format!("block ({i},{j}) changes atom kind")));
            }
            let mi = m
                .inverse()
                .ok_or_else(|| LcaError::NotAnIso(format!("block ({i},{j}) is singular")))?;
            if s.kind() != AtomKind::Vect && !mi.is_integral() {
                return Err(LcaError::NotAnIso(format!("block ({i},{j}) is not unimodular")));
            }
            inv.blocks[j][i] = mat_block(t, s, mi);
        }
        Ok(Iso {
            fwd: f.clone(),
            inv,
        })
    }

    pub fn inverse(&self) -> Iso {
        Iso {
            fwd: self.inv.clone(),
            inv: self.fwd.clone(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Iso) -> Result<Iso, LcaError> {
        Ok(Iso {
            fwd: self.fwd.compose(&inner.fwd)?,
            inv: inner.inv.compose(&self.inv)?,
        })
    }

    pub fn direct_sum(&self, other: &Iso) -> Iso {
        Iso {
            fwd: self.fwd.direct_sum(&other.fwd),
            inv: self.inv.direct_sum(&other.inv),
        }
    }

    pub fn source(&self) -> &LcaObject {
        self.fwd.source()
    }

    pub fn target(&self) -> &LcaObject {
        self.fwd.target()
    }
}

/// `Mat` block, written as `Id` or `-Id` when possible.
pub fn mat_block(src: &LcaAtom, dst: &LcaAtom, m: RatMatrix) -> PrimExpr {
    if src == dst && m.is_identity() {
        PrimExpr::Id(src.clone())
    } else if src == dst && m.neg().is_identity() {
        PrimExpr::neg(PrimExpr::Id(src.clone()))
    } else {
        PrimExpr::mat(src.clone(), dst.clone(), m)
    }
}
