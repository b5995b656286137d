//! Element-level evaluation: an independent oracle for morphism equality.
//!
//! Sequence atoms carry finitely supported sequences. Every generator is a
//! bounded shift or a coordinatewise map, so finitely supported inputs are
//! mapped to finitely supported outputs and suffice to separate distinct
//! normal forms.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::atom::LcaAtom;
use super::expr::PrimExpr;
use super::LcaError;
use crate::matrix::{frac, ratio, RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomValue {
    Zero,
    /// Integer coordinates.
    Disc(Vec<Rational>),
    Vect(Vec<Rational>),
    /// Coordinates in `[0, 1)`.
    Torus(Vec<Rational>),
    /// Index to nonzero integer vector.
    CoprodDisc(BTreeMap<usize, Vec<Rational>>),
    /// Index to nonzero torus vector; all other coordinates are zero.
    ProdTorus(BTreeMap<usize, Vec<Rational>>),
}

fn zero_vec(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn torus_vec(v: Vec<Rational>) -> Vec<Rational> {
    v.iter().map(frac).collect()
}

fn clean_seq(mut s: BTreeMap<usize, Vec<Rational>>) -> BTreeMap<usize, Vec<Rational>> {
    s.retain(|_, v| !is_zero_vec(v));
    s
}

impl AtomValue {
    pub fn zero_of(atom: &LcaAtom) -> AtomValue {
        let n = atom.dim();
        match atom {
            LcaAtom::Disc(_) => AtomValue::Disc(zero_vec(n)),
            LcaAtom::Vect(_) => AtomValue::Vect(zero_vec(n)),
            LcaAtom::Torus(_) => AtomValue::Torus(zero_vec(n)),
            LcaAtom::CoprodDisc(_) => AtomValue::CoprodDisc(BTreeMap::new()),
            LcaAtom::ProdTorus(_) => AtomValue::ProdTorus(BTreeMap::new()),
            LcaAtom::Zero => AtomValue::Zero,
        }
    }

    /// Checks that the value is a well-formed element of `atom`.
    pub fn check(&self, atom: &LcaAtom) -> Result<(), LcaError> {
        let n = atom.dim();
        let bad = |why: &str| Err(LcaError::ElementShapeMismatch(format!("{atom}: {why}")));
        let integral = |v: &[Rational]| v.iter().all(|x| x.is_integer());
        let reduced = |v: &[Rational]| v.iter().all(|x| x.numer().sign() != num_bigint::Sign::Minus && x.numer() < x.denom());
        match (atom, self) {
            (LcaAtom::Zero, AtomValue::Zero) => Ok(()),
            (LcaAtom::Disc(_), AtomValue::Disc(v)) => {
                if v.len() != n {
                    bad("wrong length")
                } else if !integral(v) {
                    bad("non-integral coordinate")
                } else {
                    Ok(())
                }
            }
            (LcaAtom::Vect(_), AtomValue::Vect(v)) => {
                if v.len() != n {
                    bad("wrong length")
                } else {
                    Ok(())
                }
            }
            (LcaAtom::Torus(_), AtomValue::Torus(v)) => {
                if v.len() != n {
                    bad("wrong length")
                } else if !reduced(v) {
                    bad("torus coordinate outside [0,1)")
                } else {
                    Ok(())
                }
            }
            (LcaAtom::CoprodDisc(_), AtomValue::CoprodDisc(s)) => {
                for v in s.values() {
                    if v.len() != n || !integral(v) || is_zero_vec(v) {
                        return bad("malformed sequence entry");
                    }
                }
                Ok(())
            }
            (LcaAtom::ProdTorus(_), AtomValue::ProdTorus(s)) => {
                for v in s.values() {
                    if v.len() != n || !reduced(v) || is_zero_vec(v) {
                        return bad("malformed sequence entry");
                    }
                }
                Ok(())
            }
            _ => bad("value of the wrong kind"),
        }
    }

    pub(crate) fn add(&self, other: &AtomValue) -> AtomValue {
        match (self, other) {
            (AtomValue::Disc(a), AtomValue::Disc(b)) => AtomValue::Disc(add_vec(a, b)),
            (AtomValue::Vect(a), AtomValue::Vect(b)) => AtomValue::Vect(add_vec(a, b)),
            (AtomValue::Torus(a), AtomValue::Torus(b)) => AtomValue::Torus(torus_vec(add_vec(a, b))),
            (AtomValue::CoprodDisc(a), AtomValue::CoprodDisc(b)) => {
                AtomValue::CoprodDisc(clean_seq(merge(a, b, |v| v)))
            }
            (AtomValue::ProdTorus(a), AtomValue::ProdTorus(b)) => {
                AtomValue::ProdTorus(clean_seq(merge(a, b, torus_vec)))
            }
            (AtomValue::Zero, x) | (x, AtomValue::Zero) => x.clone(),
            _ => AtomValue::Zero,
        }
    }

    fn neg(&self) -> AtomValue {
        let negv = |v: &Vec<Rational>| v.iter().map(|x| -x).collect::<Vec<_>>();
        match self {
            AtomValue::Zero => AtomValue::Zero,
            AtomValue::Disc(v) => AtomValue::Disc(negv(v)),
            AtomValue::Vect(v) => AtomValue::Vect(negv(v)),
            AtomValue::Torus(v) => AtomValue::Torus(torus_vec(negv(v))),
            AtomValue::CoprodDisc(s) => {
                AtomValue::CoprodDisc(s.iter().map(|(k, v)| (*k, negv(v))).collect())
            }
            AtomValue::ProdTorus(s) => AtomValue::ProdTorus(
                s.iter().map(|(k, v)| (*k, torus_vec(negv(v)))).collect(),
            ),
        }
    }
}

fn merge(
    a: &BTreeMap<usize, Vec<Rational>>,
    b: &BTreeMap<usize, Vec<Rational>>,
    fix: impl Fn(Vec<Rational>) -> Vec<Rational>,
) -> BTreeMap<usize, Vec<Rational>> {
    let mut out = a.clone();
    for (k, v) in b {
        let merged = match out.get(k) {
            Some(w) => fix(add_vec(w, v)),
            None => v.clone(),
        };
        out.insert(*k, merged);
    }
    out
}

fn apply_mat(m: &RatMatrix, x: &AtomValue) -> AtomValue {
    match x {
        AtomValue::Zero => AtomValue::Zero,
        AtomValue::Disc(v) => AtomValue::Disc(m.apply(v)),
        AtomValue::Vect(v) => AtomValue::Vect(m.apply(v)),
        AtomValue::Torus(v) => AtomValue::Torus(torus_vec(m.apply(v))),
        AtomValue::CoprodDisc(s) => AtomValue::CoprodDisc(clean_seq(
            s.iter().map(|(k, v)| (*k, m.apply(v))).collect(),
        )),
        AtomValue::ProdTorus(s) => AtomValue::ProdTorus(clean_seq(
            s.iter().map(|(k, v)| (*k, torus_vec(m.apply(v)))).collect(),
        )),
    }
}

/// Evaluates an atom morphism on an element of its source atom.
pub fn eval_expr(e: &PrimExpr, x: &AtomValue) -> Result<AtomValue, LcaError> {
    x.check(&e.src())?;
    eval_unchecked(e, x)
}

fn eval_unchecked(e: &PrimExpr, x: &AtomValue) -> Result<AtomValue, LcaError> {
    let mismatch = || {
        Err(LcaError::ElementShapeMismatch(format!(
            "cannot apply {e} to {x:?}"
        )))
    };
    Ok(match e {
        PrimExpr::Zero { dst, .. } => AtomValue::zero_of(dst),
        PrimExpr::Id(_) => x.clone(),
        PrimExpr::Iota(_) => match x {
            AtomValue::Disc(v) => AtomValue::Vect(v.clone()),
            _ => return mismatch(),
        },
        PrimExpr::QuotT(_) => match x {
            AtomValue::Vect(v) => AtomValue::Torus(torus_vec(v.clone())),
            _ => return mismatch(),
        },
        PrimExpr::ShiftCoprod(_) => match x {
            AtomValue::CoprodDisc(s) => AtomValue::CoprodDisc(
                s.iter()
                    .filter(|(k, _)| **k > 0)
                    .map(|(k, v)| (k - 1, v.clone()))
                    .collect(),
            ),
            _ => return mismatch(),
        },
        PrimExpr::InclCoprod0(_) => match x {
            AtomValue::Disc(v) => {
                AtomValue::CoprodDisc(clean_seq(BTreeMap::from([(0, v.clone())])))
            }
            _ => return mismatch(),
        },
        PrimExpr::ShiftProd(_) => match x {
            AtomValue::ProdTorus(s) => {
                AtomValue::ProdTorus(s.iter().map(|(k, v)| (k + 1, v.clone())).collect())
            }
            _ => return mismatch(),
        },
        PrimExpr::ProjProd0(p) => match x {
            AtomValue::ProdTorus(s) => AtomValue::Torus(
                s.get(&0)
                    .cloned()
                    .unwrap_or_else(|| zero_vec(p.lattice_dim())),
            ),
            _ => return mismatch(),
        },
        PrimExpr::Mat { src, dst, matrix } => {
            if src.dim() == 0 || dst.dim() == 0 {
                AtomValue::zero_of(dst)
            } else {
                apply_mat(matrix, x)
            }
        }
        PrimExpr::Neg(inner) => eval_unchecked(inner, x)?.neg(),
        PrimExpr::Comp(outer, inner) => eval_unchecked(outer, &eval_unchecked(inner, x)?)?,
        PrimExpr::Sum(a, b) => eval_unchecked(a, x)?.add(&eval_unchecked(b, x)?),
    })
}

const VECTOR_SCALES: [(i64, i64); 3] = [(1, 1), (1, 1_000_003), (1, 998_244_353)];
const TORUS_SCALES: [(i64, i64); 3] = [(1, 2), (1, 1_000_003), (1, 998_244_353)];

/// Test elements of an atom: scaled basis vectors, placed at sequence
/// indices `0..=depth` for sequence atoms.
pub fn generating_family(atom: &LcaAtom, depth: usize) -> Vec<AtomValue> {
    let n = atom.dim();
    let basis = |i: usize, s: &Rational| {
        let mut v = zero_vec(n);
        v[i] = s.clone();
        v
    };
    let one = [Rational::from_integer(1.into())];
    let vs: Vec<Rational> = VECTOR_SCALES.iter().map(|(a, b)| ratio(*a, *b)).collect();
    let ts: Vec<Rational> = TORUS_SCALES.iter().map(|(a, b)| ratio(*a, *b)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        match atom {
            LcaAtom::Disc(_) => out.push(AtomValue::Disc(basis(i, &one[0]))),
            LcaAtom::Vect(_) => out.extend(vs.iter().map(|s| AtomValue::Vect(basis(i, s)))),
            LcaAtom::Torus(_) => out.extend(ts.iter().map(|s| AtomValue::Torus(basis(i, s)))),
            LcaAtom::CoprodDisc(_) => {
                for k in 0..=depth {
                    out.push(AtomValue::CoprodDisc(BTreeMap::from([(k, basis(i, &one[0]))])));
                }
            }
            LcaAtom::ProdTorus(_) => {
                for k in 0..=depth {
                    out.extend(
                        ts.iter()
                            .map(|s| AtomValue::ProdTorus(BTreeMap::from([(k, basis(i, s))]))),
                    );
                }
            }
            LcaAtom::Zero => {}
        }
    }
    out
}

/// An element of a direct sum: one value per summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcaElement {
    pub parts: Vec<AtomValue>,
}
