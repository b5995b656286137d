#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::Rng;

use relk_core::algebra::standard_module;
use relk_core::lca::{LcaAtom, PrimExpr};
use relk_core::matrix::{rat, RatMatrix, Rational};
use relk_core::{make_triple, BassSwanTriple, FreeModule, Order};

pub fn z(n: usize) -> FreeModule {
    standard_module(Order::IntegerRing, n)
}

pub fn triple(phi: &[&[i64]]) -> BassSwanTriple {
    let m = z(phi.len());
    let phi = if phi.is_empty() {
        RatMatrix::zeros(0, 0)
    } else {
        RatMatrix::from_i64(phi)
    };
    make_triple(m.clone(), phi, m).expect("invertible")
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &RatMatrix) -> Rational {
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    let mut total = Rational::zero();
    for c in 0..n {
        let minor: Vec<Vec<Rational>> = (1..n)
            .map(|r| (0..n).filter(|&k| k != c).map(|k| m.get(r, k).clone()).collect())
            .collect();
        let minor = if n == 1 {
            RatMatrix::zeros(0, 0)
        } else {
            RatMatrix::from_rows(minor).expect("square minor")
        };
        let term = m.get(0, c) * cofactor_det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn abs(x: Rational) -> Rational {
    if x < Rational::zero() {
        -x
    } else {
        x
    }
}

pub const KINDS: [fn(FreeModule) -> LcaAtom; 5] = [
    LcaAtom::Disc,
    LcaAtom::Vect,
    LcaAtom::Torus,
    LcaAtom::CoprodDisc,
    LcaAtom::ProdTorus,
];

fn small_matrix<R: Rng>(rng: &mut R, n: usize, rational: bool) -> RatMatrix {
    let entries = (0..n * n)
        .map(|_| {
            let p = rng.gen_range(-3..=3);
            if rational {
                Rational::new(p.into(), rng.gen_range(1..=3i64).into())
            } else {
                rat(p)
            }
        })
        .collect();
    RatMatrix::new(n, n, entries).expect("shape")
}

/// A generator or literal between two atoms over the same module, falling
/// back to zero when no generator connects them.
fn leaf<R: Rng>(rng: &mut R, src: &LcaAtom, dst: &LcaAtom) -> PrimExpr {
    use LcaAtom::*;
    let p = src.module().expect("nonzero atom").clone();
    let n = p.lattice_dim();
    let options: Vec<PrimExpr> = match (src, dst) {
        (Disc(_), Vect(_)) => vec![PrimExpr::Iota(p)],
        (Vect(_), Torus(_)) => vec![PrimExpr::QuotT(p)],
        (Disc(_), CoprodDisc(_)) => vec![PrimExpr::InclCoprod0(p)],
        (ProdTorus(_), Torus(_)) => vec![PrimExpr::ProjProd0(p)],
        (a, b) if a == b => {
            let mut v = vec![
                PrimExpr::Id(a.clone()),
                PrimExpr::mat(a.clone(), a.clone(), small_matrix(rng, n, matches!(a, Vect(_)))),
            ];
            match a {
                CoprodDisc(_) => v.push(PrimExpr::ShiftCoprod(p)),
                ProdTorus(_) => v.push(PrimExpr::ShiftProd(p)),
                _ => {}
            }
            v
        }
        _ => vec![],
    };
    if options.is_empty() || rng.gen_bool(0.1) {
        return PrimExpr::zero(src, dst);
    }
    let k = rng.gen_range(0..options.len());
    options[k].clone()
}

/// A random well-typed expression `src -> dst` of bounded depth.
pub fn random_expr<R: Rng>(rng: &mut R, src: &LcaAtom, dst: &LcaAtom, depth: usize) -> PrimExpr {
    if depth == 0 {
        return leaf(rng, src, dst);
    }
    match rng.gen_range(0..4) {
        0 => leaf(rng, src, dst),
        1 => PrimExpr::sum(
            random_expr(rng, src, dst, depth - 1),
            random_expr(rng, src, dst, depth - 1),
        ),
        2 => PrimExpr::neg(random_expr(rng, src, dst, depth - 1)),
        _ => {
            let p = src.module().expect("nonzero atom").clone();
            let mid = KINDS[rng.gen_range(0..KINDS.len())](p);
            PrimExpr::comp(
                random_expr(rng, &mid, dst, depth - 1),
                random_expr(rng, src, &mid, depth - 1),
            )
        }
    }
}

pub fn random_atom<R: Rng>(rng: &mut R, p: &FreeModule) -> LcaAtom {
    KINDS[rng.gen_range(0..KINDS.len())](p.clone())
}

use relk_core::lca::{Iso, LcaObject};
use relk_core::nenashev::Nen33;
use relk_core::sequences::DoubleExact;

pub fn minus_identity(x: &LcaObject) -> Iso {
    let perm: Vec<(usize, i8)> = (0..x.len()).map(|i| (i, -1)).collect();
    Iso::signed_permutation(x, &perm).expect("signed identity")
}

/// `d` with one of its four arrows negated. The result is again a valid
/// double exact sequence on the same objects.
pub fn negate_arrow(d: &DoubleExact, yang: bool, sur: bool) -> DoubleExact {
    let (l, m, r) = (d.left(), d.mid(), d.right());
    let (xl, xm, xr) = if sur {
        (Iso::identity(l), Iso::identity(m), minus_identity(r))
    } else {
        (minus_identity(l), Iso::identity(m), Iso::identity(r))
    };
    if yang {
        d.transport_yang(&xl, &xm, &xr).expect("transport")
    } else {
        let yin = d.yin().transport(&xl, &xm, &xr).expect("transport");
        DoubleExact::new(yin, d.yang().clone()).expect("same objects")
    }
}

/// Every diagram obtained by negating one nonzero arrow, with a description.
pub fn arrow_negations(n: &Nen33) -> Vec<(Nen33, String)> {
    let mut out = Vec::new();
    for is_row in [true, false] {
        for k in 0..3 {
            let d = if is_row { &n.rows[k] } else { &n.cols[k] };
            for yang in [false, true] {
                for sur in [false, true] {
                    let side = if yang { d.yang() } else { d.yin() };
                    let arrow = if sur { side.sur() } else { side.inc() };
                    if arrow.is_zero().expect("comparable") {
                        continue;
                    }
                    let mut m = n.clone();
                    let slot = if is_row { &mut m.rows[k] } else { &mut m.cols[k] };
                    *slot = negate_arrow(d, yang, sur);
                    let what = format!(
                        "{} {k} {} {}",
                        if is_row { "row" } else { "column" },
                        if yang { "yang" } else { "yin" },
                        if sur { "surjection" } else { "inclusion" }
                    );
                    out.push((m, what));
                }
            }
        }
    }
    out
}
