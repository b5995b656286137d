//! Seeded random instances for property tests and script fuzzing.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    make_triple, standard_module, BassSwanTriple, FreeModule, Order, RelationAInstance,
    SplitSequence, SwanMorphism,
};
use crate::matrix::{rat, RatMatrix, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rank<R: Rng>(rng: &mut R, max_rank: usize) -> usize {
    rng.gen_range(0..=max_rank)
}

/// `p / q` with `|p| ≤ bound` and `1 ≤ q ≤ bound`.
pub fn rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let p = rng.gen_range(-bound..=bound);
    let q = rng.gen_range(1..=bound.max(1));
    Rational::new(p.into(), q.into())
}

pub fn rational_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> RatMatrix {
    let entries = (0..rows * cols).map(|_| rational(rng, bound)).collect();
    RatMatrix::new(rows, cols, entries).expect("shape")
}

/// A random invertible rational matrix.
pub fn invertible<R: Rng>(rng: &mut R, n: usize, bound: i64) -> RatMatrix {
    loop {
        let m = rational_matrix(rng, n, n, bound);
        if m.determinant().is_some_and(|d| !d.is_zero()) {
            return m;
        }
    }
}

/// A random element of `GL_n(Z)`: a signed permutation times a few
/// elementary matrices with small entries.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = RatMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m.set(i, j, rat(if rng.gen_bool(0.5) { 1 } else { -1 }));
    }
    if n < 2 {
        return m;
    }
    for _ in 0..n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let mut e = RatMatrix::identity(n);
        e.set(i, j, rat(rng.gen_range(-2..=2)));
        m = e.mul(&m).expect("square");
    }
    m
}

fn module(n: usize, label: &str) -> FreeModule {
    if label.is_empty() {
        standard_module(Order::IntegerRing, n)
    } else {
        FreeModule::integral(n, label)
    }
}

/// `[Z^n, φ, Z^n]` with `n ≤ max_rank` and entries bounded by `bound`.
pub fn triple<R: Rng>(rng: &mut R, max_rank: usize, bound: i64) -> BassSwanTriple {
    let n = rank(rng, max_rank);
    let m = module(n, "");
    make_triple(m.clone(), invertible(rng, n, bound), m).expect("invertible")
}

/// `([P, φ, Q], [Q, ψ, R])` of a common random rank.
pub fn composable_pair<R: Rng>(rng: &mut R, max_rank: usize, bound: i64) -> (BassSwanTriple, BassSwanTriple) {
    let n = rank(rng, max_rank);
    let (p, q, r) = (module(n, "P"), module(n, "Q"), module(n, "R"));
    let t1 = make_triple(p, invertible(rng, n, bound), q.clone()).expect("invertible");
    let t2 = make_triple(q, invertible(rng, n, bound), r).expect("invertible");
    (t1, t2)
}

fn stack(top: &RatMatrix, bottom: &RatMatrix) -> RatMatrix {
    let mut rows: Vec<Vec<Rational>> = (0..top.rows()).map(|r| top.row(r).to_vec()).collect();
    rows.extend((0..bottom.rows()).map(|r| bottom.row(r).to_vec()));
    let cols = top.cols().max(bottom.cols());
    RatMatrix::new(rows.len(), cols, rows.concat()).expect("shape")
}

fn side_by_side(left: &RatMatrix, right: &RatMatrix) -> RatMatrix {
    stack(&left.transpose(), &right.transpose()).transpose()
}

/// The split sequence `Z^a -> Z^(a+b) -> Z^b` twisted by a unimodular `u`.
fn split(u: &RatMatrix, sub: FreeModule, mid: FreeModule, quot: FreeModule) -> SplitSequence {
    let (a, b) = (sub.rank, quot.rank);
    let n = a + b;
    let ui = u.inverse().expect("unimodular");
    let take_rows = |m: &RatMatrix, r0: usize, k: usize| m.block(r0, 0, k, n);
    let take_cols = |m: &RatMatrix, c0: usize, k: usize| m.block(0, c0, n, k);
    SplitSequence {
        sub,
        mid,
        quot,
        inc: take_cols(u, 0, a),
        proj: take_rows(&ui, a, b),
        retraction: take_rows(&ui, 0, a),
        section: take_cols(u, a, b),
    }
}

/// A split exact sequence of triples `T' -> T -> T''` with ranks `≤ max_rank`
/// for `T'` and `T''`. The middle isomorphism is block upper triangular in
/// twisted coordinates.
pub fn relation_a_instance<R: Rng>(rng: &mut R, max_rank: usize, bound: i64) -> RelationAInstance {
    let (a, b) = (rank(rng, max_rank), rank(rng, max_rank));
    let n = a + b;
    let (p1, p, p2) = (module(a, "P'"), module(n, "P"), module(b, "P''"));
    let (q1, q, q2) = (module(a, "Q'"), module(n, "Q"), module(b, "Q''"));
    let (up, uq) = (unimodular(rng, n), unimodular(rng, n));
    let (al1, al2) = (invertible(rng, a, bound), invertible(rng, b, bound));
    let x = rational_matrix(rng, a, b, bound);
    let block = stack(
        &side_by_side(&al1, &x),
        &side_by_side(&RatMatrix::zeros(b, a), &al2),
    );
    let alpha = uq
        .mul(&block)
        .and_then(|m| m.mul(&up.inverse().expect("unimodular")))
        .expect("shape");
    let t1 = make_triple(p1.clone(), al1, q1.clone()).expect("invertible");
    let t = make_triple(p.clone(), alpha, q.clone()).expect("invertible");
    let t2 = make_triple(p2.clone(), al2, q2.clone()).expect("invertible");
    let ps = split(&up, p1, p, p2);
    let qs = split(&uq, q1, q, q2);
    let am = SwanMorphism::new(t1, t.clone(), ps.inc.clone(), qs.inc.clone()).expect("commutes");
    let bm = SwanMorphism::new(t, t2, ps.proj.clone(), qs.proj.clone()).expect("commutes");
    RelationAInstance {
        a: am,
        b: bm,
        p_split: ps,
        q_split: qs,
    }
}
