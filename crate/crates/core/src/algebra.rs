//! Orders, free modules and Bass–Swan triples.
//!
//! The relative group is presented by triples `[P, phi, Q]` with `phi` an
//! isomorphism `P_R -> Q_R`. Here `phi` is an exact rational matrix: every
//! check the engine performs is an algebraic identity, and rational points
//! are dense in the real ones, so nothing is lost by staying in `Q`.
//!
//! Orders are `Z` or a product `Z^k`. A free module of rank `n` over `Z^k`
//! has an underlying lattice of dimension `n * k`, laid out factor-major:
//! coordinates `f*n .. (f+1)*n` belong to factor `f`. Maps of modules over a
//! product order are therefore block diagonal.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::matrix::{RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("middle modules differ: {left} vs {right}")]
    MiddleMismatch { left: String, right: String },
    #[error("modules live over different orders")]
    OrderMismatch,
    #[error("matrix is not block diagonal over the product order")]
    NotBlockDiagonal,
    #[error("module map must have integer entries")]
    NotIntegral,
    #[error("split data invalid: {0}")]
    InvalidSplit(String),
    #[error("morphism square does not commute")]
    NotCommuting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    IntegerRing,
    ProductOfIntegerRings(usize),
}

impl Order {
    /// Number of `Z` factors, i.e. `dim_Q` of the ambient algebra.
    pub fn factors(self) -> usize {
        match self {
            Order::IntegerRing => 1,
            Order::ProductOfIntegerRings(k) => k,
        }
    }

    pub fn product(k: usize) -> Result<Order, AlgebraError> {
        if k == 0 {
            return Err(AlgebraError::DimensionMismatch(
                "a product order needs at least one factor".into(),
            ));
        }
        Ok(Order::ProductOfIntegerRings(k))
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::IntegerRing => "Z".serialize(s),
            Order::ProductOfIntegerRings(k) => json!({ "product": k }).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        match &v {
            Value::String(s) if s == "Z" => Ok(Order::IntegerRing),
            Value::Object(o) => {
                let k = o
                    .get("product")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| D::Error::custom("expected {\"product\": k}"))?;
                Order::product(k as usize).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom(format!("unknown order {v}"))),
        }
    }
}

fn is_integer_ring(o: &Order) -> bool {
    *o == Order::IntegerRing
}

fn integer_ring() -> Order {
    Order::IntegerRing
}

/// A free module `order^rank`. Identity is nominal: two modules are the same
/// only if label, rank and order agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeModule {
    pub rank: usize,
    pub label: String,
    #[serde(default = "integer_ring", skip_serializing_if = "is_integer_ring")]
    pub order: Order,
}

impl FreeModule {
    pub fn new(order: Order, rank: usize, label: impl Into<String>) -> Self {
        Self {
            order,
            rank,
            label: label.into(),
        }
    }

    pub fn integral(rank: usize, label: impl Into<String>) -> Self {
        Self::new(Order::IntegerRing, rank, label)
    }

    pub fn zero(order: Order) -> Self {
        Self::new(order, 0, "0")
    }

    /// Dimension of the underlying `Z`-lattice.
    pub fn lattice_dim(&self) -> usize {
        self.rank * self.order.factors()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }
}

impl fmt::Display for FreeModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

fn check_block_diagonal(
    order: Order,
    m: &RatMatrix,
    row_rank: usize,
    col_rank: usize,
) -> Result<(), AlgebraError> {
    let k = order.factors();
    if k == 1 {
        return Ok(());
    }
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if r / row_rank.max(1) != c / col_rank.max(1) && !m.get(r, c).is_zero() {
                return Err(AlgebraError::NotBlockDiagonal);
            }
        }
    }
    Ok(())
}

/// A generator `[P, phi, Q]` of the relative group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BassSwanTriple {
    p: FreeModule,
    phi: RatMatrix,
    q: FreeModule,
}

pub fn make_triple(
    p: FreeModule,
    phi: RatMatrix,
    q: FreeModule,
) -> Result<BassSwanTriple, AlgebraError> {
    if p.order != q.order {
        return Err(AlgebraError::OrderMismatch);
    }
    let n = p.lattice_dim();
    if q.lattice_dim() != n || phi.rows() != n || phi.cols() != n {
        return Err(AlgebraError::DimensionMismatch(format!(
            "phi is {}x{} but P, Q have lattice dimensions {} and {}",
            phi.rows(),
            phi.cols(),
            n,
            q.lattice_dim()
        )));
    }
    check_block_diagonal(p.order, &phi, q.rank, p.rank)?;
    if phi.determinant().is_none_or(|d| d.is_zero()) {
        return Err(AlgebraError::SingularMatrix);
    }
    Ok(BassSwanTriple { p, phi, q })
}

impl BassSwanTriple {
    pub fn p(&self) -> &FreeModule {
        &self.p
    }

    pub fn q(&self) -> &FreeModule {
        &self.q
    }

    pub fn phi(&self) -> &RatMatrix {
        &self.phi
    }

    pub fn order(&self) -> Order {
        self.p.order
    }

    pub fn phi_inverse(&self) -> RatMatrix {
        self.phi.inverse().expect("validated triple has invertible phi")
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "P": self.p,
            "phi": self.phi.rows_to_json(),
            "Q": self.q,
        });
        if self.p.order != Order::IntegerRing {
            v["order"] = serde_json::to_value(self.p.order).expect("order serializes");
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<BassSwanTriple, String> {
        let order: Order = match v.get("order") {
            Some(o) => serde_json::from_value(o.clone()).map_err(|e| e.to_string())?,
            None => Order::IntegerRing,
        };
        let module = |key: &str| -> Result<FreeModule, String> {
            let m = v.get(key).ok_or_else(|| format!("missing {key}"))?;
            let rank = m["rank"]
                .as_u64()
                .ok_or_else(|| format!("{key}.rank must be a nonnegative integer"))?;
            let label = m["label"]
                .as_str()
                .ok_or_else(|| format!("{key}.label must be a string"))?;
            Ok(FreeModule::new(order, rank as usize, label))
        };
        let p = module("P")?;
        let q = module("Q")?;
        let phi_v = v.get("phi").ok_or("missing phi")?;
        let mut phi = RatMatrix::rows_from_json(phi_v)?;
        if phi.rows() == 0 {
            phi = RatMatrix::zeros(0, 0);
        }
        make_triple(p, phi, q).map_err(|e| e.to_string())
    }
}

impl Serialize for BassSwanTriple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BassSwanTriple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        BassSwanTriple::from_json(&v).map_err(D::Error::custom)
    }
}

/// Relation B: `[P, a, Q] + [Q, b, S] = [P, b a, S]`.
pub fn relation_b_combine(
    t1: &BassSwanTriple,
    t2: &BassSwanTriple,
) -> Result<BassSwanTriple, AlgebraError> {
    if t1.q != t2.p {
        return Err(AlgebraError::MiddleMismatch {
            left: t1.q.label.clone(),
            right: t2.p.label.clone(),
        });
    }
    let phi = t2
        .phi
        .mul(&t1.phi)
        .map_err(|e| AlgebraError::DimensionMismatch(e.to_string()))?;
    make_triple(t1.p.clone(), phi, t2.q.clone())
}

/// A morphism of triples: module maps `p: P1 -> P2`, `q: Q1 -> Q2` with
/// `phi2 p = q phi1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwanMorphism {
    pub source: BassSwanTriple,
    pub target: BassSwanTriple,
    pub p: RatMatrix,
    pub q: RatMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutesReport {
    pub commutes: bool,
    /// `phi2 p - q phi1`; zero iff the square commutes.
    pub defect: RatMatrix,
}

pub fn check_swan_morphism(m: &SwanMorphism) -> Result<CommutesReport, AlgebraError> {
    let (s, t) = (&m.source, &m.target);
    let want = |mat: &RatMatrix, rows: usize, cols: usize, what: &str| {
        if mat.rows() == rows && mat.cols() == cols {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch(format!(
                "{what} is {}x{}, expected {rows}x{cols}",
                mat.rows(),
                mat.cols()
            )))
        }
    };
    want(&m.p, t.p.lattice_dim(), s.p.lattice_dim(), "p")?;
    want(&m.q, t.q.lattice_dim(), s.q.lattice_dim(), "q")?;
    let lhs = t.phi.mul(&m.p).expect("shapes checked");
    let rhs = m.q.mul(&s.phi).expect("shapes checked");
    let defect = lhs.sub(&rhs).expect("shapes checked");
    Ok(CommutesReport {
        commutes: defect.is_zero(),
        defect,
    })
}

impl SwanMorphism {
    pub fn new(
        source: BassSwanTriple,
        target: BassSwanTriple,
        p: RatMatrix,
        q: RatMatrix,
    ) -> Result<SwanMorphism, AlgebraError> {
        if !p.is_integral() || !q.is_integral() {
            return Err(AlgebraError::NotIntegral);
        }
        let m = SwanMorphism {
            source,
            target,
            p,
            q,
        };
        check_block_diagonal(m.source.order(), &m.p, m.target.p.rank, m.source.p.rank)?;
        check_block_diagonal(m.source.order(), &m.q, m.target.q.rank, m.source.q.rank)?;
        if !check_swan_morphism(&m)?.commutes {
            return Err(AlgebraError::NotCommuting);
        }
        Ok(m)
    }
}

/// `|det phi|`, the covolume invariant. For a product order this is the
/// product over factors of the block determinants, which equals the full
/// determinant because `phi` is block diagonal.
pub fn det_invariant(t: &BassSwanTriple) -> Rational {
    det_invariant_per_factor(t)
        .into_iter()
        .fold(Rational::from_integer(1.into()), |acc, d| acc * d)
}

pub fn det_invariant_per_factor(t: &BassSwanTriple) -> Vec<Rational> {
    let k = t.order().factors();
    let n = t.p.rank;
    (0..k)
        .map(|f| {
            t.phi
                .block(f * n, f * n, n, n)
                .determinant()
                .expect("square block")
                .abs()
        })
        .collect()
}

/// The triple `[A^n, phi, A^n]` attached to an automorphism of `A_R^n`.
pub fn delta(phi: &RatMatrix, n: usize) -> Result<BassSwanTriple, AlgebraError> {
    delta_over(Order::IntegerRing, phi, n)
}

pub fn delta_over(order: Order, phi: &RatMatrix, n: usize) -> Result<BassSwanTriple, AlgebraError> {
    let m = standard_module(order, n);
    make_triple(m.clone(), phi.clone(), m)
}

/// `A^n` with its conventional label.
pub fn standard_module(order: Order, n: usize) -> FreeModule {
    let base = match order {
        Order::IntegerRing => "Z".to_string(),
        Order::ProductOfIntegerRings(k) => format!("Z{k}"),
    };
    let label = match n {
        0 => "0".to_string(),
        1 => base,
        _ => format!("{base}^{n}"),
    };
    FreeModule::new(order, n, label)
}

/// Class of a free module in `K_0`: its rank in each factor.
pub fn k0_class(p: &FreeModule) -> Vec<i64> {
    vec![p.rank as i64; p.order.factors()]
}

/// A split short exact sequence of free modules `sub -> mid -> quot`,
/// witnessed by a retraction of the inclusion and a section of the
/// projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSequence {
    pub sub: FreeModule,
    pub mid: FreeModule,
    pub quot: FreeModule,
    pub inc: RatMatrix,
    pub proj: RatMatrix,
    pub retraction: RatMatrix,
    pub section: RatMatrix,
}

impl SplitSequence {
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let bad = |s: &str| Err(AlgebraError::InvalidSplit(s.to_string()));
        let (a, b, r, t) = (&self.inc, &self.proj, &self.retraction, &self.section);
        for m in [a, b, r, t] {
            if !m.is_integral() {
                return Err(AlgebraError::NotIntegral);
            }
        }
        let (ns, nm, nq) = (
            self.sub.lattice_dim(),
            self.mid.lattice_dim(),
            self.quot.lattice_dim(),
        );
        if (a.rows(), a.cols()) != (nm, ns)
            || (b.rows(), b.cols()) != (nq, nm)
            || (r.rows(), r.cols()) != (ns, nm)
            || (t.rows(), t.cols()) != (nm, nq)
        {
            return bad("shapes");
        }
        if !r.mul(a).expect("shape").is_identity() {
            return bad("retraction is not a left inverse of the inclusion");
        }
        if !b.mul(t).expect("shape").is_identity() {
            return bad("section is not a right inverse of the projection");
        }
        if !b.mul(a).expect("shape").is_zero() {
            return bad("projection after inclusion is nonzero");
        }
        let sum = a
            .mul(r)
            .expect("shape")
            .add(&t.mul(b).expect("shape"))
            .expect("shape");
        if !sum.is_identity() {
            return bad("inclusion-retraction and section-projection do not sum to 1");
        }
        Ok(())
    }
}

/// A Relation-A instance: `a: T' -> T`, `b: T -> T''` with split exact
/// underlying sequences on both the `P` and the `Q` side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationAInstance {
    pub a: SwanMorphism,
    pub b: SwanMorphism,
    pub p_split: SplitSequence,
    pub q_split: SplitSequence,
}

impl RelationAInstance {
    pub fn validate(&self) -> Result<(), AlgebraError> {
        if self.a.target != self.b.source {
            return Err(AlgebraError::MiddleMismatch {
                left: self.a.target.p.label.clone(),
                right: self.b.source.p.label.clone(),
            });
        }
        for m in [&self.a, &self.b] {
            if !check_swan_morphism(m)?.commutes {
                return Err(AlgebraError::NotCommuting);
            }
        }
        self.p_split.validate()?;
        self.q_split.validate()?;
        let (sub, mid, quot) = (&self.a.source, &self.a.target, &self.b.target);
        let ps = &self.p_split;
        let qs = &self.q_split;
        if ps.sub != sub.p || ps.mid != mid.p || ps.quot != quot.p {
            return Err(AlgebraError::InvalidSplit("P-side modules".into()));
        }
        if qs.sub != sub.q || qs.mid != mid.q || qs.quot != quot.q {
            return Err(AlgebraError::InvalidSplit("Q-side modules".into()));
        }
        if ps.inc != self.a.p || ps.proj != self.b.p || qs.inc != self.a.q || qs.proj != self.b.q {
            return Err(AlgebraError::InvalidSplit(
                "split maps differ from the morphism components".into(),
            ));
        }
        Ok(())
    }

    pub fn sub(&self) -> &BassSwanTriple {
        &self.a.source
    }

    pub fn mid(&self) -> &BassSwanTriple {
        &self.a.target
    }

    pub fn quot(&self) -> &BassSwanTriple {
        &self.b.target
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, ratio};

    fn z(label: &str) -> FreeModule {
        FreeModule::integral(1, label)
    }

    #[test]
    fn make_triple_examples() {
        assert!(make_triple(z("Z"), RatMatrix::from_i64(&[&[2]]), z("Z")).is_ok());
        let z2 = FreeModule::integral(2, "Z^2");
        assert!(make_triple(
            z2.clone(),
            RatMatrix::from_i64(&[&[1, 1], &[0, 1]]),
            z2.clone()
        )
        .is_ok());
        assert_eq!(
            make_triple(z("Z"), RatMatrix::from_i64(&[&[0]]), z("Z")),
            Err(AlgebraError::SingularMatrix)
        );
        assert!(matches!(
            make_triple(z2, RatMatrix::from_i64(&[&[1]]), z("Z")),
            Err(AlgebraError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn relation_b_examples() {
        let t1 = make_triple(z("Z"), RatMatrix::from_i64(&[&[2]]), z("Z")).unwrap();
        let t2 = make_triple(z("Z"), RatMatrix::from_i64(&[&[3]]), z("Z")).unwrap();
        let c = relation_b_combine(&t1, &t2).unwrap();
        assert_eq!(c.phi(), &RatMatrix::from_i64(&[&[6]]));

        let id = make_triple(z("P"), RatMatrix::identity(1), z("Q")).unwrap();
        let t = make_triple(z("Q"), RatMatrix::from_i64(&[&[5]]), z("R")).unwrap();
        let c = relation_b_combine(&id, &t).unwrap();
        assert_eq!(c.p(), &z("P"));
        assert_eq!(c.phi(), t.phi());

        assert!(matches!(
            relation_b_combine(&t, &id),
            Err(AlgebraError::MiddleMismatch { .. })
        ));
    }

    #[test]
    fn same_rank_different_label_does_not_glue() {
        let t1 = make_triple(z("Q"), RatMatrix::identity(1), z("Q")).unwrap();
        let t2 = make_triple(z("Q'"), RatMatrix::identity(1), z("Q'")).unwrap();
        assert!(relation_b_combine(&t1, &t2).is_err());
    }

    #[test]
    fn swan_morphism_examples() {
        let t2 = make_triple(z("Z"), RatMatrix::from_i64(&[&[2]]), z("Z")).unwrap();
        let t3 = make_triple(z("Z"), RatMatrix::from_i64(&[&[3]]), z("Z")).unwrap();
        let one = RatMatrix::identity(1);
        let m = SwanMorphism {
            source: t2.clone(),
            target: t2.clone(),
            p: one.clone(),
            q: one.clone(),
        };
        assert!(check_swan_morphism(&m).unwrap().commutes);
        let m = SwanMorphism {
            source: t2,
            target: t3,
            p: one.clone(),
            q: one,
        };
        let report = check_swan_morphism(&m).unwrap();
        assert!(!report.commutes);
        assert_eq!(report.defect, RatMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn det_invariant_examples() {
        let t = make_triple(z("Z"), RatMatrix::from_i64(&[&[2]]), z("Z")).unwrap();
        assert_eq!(det_invariant(&t), rat(2));
        let t = make_triple(z("Z"), RatMatrix::from_i64(&[&[-2]]), z("Z")).unwrap();
        assert_eq!(det_invariant(&t), rat(2));
        let z2 = FreeModule::integral(2, "Z^2");
        let t = make_triple(z2.clone(), RatMatrix::from_i64(&[&[1, 1], &[0, 1]]), z2).unwrap();
        assert_eq!(det_invariant(&t), rat(1));
    }

    #[test]
    fn delta_examples() {
        let t = delta(&RatMatrix::from_i64(&[&[5]]), 1).unwrap();
        assert_eq!(t.p().rank, 1);
        assert_eq!(t.p(), t.q());
        assert_eq!(t.phi(), &RatMatrix::from_i64(&[&[5]]));
        let t = delta(&RatMatrix::identity(3), 3).unwrap();
        assert_eq!(t.p().rank, 3);
        assert_eq!(
            delta(&RatMatrix::from_i64(&[&[0]]), 1),
            Err(AlgebraError::SingularMatrix)
        );
    }

    #[test]
    fn k0_class_examples() {
        assert_eq!(k0_class(&FreeModule::integral(3, "Z^3")), vec![3]);
        assert_eq!(k0_class(&FreeModule::zero(Order::IntegerRing)), vec![0]);
        let m = FreeModule::new(Order::ProductOfIntegerRings(2), 2, "M");
        assert_eq!(k0_class(&m), vec![2, 2]);
    }

    #[test]
    fn product_order_needs_block_diagonal_phi() {
        let o = Order::ProductOfIntegerRings(2);
        let m = FreeModule::new(o, 1, "M");
        let good = RatMatrix::from_rows(vec![vec![rat(2), rat(0)], vec![rat(0), ratio(1, 3)]]).unwrap();
        let t = make_triple(m.clone(), good, m.clone()).unwrap();
        assert_eq!(det_invariant_per_factor(&t), vec![rat(2), ratio(1, 3)]);
        assert_eq!(det_invariant(&t), ratio(2, 3));
        let bad = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(make_triple(m.clone(), bad, m), Err(AlgebraError::NotBlockDiagonal));
    }

    #[test]
    fn triple_json_round_trip() {
        let t = make_triple(z("Z"), RatMatrix::from_rows(vec![vec![ratio(-3, 4)]]).unwrap(), z("Z"))
            .unwrap();
        let v = t.to_json();
        assert_eq!(v["phi"], json!([[[-3, 4]]]));
        assert_eq!(BassSwanTriple::from_json(&v).unwrap(), t);
        let zero = make_triple(
            FreeModule::zero(Order::IntegerRing),
            RatMatrix::zeros(0, 0),
            FreeModule::zero(Order::IntegerRing),
        )
        .unwrap();
        assert_eq!(BassSwanTriple::from_json(&zero.to_json()).unwrap(), zero);
    }

    #[test]
    fn split_sequence_validation() {
        let s = SplitSequence {
            sub: z("A"),
            mid: FreeModule::integral(2, "B"),
            quot: z("C"),
            inc: RatMatrix::from_i64(&[&[1], &[0]]),
            proj: RatMatrix::from_i64(&[&[0, 1]]),
            retraction: RatMatrix::from_i64(&[&[1, 0]]),
            section: RatMatrix::from_i64(&[&[0], &[1]]),
        };
        assert!(s.validate().is_ok());
        let mut broken = s.clone();
        broken.proj = RatMatrix::from_i64(&[&[1, 1]]);
        assert!(broken.validate().is_err());
    }
}
