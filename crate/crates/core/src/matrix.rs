//! Dense matrices over exact rationals.
//!
//! Every map in the engine that carries numeric data (the Bass–Swan
//! isomorphism, split data, coefficients inside morphism expressions) is a
//! `RatMatrix`. Arithmetic is exact; nothing here ever touches a float.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("cannot multiply {0}x{1} by {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("ragged rows")]
    Ragged,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical representative of `x` modulo 1, in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, value: Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = value.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::Ragged);
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry convenience constructor; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .expect("ragged literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Shape(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(MatrixError::Shape(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> RatMatrix {
        self.map(|e| -e)
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        self.map(|e| e * s)
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Copy of the block with rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> RatMatrix {
        let mut out = RatMatrix::zeros(nr, nc);
        for r in 0..nr {
            for c in 0..nc {
                out.set(r, c, self.get(r0 + r, c0 + c).clone());
            }
        }
        out
    }

    pub fn block_diag(blocks: &[RatMatrix]) -> RatMatrix {
        let rows = blocks.iter().map(RatMatrix::rows).sum();
        let cols = blocks.iter().map(RatMatrix::cols).sum();
        let mut out = RatMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    ///
    /// Each row is first scaled by the lcm of its denominators so the
    /// elimination runs over the integers; the scale factors are divided
    /// out at the end.
    pub fn determinant(&self) -> Option<Rational> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Rational::one());
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for r in 0..n {
            let l = self
                .row(r)
                .iter()
                .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
            scale *= &l;
            a.push(
                self.row(r)
                    .iter()
                    .map(|e| (e * Rational::from_integer(l.clone())).to_integer())
                    .collect(),
            );
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Some(Rational::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Some(Rational::new(sign * &a[n - 1][n - 1], scale))
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).clone();
            for c in 0..n {
                let v = a.get(col, c) / &p;
                a.set(col, c, v);
                let v = inv.get(col, c) / &p;
                inv.set(col, c, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = a.get(r, c) - &factor * a.get(col, c);
                    a.set(r, c, v);
                    let v = inv.get(r, c) - &factor * inv.get(col, c);
                    inv.set(r, c, v);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn max_abs_entry_height(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.numer().abs().max(e.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

pub fn rational_to_json(x: &Rational) -> Value {
    fn int(v: &BigInt) -> Value {
        match v.to_i64() {
            Some(i) => Value::from(i),
            None => Value::from(v.to_string()),
        }
    }
    Value::Array(vec![int(x.numer()), int(x.denom())])
}

pub fn rational_from_json(v: &Value) -> Result<Rational, String> {
    fn int(v: &Value) -> Result<BigInt, String> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| format!("non-integer number {n}")),
            Value::String(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
            other => Err(format!("expected integer, got {other}")),
        }
    }
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let n = int(&pair[0])?;
            let d = int(&pair[1])?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            let q = Rational::new(n.clone(), d.clone());
            if q.numer() != &n || q.denom() != &d {
                return Err(format!("rational [{n}, {d}] is not in lowest terms"));
            }
            Ok(q)
        }
        Value::Number(_) | Value::String(_) => Ok(Rational::from_integer(int(v)?)),
        other => Err(format!("expected [num, den], got {other}")),
    }
}

impl RatMatrix {
    pub fn rows_to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|r| Value::Array(self.row(r).iter().map(rational_to_json).collect()))
                .collect(),
        )
    }

    pub fn rows_from_json(v: &Value) -> Result<RatMatrix, String> {
        let rows = v.as_array().ok_or("matrix must be an array of rows")?;
        let parsed = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| "matrix row must be an array".to_string())?
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        RatMatrix::from_rows(parsed).map_err(|e| e.to_string())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "data": self.rows_to_json(),
        });
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let rows = v["rows"].as_u64().ok_or_else(|| D::Error::custom("missing rows"))? as usize;
        let cols = v["cols"].as_u64().ok_or_else(|| D::Error::custom("missing cols"))? as usize;
        let m = RatMatrix::rows_from_json(&v["data"]).map_err(D::Error::custom)?;
        if m.rows == rows && m.cols == cols {
            Ok(m)
        } else if m.entries.is_empty() && rows * cols == 0 {
            Ok(RatMatrix::zeros(rows, cols))
        } else {
            Err(D::Error::custom(format!(
                "declared {rows}x{cols} but data is {}x{}",
                m.rows, m.cols
            )))
        }
    }
}

/// Serde adapter for a single rational as `[num, den]`.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        rational_to_json(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        rational_from_json(&v).map_err(D::Error::custom)
    }
}

/// Serde adapter for a vector of rationals.
pub mod rational_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        Value::Array(xs.iter().map(rational_to_json).collect()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Value::deserialize(d)?;
        v.as_array()
            .ok_or_else(|| D::Error::custom("expected array"))?
            .iter()
            .map(|x| rational_from_json(x).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small_cases() {
        assert_eq!(RatMatrix::from_i64(&[&[2]]).determinant(), Some(rat(2)));
        assert_eq!(
            RatMatrix::from_i64(&[&[1, 1], &[0, 1]]).determinant(),
            Some(rat(1))
        );
        assert_eq!(
            RatMatrix::from_i64(&[&[0, 1], &[1, 0]]).determinant(),
            Some(rat(-1))
        );
        assert_eq!(
            RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).determinant(),
            Some(rat(0))
        );
        assert_eq!(RatMatrix::zeros(0, 0).determinant(), Some(rat(1)));
        assert_eq!(RatMatrix::zeros(2, 3).determinant(), None);
    }

    #[test]
    fn determinant_with_fractions() {
        let m = RatMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 4), ratio(1, 5)],
        ])
        .unwrap();
        // 1/10 - 1/12 = 1/60
        assert_eq!(m.determinant(), Some(ratio(1, 60)));
    }

    #[test]
    fn inverse_round_trips() {
        let m = RatMatrix::from_rows(vec![
            vec![ratio(3, 7), rat(2), rat(0)],
            vec![rat(1), ratio(-1, 2), rat(5)],
            vec![rat(0), rat(4), ratio(9, 11)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(&ratio(3, 2)), ratio(1, 2));
        assert_eq!(frac(&ratio(-1, 3)), ratio(2, 3));
        assert_eq!(frac(&rat(-4)), rat(0));
    }

    #[test]
    fn json_rejects_unreduced_rationals() {
        let v: Value = serde_json::json!([2, 4]);
        assert!(rational_from_json(&v).is_err());
        let v: Value = serde_json::json!([-1, 3]);
        assert_eq!(rational_from_json(&v).unwrap(), ratio(-1, 3));
        let v: Value = serde_json::json!([1, 0]);
        assert!(rational_from_json(&v).is_err());
    }

    #[test]
    fn serde_keeps_empty_shapes() {
        let m = RatMatrix::zeros(0, 3);
        let s = serde_json::to_string(&m).unwrap();
        let back: RatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
