//! Certified short exact sequences, double exact sequences and schematics.

mod cert;
mod schematic;

use std::cell::Cell;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::lca::{equal_morphisms, Iso, LcaError, LcaMorphism, LcaObject};

pub use cert::{Canonical, ExactnessCertificate};
pub(crate) use cert::complement;
pub use schematic::{compile_schematic, Schematic, Wiring};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("composite of the two maps is not zero")]
    CompositeNotZero,
    #[error("tag mismatch: {0}")]
    TagMismatch(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("Yin and Yang sequences have different objects")]
    ObjectMismatch,
    #[error("wiring is not a signed permutation: {0}")]
    WiringNotIso(String),
    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    #[error(transparent)]
    Lca(#[from] LcaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A short exact sequence `left -> mid -> right` with its certificate.
/// Maps are stored in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawShortExact")]
pub struct ShortExact {
    left: LcaObject,
    mid: LcaObject,
    right: LcaObject,
    inc: LcaMorphism,
    sur: LcaMorphism,
    cert: ExactnessCertificate,
}

#[derive(Deserialize)]
struct RawShortExact {
    left: LcaObject,
    mid: LcaObject,
    right: LcaObject,
    inc: LcaMorphism,
    sur: LcaMorphism,
    cert: ExactnessCertificate,
}

impl TryFrom<RawShortExact> for ShortExact {
    type Error = SeqError;

    fn try_from(r: RawShortExact) -> Result<Self, SeqError> {
        if STRUCTURE_ONLY.with(Cell::get) {
            return Ok(ShortExact {
                left: r.left,
                mid: r.mid,
                right: r.right,
                inc: r.inc,
                sur: r.sur,
                cert: r.cert,
            });
        }
        certify_exact(r.left, r.mid, r.right, r.inc, r.sur, r.cert)
    }
}

thread_local! {
    static STRUCTURE_ONLY: Cell<bool> = const { Cell::new(false) };
}

/// True if `json` has the shape of a `T`, ignoring whether the sequences in
/// it are exact. Lets callers tell malformed input from input that fails
/// validation; the unvalidated value is dropped.
pub fn parses_structurally<T: DeserializeOwned>(json: &str) -> bool {
    STRUCTURE_ONLY.with(|f| f.set(true));
    let ok = serde_json::from_str::<T>(json).is_ok();
    STRUCTURE_ONLY.with(|f| f.set(false));
    ok
}

/// Validates the supplied data against what the certificate determines.
pub fn certify_exact(
    left: LcaObject,
    mid: LcaObject,
    right: LcaObject,
    inc: LcaMorphism,
    sur: LcaMorphism,
    cert: ExactnessCertificate,
) -> Result<ShortExact, SeqError> {
    let c = cert.canonical()?;
    for (name, got, want) in [("left", &left, &c.left), ("middle", &mid, &c.mid), ("right", &right, &c.right)] {
        if got != want {
            return Err(SeqError::TagMismatch(format!(
                "{name} object is {got}, the certificate gives {want}"
            )));
        }
    }
    if inc.source() != &left || inc.target() != &mid || sur.source() != &mid || sur.target() != &right {
        return Err(SeqError::TagMismatch("maps have the wrong endpoints".into()));
    }
    for (name, got, want) in [("inclusion", &inc, &c.inc), ("surjection", &sur, &c.sur)] {
        if !equal_morphisms(got, want)?.equal {
            return Err(SeqError::TagMismatch(format!(
                "{name} differs from the canonical map of the certificate"
            )));
        }
    }
    if !sur.compose(&inc)?.is_zero()? {
        return Err(SeqError::CompositeNotZero);
    }
    Ok(ShortExact {
        inc: inc.normalize()?,
        sur: sur.normalize()?,
        left,
        mid,
        right,
        cert,
    })
}

impl ShortExact {
    /// The sequence a certificate determines.
    pub fn from_cert(cert: ExactnessCertificate) -> Result<ShortExact, SeqError> {
        let c = cert.canonical()?;
        if !c.sur.compose(&c.inc)?.is_zero()? {
            return Err(SeqError::CompositeNotZero);
        }
        Ok(ShortExact {
            left: c.left,
            mid: c.mid,
            right: c.right,
            inc: c.inc.normalize()?,
            sur: c.sur.normalize()?,
            cert,
        })
    }

    /// Re-runs full validation.
    pub fn validate(&self) -> Result<(), SeqError> {
        certify_exact(
            self.left.clone(),
            self.mid.clone(),
            self.right.clone(),
            self.inc.clone(),
            self.sur.clone(),
            self.cert.clone(),
        )
        .map(|_| ())
    }

    pub fn left(&self) -> &LcaObject {
        &self.left
    }

    pub fn mid(&self) -> &LcaObject {
        &self.mid
    }

    pub fn right(&self) -> &LcaObject {
        &self.right
    }

    pub fn inc(&self) -> &LcaMorphism {
        &self.inc
    }

    pub fn sur(&self) -> &LcaMorphism {
        &self.sur
    }

    pub fn cert(&self) -> &ExactnessCertificate {
        &self.cert
    }

    pub fn zero() -> ShortExact {
        ShortExact::from_cert(ExactnessCertificate::ZeroSeq).expect("zero sequence")
    }

    pub fn direct_sum(parts: &[&ShortExact]) -> Result<ShortExact, SeqError> {
        ShortExact::from_cert(ExactnessCertificate::DirectSum {
            parts: parts.iter().map(|s| s.cert.clone()).collect(),
        })
    }

    /// Conjugates by isomorphisms leaving the current objects:
    /// `inc' = x_mid ∘ inc ∘ x_left⁻¹`, `sur' = x_right ∘ sur ∘ x_mid⁻¹`.
    pub fn transport(&self, x_left: &Iso, x_mid: &Iso, x_right: &Iso) -> Result<ShortExact, SeqError> {
        ShortExact::from_cert(ExactnessCertificate::RewiredByIso {
            inner: Box::new(self.cert.clone()),
            left: x_left.inverse(),
            mid: x_mid.inverse(),
            right: x_right.inverse(),
        })
    }

    /// The direct summand at the given positions.
    pub fn summand(&self, left_pos: &[usize], mid_pos: &[usize], right_pos: &[usize]) -> Result<ShortExact, SeqError> {
        ShortExact::from_cert(ExactnessCertificate::Summand {
            parent: Box::new(self.cert.clone()),
            left_pos: left_pos.to_vec(),
            mid_pos: mid_pos.to_vec(),
            right_pos: right_pos.to_vec(),
        })
    }
}

/// `X|positions -> X -> X|rest`, the split sequence cutting out the given
/// summands.
pub fn split_positions(x: &LcaObject, positions: &[usize]) -> Result<ShortExact, SeqError> {
    let rest = complement(x.len(), positions)?;
    let (sub, quot) = (x.select(positions), x.select(&rest));
    let inner = ExactnessCertificate::DirectSum {
        parts: vec![
            ExactnessCertificate::IdentityLeft { x: sub.clone() },
            ExactnessCertificate::IdentityRight { x: quot.clone() },
        ],
    };
    let mut perm = vec![(0, 1i8); x.len()];
    for (k, &p) in positions.iter().chain(rest.iter()).enumerate() {
        perm[p] = (k, 1);
    }
    ShortExact::from_cert(ExactnessCertificate::RewiredByIso {
        inner: Box::new(inner),
        left: Iso::identity(&sub),
        mid: Iso::signed_permutation(x, &perm)?,
        right: Iso::identity(&quot),
    })
}

/// `A -> B -> 0` with inclusion the given isomorphism.
pub fn iso_sequence(x: &Iso) -> Result<ShortExact, SeqError> {
    let b = x.target().clone();
    ShortExact::from_cert(ExactnessCertificate::RewiredByIso {
        inner: Box::new(ExactnessCertificate::IdentityLeft { x: b.clone() }),
        left: x.clone(),
        mid: Iso::identity(&b),
        right: Iso::identity(&LcaObject::zero()),
    })
}

/// A pair of short exact sequences on the same three objects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDoubleExact")]
pub struct DoubleExact {
    yin: ShortExact,
    yang: ShortExact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Deserialize)]
struct RawDoubleExact {
    yin: ShortExact,
    yang: ShortExact,
    #[serde(default)]
    label: Option<String>,
}

impl TryFrom<RawDoubleExact> for DoubleExact {
    type Error = SeqError;

    fn try_from(r: RawDoubleExact) -> Result<Self, SeqError> {
        if STRUCTURE_ONLY.with(Cell::get) {
            return Ok(DoubleExact {
                yin: r.yin,
                yang: r.yang,
                label: r.label,
            });
        }
        Ok(DoubleExact::new(r.yin, r.yang)?.with_label_opt(r.label))
    }
}

impl DoubleExact {
    pub fn new(yin: ShortExact, yang: ShortExact) -> Result<DoubleExact, SeqError> {
        if yin.left != yang.left || yin.mid != yang.mid || yin.right != yang.right {
            return Err(SeqError::ObjectMismatch);
        }
        Ok(DoubleExact {
            yin,
            yang,
            label: None,
        })
    }

    /// Yin and Yang both equal to `s`.
    pub fn diagonal(s: ShortExact) -> DoubleExact {
        DoubleExact {
            yin: s.clone(),
            yang: s,
            label: None,
        }
    }

    pub fn zero() -> DoubleExact {
        DoubleExact::diagonal(ShortExact::zero())
    }

    pub fn with_label(self, label: impl Into<String>) -> DoubleExact {
        self.with_label_opt(Some(label.into()))
    }

    fn with_label_opt(mut self, label: Option<String>) -> DoubleExact {
        self.label = label;
        self
    }

    pub fn yin(&self) -> &ShortExact {
        &self.yin
    }

    pub fn yang(&self) -> &ShortExact {
        &self.yang
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn left(&self) -> &LcaObject {
        &self.yin.left
    }

    pub fn mid(&self) -> &LcaObject {
        &self.yin.mid
    }

    pub fn right(&self) -> &LcaObject {
        &self.yin.right
    }

    pub fn validate(&self) -> Result<(), SeqError> {
        self.yin.validate()?;
        self.yang.validate()?;
        if self.yin.left != self.yang.left || self.yin.mid != self.yang.mid || self.yin.right != self.yang.right {
            return Err(SeqError::ObjectMismatch);
        }
        Ok(())
    }

    /// Identity of the generator `[self]`: objects and the four maps in
    /// normal form. The label does not take part.
    pub fn key(&self) -> String {
        serde_json::to_string(&(
            &self.yin.left,
            &self.yin.mid,
            &self.yin.right,
            &self.yin.inc,
            &self.yin.sur,
            &self.yang.inc,
            &self.yang.sur,
        ))
        .expect("serializable")
    }

    /// True iff the Yin and Yang maps agree.
    pub fn yin_equals_yang(&self) -> Result<bool, SeqError> {
        Ok(equal_morphisms(&self.yin.inc, &self.yang.inc)?.equal
            && equal_morphisms(&self.yin.sur, &self.yang.sur)?.equal)
    }

    /// Keeps Yin and conjugates Yang by the given isomorphisms.
    pub fn transport_yang(&self, x_left: &Iso, x_mid: &Iso, x_right: &Iso) -> Result<DoubleExact, SeqError> {
        DoubleExact::new(self.yin.clone(), self.yang.transport(x_left, x_mid, x_right)?)
    }

    /// Conjugates both sides by the same isomorphisms.
    pub fn transport(&self, x_left: &Iso, x_mid: &Iso, x_right: &Iso) -> Result<DoubleExact, SeqError> {
        DoubleExact::new(
            self.yin.transport(x_left, x_mid, x_right)?,
            self.yang.transport(x_left, x_mid, x_right)?,
        )
    }

    pub fn summand(&self, left_pos: &[usize], mid_pos: &[usize], right_pos: &[usize]) -> Result<DoubleExact, SeqError> {
        DoubleExact::new(
            self.yin.summand(left_pos, mid_pos, right_pos)?,
            self.yang.summand(left_pos, mid_pos, right_pos)?,
        )
    }
}

/// Summandwise direct sum of double exact sequences.
pub fn direct_sum_des(parts: &[&DoubleExact]) -> Result<DoubleExact, SeqError> {
    let yins: Vec<&ShortExact> = parts.iter().map(|d| &d.yin).collect();
    let yangs: Vec<&ShortExact> = parts.iter().map(|d| &d.yang).collect();
    DoubleExact::new(ShortExact::direct_sum(&yins)?, ShortExact::direct_sum(&yangs)?)
}
