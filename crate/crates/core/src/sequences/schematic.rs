use serde::{Deserialize, Serialize};

use super::{DoubleExact, ExactnessCertificate, SeqError, ShortExact};
use crate::lca::{Iso, LcaObject};

/// Column isomorphisms from the objects above the line to those below, as
/// signed permutations: entry `i` says where summand `i` goes and with
/// which sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wiring {
    #[serde(rename = "I'")]
    pub left: Vec<(usize, i8)>,
    #[serde(rename = "I")]
    pub mid: Vec<(usize, i8)>,
    #[serde(rename = "I''")]
    pub right: Vec<(usize, i8)>,
}

impl Wiring {
    pub fn identity(left: usize, mid: usize, right: usize) -> Wiring {
        let id = |n: usize| (0..n).map(|i| (i, 1)).collect();
        Wiring {
            left: id(left),
            mid: id(mid),
            right: id(right),
        }
    }
}

/// Rows above the line give Yin, rows below give Yang after conjugating by
/// the wiring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schematic {
    pub above: Vec<ShortExact>,
    pub below: Vec<ShortExact>,
    pub wiring: Wiring,
}

fn column<'a>(rows: &'a [ShortExact], pick: fn(&'a ShortExact) -> &'a LcaObject) -> LcaObject {
    LcaObject::concat_all(rows.iter().map(pick))
}

impl Schematic {
    pub fn columns_above(&self) -> (LcaObject, LcaObject, LcaObject) {
        (
            column(&self.above, ShortExact::left),
            column(&self.above, ShortExact::mid),
            column(&self.above, ShortExact::right),
        )
    }

    pub fn columns_below(&self) -> (LcaObject, LcaObject, LcaObject) {
        (
            column(&self.below, ShortExact::left),
            column(&self.below, ShortExact::mid),
            column(&self.below, ShortExact::right),
        )
    }

    /// The three wiring isomorphisms, checked against the columns.
    pub fn wiring_isos(&self) -> Result<(Iso, Iso, Iso), SeqError> {
        let above = self.columns_above();
        let below = self.columns_below();
        let build = |name: &str, src: &LcaObject, dst: &LcaObject, perm: &[(usize, i8)]| {
            let iso = Iso::signed_permutation(src, perm)
                .map_err(|e| SeqError::WiringNotIso(format!("{name}: {e}")))?;
            if iso.target() != dst {
                return Err(SeqError::ColumnMismatch(format!(
                    "{name} sends {src} to {}, but the column below is {dst}",
                    iso.target()
                )));
            }
            Ok(iso)
        };
        Ok((
            build("I'", &above.0, &below.0, &self.wiring.left)?,
            build("I", &above.1, &below.1, &self.wiring.mid)?,
            build("I''", &above.2, &below.2, &self.wiring.right)?,
        ))
    }
}

/// Yin is the direct sum of the rows above. Yang is the direct sum of the
/// rows below, pulled back along the wiring: `I⁻¹ ∘ (⊕b') ∘ I'` and
/// `I''⁻¹ ∘ (⊕b) ∘ I`.
pub fn compile_schematic(s: &Schematic) -> Result<DoubleExact, SeqError> {
    let (i_left, i_mid, i_right) = s.wiring_isos()?;
    let sum = |rows: &[ShortExact]| ExactnessCertificate::DirectSum {
        parts: rows.iter().map(|r| r.cert().clone()).collect(),
    };
    let yin = ShortExact::from_cert(sum(&s.above))?;
    let yang = ShortExact::from_cert(ExactnessCertificate::RewiredByIso {
        inner: Box::new(sum(&s.below)),
        left: i_left,
        mid: i_mid,
        right: i_right,
    })?;
    DoubleExact::new(yin, yang)
}
