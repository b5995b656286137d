//! Rules derived from the zero rule and the 3×3 rule, plus the two admitted
//! rules (left-right swap and swap vanishing).

use super::{AdmittedRule, NenError, Nen33, Relation, ScriptBuilder, StepResult};
use crate::lca::{equal_morphisms, AtomClass, Iso, LcaObject};
use crate::sequences::{iso_sequence, ExactnessCertificate, split_positions, DoubleExact, ShortExact};

/// `X -> Y -> 0` with inclusion `x_yin` on Yin and `x_yang` on Yang.
pub fn iso_column(x_yin: &Iso, x_yang: &Iso) -> Result<DoubleExact, NenError> {
    Ok(DoubleExact::new(iso_sequence(x_yin)?, iso_sequence(x_yang)?)?)
}

/// Rows `d1`, `d2`, `0`; columns `X_j -> X'_j -> 0` on both sides.
pub fn double_iso_diagram(
    d1: &DoubleExact,
    d2: &DoubleExact,
    x_left: &Iso,
    x_mid: &Iso,
    x_right: &Iso,
) -> Result<Nen33, NenError> {
    for (name, x) in [("left", x_left), ("mid", x_mid), ("right", x_right)] {
        x.validate().map_err(|e| NenError::NotIso(format!("{name}: {e}")))?;
    }
    let col = |x: &Iso| -> Result<DoubleExact, NenError> {
        Ok(DoubleExact::diagonal(iso_sequence(x)?))
    };
    Ok(Nen33::new(
        [d1.clone(), d2.clone(), DoubleExact::zero()],
        [col(x_left)?, col(x_mid)?, col(x_right)?],
    ))
}

/// `(X -(1, φ)-> X -> 0, 0 -> X -(φ, 1)-> X)`.
pub fn left_right_swap_sides(x: &LcaObject, phi: &Iso) -> Result<(DoubleExact, DoubleExact), NenError> {
    phi.validate().map_err(|e| NenError::NotAutomorphism(e.to_string()))?;
    if phi.source() != x || phi.target() != x {
        return Err(NenError::NotAutomorphism(format!(
            "{} -> {} is not a map {x} -> {x}",
            phi.source(),
            phi.target()
        )));
    }
    let left = DoubleExact::new(iso_sequence(&Iso::identity(x))?, iso_sequence(phi)?)?;
    let zero = LcaObject::zero();
    let right_yin = ShortExact::from_cert(ExactnessCertificate::RewiredByIso {
        inner: Box::new(ExactnessCertificate::IdentityRight { x: x.clone() }),
        left: Iso::identity(&zero),
        mid: Iso::identity(x),
        right: phi.inverse(),
    })?;
    let right = DoubleExact::new(right_yin, ShortExact::from_cert(
        ExactnessCertificate::IdentityRight { x: x.clone() },
    )?)?;
    Ok((left, right))
}

pub(super) fn left_right_swap_step(x: &LcaObject, phi: &Iso) -> Result<StepResult, NenError> {
    let (lhs, rhs) = left_right_swap_sides(x, phi)?;
    let mut rel = Relation::single(&lhs, 1);
    rel.add_term(rhs.key(), -1);
    let trivial = equal_morphisms(&phi.fwd, &Iso::identity(x).fwd)?.equal;
    let admitted = if trivial {
        Vec::new()
    } else {
        vec![AdmittedRule {
            rule: "left_right_swap".into(),
            object: x.to_string(),
            justification: "connecting_path_rotation".into(),
        }]
    };
    Ok(StepResult {
        relation: rel,
        generators: vec![lhs, rhs],
        admitted,
    })
}

/// The swap of `X ⊕ X`, `(x, y) ↦ (y, x)` or `(y, −x)` when signed.
pub fn swap_iso(x: &LcaObject, signed: bool) -> Result<Iso, NenError> {
    let n = x.len();
    let sign = if signed { -1 } else { 1 };
    let perm: Vec<(usize, i8)> = (0..n).map(|i| (n + i, sign)).chain((0..n).map(|i| (i, 1))).collect();
    Ok(Iso::signed_permutation(&x.concat(x), &perm)?)
}

/// `s_X`: `X ⊕ X = X ⊕ X -> 0` against the same with inclusion the swap.
pub fn swap_sequence(x: &LcaObject, signed: bool) -> Result<DoubleExact, NenError> {
    let xx = x.concat(x);
    iso_column(&Iso::identity(&xx), &swap_iso(x, signed)?)
}

/// Rows `S ⊕ S`, `S ⊕ S`, `0` for a short exact `S: C -> X -> R`, with
/// vertical identity on Yin and the swap on Yang. Its relation reads
/// `s_X = s_C + s_R`.
pub fn swap_diagram(seq: &ShortExact, signed: bool) -> Result<Nen33, NenError> {
    let ss = DoubleExact::diagonal(ShortExact::direct_sum(&[seq, seq])?);
    Ok(Nen33::new(
        [ss.clone(), ss, DoubleExact::zero()],
        [
            swap_sequence(seq.left(), signed)?,
            swap_sequence(seq.mid(), signed)?,
            swap_sequence(seq.right(), signed)?,
        ],
    ))
}

fn classes(x: &LcaObject) -> Vec<AtomClass> {
    let mut cs: Vec<AtomClass> = x
        .atoms()
        .iter()
        .map(|a| a.class())
        .filter(|c| *c != AtomClass::Zero)
        .collect();
    cs.sort();
    cs.dedup();
    cs
}

/// Splits off the compact atoms, or the vector atoms when there are no
/// compact ones. `None` when `X` has at most one class.
pub fn auto_decomposition(x: &LcaObject) -> Result<Option<ShortExact>, NenError> {
    let cs = classes(x);
    if cs.len() <= 1 {
        return Ok(None);
    }
    let first = if cs.contains(&AtomClass::Compact) {
        AtomClass::Compact
    } else {
        AtomClass::Vector
    };
    let positions: Vec<usize> = (0..x.len()).filter(|&i| x.atoms()[i].class() == first).collect();
    Ok(Some(split_positions(x, &positions)?))
}

fn justification(c: AtomClass) -> &'static str {
    match c {
        AtomClass::Vector => "vector_image_of_pmod",
        AtomClass::Compact => "compact_swindle",
        AtomClass::Discrete => "discrete_swindle",
        AtomClass::Zero => "zero",
    }
}

pub(super) fn swap_vanish_step(
    x: &LcaObject,
    signed: bool,
    decomposition: Option<&ShortExact>,
) -> Result<StepResult, NenError> {
    let s = swap_sequence(x, signed)?;
    let cs = classes(x);
    if cs.is_empty() {
        let rel = super::zero_rule_relation(&s)?;
        return Ok(StepResult {
            relation: rel,
            generators: vec![s],
            admitted: Vec::new(),
        });
    }
    if cs.len() == 1 {
        return Ok(StepResult {
            relation: Relation::single(&s, 1),
            generators: vec![s],
            admitted: vec![AdmittedRule {
                rule: "swap_vanish".into(),
                object: x.to_string(),
                justification: justification(cs[0]).into(),
            }],
        });
    }
    let seq = decomposition.ok_or_else(|| {
        NenError::MissingDecomposition(format!("{x} mixes atom classes {cs:?}"))
    })?;
    seq.validate()
        .map_err(|e| NenError::DecompositionInvalid(e.to_string()))?;
    if seq.mid() != x {
        return Err(NenError::DecompositionInvalid(format!(
            "middle object {} is not {x}",
            seq.mid()
        )));
    }
    let (left, right) = (classes(seq.left()), classes(seq.right()));
    if left.iter().any(|c| right.contains(c)) {
        return Err(NenError::DecompositionInvalid(format!(
            "subobject classes {left:?} and quotient classes {right:?} overlap"
        )));
    }
    let mut b = ScriptBuilder::new();
    let n = b.three_by_three(swap_diagram(seq, signed)?)?;
    let l = b.swap_vanish(seq.left(), signed)?;
    let r = b.swap_vanish(seq.right(), signed)?;
    let done = b.eliminate(n, &[l, r], &[&s])?;
    let expected = Relation::single(&s, 1);
    if *b.relation(done) != expected {
        return Err(NenError::DecompositionInvalid(format!(
            "the swap diagram leaves {:?}",
            b.relation(done).0.len()
        )));
    }
    Ok(StepResult {
        relation: expected,
        generators: vec![s],
        admitted: b.admitted(),
    })
}
