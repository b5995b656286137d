//! Scripted derivations of the relations satisfied by the comparison map.

use super::{iso_column, NenError, Nen33, ProofScript, Relation, ScriptBuilder};
use crate::algebra::{relation_b_combine, BassSwanTriple, FreeModule, RelationAInstance, SplitSequence};
use crate::lca::{mat_block, AtomKind, Iso, LcaAtom, LcaMorphism, LcaObject};
use crate::sequences::{
    direct_sum_des, split_positions, DoubleExact, ExactnessCertificate, ShortExact,
};
use crate::theta::theta;

fn complement(n: usize, positions: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !positions.contains(i)).collect()
}

/// Cuts `J` along the given summands: rows `E`, `J`, `J/E` with split
/// columns on both sides. Returns the step proving `E − J + J/E = 0` with
/// every zero-rule generator other than these three cancelled, and the two
/// pieces.
pub fn split_33(
    b: &mut ScriptBuilder,
    j: &DoubleExact,
    left: &[usize],
    mid: &[usize],
    right: &[usize],
) -> Result<(usize, DoubleExact, DoubleExact), NenError> {
    split_33_named(b, j, left, mid, right, [None, None])
}

/// As [`split_33`], naming the two pieces.
pub(crate) fn split_33_named(
    b: &mut ScriptBuilder,
    j: &DoubleExact,
    left: &[usize],
    mid: &[usize],
    right: &[usize],
    names: [Option<&str>; 2],
) -> Result<(usize, DoubleExact, DoubleExact), NenError> {
    let name = |d: DoubleExact, n: Option<&str>| match n {
        Some(n) => d.with_label(n),
        None => d,
    };
    let e = name(j.summand(left, mid, right)?, names[0]);
    let q = name(
        j.summand(
            &complement(j.left().len(), left),
            &complement(j.mid().len(), mid),
            &complement(j.right().len(), right),
        )?,
        names[1],
    );
    let col = |x: &LcaObject, pos: &[usize]| -> Result<DoubleExact, NenError> {
        Ok(DoubleExact::diagonal(split_positions(x, pos)?))
    };
    let n = b.three_by_three(Nen33::new(
        [e.clone(), j.clone(), q.clone()],
        [col(j.left(), left)?, col(j.mid(), mid)?, col(j.right(), right)?],
    ))?;
    let idx = b.eliminate(n, &[], &[&e, j, &q])?;
    Ok((idx, e, q))
}

/// Proves `[X = X -> 0, X -σ-> X -> 0] = 0` for an unsigned involution `σ`
/// permuting summands of `X`: the column is isomorphic to `s_Y ⊕ (F = F)`.
pub fn discharge_swap_column(b: &mut ScriptBuilder, x: &LcaObject, sigma: &[(usize, i8)]) -> Result<usize, NenError> {
    let c = iso_column(&Iso::identity(x), &Iso::signed_permutation(x, sigma)?)?;
    let mut ys = Vec::new();
    let mut zs = Vec::new();
    let mut fixed = Vec::new();
    for (i, &(t, s)) in sigma.iter().enumerate() {
        if s != 1 || sigma[t].0 != i {
            return Err(NenError::NotIso(format!("{sigma:?} is not an unsigned involution")));
        }
        match t.cmp(&i) {
            std::cmp::Ordering::Greater => {
                ys.push(i);
                zs.push(t);
            }
            std::cmp::Ordering::Equal => fixed.push(i),
            std::cmp::Ordering::Less => {}
        }
    }
    if ys.is_empty() {
        return b.zero(&c);
    }
    let m = ys.len();
    let mut pi = vec![(0, 1i8); x.len()];
    for (k, &p) in ys.iter().chain(zs.iter()).chain(fixed.iter()).enumerate() {
        pi[p] = (k, 1);
    }
    let pi = Iso::signed_permutation(x, &pi)?;
    let z = pi.target().clone();
    let mut tau: Vec<(usize, i8)> = (0..m).map(|k| (m + k, 1)).chain((0..m).map(|k| (k, 1))).collect();
    tau.extend((2 * m..z.len()).map(|k| (k, 1)));
    let c2 = iso_column(&Iso::identity(&z), &Iso::signed_permutation(&z, &tau)?)?;
    let zero = Iso::identity(&LcaObject::zero());
    let d = b.double_iso(&c, &c2, &pi, &pi, &zero)?;
    let y = x.select(&ys);
    let sv = b.swap_vanish(&y, false)?;
    if fixed.is_empty() {
        return b.combine(&[(d, 1), (sv, 1)]);
    }
    let pairs: Vec<usize> = (0..2 * m).collect();
    let (s, _, _) = split_33(b, &c2, &pairs, &pairs, &[])?;
    // d: c − c2, s: E − c2 + F with E = s_Y, sv: E.
    let sum = b.combine(&[(d, 1), (s, -1), (sv, 1)])?;
    b.eliminate(sum, &[], &[&c])
}

/// Rows `d1`, `d2`, `0` whose columns are swaps; proves `[d1] = [d2]`
/// when `d2` is `d1` with Yang conjugated by the swaps.
pub(crate) fn swap_rows(
    b: &mut ScriptBuilder,
    d1: &DoubleExact,
    sl: &[(usize, i8)],
    sm: &[(usize, i8)],
    sr: &[(usize, i8)],
) -> Result<(usize, DoubleExact), NenError> {
    let perm = |x: &LcaObject, s: &[(usize, i8)]| Iso::signed_permutation(x, s);
    let (pl, pm, pr) = (perm(d1.left(), sl)?, perm(d1.mid(), sm)?, perm(d1.right(), sr)?);
    let d2 = d1.transport_yang(&pl, &pm, &pr)?;
    let col = |x: &LcaObject, p: &Iso| iso_column(&Iso::identity(x), p);
    let n = b.three_by_three(Nen33::new(
        [d1.clone(), d2.clone(), DoubleExact::zero()],
        [col(d1.left(), &pl)?, col(d1.mid(), &pm)?, col(d1.right(), &pr)?],
    ))?;
    let lemmas = [
        discharge_swap_column(b, d1.left(), sl)?,
        discharge_swap_column(b, d1.mid(), sm)?,
        discharge_swap_column(b, d1.right(), sr)?,
    ];
    let idx = b.eliminate(n, &lemmas, &[d1, &d2])?;
    Ok((idx, d2))
}

fn swaps(n: usize, pairs: &[(usize, usize)]) -> Vec<(usize, i8)> {
    let mut p: Vec<(usize, i8)> = (0..n).map(|i| (i, 1)).collect();
    for &(a, c) in pairs {
        p[a] = (c, 1);
        p[c] = (a, 1);
    }
    p
}

/// Exchanges the `P` and `Q` roles of a comparison sequence on Yang.
pub(crate) fn role_swaps() -> [Vec<(usize, i8)>; 3] {
    [
        swaps(4, &[(0, 2), (1, 3)]),
        swaps(5, &[(0, 3), (2, 4)]),
        swaps(4, &[(0, 2), (1, 3)]),
    ]
}

/// `⟨⟨P, 1, P⟩⟩ = 0`: swapping the roles of the two copies of `P` on Yang
/// turns the sequence into one with Yin = Yang.
pub fn builtin_sv1_script(p: &FreeModule) -> Result<ProofScript, NenError> {
    let n = p.lattice_dim();
    let t = crate::algebra::make_triple(p.clone(), crate::matrix::RatMatrix::identity(n), p.clone())?;
    let th = theta(&t)?;
    let mut b = ScriptBuilder::new();
    if th.yin_equals_yang()? {
        b.zero(&th)?;
        return Ok(b.finish());
    }
    let [sl, sm, sr] = role_swaps();
    let (idx, s) = swap_rows(&mut b, &th, &sl, &sm, &sr)?;
    let last = b.eliminate(idx, &[], &[&th])?;
    if !s.yin_equals_yang()? {
        return Err(NenError::UnexpectedConclusion("swapped sequence has Yin ≠ Yang".into()));
    }
    b.expect(last, &Relation::single(&th, 1))?;
    Ok(b.finish())
}

fn split_column(parts: Vec<(AtomKind, &SplitSequence)>) -> Result<DoubleExact, NenError> {
    let certs = parts
        .into_iter()
        .map(|(kind, split)| ExactnessCertificate::SplitInduced {
            kind,
            split: split.clone(),
        })
        .collect();
    Ok(DoubleExact::diagonal(ShortExact::from_cert(ExactnessCertificate::DirectSum {
        parts: certs,
    })?))
}

/// `⟨⟨T'⟩⟩ − ⟨⟨T⟩⟩ + ⟨⟨T''⟩⟩ = 0` for a split exact sequence of triples.
pub fn builtin_relation_a_script(inst: &RelationAInstance) -> Result<ProofScript, NenError> {
    inst.validate()?;
    let (t1, t2, t3) = (theta(inst.sub())?, theta(inst.mid())?, theta(inst.quot())?);
    let (ps, qs) = (&inst.p_split, &inst.q_split);
    use AtomKind::*;
    let cols = [
        split_column(vec![(Disc, ps), (ProdTorus, ps), (Disc, qs), (ProdTorus, qs)])?,
        split_column(vec![(CoprodDisc, ps), (Vect, ps), (ProdTorus, ps), (CoprodDisc, qs), (ProdTorus, qs)])?,
        split_column(vec![(CoprodDisc, ps), (Torus, ps), (CoprodDisc, qs), (Torus, qs)])?,
    ];
    let mut b = ScriptBuilder::new();
    let n = b.three_by_three(Nen33::new([t1.clone(), t2.clone(), t3.clone()], cols))?;
    let last = b.eliminate(n, &[], &[&t1, &t2, &t3])?;
    let mut expected = Relation::single(&t1, 1);
    expected.add_term(t2.key(), -1);
    expected.add_term(t3.key(), 1);
    b.expect(last, &expected)?;
    Ok(b.finish())
}

/// `⟨⟨P, φ, Q⟩⟩ + ⟨⟨Q, ψ, R⟩⟩ − ⟨⟨P, ψφ, R⟩⟩ = 0`.
pub fn builtin_relation_b_script(t1: &BassSwanTriple, t2: &BassSwanTriple) -> Result<ProofScript, NenError> {
    let t3 = relation_b_combine(t1, t2)?;
    let (th1, th2, th3) = (theta(t1)?, theta(t2)?, theta(&t3)?);
    let mut b = ScriptBuilder::new();

    // J = θ1 ⊕ θ2, cut back into its two summands.
    let j = direct_sum_des(&[&th1, &th2])?;
    let (r1, _, _) = split_33_named(
        &mut b,
        &j,
        &[0, 1, 2, 3],
        &[0, 1, 2, 3, 4],
        &[0, 1, 2, 3],
        [th1.label(), th2.label()],
    )?;

    // Move the two copies of Q next to each other on Yang.
    let (r2, j1) = swap_rows(
        &mut b,
        &j,
        &swaps(8, &[(2, 4), (3, 5)]),
        &swaps(10, &[(3, 5), (4, 7)]),
        &swaps(8, &[(2, 4), (3, 5)]),
    )?;

    // Excise the rows on Q, which now agree on both sides.
    let (r3, e, jq) = split_33(&mut b, &j1, &[2, 3, 5], &[3, 4, 5, 7], &[2, 3, 4])?;
    if !e.yin_equals_yang()? {
        return Err(NenError::UnexpectedConclusion("excised Q part has Yin ≠ Yang".into()));
    }

    // Identify Q_R with P_R through φ⁻¹.
    let mid = jq.mid();
    let phi_inv = t1.phi_inverse();
    let mut target = mid.atoms().to_vec();
    target[3] = LcaAtom::Vect(t1.p().clone());
    let target = LcaObject::new(target);
    let mut f2 = LcaMorphism::zero(mid, &target);
    for i in 0..mid.len() {
        let block = if i == 3 {
            mat_block(&mid.atoms()[3], &target.atoms()[3], phi_inv.clone())
        } else {
            LcaMorphism::identity(mid).block(i, i).clone()
        };
        f2.set_block(i, i, block)?;
    }
    let x_mid = Iso::from_morphism(&f2)?;
    let (il, ir) = (Iso::identity(jq.left()), Iso::identity(jq.right()));
    let j2 = jq.transport(&il, &x_mid, &ir)?;
    let r4 = b.double_iso(&jq, &j2, &il, &x_mid, &ir)?;

    // Bring the two copies of P_R together and excise the one on Yang only.
    let (r5, j3) = swap_rows(
        &mut b,
        &j2,
        &swaps(j2.left().len(), &[]),
        &swaps(j2.mid().len(), &[(1, 3)]),
        &swaps(j2.right().len(), &[]),
    )?;
    let (r6, d, k) = split_33(&mut b, &j3, &[2], &[3], &[2])?;
    if !d.yin_equals_yang()? {
        return Err(NenError::UnexpectedConclusion("excised vector part has Yin ≠ Yang".into()));
    }
    let r6 = b.eliminate(r6, &[], &[&j3, &k])?;

    let ik = (Iso::identity(k.left()), Iso::identity(k.mid()), Iso::identity(k.right()));
    let r7 = b.double_iso(&k, &th3, &ik.0, &ik.1, &ik.2)?;

    let r3 = b.eliminate(r3, &[], &[&j1, &jq])?;
    let sum = b.combine(&[(r1, 1), (r2, 1), (r3, -1), (r4, 1), (r5, 1), (r6, -1), (r7, 1)])?;
    let last = b.eliminate(sum, &[], &[&th1, &th2, &th3])?;
    let mut expected = Relation::single(&th1, 1);
    expected.add_term(th2.key(), 1);
    expected.add_term(th3.key(), -1);
    b.expect(last, &expected)?;
    Ok(b.finish())
}

