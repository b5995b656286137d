mod common;

use common::{arrow_negations, negate_arrow, triple, z};
use relk_core::algebra::{make_triple, SplitSequence, SwanMorphism};
use relk_core::algebra::RelationAInstance;
use relk_core::lca::{Iso, LcaAtom, LcaMorphism, LcaObject, PrimExpr};
use relk_core::matrix::RatMatrix;
use relk_core::nenashev::{
    builtin_relation_a_script, builtin_relation_b_script, builtin_sv1_script, check_33,
    check_zero_rule, double_iso_diagram, double_iso_rule, left_right_swap, replay, swap_vanish,
    NenError, Nen33, ProofScript, Step,
};
use relk_core::sample;
use relk_core::sequences::{
    compile_schematic, split_positions, DoubleExact, ExactnessCertificate as C, Schematic,
    ShortExact, Wiring,
};
use relk_core::theta::{theta, theta_schematic};
use relk_core::{relation_b_combine, FreeModule};

fn lattice(n: usize) -> ShortExact {
    ShortExact::from_cert(C::LatticeInVector { p: z(n) }).unwrap()
}

#[test]
fn zero_rule_examples() {
    let d = DoubleExact::diagonal(lattice(1));
    let der = check_zero_rule(&d).unwrap();
    assert_eq!(der.coefficient_of(&d), 1);
    assert!(der.admitted_rules.is_empty());

    check_zero_rule(&theta(&triple(&[])).unwrap()).unwrap();

    let twisted = ShortExact::from_cert(C::PhiTwisted {
        p: z(1),
        phi: RatMatrix::from_i64(&[&[2]]),
        q: z(1),
    })
    .unwrap();
    let d = DoubleExact::new(lattice(1), twisted).unwrap();
    assert!(matches!(check_zero_rule(&d), Err(NenError::YinYangDiffer)));
}

#[test]
fn identical_rows_cancel() {
    let d = theta(&triple(&[&[2]])).unwrap();
    let ids = (Iso::identity(d.left()), Iso::identity(d.mid()), Iso::identity(d.right()));
    let n = double_iso_diagram(&d, &d, &ids.0, &ids.1, &ids.2).unwrap();
    let der = check_33(&n).unwrap();
    assert_eq!(der.coefficient_of(&d), 0);
    // What remains has Yin = Yang throughout.
    for g in &der.generators {
        assert!(g.des.yin_equals_yang().unwrap(), "{:?}", g.objects);
    }
}

#[test]
fn all_zero_diagram() {
    let z = DoubleExact::zero();
    let der = check_33(&Nen33::new([z.clone(), z.clone(), z.clone()], [z.clone(), z.clone(), z])).unwrap();
    assert!(der.identity.values().all(|c| *c == 0) || der.identity.is_empty());
}

#[test]
fn negated_yang_arrow_is_caught() {
    let d = theta(&triple(&[&[2]])).unwrap();
    let ids = (Iso::identity(d.left()), Iso::identity(d.mid()), Iso::identity(d.right()));
    let mut n = double_iso_diagram(&d, &d, &ids.0, &ids.1, &ids.2).unwrap();
    n.rows[1] = negate_arrow(&d, true, false);
    match check_33(&n) {
        Err(NenError::YangDiagramNotCommuting(square)) => assert!(square.contains("square"), "{square}"),
        other => panic!("expected a Yang failure, got {other:?}"),
    }
}

#[test]
fn every_arrow_negation_of_a_double_iso_diagram_is_caught() {
    let d = theta(&triple(&[&[3, 1], &[1, 1]])).unwrap();
    let ids = (Iso::identity(d.left()), Iso::identity(d.mid()), Iso::identity(d.right()));
    let n = double_iso_diagram(&d, &d, &ids.0, &ids.1, &ids.2).unwrap();
    check_33(&n).unwrap();
    let muts = arrow_negations(&n);
    assert!(!muts.is_empty());
    for (m, what) in muts {
        assert!(check_33(&m).is_err(), "{what} went unnoticed");
    }
}

/// Recompiles the schematic with both stacks of rows reversed. The new
/// objects are the old ones with their row blocks in reverse order.
fn reversed(s: &Schematic) -> (Schematic, [Vec<(usize, i8)>; 3]) {
    fn block_perm(lens: &[usize]) -> Vec<usize> {
        // old position -> new position when blocks are reversed
        let total: usize = lens.iter().sum();
        let mut starts = Vec::new();
        let mut acc = 0;
        for l in lens {
            starts.push(acc);
            acc += l;
        }
        let mut new_start = vec![0; lens.len()];
        let mut acc = 0;
        for b in (0..lens.len()).rev() {
            new_start[b] = acc;
            acc += lens[b];
        }
        let mut out = vec![0; total];
        for b in 0..lens.len() {
            for k in 0..lens[b] {
                out[starts[b] + k] = new_start[b] + k;
            }
        }
        out
    }
    let lens = |rows: &[ShortExact], col: usize| -> Vec<usize> {
        rows.iter()
            .map(|r| [r.left(), r.mid(), r.right()][col].len())
            .collect()
    };
    let mut above = s.above.clone();
    above.reverse();
    let mut below = s.below.clone();
    below.reverse();
    let old_wiring = [&s.wiring.left, &s.wiring.mid, &s.wiring.right];
    let mut wiring: Vec<Vec<(usize, i8)>> = Vec::new();
    let mut moves: Vec<Vec<(usize, i8)>> = Vec::new();
    for (col, old_col) in old_wiring.iter().enumerate() {
        let a = block_perm(&lens(&s.above, col));
        let b = block_perm(&lens(&s.below, col));
        let mut w = vec![(0, 1); a.len()];
        for (old, &(target, sign)) in old_col.iter().enumerate() {
            w[a[old]] = (b[target], sign);
        }
        wiring.push(w);
        moves.push(a.iter().map(|&p| (p, 1)).collect());
    }
    let [l, m, r]: [Vec<(usize, i8)>; 3] = wiring.try_into().unwrap();
    let moves: [Vec<(usize, i8)>; 3] = moves.try_into().unwrap();
    (
        Schematic {
            above,
            below,
            wiring: Wiring { left: l, mid: m, right: r },
        },
        moves,
    )
}

#[test]
fn row_permuted_compilation_has_the_same_class() {
    let t = triple(&[&[2]]);
    let s = theta_schematic(&t).unwrap();
    let d1 = compile_schematic(&s).unwrap();
    let (s2, moves) = reversed(&s);
    let d2 = compile_schematic(&s2).unwrap();
    assert_ne!(d1.key(), d2.key());
    let x = |obj: &LcaObject, perm: &[(usize, i8)]| Iso::signed_permutation(obj, perm).unwrap();
    let (xl, xm, xr) = (
        x(d1.left(), &moves[0]),
        x(d1.mid(), &moves[1]),
        x(d1.right(), &moves[2]),
    );
    let der = double_iso_rule(&d1, &d2, &xl, &xm, &xr).unwrap();
    assert_eq!(der.coefficient_of(&d1), 1);
    assert_eq!(der.coefficient_of(&d2), -1);
}

#[test]
fn identical_double_iso_is_trivial() {
    let d = theta(&triple(&[&[5]])).unwrap();
    let ids = (Iso::identity(d.left()), Iso::identity(d.mid()), Iso::identity(d.right()));
    let der = double_iso_rule(&d, &d, &ids.0, &ids.1, &ids.2).unwrap();
    assert!(der.identity.is_empty());
}

#[test]
fn swapping_one_side_only_breaks_yang() {
    // P = Q, so the middle object has two copies of ⊕Z at positions 0 and 3.
    let d = theta(&triple(&[&[2]])).unwrap();
    let sigma = Iso::signed_permutation(d.mid(), &[(3, 1), (1, 1), (2, 1), (0, 1), (4, 1)]).unwrap();
    assert_eq!(sigma.target(), d.mid());
    let (il, ir) = (Iso::identity(d.left()), Iso::identity(d.right()));
    let yin = d.yin().transport(&il, &sigma, &ir).unwrap();
    let d2 = DoubleExact::new(yin, d.yang().clone()).unwrap();
    match double_iso_rule(&d, &d2, &il, &sigma, &ir) {
        Err(NenError::YangDiagramNotCommuting(_)) => {}
        other => panic!("expected a Yang failure, got {other:?}"),
    }
}

fn vect(n: usize) -> LcaObject {
    LcaObject::atom(LcaAtom::Vect(z(n)))
}

fn scalar_iso(x: &LcaObject, k: i64) -> Iso {
    let a = &x.atoms()[0];
    let m = RatMatrix::scalar(a.dim(), relk_core::matrix::rat(k));
    Iso::from_morphism(&LcaMorphism::from_expr(PrimExpr::mat(a.clone(), a.clone(), m)).unwrap()).unwrap()
}

#[test]
fn left_right_swap_examples() {
    let x = vect(1);
    let der = left_right_swap(&x, &Iso::identity(&x)).unwrap();
    assert!(der.admitted_rules.is_empty());
    for g in &der.generators {
        assert!(g.des.yin_equals_yang().unwrap());
    }

    let der = left_right_swap(&x, &scalar_iso(&x, 2)).unwrap();
    assert_eq!(der.admitted_rules.len(), 1);
    assert_eq!(der.admitted_rules[0].rule, "left_right_swap");
    let mut coefs: Vec<i64> = der.identity.values().copied().collect();
    coefs.sort();
    assert_eq!(coefs, vec![-1, 1]);

    let zero = LcaMorphism::zero(&x, &x);
    let bogus = Iso { fwd: zero.clone(), inv: zero };
    assert!(matches!(left_right_swap(&x, &bogus), Err(NenError::NotAutomorphism(_))));
}

#[test]
fn swap_vanish_on_single_class_objects() {
    let torus = LcaObject::atom(LcaAtom::Torus(z(1)));
    let der = swap_vanish(&torus, false, None).unwrap();
    assert_eq!(der.admitted_rules[0].justification, "compact_swindle");
    assert_eq!(der.identity.len(), 1);

    let der = swap_vanish(&vect(1), true, None).unwrap();
    assert_eq!(der.admitted_rules[0].justification, "vector_image_of_pmod");

    let der = swap_vanish(&LcaObject::zero(), false, None).unwrap();
    assert!(der.admitted_rules.is_empty());
}

#[test]
fn swap_vanish_on_a_mixed_object_needs_a_decomposition() {
    let x = LcaObject::new(vec![LcaAtom::Torus(z(1)), LcaAtom::Disc(z(1))]);
    assert!(matches!(swap_vanish(&x, false, None), Err(NenError::MissingDecomposition(_))));

    let dec = split_positions(&x, &[0]).unwrap();
    let der = swap_vanish(&x, false, Some(&dec)).unwrap();
    let tags: Vec<&str> = der.admitted_rules.iter().map(|a| a.justification.as_str()).collect();
    assert_eq!(tags, vec!["compact_swindle", "discrete_swindle"]);
    assert_eq!(der.identity.len(), 1);

    let wrong = split_positions(&x, &[]).unwrap();
    assert!(matches!(
        swap_vanish(&x, false, Some(&wrong)),
        Err(NenError::DecompositionInvalid(_))
    ));
}

#[test]
fn one_step_zero_script() {
    let d = DoubleExact::diagonal(lattice(2));
    let der = replay(&ProofScript {
        steps: vec![Step::ZeroRule { des: d.clone() }],
    })
    .unwrap();
    assert_eq!(der.coefficient_of(&d), 1);
    assert_eq!(der.steps_checked, 1);
}

#[test]
fn relation_b_for_two_and_three() {
    let (t1, t2) = (triple(&[&[2]]), triple(&[&[3]]));
    let t3 = relation_b_combine(&t1, &t2).unwrap();
    assert_eq!(t3.phi(), &RatMatrix::from_i64(&[&[6]]));
    let der = replay(&builtin_relation_b_script(&t1, &t2).unwrap()).unwrap();
    let th = |t| theta(t).unwrap();
    assert_eq!(der.coefficient_of(&th(&t1)), 1);
    assert_eq!(der.coefficient_of(&th(&t2)), 1);
    assert_eq!(der.coefficient_of(&th(&t3)), -1);
    assert_eq!(der.identity.len(), 3);
}

#[test]
fn relation_b_with_identity_second_factor() {
    let t1 = triple(&[&[2]]);
    let t2 = triple(&[&[1]]);
    let der = replay(&builtin_relation_b_script(&t1, &t2).unwrap()).unwrap();
    // θ(t1) appears with +1 and −1 and cancels; what is left is ⟨⟨Z, 1, Z⟩⟩.
    assert_eq!(der.coefficient_of(&theta(&t1).unwrap()), 0);
    assert_eq!(der.coefficient_of(&theta(&t2).unwrap()), 1);
    assert_eq!(der.identity.len(), 1);
}

#[test]
fn tampered_script_is_rejected() {
    let script = builtin_relation_b_script(&triple(&[&[2]]), &triple(&[&[3]])).unwrap();
    let (index, diagram) = script
        .steps
        .iter()
        .enumerate()
        .find_map(|(i, s)| match s {
            Step::ThreeByThree { diagram } => Some((i, diagram.clone())),
            _ => None,
        })
        .unwrap();
    let mut tampered = script.clone();
    let mut n = *diagram;
    n.rows[0] = negate_arrow(&n.rows[0], true, false);
    tampered.steps[index] = Step::ThreeByThree { diagram: Box::new(n) };
    match replay(&tampered) {
        Err(NenError::StepInvalid { index: i, .. }) => assert_eq!(i, index),
        other => panic!("expected StepInvalid, got {other:?}"),
    }
}

#[test]
fn module_swap_script_examples() {
    let der = replay(&builtin_sv1_script(&z(1)).unwrap()).unwrap();
    let th = theta(&triple(&[&[1]])).unwrap();
    assert_eq!(der.coefficient_of(&th).abs(), 1);
    assert_eq!(der.identity.len(), 1);
    assert_eq!(der.generators[0].label.as_deref(), Some("theta[Z, [1], Z]"));

    let der = replay(&builtin_sv1_script(&z(0)).unwrap()).unwrap();
    assert!(der.identity.len() <= 1);
    for g in &der.generators {
        assert!(g.des.left().is_zero() && g.des.mid().is_zero() && g.des.right().is_zero());
    }

    let der = replay(&builtin_sv1_script(&z(3)).unwrap()).unwrap();
    assert_eq!(der.identity.len(), 1);
}

fn standard_split(sub: FreeModule, mid: FreeModule, quot: FreeModule) -> SplitSequence {
    let (a, b) = (sub.rank, quot.rank);
    let id = RatMatrix::identity(a + b);
    SplitSequence {
        inc: id.block(0, 0, a + b, a),
        proj: id.block(a, 0, b, a + b),
        retraction: id.block(0, 0, a, a + b),
        section: id.block(0, a, a + b, b),
        sub,
        mid,
        quot,
    }
}

fn block_diagonal_instance(alpha1: &[&[i64]], alpha2: &[&[i64]], corner: Option<RatMatrix>) -> RelationAInstance {
    let m = |n: usize, l: &str| FreeModule::integral(n, l);
    let (a, b) = (alpha1.len(), alpha2.len());
    let al1 = if a == 0 { RatMatrix::zeros(0, 0) } else { RatMatrix::from_i64(alpha1) };
    let al2 = if b == 0 { RatMatrix::zeros(0, 0) } else { RatMatrix::from_i64(alpha2) };
    let mut alpha = RatMatrix::block_diag(&[al1.clone(), al2.clone()]);
    if let Some(c) = corner {
        for i in 0..c.rows() {
            for j in 0..c.cols() {
                alpha.set(i, a + j, c.get(i, j).clone());
            }
        }
    }
    let t1 = make_triple(m(a, "P'"), al1, m(a, "Q'")).unwrap();
    let t = make_triple(m(a + b, "P"), alpha, m(a + b, "Q")).unwrap();
    let t2 = make_triple(m(b, "P''"), al2, m(b, "Q''")).unwrap();
    let ps = standard_split(m(a, "P'"), m(a + b, "P"), m(b, "P''"));
    let qs = standard_split(m(a, "Q'"), m(a + b, "Q"), m(b, "Q''"));
    RelationAInstance {
        a: SwanMorphism {
            source: t1,
            target: t.clone(),
            p: ps.inc.clone(),
            q: qs.inc.clone(),
        },
        b: SwanMorphism {
            source: t,
            target: t2,
            p: ps.proj.clone(),
            q: qs.proj.clone(),
        },
        p_split: ps,
        q_split: qs,
    }
}

#[test]
fn relation_a_with_block_diagonal_alpha() {
    let inst = block_diagonal_instance(&[&[2]], &[&[3]], None);
    inst.validate().unwrap();
    let der = replay(&builtin_relation_a_script(&inst).unwrap()).unwrap();
    let th = |t| theta(t).unwrap();
    let (c1, c, c2) = (
        der.coefficient_of(&th(&inst.a.source)),
        der.coefficient_of(&th(&inst.a.target)),
        der.coefficient_of(&th(&inst.b.target)),
    );
    assert_eq!((c1, c, c2), (1, -1, 1));
}

#[test]
fn relation_a_with_zero_modules() {
    let inst = block_diagonal_instance(&[], &[], None);
    replay(&builtin_relation_a_script(&inst).unwrap()).unwrap();
}

#[test]
fn relation_a_rejects_an_incompatible_alpha() {
    let mut inst = block_diagonal_instance(&[&[2]], &[&[3]], None);
    inst.a.source = make_triple(inst.a.source.p().clone(), RatMatrix::from_i64(&[&[5]]), inst.a.source.q().clone()).unwrap();
    assert!(builtin_relation_a_script(&inst).is_err());
}

#[test]
fn relation_a_with_upper_triangular_alpha() {
    let inst = block_diagonal_instance(&[&[2]], &[&[3]], Some(RatMatrix::from_i64(&[&[7]])));
    inst.validate().unwrap();
    replay(&builtin_relation_a_script(&inst).unwrap()).unwrap();
}

#[test]
fn random_pairs_satisfy_relation_b() {
    let mut rng = sample::rng(7);
    for _ in 0..5 {
        let (t1, t2) = sample::composable_pair(&mut rng, 2, 100);
        let der = replay(&builtin_relation_b_script(&t1, &t2).unwrap()).unwrap();
        let t3 = relation_b_combine(&t1, &t2).unwrap();
        if t1.p().rank == 0 {
            continue;
        }
        assert_eq!(der.coefficient_of(&theta(&t3).unwrap()), -1);
    }
}

#[test]
fn scripts_round_trip_through_json() {
    let script = builtin_sv1_script(&z(1)).unwrap();
    let text = serde_json::to_string(&script).unwrap();
    let back: ProofScript = serde_json::from_str(&text).unwrap();
    assert_eq!(back, script);
    assert_eq!(replay(&back).unwrap(), replay(&script).unwrap());
}
