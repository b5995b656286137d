//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//! `cargo test -p relk-core --test acceptance`

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{abs, arrow_negations, cofactor_det, random_atom, random_expr};
use relk_core::algebra::{delta, relation_b_combine};
use relk_core::gillet_grayson::{
    boundary, builtin_sw1_script, expected_quotient_schematic, lift_edge, loop_e,
    quotient_cg_schematic, reduced_theta,
};
use relk_core::lca::{disagreement_count, equal_morphisms, Iso, LcaAtom, LcaMorphism, LcaObject, PrimExpr};
use relk_core::nenashev::{
    builtin_relation_a_script, builtin_relation_b_script, check_33, double_iso_diagram, replay,
    Derivation, Nen33, ProofScript, Step,
};
use relk_core::sequences::DoubleExact;
use relk_core::theta::{theta, theta_schematic};
use relk_core::{det_invariant, sample, BassSwanTriple};

const BOUND: i64 = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, Box<dyn FnMut(&mut Corpus) -> Outcome>);

/// Double exact sequences met along the way, for the loop check.
#[derive(Default)]
struct Corpus {
    des: Vec<DoubleExact>,
    diagrams: Vec<Nen33>,
}

impl Corpus {
    fn derivation(&mut self, d: &Derivation) {
        self.des.extend(d.generators.iter().map(|g| g.des.clone()));
    }

    fn script(&mut self, s: &ProofScript) {
        for step in &s.steps {
            if let Step::ThreeByThree { diagram } = step {
                self.diagrams.push((**diagram).clone());
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Option<Duration>) -> Result<(), String> {
    match limit {
        Some(l) if start.elapsed() > l => Err(format!("took longer than {} s", l.as_secs())),
        _ => Ok(()),
    }
}

fn theta_well_formed(corpus: &mut Corpus) -> Outcome {
    let mut rng = sample::rng(1);
    for i in 0..200 {
        let t = sample::triple(&mut rng, 3, BOUND);
        let d = theta(&t).map_err(|e| format!("triple {i}: {e}"))?;
        for side in [d.yin(), d.yang()] {
            side.validate().map_err(|e| format!("triple {i}: {e}"))?;
            let comp = side.sur().compose(side.inc()).map_err(|e| e.to_string())?;
            ensure(comp.is_zero().map_err(|e| e.to_string())?, || format!("triple {i}: sur ∘ inc ≠ 0"))?;
        }
        corpus.des.push(d);
    }
    Ok("200 triples, both sequences exact".into())
}

fn relation_a(corpus: &mut Corpus) -> Outcome {
    let mut rng = sample::rng(2);
    let mut squares = 0;
    for i in 0..50 {
        let inst = sample::relation_a_instance(&mut rng, 2, BOUND);
        let script = builtin_relation_a_script(&inst).map_err(|e| format!("instance {i}: {e}"))?;
        let der = replay(&script).map_err(|e| format!("instance {i}: {e}"))?;
        let coef = |t: &BassSwanTriple| theta(t).map(|d| der.coefficient_of(&d)).map_err(|e| e.to_string());
        let got = (coef(inst.sub())?, coef(inst.mid())?, coef(inst.quot())?);
        ensure(got == (1, -1, 1), || format!("instance {i}: coefficients {got:?}"))?;
        squares += script.steps.iter().filter(|s| matches!(s, Step::ThreeByThree { .. })).count();
        corpus.derivation(&der);
        corpus.script(&script);
    }
    Ok(format!("50 instances, {squares} 3×3 diagrams with 8 squares and 6 exact sequences each"))
}

fn relation_b(corpus: &mut Corpus) -> Outcome {
    let mut rng = sample::rng(3);
    for i in 0..50 {
        let (t1, t2) = sample::composable_pair(&mut rng, 3, BOUND);
        let script = builtin_relation_b_script(&t1, &t2).map_err(|e| format!("pair {i}: {e}"))?;
        let der = replay(&script).map_err(|e| format!("pair {i}: {e}"))?;
        let t12 = relation_b_combine(&t1, &t2).map_err(|e| e.to_string())?;
        let coef = |t: &BassSwanTriple| theta(t).map(|d| der.coefficient_of(&d)).map_err(|e| e.to_string());
        let got = (coef(&t1)?, coef(&t2)?, coef(&t12)?);
        ensure(got == (1, 1, -1), || format!("pair {i}: coefficients {got:?}"))?;
        corpus.derivation(&der);
        corpus.script(&script);
    }
    Ok("50 pairs, identity +1 +1 −1".into())
}

fn determinants() -> Outcome {
    let mut rng = sample::rng(4);
    for i in 0..500 {
        let (t1, t2) = sample::composable_pair(&mut rng, 4, BOUND);
        let t = relation_b_combine(&t1, &t2).map_err(|e| e.to_string())?;
        ensure(det_invariant(&t) == det_invariant(&t1) * det_invariant(&t2), || format!("pair {i}: not multiplicative"))?;
        ensure(det_invariant(&t) == abs(cofactor_det(t.phi())), || format!("pair {i}: differs from cofactor expansion"))?;
        let n = t1.p().rank;
        let d = delta(t1.phi(), n).map_err(|e| e.to_string())?;
        ensure(det_invariant(&d) == abs(cofactor_det(t1.phi())), || format!("pair {i}: delta"))?;
    }
    Ok("500 pairs with n ≤ 4, plus delta".into())
}

fn boundaries(corpus: &mut Corpus) -> Outcome {
    let mut rng = sample::rng(5);
    for i in 0..100 {
        let t = sample::triple(&mut rng, 3, BOUND);
        let err = |e: &dyn std::fmt::Display| format!("triple {i}: {e}");
        let q = quotient_cg_schematic(&theta_schematic(&t).map_err(|e| err(&e))?).map_err(|e| err(&e))?;
        ensure(q == expected_quotient_schematic(&t).map_err(|e| err(&e))?, || err(&"quotient differs"))?;
        let (_, reduced) = reduced_theta(&t).map_err(|e| err(&e))?;
        lift_edge(&reduced, &t).map_err(|e| err(&e))?;
        let b = boundary(&t).map_err(|e| err(&e))?;
        let disc = |m| LcaObject::atom(LcaAtom::Disc(m));
        ensure(b.endpoint.first == disc(t.q().clone()), || err(&"endpoint first is not Q"))?;
        ensure(b.endpoint.second == disc(t.p().clone()), || err(&"endpoint second is not P"))?;
        let rank_diff = t.p().rank as i64 - t.q().rank as i64;
        ensure(b.class == vec![rank_diff] && rank_diff == 0, || err(&format!("class {:?}", b.class)))?;
        corpus.des.push(reduced);
    }
    Ok("100 triples, quotient, lifted edge, endpoint (Q, P), class 0".into())
}

fn delta_reduction(corpus: &mut Corpus) -> Outcome {
    let mut rng = sample::rng(6);
    for i in 0..50 {
        let n = 1 + sample::rank(&mut rng, 2);
        let phi = sample::invertible(&mut rng, n, BOUND);
        let err = |e: &dyn std::fmt::Display| format!("φ {i}: {e}");
        let script = builtin_sw1_script(&phi, n).map_err(|e| err(&e))?;
        let atom = LcaAtom::Vect(delta(&phi, n).map_err(|e| err(&e))?.p().clone());
        let mat = LcaMorphism::from_expr(PrimExpr::mat(atom.clone(), atom.clone(), phi.clone())).map_err(|e| err(&e))?;
        let swaps_phi = script.steps.iter().any(|s| match s {
            Step::LeftRightSwap { phi: p, .. } => equal_morphisms(&p.fwd, &mat).is_ok_and(|c| c.equal),
            _ => false,
        });
        ensure(swaps_phi, || err(&"no left-right swap by φ"))?;
        let der = replay(&script).map_err(|e| err(&e))?;
        let th = theta(&delta(&phi, n).map_err(|e| err(&e))?).map_err(|e| err(&e))?;
        ensure(der.coefficient_of(&th) == 1, || err(&"theta coefficient"))?;
        let vect = LcaObject::atom(atom.clone());
        let rep = der
            .generators
            .iter()
            .find(|g| g.des.left().is_empty() && g.des.mid() == &vect && g.des.right() == &vect)
            .ok_or_else(|| err(&"no 0 -> A_R^n -> A_R^n generator"))?;
        let id = LcaMorphism::identity(&vect);
        let is = |a: &LcaMorphism, b: &LcaMorphism| equal_morphisms(a, b).is_ok_and(|c| c.equal);
        let (yin, yang) = (rep.des.yin().sur(), rep.des.yang().sur());
        ensure((is(yin, &mat) && is(yang, &id)) || (is(yin, &id) && is(yang, &mat)), || {
            err(&"representative is not (φ, 1)")
        })?;
        corpus.derivation(&der);
        corpus.script(&script);
    }
    Ok("50 automorphisms with n ≤ 3".into())
}

fn mutations(corpus: &mut Corpus) -> Outcome {
    let mut rng = sample::rng(7);
    let mut diagrams = Vec::new();
    for _ in 0..6 {
        let d = theta(&sample::triple(&mut rng, 2, BOUND)).map_err(|e| e.to_string())?;
        let ids = (Iso::identity(d.left()), Iso::identity(d.mid()), Iso::identity(d.right()));
        diagrams.push(double_iso_diagram(&d, &d, &ids.0, &ids.1, &ids.2).map_err(|e| e.to_string())?);
    }
    diagrams.extend(corpus.diagrams.iter().take(12).cloned());
    let mut tried = 0;
    let mut per_diagram: Vec<Vec<(Nen33, String)>> = diagrams.iter().map(arrow_negations).collect();
    while tried < 100 && per_diagram.iter().any(|m| !m.is_empty()) {
        for (k, muts) in per_diagram.iter_mut().enumerate() {
            if tried == 100 {
                break;
            }
            if let Some((m, what)) = muts.pop() {
                ensure(check_33(&m).is_err(), || format!("diagram {k}, {what}: accepted"))?;
                tried += 1;
            }
        }
    }
    ensure(tried == 100, || format!("only {tried} mutations available"))?;
    Ok(format!("100 of 100 negations rejected across {} diagrams", diagrams.len()))
}

fn loops(corpus: &Corpus) -> Outcome {
    let all = corpus
        .des
        .iter()
        .chain(corpus.diagrams.iter().flat_map(|n| n.rows.iter().chain(n.cols.iter())));
    let mut count = 0;
    for (i, d) in all.enumerate() {
        let l = loop_e(d);
        ensure(l.is_closed(), || format!("sequence {i}: loop not closed"))?;
        for k in [0, 2] {
            let e = &l.steps[k].edge;
            ensure(e.dotted == e.solid, || format!("sequence {i}: e-edge with different sequences"))?;
        }
        count += 1;
    }
    Ok(format!("{count} double exact sequences"))
}

fn engine() -> Outcome {
    let mut rng = sample::rng(9);
    for _ in 0..300 {
        let p = common::z(1 + sample::rank(&mut rng, 2));
        let (s, t) = (random_atom(&mut rng, &p), random_atom(&mut rng, &p));
        let f = LcaMorphism::from_expr(random_expr(&mut rng, &s, &t, 3)).map_err(|e| e.to_string())?;
        let g = LcaMorphism::from_expr(random_expr(&mut rng, &s, &t, 3)).map_err(|e| e.to_string())?;
        equal_morphisms(&f, &g).map_err(|e| e.to_string())?;
        equal_morphisms(&f, &f).map_err(|e| e.to_string())?;
    }
    let n = disagreement_count();
    ensure(n == 0, || format!("{n} disagreements"))?;
    Ok("0 disagreements over the whole run".into())
}

fn main() -> ExitCode {
    let mut corpus = Corpus::default();
    let secs = Duration::from_secs;
    let mut criteria: Vec<Criterion> = vec![
        ("theta well-formedness", Some(secs(30)), Box::new(theta_well_formed)),
        ("relation A replay", Some(secs(60)), Box::new(relation_a)),
        ("relation B replay", Some(secs(60)), Box::new(relation_b)),
        ("determinant invariant", None, Box::new(|_| determinants())),
        ("boundary compatibility", Some(secs(30)), Box::new(boundaries)),
        ("delta reduction replay", None, Box::new(delta_reduction)),
        ("mutation robustness", None, Box::new(mutations)),
        ("loop closure", None, Box::new(|c| loops(c))),
        ("engine self-consistency", None, Box::new(|_| engine())),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter_mut().enumerate() {
        let start = Instant::now();
        let result = run(&mut corpus).and_then(|msg| within(start, *limit).map(|_| msg));
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("criterion {} PASS  {name}: {msg} ({elapsed:.2} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {msg} ({elapsed:.2} s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
