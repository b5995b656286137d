//! Quotient by compactly generated objects and the low-dimensional part of
//! the Gillet–Grayson model: edges, the loop of a double exact sequence, and
//! the lifted path whose endpoint computes the boundary.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{delta, k0_class, AlgebraError, BassSwanTriple};
use crate::lca::{equal_morphisms, mat_block, Iso, LcaAtom, LcaError, LcaMorphism, LcaObject, PrimExpr};
use crate::matrix::RatMatrix;
use crate::nenashev::{
    iso_column, left_right_swap_sides, split_33, NenError, Nen33, ProofScript, Relation,
    ScriptBuilder,
};
use crate::nenashev::{swap_rows_33, theta_role_swaps};
use crate::sequences::{
    compile_schematic, DoubleExact, ExactnessCertificate, Schematic, SeqError, ShortExact, Wiring,
};
use crate::theta::{self as theta_pos, theta, theta_schematic};

/// Replaces every compactly generated atom by `Zero`.
pub fn quotient_cg_object(x: &LcaObject) -> LcaObject {
    x.atoms()
        .iter()
        .map(|a| {
            if a.is_compactly_generated() {
                LcaAtom::Zero
            } else {
                a.clone()
            }
        })
        .collect()
}

/// Blocks touching a killed atom become zero.
pub fn quotient_cg_morphism(f: &LcaMorphism) -> LcaMorphism {
    let (src, dst) = (quotient_cg_object(f.source()), quotient_cg_object(f.target()));
    let mut out = LcaMorphism::zero(&src, &dst);
    for (i, t) in dst.atoms().iter().enumerate() {
        for (j, s) in src.atoms().iter().enumerate() {
            if *t != LcaAtom::Zero && *s != LcaAtom::Zero {
                out.set_block(i, j, f.block(i, j).clone())
                    .expect("surviving block keeps its endpoints");
            } else {
                out.set_block(i, j, PrimExpr::zero(s, t)).expect("zero block");
            }
        }
    }
    out
}

pub fn strip_zero_atoms(x: &LcaObject) -> LcaObject {
    x.strip_zero_atoms()
}

fn live(x: &LcaObject) -> Vec<usize> {
    (0..x.len()).filter(|&i| x.atoms()[i] != LcaAtom::Zero).collect()
}

/// Removes `Zero` summands from both ends.
pub fn strip_morphism(f: &LcaMorphism) -> LcaMorphism {
    f.sub_block(&live(f.target()), &live(f.source()))
}

/// The exact category a vertex or edge lives in. In `Mod` and `ModModFg`
/// a module `P` is written `Disc(P)` and `⊕P` as `CoprodDisc(P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ambient {
    Lca,
    Mod,
    LcaModCg,
    ModModFg,
}

impl Ambient {
    /// The quotient category killing compactly generated (resp. finitely
    /// generated) objects.
    pub fn quotient(self) -> Ambient {
        match self {
            Ambient::Lca | Ambient::LcaModCg => Ambient::LcaModCg,
            Ambient::Mod | Ambient::ModModFg => Ambient::ModModFg,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GGError {
    #[error("edge sequences have different cokernels {dotted} and {solid}")]
    CokernelMismatch { dotted: String, solid: String },
    #[error("path breaks between edges {0} and {1}")]
    Disconnected(usize, usize),
    #[error("lifted edge does not project to the reduced edge: {0}")]
    LiftProjectionMismatch(String),
    #[error("quotient schematic differs from the expected four rows: {0}")]
    SchematicMismatch(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Lca(#[from] LcaError),
    #[error(transparent)]
    Nen(#[from] NenError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GGVertex {
    pub ambient: Ambient,
    pub first: LcaObject,
    pub second: LcaObject,
}

impl GGVertex {
    pub fn origin(ambient: Ambient) -> GGVertex {
        GGVertex {
            ambient,
            first: LcaObject::zero(),
            second: LcaObject::zero(),
        }
    }
}

impl fmt::Display for GGVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// A pair of exact sequences with the same cokernel, running from the pair
/// of kernels to the pair of middle objects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GGEdge {
    pub source: GGVertex,
    pub target: GGVertex,
    pub dotted: ShortExact,
    pub solid: ShortExact,
}

impl GGEdge {
    pub fn new(ambient: Ambient, dotted: ShortExact, solid: ShortExact) -> Result<GGEdge, GGError> {
        if dotted.right() != solid.right() {
            return Err(GGError::CokernelMismatch {
                dotted: dotted.right().to_string(),
                solid: solid.right().to_string(),
            });
        }
        Ok(GGEdge {
            source: GGVertex {
                ambient,
                first: dotted.left().clone(),
                second: solid.left().clone(),
            },
            target: GGVertex {
                ambient,
                first: dotted.mid().clone(),
                second: solid.mid().clone(),
            },
            dotted,
            solid,
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.source.ambient
    }

    pub fn is_degenerate(&self) -> bool {
        self.source == self.target
    }
}

/// `e(A)`: both sequences `0 -> A = A`, from `(0, 0)` to `(A, A)`.
pub fn e_of_object(a: &LcaObject) -> GGEdge {
    e_in(Ambient::Lca, a)
}

fn e_in(ambient: Ambient, a: &LcaObject) -> GGEdge {
    let s = ShortExact::from_cert(ExactnessCertificate::IdentityRight { x: a.clone() })
        .expect("identity sequence");
    GGEdge::new(ambient, s.clone(), s).expect("same cokernel")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub edge: GGEdge,
    pub orientation: Orientation,
}

impl PathStep {
    pub fn start(&self) -> &GGVertex {
        match self.orientation {
            Orientation::Forward => &self.edge.source,
            Orientation::Backward => &self.edge.target,
        }
    }

    pub fn end(&self) -> &GGVertex {
        match self.orientation {
            Orientation::Forward => &self.edge.target,
            Orientation::Backward => &self.edge.source,
        }
    }
}

/// A path of edges traversed forwards or backwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GGPath {
    pub steps: Vec<PathStep>,
}

impl GGPath {
    pub fn new(steps: Vec<(GGEdge, Orientation)>) -> Result<GGPath, GGError> {
        let path = GGPath {
            steps: steps
                .into_iter()
                .map(|(edge, orientation)| PathStep { edge, orientation })
                .collect(),
        };
        path.validate()?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<(), GGError> {
        for (k, w) in self.steps.windows(2).enumerate() {
            if w[0].end() != w[1].start() {
                return Err(GGError::Disconnected(k, k + 1));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Option<&GGVertex> {
        self.steps.first().map(PathStep::start)
    }

    pub fn end(&self) -> Option<&GGVertex> {
        self.steps.last().map(PathStep::end)
    }

    /// Starts and ends at `(0, 0)`.
    pub fn is_closed(&self) -> bool {
        match (self.start(), self.end()) {
            (Some(s), Some(e)) => s == e && s.first.is_empty() && s.second.is_empty(),
            _ => false,
        }
    }
}

/// The loop `e(A)`, `(Yang, Yin)`, `e(B)` backwards, through `(A, A)` and
/// `(B, B)` for `d: A -> B -> C`.
pub fn loop_e(d: &DoubleExact) -> GGPath {
    loop_in(Ambient::Lca, d)
}

fn loop_in(ambient: Ambient, d: &DoubleExact) -> GGPath {
    let middle = GGEdge::new(ambient, d.yang().clone(), d.yin().clone()).expect("same cokernel");
    GGPath::new(vec![
        (e_in(ambient, d.left()), Orientation::Forward),
        (middle, Orientation::Forward),
        (e_in(ambient, d.mid()), Orientation::Backward),
    ])
    .expect("consecutive vertices agree")
}

fn quotient_row(row: &ShortExact) -> Result<Option<ShortExact>, SeqError> {
    let untouched = |x: &LcaObject| quotient_cg_object(x) == *x;
    let cert = match row.cert() {
        c @ (ExactnessCertificate::IdentityLeft { x } | ExactnessCertificate::IdentityRight { x })
            if untouched(x) =>
        {
            c.clone()
        }
        c @ ExactnessCertificate::CgQuotient { .. } => c.clone(),
        c => ExactnessCertificate::CgQuotient {
            inner: Box::new(c.clone()),
        },
    };
    let q = ShortExact::from_cert(cert)?;
    Ok((!(q.left().is_empty() && q.mid().is_empty() && q.right().is_empty())).then_some(q))
}

/// Ranks of the surviving summands: `None` for killed ones.
fn survivors(x: &LcaObject) -> Vec<Option<usize>> {
    let mut k = 0;
    x.atoms()
        .iter()
        .map(|a| {
            if a.is_compactly_generated() || *a == LcaAtom::Zero {
                None
            } else {
                k += 1;
                Some(k - 1)
            }
        })
        .collect()
}

fn reindex(perm: &[(usize, i8)], above: &LcaObject, below: &LcaObject) -> Vec<(usize, i8)> {
    let (sa, sb) = (survivors(above), survivors(below));
    perm.iter()
        .enumerate()
        .filter_map(|(i, &(t, s))| sa[i].map(|_| (sb[t].expect("wiring preserves atoms"), s)))
        .collect()
}

/// Applies the quotient to every row, drops rows that vanish and restricts
/// the wiring to the surviving summands.
pub fn quotient_cg_schematic(s: &Schematic) -> Result<Schematic, SeqError> {
    let rows = |rs: &[ShortExact]| -> Result<Vec<ShortExact>, SeqError> {
        Ok(rs.iter().map(quotient_row).collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect())
    };
    let (a, b) = (s.columns_above(), s.columns_below());
    Ok(Schematic {
        above: rows(&s.above)?,
        below: rows(&s.below)?,
        wiring: Wiring {
            left: reindex(&s.wiring.left, &a.0, &b.0),
            mid: reindex(&s.wiring.mid, &a.1, &b.1),
            right: reindex(&s.wiring.right, &a.2, &b.2),
        },
    })
}

/// The four rows that survive the quotient:
///
/// ```text
///  above                      below
///  0  -> ⊕P =  ⊕P             0 -> ⊕P -s-> ⊕P
///  0  -> ⊕Q -s-> ⊕Q           0 -> ⊕Q =  ⊕Q
/// ```
pub fn expected_quotient_schematic(t: &BassSwanTriple) -> Result<Schematic, SeqError> {
    let coprod = |m: &crate::algebra::FreeModule| LcaObject::atom(LcaAtom::CoprodDisc(m.clone()));
    let quot = |c: ExactnessCertificate| {
        ShortExact::from_cert(ExactnessCertificate::CgQuotient { inner: Box::new(c) })
    };
    let ident = |x: LcaObject| ShortExact::from_cert(ExactnessCertificate::IdentityRight { x });
    if t.p().rank == 0 {
        // Every row vanishes.
        return Ok(Schematic {
            above: vec![],
            below: vec![],
            wiring: Wiring::identity(0, 0, 0),
        });
    }
    Ok(Schematic {
        above: vec![
            ident(coprod(t.p()))?,
            quot(ExactnessCertificate::CoprodShift { p: t.q().clone() })?,
        ],
        below: vec![
            quot(ExactnessCertificate::CoprodShift { p: t.p().clone() })?,
            ident(coprod(t.q()))?,
        ],
        wiring: Wiring::identity(0, 2, 2),
    })
}

/// The image of the comparison sequence in the quotient category.
pub fn reduced_theta(t: &BassSwanTriple) -> Result<(Schematic, DoubleExact), GGError> {
    let q = quotient_cg_schematic(&theta_schematic(t)?)?;
    let expected = expected_quotient_schematic(t)?;
    if q != expected {
        return Err(GGError::SchematicMismatch(format!(
            "{} rows above, {} below",
            q.above.len(),
            q.below.len()
        )));
    }
    let d = compile_schematic(&q)?;
    Ok((q, d))
}

fn same_sequence(a: &ShortExact, b: &ShortExact) -> Result<bool, LcaError> {
    Ok(a.left() == b.left()
        && a.mid() == b.mid()
        && a.right() == b.right()
        && equal_morphisms(a.inc(), b.inc())?.equal
        && equal_morphisms(a.sur(), b.sur())?.equal)
}

fn strip_sequence(s: &ShortExact) -> Result<ShortExact, SeqError> {
    ShortExact::from_cert(ExactnessCertificate::CgQuotient {
        inner: Box::new(s.cert().clone()),
    })
}

/// The module-level edge `Q -> ⊕P ⊕ ⊕Q -(1 ⊕ s)-> ⊕P ⊕ ⊕Q` against
/// `P -> ⊕P ⊕ ⊕Q -(s ⊕ 1)-> ⊕P ⊕ ⊕Q`. Checks equal cokernels and that the
/// quotient by finitely generated modules gives back the middle edge of the
/// loop of `reduced`, with the roles of the two sequences exchanged.
pub fn lift_edge(reduced: &DoubleExact, t: &BassSwanTriple) -> Result<GGEdge, GGError> {
    let coprod = |m: &crate::algebra::FreeModule| LcaObject::atom(LcaAtom::CoprodDisc(m.clone()));
    let sum = |a: ExactnessCertificate, b: ExactnessCertificate| {
        ShortExact::from_cert(ExactnessCertificate::DirectSum { parts: vec![a, b] })
    };
    let dotted = sum(
        ExactnessCertificate::IdentityRight { x: coprod(t.p()) },
        ExactnessCertificate::CoprodShift { p: t.q().clone() },
    )?;
    let solid = sum(
        ExactnessCertificate::CoprodShift { p: t.p().clone() },
        ExactnessCertificate::IdentityRight { x: coprod(t.q()) },
    )?;
    let edge = GGEdge::new(Ambient::Mod, dotted, solid)?;
    let middle = &loop_in(Ambient::LcaModCg, reduced).steps[1].edge;
    let (qd, qs) = (strip_sequence(&edge.dotted)?, strip_sequence(&edge.solid)?);
    if !same_sequence(&qd, &middle.solid)? {
        return Err(GGError::LiftProjectionMismatch("dotted sequence".into()));
    }
    if !same_sequence(&qs, &middle.dotted)? {
        return Err(GGError::LiftProjectionMismatch("solid sequence".into()));
    }
    Ok(edge)
}

/// Result of the boundary computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundary {
    /// `[P] − [Q]` in `K_0`, one entry per factor of the order.
    pub class: Vec<i64>,
    pub endpoint: GGVertex,
    pub path: GGPath,
}

/// Lifts the loop of the reduced comparison sequence to the path
/// `e(A)`, `e(B)`, lifted edge backwards, ending at `(Q, P)`, and reads off
/// `[P] − [Q]`.
pub fn boundary(t: &BassSwanTriple) -> Result<Boundary, GGError> {
    let (_, reduced) = reduced_theta(t)?;
    let lift = lift_edge(&reduced, t)?;
    // In rank 0 every row of the reduced sequence vanishes; pass through
    // the rank-0 summands the lifted edge is written in instead.
    let top = if reduced.mid().is_zero() {
        lift.target.first.clone()
    } else {
        reduced.mid().clone()
    };
    let path = GGPath::new(vec![
        (e_in(Ambient::Mod, reduced.left()), Orientation::Forward),
        (e_in(Ambient::Mod, &top), Orientation::Forward),
        (lift, Orientation::Backward),
    ])?;
    let endpoint = path.end().expect("nonempty path").clone();
    let class = k0_class(t.p())
        .into_iter()
        .zip(k0_class(t.q()))
        .map(|(p, q)| p - q)
        .collect();
    Ok(Boundary {
        class,
        endpoint,
        path,
    })
}

/// Reduces `⟨⟨A^n, φ, A^n⟩⟩` to `0 -> A_R^n -(φ, 1)-> A_R^n`: the swap of
/// the two lattice roles, excision of everything except the vector row, a
/// 3×3 against the lattice sequence, and a left-right swap. The identity
/// proved is `[⟨⟨A^n, φ, A^n⟩⟩] + [0 -> A_R^n -(φ, 1)-> A_R^n] = 0`.
pub fn builtin_sw1_script(phi: &RatMatrix, n: usize) -> Result<ProofScript, NenError> {
    let t = delta(phi, n)?;
    let th = theta(&t)?;
    let module = t.p().clone();
    let vect = LcaObject::atom(LcaAtom::Vect(module.clone()));
    let mat_phi = {
        let a = LcaAtom::Vect(module.clone());
        Iso::from_morphism(&LcaMorphism::from_expr(mat_block(&a, &a, phi.clone()))?)?
    };
    let (_, rhs) = left_right_swap_sides(&vect, &mat_phi)?;
    let mut b = ScriptBuilder::new();

    let [sl, sm, sr] = theta_role_swaps();
    let (ra, s) = swap_rows_33(&mut b, &th, &sl, &sm, &sr)?;

    let keep = (
        complement(4, &[theta_pos::left::P]),
        complement(5, &[theta_pos::mid::VECT]),
        complement(4, &[theta_pos::right::TORUS_P]),
    );
    let (rb, _, m) = split_33(&mut b, &s, &keep.0, &keep.1, &keep.2)?;
    let rb = b.eliminate(rb, &[], &[&s, &m])?;

    let lattice = DoubleExact::diagonal(ShortExact::from_cert(ExactnessCertificate::LatticeInVector {
        p: module.clone(),
    })?);
    let disc = LcaObject::atom(LcaAtom::Disc(module.clone()));
    let torus = LcaObject::atom(LcaAtom::Torus(module.clone()));
    let diag = |x: &LcaObject| -> Result<DoubleExact, NenError> {
        Ok(DoubleExact::diagonal(crate::sequences::iso_sequence(&Iso::identity(x))?))
    };
    let c1 = iso_column(&Iso::identity(&vect), &mat_phi)?;
    let n33 = b.three_by_three(Nen33::new(
        [m.clone(), lattice, DoubleExact::zero()],
        [diag(&disc)?, c1.clone(), diag(&torus)?],
    ))?;
    let rc = b.eliminate(n33, &[], &[&m, &c1])?;
    let rd = b.left_right_swap(&vect, &mat_phi)?;

    // ra: θ − S, rb: M − S, rc: M + C, rd: C − R.
    let sum = b.combine(&[(ra, 1), (rb, -1), (rc, 1), (rd, -1)])?;
    let last = b.eliminate(sum, &[], &[&th, &rhs])?;
    let mut expected = Relation::single(&th, 1);
    expected.add_term(rhs.key(), 1);
    b.expect(last, &expected)?;
    Ok(b.finish())
}

fn complement(n: usize, positions: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !positions.contains(i)).collect()
}
