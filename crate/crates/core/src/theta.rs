//! The comparison map: a Bass–Swan triple `[P, φ, Q]` goes to the double
//! exact sequence `⟨⟨P, φ, Q⟩⟩`, given by ten rows:
//!
//! ```text
//!  above                          below
//!  0    -> ⊕P   =  ⊕P             P    -> ⊕P   -s-> ⊕P
//!  P    -> P_R  -> T_P            ∏T_P -s-> ∏T_P -> T_P
//!  ∏T_P =  ∏T_P -> 0              0    -> ⊕Q   =  ⊕Q
//!  Q    -> ⊕Q   -s-> ⊕Q           Q    -φ⁻¹ι-> P_R -qφ-> T_Q
//!  ∏T_Q -s-> ∏T_Q -> T_Q          ∏T_Q =  ∏T_Q -> 0
//! ```
//!
//! Column objects are the concatenation of the row objects, so the left
//! object is `P ⊕ ∏T_P ⊕ Q ⊕ ∏T_Q`, the middle one
//! `⊕P ⊕ P_R ⊕ ∏T_P ⊕ ⊕Q ⊕ ∏T_Q` and the right one `⊕P ⊕ T_P ⊕ ⊕Q ⊕ T_Q`.
//! The wiring matches summands by role.

use crate::algebra::BassSwanTriple;
use crate::lca::{LcaAtom, LcaObject};
use crate::sequences::{
    compile_schematic, DoubleExact, ExactnessCertificate as C, Schematic, SeqError, ShortExact,
    Wiring,
};

/// Positions of the summands of the middle object.
pub mod mid {
    pub const COPROD_P: usize = 0;
    pub const VECT: usize = 1;
    pub const PROD_P: usize = 2;
    pub const COPROD_Q: usize = 3;
    pub const PROD_Q: usize = 4;
}

/// Positions of the summands of the left object.
pub mod left {
    pub const P: usize = 0;
    pub const PROD_P: usize = 1;
    pub const Q: usize = 2;
    pub const PROD_Q: usize = 3;
}

/// Positions of the summands of the right object.
pub mod right {
    pub const COPROD_P: usize = 0;
    pub const TORUS_P: usize = 1;
    pub const COPROD_Q: usize = 2;
    pub const TORUS_Q: usize = 3;
}

fn row(cert: C) -> Result<ShortExact, SeqError> {
    ShortExact::from_cert(cert)
}

pub fn theta_schematic(t: &BassSwanTriple) -> Result<Schematic, SeqError> {
    let (p, q) = (t.p().clone(), t.q().clone());
    let coprod = |m: &crate::algebra::FreeModule| LcaObject::atom(LcaAtom::CoprodDisc(m.clone()));
    let prod = |m: &crate::algebra::FreeModule| LcaObject::atom(LcaAtom::ProdTorus(m.clone()));
    let above = vec![
        row(C::IdentityRight { x: coprod(&p) })?,
        row(C::LatticeInVector { p: p.clone() })?,
        row(C::IdentityLeft { x: prod(&p) })?,
        row(C::CoprodShift { p: q.clone() })?,
        row(C::ProdShift { p: q.clone() })?,
    ];
    let below = vec![
        row(C::CoprodShift { p: p.clone() })?,
        row(C::ProdShift { p: p.clone() })?,
        row(C::IdentityRight { x: coprod(&q) })?,
        row(C::PhiTwisted {
            p: p.clone(),
            phi: t.phi().clone(),
            q: q.clone(),
        })?,
        row(C::IdentityLeft { x: prod(&q) })?,
    ];
    // Below, the middle column reads ⊕P, ∏T_P, ⊕Q, P_R, ∏T_Q.
    let wiring = Wiring {
        left: (0..4).map(|i| (i, 1)).collect(),
        mid: vec![(0, 1), (3, 1), (1, 1), (2, 1), (4, 1)],
        right: (0..4).map(|i| (i, 1)).collect(),
    };
    Ok(Schematic {
        above,
        below,
        wiring,
    })
}

pub fn theta(t: &BassSwanTriple) -> Result<DoubleExact, SeqError> {
    Ok(compile_schematic(&theta_schematic(t)?)?.with_label(format!(
        "theta[{}, {}, {}]",
        t.p(),
        phi_label(t),
        t.q()
    )))
}

fn phi_label(t: &BassSwanTriple) -> String {
    let m = t.phi();
    let rows: Vec<String> = (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    format!("[{}]", rows.join(";"))
}
