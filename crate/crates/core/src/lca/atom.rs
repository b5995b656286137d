use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::FreeModule;

/// The five atom kinds plus the zero object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AtomKind {
    Disc,
    Vect,
    Torus,
    CoprodDisc,
    ProdTorus,
    Zero,
}

/// Structural class used by the swap-vanishing rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomClass {
    Vector,
    Compact,
    Discrete,
    Zero,
}

/// `Disc(P)` is `P` with the discrete topology, `Vect(P)` is `P_R`,
/// `Torus(P)` is `P_R / P`, `CoprodDisc(P)` is the countable direct sum of
/// copies of `P` and `ProdTorus(P)` the countable product of copies of `T_P`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LcaAtom {
    Disc(FreeModule),
    Vect(FreeModule),
    Torus(FreeModule),
    CoprodDisc(FreeModule),
    ProdTorus(FreeModule),
    Zero,
}

impl LcaAtom {
    pub fn new(kind: AtomKind, module: &FreeModule) -> LcaAtom {
        let m = module.clone();
        match kind {
            AtomKind::Disc => LcaAtom::Disc(m),
            AtomKind::Vect => LcaAtom::Vect(m),
            AtomKind::Torus => LcaAtom::Torus(m),
            AtomKind::CoprodDisc => LcaAtom::CoprodDisc(m),
            AtomKind::ProdTorus => LcaAtom::ProdTorus(m),
            AtomKind::Zero => LcaAtom::Zero,
        }
    }

    pub fn kind(&self) -> AtomKind {
        match self {
            LcaAtom::Disc(_) => AtomKind::Disc,
            LcaAtom::Vect(_) => AtomKind::Vect,
            LcaAtom::Torus(_) => AtomKind::Torus,
            LcaAtom::CoprodDisc(_) => AtomKind::CoprodDisc,
            LcaAtom::ProdTorus(_) => AtomKind::ProdTorus,
            LcaAtom::Zero => AtomKind::Zero,
        }
    }

    pub fn module(&self) -> Option<&FreeModule> {
        match self {
            LcaAtom::Disc(m)
            | LcaAtom::Vect(m)
            | LcaAtom::Torus(m)
            | LcaAtom::CoprodDisc(m)
            | LcaAtom::ProdTorus(m) => Some(m),
            LcaAtom::Zero => None,
        }
    }

    /// Number of real (or integer) coordinates of one copy of the module.
    pub fn dim(&self) -> usize {
        self.module().map_or(0, FreeModule::lattice_dim)
    }

    pub fn class(&self) -> AtomClass {
        if self.dim() == 0 {
            return AtomClass::Zero;
        }
        match self.kind() {
            AtomKind::Vect => AtomClass::Vector,
            AtomKind::Torus | AtomKind::ProdTorus => AtomClass::Compact,
            AtomKind::Disc | AtomKind::CoprodDisc => AtomClass::Discrete,
            AtomKind::Zero => AtomClass::Zero,
        }
    }

    /// Everything except a countable direct sum of discrete copies is
    /// compactly generated.
    pub fn is_compactly_generated(&self) -> bool {
        self.kind() != AtomKind::CoprodDisc || self.dim() == 0
    }
}

impl fmt::Display for LcaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcaAtom::Disc(m) => write!(f, "{m}"),
            LcaAtom::Vect(m) => write!(f, "{m}_R"),
            LcaAtom::Torus(m) => write!(f, "T_{m}"),
            LcaAtom::CoprodDisc(m) => write!(f, "⊕{m}"),
            LcaAtom::ProdTorus(m) => write!(f, "∏T_{m}"),
            LcaAtom::Zero => write!(f, "0"),
        }
    }
}

/// A finite ordered direct sum of atoms. Order matters: wirings refer to
/// positions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LcaObject {
    summands: Vec<LcaAtom>,
}

impl LcaObject {
    pub fn new(summands: Vec<LcaAtom>) -> Self {
        Self { summands }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn atom(a: LcaAtom) -> Self {
        Self { summands: vec![a] }
    }

    pub fn atoms(&self) -> &[LcaAtom] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// True if every summand has dimension zero.
    pub fn is_zero(&self) -> bool {
        self.summands.iter().all(|a| a.dim() == 0)
    }

    pub fn concat(&self, other: &LcaObject) -> LcaObject {
        let mut s = self.summands.clone();
        s.extend(other.summands.iter().cloned());
        LcaObject { summands: s }
    }

    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a LcaObject>) -> LcaObject {
        LcaObject {
            summands: parts
                .into_iter()
                .flat_map(|p| p.summands.iter().cloned())
                .collect(),
        }
    }

    pub fn select(&self, positions: &[usize]) -> LcaObject {
        LcaObject {
            summands: positions.iter().map(|&i| self.summands[i].clone()).collect(),
        }
    }

    /// Drops `Zero` atoms.
    pub fn strip_zero_atoms(&self) -> LcaObject {
        LcaObject {
            summands: self
                .summands
                .iter()
                .filter(|a| **a != LcaAtom::Zero)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for LcaObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (i, a) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromIterator<LcaAtom> for LcaObject {
    fn from_iter<I: IntoIterator<Item = LcaAtom>>(iter: I) -> Self {
        LcaObject {
            summands: iter.into_iter().collect(),
        }
    }
}
