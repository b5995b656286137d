//! The Nenashev relation calculus on double exact sequences: the zero rule,
//! the 3×3 rule, rules derived from them, and replayable proof scripts.
//!
//! A relation is a formal integer combination of generators `[d]` that is
//! zero in `K_1`. Generators are identified by their objects and normalized
//! maps, never by isomorphism.

mod builder;
mod rules;
mod scripts;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::lca::{equal_morphisms, Iso, LcaError, LcaMorphism, LcaObject};
use crate::sequences::{DoubleExact, SeqError, ShortExact};

pub use builder::ScriptBuilder;
pub use rules::{
    auto_decomposition, double_iso_diagram, left_right_swap_sides, swap_diagram, swap_sequence,
    swap_iso, iso_column,
};
pub use scripts::{
    builtin_relation_a_script, builtin_relation_b_script, builtin_sv1_script, discharge_swap_column,
    split_33,
};
pub(crate) use scripts::{role_swaps as theta_role_swaps, swap_rows as swap_rows_33};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NenError {
    #[error("Yin and Yang differ, the zero rule does not apply")]
    YinYangDiffer,
    #[error("row {row} is not double exact: {reason}")]
    RowNotExact { row: usize, reason: String },
    #[error("column {col} is not double exact: {reason}")]
    ColNotExact { col: usize, reason: String },
    #[error("object at row {row}, column {col} differs between its row and its column")]
    GridMismatch { row: usize, col: usize },
    #[error("Yin diagram does not commute: {0}")]
    YinDiagramNotCommuting(String),
    #[error("Yang diagram does not commute: {0}")]
    YangDiagramNotCommuting(String),
    #[error("not an isomorphism: {0}")]
    NotIso(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("missing decomposition: {0}")]
    MissingDecomposition(String),
    #[error("invalid decomposition: {0}")]
    DecompositionInvalid(String),
    #[error("modules do not compose: {0}")]
    MiddleMismatch(String),
    #[error("step {index} is invalid: {reason}")]
    StepInvalid { index: usize, reason: String },
    #[error("script does not prove what it claims: {0}")]
    UnexpectedConclusion(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Lca(#[from] LcaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl NenError {
    /// Variant name, for messages that name the failing check.
    pub fn kind(&self) -> &'static str {
        match self {
            NenError::YinYangDiffer => "YinYangDiffer",
            NenError::RowNotExact { .. } => "RowNotExact",
            NenError::ColNotExact { .. } => "ColNotExact",
            NenError::GridMismatch { .. } => "GridMismatch",
            NenError::YinDiagramNotCommuting(_) => "YinDiagramNotCommuting",
            NenError::YangDiagramNotCommuting(_) => "YangDiagramNotCommuting",
            NenError::NotIso(_) => "NotIso",
            NenError::NotAutomorphism(_) => "NotAutomorphism",
            NenError::MissingDecomposition(_) => "MissingDecomposition",
            NenError::DecompositionInvalid(_) => "DecompositionInvalid",
            NenError::MiddleMismatch(_) => "MiddleMismatch",
            NenError::StepInvalid { .. } => "StepInvalid",
            NenError::UnexpectedConclusion(_) => "UnexpectedConclusion",
            NenError::Seq(_) => "Seq",
            NenError::Lca(_) => "Lca",
            NenError::Algebra(_) => "Algebra",
        }
    }
}

/// A formal combination `Σ c_g [g]` asserted to vanish, keyed by generator
/// identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation(pub BTreeMap<String, i64>);

impl Relation {
    pub fn single(d: &DoubleExact, coef: i64) -> Relation {
        let mut r = Relation::default();
        r.add_term(d.key(), coef);
        r
    }

    pub fn add_term(&mut self, key: String, coef: i64) {
        let c = self.0.entry(key.clone()).or_insert(0);
        *c += coef;
        if *c == 0 {
            self.0.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &Relation, k: i64) {
        for (g, c) in &other.0 {
            self.add_term(g.clone(), k * c);
        }
    }

    pub fn coefficient(&self, key: &str) -> i64 {
        self.0.get(key).copied().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }
}

/// A 3×3 diagram of double exact sequences. `rows[i]` runs left to right,
/// `cols[j]` top to bottom; object `(i, j)` is shared by both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nen33 {
    pub rows: [DoubleExact; 3],
    pub cols: [DoubleExact; 3],
}

fn objects(d: &DoubleExact) -> [&LcaObject; 3] {
    [d.left(), d.mid(), d.right()]
}

fn horizontal(s: &ShortExact, j: usize) -> &LcaMorphism {
    if j == 0 {
        s.inc()
    } else {
        s.sur()
    }
}

const SQUARE_NAMES: [[&str; 2]; 2] = [["top-left", "top-right"], ["bottom-left", "bottom-right"]];

impl Nen33 {
    pub fn new(rows: [DoubleExact; 3], cols: [DoubleExact; 3]) -> Nen33 {
        Nen33 { rows, cols }
    }

    /// `Row₁ − Row₂ + Row₃ − Col₁ + Col₂ − Col₃`.
    pub fn relation(&self) -> Relation {
        let mut r = Relation::default();
        for (k, sign) in [1, -1, 1].into_iter().enumerate() {
            r.add_term(self.rows[k].key(), sign);
            r.add_term(self.cols[k].key(), -sign);
        }
        r
    }
}

/// Validates a 3×3 diagram: six double exact sequences, a consistent grid of
/// objects, and four commuting squares on each of the Yin and Yang sides.
pub fn check_33_relation(n: &Nen33) -> Result<Relation, NenError> {
    for (i, r) in n.rows.iter().enumerate() {
        r.validate().map_err(|e| NenError::RowNotExact {
            row: i,
            reason: e.to_string(),
        })?;
    }
    for (j, c) in n.cols.iter().enumerate() {
        c.validate().map_err(|e| NenError::ColNotExact {
            col: j,
            reason: e.to_string(),
        })?;
    }
    for i in 0..3 {
        for j in 0..3 {
            if objects(&n.rows[i])[j] != objects(&n.cols[j])[i] {
                return Err(NenError::GridMismatch { row: i, col: j });
            }
        }
    }
    for yang in [false, true] {
        let side = |d: &DoubleExact| if yang { d.yang().clone() } else { d.yin().clone() };
        let rows: Vec<ShortExact> = n.rows.iter().map(side).collect();
        let cols: Vec<ShortExact> = n.cols.iter().map(side).collect();
        for i in 0..2 {
            for j in 0..2 {
                // v(i, j+1) ∘ h(i, j) = h(i+1, j) ∘ v(i, j)
                let lhs = horizontal(&cols[j + 1], i).compose(horizontal(&rows[i], j))?;
                let rhs = horizontal(&rows[i + 1], j).compose(horizontal(&cols[j], i))?;
                if !equal_morphisms(&lhs, &rhs)?.equal {
                    let name = format!("{} square (rows {}-{}, columns {}-{})", SQUARE_NAMES[i][j], i, i + 1, j, j + 1);
                    return Err(if yang {
                        NenError::YangDiagramNotCommuting(name)
                    } else {
                        NenError::YinDiagramNotCommuting(name)
                    });
                }
            }
        }
    }
    Ok(n.relation())
}

/// Justification attached to an admitted rule instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmittedRule {
    pub rule: String,
    pub object: String,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Step {
    ZeroRule {
        des: DoubleExact,
    },
    ThreeByThree {
        diagram: Box<Nen33>,
    },
    /// A morphism of double exact sequences by isomorphisms, commuting on
    /// both sides: `[d1] = [d2]`.
    DoubleIso {
        d1: DoubleExact,
        d2: DoubleExact,
        x_left: Iso,
        x_mid: Iso,
        x_right: Iso,
    },
    /// `[X -(1, φ)-> X -> 0] = [0 -> X -(φ, 1)-> X]`.
    LeftRightSwap { x: LcaObject, phi: Iso },
    /// `[s_X] = 0` for the swap on `X ⊕ X`.
    SwapVanish {
        x: LcaObject,
        signed: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decomposition: Option<ShortExact>,
    },
    LinearCombine { terms: Vec<(usize, i64)> },
}

/// The outcome of validating one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub relation: Relation,
    pub generators: Vec<DoubleExact>,
    pub admitted: Vec<AdmittedRule>,
}

impl StepResult {
    fn of(relation: Relation, generators: Vec<DoubleExact>) -> StepResult {
        StepResult {
            relation,
            generators,
            admitted: Vec::new(),
        }
    }
}

pub fn zero_rule_relation(d: &DoubleExact) -> Result<Relation, NenError> {
    d.validate()?;
    if !d.yin_equals_yang()? {
        return Err(NenError::YinYangDiffer);
    }
    Ok(Relation::single(d, 1))
}

/// Validates one step against the results of the steps before it.
pub fn run_step(step: &Step, previous: &[StepResult]) -> Result<StepResult, NenError> {
    match step {
        Step::ZeroRule { des } => Ok(StepResult::of(zero_rule_relation(des)?, vec![des.clone()])),
        Step::ThreeByThree { diagram } => {
            let rel = check_33_relation(diagram)?;
            let gens = diagram.rows.iter().chain(diagram.cols.iter()).cloned().collect();
            Ok(StepResult::of(rel, gens))
        }
        Step::DoubleIso {
            d1,
            d2,
            x_left,
            x_mid,
            x_right,
        } => {
            let diagram = double_iso_diagram(d1, d2, x_left, x_mid, x_right)?;
            let mut rel = check_33_relation(&diagram)?;
            // The third row and all columns have Yin = Yang.
            rel.add_scaled(&zero_rule_relation(&diagram.rows[2])?, -1);
            for (k, sign) in [1, -1, 1].into_iter().enumerate() {
                rel.add_scaled(&zero_rule_relation(&diagram.cols[k])?, sign);
            }
            Ok(StepResult::of(rel, vec![d1.clone(), d2.clone()]))
        }
        Step::LeftRightSwap { x, phi } => rules::left_right_swap_step(x, phi),
        Step::SwapVanish {
            x,
            signed,
            decomposition,
        } => rules::swap_vanish_step(x, *signed, decomposition.as_ref()),
        Step::LinearCombine { terms } => {
            let mut rel = Relation::default();
            for &(idx, k) in terms {
                let prev = previous.get(idx).ok_or_else(|| {
                    NenError::MiddleMismatch(format!("step {idx} is not an earlier step"))
                })?;
                rel.add_scaled(&prev.relation, k);
            }
            Ok(StepResult::of(rel, Vec::new()))
        }
    }
}

/// A replayable sequence of steps; the conclusion is the relation of the
/// last step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofScript {
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub objects: [String; 3],
    pub des: DoubleExact,
}

/// The verified identity `Σ coefficient · [generator] = 0`, with the
/// admitted rule instances it relies on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub generators: Vec<GeneratorEntry>,
    /// Generator id to coefficient.
    pub identity: BTreeMap<String, i64>,
    pub admitted_rules: Vec<AdmittedRule>,
    pub steps_checked: usize,
}

impl Derivation {
    /// Coefficient of `[d]` in the identity.
    pub fn coefficient_of(&self, d: &DoubleExact) -> i64 {
        let key = d.key();
        self.generators
            .iter()
            .find(|g| g.des.key() == key)
            .and_then(|g| self.identity.get(&g.id))
            .copied()
            .unwrap_or(0)
    }

    pub fn relation(&self) -> Relation {
        let mut r = Relation::default();
        for g in &self.generators {
            r.add_term(g.des.key(), self.identity.get(&g.id).copied().unwrap_or(0));
        }
        r
    }
}

pub(crate) struct GeneratorStore {
    by_key: BTreeMap<String, (usize, DoubleExact)>,
}

impl GeneratorStore {
    pub(crate) fn new() -> GeneratorStore {
        GeneratorStore {
            by_key: BTreeMap::new(),
        }
    }

    pub(crate) fn insert(&mut self, d: &DoubleExact) {
        let next = self.by_key.len();
        let key = d.key();
        match self.by_key.get_mut(&key) {
            Some((_, existing)) => {
                if existing.label().is_none() && d.label().is_some() {
                    *existing = d.clone();
                }
            }
            None => {
                self.by_key.insert(key, (next, d.clone()));
            }
        }
    }

    pub(crate) fn get(&self, key: &str) -> Option<&DoubleExact> {
        self.by_key.get(key).map(|(_, d)| d)
    }

    fn derivation(&self, rel: &Relation, admitted: Vec<AdmittedRule>, steps: usize) -> Derivation {
        let mut used: Vec<(usize, &String, &DoubleExact)> = rel
            .0
            .keys()
            .map(|k| {
                let (i, d) = self.by_key.get(k).expect("generator was recorded");
                (*i, k, d)
            })
            .collect();
        used.sort_by_key(|(i, _, _)| *i);
        let mut generators = Vec::new();
        let mut identity = BTreeMap::new();
        for (n, (_, key, d)) in used.into_iter().enumerate() {
            let id = format!("g{n}");
            identity.insert(id.clone(), rel.0[key]);
            generators.push(GeneratorEntry {
                id,
                label: d.label().map(str::to_string),
                objects: [d.left().to_string(), d.mid().to_string(), d.right().to_string()],
                des: d.clone(),
            });
        }
        let mut admitted = admitted;
        admitted.sort();
        admitted.dedup();
        Derivation {
            generators,
            identity,
            admitted_rules: admitted,
            steps_checked: steps,
        }
    }
}

/// Re-validates every step and returns the identity proved by the last one.
pub fn replay(script: &ProofScript) -> Result<Derivation, NenError> {
    let mut results: Vec<StepResult> = Vec::new();
    let mut store = GeneratorStore::new();
    let mut admitted = Vec::new();
    for (index, step) in script.steps.iter().enumerate() {
        let r = run_step(step, &results).map_err(|e| NenError::StepInvalid {
            index,
            reason: e.to_string(),
        })?;
        log::debug!("step {index}: {} generators in relation", r.relation.0.len());
        for g in &r.generators {
            store.insert(g);
        }
        admitted.extend(r.admitted.iter().cloned());
        results.push(r);
    }
    let last = results.last().map(|r| r.relation.clone()).unwrap_or_default();
    Ok(store.derivation(&last, admitted, script.steps.len()))
}

pub fn check_zero_rule(d: &DoubleExact) -> Result<Derivation, NenError> {
    replay_single(Step::ZeroRule { des: d.clone() })
}

pub fn check_33(n: &Nen33) -> Result<Derivation, NenError> {
    replay_single(Step::ThreeByThree {
        diagram: Box::new(n.clone()),
    })
}

pub fn double_iso_rule(
    d1: &DoubleExact,
    d2: &DoubleExact,
    x_left: &Iso,
    x_mid: &Iso,
    x_right: &Iso,
) -> Result<Derivation, NenError> {
    replay_single(Step::DoubleIso {
        d1: d1.clone(),
        d2: d2.clone(),
        x_left: x_left.clone(),
        x_mid: x_mid.clone(),
        x_right: x_right.clone(),
    })
}

pub fn left_right_swap(x: &LcaObject, phi: &Iso) -> Result<Derivation, NenError> {
    replay_single(Step::LeftRightSwap {
        x: x.clone(),
        phi: phi.clone(),
    })
}

pub fn swap_vanish(
    x: &LcaObject,
    signed: bool,
    decomposition: Option<&ShortExact>,
) -> Result<Derivation, NenError> {
    replay_single(Step::SwapVanish {
        x: x.clone(),
        signed,
        decomposition: decomposition.cloned(),
    })
}

/// Runs one step on its own; errors are the rule's own, not `StepInvalid`.
fn replay_single(step: Step) -> Result<Derivation, NenError> {
    let r = run_step(&step, &[])?;
    let mut store = GeneratorStore::new();
    for g in &r.generators {
        store.insert(g);
    }
    Ok(store.derivation(&r.relation, r.admitted, 1))
}
