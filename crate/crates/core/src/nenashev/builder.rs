use super::{
    rules, run_step, AdmittedRule, GeneratorStore, NenError, Nen33, ProofScript, Relation, Step,
    StepResult,
};
use crate::lca::{Iso, LcaObject};
use crate::sequences::{DoubleExact, ShortExact};

/// Accumulates a proof script, validating each step as it is added so the
/// relations are available for planning the next ones.
pub struct ScriptBuilder {
    steps: Vec<Step>,
    results: Vec<StepResult>,
    store: GeneratorStore,
}

impl Default for ScriptBuilder {
    fn default() -> Self {
        ScriptBuilder::new()
    }
}

impl ScriptBuilder {
    pub fn new() -> ScriptBuilder {
        ScriptBuilder {
            steps: Vec::new(),
            results: Vec::new(),
            store: GeneratorStore::new(),
        }
    }

    pub fn push(&mut self, step: Step) -> Result<usize, NenError> {
        let index = self.steps.len();
        let r = run_step(&step, &self.results).map_err(|e| NenError::StepInvalid {
            index,
            reason: e.to_string(),
        })?;
        for g in &r.generators {
            self.store.insert(g);
        }
        self.steps.push(step);
        self.results.push(r);
        Ok(index)
    }

    pub fn relation(&self, idx: usize) -> &Relation {
        &self.results[idx].relation
    }

    pub fn admitted(&self) -> Vec<AdmittedRule> {
        let mut all: Vec<AdmittedRule> = self.results.iter().flat_map(|r| r.admitted.clone()).collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn zero(&mut self, des: &DoubleExact) -> Result<usize, NenError> {
        self.push(Step::ZeroRule { des: des.clone() })
    }

    pub fn three_by_three(&mut self, diagram: Nen33) -> Result<usize, NenError> {
        self.push(Step::ThreeByThree {
            diagram: Box::new(diagram),
        })
    }

    pub fn double_iso(
        &mut self,
        d1: &DoubleExact,
        d2: &DoubleExact,
        x_left: &Iso,
        x_mid: &Iso,
        x_right: &Iso,
    ) -> Result<usize, NenError> {
        self.push(Step::DoubleIso {
            d1: d1.clone(),
            d2: d2.clone(),
            x_left: x_left.clone(),
            x_mid: x_mid.clone(),
            x_right: x_right.clone(),
        })
    }

    pub fn left_right_swap(&mut self, x: &LcaObject, phi: &Iso) -> Result<usize, NenError> {
        self.push(Step::LeftRightSwap {
            x: x.clone(),
            phi: phi.clone(),
        })
    }

    /// `[s_X] = 0`, decomposing `X` by atom class when needed.
    pub fn swap_vanish(&mut self, x: &LcaObject, signed: bool) -> Result<usize, NenError> {
        let decomposition: Option<ShortExact> = rules::auto_decomposition(x)?;
        self.push(Step::SwapVanish {
            x: x.clone(),
            signed,
            decomposition,
        })
    }

    pub fn combine(&mut self, terms: &[(usize, i64)]) -> Result<usize, NenError> {
        self.push(Step::LinearCombine {
            terms: terms.to_vec(),
        })
    }

    /// Cancels from relation `idx` every generator outside `keep` that is
    /// the subject of a one-term lemma with coefficient ±1 or that satisfies
    /// the zero rule.
    pub fn eliminate(
        &mut self,
        idx: usize,
        lemmas: &[usize],
        keep: &[&DoubleExact],
    ) -> Result<usize, NenError> {
        let kept: Vec<String> = keep.iter().map(|d| d.key()).collect();
        let mut terms = vec![(idx, 1)];
        let rel = self.relation(idx).clone();
        for (key, &coef) in &rel.0 {
            if kept.contains(key) {
                continue;
            }
            let lemma = lemmas.iter().find_map(|&l| {
                let r = self.relation(l);
                match r.0.iter().next() {
                    Some((k, &c)) if r.0.len() == 1 && k == key && c.abs() == 1 => Some((l, c)),
                    _ => None,
                }
            });
            if let Some((l, c)) = lemma {
                terms.push((l, -coef * c));
                continue;
            }
            let des = self.store.get(key).expect("generator was recorded").clone();
            if des.yin_equals_yang()? {
                let z = self.zero(&des)?;
                terms.push((z, -coef));
            }
        }
        if terms.len() == 1 {
            return Ok(idx);
        }
        self.combine(&terms)
    }

    /// Fails unless relation `idx` is exactly `expected`.
    pub fn expect(&self, idx: usize, expected: &Relation) -> Result<(), NenError> {
        let got = self.relation(idx);
        if got != expected {
            let describe = |r: &Relation| -> String {
                r.0.iter()
                    .map(|(k, c)| {
                        let d = self.store.get(k);
                        let name = d
                            .map(|d| d.label().map(str::to_string).unwrap_or_else(|| format!("[{} -> {} -> {}]", d.left(), d.mid(), d.right())))
                            .unwrap_or_else(|| "?".into());
                        format!("{c:+} {name}")
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            return Err(NenError::UnexpectedConclusion(format!(
                "expected {}, got {}",
                describe(expected),
                describe(got)
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn finish(self) -> ProofScript {
        ProofScript { steps: self.steps }
    }
}
