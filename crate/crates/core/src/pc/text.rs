//! Textual presence conditions for the no-SAT evaluation mode.
//!
//! No BDD operation is performed here. A condition is kept as a disjunction
//! of conjunctions of interned source texts. Conjunction concatenates terms,
//! disjunction collects them, and the only normalisation is structural:
//! duplicate texts inside a term and terms that contain another term are
//! dropped. Unsatisfiable conditions are never detected.

use rustc_hash::FxHashMap;

use super::{Configuration, FeatureRegistry, Formula, PcError};

/// Interned source texts with their parsed formulas.
#[derive(Clone, Debug, Default)]
pub struct TextTable {
    texts: Vec<String>,
    formulas: Vec<Formula>,
    index: FxHashMap<String, u32>,
}

impl TextTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern `text` as an atomic condition. `True` maps to the empty
    /// conjunction instead of a text.
    pub fn atom(&mut self, text: &str, formula: Formula) -> TextPc {
        if text == "True" {
            return TextPc::one();
        }
        let id = match self.index.get(text) {
            Some(&id) => id,
            None => {
                let id = self.texts.len() as u32;
                self.texts.push(text.to_owned());
                self.formulas.push(formula);
                self.index.insert(text.to_owned(), id);
                id
            }
        };
        TextPc {
            terms: vec![vec![id].into_boxed_slice()],
        }
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn text(&self, id: u32) -> &str {
        &self.texts[id as usize]
    }

    pub fn formula(&self, id: u32) -> &Formula {
        &self.formulas[id as usize]
    }
}

/// Disjunction of conjunctions of [`TextTable`] entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TextPc {
    terms: Vec<Box<[u32]>>,
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

impl TextPc {
    pub fn one() -> Self {
        TextPc {
            terms: vec![Box::default()],
        }
    }

    pub fn terms(&self) -> &[Box<[u32]>] {
        &self.terms
    }

    fn normalize(mut terms: Vec<Box<[u32]>>) -> Vec<Box<[u32]>> {
        terms.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        terms.dedup();
        let mut kept: Vec<Box<[u32]>> = Vec::with_capacity(terms.len());
        for t in terms {
            if !kept.iter().any(|k| is_subset(k, &t)) {
                kept.push(t);
            }
        }
        kept.sort();
        kept
    }

    pub fn and(&self, other: &TextPc) -> TextPc {
        if self.terms.len() == 1 && self.terms[0].is_empty() {
            return other.clone();
        }
        if other.terms.len() == 1 && other.terms[0].is_empty() {
            return self.clone();
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut t: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
                t.sort_unstable();
                t.dedup();
                terms.push(t.into_boxed_slice());
            }
        }
        TextPc {
            terms: Self::normalize(terms),
        }
    }

    /// Disjoin `cand` into `self`. Returns `None` when every term of `cand`
    /// is already covered by a term of `self`.
    pub fn merge(&self, cand: &TextPc) -> Option<TextPc> {
        let fresh: Vec<_> = cand
            .terms
            .iter()
            .filter(|c| !self.terms.iter().any(|s| is_subset(s, c)))
            .cloned()
            .collect();
        if fresh.is_empty() {
            return None;
        }
        let mut terms = self.terms.clone();
        terms.extend(fresh);
        Some(TextPc {
            terms: Self::normalize(terms),
        })
    }

    pub fn eval(
        &self,
        table: &TextTable,
        cfg: &Configuration,
        features: &FeatureRegistry,
    ) -> Result<bool, PcError> {
        for term in &self.terms {
            let mut all = true;
            for &id in term.iter() {
                if !table.formulas[id as usize].eval(cfg, features)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn render(&self, table: &TextTable) -> String {
        if self.terms.is_empty() {
            return "False".into();
        }
        let mut rendered: Vec<String> = self
            .terms
            .iter()
            .map(|term| {
                if term.is_empty() {
                    return "True".to_owned();
                }
                let parts: Vec<String> = term
                    .iter()
                    .map(|&id| {
                        let t = table.text(id);
                        if t.contains("||") {
                            format!("({t})")
                        } else {
                            t.to_owned()
                        }
                    })
                    .collect();
                parts.join(" && ")
            })
            .collect();
        rendered.sort();
        rendered.join(" || ")
    }
}
