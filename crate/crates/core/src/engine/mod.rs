//! Plain and lifted bottom-up evaluation, and restriction of a lifted
//! database to a single configuration.

mod annotation;
mod db;
mod eval;
mod reference;

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::ast::{Fact, LiftedFact, Names, PredId, Rule};
use crate::frontend::{render_fact_rows, FeatureModel, Program};
use crate::pc::{Configuration, Pc, PcError, PcStore, TextPc, TextTable};

pub use annotation::{Annotation, BddAnnotation, Plain, TextAnnotation};
pub use db::{LiftedDb, Relation};
pub use reference::infer_reference;

/// Lifted database with canonical BDD conditions.
pub type LiftedEdb = LiftedDb<Pc>;

pub type FactSet = BTreeSet<Fact>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SatMode {
    /// Canonical BDD conditions; unsatisfiable candidates are discarded.
    #[default]
    Bdd,
    /// Textual conditions; no BDD operations and no filtering.
    NoSat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Naive,
    #[default]
    SemiNaive,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    pub sat_mode: SatMode,
    /// With a feature model, a candidate is kept only if its condition is
    /// satisfiable together with the model.
    pub fm: Option<FeatureModel>,
    /// Store `pc && fm` instead of `pc`.
    pub fm_store: bool,
    pub strategy: Strategy,
    /// Test hook: skip the disjunctive merge for facts already present.
    #[doc(hidden)]
    pub break_merge: bool,
}

impl EvalOptions {
    pub fn no_sat(mut self) -> Self {
        self.sat_mode = SatMode::NoSat;
        self
    }

    pub fn with_fm(mut self, fm: FeatureModel) -> Self {
        self.fm = Some(fm);
        self
    }

    pub fn naive(mut self) -> Self {
        self.strategy = Strategy::Naive;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub rounds: u64,
    /// Complete body matches, i.e. candidate facts produced.
    pub rule_applications: u64,
    /// Facts added that were not in the input.
    pub facts_inferred: u64,
    pub facts_final: u64,
    pub sat_checks: u64,
    pub sat_failures: u64,
    pub wall_time_us: u64,
    /// Size of the whole store serialised as fact files.
    pub db_bytes: u64,
}

impl LiftedDb<Pc> {
    /// Build a lifted database, disjoining the conditions of repeated facts.
    /// Facts whose condition is unsatisfiable are dropped; the count is returned.
    pub fn from_lifted_facts(
        facts: impl IntoIterator<Item = LiftedFact>,
        pcs: &mut PcStore,
    ) -> (Self, usize) {
        let mut db = LiftedDb::new();
        for f in facts {
            db.upsert(f.fact, f.pc, |a, b| pcs.or(*a, b));
        }
        let dead: Vec<Fact> = db
            .iter()
            .filter(|(_, p)| !pcs.is_sat(**p))
            .map(|(f, _)| f)
            .collect();
        for f in &dead {
            db.remove(f);
        }
        (db, dead.len())
    }
}

/// Result of a lifted run: BDD conditions, or textual ones in no-SAT mode.
#[derive(Clone, Debug)]
pub enum LiftedOutput {
    Bdd(LiftedEdb),
    Text {
        db: LiftedDb<TextPc>,
        table: TextTable,
    },
}

impl LiftedOutput {
    pub fn len(&self) -> usize {
        match self {
            LiftedOutput::Bdd(db) => db.len(),
            LiftedOutput::Text { db, .. } => db.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_bdd(&self) -> Option<&LiftedEdb> {
        match self {
            LiftedOutput::Bdd(db) => Some(db),
            LiftedOutput::Text { .. } => None,
        }
    }

    pub fn facts(&self) -> FactSet {
        match self {
            LiftedOutput::Bdd(db) => db.facts(),
            LiftedOutput::Text { db, .. } => db.facts(),
        }
    }

    pub fn relation_len(&self, pred: PredId) -> usize {
        match self {
            LiftedOutput::Bdd(db) => db.relation(pred).map_or(0, Relation::len),
            LiftedOutput::Text { db, .. } => db.relation(pred).map_or(0, Relation::len),
        }
    }

    pub fn restrict(&self, pcs: &PcStore, rho: &Configuration) -> Result<FactSet, PcError> {
        match self {
            LiftedOutput::Bdd(db) => restrict(db, pcs, rho),
            LiftedOutput::Text { db, table } => {
                restrict_with(db, |p| p.eval(table, rho, pcs.features()))
            }
        }
    }

    /// Condition text of a stored fact.
    pub fn pc_text(&self, fact: &Fact, pcs: &PcStore) -> Option<String> {
        match self {
            LiftedOutput::Bdd(db) => db.get(fact).map(|p| pcs.to_text(*p)),
            LiftedOutput::Text { db, table } => db.get(fact).map(|p| p.render(table)),
        }
    }

    /// Re-express the conditions as BDDs, keeping unsatisfiable ones.
    pub fn to_bdd(&self, pcs: &mut PcStore) -> LiftedEdb {
        match self {
            LiftedOutput::Bdd(db) => db.clone(),
            LiftedOutput::Text { db, table } => db.map(|p| {
                let mut acc = Pc::FALSE;
                for term in p.terms() {
                    let mut t = Pc::TRUE;
                    for &id in term.iter() {
                        let f = table.formula(id);
                        let b = pcs.build(f);
                        t = pcs.and(t, b);
                    }
                    acc = pcs.or(acc, t);
                }
                acc
            }),
        }
    }

    /// Fact-file text for one predicate.
    pub fn fact_file_text(&self, pred: PredId, prog: &Program, pcs: &PcStore) -> String {
        fn rows<'p, P>(
            db: &LiftedDb<P>,
            pred: PredId,
            prog: &'p Program,
            mut text: impl FnMut(&P) -> String,
        ) -> Vec<(Vec<&'p str>, Option<String>)> {
            db.relation(pred).map_or_else(Vec::new, |rel| {
                rel.rows()
                    .map(|(t, p)| {
                        let cols = t.iter().map(|&s| prog.symbol(s)).collect();
                        (cols, Some(text(p)))
                    })
                    .collect()
            })
        }
        let rows = match self {
            LiftedOutput::Bdd(db) => rows(db, pred, prog, |p| pcs.to_text(*p)),
            LiftedOutput::Text { db, table } => rows(db, pred, prog, |p| p.render(table)),
        };
        render_fact_rows(rows)
    }

    /// Bytes of the whole store written as fact files.
    pub fn db_bytes(&self, prog: &Program, pcs: &PcStore) -> u64 {
        prog.predicates()
            .map(|(p, _)| self.fact_file_text(p, prog, pcs).len() as u64)
            .sum()
    }
}

/// Facts whose condition holds under `rho`.
pub fn restrict(edb: &LiftedEdb, pcs: &PcStore, rho: &Configuration) -> Result<FactSet, PcError> {
    restrict_with(edb, |p| pcs.eval(*p, rho))
}

pub fn restrict_with<P>(
    db: &LiftedDb<P>,
    mut holds: impl FnMut(&P) -> Result<bool, PcError>,
) -> Result<FactSet, PcError> {
    let mut out = FactSet::new();
    for (f, p) in db.iter() {
        if holds(p)? {
            out.insert(f);
        }
    }
    Ok(out)
}

/// Plain forward chaining: the least fixpoint of `rules` over `edb`.
pub fn infer(rules: &[Rule], edb: impl IntoIterator<Item = Fact>) -> FactSet {
    infer_db(rules, edb).facts()
}

/// Like [`infer`], returning the fact store.
pub fn infer_db(rules: &[Rule], edb: impl IntoIterator<Item = Fact>) -> LiftedDb<()> {
    infer_with_stats(rules, edb, Strategy::SemiNaive).0
}

pub fn infer_with_stats(
    rules: &[Rule],
    edb: impl IntoIterator<Item = Fact>,
    strategy: Strategy,
) -> (LiftedDb<()>, EvalStats) {
    let start = Instant::now();
    let mut db = LiftedDb::new();
    for f in edb {
        db.upsert(f, (), |_, _| ());
    }
    let c = eval::fixpoint(rules, &mut db, &mut Plain, strategy, false);
    let stats = EvalStats {
        rounds: c.rounds,
        rule_applications: c.rule_applications,
        facts_inferred: c.inserted,
        facts_final: db.len() as u64,
        wall_time_us: start.elapsed().as_micros() as u64,
        ..Default::default()
    };
    (db, stats)
}

/// Lifted forward chaining. Every derivation carries the conjunction of its
/// premises' conditions; a candidate is discarded when unsatisfiable (with
/// the feature model, if any), inserted when the fact is new, and otherwise
/// disjoined into the stored condition. Evaluation ends when a round neither
/// inserts a fact nor changes a stored condition.
///
/// `stats.db_bytes` is left at zero; see [`LiftedOutput::db_bytes`].
pub fn lifted_infer(
    rules: &[Rule],
    edb: &LiftedEdb,
    opts: &EvalOptions,
    pcs: &mut PcStore,
) -> (LiftedOutput, EvalStats) {
    let start = Instant::now();
    let mut stats = EvalStats::default();
    let output = match opts.sat_mode {
        SatMode::Bdd => {
            let fm = opts.fm.map(|f| f.formula).filter(|&f| f != Pc::TRUE);
            let mut ann = BddAnnotation::new(pcs, fm, opts.fm_store);
            let mut db = LiftedDb::new();
            let inputs = edb.iter().map(|(f, &p)| (f.pred, f.args, p)).collect();
            eval::apply(&mut db, &mut ann, inputs, false, &mut Default::default());
            let c = eval::fixpoint(rules, &mut db, &mut ann, opts.strategy, opts.break_merge);
            stats.rounds = c.rounds;
            stats.rule_applications = c.rule_applications;
            stats.facts_inferred = c.inserted;
            stats.sat_checks = ann.sat_checks;
            stats.sat_failures = ann.sat_failures;
            LiftedOutput::Bdd(db)
        }
        SatMode::NoSat => {
            let mut table = TextTable::new();
            let mut atom = |p: Pc, pcs: &mut PcStore| {
                let text = pcs.to_text(p);
                let formula = pcs
                    .parse_formula(&text)
                    .expect("canonical condition text parses");
                table.atom(&text, formula)
            };
            let mut db = LiftedDb::new();
            for (f, &p) in edb.iter() {
                let pc = atom(p, pcs);
                db.upsert(f, pc, |_, n| n);
            }
            let fm = match opts.fm {
                Some(fm) if opts.fm_store && fm.formula != Pc::TRUE => Some(atom(fm.formula, pcs)),
                _ => None,
            };
            if let Some(fm) = &fm {
                db = db.map(|p| p.and(fm));
            }
            let mut ann = TextAnnotation { fm };
            let c = eval::fixpoint(rules, &mut db, &mut ann, opts.strategy, opts.break_merge);
            stats.rounds = c.rounds;
            stats.rule_applications = c.rule_applications;
            stats.facts_inferred = c.inserted;
            LiftedOutput::Text { db, table }
        }
    };
    stats.facts_final = output.len() as u64;
    stats.wall_time_us = start.elapsed().as_micros() as u64;
    (output, stats)
}

/// True iff one more naive round over `result` inserts no fact and grows no
/// condition. Checks closure only, not minimality.
pub fn audit_fixpoint(
    rules: &[Rule],
    result: &LiftedEdb,
    opts: &EvalOptions,
    pcs: &mut PcStore,
) -> bool {
    let fm = opts.fm.map(|f| f.formula).filter(|&f| f != Pc::TRUE);
    let mut ann = BddAnnotation::new(pcs, fm, opts.fm_store);
    eval::one_round_changes(rules, result, &mut ann) == 0
}
