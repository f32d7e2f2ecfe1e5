//! Bottom-up fixpoint over compiled rules, generic in the fact annotation.
//!
//! Each rule is compiled into join plans: one plan reading every body atom
//! from the full store (used by naive rounds and the first semi-naive
//! round), and one plan per body position reading that atom from the
//! previous round's delta first and the remaining atoms, left to right,
//! from the full store. Annotations are opaque to the join; they are only
//! combined when a complete body match yields a candidate.

use rustc_hash::{FxHashMap, FxHashSet};

use super::annotation::Annotation;
use super::db::LiftedDb;
use super::Strategy;
use crate::ast::{PredId, Rule, Sym, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Const(Sym),
    Var(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Full,
    Delta,
}

#[derive(Clone, Debug)]
struct Step {
    pred: PredId,
    source: Source,
    /// Index used for `Full` steps with bound columns.
    index: Option<usize>,
    /// Bound columns, in index order, and the value each must equal.
    key: Vec<(usize, Slot)>,
    /// Columns binding a fresh variable.
    binds: Vec<(usize, usize)>,
    /// Columns repeating a variable bound earlier in the same atom.
    checks: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
struct Plan {
    steps: Vec<Step>,
}

#[derive(Clone, Debug)]
struct CompiledRule {
    head_pred: PredId,
    head: Vec<Slot>,
    nvars: usize,
    full: Plan,
    delta: Vec<Plan>,
}

fn slot<'r>(t: &'r Term, vars: &mut FxHashMap<&'r str, usize>) -> Slot {
    match t {
        Term::Const(c) => Slot::Const(*c),
        Term::Var(v) => {
            let n = vars.len();
            Slot::Var(*vars.entry(v.as_ref()).or_insert(n))
        }
    }
}

fn compile<P>(rule: &Rule, db: &mut LiftedDb<P>) -> CompiledRule {
    let mut vars: FxHashMap<&str, usize> = FxHashMap::default();
    let body: Vec<(PredId, Vec<Slot>)> = rule
        .body()
        .iter()
        .map(|a| (a.pred, a.args.iter().map(|t| slot(t, &mut vars)).collect()))
        .collect();
    let head: Vec<Slot> = rule.head().args.iter().map(|t| slot(t, &mut vars)).collect();
    let nvars = vars.len();

    let plan_for = |order: &[usize], delta_first: bool, db: &mut LiftedDb<P>| -> Plan {
        let mut bound = vec![false; nvars];
        let mut steps = Vec::with_capacity(order.len());
        for (pos, &ai) in order.iter().enumerate() {
            let (pred, args) = &body[ai];
            let mut key = Vec::new();
            let mut binds = Vec::new();
            let mut checks = Vec::new();
            let mut local = vec![false; nvars];
            for (col, s) in args.iter().enumerate() {
                match *s {
                    Slot::Const(_) => key.push((col, *s)),
                    Slot::Var(v) if bound[v] => key.push((col, *s)),
                    Slot::Var(v) if local[v] => checks.push((col, v)),
                    Slot::Var(v) => {
                        local[v] = true;
                        binds.push((col, v));
                    }
                }
            }
            for (v, l) in local.iter().enumerate() {
                if *l {
                    bound[v] = true;
                }
            }
            let source = if delta_first && pos == 0 {
                Source::Delta
            } else {
                Source::Full
            };
            let index = (source == Source::Full && !key.is_empty()).then(|| {
                let cols: Vec<usize> = key.iter().map(|&(c, _)| c).collect();
                db.relation_mut(*pred).ensure_index(&cols)
            });
            steps.push(Step {
                pred: *pred,
                source,
                index,
                key,
                binds,
                checks,
            });
        }
        Plan { steps }
    };

    let natural: Vec<usize> = (0..body.len()).collect();
    let full = plan_for(&natural, false, db);
    let delta = (0..body.len())
        .map(|i| {
            let mut order = vec![i];
            order.extend((0..body.len()).filter(|&j| j != i));
            plan_for(&order, true, db)
        })
        .collect();
    CompiledRule {
        head_pred: rule.head().pred,
        head,
        nvars,
        full,
        delta,
    }
}

pub(crate) type Candidate<P> = (PredId, Box<[Sym]>, P);

struct Matcher<'a, P, A> {
    db: &'a LiftedDb<P>,
    delta: &'a [Vec<u32>],
    ann: &'a mut A,
    bindings: Vec<Sym>,
    key: Vec<Sym>,
    out: Vec<Candidate<P>>,
}

impl<P: Clone, A: Annotation<Pc = P>> Matcher<'_, P, A> {
    fn run(&mut self, rule: &CompiledRule, plan: &Plan) {
        self.bindings.clear();
        self.bindings.resize(rule.nvars, Sym(u32::MAX));
        self.step(rule, plan, 0, None);
    }

    fn value(&self, s: Slot) -> Sym {
        match s {
            Slot::Const(c) => c,
            Slot::Var(v) => self.bindings[v],
        }
    }

    fn step(&mut self, rule: &CompiledRule, plan: &Plan, depth: usize, acc: Option<&P>) {
        if depth == plan.steps.len() {
            let tuple: Box<[Sym]> = rule.head.iter().map(|&s| self.value(s)).collect();
            let pc = acc.expect("rule bodies are non-empty").clone();
            self.out.push((rule.head_pred, tuple, pc));
            return;
        }
        let step = &plan.steps[depth];
        let db = self.db;
        let Some(rel) = db.relation(step.pred) else {
            return;
        };
        let rows: &[u32] = match (step.source, step.index) {
            (Source::Delta, _) => match self.delta.get(step.pred.index()) {
                Some(d) => d,
                None => return,
            },
            (Source::Full, Some(ix)) => {
                self.key.clear();
                for &(_, s) in &step.key {
                    let v = self.value(s);
                    self.key.push(v);
                }
                rel.probe(ix, &self.key)
            }
            (Source::Full, None) => &[],
        };
        let scan_all = step.source == Source::Full && step.index.is_none();
        let count = if scan_all { rel.row_count() as usize } else { rows.len() };
        let filter_key = step.source == Source::Delta || step.index.is_none();
        // Either every row id in order, or the ids the index returned.
        #[allow(clippy::needless_range_loop)]
        'rows: for i in 0..count {
            let id = if scan_all { i as u32 } else { rows[i] };
            let (tuple, pc) = rel.row(id);
            if filter_key {
                for &(col, s) in &step.key {
                    if tuple[col] != self.value(s) {
                        continue 'rows;
                    }
                }
            }
            for &(col, v) in &step.binds {
                self.bindings[v] = tuple[col];
            }
            for &(col, v) in &step.checks {
                if tuple[col] != self.bindings[v] {
                    continue 'rows;
                }
            }
            let next = match acc {
                None => pc.clone(),
                Some(a) => self.ann.and(a, pc),
            };
            self.step(rule, plan, depth + 1, Some(&next));
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Counters {
    pub rounds: u64,
    pub rule_applications: u64,
    pub inserted: u64,
    pub merged: u64,
}

/// Evaluate `rules` over `db` to a fixpoint.
pub(crate) fn fixpoint<A: Annotation>(
    rules: &[Rule],
    db: &mut LiftedDb<A::Pc>,
    ann: &mut A,
    strategy: Strategy,
    break_merge: bool,
) -> Counters {
    let compiled: Vec<CompiledRule> = rules.iter().map(|r| compile(r, db)).collect();
    let mut counters = Counters::default();
    let mut delta: Vec<Vec<u32>> = Vec::new();
    let mut first = true;
    loop {
        if !first && delta.iter().all(Vec::is_empty) {
            break;
        }
        counters.rounds += 1;
        let cands = {
            let mut m = Matcher {
                db,
                delta: &delta,
                ann: &mut *ann,
                bindings: Vec::new(),
                key: Vec::new(),
                out: Vec::new(),
            };
            for rule in &compiled {
                if first || strategy == Strategy::Naive {
                    m.run(rule, &rule.full);
                } else {
                    for plan in &rule.delta {
                        m.run(rule, plan);
                    }
                }
            }
            m.out
        };
        first = false;
        counters.rule_applications += cands.len() as u64;
        delta = apply(db, ann, cands, break_merge, &mut counters);
    }
    counters
}

/// Fold one round of candidates into `db` (the four cases), returning the
/// rows that were inserted or whose annotation grew.
pub(crate) fn apply<A: Annotation>(
    db: &mut LiftedDb<A::Pc>,
    ann: &mut A,
    cands: Vec<Candidate<A::Pc>>,
    break_merge: bool,
    counters: &mut Counters,
) -> Vec<Vec<u32>> {
    let mut delta: Vec<Vec<u32>> = Vec::new();
    let mut seen: FxHashSet<(PredId, u32)> = FxHashSet::default();
    for (pred, tuple, pc) in cands {
        let Some(pc) = ann.admit(pc) else {
            continue;
        };
        let rel = db.relation_mut(pred);
        let id = match rel.find(&tuple) {
            None => {
                counters.inserted += 1;
                rel.push(tuple, pc)
            }
            Some(_) if break_merge => continue,
            Some(id) => {
                let (_, stored) = rel.row(id);
                match ann.merge(stored, &pc) {
                    Some(grown) => {
                        counters.merged += 1;
                        rel.set_pc(id, grown);
                        id
                    }
                    None => continue,
                }
            }
        };
        if seen.insert((pred, id)) {
            if delta.len() <= pred.index() {
                delta.resize_with(pred.index() + 1, Vec::new);
            }
            delta[pred.index()].push(id);
        }
    }
    delta
}

/// One naive round over `db` without modifying it; counts how many
/// candidates would insert or grow a fact.
pub(crate) fn one_round_changes<A: Annotation>(
    rules: &[Rule],
    db: &LiftedDb<A::Pc>,
    ann: &mut A,
) -> u64 {
    let mut scratch = db.clone();
    let compiled: Vec<CompiledRule> = rules.iter().map(|r| compile(r, &mut scratch)).collect();
    let mut m = Matcher {
        db: &scratch,
        delta: &[],
        ann: &mut *ann,
        bindings: Vec::new(),
        key: Vec::new(),
        out: Vec::new(),
    };
    for rule in &compiled {
        m.run(rule, &rule.full);
    }
    let cands = m.out;
    let mut counters = Counters::default();
    let mut probe = db.clone();
    apply(&mut probe, ann, cands, false, &mut counters);
    counters.inserted + counters.merged
}
