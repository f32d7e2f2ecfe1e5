//! Forward chaining written directly in terms of substitution and one-way
//! matching. Slow; kept as an independent check on the compiled evaluator.

use std::collections::BTreeSet;

use crate::ast::{match_atom, substitute, Atom, Fact, Rule, Substitution};

fn matches(body: &[Atom], facts: &BTreeSet<Fact>, gamma: Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = body.split_first() else {
        out.push(gamma);
        return;
    };
    for f in facts.iter().filter(|f| f.pred == first.pred) {
        if let Some(g) = match_atom(first, f, &gamma) {
            matches(rest, facts, g, out);
        }
    }
}

/// Repeat modus ponens over every rule until no new fact appears.
pub fn infer_reference(rules: &[Rule], edb: impl IntoIterator<Item = Fact>) -> BTreeSet<Fact> {
    let mut facts: BTreeSet<Fact> = edb.into_iter().collect();
    loop {
        let mut fresh = Vec::new();
        for rule in rules {
            let mut gammas = Vec::new();
            matches(rule.body(), &facts, Substitution::new(), &mut gammas);
            for g in gammas {
                let head = substitute(&g, rule.head())
                    .to_fact()
                    .expect("range-restricted heads are ground after matching");
                if !facts.contains(&head) {
                    fresh.push(head);
                }
            }
        }
        if fresh.is_empty() {
            return facts;
        }
        facts.extend(fresh);
    }
}
