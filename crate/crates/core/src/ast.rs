//! Datalog data model: terms, atoms, ground facts, rules, substitutions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::pc::Pc;

/// Interned constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub(crate) u32);

impl Sym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Predicate identifier, dense in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub(crate) u32);

impl PredId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// String interner for constants. Equal strings get equal ids.
#[derive(Clone, Debug, Default)]
pub struct Symbols {
    strings: Vec<Arc<str>>,
    ids: FxHashMap<Arc<str>, Sym>,
}

impl Symbols {
    pub fn intern(&mut self, s: &str) -> Sym {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = Sym(self.strings.len() as u32);
        let s: Arc<str> = Arc::from(s);
        self.strings.push(s.clone());
        self.ids.insert(s, id);
        id
    }

    pub fn get(&self, s: &str) -> Option<Sym> {
        self.ids.get(s).copied()
    }

    pub fn resolve(&self, id: Sym) -> &str {
        &self.strings[id.index()]
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Sym),
    Var(Arc<str>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: PredId,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: PredId, args: Vec<Term>) -> Self {
        Atom { pred, args }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Arc<str>> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    /// The fact this atom denotes, if it is ground.
    pub fn to_fact(&self) -> Option<Fact> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(*c),
                Term::Var(_) => None,
            })
            .collect::<Option<Box<[Sym]>>>()?;
        Some(Fact {
            pred: self.pred,
            args,
        })
    }
}

/// A ground atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub pred: PredId,
    pub args: Box<[Sym]>,
}

impl Fact {
    pub fn new(pred: PredId, args: impl Into<Box<[Sym]>>) -> Self {
        Fact {
            pred,
            args: args.into(),
        }
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            pred: self.pred,
            args: self.args.iter().map(|&c| Term::Const(c)).collect(),
        }
    }
}

/// A fact paired with the presence condition under which it holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedFact {
    pub fact: Fact,
    pub pc: Pc,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule has an empty body")]
    EmptyBody,
    #[error("head variable `{0}` does not occur in the body")]
    NotRangeRestricted(String),
}

/// A positive Horn clause `head :- body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    head: Atom,
    body: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Atom, body: Vec<Atom>) -> Result<Self, RuleError> {
        if body.is_empty() {
            return Err(RuleError::EmptyBody);
        }
        for v in head.vars() {
            if !body.iter().any(|b| b.vars().any(|w| w == v)) {
                return Err(RuleError::NotRangeRestricted(v.to_string()));
            }
        }
        Ok(Rule { head, body })
    }

    pub fn head(&self) -> &Atom {
        &self.head
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }
}

/// Partial map from variable names to constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Arc<str>, Sym>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<Sym> {
        self.0.get(var).copied()
    }

    /// Bind `var`; returns false if it is already bound to something else.
    pub fn bind(&mut self, var: &Arc<str>, value: Sym) -> bool {
        match self.0.get(var) {
            Some(&old) => old == value,
            None => {
                self.0.insert(var.clone(), value);
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Sym)> {
        self.0.iter().map(|(k, &v)| (k.as_ref(), v))
    }
}

impl<'a> FromIterator<(&'a str, Sym)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (&'a str, Sym)>>(iter: T) -> Self {
        Substitution(iter.into_iter().map(|(k, v)| (Arc::from(k), v)).collect())
    }
}

/// Replace every bound variable of `atom` by its constant.
pub fn substitute(gamma: &Substitution, atom: &Atom) -> Atom {
    Atom {
        pred: atom.pred,
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => gamma.get(v).map_or_else(|| t.clone(), Term::Const),
                Term::Const(_) => t.clone(),
            })
            .collect(),
    }
}

/// Extend `gamma` minimally so that `premise` instantiates to `fact`.
pub fn match_atom(premise: &Atom, fact: &Fact, gamma: &Substitution) -> Option<Substitution> {
    if premise.pred != fact.pred || premise.args.len() != fact.args.len() {
        return None;
    }
    let mut out = gamma.clone();
    for (t, &c) in premise.args.iter().zip(fact.args.iter()) {
        match t {
            Term::Const(k) if *k != c => return None,
            Term::Const(_) => {}
            Term::Var(v) => {
                if !out.bind(v, c) {
                    return None;
                }
            }
        }
    }
    Some(out)
}

/// Names used to print atoms and facts.
pub trait Names {
    fn predicate_name(&self, p: PredId) -> &str;
    fn symbol(&self, s: Sym) -> &str;
}

pub(crate) fn write_quoted(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    out.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\t' => out.write_str("\\t")?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('"')
}

impl Atom {
    pub fn display<'a, N: Names>(&'a self, names: &'a N) -> impl fmt::Display + 'a {
        struct D<'a, N>(&'a Atom, &'a N);
        impl<N: Names> fmt::Display for D<'_, N> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}(", self.1.predicate_name(self.0.pred))?;
                for (i, t) in self.0.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match t {
                        Term::Const(c) => write_quoted(f, self.1.symbol(*c))?,
                        Term::Var(v) => f.write_str(v)?,
                    }
                }
                f.write_str(")")
            }
        }
        D(self, names)
    }
}

impl Fact {
    pub fn display<'a, N: Names>(&'a self, names: &'a N) -> impl fmt::Display + 'a {
        struct D<'a, N>(&'a Fact, &'a N);
        impl<N: Names> fmt::Display for D<'_, N> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}(", self.1.predicate_name(self.0.pred))?;
                for (i, &c) in self.0.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_quoted(f, self.1.symbol(c))?;
                }
                f.write_str(")")
            }
        }
        D(self, names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Fixture {
        syms: Symbols,
    }

    impl Fixture {
        fn new() -> Self {
            Fixture {
                syms: Symbols::default(),
            }
        }
        fn c(&mut self, s: &str) -> Term {
            Term::Const(self.syms.intern(s))
        }
    }

    const VPT: PredId = PredId(0);
    const NEW: PredId = PredId(1);
    const ASSIGN: PredId = PredId(2);

    #[test]
    fn substitute_examples() {
        let mut fx = Fixture::new();
        let o1 = fx.syms.intern("o1");
        let a = fx.syms.intern("A");
        let gamma: Substitution = [("v1", o1), ("h1", a)].into_iter().collect();
        let atom = Atom::new(VPT, vec![Term::var("v1"), Term::var("h1")]);
        assert_eq!(
            substitute(&gamma, &atom),
            Atom::new(VPT, vec![Term::Const(o1), Term::Const(a)])
        );

        let ground = Atom::new(NEW, vec![fx.c("o1"), fx.c("A")]);
        assert_eq!(substitute(&Substitution::new(), &ground), ground);

        let o2 = fx.syms.intern("o2");
        let gamma: Substitution = [("v2", o2)].into_iter().collect();
        let assign = Atom::new(ASSIGN, vec![Term::var("v1"), Term::var("v2")]);
        assert_eq!(
            substitute(&gamma, &assign),
            Atom::new(ASSIGN, vec![Term::var("v1"), Term::Const(o2)])
        );
    }

    #[test]
    fn match_examples() {
        let mut fx = Fixture::new();
        let o3 = fx.syms.intern("o3");
        let o2 = fx.syms.intern("o2");
        let o1 = fx.syms.intern("o1");
        let b = fx.syms.intern("B");
        let fact = Fact::new(ASSIGN, vec![o3, o2]);

        let premise = Atom::new(ASSIGN, vec![Term::var("v1"), Term::var("v2")]);
        let got = match_atom(&premise, &fact, &Substitution::new()).unwrap();
        let want: Substitution = [("v1", o3), ("v2", o2)].into_iter().collect();
        assert_eq!(got, want);

        let repeated = Atom::new(ASSIGN, vec![Term::var("v1"), Term::var("v1")]);
        assert_eq!(match_atom(&repeated, &fact, &Substitution::new()), None);

        let vpt = Atom::new(VPT, vec![Term::var("v2"), Term::var("h2")]);
        let prior: Substitution = [("v2", o1)].into_iter().collect();
        assert_eq!(match_atom(&vpt, &Fact::new(VPT, vec![o2, b]), &prior), None);

        // predicate and arity must agree
        assert_eq!(match_atom(&vpt, &fact, &Substitution::new()), None);
        let short = Atom::new(ASSIGN, vec![Term::var("x")]);
        assert_eq!(match_atom(&short, &fact, &Substitution::new()), None);
    }

    #[test]
    fn rules_are_range_restricted() {
        let head = Atom::new(VPT, vec![Term::var("x"), Term::var("y")]);
        let body = vec![Atom::new(NEW, vec![Term::var("x"), Term::var("z")])];
        assert_eq!(
            Rule::new(head.clone(), body),
            Err(RuleError::NotRangeRestricted("y".into()))
        );
        assert_eq!(Rule::new(head, vec![]), Err(RuleError::EmptyBody));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            (0u32..4).prop_map(|c| Term::Const(Sym(c))),
            prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::var),
        ]
    }

    proptest! {
        #[test]
        fn substitute_is_idempotent(
            args in prop::collection::vec(arb_term(), 0..5),
            binds in prop::collection::vec((prop::sample::select(vec!["a", "b", "c"]), 0u32..4), 0..3),
        ) {
            let atom = Atom::new(PredId(0), args);
            let gamma: Substitution = binds.iter().map(|&(v, c)| (v, Sym(c))).collect();
            let once = substitute(&gamma, &atom);
            prop_assert_eq!(substitute(&gamma, &once), once);
        }

        #[test]
        fn match_is_sound_and_minimal(
            args in prop::collection::vec(arb_term(), 0..5),
            consts in prop::collection::vec(0u32..4, 5),
            prior in prop::collection::vec((prop::sample::select(vec!["a", "b", "c"]), 0u32..4), 0..2),
        ) {
            let premise = Atom::new(PredId(0), args.clone());
            let fact = Fact::new(PredId(0), consts[..args.len()].iter().map(|&c| Sym(c)).collect::<Vec<_>>());
            let gamma: Substitution = prior.iter().map(|&(v, c)| (v, Sym(c))).collect();
            if let Some(out) = match_atom(&premise, &fact, &gamma) {
                prop_assert_eq!(substitute(&out, &premise).to_fact(), Some(fact));
                let mut expected: Vec<&str> = gamma.iter().map(|(k, _)| k).collect();
                expected.extend(premise.vars().map(|v| v.as_ref()));
                expected.sort();
                expected.dedup();
                let bound: Vec<&str> = out.iter().map(|(k, _)| k).collect();
                prop_assert_eq!(bound, expected);
                for (k, v) in gamma.iter() {
                    prop_assert_eq!(out.get(k), Some(v));
                }
            }
        }
    }
}
