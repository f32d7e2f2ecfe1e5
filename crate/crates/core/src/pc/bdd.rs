//! Hash-consed reduced ordered BDD store.

use std::fmt;

use rustc_hash::FxHashMap;

use super::{parse_formula, Configuration, FeatureId, FeatureRegistry, Formula, PcError};

/// Handle to a canonical presence condition inside a [`PcStore`].
///
/// Handles from the same store compare equal iff the formulas they denote
/// are equivalent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pc(u32);

impl Pc {
    pub const FALSE: Pc = Pc(0);
    pub const TRUE: Pc = Pc(1);

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Pc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Pc::FALSE => f.write_str("Pc(False)"),
            Pc::TRUE => f.write_str("Pc(True)"),
            Pc(n) => write!(f, "Pc(#{n})"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Node {
    var: u32,
    low: Pc,
    high: Pc,
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Op {
    And,
    Or,
}

/// Shared node store with unique table and apply caches. Variable order is
/// feature registration order. Nodes are never freed during a run.
#[derive(Clone, Debug)]
pub struct PcStore {
    features: FeatureRegistry,
    nodes: Vec<Node>,
    unique: FxHashMap<Node, Pc>,
    apply_cache: FxHashMap<(Op, Pc, Pc), Pc>,
    not_cache: FxHashMap<Pc, Pc>,
}

impl Default for PcStore {
    fn default() -> Self {
        Self::new()
    }
}

impl PcStore {
    pub fn new() -> Self {
        let terminal = |v| Node {
            var: TERMINAL_VAR,
            low: Pc(v),
            high: Pc(v),
        };
        PcStore {
            features: FeatureRegistry::default(),
            nodes: vec![terminal(0), terminal(1)],
            unique: FxHashMap::default(),
            apply_cache: FxHashMap::default(),
            not_cache: FxHashMap::default(),
        }
    }

    pub fn features(&self) -> &FeatureRegistry {
        &self.features
    }

    pub fn feature(&mut self, name: &str) -> Result<FeatureId, PcError> {
        self.features.register(name)
    }

    pub fn tt(&self) -> Pc {
        Pc::TRUE
    }

    pub fn ff(&self) -> Pc {
        Pc::FALSE
    }

    /// Number of nodes ever allocated, terminals included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn var(&mut self, f: FeatureId) -> Pc {
        self.mk(f.0, Pc::FALSE, Pc::TRUE)
    }

    fn mk(&mut self, var: u32, low: Pc, high: Pc) -> Pc {
        if low == high {
            return low;
        }
        let node = Node { var, low, high };
        if let Some(&pc) = self.unique.get(&node) {
            return pc;
        }
        let pc = Pc(self.nodes.len() as u32);
        self.nodes.push(node);
        self.unique.insert(node, pc);
        pc
    }

    fn node(&self, pc: Pc) -> Node {
        self.nodes[pc.0 as usize]
    }

    /// Parse a formula and return its canonical handle.
    pub fn parse(&mut self, text: &str) -> Result<Pc, PcError> {
        let f = parse_formula(text, &mut self.features)?;
        Ok(self.build(&f))
    }

    pub fn parse_formula(&mut self, text: &str) -> Result<Formula, PcError> {
        parse_formula(text, &mut self.features)
    }

    pub fn build(&mut self, f: &Formula) -> Pc {
        match f {
            Formula::Const(true) => Pc::TRUE,
            Formula::Const(false) => Pc::FALSE,
            Formula::Var(v) => self.var(*v),
            Formula::Not(g) => {
                let g = self.build(g);
                self.not(g)
            }
            Formula::And(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.and(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.or(a, b)
            }
        }
    }

    pub fn and(&mut self, a: Pc, b: Pc) -> Pc {
        self.apply(Op::And, a, b)
    }

    pub fn or(&mut self, a: Pc, b: Pc) -> Pc {
        self.apply(Op::Or, a, b)
    }

    pub fn not(&mut self, a: Pc) -> Pc {
        match a {
            Pc::TRUE => return Pc::FALSE,
            Pc::FALSE => return Pc::TRUE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let n = self.node(a);
        let low = self.not(n.low);
        let high = self.not(n.high);
        let r = self.mk(n.var, low, high);
        self.not_cache.insert(a, r);
        self.not_cache.insert(r, a);
        r
    }

    fn apply(&mut self, op: Op, a: Pc, b: Pc) -> Pc {
        match (op, a, b) {
            (Op::And, Pc::FALSE, _) | (Op::And, _, Pc::FALSE) => return Pc::FALSE,
            (Op::And, Pc::TRUE, x) | (Op::And, x, Pc::TRUE) => return x,
            (Op::Or, Pc::TRUE, _) | (Op::Or, _, Pc::TRUE) => return Pc::TRUE,
            (Op::Or, Pc::FALSE, x) | (Op::Or, x, Pc::FALSE) => return x,
            _ if a == b => return a,
            _ => {}
        }
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let (na, nb) = (self.node(a), self.node(b));
        let var = na.var.min(nb.var);
        let (al, ah) = if na.var == var { (na.low, na.high) } else { (a, a) };
        let (bl, bh) = if nb.var == var { (nb.low, nb.high) } else { (b, b) };
        let low = self.apply(op, al, bl);
        let high = self.apply(op, ah, bh);
        let r = self.mk(var, low, high);
        self.apply_cache.insert(key, r);
        r
    }

    /// Constant time: a reduced BDD is unsatisfiable iff it is the `False` terminal.
    pub fn is_sat(&self, a: Pc) -> bool {
        a != Pc::FALSE
    }

    pub fn eval(&self, a: Pc, cfg: &Configuration) -> Result<bool, PcError> {
        let mut cur = a;
        while !cur.is_terminal() {
            let n = self.node(cur);
            let f = FeatureId(n.var);
            let v = cfg
                .get(f)
                .ok_or_else(|| PcError::Unassigned(self.features.name(f).to_owned()))?;
            cur = if v { n.high } else { n.low };
        }
        Ok(cur == Pc::TRUE)
    }

    /// Canonical text: one conjunction per path to `True`, literals sorted
    /// by feature name, conjunctions sorted lexicographically.
    pub fn to_text(&self, a: Pc) -> String {
        match a {
            Pc::TRUE => return "True".into(),
            Pc::FALSE => return "False".into(),
            _ => {}
        }
        let mut terms = Vec::new();
        let mut path = Vec::new();
        self.collect_paths(a, &mut path, &mut terms);
        terms.sort();
        terms.join(" || ")
    }

    fn collect_paths(&self, a: Pc, path: &mut Vec<(FeatureId, bool)>, out: &mut Vec<String>) {
        match a {
            Pc::FALSE => {}
            Pc::TRUE => {
                let mut lits: Vec<_> = path
                    .iter()
                    .map(|&(f, v)| (self.features.name(f), v))
                    .collect();
                lits.sort();
                let term: Vec<String> = lits
                    .into_iter()
                    .map(|(n, v)| if v { n.to_owned() } else { format!("!{n}") })
                    .collect();
                out.push(term.join(" && "));
            }
            _ => {
                let n = self.node(a);
                path.push((FeatureId(n.var), false));
                self.collect_paths(n.low, path, out);
                path.last_mut().unwrap().1 = true;
                self.collect_paths(n.high, path, out);
                path.pop();
            }
        }
    }

    /// Check reducedness and ordering of every node reachable from `a`.
    pub fn audit(&self, a: Pc) -> Result<(), String> {
        let mut stack = vec![a];
        let mut seen = rustc_hash::FxHashSet::default();
        while let Some(cur) = stack.pop() {
            if cur.is_terminal() || !seen.insert(cur) {
                continue;
            }
            let n = self.node(cur);
            if n.low == n.high {
                return Err(format!("{cur:?} is redundant (low == high)"));
            }
            for child in [n.low, n.high] {
                let cv = self.node(child).var;
                if cv <= n.var {
                    return Err(format!("{cur:?} has child {child:?} out of order"));
                }
            }
            if self.unique.get(&n) != Some(&cur) {
                return Err(format!("{cur:?} is not the unique representative"));
            }
            stack.push(n.low);
            stack.push(n.high);
        }
        Ok(())
    }
}
