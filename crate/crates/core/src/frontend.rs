//! Program parser and fact-file I/O.
//!
//! The program dialect is a small Soufflé-like subset:
//!
//! ```text
//! .decl Edge(x: symbol, y: symbol)
//! .input Edge
//! .output Path
//! Path(x, y) :- Edge(x, y).
//! Path(x, z) :- Edge(x, y), Path(y, z).
//! Edge("a", "b") @ FA && !FB.
//! ```
//!
//! Fact files are tab-separated, one fact per line, with an optional last
//! column `@ <pc>`. Constants are unquoted in fact files and double-quoted in
//! program text.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::ast::{
    Atom, Fact, LiftedFact, Names, PredId, Rule, RuleError, Sym, Symbols, Term,
};
use crate::pc::{Pc, PcError, PcStore};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared predicate `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: predicate `{name}` is already declared")]
    Redeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` has arity {expected}, found {found} arguments")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: {source}")]
    Rule {
        line: usize,
        col: usize,
        source: RuleError,
    },
    #[error("{line}:{col}: unsupported construct: {what}")]
    Unsupported { line: usize, col: usize, what: String },
    #[error("{line}:{col}: {source}")]
    Pc {
        line: usize,
        col: usize,
        source: PcError,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("{}:{line}: expected {expected} or {} columns, found {found}", path.display(), expected + 1)]
    Columns {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{}:{line}: {source}", path.display())]
    FactPc {
        path: PathBuf,
        line: usize,
        source: PcError,
    },
    #[error("feature model: {0}")]
    FeatureModelPc(PcError),
    #[error("feature model is unsatisfiable")]
    UnsatFeatureModel,
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl LoadError {
    pub fn is_io(&self) -> bool {
        matches!(self, LoadError::Io { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub columns: Vec<String>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }
}

/// A loaded program: declarations, rules (the IDB), inline facts and I/O
/// directives, sharing one constant interner.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub symbols: Symbols,
    predicates: Vec<PredicateDecl>,
    pred_ids: FxHashMap<String, PredId>,
    rules: Vec<Rule>,
    facts: Vec<LiftedFact>,
    inputs: Vec<PredId>,
    outputs: Vec<PredId>,
}

impl Names for Program {
    fn predicate_name(&self, p: PredId) -> &str {
        &self.predicates[p.index()].name
    }

    fn symbol(&self, s: Sym) -> &str {
        self.symbols.resolve(s)
    }
}

impl Program {
    pub fn predicate(&self, name: &str) -> Option<PredId> {
        self.pred_ids.get(name).copied()
    }

    pub fn decl(&self, p: PredId) -> &PredicateDecl {
        &self.predicates[p.index()]
    }

    pub fn arity(&self, p: PredId) -> usize {
        self.predicates[p.index()].arity()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (PredId, &PredicateDecl)> {
        self.predicates
            .iter()
            .enumerate()
            .map(|(i, d)| (PredId(i as u32), d))
    }

    pub fn num_predicates(&self) -> usize {
        self.predicates.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn inline_facts(&self) -> &[LiftedFact] {
        &self.facts
    }

    pub fn inputs(&self) -> &[PredId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[PredId] {
        &self.outputs
    }

    /// Predicates appearing in some rule head.
    pub fn derived_predicates(&self) -> Vec<PredId> {
        let mut out: Vec<PredId> = self.rules.iter().map(|r| r.head().pred).collect();
        out.sort();
        out.dedup();
        out
    }

    /// `.output` predicates, or every derived non-input predicate when the
    /// program has no `.output` directive.
    pub fn output_predicates(&self) -> Vec<PredId> {
        if !self.outputs.is_empty() {
            return self.outputs.clone();
        }
        self.derived_predicates()
            .into_iter()
            .filter(|p| !self.inputs.contains(p))
            .collect()
    }

    /// Declare a predicate programmatically.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<PredId, LoadError> {
        if self.pred_ids.contains_key(name) {
            return Err(LoadError::Redeclared {
                line: 0,
                col: 0,
                name: name.to_owned(),
            });
        }
        let id = PredId(self.predicates.len() as u32);
        self.predicates.push(PredicateDecl {
            name: name.to_owned(),
            columns: (0..arity).map(|i| format!("c{i}")).collect(),
        });
        self.pred_ids.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn add_rule(&mut self, rule: Rule) {
        self.rules.push(rule);
    }

    pub fn fact(&mut self, pred: PredId, args: &[&str]) -> Fact {
        let args: Vec<Sym> = args.iter().map(|a| self.symbols.intern(a)).collect();
        Fact::new(pred, args)
    }
}

/// The feature model: a satisfiable condition every valid configuration meets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureModel {
    pub formula: Pc,
}

impl FeatureModel {
    pub fn tt() -> Self {
        FeatureModel { formula: Pc::TRUE }
    }

    pub fn new(formula: Pc) -> Result<Self, LoadError> {
        if formula == Pc::FALSE {
            return Err(LoadError::UnsatFeatureModel);
        }
        Ok(FeatureModel { formula })
    }

    pub fn parse(text: &str, pcs: &mut PcStore) -> Result<Self, LoadError> {
        let pc = pcs.parse(text.trim()).map_err(LoadError::FeatureModelPc)?;
        Self::new(pc)
    }

    /// `arg` names a file holding the formula on one line, or is the formula.
    pub fn from_arg(arg: &str, pcs: &mut PcStore) -> Result<Self, LoadError> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
                path: path.to_owned(),
                source,
            })?;
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("True");
            Self::parse(line, pcs)
        } else {
            Self::parse(arg, pcs)
        }
    }
}

// ---------------------------------------------------------------------------
// Program text

struct Cursor<'s> {
    src: &'s str,
    pos: usize,
}

struct RawAtom {
    name: String,
    args: Vec<RawTerm>,
    pos: usize,
}

enum RawTerm {
    Const(String),
    Var(String),
}

enum Item {
    Decl { name: String, columns: Vec<String>, pos: usize },
    Input(Vec<(String, usize)>),
    Output(Vec<(String, usize)>),
    Rule { head: RawAtom, body: Vec<RawAtom> },
    Fact { atom: RawAtom, pc: Option<(String, usize)> },
}

impl<'s> Cursor<'s> {
    fn line_col(&self, pos: usize) -> (usize, usize) {
        line_col(self.src, pos)
    }

    fn error<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, LoadError> {
        let (line, col) = self.line_col(pos);
        Err(LoadError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn unsupported<T>(&self, pos: usize, what: impl Into<String>) -> Result<T, LoadError> {
        let (line, col) = self.line_col(pos);
        Err(LoadError::Unsupported {
            line,
            col,
            what: what.into(),
        })
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_trivia(&mut self) -> Result<(), LoadError> {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if self.rest().starts_with("//") {
                self.pos += self.rest().find('\n').unwrap_or(self.rest().len());
            } else if self.rest().starts_with("/*") {
                let start = self.pos;
                match self.rest()[2..].find("*/") {
                    Some(end) => self.pos += end + 4,
                    None => return self.error(start, "unterminated block comment"),
                }
            } else {
                return Ok(());
            }
        }
    }

    fn eat(&mut self, tok: &str) -> Result<bool, LoadError> {
        self.skip_trivia()?;
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), LoadError> {
        if self.eat(tok)? {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_owned(), |c| format!("`{c}`"));
            self.error(self.pos, format!("expected `{tok}`, found {found}"))
        }
    }

    fn ident(&mut self) -> Result<Option<(String, usize)>, LoadError> {
        self.skip_trivia()?;
        let start = self.pos;
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Ok(None),
        }
        let end = chars
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Ok(Some((rest[..end].to_owned(), start)))
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize), LoadError> {
        match self.ident()? {
            Some(id) => Ok(id),
            None => self.error(self.pos, format!("expected {what}")),
        }
    }

    fn string(&mut self) -> Result<String, LoadError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return self.error(start, "unterminated string literal");
            };
            self.pos += c.len_utf8();
            match c {
                '"' => return Ok(out),
                '\\' => {
                    let Some(e) = self.peek() else {
                        return self.error(start, "unterminated string literal");
                    };
                    self.pos += e.len_utf8();
                    out.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        other => other,
                    });
                }
                '\n' => return self.error(start, "newline in string literal"),
                c => out.push(c),
            }
        }
    }

    fn items(&mut self) -> Result<Vec<Item>, LoadError> {
        let mut items = Vec::new();
        let mut wildcard = 0usize;
        loop {
            self.skip_trivia()?;
            if self.pos >= self.src.len() {
                return Ok(items);
            }
            if self.peek() == Some('.') {
                items.push(self.directive()?);
            } else {
                items.push(self.clause(&mut wildcard)?);
            }
        }
    }

    fn directive(&mut self) -> Result<Item, LoadError> {
        let start = self.pos;
        self.pos += 1;
        let (kw, _) = self.expect_ident("a directive name")?;
        match kw.as_str() {
            "decl" => {
                let (name, pos) = self.expect_ident("a predicate name")?;
                self.expect("(")?;
                let mut columns = Vec::new();
                if !self.eat(")")? {
                    loop {
                        let (col, _) = self.expect_ident("a column name")?;
                        self.expect(":")?;
                        let (ty, ty_pos) = self.expect_ident("a column type")?;
                        if ty != "symbol" {
                            return self.unsupported(
                                ty_pos,
                                format!("column type `{ty}` (only `symbol` columns are supported)"),
                            );
                        }
                        columns.push(col);
                        if self.eat(")")? {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Ok(Item::Decl { name, columns, pos })
            }
            "input" | "output" => {
                let mut names = vec![self.expect_ident("a predicate name")?];
                while self.eat(",")? {
                    names.push(self.expect_ident("a predicate name")?);
                }
                Ok(if kw == "input" {
                    Item::Input(names)
                } else {
                    Item::Output(names)
                })
            }
            other => self.unsupported(start, format!("directive `.{other}`")),
        }
    }

    fn atom(&mut self, wildcard: &mut usize, in_body: bool) -> Result<RawAtom, LoadError> {
        self.skip_trivia()?;
        let start = self.pos;
        if in_body && self.peek() == Some('!') {
            return self.unsupported(start, "negated body atom");
        }
        let Some((name, pos)) = self.ident()? else {
            return self.error(start, "expected an atom");
        };
        if in_body && matches!(name.as_str(), "count" | "sum" | "min" | "max" | "mean") {
            self.skip_trivia()?;
            if self.peek() != Some('(') {
                return self.unsupported(pos, format!("aggregate `{name}`"));
            }
        }
        self.skip_trivia()?;
        if self.peek() != Some('(') {
            return if in_body {
                self.unsupported(pos, format!("constraint or arithmetic starting at `{name}`"))
            } else {
                self.error(self.pos, "expected `(`")
            };
        }
        self.pos += 1;
        let mut args = Vec::new();
        if !self.eat(")")? {
            loop {
                self.skip_trivia()?;
                let tpos = self.pos;
                match self.peek() {
                    Some('"') => args.push(RawTerm::Const(self.string()?)),
                    Some(c) if c.is_ascii_digit() || c == '-' => {
                        return self.unsupported(tpos, "numeric constant");
                    }
                    _ => {
                        let (v, _) = self.expect_ident("a term")?;
                        if v == "_" {
                            *wildcard += 1;
                            args.push(RawTerm::Var(format!("_{}", wildcard)));
                        } else {
                            args.push(RawTerm::Var(v));
                        }
                    }
                }
                self.skip_trivia()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(',') => self.pos += 1,
                    Some(c) if "+-*/%^".contains(c) => {
                        return self.unsupported(self.pos, "arithmetic expression");
                    }
                    _ => return self.error(self.pos, "expected `,` or `)`"),
                }
            }
        }
        Ok(RawAtom { name, args, pos })
    }

    fn clause(&mut self, wildcard: &mut usize) -> Result<Item, LoadError> {
        let head = self.atom(wildcard, false)?;
        if self.eat(":-")? {
            let mut body = vec![self.atom(wildcard, true)?];
            loop {
                self.skip_trivia()?;
                match self.peek() {
                    Some(',') => {
                        self.pos += 1;
                        body.push(self.atom(wildcard, true)?);
                    }
                    Some('.') => {
                        self.pos += 1;
                        break;
                    }
                    Some(';') => return self.unsupported(self.pos, "disjunctive rule body"),
                    _ => {
                        let pos = self.pos;
                        if self.rest().starts_with("!=")
                            || self.rest().starts_with('=')
                            || self.rest().starts_with('<')
                            || self.rest().starts_with('>')
                        {
                            return self.unsupported(pos, "comparison constraint");
                        }
                        return self.error(pos, "expected `,` or `.`");
                    }
                }
            }
            Ok(Item::Rule { head, body })
        } else {
            let pc = if self.eat("@")? {
                let start = self.pos;
                let len = self.rest().find('.').ok_or(()).or_else(|_| {
                    self.error(start, "expected `.` after presence condition")
                })?;
                let text = self.src[start..start + len].to_owned();
                self.pos += len;
                Some((text, start))
            } else {
                None
            };
            self.expect(".")?;
            Ok(Item::Fact { atom: head, pc })
        }
    }
}

fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// Parse program text. Presence conditions after `@` are parsed into `pcs`;
/// facts without one hold in every product.
pub fn parse_program(text: &str, pcs: &mut PcStore) -> Result<Program, LoadError> {
    let mut cur = Cursor { src: text, pos: 0 };
    let items = cur.items()?;
    let mut prog = Program::default();

    for item in &items {
        if let Item::Decl { name, columns, pos } = item {
            if prog.pred_ids.contains_key(name) {
                let (line, col) = line_col(text, *pos);
                return Err(LoadError::Redeclared {
                    line,
                    col,
                    name: name.clone(),
                });
            }
            let id = PredId(prog.predicates.len() as u32);
            prog.predicates.push(PredicateDecl {
                name: name.clone(),
                columns: columns.clone(),
            });
            prog.pred_ids.insert(name.clone(), id);
        }
    }

    let resolve = |prog: &Program, name: &str, pos: usize| {
        prog.predicate(name).ok_or_else(|| {
            let (line, col) = line_col(text, pos);
            LoadError::Undeclared {
                line,
                col,
                name: name.to_owned(),
            }
        })
    };
    let atom = |prog: &mut Program, raw: &RawAtom| -> Result<Atom, LoadError> {
        let pred = resolve(prog, &raw.name, raw.pos)?;
        let expected = prog.arity(pred);
        if expected != raw.args.len() {
            let (line, col) = line_col(text, raw.pos);
            return Err(LoadError::Arity {
                line,
                col,
                name: raw.name.clone(),
                expected,
                found: raw.args.len(),
            });
        }
        let args = raw
            .args
            .iter()
            .map(|t| match t {
                RawTerm::Const(c) => Term::Const(prog.symbols.intern(c)),
                RawTerm::Var(v) => Term::Var(Arc::from(v.as_str())),
            })
            .collect();
        Ok(Atom::new(pred, args))
    };

    for item in items {
        match item {
            Item::Decl { .. } => {}
            Item::Input(names) => {
                for (n, pos) in names {
                    let p = resolve(&prog, &n, pos)?;
                    if !prog.inputs.contains(&p) {
                        prog.inputs.push(p);
                    }
                }
            }
            Item::Output(names) => {
                for (n, pos) in names {
                    let p = resolve(&prog, &n, pos)?;
                    if !prog.outputs.contains(&p) {
                        prog.outputs.push(p);
                    }
                }
            }
            Item::Rule { head, body } => {
                let h = atom(&mut prog, &head)?;
                let b = body
                    .iter()
                    .map(|a| atom(&mut prog, a))
                    .collect::<Result<Vec<_>, _>>()?;
                let rule = Rule::new(h, b).map_err(|source| {
                    let (line, col) = line_col(text, head.pos);
                    LoadError::Rule { line, col, source }
                })?;
                prog.rules.push(rule);
            }
            Item::Fact { atom: raw, pc } => {
                let a = atom(&mut prog, &raw)?;
                let Some(fact) = a.to_fact() else {
                    let (line, col) = line_col(text, raw.pos);
                    return Err(LoadError::Rule {
                        line,
                        col,
                        source: RuleError::EmptyBody,
                    });
                };
                let pc = match pc {
                    None => Pc::TRUE,
                    Some((src, start)) => pcs.parse(&src).map_err(|source| {
                        let off = match &source {
                            PcError::Syntax { pos, .. } => *pos,
                            _ => 0,
                        };
                        let (line, col) = line_col(text, start + off);
                        LoadError::Pc { line, col, source }
                    })?,
                };
                prog.facts.push(LiftedFact { fact, pc });
            }
        }
    }
    Ok(prog)
}

/// Render a program back to source text.
pub fn print_program(prog: &Program, pcs: &PcStore) -> String {
    let mut out = String::new();
    for d in &prog.predicates {
        let cols: Vec<String> = d.columns.iter().map(|c| format!("{c}: symbol")).collect();
        let _ = writeln!(out, ".decl {}({})", d.name, cols.join(", "));
    }
    for p in &prog.inputs {
        let _ = writeln!(out, ".input {}", prog.decl(*p).name);
    }
    for p in &prog.outputs {
        let _ = writeln!(out, ".output {}", prog.decl(*p).name);
    }
    for r in &prog.rules {
        let body: Vec<String> = r.body().iter().map(|a| a.display(prog).to_string()).collect();
        let _ = writeln!(out, "{} :- {}.", r.head().display(prog), body.join(", "));
    }
    for f in &prog.facts {
        if f.pc == Pc::TRUE {
            let _ = writeln!(out, "{}.", f.fact.display(prog));
        } else {
            let _ = writeln!(out, "{} @ {}.", f.fact.display(prog), pcs.to_text(f.pc));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Fact files

/// Parse fact-file text for `pred`. Duplicate facts are merged by disjoining
/// their conditions; the result keeps first-appearance order.
pub fn parse_fact_text(
    prog: &mut Program,
    pred: PredId,
    text: &str,
    path: &Path,
    pcs: &mut PcStore,
) -> Result<Vec<LiftedFact>, LoadError> {
    let arity = prog.arity(pred);
    let mut out: Vec<LiftedFact> = Vec::new();
    let mut seen: FxHashMap<Fact, usize> = FxHashMap::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() && arity > 0 {
            continue;
        }
        let cols: Vec<&str> = if line.is_empty() {
            Vec::new()
        } else {
            line.split('\t').collect()
        };
        let (values, pc) = if cols.len() == arity + 1 && cols[arity].trim_start().starts_with('@') {
            let src = cols[arity].trim_start()[1..].trim();
            let pc = pcs.parse(src).map_err(|source| LoadError::FactPc {
                path: path.to_owned(),
                line: lineno + 1,
                source,
            })?;
            (&cols[..arity], pc)
        } else if cols.len() == arity {
            (&cols[..], Pc::TRUE)
        } else {
            return Err(LoadError::Columns {
                path: path.to_owned(),
                line: lineno + 1,
                expected: arity,
                found: cols.len(),
            });
        };
        let args: Vec<Sym> = values.iter().map(|v| prog.symbols.intern(v)).collect();
        let fact = Fact::new(pred, args);
        match seen.get(&fact) {
            Some(&i) => out[i].pc = pcs.or(out[i].pc, pc),
            None => {
                seen.insert(fact.clone(), out.len());
                out.push(LiftedFact { fact, pc });
            }
        }
    }
    Ok(out)
}

pub fn load_fact_file(
    prog: &mut Program,
    predicate: &str,
    path: &Path,
    pcs: &mut PcStore,
) -> Result<Vec<LiftedFact>, LoadError> {
    let pred = prog
        .predicate(predicate)
        .ok_or_else(|| LoadError::UnknownPredicate(predicate.to_owned()))?;
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_fact_text(prog, pred, &text, path, pcs)
}

/// Predicates read from a facts directory: the `.input` list, or every
/// predicate that no rule derives.
pub fn input_predicates(prog: &Program) -> Vec<PredId> {
    if !prog.inputs.is_empty() {
        return prog.inputs.clone();
    }
    let derived = prog.derived_predicates();
    prog.predicates()
        .map(|(p, _)| p)
        .filter(|p| !derived.contains(p))
        .collect()
}

/// Load `<dir>/<Name>.facts` for every input predicate. Missing files read
/// as empty relations. The program's inline facts come first.
pub fn load_facts_dir(
    prog: &mut Program,
    dir: &Path,
    pcs: &mut PcStore,
) -> Result<Vec<LiftedFact>, LoadError> {
    let mut out = prog.facts.clone();
    for pred in input_predicates(prog) {
        let path = dir.join(format!("{}.facts", prog.decl(pred).name));
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => continue,
            Err(source) => return Err(LoadError::Io { path, source }),
        };
        out.extend(parse_fact_text(prog, pred, &text, &path, pcs)?);
    }
    Ok(out)
}

/// Render rows as fact-file text. Rows are sorted by their column tuple;
/// a `None` condition (or arity > 0 with condition `True`) omits the column.
pub fn render_fact_rows(mut rows: Vec<(Vec<&str>, Option<String>)>) -> String {
    rows.sort();
    let mut out = String::new();
    for (cols, pc) in rows {
        out.push_str(&cols.join("\t"));
        match pc {
            Some(pc) if !(pc == "True" && !cols.is_empty()) => {
                if !cols.is_empty() {
                    out.push('\t');
                }
                out.push_str("@ ");
                out.push_str(&pc);
            }
            _ => {}
        }
        out.push('\n');
    }
    out
}

/// Fact-file text for facts of a single predicate.
pub fn fact_file_text(prog: &Program, facts: &[LiftedFact], pcs: &PcStore) -> String {
    let rows = facts
        .iter()
        .map(|f| {
            let cols = f.fact.args.iter().map(|&s| prog.symbols.resolve(s)).collect();
            (cols, Some(pcs.to_text(f.pc)))
        })
        .collect();
    render_fact_rows(rows)
}

pub fn write_fact_file(
    prog: &Program,
    facts: &[LiftedFact],
    pcs: &PcStore,
    path: &Path,
) -> Result<(), LoadError> {
    debug_assert!(facts.windows(2).all(|w| w[0].fact.pred == w[1].fact.pred));
    fs::write(path, fact_file_text(prog, facts, pcs)).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}
