//! Propositional formulas over features: AST, parser and evaluation.
//!
//! Concrete syntax: feature identifiers, the literals `True` / `False`,
//! `!` (binds tightest), `&&`, `||` (binds loosest) and parentheses.
//! `&` and `|` are accepted as aliases on input.

use std::fmt;

use super::{Configuration, FeatureId, FeatureRegistry, PcError};

/// A parsed presence-condition formula. Variables are resolved to dense
/// feature ids at parse time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Var(FeatureId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Evaluate under a configuration. Fails on the first variable the
    /// configuration does not assign.
    pub fn eval(&self, cfg: &Configuration, features: &FeatureRegistry) -> Result<bool, PcError> {
        Ok(match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => cfg
                .get(*v)
                .ok_or_else(|| PcError::Unassigned(features.name(*v).to_owned()))?,
            Formula::Not(f) => !f.eval(cfg, features)?,
            Formula::And(a, b) => a.eval(cfg, features)? && b.eval(cfg, features)?,
            Formula::Or(a, b) => a.eval(cfg, features)? || b.eval(cfg, features)?,
        })
    }

    /// Evaluate with a plain bit vector indexed by feature id. Missing ids
    /// read as `false`.
    pub fn eval_bits(&self, bits: &[bool]) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => bits.get(v.index()).copied().unwrap_or(false),
            Formula::Not(f) => !f.eval_bits(bits),
            Formula::And(a, b) => a.eval_bits(bits) && b.eval_bits(bits),
            Formula::Or(a, b) => a.eval_bits(bits) || b.eval_bits(bits),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Render with the minimal parentheses needed to parse back to the same tree.
    pub fn display<'a>(&'a self, features: &'a FeatureRegistry) -> impl fmt::Display + 'a {
        DisplayFormula {
            formula: self,
            features,
        }
    }
}

struct DisplayFormula<'a> {
    formula: &'a Formula,
    features: &'a FeatureRegistry,
}

impl DisplayFormula<'_> {
    fn prec(f: &Formula) -> u8 {
        match f {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |g: &Formula, min: u8, out: &mut fmt::Formatter<'_>| {
            if Self::prec(g) < min {
                out.write_str("(")?;
                self.write(g, out)?;
                out.write_str(")")
            } else {
                self.write(g, out)
            }
        };
        match f {
            Formula::Const(true) => out.write_str("True"),
            Formula::Const(false) => out.write_str("False"),
            Formula::Var(v) => out.write_str(self.features.name(*v)),
            Formula::Not(g) => {
                out.write_str("!")?;
                child(g, 3, out)
            }
            // Both operators parse left-associatively, so a right child of
            // equal precedence needs parentheses to keep the tree shape.
            Formula::And(a, b) => {
                child(a, 2, out)?;
                out.write_str(" && ")?;
                child(b, 3, out)
            }
            Formula::Or(a, b) => {
                child(a, 1, out)?;
                out.write_str(" || ")?;
                child(b, 2, out)
            }
        }
    }
}

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.formula, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok<'s> {
    Ident(&'s str),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok<'_>)>, PcError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'!' => {
                toks.push((i, Tok::Not));
                i += 1;
            }
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'&' | b'|' => {
                let tok = if c == b'&' { Tok::And } else { Tok::Or };
                toks.push((i, tok));
                i += if bytes.get(i + 1) == Some(&c) { 2 } else { 1 };
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(&text[start..i])));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(PcError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'s, 'r> {
    toks: Vec<(usize, Tok<'s>)>,
    at: usize,
    end: usize,
    features: &'r mut FeatureRegistry,
}

impl<'s> Parser<'s, '_> {
    fn peek(&self) -> Option<&Tok<'s>> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PcError> {
        Err(PcError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn or(&mut self) -> Result<Formula, PcError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, PcError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, PcError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(!self.unary()?)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.at += 1;
                Ok(inner)
            }
            Some(Tok::Ident("True")) => {
                self.at += 1;
                Ok(Formula::Const(true))
            }
            Some(Tok::Ident("False")) => {
                self.at += 1;
                Ok(Formula::Const(false))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(Formula::Var(self.features.register(name)?))
            }
            Some(_) => self.err("expected a feature, literal, `!` or `(`"),
            None => self.err("unexpected end of formula"),
        }
    }
}

/// Parse a formula, registering unseen feature names in first-appearance order.
pub fn parse_formula(text: &str, features: &mut FeatureRegistry) -> Result<Formula, PcError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        features,
    };
    let f = p.or()?;
    if p.at != p.toks.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}
