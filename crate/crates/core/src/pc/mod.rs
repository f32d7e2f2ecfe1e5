//! Presence conditions: propositional formulas over product-line features.
//!
//! [`PcStore`] is the canonical representation: a hash-consed reduced ordered
//! BDD, so two conditions are semantically equal exactly when their [`Pc`]
//! handles are equal and satisfiability is a comparison against the `False`
//! terminal. [`TextPc`] is the string-only representation used when BDD
//! operations are switched off.

mod bdd;
mod formula;
mod text;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use bdd::{Pc, PcStore};
pub use formula::{parse_formula, Formula};
pub use text::{TextPc, TextTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcError {
    #[error("presence condition syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("`{0}` is reserved and cannot name a feature")]
    Reserved(String),
    #[error("`{0}` is not a valid feature name")]
    InvalidName(String),
    #[error("feature `{0}` is not assigned by the configuration")]
    Unassigned(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
}

/// Dense feature identifier; also the BDD variable level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(pub(crate) u32);

impl FeatureId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Feature interner. Ids are handed out in order of first registration.
#[derive(Clone, Debug, Default)]
pub struct FeatureRegistry {
    names: Vec<String>,
    ids: HashMap<String, FeatureId>,
}

impl FeatureRegistry {
    pub fn register(&mut self, name: &str) -> Result<FeatureId, PcError> {
        if let Some(&id) = self.ids.get(name) {
            return Ok(id);
        }
        if name == "True" || name == "False" {
            return Err(PcError::Reserved(name.to_owned()));
        }
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(PcError::InvalidName(name.to_owned()));
        }
        let id = FeatureId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<FeatureId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: FeatureId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (FeatureId(i as u32), n.as_str()))
    }
}

/// A total assignment of truth values to the registered features, indexed
/// by feature id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    values: Vec<bool>,
}

impl Configuration {
    pub fn new(values: Vec<bool>) -> Self {
        Configuration { values }
    }

    /// Build from `(name, value)` pairs. Every registered feature must be
    /// assigned and every name must be registered.
    pub fn from_pairs<'a>(
        features: &FeatureRegistry,
        pairs: impl IntoIterator<Item = (&'a str, bool)>,
    ) -> Result<Self, PcError> {
        let mut values = vec![None; features.len()];
        for (name, v) in pairs {
            let id = features
                .lookup(name)
                .ok_or_else(|| PcError::UnknownFeature(name.to_owned()))?;
            values[id.index()] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| PcError::Unassigned(features.names[i].clone())))
            .collect::<Result<_, _>>()?;
        Ok(Configuration { values })
    }

    pub fn get(&self, f: FeatureId) -> Option<bool> {
        self.values.get(f.index()).copied()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The configuration as a conjunction of literals, e.g. `!FA && FB`.
    pub fn display<'a>(&'a self, features: &'a FeatureRegistry) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Configuration, &'a FeatureRegistry);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.values.is_empty() {
                    return f.write_str("True");
                }
                for (i, v) in self.0.values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    if !v {
                        f.write_str("!")?;
                    }
                    f.write_str(&self.1.names[i])?;
                }
                Ok(())
            }
        }
        D(self, features)
    }
}
