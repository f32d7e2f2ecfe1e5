use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::ast::{Fact, PredId, Sym};

/// Hash index on a fixed list of columns.
#[derive(Clone, Debug)]
pub(crate) struct Index {
    pub(crate) cols: Vec<usize>,
    pub(crate) map: FxHashMap<Box<[Sym]>, Vec<u32>>,
}

impl Index {
    fn key(&self, tuple: &[Sym]) -> Box<[Sym]> {
        self.cols.iter().map(|&c| tuple[c]).collect()
    }
}

/// All tuples of one predicate, each with its annotation. Row ids are
/// stable: rows are only appended or have their annotation replaced.
#[derive(Clone, Debug)]
pub struct Relation<P> {
    rows: Vec<(Box<[Sym]>, P)>,
    lookup: FxHashMap<Box<[Sym]>, u32>,
    indexes: Vec<Index>,
}

impl<P> Default for Relation<P> {
    fn default() -> Self {
        Relation {
            rows: Vec::new(),
            lookup: FxHashMap::default(),
            indexes: Vec::new(),
        }
    }
}

impl<P> Relation<P> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[Sym], &P)> {
        self.rows.iter().map(|(t, p)| (&t[..], p))
    }

    pub(crate) fn row(&self, id: u32) -> (&[Sym], &P) {
        let (t, p) = &self.rows[id as usize];
        (t, p)
    }

    pub(crate) fn row_count(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn get(&self, tuple: &[Sym]) -> Option<&P> {
        self.lookup.get(tuple).map(|&i| &self.rows[i as usize].1)
    }

    pub(crate) fn find(&self, tuple: &[Sym]) -> Option<u32> {
        self.lookup.get(tuple).copied()
    }

    pub(crate) fn set_pc(&mut self, id: u32, pc: P) {
        self.rows[id as usize].1 = pc;
    }

    pub(crate) fn push(&mut self, tuple: Box<[Sym]>, pc: P) -> u32 {
        let id = self.rows.len() as u32;
        for ix in &mut self.indexes {
            let key = ix.key(&tuple);
            ix.map.entry(key).or_default().push(id);
        }
        self.lookup.insert(tuple.clone(), id);
        self.rows.push((tuple, pc));
        id
    }

    /// Id of an index on `cols`, building it on first request.
    pub(crate) fn ensure_index(&mut self, cols: &[usize]) -> usize {
        if let Some(i) = self.indexes.iter().position(|ix| ix.cols == cols) {
            return i;
        }
        let mut ix = Index {
            cols: cols.to_vec(),
            map: FxHashMap::default(),
        };
        for (id, (t, _)) in self.rows.iter().enumerate() {
            let key = ix.key(t);
            ix.map.entry(key).or_default().push(id as u32);
        }
        self.indexes.push(ix);
        self.indexes.len() - 1
    }

    pub(crate) fn probe(&self, index: usize, key: &[Sym]) -> &[u32] {
        self.indexes[index].map.get(key).map_or(&[], |v| v.as_slice())
    }
}

/// A fact store keyed by predicate; each ground fact occurs at most once.
/// `P` is the annotation: a BDD handle, a textual condition, or `()` for
/// plain Datalog.
#[derive(Clone, Debug)]
pub struct LiftedDb<P> {
    relations: Vec<Relation<P>>,
}

impl<P> Default for LiftedDb<P> {
    fn default() -> Self {
        LiftedDb {
            relations: Vec::new(),
        }
    }
}

impl<P> LiftedDb<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn relation(&self, pred: PredId) -> Option<&Relation<P>> {
        self.relations.get(pred.index())
    }

    pub(crate) fn relation_mut(&mut self, pred: PredId) -> &mut Relation<P> {
        if self.relations.len() <= pred.index() {
            self.relations.resize_with(pred.index() + 1, Relation::default);
        }
        &mut self.relations[pred.index()]
    }

    pub fn len(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, fact: &Fact) -> Option<&P> {
        self.relation(fact.pred)?.get(&fact.args)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.get(fact).is_some()
    }

    /// Every stored fact with its annotation, in predicate then insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (Fact, &P)> {
        self.relations.iter().enumerate().flat_map(|(i, rel)| {
            rel.rows()
                .map(move |(t, p)| (Fact::new(PredId(i as u32), t.to_vec()), p))
        })
    }

    pub fn predicates(&self) -> impl Iterator<Item = (PredId, &Relation<P>)> {
        self.relations
            .iter()
            .enumerate()
            .map(|(i, r)| (PredId(i as u32), r))
    }

    /// Insert `fact`, or combine with the stored annotation via `merge`.
    pub fn upsert(&mut self, fact: Fact, pc: P, merge: impl FnOnce(&P, P) -> P) {
        let rel = self.relation_mut(fact.pred);
        match rel.find(&fact.args) {
            Some(id) => {
                let merged = merge(&rel.rows[id as usize].1, pc);
                rel.set_pc(id, merged);
            }
            None => {
                rel.push(fact.args, pc);
            }
        }
    }

    /// Remove a fact. Rebuilds the relation, so row ids change.
    pub fn remove(&mut self, fact: &Fact) -> Option<P> {
        let rel = self.relations.get_mut(fact.pred.index())?;
        let id = rel.find(&fact.args)?;
        let old = std::mem::take(rel);
        let mut removed = None;
        for (i, (t, p)) in old.rows.into_iter().enumerate() {
            if i as u32 == id {
                removed = Some(p);
            } else {
                rel.push(t, p);
            }
        }
        removed
    }

    pub fn map<Q>(&self, mut f: impl FnMut(&P) -> Q) -> LiftedDb<Q> {
        let mut out = LiftedDb::new();
        for (pred, rel) in self.predicates() {
            let dst = out.relation_mut(pred);
            for (t, p) in rel.rows() {
                dst.push(t.into(), f(p));
            }
        }
        out
    }

    pub fn facts(&self) -> BTreeSet<Fact> {
        self.iter().map(|(f, _)| f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexes_track_later_inserts() {
        let mut db: LiftedDb<u8> = LiftedDb::new();
        let p = PredId(1);
        db.upsert(Fact::new(p, vec![Sym(1), Sym(2)]), 1, |_, n| n);
        let rel = db.relation_mut(p);
        let ix = rel.ensure_index(&[0]);
        rel.push(vec![Sym(1), Sym(3)].into(), 2);
        rel.push(vec![Sym(2), Sym(3)].into(), 3);
        assert_eq!(rel.probe(ix, &[Sym(1)]), &[0, 1]);
        assert_eq!(rel.ensure_index(&[0]), ix);
        assert_eq!(db.len(), 3);
        db.upsert(Fact::new(p, vec![Sym(1), Sym(2)]), 5, |a, b| a + b);
        assert_eq!(db.get(&Fact::new(p, vec![Sym(1), Sym(2)])), Some(&6));
        assert_eq!(db.remove(&Fact::new(p, vec![Sym(1), Sym(3)])), Some(2));
        assert_eq!(db.len(), 2);
        assert!(db.relation(PredId(0)).unwrap().is_empty());
    }
}
