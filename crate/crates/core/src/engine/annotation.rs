use std::fmt::Debug;

use crate::pc::{Pc, PcStore, TextPc};

/// The algebra a fixpoint run carries alongside each fact.
///
/// A derivation's candidate annotation is the conjunction of its premises'
/// annotations. [`admit`](Annotation::admit) decides whether the candidate
/// is kept at all and in which form it is stored; [`merge`](Annotation::merge)
/// folds a candidate into an existing fact and reports whether the stored
/// annotation changed.
pub trait Annotation {
    type Pc: Clone + PartialEq + Debug;

    fn and(&mut self, a: &Self::Pc, b: &Self::Pc) -> Self::Pc;

    fn admit(&mut self, cand: Self::Pc) -> Option<Self::Pc>;

    fn merge(&mut self, stored: &Self::Pc, cand: &Self::Pc) -> Option<Self::Pc>;
}

/// Plain Datalog: a fact is either present or not.
pub struct Plain;

impl Annotation for Plain {
    type Pc = ();

    fn and(&mut self, _: &(), _: &()) {}

    fn admit(&mut self, _: ()) -> Option<()> {
        Some(())
    }

    fn merge(&mut self, _: &(), _: &()) -> Option<()> {
        None
    }
}

/// Canonical BDD conditions with satisfiability filtering.
pub struct BddAnnotation<'a> {
    pub store: &'a mut PcStore,
    pub fm: Option<Pc>,
    pub fm_store: bool,
    pub sat_checks: u64,
    pub sat_failures: u64,
}

impl<'a> BddAnnotation<'a> {
    pub fn new(store: &'a mut PcStore, fm: Option<Pc>, fm_store: bool) -> Self {
        BddAnnotation {
            store,
            fm,
            fm_store,
            sat_checks: 0,
            sat_failures: 0,
        }
    }
}

impl Annotation for BddAnnotation<'_> {
    type Pc = Pc;

    fn and(&mut self, a: &Pc, b: &Pc) -> Pc {
        self.store.and(*a, *b)
    }

    fn admit(&mut self, cand: Pc) -> Option<Pc> {
        let (check, stored) = match self.fm {
            Some(fm) => {
                let with_fm = self.store.and(cand, fm);
                (with_fm, if self.fm_store { with_fm } else { cand })
            }
            None => (cand, cand),
        };
        self.sat_checks += 1;
        if self.store.is_sat(check) {
            Some(stored)
        } else {
            self.sat_failures += 1;
            None
        }
    }

    fn merge(&mut self, stored: &Pc, cand: &Pc) -> Option<Pc> {
        let merged = self.store.or(*stored, *cand);
        (merged != *stored).then_some(merged)
    }
}

/// Textual conditions, no BDD operations and no filtering.
pub struct TextAnnotation {
    pub fm: Option<TextPc>,
}

impl Annotation for TextAnnotation {
    type Pc = TextPc;

    fn and(&mut self, a: &TextPc, b: &TextPc) -> TextPc {
        a.and(b)
    }

    fn admit(&mut self, cand: TextPc) -> Option<TextPc> {
        Some(match &self.fm {
            Some(fm) => cand.and(fm),
            None => cand,
        })
    }

    fn merge(&mut self, stored: &TextPc, cand: &TextPc) -> Option<TextPc> {
        stored.merge(cand)
    }
}
