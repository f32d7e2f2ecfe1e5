//! Variability-aware Datalog.
//!
//! Facts carry presence conditions, propositional formulas over the
//! features of a software product line. One lifted evaluation computes, for
//! every derivable fact, the exact set of products in which plain Datalog
//! evaluation of that product would derive it. [`oracle`] checks this by
//! enumerating configurations and running the plain engine on each.
//!
//! ```
//! use vdatalog_core::prelude::*;
//!
//! let mut pcs = PcStore::new();
//! let prog = parse_program(r#"
//!     .decl edge(x: symbol, y: symbol)
//!     .decl path(x: symbol, y: symbol)
//!     path(x, y) :- edge(x, y).
//!     path(x, z) :- edge(x, y), path(y, z).
//!     edge("1", "2") @ FA.
//!     edge("2", "3") @ FB.
//! "#, &mut pcs).unwrap();
//! let (edb, _) = LiftedEdb::from_lifted_facts(prog.inline_facts().to_vec(), &mut pcs);
//! let (out, _) = lifted_infer(prog.rules(), &edb, &EvalOptions::default(), &mut pcs);
//! let path = prog.predicate("path").unwrap();
//! assert_eq!(out.fact_file_text(path, &prog, &pcs), "1\t2\t@ FA\n1\t3\t@ FA && FB\n2\t3\t@ FB\n");
//! ```

pub mod ast;
pub mod engine;
pub mod frontend;
pub mod oracle;
pub mod pc;

pub mod prelude {
    pub use crate::ast::{Atom, Fact, LiftedFact, Names, PredId, Rule, Substitution, Sym, Term};
    pub use crate::engine::{
        infer, lifted_infer, restrict, EvalOptions, EvalStats, FactSet, LiftedEdb, LiftedOutput,
        SatMode, Strategy,
    };
    pub use crate::frontend::{load_facts_dir, parse_program, FeatureModel, LoadError, Program};
    pub use crate::oracle::{
        enumerate_configs, generate_spl_program, verify_commutation, GeneratorSpec,
        VerificationReport,
    };
    pub use crate::pc::{Configuration, Pc, PcStore};
}
