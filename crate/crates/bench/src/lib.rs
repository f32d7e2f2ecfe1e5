//! Fixtures shared by the benchmarks.

use vdatalog_core::engine::{infer, restrict, FactSet};
use vdatalog_core::oracle::{enumerate_configs, inline_edb, scaling_source, SCALING_CHAIN};
use vdatalog_core::prelude::*;

pub struct Fixture {
    pub prog: Program,
    pub edb: LiftedEdb,
    pub pcs: PcStore,
    pub configs: Vec<Configuration>,
}

/// The scaling program with `features` features.
pub fn scaling(features: usize) -> Fixture {
    let mut pcs = PcStore::new();
    let prog = parse_program(&scaling_source(features, SCALING_CHAIN), &mut pcs)
        .expect("scaling program loads");
    let edb = inline_edb(&prog, &mut pcs);
    let configs = enumerate_configs(&pcs, &FeatureModel::tt()).expect("enumerable");
    Fixture {
        prog,
        edb,
        pcs,
        configs,
    }
}

impl Fixture {
    /// One lifted run on a copy of the condition store.
    pub fn lifted(&self, opts: &EvalOptions) -> usize {
        let mut pcs = self.pcs.clone();
        lifted_infer(self.prog.rules(), &self.edb, opts, &mut pcs).0.len()
    }

    /// Plain inference over every product.
    pub fn brute_force(&self) -> usize {
        self.configs
            .iter()
            .map(|rho| self.product(rho).len())
            .sum()
    }

    pub fn product(&self, rho: &Configuration) -> FactSet {
        let input = restrict(&self.edb, &self.pcs, rho).expect("total configuration");
        infer(self.prog.rules(), input)
    }
}
