mod common;

use std::collections::BTreeSet;

use vdatalog_core::engine::{audit_fixpoint, infer, infer_reference, lifted_infer, EvalOptions, LiftedOutput};
use vdatalog_core::frontend::{parse_program, FeatureModel};
use vdatalog_core::oracle::{
    enumerate_configs, generate_spl_program, inline_edb, verify_commutation, GeneratorSpec,
};
use vdatalog_core::pc::PcStore;

#[test]
fn generated_programs_commute() {
    for seed in 0..120 {
        let spec = GeneratorSpec::sample(seed);
        let mut pcs = PcStore::new();
        let (prog, fm) = generate_spl_program(&spec, &mut pcs).unwrap();
        let edb = inline_edb(&prog, &mut pcs);
        for opts in [EvalOptions::default(), EvalOptions::default().with_fm(fm)] {
            let r = verify_commutation(&prog, &edb, &opts, &mut pcs).unwrap();
            assert!(r.verified(), "seed {seed}: {:?}", r.mismatches.first());
            let out = lifted_infer(prog.rules(), &edb, &opts, &mut pcs).0;
            assert!(audit_fixpoint(prog.rules(), out.as_bdd().unwrap(), &opts, &mut pcs));
        }
    }
}

#[test]
fn compiled_engine_matches_reference() {
    for seed in 200..260 {
        let spec = GeneratorSpec::sample(seed);
        let mut pcs = PcStore::new();
        let (prog, _) = generate_spl_program(&spec, &mut pcs).unwrap();
        let facts: Vec<_> = prog.inline_facts().iter().map(|f| f.fact.clone()).collect();
        assert_eq!(
            infer(prog.rules(), facts.clone()),
            infer_reference(prog.rules(), facts),
            "seed {seed}"
        );
    }
}

#[test]
fn featureless_programs_equal_plain_inference() {
    for seed in 0..40 {
        let spec = GeneratorSpec {
            num_features: 0,
            ..GeneratorSpec::sample(seed)
        };
        let mut pcs = PcStore::new();
        let (prog, _) = generate_spl_program(&spec, &mut pcs).unwrap();
        let edb = inline_edb(&prog, &mut pcs);
        let (out, _) = lifted_infer(prog.rules(), &edb, &EvalOptions::default(), &mut pcs);
        assert!(out.as_bdd().unwrap().iter().all(|(_, &p)| p == pcs.tt()));
        assert_eq!(out.facts(), infer(prog.rules(), edb.facts()));
    }
}

#[test]
fn rule_free_program_restricts_inputs() {
    let mut pcs = PcStore::new();
    let prog = parse_program(
        ".decl e(x: symbol)\ne(\"1\") @ FA.\ne(\"2\") @ FA && FB.\ne(\"3\").\n",
        &mut pcs,
    )
    .unwrap();
    let edb = inline_edb(&prog, &mut pcs);
    let r = verify_commutation(&prog, &edb, &EvalOptions::default(), &mut pcs).unwrap();
    assert_eq!(r.summary(), "4 configurations, 0 mismatches");
}

#[test]
fn broken_merge_is_caught() {
    let mut pcs = PcStore::new();
    let prog = parse_program(
        r#"
        .decl a(x: symbol)
        .decl b(x: symbol)
        .decl q(x: symbol)
        q(x) :- a(x).
        q(x) :- b(x).
        a("1") @ FA.
        b("1") @ !FA.
        "#,
        &mut pcs,
    )
    .unwrap();
    let edb = inline_edb(&prog, &mut pcs);
    let opts = EvalOptions {
        break_merge: true,
        ..Default::default()
    };
    let r = verify_commutation(&prog, &edb, &opts, &mut pcs).unwrap();
    assert_eq!(r.mismatches.len(), 1);
    assert_eq!(r.mismatches[0].only_product, [r#"q("1")"#]);
}

#[test]
fn enumeration_matches_truth_table_count() {
    for seed in 0..60 {
        let spec = GeneratorSpec::sample(seed);
        let mut pcs = PcStore::new();
        let (_, fm) = generate_spl_program(&spec, &mut pcs).unwrap();
        let n = pcs.features().len();
        let count = (0..1u32 << n)
            .filter(|m| {
                let values = (0..n).map(|i| m >> i & 1 == 1).collect();
                pcs.eval(fm.formula, &vdatalog_core::pc::Configuration::new(values)).unwrap()
            })
            .count();
        assert_eq!(enumerate_configs(&pcs, &fm).unwrap().len(), count);
    }
    let mut pcs = PcStore::new();
    let fm = FeatureModel::parse("FA", &mut pcs).unwrap();
    let cfgs = enumerate_configs(&pcs, &fm).unwrap();
    assert_eq!(cfgs.len(), 1);
    assert_eq!(cfgs[0].values(), [true]);
}

#[test]
fn modes_agree_on_valid_configurations() {
    for seed in 300..360 {
        let spec = GeneratorSpec::sample(seed);
        let mut pcs = PcStore::new();
        let (prog, fm) = generate_spl_program(&spec, &mut pcs).unwrap();
        let edb = inline_edb(&prog, &mut pcs);
        let runs: Vec<LiftedOutput> = [
            EvalOptions::default(),
            EvalOptions::default().no_sat(),
            EvalOptions::default().with_fm(fm),
            EvalOptions { fm_store: true, ..EvalOptions::default().with_fm(fm) },
            EvalOptions { fm_store: true, ..EvalOptions::default().with_fm(fm).no_sat() },
        ]
        .iter()
        .map(|o| lifted_infer(prog.rules(), &edb, o, &mut pcs).0)
        .collect();
        for rho in enumerate_configs(&pcs, &fm).unwrap() {
            let sets: BTreeSet<_> = runs.iter().map(|o| o.restrict(&pcs, &rho).unwrap()).collect();
            assert_eq!(sets.len(), 1, "seed {seed}");
        }
        for (_, &p) in runs[2].as_bdd().unwrap().iter() {
            let both = pcs.and(p, fm.formula);
            assert!(pcs.is_sat(both));
        }
        assert!(runs[2].len() <= runs[0].len());
    }
}
