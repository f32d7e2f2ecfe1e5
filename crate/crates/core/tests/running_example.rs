mod common;

use std::collections::BTreeSet;

use common::{pointer, ANNOTATED_FACTS, PLAIN_FACTS};
use vdatalog_core::engine::audit_fixpoint;
use vdatalog_core::prelude::*;

fn pc_of(out: &LiftedOutput, prog: &mut Program, pred: &str, args: &[&str]) -> Option<Pc> {
    let p = prog.predicate(pred).unwrap();
    let f = prog.fact(p, args);
    out.as_bdd().unwrap().get(&f).copied()
}

#[test]
fn lifted_result_matches_golden_conditions() {
    let (mut prog, edb, mut pcs) = pointer(ANNOTATED_FACTS);
    let (out, stats) = lifted_infer(prog.rules(), &edb, &EvalOptions::default(), &mut pcs);
    assert_eq!(out.len(), 15);
    assert_eq!(stats.facts_inferred, 8);
    let golden = [
        ("VarPointsTo", ["o1", "A"], "True"),
        ("VarPointsTo", ["o2", "B"], "True"),
        ("VarPointsTo", ["o3", "A"], "FA"),
        ("VarPointsTo", ["o3", "B"], "!FA"),
        ("VarPointsTo", ["r", "A"], "!FA && FB"),
        ("VarPointsTo", ["r", "B"], "!FA && !FB"),
    ];
    for (pred, args, pc) in golden {
        let want = pcs.parse(pc).unwrap();
        assert_eq!(pc_of(&out, &mut prog, pred, &args), Some(want), "{pred}{args:?}");
    }
    for (to, pc) in [("A", "FB"), ("B", "!FB")] {
        let want = pcs.parse(pc).unwrap();
        assert_eq!(pc_of(&out, &mut prog, "HeapPointsTo", &["B", "f", to]), Some(want));
    }
    assert!(audit_fixpoint(prog.rules(), out.as_bdd().unwrap(), &EvalOptions::default(), &mut pcs));
}

#[test]
fn restriction_matches_single_product() {
    let (mut prog, edb, mut pcs) = pointer(ANNOTATED_FACTS);
    let (out, _) = lifted_infer(prog.rules(), &edb, &EvalOptions::default(), &mut pcs);
    let rho = Configuration::from_pairs(pcs.features(), [("FA", false), ("FB", true)]).unwrap();
    let restricted = out.restrict(&pcs, &rho).unwrap();

    let (plain_prog, plain_edb, _) = pointer(PLAIN_FACTS);
    let plain = infer(plain_prog.rules(), plain_edb.facts());
    let derived: BTreeSet<String> = plain
        .difference(&plain_edb.facts())
        .map(|f| f.display(&plain_prog).to_string())
        .collect();
    let expected: BTreeSet<String> = [
        r#"VarPointsTo("o1", "A")"#,
        r#"VarPointsTo("o2", "B")"#,
        r#"VarPointsTo("o3", "B")"#,
        r#"HeapPointsTo("B", "f", "A")"#,
        r#"VarPointsTo("r", "A")"#,
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(derived, expected);
    let restricted: BTreeSet<String> = restricted
        .iter()
        .map(|f| f.display(&prog).to_string())
        .collect();
    let plain: BTreeSet<String> = plain.iter().map(|f| f.display(&plain_prog).to_string()).collect();
    assert_eq!(restricted, plain);

    let both = Configuration::from_pairs(pcs.features(), [("FA", true), ("FB", true)]).unwrap();
    let facts = out.restrict(&pcs, &both).unwrap();
    let vpt = prog.predicate("VarPointsTo").unwrap();
    assert!(facts.contains(&prog.fact(vpt, &["o3", "A"])));
    assert!(!facts.contains(&prog.fact(vpt, &["o3", "B"])));
}

#[test]
fn oracle_accepts_running_example() {
    let (prog, edb, mut pcs) = pointer(ANNOTATED_FACTS);
    for opts in [
        EvalOptions::default(),
        EvalOptions::default().no_sat(),
        EvalOptions::default().naive(),
    ] {
        let report = verify_commutation(&prog, &edb, &opts, &mut pcs).unwrap();
        assert_eq!(report.summary(), "4 configurations, 0 mismatches");
    }
}

#[test]
fn audit_is_closure_only() {
    let (mut prog, edb, mut pcs) = pointer(ANNOTATED_FACTS);
    let opts = EvalOptions::default();
    let (out, _) = lifted_infer(prog.rules(), &edb, &opts, &mut pcs);
    let db = out.as_bdd().unwrap();
    let vpt = prog.predicate("VarPointsTo").unwrap();

    let mut missing = db.clone();
    missing.remove(&prog.fact(vpt, &["r", "A"]));
    assert!(!audit_fixpoint(prog.rules(), &missing, &opts, &mut pcs));

    let mut weakened = db.clone();
    weakened.upsert(prog.fact(vpt, &["o3", "A"]), Pc::TRUE, |_, n| n);
    assert!(audit_fixpoint(prog.rules(), &weakened, &opts, &mut pcs));
}

#[test]
fn input_conditions_only_grow() {
    let (prog, edb, mut pcs) = pointer(ANNOTATED_FACTS);
    let (out, _) = lifted_infer(prog.rules(), &edb, &EvalOptions::default(), &mut pcs);
    let db = out.as_bdd().unwrap();
    for (f, &p) in edb.iter() {
        let q = *db.get(&f).expect("input fact survives");
        assert_eq!(pcs.or(p, q), q);
    }
    let facts: Vec<_> = db.iter().map(|(f, _)| f).collect();
    let unique: BTreeSet<_> = facts.iter().collect();
    assert_eq!(facts.len(), unique.len());
}
