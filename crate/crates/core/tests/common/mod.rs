#![allow(dead_code)]

use proptest::prelude::*;
use vdatalog_core::prelude::{parse_program, Configuration, LiftedEdb, PcStore, Program};

pub const POINTER_PROGRAM: &str = r#"
.decl New(v: symbol, h: symbol)
.decl Assign(to: symbol, from: symbol)
.decl Load(to: symbol, base: symbol, fld: symbol)
.decl Store(base: symbol, fld: symbol, from: symbol)
.decl VarPointsTo(v: symbol, h: symbol)
.decl HeapPointsTo(h: symbol, fld: symbol, target: symbol)
.input New, Assign, Load, Store
.output VarPointsTo, HeapPointsTo
VarPointsTo(v1, h1) :- New(v1, h1).
VarPointsTo(v1, h2) :- Assign(v1, v2), VarPointsTo(v2, h2).
VarPointsTo(v1, h2) :- Load(v1, v2, f), VarPointsTo(v2, h1), HeapPointsTo(h1, f, h2).
HeapPointsTo(h1, f, h2) :- Store(v1, f, v2), VarPointsTo(v1, h1), VarPointsTo(v2, h2).
"#;

pub const ANNOTATED_FACTS: &str = r#"
New("o1", "A").
New("o2", "B").
Assign("o3", "o1") @ FA.
Assign("o3", "o2") @ !FA.
Store("o2", "f", "o1") @ FB.
Store("o2", "f", "o2") @ !FB.
Load("r", "o3", "f").
"#;

pub const PLAIN_FACTS: &str = r#"
New("o1", "A").
New("o2", "B").
Assign("o3", "o2").
Store("o2", "f", "o1").
Load("r", "o3", "f").
"#;

/// Program plus annotated facts, with the input database built.
pub fn pointer(facts: &str) -> (Program, LiftedEdb, PcStore) {
    let mut pcs = PcStore::new();
    let prog = parse_program(&format!("{POINTER_PROGRAM}{facts}"), &mut pcs).unwrap();
    let (edb, dropped) = LiftedEdb::from_lifted_facts(prog.inline_facts().to_vec(), &mut pcs);
    assert_eq!(dropped, 0);
    (prog, edb, pcs)
}

pub const VARS: usize = 4;

/// A store with `F0..F3` registered in index order.
pub fn store4() -> PcStore {
    let mut pcs = PcStore::new();
    for i in 0..VARS {
        pcs.feature(&format!("F{i}")).unwrap();
    }
    pcs
}

/// Bit `m` is the formula's value under assignment `m` (bit `i` of `m` is `Fi`).
pub fn truth_table(pcs: &mut PcStore, text: &str) -> u16 {
    let f = pcs.parse_formula(text).unwrap();
    let mut tt = 0;
    for m in 0..1u16 << VARS {
        let bits: Vec<bool> = (0..VARS).map(|i| m >> i & 1 == 1).collect();
        if f.eval_bits(&bits) {
            tt |= 1 << m;
        }
    }
    tt
}

pub fn config(m: u16) -> Configuration {
    Configuration::new((0..VARS).map(|i| m >> i & 1 == 1).collect())
}

/// Formula text of depth at most 4 over `F0..F3`.
pub fn formula() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        8 => (0..VARS).prop_map(|i| format!("F{i}")),
        1 => Just("True".to_owned()),
        1 => Just("False".to_owned()),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| format!("!{a}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} && {b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("({a} || {b})")),
        ]
    })
}
