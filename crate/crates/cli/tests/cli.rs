use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vdatalog_core::frontend::load_fact_file;
use vdatalog_core::prelude::*;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn vdatalog(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vdatalog"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_golden_outputs_and_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let stats = tmp.path().join("stats.json");
    let o = vdatalog(&[
        &"run",
        &data("pointer/pointer.dl"),
        &"--facts",
        &data("pointer/facts"),
        &"--out",
        &out,
        &"--stats",
        &stats,
    ]);
    assert_eq!(code(&o), 0, "{o:?}");
    for name in ["VarPointsTo.csv", "HeapPointsTo.csv"] {
        assert_eq!(
            fs::read_to_string(out.join(name)).unwrap(),
            fs::read_to_string(data("pointer/expected").join(name)).unwrap()
        );
    }
    assert_eq!(fs::read_dir(&out).unwrap().count(), 2);
    let vpt = fs::read_to_string(out.join("VarPointsTo.csv")).unwrap();
    assert_eq!(vpt.lines().count(), 6);

    let raw = fs::read_to_string(&stats).unwrap();
    let keys = [
        "command",
        "program",
        "features",
        "mode",
        "timings",
        "eval",
        "relations",
        "dropped_inputs",
        "output_db_bytes",
        "verification",
        "bench",
    ];
    let at: Vec<usize> = keys
        .iter()
        .map(|k| raw.find(&format!("\n  \"{k}\":")).unwrap())
        .collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "field order");
    let doc: serde_json::Value = serde_json::from_str(&raw).unwrap();
    let total: u64 = doc["relations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["facts"].as_u64().unwrap())
        .sum();
    assert_eq!(total, doc["eval"]["facts_final"].as_u64().unwrap());
    assert_eq!(doc["eval"]["facts_inferred"], 8);
    assert_eq!(doc["features"], 2);
    let hpt = fs::read_to_string(out.join("HeapPointsTo.csv")).unwrap();
    assert_eq!(doc["output_db_bytes"].as_u64().unwrap(), (vpt.len() + hpt.len()) as u64);
}

fn restricted_outputs(dir: &Path) -> Vec<FactSet> {
    let mut pcs = PcStore::new();
    let text = fs::read_to_string(data("pointer/pointer.dl")).unwrap();
    let mut prog = parse_program(&text, &mut pcs).unwrap();
    let mut facts = Vec::new();
    for name in ["VarPointsTo", "HeapPointsTo"] {
        facts.extend(load_fact_file(&mut prog, name, &dir.join(format!("{name}.csv")), &mut pcs).unwrap());
    }
    for f in ["FA", "FB"] {
        pcs.feature(f).unwrap();
    }
    let (db, _) = LiftedEdb::from_lifted_facts(facts, &mut pcs);
    enumerate_configs(&pcs, &FeatureModel::tt())
        .unwrap()
        .iter()
        .map(|rho| restrict(&db, &pcs, rho).unwrap())
        .collect()
}

#[test]
fn no_sat_and_fm_outputs_restrict_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for (i, flags) in [vec![], vec!["--no-sat"], vec!["--naive"], vec!["--no-sat", "--naive"]]
        .into_iter()
        .enumerate()
    {
        let out = tmp.path().join(i.to_string());
        let mut args: Vec<&dyn AsRef<std::ffi::OsStr>> = vec![];
        let program = data("pointer/pointer.dl");
        let facts = data("pointer/facts");
        args.extend([&"run" as &dyn AsRef<_>, &program, &"--facts", &facts, &"--out", &out]);
        for f in &flags {
            args.push(f);
        }
        assert_eq!(code(&vdatalog(&args)), 0);
        dirs.push(out);
    }
    let expected = restricted_outputs(&dirs[0]);
    assert_eq!(expected.len(), 4);
    for d in &dirs[1..] {
        assert_eq!(restricted_outputs(d), expected, "{}", d.display());
    }
}

#[test]
fn feature_model_from_file_or_formula() {
    let tmp = tempfile::tempdir().unwrap();
    let fm_file = tmp.path().join("fm.txt");
    fs::write(&fm_file, "FA\n").unwrap();
    for (i, fm) in [fm_file.to_str().unwrap(), "FA"].into_iter().enumerate() {
        let out = tmp.path().join(i.to_string());
        let o = vdatalog(&[
            &"run",
            &data("pointer/pointer.dl"),
            &"--facts",
            &data("pointer/facts"),
            &"--out",
            &out,
            &"--fm",
            &fm,
        ]);
        assert_eq!(code(&o), 0);
        let vpt = fs::read_to_string(out.join("VarPointsTo.csv")).unwrap();
        assert_eq!(vpt, "o1\tA\no2\tB\no3\tA\t@ FA\n");
    }
    let o = vdatalog(&[
        &"verify",
        &data("pointer/pointer.dl"),
        &"--facts",
        &data("pointer/facts"),
        &"--fm",
        &"FA || FB",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "3 configurations, 0 mismatches");
}

#[test]
fn empty_facts_directory_gives_empty_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let facts = tmp.path().join("facts");
    fs::create_dir(&facts).unwrap();
    let out = tmp.path().join("out");
    let o = vdatalog(&[&"run", &data("pointer/pointer.dl"), &"--facts", &facts, &"--out", &out]);
    assert_eq!(code(&o), 0);
    for name in ["VarPointsTo.csv", "HeapPointsTo.csv"] {
        assert_eq!(fs::read_to_string(out.join(name)).unwrap(), "");
    }
}

#[test]
fn verify_reports_and_exit_codes() {
    let o = vdatalog(&[&"verify", &data("pointer/pointer.dl"), &"--facts", &data("pointer/facts")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "4 configurations, 0 mismatches");

    let two = data("two-derivations/program.dl");
    assert_eq!(code(&vdatalog(&[&"verify", &two])), 0);
    let o = vdatalog(&[&"verify", &two, &"--break-merge"]);
    assert_eq!(code(&o), 3);
    let text = stdout(&o);
    assert!(text.starts_with("2 configurations, 1 mismatches"), "{text}");
    assert!(text.contains("first divergent configuration: !FA"), "{text}");
    assert!(text.contains(r#"only product: q("1")"#), "{text}");

    let tmp = tempfile::tempdir().unwrap();
    let plain = tmp.path().join("plain.dl");
    fs::write(&plain, ".decl e(x: symbol, y: symbol)\n.decl p(x: symbol, y: symbol)\np(x, y) :- e(x, y).\ne(\"1\", \"2\").\n").unwrap();
    let o = vdatalog(&[&"verify", &plain]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "1 configurations, 0 mismatches");
    let out = tmp.path().join("out");
    let stats = tmp.path().join("s.json");
    assert_eq!(code(&vdatalog(&[&"run", &plain, &"--out", &out, &"--stats", &stats])), 0);
    assert_eq!(fs::read_to_string(out.join("p.csv")).unwrap(), "1\t2\n");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["mode"]["plain"], true);
}

#[test]
fn load_and_io_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("missing.dl");
    assert_eq!(code(&vdatalog(&[&"run", &missing, &"--out", &out])), 2);

    let bad = tmp.path().join("bad.dl");
    fs::write(&bad, ".decl e(x: symbol)\np(x) :- e(x).\n").unwrap();
    let o = vdatalog(&[&"run", &bad, &"--out", &out]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("undeclared"));

    let negated = tmp.path().join("neg.dl");
    fs::write(&negated, ".decl e(x: symbol)\n.decl p(x: symbol)\np(x) :- e(x), !e(x).\n").unwrap();
    assert_eq!(code(&vdatalog(&[&"run", &negated, &"--out", &out])), 1);

    let facts = tmp.path().join("facts");
    fs::create_dir(&facts).unwrap();
    fs::write(facts.join("New.facts"), "o1\n").unwrap();
    let o = vdatalog(&[&"run", &data("pointer/pointer.dl"), &"--facts", &facts, &"--out", &out]);
    assert_eq!(code(&o), 1);

    let o = vdatalog(&[
        &"run",
        &data("pointer/pointer.dl"),
        &"--facts",
        &tmp.path().join("nope"),
        &"--out",
        &out,
    ]);
    assert_eq!(code(&o), 2);

    let o = vdatalog(&[
        &"run",
        &data("pointer/pointer.dl"),
        &"--facts",
        &data("pointer/facts"),
        &"--out",
        &out,
        &"--fm",
        &"FA && !FA",
    ]);
    assert_eq!(code(&o), 1);

    assert_eq!(code(&vdatalog(&[&"frobnicate"])), 1);
}

#[test]
fn unsatisfiable_inputs_are_dropped_with_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let facts = tmp.path().join("facts");
    fs::create_dir(&facts).unwrap();
    fs::write(facts.join("New.facts"), "o1\tA\t@ FA && !FA\no2\tB\n").unwrap();
    let out = tmp.path().join("out");
    let o = vdatalog(&[&"run", &data("pointer/pointer.dl"), &"--facts", &facts, &"--out", &out]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dropped 1 input facts"));
    assert_eq!(fs::read_to_string(out.join("VarPointsTo.csv")).unwrap(), "o2\tB\n");
}

#[test]
fn bench_from_spec_file() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("spec.json");
    fs::write(
        &spec,
        r#"[{"num_features": 4, "num_predicates": 3, "num_rules": 4, "num_facts": 30,
             "constant_pool_size": 4, "max_body_atoms": 2, "pc_density": 0.5, "seed": 42}]"#,
    )
    .unwrap();
    let out = tmp.path().join("bench.json");
    let o = vdatalog(&[&"bench", &"--spec", &spec, &"--out", &out, &"--reps", &"1"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rows = doc["bench"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["mismatches"], 0);
    assert_eq!(code(&vdatalog(&[&"bench", &"--suite", &"nope"])), 1);
}
