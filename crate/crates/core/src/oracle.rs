//! Brute-force checking of lifted evaluation, and the random product-line
//! program generator used by the property tests and benchmarks.
//!
//! [`verify_commutation`] runs the lifted engine once, then for every valid
//! configuration restricts the input, runs plain inference and compares the
//! result with the restricted lifted output. The per-product side never
//! touches a condition beyond restriction.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Names, PredId, Rule};
use crate::engine::{
    infer, lifted_infer, restrict, EvalOptions, EvalStats, FactSet, LiftedEdb, LiftedOutput,
};
use crate::frontend::{parse_program, render_fact_rows, FeatureModel, LoadError, Program};
use crate::pc::{Configuration, PcError, PcStore};

/// Largest feature count [`enumerate_configs`] accepts by default.
pub const GUARD_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{features} features exceed the enumeration limit of {limit}")]
    GuardLimit { features: usize, limit: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Pc(#[from] PcError),
}

/// Every total assignment to the registered features that satisfies `fm`,
/// in lexicographic order (feature 0 most significant, `false` first).
pub fn enumerate_configs(pcs: &PcStore, fm: &FeatureModel) -> Result<Vec<Configuration>, OracleError> {
    enumerate_configs_limited(pcs, fm, GUARD_LIMIT)
}

pub fn enumerate_configs_limited(
    pcs: &PcStore,
    fm: &FeatureModel,
    limit: usize,
) -> Result<Vec<Configuration>, OracleError> {
    let n = pcs.features().len();
    if n > limit {
        return Err(OracleError::GuardLimit { features: n, limit });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let values = (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect();
        let cfg = Configuration::new(values);
        if pcs.eval(fm.formula, &cfg)? {
            out.push(cfg);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub configuration: String,
    pub only_lifted: Vec<String>,
    pub only_product: Vec<String>,
}

/// Outcome of a brute-force comparison. Times are in nanoseconds; the
/// product side is the sum over all valid configurations.
#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub features: usize,
    pub configurations_checked: u64,
    pub mismatches: Vec<Mismatch>,
    pub lifted: EvalStats,
    pub lifted_time_ns: u64,
    pub product_time_ns: u64,
    pub product_facts: u64,
    pub lifted_db_bytes: u64,
    pub product_db_bytes: u64,
    pub speedup: f64,
    pub space_savings: f64,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} configurations, {} mismatches",
            self.configurations_checked,
            self.mismatches.len()
        )
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    num as f64 / den.max(1) as f64
}

/// Bytes of a plain fact set written as fact files.
pub fn plain_db_bytes(facts: &FactSet, prog: &Program) -> u64 {
    let mut total = 0;
    let mut it = facts.iter().peekable();
    while let Some(first) = it.peek() {
        let pred = first.pred;
        let mut rows = Vec::new();
        while let Some(f) = it.next_if(|f| f.pred == pred) {
            rows.push((f.args.iter().map(|&s| prog.symbol(s)).collect(), None));
        }
        total += render_fact_rows(rows).len() as u64;
    }
    total
}

fn min_time<T>(reps: usize, mut run: impl FnMut() -> T) -> (T, Duration) {
    let start = Instant::now();
    let mut out = run();
    let mut best = start.elapsed();
    for _ in 1..reps {
        let start = Instant::now();
        out = run();
        best = best.min(start.elapsed());
    }
    (out, best)
}

/// Check that restricting the lifted result to each valid configuration
/// equals plain inference over the restricted input.
pub fn verify_commutation(
    prog: &Program,
    edb: &LiftedEdb,
    opts: &EvalOptions,
    pcs: &mut PcStore,
) -> Result<VerificationReport, OracleError> {
    verify_timed(prog, edb, opts, pcs, 1)
}

/// [`verify_commutation`] with each timed run repeated `reps` times and the
/// minimum kept; the cheap lifted run is repeated at least five times.
/// Lifted repetitions run on a fresh copy of the store so that warm
/// operation caches do not flatter the later runs.
pub fn verify_timed(
    prog: &Program,
    edb: &LiftedEdb,
    opts: &EvalOptions,
    pcs: &mut PcStore,
    reps: usize,
) -> Result<VerificationReport, OracleError> {
    let fm = opts.fm.unwrap_or_else(FeatureModel::tt);
    let configs = enumerate_configs(pcs, &fm)?;
    let rules = prog.rules();

    let snapshot = pcs.clone();
    let (_, lifted_time) = min_time(reps.max(5), || {
        let mut scratch = snapshot.clone();
        lifted_infer(rules, edb, opts, &mut scratch)
    });
    let (out, lifted) = lifted_infer(rules, edb, opts, pcs);

    let mut report = VerificationReport {
        features: pcs.features().len(),
        configurations_checked: configs.len() as u64,
        lifted_time_ns: lifted_time.as_nanos() as u64,
        lifted_db_bytes: out.db_bytes(prog, pcs),
        lifted,
        ..Default::default()
    };
    let mut product_time = Duration::ZERO;
    for rho in &configs {
        let (product, t) = min_time(reps, || product_run(rules, edb, pcs, rho));
        let product = product?;
        product_time += t;
        report.product_facts += product.len() as u64;
        report.product_db_bytes += plain_db_bytes(&product, prog);
        if let Some(m) = compare(&out, &product, prog, pcs, rho)? {
            report.mismatches.push(m);
        }
    }
    report.product_time_ns = product_time.as_nanos() as u64;
    report.lifted.db_bytes = report.lifted_db_bytes;
    report.speedup = ratio(report.product_time_ns, report.lifted_time_ns);
    report.space_savings = ratio(report.product_db_bytes, report.lifted_db_bytes);
    Ok(report)
}

fn product_run(
    rules: &[Rule],
    edb: &LiftedEdb,
    pcs: &PcStore,
    rho: &Configuration,
) -> Result<FactSet, PcError> {
    Ok(infer(rules, restrict(edb, pcs, rho)?))
}

fn compare(
    lifted: &LiftedOutput,
    product: &FactSet,
    prog: &Program,
    pcs: &PcStore,
    rho: &Configuration,
) -> Result<Option<Mismatch>, PcError> {
    let restricted = lifted.restrict(pcs, rho)?;
    if &restricted == product {
        return Ok(None);
    }
    let show = |s: &mut dyn Iterator<Item = &crate::ast::Fact>| {
        s.map(|f| f.display(prog).to_string()).collect::<Vec<_>>()
    };
    Ok(Some(Mismatch {
        configuration: rho.display(pcs.features()).to_string(),
        only_lifted: show(&mut restricted.difference(product)),
        only_product: show(&mut product.difference(&restricted)),
    }))
}

// ---------------------------------------------------------------------------
// Generator

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub num_features: usize,
    pub num_predicates: usize,
    pub num_rules: usize,
    pub num_facts: usize,
    pub constant_pool_size: usize,
    pub max_body_atoms: usize,
    /// Probability that a fact gets a random condition instead of `True`.
    pub pc_density: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    /// A random spec within the property-suite bounds: at most 6 features,
    /// 5 predicates, 6 rules and 50 facts.
    pub fn sample(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GeneratorSpec {
            num_features: rng.gen_range(0..=6),
            num_predicates: rng.gen_range(1..=5),
            num_rules: rng.gen_range(1..=6),
            num_facts: rng.gen_range(1..=50),
            constant_pool_size: rng.gen_range(2..=5),
            max_body_atoms: rng.gen_range(1..=3),
            pc_density: rng.gen_range(0.0..=1.0),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |m: &str| Err(OracleError::InvalidSpec(m.to_owned()));
        if self.num_predicates == 0 || self.constant_pool_size == 0 || self.max_body_atoms == 0 {
            return bad("predicate, constant and body-atom counts must be positive");
        }
        if !(0.0..=1.0).contains(&self.pc_density) {
            return bad("pc_density must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Generated program text and feature-model text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedSource {
    pub program: String,
    pub feature_model: String,
}

const MAX_ARITY: usize = 3;

fn random_formula(rng: &mut ChaCha8Rng, features: usize, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return format!("F{}", rng.gen_range(0..features));
    }
    match rng.gen_range(0..3) {
        0 => format!("!{}", random_formula(rng, features, depth - 1)),
        op => {
            let a = random_formula(rng, features, depth - 1);
            let b = random_formula(rng, features, depth - 1);
            let sym = if op == 1 { "&&" } else { "||" };
            format!("({a} {sym} {b})")
        }
    }
}

/// Deterministic program text for `spec`. Rules are range-restricted by
/// construction: head variables are drawn from the body's variables.
pub fn generate_spl_source(spec: &GeneratorSpec) -> Result<GeneratedSource, OracleError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let arities: Vec<usize> = (0..spec.num_predicates)
        .map(|_| rng.gen_range(1..=MAX_ARITY))
        .collect();
    let consts: Vec<String> = (0..spec.constant_pool_size).map(|i| format!("c{i}")).collect();
    let nf = spec.num_features;

    let mut text = String::new();
    // Pin the feature order so that it does not depend on which features
    // happen to occur first.
    if nf > 0 {
        let names: Vec<String> = (0..nf).map(|i| format!("F{i}")).collect();
        let _ = writeln!(text, "// features: {}", names.join(" "));
    }
    for (i, &a) in arities.iter().enumerate() {
        let cols: Vec<String> = (0..a).map(|c| format!("a{c}: symbol")).collect();
        let _ = writeln!(text, ".decl P{i}({})", cols.join(", "));
    }

    for _ in 0..spec.num_rules {
        let nbody = rng.gen_range(1..=spec.max_body_atoms);
        let mut vars: Vec<String> = Vec::new();
        let mut body = Vec::new();
        for _ in 0..nbody {
            let p = rng.gen_range(0..spec.num_predicates);
            let args: Vec<String> = (0..arities[p])
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        format!("\"{}\"", consts.choose(&mut rng).unwrap())
                    } else {
                        let v = format!("x{}", rng.gen_range(0..3));
                        if !vars.contains(&v) {
                            vars.push(v.clone());
                        }
                        v
                    }
                })
                .collect();
            body.push(format!("P{p}({})", args.join(", ")));
        }
        let h = rng.gen_range(spec.num_predicates / 2..spec.num_predicates);
        let head: Vec<String> = (0..arities[h])
            .map(|_| match vars.choose(&mut rng) {
                Some(v) if !rng.gen_bool(0.1) => v.clone(),
                _ => format!("\"{}\"", consts.choose(&mut rng).unwrap()),
            })
            .collect();
        let _ = writeln!(text, "P{h}({}) :- {}.", head.join(", "), body.join(", "));
    }

    // Facts favour the lower half of the predicates and rule heads the
    // upper half, so that most rules have something to derive.
    let fact_preds = spec.num_predicates.div_ceil(2);
    for _ in 0..spec.num_facts {
        let p = rng.gen_range(0..fact_preds);
        let args: Vec<String> = (0..arities[p])
            .map(|_| format!("\"{}\"", consts.choose(&mut rng).unwrap()))
            .collect();
        let _ = write!(text, "P{p}({})", args.join(", "));
        if nf > 0 && rng.gen_bool(spec.pc_density) {
            let _ = write!(text, " @ {}", random_formula(&mut rng, nf, 3));
        }
        text.push_str(".\n");
    }

    let feature_model = if nf == 0 {
        "True".to_owned()
    } else {
        loop {
            let f = random_formula(&mut rng, nf, 2);
            let mut scratch = PcStore::new();
            if scratch.parse(&f).map(|pc| scratch.is_sat(pc))? {
                break f;
            }
        }
    };
    Ok(GeneratedSource {
        program: text,
        feature_model,
    })
}

/// Load a generated program into `pcs`, registering `F0..Fn-1` first so
/// that the variable order is the feature index order.
pub fn generate_spl_program(
    spec: &GeneratorSpec,
    pcs: &mut PcStore,
) -> Result<(Program, FeatureModel), OracleError> {
    let src = generate_spl_source(spec)?;
    for i in 0..spec.num_features {
        pcs.feature(&format!("F{i}"))?;
    }
    let prog = parse_program(&src.program, pcs)?;
    let fm = FeatureModel::parse(&src.feature_model, pcs)?;
    Ok((prog, fm))
}

/// Inline facts of `prog` as a lifted input database.
pub fn inline_edb(prog: &Program, pcs: &mut PcStore) -> LiftedEdb {
    LiftedEdb::from_lifted_facts(prog.inline_facts().to_vec(), pcs).0
}

// ---------------------------------------------------------------------------
// Scaling family

/// Length of the unconditional edge chain in the scaling programs.
pub const SCALING_CHAIN: usize = 60;

/// Transitive closure over a chain of unconditional edges, with feature `Fi`
/// adding a branch off the chain and `!F(i+1)` extending that branch. Every
/// product shares the chain's closure, which is what makes one lifted run
/// cheaper than `2^n` plain ones.
pub fn scaling_source(features: usize, chain: usize) -> String {
    let mut s = String::from(
        ".decl edge(x: symbol, y: symbol)\n\
         .decl path(x: symbol, y: symbol)\n\
         .output path\n\
         path(x, y) :- edge(x, y).\n\
         path(x, z) :- path(x, y), edge(y, z).\n",
    );
    for k in 0..chain {
        let _ = writeln!(s, "edge(\"n{k}\", \"n{}\").", k + 1);
    }
    for i in 0..features {
        let at = (i + 1) * chain / (features + 1);
        let next = (i + 1) % features;
        let _ = writeln!(s, "edge(\"n{at}\", \"b{i}\") @ F{i}.");
        if features > 1 {
            let _ = writeln!(s, "edge(\"b{i}\", \"c{i}\") @ !F{next}.");
        }
    }
    s
}

/// One measured point of a scaling family.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub features: usize,
    pub configurations: u64,
    pub lifted_facts: u64,
    pub lifted_time_ns: u64,
    pub product_time_ns: u64,
    pub speedup: f64,
    pub lifted_db_bytes: u64,
    pub product_db_bytes: u64,
    pub space_savings: f64,
    pub mismatches: usize,
}

impl BenchRow {
    fn from_report(name: String, r: &VerificationReport) -> Self {
        BenchRow {
            name,
            features: r.features,
            configurations: r.configurations_checked,
            lifted_facts: r.lifted.facts_final,
            lifted_time_ns: r.lifted_time_ns,
            product_time_ns: r.product_time_ns,
            speedup: r.speedup,
            lifted_db_bytes: r.lifted_db_bytes,
            product_db_bytes: r.product_db_bytes,
            space_savings: r.space_savings,
            mismatches: r.mismatches.len(),
        }
    }
}

/// Measure the scaling program with `features` features.
pub fn measure_scaling(features: usize, chain: usize, reps: usize) -> Result<BenchRow, OracleError> {
    let mut pcs = PcStore::new();
    let prog = parse_program(&scaling_source(features, chain), &mut pcs)?;
    let edb = inline_edb(&prog, &mut pcs);
    let report = verify_timed(&prog, &edb, &EvalOptions::default(), &mut pcs, reps)?;
    Ok(BenchRow::from_report(format!("tc-{features}"), &report))
}

/// The default family: `n = 2..=12`.
pub fn default_suite(reps: usize) -> Result<Vec<BenchRow>, OracleError> {
    (2..=12).map(|n| measure_scaling(n, SCALING_CHAIN, reps)).collect()
}

/// Measure one generated program under its own feature model.
pub fn measure_spec(spec: &GeneratorSpec, reps: usize) -> Result<BenchRow, OracleError> {
    let mut pcs = PcStore::new();
    let (prog, fm) = generate_spl_program(spec, &mut pcs)?;
    let edb = inline_edb(&prog, &mut pcs);
    let opts = EvalOptions::default().with_fm(fm);
    let report = verify_timed(&prog, &edb, &opts, &mut pcs, reps)?;
    Ok(BenchRow::from_report(format!("spec-{}", spec.seed), &report))
}

/// Per-predicate fact counts of a lifted result.
pub fn relation_counts(out: &LiftedOutput, prog: &Program) -> Vec<(String, u64)> {
    prog.predicates()
        .map(|(p, d): (PredId, _)| (d.name.clone(), out.relation_len(p) as u64))
        .collect()
}
