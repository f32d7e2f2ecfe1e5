mod stats;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::warn;
use thiserror::Error;
use vdatalog_core::engine::{infer_with_stats, LiftedOutput};
use vdatalog_core::frontend::load_facts_dir;
use vdatalog_core::oracle::{
    default_suite, measure_scaling, measure_spec, verify_commutation, BenchRow, GeneratorSpec,
    OracleError, SCALING_CHAIN,
};
use vdatalog_core::prelude::*;

use stats::{Mode, RelationCount, StatsDocument, Verification};

#[derive(Parser)]
#[command(name = "vdatalog", version, about = "Variability-aware Datalog engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct EvalArgs {
    /// Datalog program.
    program: PathBuf,
    /// Directory holding `<Predicate>.facts` files for the input predicates.
    #[arg(long)]
    facts: Option<PathBuf>,
    /// Feature model: a formula, or a file containing one.
    #[arg(long)]
    fm: Option<String>,
    /// Keep conditions as text; skip satisfiability checks.
    #[arg(long)]
    no_sat: bool,
    /// Store each condition conjoined with the feature model.
    #[arg(long)]
    fm_store: bool,
    /// Naive instead of semi-naive evaluation.
    #[arg(long)]
    naive: bool,
    /// Write a JSON statistics document.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a program and write one fact file per output predicate.
    Run {
        #[command(flatten)]
        eval: EvalArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the lifted result with plain evaluation of every valid configuration.
    Verify {
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long, hide = true)]
        break_merge: bool,
    },
    /// Measure lifted against per-configuration evaluation.
    Bench {
        /// Built-in family: `default` (2..=12 features) or `small` (2..=8).
        #[arg(long, default_value = "default", conflicts_with = "spec")]
        suite: String,
        /// JSON file with one generator spec or a list of them.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Write a JSON statistics document.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Timed repetitions per measurement; the minimum is kept.
        #[arg(long, default_value_t = 2)]
        reps: usize,
    },
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{}: {source}", path.display())]
    Load { path: PathBuf, source: LoadError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    Mismatch,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Load { source, .. } if source.is_io() => 2,
            Failure::Oracle(OracleError::Load(e)) if e.is_io() => 2,
            Failure::Io { .. } => 2,
            Failure::Mismatch => 3,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |source| Failure::Io {
        path: path.to_owned(),
        source,
    }
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

struct Loaded {
    prog: Program,
    pcs: PcStore,
    edb: LiftedEdb,
    fm: Option<FeatureModel>,
    opts: EvalOptions,
    doc: StatsDocument,
}

fn load(args: &EvalArgs, command: &'static str) -> Result<Loaded, Failure> {
    let mut doc = StatsDocument::new(command);
    doc.program = Some(args.program.display().to_string());
    let load_err = |path: &Path| {
        let path = path.to_owned();
        move |source| Failure::Load { path, source }
    };

    let t = Instant::now();
    let text = fs::read_to_string(&args.program).map_err(io_err(&args.program))?;
    let mut pcs = PcStore::new();
    let mut prog = parse_program(&text, &mut pcs).map_err(load_err(&args.program))?;
    doc.timings.parse_us = micros(t);

    let t = Instant::now();
    let facts = match &args.facts {
        Some(dir) => {
            if !dir.is_dir() {
                return Err(Failure::Io {
                    path: dir.clone(),
                    source: io::Error::new(io::ErrorKind::NotFound, "not a directory"),
                });
            }
            load_facts_dir(&mut prog, dir, &mut pcs).map_err(load_err(dir))?
        }
        None => prog.inline_facts().to_vec(),
    };
    let fm = match &args.fm {
        Some(arg) => Some(FeatureModel::from_arg(arg, &mut pcs).map_err(load_err(Path::new(arg)))?),
        None => None,
    };
    let (edb, dropped) = LiftedEdb::from_lifted_facts(facts, &mut pcs);
    if dropped > 0 {
        warn!("dropped {dropped} input facts with unsatisfiable conditions");
    }
    doc.dropped_inputs = dropped as u64;
    doc.timings.load_us = micros(t);
    doc.features = pcs.features().len();

    let mut opts = EvalOptions {
        fm,
        fm_store: args.fm_store,
        ..Default::default()
    };
    if args.no_sat {
        opts = opts.no_sat();
    }
    if args.naive {
        opts = opts.naive();
    }
    doc.mode = Some(Mode {
        sat_mode: opts.sat_mode,
        strategy: opts.strategy,
        feature_model: pcs.to_text(fm.unwrap_or_else(FeatureModel::tt).formula),
        fm_store: opts.fm_store,
        plain: false,
    });
    Ok(Loaded {
        prog,
        pcs,
        edb,
        fm,
        opts,
        doc,
    })
}

fn write_stats(path: Option<&Path>, doc: &StatsDocument) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let mut json = serde_json::to_string_pretty(doc).expect("stats serialise");
    json.push('\n');
    fs::write(path, json).map_err(io_err(path))
}

fn cmd_run(args: &EvalArgs, out_dir: &Path) -> Result<(), Failure> {
    let Loaded {
        prog,
        mut pcs,
        edb,
        fm,
        opts,
        mut doc,
    } = load(args, "run")?;

    let t = Instant::now();
    let plain = pcs.features().is_empty() && fm.is_none() && !args.no_sat;
    let (out, mut eval) = if plain {
        let facts = edb.iter().map(|(f, _)| f);
        let (db, stats) = infer_with_stats(prog.rules(), facts, opts.strategy);
        (LiftedOutput::Bdd(db.map(|_| Pc::TRUE)), stats)
    } else {
        lifted_infer(prog.rules(), &edb, &opts, &mut pcs)
    };
    doc.timings.infer_us = micros(t);
    if let Some(mode) = &mut doc.mode {
        mode.plain = plain;
    }

    let t = Instant::now();
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    for pred in prog.output_predicates() {
        let text = out.fact_file_text(pred, &prog, &pcs);
        let path = out_dir.join(format!("{}.csv", prog.decl(pred).name));
        fs::write(&path, &text).map_err(io_err(&path))?;
        doc.output_db_bytes += text.len() as u64;
    }
    doc.timings.write_us = micros(t);

    eval.db_bytes = out.db_bytes(&prog, &pcs);
    doc.relations = prog
        .predicates()
        .map(|(p, d)| RelationCount {
            predicate: d.name.clone(),
            facts: out.relation_len(p) as u64,
        })
        .collect();
    doc.eval = Some(eval);
    write_stats(args.stats.as_deref(), &doc)
}

fn cmd_verify(args: &EvalArgs, break_merge: bool) -> Result<(), Failure> {
    let Loaded {
        prog,
        mut pcs,
        edb,
        mut opts,
        mut doc,
        ..
    } = load(args, "verify")?;
    opts.break_merge = break_merge;

    let t = Instant::now();
    let report = verify_commutation(&prog, &edb, &opts, &mut pcs)?;
    doc.timings.infer_us = micros(t);
    println!("{}", report.summary());
    if let Some(m) = report.mismatches.first() {
        println!("first divergent configuration: {}", m.configuration);
        for f in &m.only_lifted {
            println!("  only lifted:  {f}");
        }
        for f in &m.only_product {
            println!("  only product: {f}");
        }
    }
    doc.eval = Some(report.lifted.clone());
    doc.verification = Some(Verification::from(&report));
    write_stats(args.stats.as_deref(), &doc)?;
    if report.verified() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn print_row(r: &BenchRow) {
    println!(
        "{:<10} features={:<3} configs={:<6} lifted={:>10.3}ms products={:>12.3}ms speedup={:>9.1}x savings={:>8.1}x mismatches={}",
        r.name,
        r.features,
        r.configurations,
        r.lifted_time_ns as f64 / 1e6,
        r.product_time_ns as f64 / 1e6,
        r.speedup,
        r.space_savings,
        r.mismatches
    );
}

fn cmd_bench(suite: &str, spec: Option<&Path>, out: Option<&Path>, reps: usize) -> Result<(), Failure> {
    let reps = reps.max(1);
    let mut doc = StatsDocument::new("bench");
    let t = Instant::now();
    let rows = match spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let specs: Vec<GeneratorSpec> = serde_json::from_str(&text)
                .or_else(|_| serde_json::from_str(&text).map(|s| vec![s]))
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            specs
                .iter()
                .map(|s| measure_spec(s, reps).inspect(print_row))
                .collect::<Result<Vec<_>, _>>()?
        }
        None => match suite {
            "default" => default_suite(reps)?,
            "small" => (2..=8)
                .map(|n| measure_scaling(n, SCALING_CHAIN, reps).inspect(print_row))
                .collect::<Result<Vec<_>, _>>()?,
            other => return Err(Failure::Usage(format!("unknown suite `{other}`"))),
        },
    };
    if spec.is_none() && suite == "default" {
        rows.iter().for_each(print_row);
    }
    doc.timings.infer_us = micros(t);
    let failed = rows.iter().any(|r| r.mismatches > 0);
    doc.bench = rows;
    write_stats(out, &doc)?;
    if failed {
        Err(Failure::Mismatch)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.cmd {
        Cmd::Run { eval, out } => cmd_run(eval, out),
        Cmd::Verify { eval, break_merge } => cmd_verify(eval, *break_merge),
        Cmd::Bench {
            suite,
            spec,
            out,
            reps,
        } => cmd_bench(suite, spec.as_deref(), out.as_deref(), *reps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
