//! Machine-readable run statistics. Field order is the serialisation order
//! and is part of the output format.

use serde::Serialize;
use vdatalog_core::engine::{EvalStats, SatMode, Strategy};
use vdatalog_core::oracle::{BenchRow, Mismatch, VerificationReport};

#[derive(Debug, Default, Serialize)]
pub struct Timings {
    pub parse_us: u64,
    pub load_us: u64,
    pub infer_us: u64,
    pub write_us: u64,
}

#[derive(Debug, Serialize)]
pub struct Mode {
    pub sat_mode: SatMode,
    pub strategy: Strategy,
    pub feature_model: String,
    pub fm_store: bool,
    /// Plain inference was used because the program declares no features.
    pub plain: bool,
}

#[derive(Debug, Serialize)]
pub struct RelationCount {
    pub predicate: String,
    pub facts: u64,
}

#[derive(Debug, Serialize)]
pub struct Verification {
    pub configurations: u64,
    pub mismatches: u64,
    /// Wall time of the single lifted run.
    pub lifted_time_us: f64,
    /// Sum of the per-configuration plain runs, executed sequentially.
    pub product_time_us: f64,
    pub product_facts: u64,
    pub product_db_bytes: u64,
    pub speedup: f64,
    pub space_savings: f64,
    pub divergent: Vec<Mismatch>,
}

impl From<&VerificationReport> for Verification {
    fn from(r: &VerificationReport) -> Self {
        Verification {
            configurations: r.configurations_checked,
            mismatches: r.mismatches.len() as u64,
            lifted_time_us: r.lifted_time_ns as f64 / 1e3,
            product_time_us: r.product_time_ns as f64 / 1e3,
            product_facts: r.product_facts,
            product_db_bytes: r.product_db_bytes,
            speedup: r.speedup,
            space_savings: r.space_savings,
            divergent: r.mismatches.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsDocument {
    pub command: &'static str,
    pub program: Option<String>,
    pub features: usize,
    pub mode: Option<Mode>,
    pub timings: Timings,
    pub eval: Option<EvalStats>,
    pub relations: Vec<RelationCount>,
    pub dropped_inputs: u64,
    pub output_db_bytes: u64,
    pub verification: Option<Verification>,
    pub bench: Vec<BenchRow>,
}

impl StatsDocument {
    pub fn new(command: &'static str) -> Self {
        StatsDocument {
            command,
            program: None,
            features: 0,
            mode: None,
            timings: Timings::default(),
            eval: None,
            relations: Vec::new(),
            dropped_inputs: 0,
            output_db_bytes: 0,
            verification: None,
            bench: Vec::new(),
        }
    }
}
