//! JSON-lines run reports.
//!
//! One record per stream event, then a summary record. Every timing
//! value lives under a `time_ns` key, so dropping those keys yields the
//! deterministic part of a report.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Record {
    Insert {
        line: usize,
        u: u32,
        v: u32,
        edge: u32,
        new_walks: usize,
        rerouted: usize,
        terminals_added: usize,
        h_events: usize,
        time_ns: u64,
    },
    Delete {
        line: usize,
        u: u32,
        v: u32,
        edge: u32,
        deleted_walks: usize,
        regenerated_walks: usize,
        h_events: usize,
        time_ns: u64,
    },
    Query {
        line: usize,
        s: u32,
        t: u32,
        estimate: Option<f64>,
        exact: Option<f64>,
        rel_err: Option<f64>,
        error: Option<String>,
        terminals_added: usize,
        h_events: usize,
        rebuilt: bool,
        time_ns: u64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassTimes {
    pub insert: u64,
    pub delete: u64,
    pub query: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    pub eps: f64,
    pub mode: String,
    /// `β` of the final epoch.
    pub beta: f64,
    pub rho: usize,
    pub step_cap: usize,
    pub rho_factor: f64,
    pub cap_factor: f64,
    pub resparsify: bool,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub event: &'static str,
    pub events: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub queries: usize,
    pub answered: usize,
    /// Answered queries within `1 ± eps` of the oracle.
    pub within_eps: Option<usize>,
    pub max_rel_err: Option<f64>,
    pub rebuilds: usize,
    pub final_edges: usize,
    pub final_terminals: usize,
    pub h_events: usize,
    pub params: Params,
    pub seed: u64,
    /// SHA-256 of the event records with timing removed.
    pub digest: String,
    pub time_ns: ClassTimes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub records: Vec<Record>,
    pub summary: Summary,
}

fn strip_timing(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.remove("time_ns");
    }
    v
}

fn line(value: &impl Serialize, timing: bool) -> String {
    let v = serde_json::to_value(value).expect("report values serialize");
    let v = if timing { v } else { strip_timing(v) };
    serde_json::to_string(&v).expect("report values serialize")
}

/// Digest of the records with timing removed.
pub fn records_digest(records: &[Record]) -> String {
    let mut h = Sha256::new();
    for r in records {
        h.update(line(r, false).as_bytes());
        h.update(b"\n");
    }
    format!("{:x}", h.finalize())
}

impl RunReport {
    /// The report as JSON lines; `timing = false` drops every `time_ns`.
    pub fn to_jsonl(&self, timing: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&line(r, timing));
            out.push('\n');
        }
        out.push_str(&line(&self.summary, timing));
        out.push('\n');
        out
    }
}
