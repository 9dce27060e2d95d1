use std::io;

use gbsat::{Merge, Mode, SolveResult, SolverConfig, Stats};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "instance,mode,merge,bb,restarts,result,time_s,conflicts,decisions,propagations,unassigned_literals,learned_clauses,candidates_considered";

/// One run of one configuration on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub instance: String,
    pub mode: String,
    pub merge: String,
    pub bb: bool,
    pub restarts: bool,
    /// `SAT`, `UNSAT`, `UNKNOWN` or `ERROR`.
    pub result: String,
    pub time_s: f64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub unassigned_literals: u64,
    pub learned_clauses: u64,
    pub candidates_considered: u64,
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Ncb => "ncb",
        Mode::Cb => "cb",
        Mode::Gb => "gb",
    }
}

fn merge_name(m: Merge) -> &'static str {
    match m {
        Merge::None => "none",
        Merge::Eager => "eager",
        Merge::Lazy => "lazy",
    }
}

impl StatsRow {
    pub fn new(instance: &str, cfg: &SolverConfig, result: &SolveResult, time_s: f64, stats: &Stats) -> StatsRow {
        StatsRow {
            result: result.label().to_string(),
            time_s,
            conflicts: stats.conflicts,
            decisions: stats.decisions,
            propagations: stats.propagations,
            unassigned_literals: stats.unassigned_literals,
            learned_clauses: stats.learned_clauses,
            candidates_considered: stats.candidates_considered,
            ..StatsRow::error(instance, cfg)
        }
    }

    /// Row for a run that could not start, e.g. an unreadable instance.
    pub fn error(instance: &str, cfg: &SolverConfig) -> StatsRow {
        StatsRow {
            instance: instance.to_string(),
            mode: mode_name(cfg.mode).to_string(),
            merge: merge_name(cfg.merge).to_string(),
            bb: cfg.bb,
            restarts: cfg.restarts,
            result: "ERROR".to_string(),
            time_s: 0.0,
            conflicts: 0,
            decisions: 0,
            propagations: 0,
            unassigned_literals: 0,
            learned_clauses: 0,
            candidates_considered: 0,
        }
    }

    /// Configuration part of the row, e.g. `gb+ecm+bb`.
    pub fn config_label(&self) -> String {
        let mut s = self.mode.clone();
        match self.merge.as_str() {
            "eager" => s.push_str("+ecm"),
            "lazy" => s.push_str("+lcm"),
            _ => {}
        }
        if self.bb {
            s.push_str("+bb");
        }
        if self.restarts {
            s.push_str("+restarts");
        }
        s
    }
}

/// Writes the header line, then `rows`. With `header` false only rows are
/// written, for appending to an existing file.
pub fn write_stats_csv<W: io::Write>(mut out: W, rows: &[StatsRow], header: bool) -> io::Result<()> {
    if header {
        writeln!(out, "{CSV_HEADER}")?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in rows {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.flush()
}

pub fn read_stats_csv<R: io::Read>(input: R) -> Result<Vec<StatsRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
