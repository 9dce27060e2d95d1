//! Input and output formats around the `gbsat` engine: DIMACS CNF,
//! competition-style results, Graphviz export of the implication graph and
//! the per-run statistics CSV.

mod dimacs;
mod dot;
mod result;
mod stats;

pub use dimacs::{parse_dimacs, parse_dimacs_str, write_dimacs, Formula, ParseError, Warning};
pub use dot::{export_dot, DotOptions};
pub use result::{emit_result, exit_code};
pub use stats::{read_stats_csv, write_stats_csv, StatsRow, CSV_HEADER};
