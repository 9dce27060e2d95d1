//! A CDCL SAT solver with three conflict repair strategies.
//!
//! * NCB: classic backjumping to the assertion level.
//! * CB: chronological backtracking, undoing the conflict level only.
//! * GB: graph backtracking. Every decision opens a chunk, each literal
//!   carries the set γ of chunks it depends on, and a conflict undoes just
//!   the literals depending on a selected chunk.
//!
//! ```
//! use gbsat::{Lit, Mode, Solver, SolverConfig};
//!
//! let lits = |xs: &[i32]| xs.iter().map(|&x| Lit::from_dimacs(x)).collect::<Vec<_>>();
//! let clauses = vec![lits(&[1, 2]), lits(&[-1, 2]), lits(&[1, -2])];
//! let mut s = Solver::new(2, &clauses, SolverConfig::new(Mode::Gb)).unwrap();
//! assert!(s.solve().is_sat());
//! ```

pub mod analyze;
mod backtrack;
pub mod check;
pub mod chunkset;
pub mod clause;
pub mod lit;
pub mod merge;
pub mod policy;
pub mod repair;
pub mod solver;
pub mod trail;
pub mod vsids;
pub mod watch;

pub use analyze::{resolve, Analysis, ResolveError};
pub use check::{Violation, ViolationKind};
pub use chunkset::{ChunkId, ChunkSet};
pub use clause::{normalize, Clause, ClauseDb, ClauseRef};
pub use lit::{Lit, Var, MAX_VARS};
pub use merge::LazyMergeRecord;
pub use policy::{evaluate_weight, BacktrackCandidate, WeightContext, WeightProfile, WeightTable, WeightTableError};
pub use repair::{RepairPlan, Strategy, Undo};
pub use solver::{
    luby, model_satisfies, ConflictRecord, IngestReport, Merge, Mode, SolveResult, Solver, SolverConfig, SolverError,
    Stats,
};
pub use trail::{Trail, Value, LEVEL_INF};
pub use watch::{Attach, Watch};
