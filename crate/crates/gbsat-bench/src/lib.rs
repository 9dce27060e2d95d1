//! Benchmark and verification support: random instance generators, a
//! truth-table oracle, a parallel suite runner and a checker that replays
//! conflicts under the reference and simulation repairs side by side.

pub mod generate;
pub mod lockstep;
pub mod oracle;
pub mod suite;

pub use generate::{gen_kcolor, random_ksat, KColorError, KColorSpec};
pub use lockstep::{verify_simulation, LockstepReport, Mismatch, Simulated};
pub use oracle::{brute_force_oracle, count_models, entails, OracleError, OracleResult, ORACLE_MAX_VARS};
pub use suite::{load_manifest, run_suite, Instance, SuiteOptions};
