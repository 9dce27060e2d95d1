//! The CDCL driver and solver state.

use std::time::Instant;

use thiserror::Error;

use crate::check::Violation;
use crate::chunkset::ChunkSet;
use crate::clause::{normalize, ClauseDb, ClauseRef};
use crate::lit::{Lit, Var, MAX_VARS};
use crate::merge::LazyMergeRecord;
use crate::policy::WeightProfile;
use crate::repair::Strategy;
use crate::trail::Trail;
use crate::vsids::Vsids;
use crate::watch::Watch;

/// Backtracking strategy of the engine.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Mode {
    /// Non-chronological backjumping to the second-highest learned level.
    Ncb,
    /// Chronological backtracking to the conflict level minus one.
    Cb,
    /// Graph backtracking over chunks.
    Gb,
}

/// Chunk merging on missed implications of decisions (GB only).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Merge {
    None,
    Eager,
    Lazy,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub mode: Mode,
    pub merge: Merge,
    /// Best-chunk backtracking (GB only).
    pub bb: bool,
    pub restarts: bool,
    /// Conflicts per Luby unit.
    pub restart_unit: u64,
    pub weights: WeightProfile,
    pub candidate_limit: usize,
    /// Non-zero seeds add a tiny random jitter to initial activities.
    pub seed: u64,
    /// Run the invariant checker after every propagation and repair.
    pub check: bool,
    /// Blockers in watch entries. The default enables them in GB mode.
    pub blockers: Option<bool>,
    pub conflict_limit: Option<u64>,
    /// Decisions replayed before VSIDS takes over.
    pub decisions: Vec<Lit>,
    /// Keep a per-conflict log in the solver.
    pub record_conflicts: bool,
    pub vsids_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            mode: Mode::Gb,
            merge: Merge::None,
            bb: false,
            restarts: false,
            restart_unit: 64,
            weights: WeightProfile::prop_min(),
            candidate_limit: 32,
            seed: 0,
            check: false,
            blockers: None,
            conflict_limit: None,
            decisions: Vec::new(),
            record_conflicts: false,
            vsids_decay: 0.95,
        }
    }
}

impl SolverConfig {
    pub fn new(mode: Mode) -> SolverConfig {
        SolverConfig {
            mode,
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.mode != Mode::Gb && (self.merge != Merge::None || self.bb) {
            return Err(SolverError::InvalidConfig(
                "chunk merging and best-chunk backtracking need mode gb".into(),
            ));
        }
        if self.candidate_limit == 0 {
            return Err(SolverError::InvalidConfig("candidate limit must be positive".into()));
        }
        if !(self.vsids_decay > 0.0 && self.vsids_decay <= 1.0) {
            return Err(SolverError::InvalidConfig("vsids decay must be in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn blockers_enabled(&self) -> bool {
        self.blockers.unwrap_or(self.mode == Mode::Gb)
    }

    /// Short label such as `gb+ecm+bb`.
    pub fn label(&self) -> String {
        let mut s = match self.mode {
            Mode::Ncb => "ncb".to_string(),
            Mode::Cb => "cb".to_string(),
            Mode::Gb => "gb".to_string(),
        };
        match self.merge {
            Merge::None => {}
            Merge::Eager => s.push_str("+ecm"),
            Merge::Lazy => s.push_str("+lcm"),
        }
        if self.bb {
            s.push_str("+bb");
        }
        s
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("too many variables: {0}")]
    TooManyVars(usize),
    #[error("literal {lit} exceeds the variable count {num_vars}")]
    LiteralOutOfRange { lit: i32, num_vars: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Value of each variable, indexed by `Var::index`.
    Sat(Vec<bool>),
    Unsat,
    /// The conflict limit was reached.
    Unknown,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveResult::Sat(_) => "SAT",
            SolveResult::Unsat => "UNSAT",
            SolveResult::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    /// Moves from ω to τ, repropagations included.
    pub propagations: u64,
    /// Literals unassigned by conflict repairs.
    pub unassigned_literals: u64,
    pub learned_clauses: u64,
    /// Backtrack candidates weighed during chunk selection.
    pub candidates_considered: u64,
    pub restarts: u64,
    pub eager_merges: u64,
    pub lazy_records: u64,
    pub purged_clauses: u64,
}

/// Counts produced while ingesting a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub tautologies: usize,
    pub duplicate_literals: usize,
}

/// One conflict repair, as recorded when `record_conflicts` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct ConflictRecord {
    pub conflict: Vec<Lit>,
    pub conflict_level: u32,
    /// Learned clause, asserting literal first.
    pub learned: Vec<Lit>,
    pub asserting: Lit,
    /// Literals unassigned by the repair, in trail order.
    pub unassigned: Vec<Lit>,
    /// Decisions of the chunks that were undone, for chunk-based repairs.
    pub undone_decisions: Vec<Lit>,
    pub new_clause: bool,
}

pub struct Solver {
    pub(crate) cfg: SolverConfig,
    pub(crate) num_vars: usize,
    pub(crate) db: ClauseDb,
    pub(crate) watches: Vec<Vec<Watch>>,
    pub(crate) trail: Trail,
    pub(crate) vsids: Vsids,
    pub(crate) original: Vec<Vec<Lit>>,
    pub(crate) lazy: Vec<Option<LazyMergeRecord>>,
    pub(crate) lazy_vars: Vec<Var>,
    pub(crate) pending_merges: Vec<(Lit, ClauseRef)>,
    pub(crate) pending_conflict: Option<ClauseRef>,
    pub(crate) stats: Stats,
    pub(crate) report: IngestReport,
    pub(crate) unsat: bool,
    pub(crate) script_pos: usize,
    pub(crate) restarts_done: u64,
    pub(crate) conflicts_since_restart: u64,
    pub(crate) root_dirty: bool,
    pub(crate) log: Vec<ConflictRecord>,
    pub(crate) violations: Vec<Violation>,
    pub(crate) seen: Vec<bool>,
    pub(crate) blockers: bool,
}

impl Solver {
    /// Builds a solver over `num_vars` variables. Tautologies are dropped and
    /// duplicate literals merged.
    pub fn new(num_vars: usize, clauses: &[Vec<Lit>], cfg: SolverConfig) -> Result<Solver, SolverError> {
        cfg.validate()?;
        if num_vars > MAX_VARS {
            return Err(SolverError::TooManyVars(num_vars));
        }
        for c in clauses {
            for &l in c {
                if l.var().index() >= num_vars {
                    return Err(SolverError::LiteralOutOfRange {
                        lit: l.to_dimacs(),
                        num_vars,
                    });
                }
            }
        }
        let mut vsids = Vsids::new(num_vars, cfg.vsids_decay);
        if cfg.seed != 0 {
            let mut x = cfg.seed;
            for i in 0..num_vars {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                vsids.set_activity(Var::from_index(i), (x >> 11) as f64 * 1e-22);
            }
        }
        let blockers = cfg.blockers_enabled();
        let mut s = Solver {
            num_vars,
            db: ClauseDb::default(),
            watches: vec![Vec::new(); 2 * num_vars],
            trail: Trail::new(num_vars),
            vsids,
            original: clauses.to_vec(),
            lazy: vec![None; num_vars],
            lazy_vars: Vec::new(),
            pending_merges: Vec::new(),
            pending_conflict: None,
            stats: Stats::default(),
            report: IngestReport::default(),
            unsat: false,
            script_pos: 0,
            restarts_done: 0,
            conflicts_since_restart: 0,
            root_dirty: false,
            log: Vec::new(),
            violations: Vec::new(),
            seen: vec![false; num_vars],
            blockers,
            cfg,
        };
        for c in clauses {
            s.add_input_clause(c);
        }
        Ok(s)
    }

    fn add_input_clause(&mut self, lits: &[Lit]) {
        let raw_len = lits.len();
        let Some(lits) = normalize(lits) else {
            self.report.tautologies += 1;
            return;
        };
        self.report.duplicate_literals += raw_len - lits.len();
        if self.unsat {
            return;
        }
        // Literals are only root-level at this point; false ones are
        // skipped for the watch choice by attach.
        match lits.len() {
            0 => self.unsat = true,
            1 => {
                let l = lits[0];
                if self.trail.is_false(l) {
                    self.unsat = true;
                } else if !self.trail.is_true(l) {
                    let cref = self.db.push(lits, false);
                    self.trail.push(l, 0, Some(cref), ChunkSet::new());
                    self.root_dirty = true;
                }
            }
            _ => {
                let cref = self.db.push(lits, false);
                self.attach(cref, None);
            }
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    pub fn clauses(&self) -> &ClauseDb {
        &self.db
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn ingest_report(&self) -> &IngestReport {
        &self.report
    }

    pub fn conflict_log(&self) -> &[ConflictRecord] {
        &self.log
    }

    /// Invariant violations found so far in check mode.
    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn original_clauses(&self) -> &[Vec<Lit>] {
        &self.original
    }

    pub fn vsids(&self) -> &Vsids {
        &self.vsids
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    /// Runs the engine until SAT, UNSAT, or the conflict limit.
    pub fn solve(&mut self) -> SolveResult {
        self.solve_observed(|_, _| {})
    }

    /// As [`Solver::solve`], calling `on_conflict` on every conflict before
    /// it is repaired.
    pub fn solve_observed<F: FnMut(&Solver, ClauseRef)>(&mut self, mut on_conflict: F) -> SolveResult {
        if self.unsat {
            return SolveResult::Unsat;
        }
        loop {
            match self.propagate() {
                Some(conflict) => {
                    on_conflict(self, conflict);
                    self.stats.conflicts += 1;
                    self.conflicts_since_restart += 1;
                    let plan = match self.plan_repair(conflict, Strategy::Native) {
                        Some(plan) => plan,
                        None => {
                            self.unsat = true;
                            return SolveResult::Unsat;
                        }
                    };
                    self.apply_repair(&plan);
                    self.vsids.decay();
                    if let Some(limit) = self.cfg.conflict_limit {
                        if self.stats.conflicts >= limit {
                            return SolveResult::Unknown;
                        }
                    }
                }
                None => {
                    if self.restart_due() {
                        self.restart();
                        continue;
                    }
                    self.maybe_purge();
                    if self.decide().is_none() {
                        let model = self.model();
                        if self.cfg.check {
                            self.check_model(&model);
                        }
                        return SolveResult::Sat(model);
                    }
                }
            }
        }
    }

    /// Current value of every variable; unassigned ones read as false.
    pub fn model(&self) -> Vec<bool> {
        (0..self.num_vars)
            .map(|i| self.trail.is_true(Var::from_index(i).pos()))
            .collect()
    }

    /// Runs BCP. Returns a conflicting clause, if any.
    pub fn propagate(&mut self) -> Option<ClauseRef> {
        if let Some(c) = self.pending_conflict.take() {
            return Some(c);
        }
        let conflict = self.bcp();
        if self.cfg.check {
            if conflict.is_none() {
                self.check_fixpoint("bcp");
            }
            self.check_watches_except("bcp", conflict);
        }
        conflict
    }

    /// Picks the next decision and pushes it with a fresh chunk. Returns
    /// `None` when every variable is assigned.
    pub fn decide(&mut self) -> Option<Lit> {
        let lit = self.next_decision()?;
        self.stats.decisions += 1;
        let ck = self.trail.chunks.alloc(lit);
        self.trail.decisions += 1;
        let level = self.trail.decisions as u32;
        self.trail.push(lit, level, None, ChunkSet::singleton(ck));
        Some(lit)
    }

    fn next_decision(&mut self) -> Option<Lit> {
        while self.script_pos < self.cfg.decisions.len() {
            let l = self.cfg.decisions[self.script_pos];
            self.script_pos += 1;
            if l.var().index() < self.num_vars && !self.trail.is_assigned(l.var()) {
                return Some(l);
            }
        }
        while let Some(v) = self.vsids.pop() {
            if !self.trail.is_assigned(v) {
                return Some(v.lit(self.trail.phase(v)));
            }
        }
        None
    }

    fn restart_due(&self) -> bool {
        self.cfg.restarts
            && self.conflicts_since_restart >= luby(self.restarts_done + 1) * self.cfg.restart_unit
    }

    /// Restarts if the Luby budget is exhausted. Returns whether it did.
    pub fn maybe_restart(&mut self) -> bool {
        if self.restart_due() {
            self.restart();
            true
        } else {
            false
        }
    }

    /// Unassigns every literal that belongs to a chunk.
    pub fn restart(&mut self) {
        if self.cfg.mode == Mode::Gb {
            let all: ChunkSet = self.trail.chunks.live_ids().collect();
            self.undo_chunks(&all);
        } else {
            self.undo_levels(1);
        }
        self.stats.restarts += 1;
        self.restarts_done += 1;
        self.conflicts_since_restart = 0;
        if self.cfg.check {
            self.check_watches("restart");
        }
    }

    fn maybe_purge(&mut self) {
        if self.root_dirty {
            self.purge_root_satisfied();
        }
    }

    /// Removes clauses satisfied by a root-level literal. Reasons of
    /// assigned literals are kept.
    pub fn purge_root_satisfied(&mut self) -> usize {
        self.root_dirty = false;
        let mut doomed = Vec::new();
        for (cref, c) in self.db.iter_live() {
            let sat = c.lits.iter().any(|&l| {
                self.trail.is_true(l)
                    && self.trail.level(l.var()) == 0
                    && self.trail.gamma(l.var()).is_empty()
            });
            if !sat {
                continue;
            }
            let locked = c
                .lits
                .iter()
                .any(|&l| self.trail.is_true(l) && self.trail.reason(l.var()) == Some(cref));
            if !locked {
                doomed.push(cref);
            }
        }
        if doomed.is_empty() {
            return 0;
        }
        for &cref in &doomed {
            self.db.delete(cref);
        }
        let db = &self.db;
        for wl in &mut self.watches {
            wl.retain(|w| !db.get(w.cref).deleted);
        }
        self.stats.purged_clauses += doomed.len() as u64;
        doomed.len()
    }

    pub(crate) fn bump_var(&mut self, v: Var) {
        self.vsids.bump(v);
    }

    /// Whether the clause has no subset clause in the database.
    pub fn is_new_clause(&self, lits: &[Lit]) -> bool {
        crate::analyze::is_new_clause(self, lits)
    }

    /// Solves and times the run.
    pub fn solve_timed(&mut self) -> (SolveResult, f64) {
        let t = Instant::now();
        let r = self.solve();
        (r, t.elapsed().as_secs_f64())
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ... indexed from 1.
pub fn luby(i: u64) -> u64 {
    debug_assert!(i >= 1);
    let mut x = i - 1;
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// True if the model satisfies every clause.
pub fn model_satisfies(model: &[bool], clauses: &[Vec<Lit>]) -> bool {
    clauses.iter().all(|c| {
        c.iter()
            .any(|l| model[l.var().index()] == l.is_positive())
    })
}
