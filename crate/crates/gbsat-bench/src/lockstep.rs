//! Side-by-side replay of a level-based repair and its chunk simulation.
//!
//! At every conflict both repairs are planned on the same state and must
//! learn the same clause and unassign the same literals. The formula is
//! driven by either of the two, so both trajectories get covered.

use std::collections::BTreeSet;
use std::fmt;

use gbsat::{Lit, Mode, RepairPlan, SolveResult, Solver, SolverConfig, SolverError, Strategy, WeightProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simulated {
    Cb,
    Ncb,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LockstepReport {
    pub conflicts: u64,
    pub result: SolveResult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub conflict: u64,
    pub what: &'static str,
    pub reference: String,
    pub simulation: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "conflict {}: {} differs (reference {}, simulation {})",
            self.conflict, self.what, self.reference, self.simulation
        )
    }
}

fn show(lits: &BTreeSet<Lit>) -> String {
    let v: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
    format!("{{{}}}", v.join(" "))
}

/// Literals the level-based repair must unassign, straight from the levels.
fn expected_unassigned(s: &Solver, sim: Simulated, conflict_level: u32, learned: &[Lit]) -> BTreeSet<Lit> {
    let t = s.trail();
    let bound = match sim {
        Simulated::Cb => conflict_level,
        Simulated::Ncb => {
            let mut levels: Vec<u32> = learned.iter().map(|l| t.level(l.var())).collect();
            levels.sort_unstable_by(|a, b| b.cmp(a));
            levels.get(1).copied().unwrap_or(0) + 1
        }
    };
    t.lits().iter().copied().filter(|l| t.level(l.var()) >= bound).collect()
}

/// Solves `clauses` with repairs taken from the reference (`drive_reference`)
/// or from the simulation, comparing the two plans at each conflict.
pub fn verify_simulation(
    num_vars: usize,
    clauses: &[Vec<Lit>],
    sim: Simulated,
    drive_reference: bool,
    conflict_limit: u64,
) -> Result<Result<LockstepReport, Mismatch>, SolverError> {
    let (reference, profile, ref_mode) = match sim {
        Simulated::Cb => (Strategy::CbReference, WeightProfile::CbSim, Mode::Cb),
        Simulated::Ncb => (Strategy::NcbReference, WeightProfile::NcbSim, Mode::Ncb),
    };
    let simulation = Strategy::Chunks {
        profile: profile.clone(),
        bb: false,
    };
    let cfg = SolverConfig {
        mode: if drive_reference { ref_mode } else { Mode::Gb },
        weights: profile,
        ..SolverConfig::default()
    };
    let mut s = Solver::new(num_vars, clauses, cfg)?;
    let mut conflicts = 0;
    if s.is_unsat() {
        return Ok(Ok(LockstepReport { conflicts, result: SolveResult::Unsat }));
    }
    let result = loop {
        let Some(c) = s.propagate() else {
            if s.decide().is_none() {
                break SolveResult::Sat(s.model());
            }
            continue;
        };
        conflicts += 1;
        let (Some(r), Some(g)) = (s.plan_repair(c, reference.clone()), s.plan_repair(c, simulation.clone())) else {
            break SolveResult::Unsat;
        };
        if let Some(m) = compare(&s, sim, conflicts, &r, &g) {
            return Ok(Err(m));
        }
        s.apply_repair(if drive_reference { &r } else { &g });
        if conflicts >= conflict_limit {
            break SolveResult::Unknown;
        }
    };
    Ok(Ok(LockstepReport { conflicts, result }))
}

fn compare(s: &Solver, sim: Simulated, n: u64, r: &RepairPlan, g: &RepairPlan) -> Option<Mismatch> {
    let set = |v: &[Lit]| v.iter().copied().collect::<BTreeSet<Lit>>();
    let mismatch = |what, a: &BTreeSet<Lit>, b: &BTreeSet<Lit>| Mismatch {
        conflict: n,
        what,
        reference: show(a),
        simulation: show(b),
    };
    let (lr, lg) = (set(&r.learned), set(&g.learned));
    if lr != lg {
        return Some(mismatch("learned clause", &lr, &lg));
    }
    if r.asserting != g.asserting {
        return Some(mismatch("asserting literal", &set(&[r.asserting]), &set(&[g.asserting])));
    }
    let (ur, ug) = (set(&r.unassigned), set(&g.unassigned));
    if ur != ug {
        return Some(mismatch("unassigned set", &ur, &ug));
    }
    let want = expected_unassigned(s, sim, r.conflict_level, &r.learned);
    if ur != want {
        return Some(mismatch("unassigned set vs levels", &want, &ur));
    }
    None
}
