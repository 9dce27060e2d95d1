//! Resolution and scoped first-UIP analysis.
//!
//! The scope decides which literals are resolved away: in NCB and CB it is
//! the conflict level, in GB the literals depending on a chosen chunk set.

use std::fmt;

use crate::clause::ClauseRef;
use crate::lit::{Lit, Var};
use crate::solver::Solver;

/// Precondition failure of [`resolve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolveError {
    pub pivot: Lit,
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pivot {} must occur negated in the first clause and positively in the second", self.pivot)
    }
}

impl std::error::Error for ResolveError {}

/// Resolvent of `c` and `d` on `pivot`, where `¬pivot ∈ c` and `pivot ∈ d`.
/// Literals of `c` come first, then the new ones of `d`.
pub fn resolve(c: &[Lit], d: &[Lit], pivot: Lit) -> Result<Vec<Lit>, ResolveError> {
    if !c.contains(&!pivot) || !d.contains(&pivot) {
        return Err(ResolveError { pivot });
    }
    let mut out: Vec<Lit> = c.iter().copied().filter(|&l| l != !pivot).collect();
    for &l in d {
        if l != pivot && !out.contains(&l) {
            out.push(l);
        }
    }
    Ok(out)
}

/// Output of an analysis run.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    /// Learned clause, asserting literal first.
    pub learned: Vec<Lit>,
    pub asserting: Lit,
    /// Conflict clause followed by the reasons resolved with.
    pub trace: Vec<ClauseRef>,
}

impl Analysis {
    /// True when no resolution step was needed.
    pub fn is_conflict_clause(&self) -> bool {
        self.trace.len() == 1
    }
}

impl Solver {
    /// First UIP of `conflict` with respect to the chunk set `chunks`.
    pub fn analyze(&mut self, conflict: ClauseRef, chunks: &crate::chunkset::ChunkSet) -> Option<Analysis> {
        let lazy = if chunks.len() == 2 && self.cfg.merge == crate::solver::Merge::Lazy {
            chunks.iter().find_map(|ck| {
                let d = self.trail.chunks().decision(ck);
                self.lazy_record(d).map(|r| (r.decision, r.clause))
            })
        } else {
            None
        };
        self.analyze_for(conflict, chunks, lazy)
    }

    /// Resolves the conflict clause with reasons of in-scope literals from
    /// right to left until exactly one in-scope literal is left.
    ///
    /// `order` replaces the trail order and `overrides` the reasons of some
    /// variables; both serve lazy merges. Returns `None` if an in-scope
    /// literal has no reason before the stop condition holds.
    pub(crate) fn analyze_scoped<F>(
        &mut self,
        conflict: ClauseRef,
        in_scope: F,
        order: Option<&[Lit]>,
        overrides: &[(Var, ClauseRef)],
    ) -> Option<Analysis>
    where
        F: Fn(&Solver, Var) -> bool,
    {
        let mut seen = std::mem::take(&mut self.seen);
        let mut d: Vec<Lit> = self.db.lits(conflict).to_vec();
        let mut trace = vec![conflict];
        let mut n = 0usize;
        for &l in &d {
            seen[l.var().index()] = true;
            if in_scope(self, l.var()) {
                n += 1;
            }
        }
        let mut ok = n == 1;
        if n > 1 {
            let lits: &[Lit] = order.unwrap_or(&self.trail.lits);
            for &p in lits.iter().rev() {
                let v = p.var();
                if !seen[v.index()] || !in_scope(self, v) {
                    continue;
                }
                let reason = overrides
                    .iter()
                    .find(|(x, _)| *x == v)
                    .map(|&(_, c)| c)
                    .or(self.trail.reason(v));
                let Some(reason) = reason else {
                    break;
                };
                seen[v.index()] = false;
                d.retain(|l| l.var() != v);
                n -= 1;
                for &q in self.db.lits(reason) {
                    let qv = q.var();
                    if qv == v || seen[qv.index()] {
                        continue;
                    }
                    seen[qv.index()] = true;
                    d.push(q);
                    if in_scope(self, qv) {
                        n += 1;
                    }
                }
                trace.push(reason);
                if n == 1 {
                    ok = true;
                    break;
                }
            }
        }
        for l in &d {
            seen[l.var().index()] = false;
        }
        self.seen = seen;
        if !ok {
            return None;
        }
        let i = d.iter().position(|l| in_scope(self, l.var()))?;
        d.swap(0, i);
        Some(Analysis {
            asserting: d[0],
            learned: d,
            trace,
        })
    }
}

/// Whether no clause of the database is a subset of `lits`.
///
/// Only the watch lists of literals of `lits` are scanned: a subset clause
/// of length ≥ 2 is watched by two of its literals, all of which are in
/// `lits`.
pub fn is_new_clause(solver: &Solver, lits: &[Lit]) -> bool {
    if lits.len() == 1 {
        let l = lits[0];
        let t = solver.trail();
        // A unit clause equal to `lits` would have assigned it at root.
        if t.is_true(l) && t.level(l.var()) == 0 && t.reason(l.var()).is_some() {
            let r = t.reason(l.var()).unwrap();
            if solver.clauses().lits(r) == lits {
                return false;
            }
        }
        return true;
    }
    for &l in lits {
        for w in &solver.watches[l.code()] {
            let c = solver.db.get(w.cref);
            if c.deleted || c.len() > lits.len() {
                continue;
            }
            if c.lits.iter().all(|x| lits.contains(x)) {
                return false;
            }
        }
    }
    true
}
