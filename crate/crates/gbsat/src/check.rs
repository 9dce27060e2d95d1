//! Invariant checker used in check mode and by tests.
//!
//! Checks run against the live state and push a [`Violation`] for every
//! problem found instead of panicking, so a test can report all of them.

use std::fmt;

use crate::chunkset::ChunkSet;
use crate::clause::ClauseRef;
use crate::solver::{Mode, Solver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// Watch lists disagree with the watcher slots of a clause.
    WatchList,
    /// A falsified watcher in τ whose clause is not protected.
    WatchInvariant,
    /// BCP stopped with a unit or falsified clause.
    Fixpoint,
    /// A reason premise is missing or placed later on the trail.
    TrailOrder,
    Level,
    Gamma,
    Eta,
    Chunk,
    Model,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub context: &'static str,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:?}: {}", self.context, self.kind, self.detail)
    }
}

impl Solver {
    fn violate(&mut self, context: &'static str, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { context, kind, detail });
    }

    fn clause_str(&self, cref: ClauseRef) -> String {
        let lits: Vec<String> = self.db.lits(cref).iter().map(|l| l.to_string()).collect();
        format!("#{} ({})", cref.0, lits.join(" "))
    }

    /// Runs every structural check and returns the new violations.
    pub fn check_all(&mut self, context: &'static str) -> Vec<Violation> {
        let before = self.violations.len();
        self.check_watches(context);
        self.check_graph(context);
        if self.trail.queue_is_empty() && self.pending_conflict.is_none() {
            self.check_fixpoint(context);
        }
        self.violations[before..].to_vec()
    }

    /// Watch-list consistency and the watched-literal invariant of the mode.
    pub(crate) fn check_watches(&mut self, context: &'static str) {
        self.check_watches_except(context, None);
    }

    /// As `check_watches`, skipping the invariant for a conflict clause just
    /// returned by BCP.
    pub(crate) fn check_watches_except(&mut self, context: &'static str, conflict: Option<ClauseRef>) {
        let mut found = Vec::new();
        let gb = self.cfg.mode == Mode::Gb;
        let t = &self.trail;
        let mut expected = 0usize;
        for (cref, c) in self.db.iter_live() {
            if c.len() < 2 {
                continue;
            }
            expected += 2;
            for (i, j) in [(0, 1), (1, 0)] {
                let (c1, c2) = (c.lits[i], c.lits[j]);
                let Some(w) = self.watches[c1.code()].iter().find(|w| w.cref == cref) else {
                    found.push((ViolationKind::WatchList, format!("{} missing from wl({c1})", self.clause_str(cref))));
                    continue;
                };
                if Some(cref) == conflict || !t.is_false(c1) || !t.is_propagated(c1.var()) {
                    continue;
                }
                let b = w.blocker;
                let g1 = t.gamma(c1.var());
                let e1 = t.eta(c1.var());
                let ok = if !gb {
                    t.is_true(c2) || (self.blockers && t.is_true(b))
                } else if self.blockers {
                    (t.is_true(c2) && t.gamma(c2.var()).is_subset(e1))
                        || (t.is_true(b) && t.gamma(b.var()).is_subset(e1))
                } else {
                    t.is_true(c2) && t.gamma(c2.var()).is_subset_of_union(g1, e1)
                };
                if !ok {
                    found.push((
                        ViolationKind::WatchInvariant,
                        format!("{} watched by {c1} (¬{c1} in τ), other watcher {c2}", self.clause_str(cref)),
                    ));
                }
            }
        }
        let mut total = 0usize;
        for (code, wl) in self.watches.iter().enumerate() {
            let l = crate::lit::Lit::from_code(code);
            for w in wl {
                total += 1;
                let c = self.db.get(w.cref);
                if c.deleted || c.len() < 2 || (c.lits[0] != l && c.lits[1] != l) {
                    found.push((ViolationKind::WatchList, format!("stale entry for {} in wl({l})", self.clause_str(w.cref))));
                } else if w.blocker == l || !c.lits.contains(&w.blocker) {
                    found.push((ViolationKind::WatchList, format!("bad blocker {} in wl({l})", w.blocker)));
                }
            }
        }
        if total != expected {
            found.push((ViolationKind::WatchList, format!("{total} watch entries, expected {expected}")));
        }
        for (k, d) in found {
            self.violate(context, k, d);
        }
    }

    /// With an empty queue no clause may be falsified or unit.
    pub(crate) fn check_fixpoint(&mut self, context: &'static str) {
        let mut found = Vec::new();
        let t = &self.trail;
        if !t.queue_is_empty() {
            found.push("queue not empty at fixpoint".to_string());
        }
        for (cref, c) in self.db.iter_live() {
            if c.lits.iter().any(|&l| t.is_true(l)) {
                continue;
            }
            let free = c.lits.iter().filter(|&&l| !t.is_false(l)).count();
            if free == 0 {
                found.push(format!("{} falsified", self.clause_str(cref)));
            } else if free == 1 {
                found.push(format!("{} unit", self.clause_str(cref)));
            }
        }
        for d in found {
            self.violate(context, ViolationKind::Fixpoint, d);
        }
    }

    /// Trail order, levels, chunk sets and chunk registry.
    pub(crate) fn check_graph(&mut self, context: &'static str) {
        use ViolationKind::*;
        let mut found = Vec::new();
        let gb = self.cfg.mode == Mode::Gb;
        let t = &self.trail;
        let mut assigned = 0;
        for v in 0..self.num_vars {
            if t.is_assigned(crate::lit::Var::from_index(v)) {
                assigned += 1;
            }
        }
        if assigned != t.len() {
            found.push((TrailOrder, format!("{assigned} assigned variables, trail has {}", t.len())));
        }
        let mut decisions = 0u32;
        for (i, &l) in t.lits().iter().enumerate() {
            let v = l.var();
            if !t.is_true(l) {
                found.push((TrailOrder, format!("{l} on trail but not true")));
                continue;
            }
            if t.position(v) != i {
                found.push((TrailOrder, format!("{l} at {i}, recorded at {}", t.position(v))));
            }
            let g = t.gamma(v);
            for ck in g.iter().chain(t.eta(v).iter()) {
                if !t.chunks().is_live(ck) {
                    found.push((Chunk, format!("{l} refers to dead chunk {ck}")));
                }
            }
            match t.reason(v) {
                None => {
                    decisions += 1;
                    if t.level(v) != decisions {
                        found.push((Level, format!("decision {l} at level {}, expected {decisions}", t.level(v))));
                    }
                    match g.first() {
                        Some(ck) if g.len() == 1 => {
                            if !t.chunks().is_live(ck) || t.chunks().decision(ck) != l {
                                found.push((Chunk, format!("decision {l} owns chunk {ck} registered elsewhere")));
                            }
                        }
                        _ => found.push((Gamma, format!("decision {l} has γ {g:?}"))),
                    }
                }
                Some(r) => {
                    let c = self.db.get(r);
                    if !c.lits.contains(&l) {
                        found.push((TrailOrder, format!("reason {} of {l} lacks it", self.clause_str(r))));
                        continue;
                    }
                    let mut level = 0;
                    let mut gamma = ChunkSet::new();
                    for &q in &c.lits {
                        if q == l {
                            continue;
                        }
                        let qv = q.var();
                        if !t.is_false(q) || t.position(qv) >= i {
                            found.push((TrailOrder, format!("premise {q} of {l} not false before it")));
                            continue;
                        }
                        level = level.max(t.level(qv));
                        gamma.union_with(t.gamma(qv));
                    }
                    if t.level(v) != level {
                        found.push((Level, format!("{l} at level {}, premises give {level}", t.level(v))));
                    }
                    if *g != gamma {
                        found.push((Gamma, format!("γ({l}) = {g:?}, premises give {gamma:?}")));
                    }
                }
            }
            if (t.level(v) == 0) != g.is_empty() {
                found.push((Gamma, format!("{l} at level {} with γ {g:?}", t.level(v))));
            }
            if gb && t.is_propagated(v) && !g.is_subset(t.eta(v)) {
                found.push((Eta, format!("γ({l}) not within η")));
            }
        }
        if t.chunks().live_count() != decisions as usize || t.decision_count() != decisions as usize {
            found.push((
                Chunk,
                format!(
                    "{} live chunks, counter {}, {decisions} decisions on trail",
                    t.chunks().live_count(),
                    t.decision_count()
                ),
            ));
        }
        for (k, d) in found {
            self.violate(context, k, d);
        }
    }

    pub(crate) fn check_model(&mut self, model: &[bool]) {
        let bad: Vec<usize> = self
            .original
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.iter().any(|l| model[l.var().index()] == l.is_positive()))
            .map(|(i, _)| i)
            .collect();
        for i in bad {
            self.violate("model", ViolationKind::Model, format!("input clause {i} unsatisfied"));
        }
    }
}
