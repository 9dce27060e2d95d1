//! Conflict repair: choose what to undo and what to learn, then apply it.
//!
//! A repair is computed as a [`RepairPlan`] first, without touching the
//! state, so that different strategies can be compared on the same conflict.

use crate::analyze::Analysis;
use crate::chunkset::{ChunkId, ChunkSet};
use crate::clause::ClauseRef;
use crate::lit::{Lit, Var};
use crate::policy::WeightProfile;
use crate::solver::{ConflictRecord, Mode, Solver};

/// How to repair a conflict.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// What the configuration asks for.
    Native,
    /// Level-based first UIP, undo every level ≥ δ(C).
    CbReference,
    /// Level-based first UIP, undo every level above the assertion level.
    NcbReference,
    /// Chunk selection under a weight profile.
    Chunks { profile: WeightProfile, bb: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Undo {
    Chunks(ChunkSet),
    /// Every literal with level ≥ the bound.
    FromLevel(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepairPlan {
    pub conflict: ClauseRef,
    pub conflict_level: u32,
    /// Learned clause, asserting literal first.
    pub learned: Vec<Lit>,
    pub asserting: Lit,
    pub undo: Undo,
    /// Literals the undo removes, in trail order.
    pub unassigned: Vec<Lit>,
    /// Chunks whose decision is removed.
    pub undone_chunks: ChunkSet,
    /// Clauses used by the analysis.
    pub trace: Vec<ClauseRef>,
    /// Set when the learned clause is the conflict clause itself.
    pub reuse: Option<ClauseRef>,
    pub new_clause: bool,
    pub candidates_considered: usize,
}

impl Solver {
    /// Computes a repair for `conflict`. Returns `None` for a root conflict.
    pub fn plan_repair(&mut self, conflict: ClauseRef, strategy: Strategy) -> Option<RepairPlan> {
        let lits = self.db.lits(conflict).to_vec();
        let level = self.trail.level_of(&lits, None);
        if level == 0 {
            return None;
        }
        let strategy = match strategy {
            Strategy::Native => match self.cfg.mode {
                Mode::Cb => Strategy::CbReference,
                Mode::Ncb => Strategy::NcbReference,
                Mode::Gb => Strategy::Chunks {
                    profile: self.cfg.weights.clone(),
                    bb: self.cfg.bb,
                },
            },
            s => s,
        };
        let (undo, analysis, considered) = match strategy {
            Strategy::CbReference => {
                let a = self.level_analysis(conflict, level);
                (Undo::FromLevel(level), a, 0)
            }
            Strategy::NcbReference => {
                let a = self.level_analysis(conflict, level);
                let l2 = self.trail.level_of(&a.learned[1..], None);
                (Undo::FromLevel(l2 + 1), a, 0)
            }
            Strategy::Chunks { profile, bb } => match profile {
                WeightProfile::CbSim => {
                    let (u, a) = self.cb_closed_form(conflict, level);
                    (Undo::Chunks(u), a, 0)
                }
                WeightProfile::NcbSim => {
                    let (u, a) = self.ncb_closed_form(conflict);
                    (Undo::Chunks(u), a, 0)
                }
                p => {
                    let sel = if bb {
                        self.select_with_bb(conflict, &p)
                    } else {
                        self.select_chunk(conflict, &p)
                    };
                    (Undo::Chunks(sel.backtrack), sel.analysis, sel.considered)
                }
            },
            Strategy::Native => unreachable!(),
        };
        let t = &self.trail;
        let removed = |v: Var| match &undo {
            Undo::Chunks(s) => t.gamma(v).intersects(s),
            Undo::FromLevel(m) => t.level(v) >= *m,
        };
        let unassigned: Vec<Lit> = t.lits().iter().copied().filter(|l| removed(l.var())).collect();
        let undone_chunks: ChunkSet = unassigned
            .iter()
            .filter_map(|l| t.own_chunk(l.var()))
            .collect();
        // Under BB the undone chunk may differ from the analysis scope; the
        // literal that becomes unit is the asserting one.
        let mut analysis = analysis;
        let undone: Vec<usize> = (0..analysis.learned.len())
            .filter(|&i| unassigned.contains(&!analysis.learned[i]))
            .collect();
        if let [i] = undone[..] {
            analysis.learned.swap(0, i);
            analysis.asserting = analysis.learned[0];
        }
        let reuse = analysis.is_conflict_clause().then_some(conflict);
        let new_clause = reuse.is_none() && self.is_new_clause(&analysis.learned);
        Some(RepairPlan {
            conflict,
            conflict_level: level,
            asserting: analysis.asserting,
            learned: analysis.learned,
            undo,
            unassigned,
            undone_chunks,
            trace: analysis.trace,
            reuse,
            new_clause,
            candidates_considered: considered,
        })
    }

    fn level_analysis(&mut self, conflict: ClauseRef, level: u32) -> Analysis {
        self.analyze_scoped(conflict, |s, v| s.trail.level(v) == level, None, &[])
            .expect("first-UIP analysis on the conflict level terminates")
    }

    fn chunks_from_level(&self, min_level: u32) -> ChunkSet {
        self.trail
            .chunks()
            .live_ids()
            .filter(|&ck| self.trail.chunk_level(ck) >= min_level)
            .collect()
    }

    fn top_chunk_of(&self, conflict: ClauseRef, level: u32) -> ChunkId {
        let gc = self.trail.gamma_of(self.db.lits(conflict), None);
        let top = gc.iter().find(|&ck| self.trail.chunk_level(ck) == level);
        top.expect("some chunk of the conflict has its level")
    }

    /// CB expressed over chunks: undo all chunks at or above δ(C), learn
    /// through the top chunk.
    pub(crate) fn cb_closed_form(&mut self, conflict: ClauseRef, level: u32) -> (ChunkSet, Analysis) {
        let top = ChunkSet::singleton(self.top_chunk_of(conflict, level));
        let a = self.analyze_for(conflict, &top, None).expect("single chunk analysis");
        (self.chunks_from_level(level), a)
    }

    /// NCB expressed over chunks: undo all chunks above the assertion level,
    /// learn through the top chunk.
    pub(crate) fn ncb_closed_form(&mut self, conflict: ClauseRef) -> (ChunkSet, Analysis) {
        let level = self.trail.level_of(self.db.lits(conflict), None);
        let top = ChunkSet::singleton(self.top_chunk_of(conflict, level));
        let a = self.analyze_for(conflict, &top, None).expect("single chunk analysis");
        let l2 = self.trail.level_of(&a.learned[1..], None);
        (self.chunks_from_level(l2 + 1), a)
    }

    /// Applies a plan computed on the current state.
    pub fn apply_repair(&mut self, plan: &RepairPlan) {
        self.stats.candidates_considered += plan.candidates_considered as u64;
        let mut bumped: Vec<Var> = Vec::new();
        for &c in &plan.trace {
            for &l in self.db.lits(c) {
                bumped.push(l.var());
            }
        }
        bumped.sort_unstable();
        bumped.dedup();
        for v in bumped {
            self.bump_var(v);
        }
        if self.cfg.record_conflicts {
            let t = &self.trail;
            self.log.push(ConflictRecord {
                conflict: self.db.lits(plan.conflict).to_vec(),
                conflict_level: plan.conflict_level,
                learned: plan.learned.clone(),
                asserting: plan.asserting,
                unassigned: plan.unassigned.clone(),
                undone_decisions: plan
                    .undone_chunks
                    .iter()
                    .map(|ck| t.chunks().decision(ck))
                    .collect(),
                new_clause: plan.new_clause,
            });
        }
        if let Some(c) = plan.reuse {
            self.detach(c);
        }
        let n = match &plan.undo {
            Undo::Chunks(s) => self.undo_chunks(s),
            Undo::FromLevel(m) => self.undo_levels(*m),
        };
        self.stats.unassigned_literals += n as u64;
        self.learn(&plan.learned, plan.reuse);
        if self.cfg.check {
            self.check_watches("repair");
            self.check_graph("repair");
        }
    }

    /// Stores a learned clause (or re-watches a reused one) and enqueues its
    /// unit literal if there is one.
    fn learn(&mut self, lits: &[Lit], reuse: Option<ClauseRef>) {
        let gb = self.cfg.mode == Mode::Gb;
        let cref = match reuse {
            Some(c) => {
                self.db.get_mut(c).lits = lits.to_vec();
                c
            }
            None => {
                self.stats.learned_clauses += 1;
                self.db.push(lits.to_vec(), true)
            }
        };
        let t = &self.trail;
        let free: Vec<Lit> = lits.iter().copied().filter(|&l| !t.is_false(l)).collect();
        if lits.len() == 1 {
            let u = lits[0];
            if !t.is_assigned(u.var()) {
                self.trail.push(u, 0, Some(cref), ChunkSet::new());
                self.root_dirty = true;
            } else if t.is_false(u) {
                self.pending_conflict = Some(cref);
            }
            return;
        }
        if free.len() == 1 && !t.is_true(free[0]) {
            let u = free[0];
            self.attach(cref, Some(u));
            let c1 = self.db.lits(cref)[1];
            let level = self.trail.level_of(lits, Some(u));
            let gamma = self.trail.gamma_of(lits, Some(u));
            if gb {
                self.trail.eta[c1.var().index()].union_with(&gamma);
            }
            self.trail.push(u, level, Some(cref), gamma);
            if level == 0 {
                self.root_dirty = true;
            }
        } else {
            self.attach(cref, None);
            let (w0, w1) = (self.db.lits(cref)[0], self.db.lits(cref)[1]);
            if gb && self.trail.is_true(w0) && self.trail.is_false(w1) {
                let g = self.trail.gamma(w0.var()).clone();
                self.trail.eta[w1.var().index()].union_with(&g);
            }
            if free.is_empty() {
                self.pending_conflict = Some(cref);
            }
        }
    }
}
