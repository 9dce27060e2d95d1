//! Chunk merges on missed implications of decisions.
//!
//! When propagation finds a clause C that would imply an assigned decision
//! d, with ck_d ∉ γ(C \ {d}), d can become an implied literal with reason C
//! and γ = γ(C \ {d}). The eager variant rewrites the graph immediately; the
//! lazy one keeps a record and only uses it during chunk selection.

use crate::chunkset::ChunkSet;
use crate::clause::ClauseRef;
use crate::lit::Lit;
use crate::solver::{Merge, Solver};

/// A pending lazy merge of decision `decision` through `clause`.
#[derive(Clone, Debug, PartialEq)]
pub struct LazyMergeRecord {
    pub decision: Lit,
    pub clause: ClauseRef,
    /// γ(clause \ {decision}).
    pub targets: ChunkSet,
}

impl Solver {
    /// Whether `clause` still implies the decision `d` without a cycle.
    pub(crate) fn merge_valid(&self, d: Lit, clause: ClauseRef) -> Option<ChunkSet> {
        let t = &self.trail;
        if !t.is_true(d) || !t.is_decision(d.var()) {
            return None;
        }
        let c = self.db.get(clause);
        if c.deleted {
            return None;
        }
        for &l in &c.lits {
            if l != d && !t.is_false(l) {
                return None;
            }
        }
        let ck = t.own_chunk(d.var())?;
        let s = t.gamma_of(&c.lits, Some(d));
        if s.contains(ck) {
            return None;
        }
        Some(s)
    }

    pub(crate) fn apply_pending_merges(&mut self) {
        let pending = std::mem::take(&mut self.pending_merges);
        for (d, clause) in pending {
            match self.cfg.merge {
                Merge::Eager => {
                    self.eager_merge(d, clause);
                }
                Merge::Lazy => {
                    self.record_lazy_merge(d, clause);
                }
                Merge::None => {}
            }
        }
    }

    /// Stores a lazy record. A record with fewer targets wins.
    pub(crate) fn record_lazy_merge(&mut self, d: Lit, clause: ClauseRef) -> bool {
        let Some(targets) = self.merge_valid(d, clause) else {
            return false;
        };
        let slot = &mut self.lazy[d.var().index()];
        let replace = match slot {
            Some(r) => r.decision != d || targets.len() < r.targets.len(),
            None => true,
        };
        if replace {
            if slot.is_none() {
                self.lazy_vars.push(d.var());
            }
            *slot = Some(LazyMergeRecord {
                decision: d,
                clause,
                targets,
            });
            self.stats.lazy_records += 1;
        }
        replace
    }

    /// Drops records that no longer apply.
    pub(crate) fn revalidate_lazy(&mut self) {
        let vars = std::mem::take(&mut self.lazy_vars);
        let mut keep = Vec::with_capacity(vars.len());
        for v in vars {
            let Some(r) = self.lazy[v.index()].clone() else {
                continue;
            };
            match self.merge_valid(r.decision, r.clause) {
                Some(targets) => {
                    self.lazy[v.index()] = Some(LazyMergeRecord { targets, ..r });
                    keep.push(v);
                }
                None => self.lazy[v.index()] = None,
            }
        }
        self.lazy_vars = keep;
    }

    /// The current lazy record for a decision variable.
    pub fn lazy_record(&self, d: Lit) -> Option<&LazyMergeRecord> {
        self.lazy[d.var().index()].as_ref().filter(|r| r.decision == d)
    }

    /// Turns decision `d` into a literal implied by `clause` and folds its
    /// chunk into γ(clause \ {d}).
    pub(crate) fn eager_merge(&mut self, d: Lit, clause: ClauseRef) -> bool {
        let Some(s) = self.merge_valid(d, clause) else {
            return false;
        };
        let dv = d.var();
        let ck = self.trail.own_chunk(dv).expect("decision has a chunk");
        let start = self.trail.position(dv);
        let pmax = self
            .db
            .lits(clause)
            .iter()
            .filter(|&&l| l != d)
            .map(|l| self.trail.position(l.var()))
            .max()
            .unwrap_or(start)
            .max(start);

        // Stable reorder so premises precede d and its dependents.
        let t = &mut self.trail;
        let block: Vec<Lit> = t.lits[start..=pmax].to_vec();
        let (moved, stay): (Vec<Lit>, Vec<Lit>) =
            block.into_iter().partition(|l| t.gamma[l.var().index()].contains(ck));
        for (slot, l) in t.lits[start..=pmax].iter_mut().zip(stay.into_iter().chain(moved)) {
            *slot = l;
        }

        t.reason[dv.index()] = Some(clause);
        t.decisions -= 1;
        for l in &t.lits {
            let v = l.var().index();
            if t.gamma[v].contains(ck) {
                t.gamma[v].substitute(ck, &s);
            }
            if t.eta[v].contains(ck) {
                t.eta[v].substitute(ck, &s);
            }
        }
        t.chunks.retire(ck);
        t.reindex();
        self.recompute_levels();
        if s.is_empty() {
            self.root_dirty = true;
        }
        if let Some(r) = &self.lazy[dv.index()] {
            if r.decision == d {
                self.lazy[dv.index()] = None;
            }
        }
        self.stats.eager_merges += 1;
        if self.cfg.check {
            self.check_graph("merge");
        }
        true
    }
}
