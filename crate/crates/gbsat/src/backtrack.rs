//! Undoing parts of the trail.

use crate::chunkset::ChunkSet;
use crate::lit::Lit;
use crate::solver::Solver;

impl Solver {
    /// Unassigns every literal depending on a chunk of `chunks`, moves
    /// survivors with a cross-chunk in `chunks` back to ω, and retires the
    /// chunks. Returns the number of literals unassigned.
    pub(crate) fn undo_chunks(&mut self, chunks: &ChunkSet) -> usize {
        if chunks.is_empty() {
            return 0;
        }
        let t = &mut self.trail;
        let old = std::mem::take(&mut t.lits);
        let mut kept: Vec<Lit> = Vec::with_capacity(old.len());
        let mut removed = 0;
        for &l in &old {
            let v = l.var();
            if t.gamma[v.index()].intersects(chunks) {
                if t.is_decision(v) {
                    t.decisions -= 1;
                }
                t.clear_var(v);
                self.vsids.insert(v);
                removed += 1;
            } else {
                // A cross-chunk was undone: the literal is propagated again.
                let e = &mut t.eta[v.index()];
                if e.intersects(chunks) {
                    e.difference_with(chunks);
                    t.propagated[v.index()] = false;
                }
                kept.push(l);
            }
        }
        t.lits = kept;
        for ck in chunks.iter() {
            if t.chunks.is_live(ck) {
                t.chunks.retire(ck);
            }
        }
        t.reindex();
        self.recompute_levels();
        self.after_undo();
        removed
    }

    /// Unassigns every literal with level ≥ `min_level`. Survivors placed
    /// after the first removed literal go back to ω.
    pub(crate) fn undo_levels(&mut self, min_level: u32) -> usize {
        let t = &mut self.trail;
        let old = std::mem::take(&mut t.lits);
        let mut kept: Vec<Lit> = Vec::with_capacity(old.len());
        let mut removed = 0;
        let mut cut = false;
        for &l in &old {
            let v = l.var();
            if t.level(v) >= min_level {
                if t.is_decision(v) {
                    let ck = t.own_chunk(v).expect("decision has a chunk");
                    t.chunks.retire(ck);
                    t.decisions -= 1;
                }
                t.clear_var(v);
                self.vsids.insert(v);
                removed += 1;
                cut = true;
            } else {
                if cut {
                    t.propagated[v.index()] = false;
                }
                kept.push(l);
            }
        }
        t.lits = kept;
        t.reindex();
        self.after_undo();
        removed
    }

    fn after_undo(&mut self) {
        self.pending_merges.clear();
        self.pending_conflict = None;
        if !self.lazy_vars.is_empty() {
            self.revalidate_lazy();
        }
    }

    /// Recomputes δ left to right: decisions are numbered in trail order,
    /// implied literals take the maximum over their premises.
    pub(crate) fn recompute_levels(&mut self) {
        let t = &mut self.trail;
        let mut dec = 0u32;
        for i in 0..t.lits.len() {
            let l = t.lits[i];
            let v = l.var().index();
            match t.reason[v] {
                None => {
                    dec += 1;
                    t.level[v] = dec;
                }
                Some(r) => {
                    let lv = self
                        .db
                        .lits(r)
                        .iter()
                        .filter(|q| q.var() != l.var())
                        .map(|q| t.level[q.var().index()])
                        .max()
                        .unwrap_or(0);
                    t.level[v] = lv;
                }
            }
        }
        t.decisions = dec as usize;
    }
}
