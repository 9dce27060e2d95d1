//! Two-watched-literal propagation.
//!
//! wl(ℓ) holds the clauses watched by ℓ; a clause keeps its watchers in
//! positions 0 and 1. Propagating a true literal p visits wl(¬p).
//!
//! In GB mode the skip test also requires the other watcher (or blocker) to
//! not depend on chunks outside η(¬p), and every move that leaves the clause
//! watched by a falsified literal r widens η(r). That keeps
//! `¬c1 ∈ τ ⇒ c2 ∈ π ∧ γ(c2) ⊆ γ(c1) ∪ η(c1)` across chunk undos. In NCB and
//! CB mode the plain `¬c1 ∈ τ ⇒ c2 ∈ π` form is kept.

use crate::chunkset::ChunkSet;
use crate::clause::ClauseRef;
use crate::lit::Lit;
use crate::solver::{Merge, Mode, Solver};
use crate::trail::Trail;

/// Entry of a watch list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Watch {
    pub cref: ClauseRef,
    /// A literal of the clause other than the owning watcher.
    pub blocker: Lit,
}

/// Result of attaching a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attach {
    Watched,
    /// The literal was enqueued at root.
    Unit(Lit),
    /// Empty clause.
    Empty,
}

/// Ordering key for watcher choice; smaller is better.
fn watcher_key(trail: &Trail, gb: bool, lit: Lit, index: usize) -> (u8, usize, u64) {
    let v = lit.var();
    if trail.is_false(lit) {
        let pos = trail.position(v) as u64;
        if gb {
            (2, trail.gamma(v).len(), u64::MAX - pos)
        } else {
            (2, u32::MAX as usize - trail.level(v) as usize, u64::MAX - pos)
        }
    } else if trail.is_true(lit) {
        (1, trail.gamma(v).len(), index as u64)
    } else {
        (0, 0, index as u64)
    }
}

impl Solver {
    /// Installs watches for a clause of length ≥ 2. With `asserting`, that
    /// literal becomes the first watcher.
    pub(crate) fn attach(&mut self, cref: ClauseRef, asserting: Option<Lit>) {
        let gb = self.cfg.mode == Mode::Gb;
        let trail = &self.trail;
        let lits = &mut self.db.get_mut(cref).lits;
        debug_assert!(lits.len() >= 2);
        let start = match asserting {
            Some(a) => {
                let i = lits.iter().position(|&l| l == a).expect("asserting literal in clause");
                lits.swap(0, i);
                1
            }
            None => 0,
        };
        for slot in start..2 {
            let best = (slot..lits.len())
                .min_by_key(|&i| watcher_key(trail, gb, lits[i], i))
                .unwrap();
            lits.swap(slot, best);
        }
        let (a, b) = (lits[0], lits[1]);
        self.watches[a.code()].push(Watch { cref, blocker: b });
        self.watches[b.code()].push(Watch { cref, blocker: a });
    }

    /// Removes the watches of a clause.
    pub(crate) fn detach(&mut self, cref: ClauseRef) {
        let lits = self.db.lits(cref);
        if lits.len() < 2 {
            return;
        }
        let (a, b) = (lits[0], lits[1]);
        self.watches[a.code()].retain(|w| w.cref != cref);
        self.watches[b.code()].retain(|w| w.cref != cref);
    }

    /// Adds a clause to the formula while solving. Used for clauses that
    /// arrive from outside the analysis, such as in tests.
    pub fn add_clause(&mut self, lits: &[Lit], learned: bool) -> Attach {
        let Some(lits) = crate::clause::normalize(lits) else {
            return Attach::Watched;
        };
        match lits.len() {
            0 => {
                self.unsat = true;
                Attach::Empty
            }
            1 => {
                let l = lits[0];
                let cref = self.db.push(lits, learned);
                if !self.trail.is_assigned(l.var()) {
                    self.trail.push(l, 0, Some(cref), ChunkSet::new());
                    self.root_dirty = true;
                }
                Attach::Unit(l)
            }
            _ => {
                let cref = self.db.push(lits, learned);
                self.attach(cref, None);
                Attach::Watched
            }
        }
    }

    /// Replacement watcher for `c1` in clause `cref`, also watched by `c2`.
    ///
    /// A non-falsified literal of `C \ {c1, c2}` is preferred. Otherwise the
    /// falsified literal of `C \ {c2}` assigned latest is returned, which is
    /// `c1` itself for binary clauses.
    pub fn search_replacement(&self, cref: ClauseRef, c1: Lit, c2: Lit) -> Lit {
        let lits = self.db.lits(cref);
        let mut best = c1;
        let mut best_pos = self.trail.position(c1.var());
        for &l in lits {
            if l == c1 || l == c2 {
                continue;
            }
            if !self.trail.is_false(l) {
                return l;
            }
            let p = self.trail.position(l.var());
            if p > best_pos {
                best = l;
                best_pos = p;
            }
        }
        best
    }

    /// Propagates ω until it is empty or a clause is falsified.
    pub(crate) fn bcp(&mut self) -> Option<ClauseRef> {
        let gb = self.cfg.mode == Mode::Gb;
        let track_misses = gb && self.cfg.merge != Merge::None;
        let blockers = self.blockers;
        while let Some(i) = self.trail.next_unpropagated() {
            let p = self.trail.lits[i];
            let pv = p.var().index();
            let c1 = !p;
            if gb {
                let (gamma, eta) = (&self.trail.gamma, &mut self.trail.eta);
                eta[pv].clone_from(&gamma[pv]);
            }
            let mut ws = std::mem::take(&mut self.watches[c1.code()]);
            let mut kept = 0;
            let mut k = 0;
            let mut conflict = None;
            while k < ws.len() {
                let w = ws[k];
                k += 1;
                let trail = &mut self.trail;
                if blockers
                    && trail.is_true(w.blocker)
                    && (!gb || trail.gamma[w.blocker.var().index()].is_subset(&trail.eta[pv]))
                {
                    ws[kept] = w;
                    kept += 1;
                    continue;
                }
                let cref = w.cref;
                let lits = &mut self.db.get_mut(cref).lits;
                if lits[0] != c1 {
                    lits.swap(0, 1);
                }
                debug_assert_eq!(lits[0], c1);
                let c2 = lits[1];
                let c2v = c2.var().index();
                if trail.is_true(c2) && (!gb || trail.gamma[c2v].is_subset(&trail.eta[pv])) {
                    ws[kept] = Watch { cref, blocker: c2 };
                    kept += 1;
                    continue;
                }
                // Search a replacement: first non-falsified literal, else
                // the latest falsified one among C \ {c2}.
                let mut ri = 0;
                let mut best_pos = trail.pos[pv];
                let mut found_free = false;
                for (j, &l) in lits.iter().enumerate().skip(2) {
                    if !trail.is_false(l) {
                        ri = j;
                        found_free = true;
                        break;
                    }
                    let pj = trail.pos[l.var().index()];
                    if pj > best_pos {
                        best_pos = pj;
                        ri = j;
                    }
                }
                let r = lits[ri];
                if ri != 0 {
                    lits.swap(0, ri);
                    self.watches[r.code()].push(Watch { cref, blocker: c2 });
                } else {
                    ws[kept] = Watch { cref, blocker: c2 };
                    kept += 1;
                }
                if found_free {
                    continue;
                }
                if trail.is_false(c2) {
                    conflict = Some(cref);
                    break;
                }
                if trail.is_true(c2) {
                    // Missed implication: c2 is already true but C would
                    // have implied it.
                    if gb {
                        let rv = r.var().index();
                        let g = trail.gamma[c2v].clone();
                        trail.eta[rv].union_with(&g);
                    }
                    if track_misses && trail.is_decision(c2.var()) {
                        self.pending_merges.push((c2, cref));
                    }
                    continue;
                }
                let lits = &self.db.get(cref).lits;
                let mut level = 0;
                let mut gamma = ChunkSet::new();
                for &l in &lits[..] {
                    if l != c2 {
                        let lv = l.var().index();
                        level = level.max(trail.level[lv]);
                        gamma.union_with(&trail.gamma[lv]);
                    }
                }
                if gb {
                    trail.eta[r.var().index()].union_with(&gamma);
                }
                trail.push(c2, level, Some(cref), gamma);
                if level == 0 {
                    self.root_dirty = true;
                }
            }
            while k < ws.len() {
                ws[kept] = ws[k];
                kept += 1;
                k += 1;
            }
            ws.truncate(kept);
            debug_assert!(self.watches[c1.code()].is_empty());
            self.watches[c1.code()] = ws;
            if conflict.is_none() {
                self.trail.propagated[pv] = true;
                self.stats.propagations += 1;
            }
            if !self.pending_merges.is_empty() {
                self.apply_pending_merges();
            }
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }
}
