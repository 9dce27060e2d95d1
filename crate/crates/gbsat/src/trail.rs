//! The trail π and per-variable metadata.
//!
//! π is kept as one ordered vector. Whether a literal belongs to the
//! propagated set τ or to the queue ω is a per-variable flag, so both parts
//! keep their relative order under removals. `qhead` is a cursor with every
//! trail entry before it in τ.
//!
//! Chunk sets are stored per variable, so γ(ℓ) = γ(¬ℓ).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::chunkset::{ChunkId, ChunkSet};
use crate::clause::ClauseRef;
use crate::lit::{Lit, Var};

/// Level of an unassigned variable.
pub const LEVEL_INF: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Value {
    True,
    False,
    Unassigned,
}

const UNDEF: u8 = 0;
const TRUE: u8 = 1;
const FALSE: u8 = 2;

/// Bookkeeping for one chunk id slot.
#[derive(Clone, Debug)]
pub struct ChunkInfo {
    pub decision: Lit,
    /// Bumped every time the slot is retired.
    pub generation: u32,
    pub live: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ChunkRegistry {
    infos: Vec<ChunkInfo>,
    free: BinaryHeap<Reverse<ChunkId>>,
    live: usize,
}

impl ChunkRegistry {
    /// Allocates the smallest free id for a new chunk of `decision`.
    pub fn alloc(&mut self, decision: Lit) -> ChunkId {
        self.live += 1;
        if let Some(Reverse(id)) = self.free.pop() {
            let info = &mut self.infos[id as usize];
            info.decision = decision;
            info.live = true;
            id
        } else {
            self.infos.push(ChunkInfo {
                decision,
                generation: 0,
                live: true,
            });
            (self.infos.len() - 1) as ChunkId
        }
    }

    pub fn retire(&mut self, id: ChunkId) {
        let info = &mut self.infos[id as usize];
        assert!(info.live, "retiring dead chunk {id}");
        info.live = false;
        info.generation = info.generation.wrapping_add(1);
        self.live -= 1;
        self.free.push(Reverse(id));
    }

    #[inline]
    pub fn is_live(&self, id: ChunkId) -> bool {
        self.infos.get(id as usize).is_some_and(|i| i.live)
    }

    #[inline]
    pub fn info(&self, id: ChunkId) -> &ChunkInfo {
        &self.infos[id as usize]
    }

    #[inline]
    pub fn decision(&self, id: ChunkId) -> Lit {
        self.infos[id as usize].decision
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn live_ids(&self) -> impl Iterator<Item = ChunkId> + '_ {
        self.infos
            .iter()
            .enumerate()
            .filter(|(_, i)| i.live)
            .map(|(id, _)| id as ChunkId)
    }
}

#[derive(Clone, Debug)]
pub struct Trail {
    /// π in order.
    pub(crate) lits: Vec<Lit>,
    vals: Vec<u8>,
    pub(crate) level: Vec<u32>,
    pub(crate) reason: Vec<Option<ClauseRef>>,
    pub(crate) gamma: Vec<ChunkSet>,
    pub(crate) eta: Vec<ChunkSet>,
    pub(crate) pos: Vec<u32>,
    pub(crate) propagated: Vec<bool>,
    pub(crate) phase: Vec<bool>,
    pub(crate) decisions: usize,
    pub(crate) qhead: usize,
    pub(crate) chunks: ChunkRegistry,
}

impl Trail {
    pub fn new(num_vars: usize) -> Trail {
        Trail {
            lits: Vec::with_capacity(num_vars),
            vals: vec![UNDEF; 2 * num_vars],
            level: vec![LEVEL_INF; num_vars],
            reason: vec![None; num_vars],
            gamma: vec![ChunkSet::new(); num_vars],
            eta: vec![ChunkSet::new(); num_vars],
            pos: vec![u32::MAX; num_vars],
            propagated: vec![false; num_vars],
            phase: vec![false; num_vars],
            decisions: 0,
            qhead: 0,
            chunks: ChunkRegistry::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.level.len()
    }

    #[inline]
    pub fn value(&self, lit: Lit) -> Value {
        match self.vals[lit.code()] {
            TRUE => Value::True,
            FALSE => Value::False,
            _ => Value::Unassigned,
        }
    }

    #[inline]
    pub fn is_true(&self, lit: Lit) -> bool {
        self.vals[lit.code()] == TRUE
    }

    #[inline]
    pub fn is_false(&self, lit: Lit) -> bool {
        self.vals[lit.code()] == FALSE
    }

    #[inline]
    pub fn is_assigned(&self, var: Var) -> bool {
        self.vals[var.pos().code()] != UNDEF
    }

    /// The assigned literal of `var`, if any.
    #[inline]
    pub fn assigned_lit(&self, var: Var) -> Option<Lit> {
        match self.vals[var.pos().code()] {
            TRUE => Some(var.pos()),
            FALSE => Some(var.neg()),
            _ => None,
        }
    }

    #[inline]
    pub fn level(&self, var: Var) -> u32 {
        self.level[var.index()]
    }

    #[inline]
    pub fn reason(&self, var: Var) -> Option<ClauseRef> {
        self.reason[var.index()]
    }

    #[inline]
    pub fn gamma(&self, var: Var) -> &ChunkSet {
        &self.gamma[var.index()]
    }

    #[inline]
    pub fn eta(&self, var: Var) -> &ChunkSet {
        &self.eta[var.index()]
    }

    #[inline]
    pub fn position(&self, var: Var) -> usize {
        self.pos[var.index()] as usize
    }

    #[inline]
    pub fn is_propagated(&self, var: Var) -> bool {
        self.propagated[var.index()]
    }

    pub fn phase(&self, var: Var) -> bool {
        self.phase[var.index()]
    }

    /// π in trail order.
    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn decision_count(&self) -> usize {
        self.decisions
    }

    pub fn chunks(&self) -> &ChunkRegistry {
        &self.chunks
    }

    /// A decision is an assigned literal without reason and with a chunk.
    #[inline]
    pub fn is_decision(&self, var: Var) -> bool {
        self.is_assigned(var) && self.reason[var.index()].is_none() && self.level(var) > 0
    }

    /// The chunk created by decision `var`.
    pub fn own_chunk(&self, var: Var) -> Option<ChunkId> {
        if !self.is_decision(var) {
            return None;
        }
        let g = &self.gamma[var.index()];
        let id = g.first()?;
        debug_assert_eq!(g.len(), 1);
        Some(id)
    }

    /// δ_γ of a live chunk.
    #[inline]
    pub fn chunk_level(&self, id: ChunkId) -> u32 {
        self.level(self.chunks.decision(id).var())
    }

    /// Max chunk level over a set, 0 when empty.
    pub fn chunkset_level(&self, set: &ChunkSet) -> u32 {
        set.iter().map(|c| self.chunk_level(c)).max().unwrap_or(0)
    }

    /// δ(ℓ) for the latest decision on the trail, 0 at root.
    pub fn current_level(&self) -> u32 {
        self.decisions as u32
    }

    /// Appends `lit` at the end of π, in ω.
    pub(crate) fn push(&mut self, lit: Lit, level: u32, reason: Option<ClauseRef>, gamma: ChunkSet) {
        let v = lit.var().index();
        debug_assert_eq!(self.vals[lit.code()], UNDEF);
        self.vals[lit.code()] = TRUE;
        self.vals[(!lit).code()] = FALSE;
        self.level[v] = level;
        self.reason[v] = reason;
        self.gamma[v] = gamma;
        self.eta[v].clear();
        self.pos[v] = self.lits.len() as u32;
        self.propagated[v] = false;
        self.lits.push(lit);
    }

    /// Clears the assignment of `var` without touching π itself.
    pub(crate) fn clear_var(&mut self, var: Var) {
        let v = var.index();
        let lit = var.pos();
        self.phase[v] = self.vals[lit.code()] == TRUE;
        self.vals[lit.code()] = UNDEF;
        self.vals[(!lit).code()] = UNDEF;
        self.level[v] = LEVEL_INF;
        self.reason[v] = None;
        self.gamma[v].clear();
        self.eta[v].clear();
        self.pos[v] = u32::MAX;
        self.propagated[v] = false;
    }

    /// Rebuilds positions and the propagation cursor after π was rewritten.
    pub(crate) fn reindex(&mut self) {
        for (i, l) in self.lits.iter().enumerate() {
            self.pos[l.var().index()] = i as u32;
        }
        self.qhead = self
            .lits
            .iter()
            .position(|l| !self.propagated[l.var().index()])
            .unwrap_or(self.lits.len());
    }

    /// Index in π of ω[0].
    pub(crate) fn next_unpropagated(&mut self) -> Option<usize> {
        while self.qhead < self.lits.len() {
            if !self.propagated[self.lits[self.qhead].var().index()] {
                return Some(self.qhead);
            }
            self.qhead += 1;
        }
        None
    }

    /// ω in order.
    pub fn queue(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits
            .iter()
            .copied()
            .filter(|l| !self.propagated[l.var().index()])
    }

    pub fn queue_is_empty(&self) -> bool {
        self.lits[self.qhead.min(self.lits.len())..]
            .iter()
            .all(|l| self.propagated[l.var().index()])
    }

    /// δ(lits \ {except}) under the current assignment.
    pub fn level_of(&self, lits: &[Lit], except: Option<Lit>) -> u32 {
        lits.iter()
            .filter(|&&l| Some(l) != except)
            .map(|l| self.level(l.var()))
            .max()
            .unwrap_or(0)
    }

    /// γ(lits \ {except}).
    pub fn gamma_of(&self, lits: &[Lit], except: Option<Lit>) -> ChunkSet {
        let mut s = ChunkSet::new();
        for &l in lits {
            if Some(l) != except {
                s.union_with(&self.gamma[l.var().index()]);
            }
        }
        s
    }
}
