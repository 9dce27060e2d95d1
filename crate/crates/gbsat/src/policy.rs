//! Weights for backtrack candidates and chunk selection.
//!
//! A candidate Γ is a set of chunks meeting γ(C) for the conflict C. Its
//! weight is ζ(Γ) = Σ ζ(ℓ) over the literals ℓ with γ(ℓ) ∩ Γ ≠ ∅, i.e.
//! the literals a backtrack on Γ would unassign.

use std::collections::HashMap;
use std::fmt;

use crate::analyze::Analysis;
use crate::chunkset::{ChunkId, ChunkSet};
use crate::clause::ClauseRef;
use crate::lit::{Lit, Var};
use crate::solver::{Merge, Solver};
use crate::trail::Trail;

/// Per-literal weights read from a file of `<dimacs literal> <weight>` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightTable {
    weights: HashMap<i32, f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTableError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for WeightTableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for WeightTableError {}

impl WeightTable {
    /// Weight of a literal, 1 when absent.
    pub fn get(&self, lit: Lit) -> f64 {
        self.weights.get(&lit.to_dimacs()).copied().unwrap_or(1.0)
    }

    pub fn insert(&mut self, lit: Lit, weight: f64) {
        self.weights.insert(lit.to_dimacs(), weight);
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Parses `<lit> <weight>` lines. Blank lines and lines starting with
    /// `c` or `#` are skipped.
    pub fn parse(text: &str) -> Result<WeightTable, WeightTableError> {
        let mut t = WeightTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| WeightTableError {
                line: i + 1,
                message: m.to_string(),
            };
            let mut parts = line.split_whitespace();
            let lit: i32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("expected a literal"))?;
            if lit == 0 {
                return Err(err("literal 0 is not allowed"));
            }
            let w: f64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("expected a weight"))?;
            if !w.is_finite() {
                return Err(err("weight must be finite"));
            }
            if parts.next().is_some() {
                return Err(err("trailing tokens"));
            }
            t.weights.insert(lit, w);
        }
        Ok(t)
    }
}

/// Literal weight profile ζ.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightProfile {
    /// ζ(ℓ) = 1.
    Constant,
    /// Propagated literals weigh more than queued ones, plus a small penalty
    /// on chunks whose decisions sit early on the trail.
    PropMin {
        propagated: f64,
        queued: f64,
        epsilon: f64,
    },
    /// Weights under which the lightest candidate repeats a CB repair.
    CbSim,
    /// Weights under which the lightest candidate repeats an NCB repair.
    NcbSim,
    UserTable(WeightTable),
}

impl WeightProfile {
    pub fn prop_min() -> WeightProfile {
        WeightProfile::PropMin {
            propagated: 8.0,
            queued: 1.0,
            epsilon: 1.0 / 16.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightProfile::Constant => "constant",
            WeightProfile::PropMin { .. } => "prop-min",
            WeightProfile::CbSim => "cb-sim",
            WeightProfile::NcbSim => "ncb-sim",
            WeightProfile::UserTable(_) => "user-table",
        }
    }

    /// True for profiles with non-negative literal weights.
    pub fn is_positive(&self) -> bool {
        !matches!(self, WeightProfile::CbSim | WeightProfile::NcbSim)
    }
}

/// Conflict-specific data some profiles need.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightContext {
    /// δ(C).
    pub conflict_level: u32,
    /// Second-highest level of the first-UIP clause, 0 if it is unit.
    pub assertion_level: u32,
}

fn literal_weight(profile: &WeightProfile, trail: &Trail, lit: Lit, ctx: &WeightContext) -> f64 {
    let v = lit.var();
    match profile {
        WeightProfile::Constant => 1.0,
        WeightProfile::PropMin {
            propagated, queued, ..
        } => {
            if trail.is_propagated(v) {
                *propagated
            } else {
                *queued
            }
        }
        WeightProfile::CbSim => {
            if trail.level(v) >= ctx.conflict_level {
                -1.0
            } else {
                1.0
            }
        }
        WeightProfile::NcbSim => {
            if trail.level(v) > ctx.assertion_level {
                -1.0
            } else {
                1.0
            }
        }
        WeightProfile::UserTable(t) => t.get(lit),
    }
}

fn chunk_penalty(profile: &WeightProfile, trail: &Trail, chunks: &ChunkSet) -> f64 {
    let WeightProfile::PropMin { epsilon, .. } = profile else {
        return 0.0;
    };
    let n = trail.len().max(1) as f64;
    chunks
        .iter()
        .map(|ck| {
            let pos = trail.position(trail.chunks().decision(ck).var()) as f64;
            epsilon * (1.0 - pos / n)
        })
        .sum()
}

/// ζ(Γ) for a set of chunks under the current trail.
pub fn evaluate_weight(profile: &WeightProfile, trail: &Trail, chunks: &ChunkSet, ctx: &WeightContext) -> f64 {
    let mut w = 0.0;
    for &l in trail.lits() {
        if trail.gamma(l.var()).intersects(chunks) {
            w += literal_weight(profile, trail, l, ctx);
        }
    }
    w + chunk_penalty(profile, trail, chunks)
}

/// A set of chunks to undo for a conflict.
#[derive(Clone, Debug, PartialEq)]
pub struct BacktrackCandidate {
    pub chunks: ChunkSet,
    pub weight: f64,
    /// Highest chunk level in the set.
    pub level: u32,
    /// Filled in once the candidate was analyzed.
    pub learns_new: Option<bool>,
    /// The set was widened through a lazy merge record.
    pub via_lazy_merge: bool,
    pub(crate) lazy: Option<(Lit, ClauseRef)>,
}

pub(crate) struct Selection {
    pub backtrack: ChunkSet,
    pub analysis: Analysis,
    pub considered: usize,
}

impl Solver {
    /// Terminating candidates for `conflict`, lightest first: those at the
    /// conflict level and those whose analysis learns a new clause.
    pub fn enumerate_candidates(&mut self, conflict: ClauseRef, profile: &WeightProfile) -> Vec<BacktrackCandidate> {
        let mut cands = self.raw_candidates(conflict, profile);
        let top_level = self.trail.level_of(self.db.lits(conflict), None);
        cands.retain_mut(|c| {
            if !c.via_lazy_merge && c.level == top_level {
                return true;
            }
            let new = match self.analyze_for(conflict, &c.chunks, c.lazy) {
                Some(a) => self.is_new_clause(&a.learned),
                None => false,
            };
            c.learns_new = Some(new);
            new
        });
        cands
    }

    /// All candidate sets for `conflict`, lightest first, before the
    /// novelty filter. Ties prefer the higher level, then the smaller chunk
    /// id.
    pub fn raw_candidates(&self, conflict: ClauseRef, profile: &WeightProfile) -> Vec<BacktrackCandidate> {
        let trail = &self.trail;
        let lits = self.db.lits(conflict);
        let gc = trail.gamma_of(lits, None);
        let lazy_on = self.cfg.merge == Merge::Lazy;
        let record_of = |ck: ChunkId| {
            if !lazy_on {
                return None;
            }
            let d = trail.chunks().decision(ck);
            self.lazy[d.var().index()].as_ref().filter(|r| r.decision == d)
        };
        let mut cands = Vec::new();
        for ck in gc.iter() {
            match record_of(ck) {
                Some(rec) => {
                    for t in rec.targets.iter() {
                        // {t} alone is already a candidate.
                        if gc.contains(t) && record_of(t).is_none() {
                            continue;
                        }
                        let mut s = ChunkSet::singleton(ck);
                        s.insert(t);
                        cands.push(BacktrackCandidate {
                            level: trail.chunkset_level(&s),
                            chunks: s,
                            weight: 0.0,
                            learns_new: None,
                            via_lazy_merge: true,
                            lazy: Some((rec.decision, rec.clause)),
                        });
                    }
                }
                None => cands.push(BacktrackCandidate {
                    chunks: ChunkSet::singleton(ck),
                    weight: 0.0,
                    level: trail.chunk_level(ck),
                    learns_new: None,
                    via_lazy_merge: false,
                    lazy: None,
                }),
            }
        }
        let ctx = self.weight_context(conflict, profile);
        for c in cands.iter_mut() {
            c.weight = evaluate_weight(profile, trail, &c.chunks, &ctx);
        }
        cands.sort_by(|a, b| {
            a.weight
                .total_cmp(&b.weight)
                .then(b.level.cmp(&a.level))
                .then(a.chunks.first().cmp(&b.chunks.first()))
                .then(a.chunks.iter().last().cmp(&b.chunks.iter().last()))
        });
        let limit = self.cfg.candidate_limit;
        if cands.len() > limit {
            // Drop lazy expansions from the heavy end first.
            let mut excess = cands.len() - limit;
            let mut i = cands.len();
            while excess > 0 && i > 0 {
                i -= 1;
                if cands[i].via_lazy_merge {
                    cands.remove(i);
                    excess -= 1;
                }
            }
            let top = trail.level_of(lits, None);
            while cands.len() > limit {
                let j = cands.iter().rposition(|c| c.level != top).unwrap_or(cands.len() - 1);
                cands.remove(j);
            }
        }
        cands
    }

    /// Levels needed by the simulation profiles.
    ///
    /// The assertion level needs a first-UIP pass and is only computed for
    /// [`WeightProfile::NcbSim`].
    pub fn weight_context(&self, conflict: ClauseRef, profile: &WeightProfile) -> WeightContext {
        let t = &self.trail;
        let lits = self.db.lits(conflict);
        let level = t.level_of(lits, None);
        let mut ctx = WeightContext {
            conflict_level: level,
            assertion_level: 0,
        };
        if *profile != WeightProfile::NcbSim || level == 0 {
            return ctx;
        }
        let mut seen = vec![false; self.num_vars];
        let mut open = 0usize;
        let mut below = 0u32;
        let mut visit = |q: Lit, seen: &mut Vec<bool>, open: &mut usize| {
            let v = q.var();
            if seen[v.index()] {
                return;
            }
            seen[v.index()] = true;
            if t.level(v) == level {
                *open += 1;
            } else {
                below = below.max(t.level(v));
            }
        };
        for &q in lits {
            visit(q, &mut seen, &mut open);
        }
        for &p in t.lits().iter().rev() {
            if open <= 1 {
                break;
            }
            let v = p.var();
            if !seen[v.index()] || t.level(v) != level {
                continue;
            }
            let Some(r) = t.reason(v) else { break };
            open -= 1;
            for &q in self.db.lits(r) {
                if q.var() != v {
                    visit(q, &mut seen, &mut open);
                }
            }
        }
        ctx.assertion_level = below;
        ctx
    }

    /// Analysis of `conflict` with scope `chunks`, using the lazy merge
    /// behind `lazy` if given.
    pub(crate) fn analyze_for(
        &mut self,
        conflict: ClauseRef,
        chunks: &ChunkSet,
        lazy: Option<(Lit, ClauseRef)>,
    ) -> Option<Analysis> {
        let scope = |s: &Solver, v: Var| s.trail.gamma(v).intersects(chunks);
        match lazy {
            None => self.analyze_scoped(conflict, scope, None, &[]),
            Some((d, clause)) => {
                let order = self.virtual_order(d, clause);
                self.analyze_scoped(conflict, scope, Some(&order), &[(d.var(), clause)])
            }
        }
    }

    /// Trail order after a virtual merge of decision `d` with reason
    /// `clause`: d and its dependents move behind the last premise.
    pub(crate) fn virtual_order(&self, d: Lit, clause: ClauseRef) -> Vec<Lit> {
        let trail = &self.trail;
        let start = trail.position(d.var());
        let ck = trail.own_chunk(d.var());
        let pmax = self
            .db
            .lits(clause)
            .iter()
            .filter(|l| **l != d)
            .map(|l| trail.position(l.var()))
            .max()
            .unwrap_or(start)
            .max(start);
        let lits = trail.lits();
        let mut out = Vec::with_capacity(lits.len());
        out.extend_from_slice(&lits[..start]);
        let dep = |l: &Lit| ck.is_some_and(|c| trail.gamma(l.var()).contains(c));
        out.extend(lits[start..=pmax].iter().filter(|l| !dep(l)));
        out.extend(lits[start..=pmax].iter().filter(|l| dep(l)));
        out.extend_from_slice(&lits[pmax + 1..]);
        out
    }

    fn top_chunk(&self, conflict: ClauseRef) -> ChunkId {
        let lits = self.db.lits(conflict);
        let gc = self.trail.gamma_of(lits, None);
        gc.iter()
            .max_by_key(|&ck| (self.trail.chunk_level(ck), std::cmp::Reverse(ck)))
            .expect("conflict above root")
    }

    fn top_selection(&mut self, conflict: ClauseRef, considered: usize) -> Selection {
        let top = ChunkSet::singleton(self.top_chunk(conflict));
        let analysis = self
            .analyze_for(conflict, &top, None)
            .expect("analysis on a single chunk terminates");
        Selection {
            backtrack: top,
            analysis,
            considered,
        }
    }

    /// Lightest candidate that is the top chunk or learns a new clause.
    pub(crate) fn select_chunk(&mut self, conflict: ClauseRef, profile: &WeightProfile) -> Selection {
        let mut cands = self.raw_candidates(conflict, profile);
        let considered = cands.len();
        let top_level = self.trail.level_of(self.db.lits(conflict), None);
        for c in cands.iter_mut() {
            let Some(a) = self.analyze_for(conflict, &c.chunks, c.lazy) else {
                continue;
            };
            if !c.via_lazy_merge && c.level == top_level {
                return Selection {
                    backtrack: c.chunks.clone(),
                    analysis: a,
                    considered,
                };
            }
            let new = self.is_new_clause(&a.learned);
            c.learns_new = Some(new);
            if new {
                return Selection {
                    backtrack: c.chunks.clone(),
                    analysis: a,
                    considered,
                };
            }
        }
        self.top_selection(conflict, considered)
    }

    /// Best-chunk backtracking: undo the lightest candidate, and learn
    /// through the lightest candidate whose analysis gives a new clause.
    pub(crate) fn select_with_bb(&mut self, conflict: ClauseRef, profile: &WeightProfile) -> Selection {
        let cands = self.raw_candidates(conflict, profile);
        let considered = cands.len();
        let top_level = self.trail.level_of(self.db.lits(conflict), None);
        let Some(first) = cands.first() else {
            return self.top_selection(conflict, considered);
        };
        if !first.via_lazy_merge && first.level == top_level {
            return self.select_chunk(conflict, profile);
        }
        let backtrack = first.chunks.clone();
        for c in &cands {
            let Some(a) = self.analyze_for(conflict, &c.chunks, c.lazy) else {
                continue;
            };
            if self.is_new_clause(&a.learned) {
                return Selection {
                    backtrack,
                    analysis: a,
                    considered,
                };
            }
        }
        self.select_chunk(conflict, profile)
    }
}
