use crate::lit::Lit;

/// Index of a clause in the database. Stable for the lifetime of a solver.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ClauseRef(pub u32);

impl ClauseRef {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A clause. Positions 0 and 1 hold the watched literals when `len() >= 2`.
#[derive(Clone, Debug)]
pub struct Clause {
    pub lits: Vec<Lit>,
    pub learned: bool,
    pub deleted: bool,
}

impl Clause {
    #[inline]
    pub fn len(&self) -> usize {
        self.lits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClauseDb {
    clauses: Vec<Clause>,
    live: usize,
}

impl ClauseDb {
    pub fn push(&mut self, lits: Vec<Lit>, learned: bool) -> ClauseRef {
        let cref = ClauseRef(self.clauses.len() as u32);
        self.clauses.push(Clause {
            lits,
            learned,
            deleted: false,
        });
        self.live += 1;
        cref
    }

    #[inline]
    pub fn get(&self, cref: ClauseRef) -> &Clause {
        &self.clauses[cref.index()]
    }

    #[inline]
    pub fn get_mut(&mut self, cref: ClauseRef) -> &mut Clause {
        &mut self.clauses[cref.index()]
    }

    #[inline]
    pub fn lits(&self, cref: ClauseRef) -> &[Lit] {
        &self.clauses[cref.index()].lits
    }

    pub fn delete(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref.index()];
        if !c.deleted {
            c.deleted = true;
            self.live -= 1;
        }
    }

    /// Number of clauses ever stored, deleted ones included.
    pub fn capacity(&self) -> usize {
        self.clauses.len()
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn iter_live(&self) -> impl Iterator<Item = (ClauseRef, &Clause)> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.deleted)
            .map(|(i, c)| (ClauseRef(i as u32), c))
    }
}

/// Removes duplicate literals and reports tautologies.
///
/// Returns `None` for a tautology. Literal order of first occurrence is kept.
pub fn normalize(lits: &[Lit]) -> Option<Vec<Lit>> {
    let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
    for &l in lits {
        if out.contains(&!l) {
            return None;
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Some(out)
}
