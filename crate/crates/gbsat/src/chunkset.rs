//! Sparse indexed bitsets over chunk identifiers.
//!
//! A set is a sorted list of `(block, word)` pairs where `block` is the id
//! divided by 64 and `word` holds the low six bits. Only non-zero words are
//! stored, so a set touching a handful of chunks stays a handful of words no
//! matter how large the ids grow. Binary operations are merges over the two
//! sorted block lists.

use std::cmp::Ordering;
use std::fmt;

/// Identifier of a chunk. Ids are recycled once a chunk is undone.
pub type ChunkId = u32;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ChunkSet {
    blocks: Vec<(u32, u64)>,
}

#[inline]
fn split(id: ChunkId) -> (u32, u64) {
    (id >> 6, 1u64 << (id & 63))
}

impl ChunkSet {
    pub const fn new() -> ChunkSet {
        ChunkSet { blocks: Vec::new() }
    }

    pub fn singleton(id: ChunkId) -> ChunkSet {
        let (b, m) = split(id);
        ChunkSet {
            blocks: vec![(b, m)],
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|&(_, w)| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.blocks.clear();
    }

    fn find(&self, block: u32) -> Result<usize, usize> {
        self.blocks.binary_search_by_key(&block, |&(b, _)| b)
    }

    pub fn contains(&self, id: ChunkId) -> bool {
        let (b, m) = split(id);
        match self.find(b) {
            Ok(i) => self.blocks[i].1 & m != 0,
            Err(_) => false,
        }
    }

    /// Returns true if the id was not present.
    pub fn insert(&mut self, id: ChunkId) -> bool {
        let (b, m) = split(id);
        match self.find(b) {
            Ok(i) => {
                let fresh = self.blocks[i].1 & m == 0;
                self.blocks[i].1 |= m;
                fresh
            }
            Err(i) => {
                self.blocks.insert(i, (b, m));
                true
            }
        }
    }

    /// Returns true if the id was present.
    pub fn remove(&mut self, id: ChunkId) -> bool {
        let (b, m) = split(id);
        match self.find(b) {
            Ok(i) => {
                let had = self.blocks[i].1 & m != 0;
                self.blocks[i].1 &= !m;
                if self.blocks[i].1 == 0 {
                    self.blocks.remove(i);
                }
                had
            }
            Err(_) => false,
        }
    }

    /// In-place union.
    pub fn union_with(&mut self, other: &ChunkSet) {
        if other.blocks.is_empty() {
            return;
        }
        if self.blocks.is_empty() {
            self.blocks.extend_from_slice(&other.blocks);
            return;
        }
        if other.is_subset(self) {
            return;
        }
        let mut out = Vec::with_capacity(self.blocks.len() + other.blocks.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.blocks, &other.blocks);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 | b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.blocks = out;
    }

    pub fn union(&self, other: &ChunkSet) -> ChunkSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    /// In-place difference `self \ other`.
    pub fn difference_with(&mut self, other: &ChunkSet) {
        if self.blocks.is_empty() || other.blocks.is_empty() {
            return;
        }
        let mut j = 0;
        let b = &other.blocks;
        self.blocks.retain_mut(|(blk, w)| {
            while j < b.len() && b[j].0 < *blk {
                j += 1;
            }
            if j < b.len() && b[j].0 == *blk {
                *w &= !b[j].1;
            }
            *w != 0
        });
    }

    pub fn difference(&self, other: &ChunkSet) -> ChunkSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn intersection(&self, other: &ChunkSet) -> ChunkSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.blocks, &other.blocks);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    let w = a[i].1 & b[j].1;
                    if w != 0 {
                        out.push((a[i].0, w));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        ChunkSet { blocks: out }
    }

    pub fn intersects(&self, other: &ChunkSet) -> bool {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.blocks, &other.blocks);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    if a[i].1 & b[j].1 != 0 {
                        return true;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        false
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &ChunkSet) -> bool {
        let mut j = 0;
        let b = &other.blocks;
        for &(blk, w) in &self.blocks {
            while j < b.len() && b[j].0 < blk {
                j += 1;
            }
            if j == b.len() || b[j].0 != blk || w & !b[j].1 != 0 {
                return false;
            }
        }
        true
    }

    /// `self ⊆ a ∪ b` without materializing the union.
    pub fn is_subset_of_union(&self, a: &ChunkSet, b: &ChunkSet) -> bool {
        let (mut i, mut j) = (0, 0);
        let (x, y) = (&a.blocks, &b.blocks);
        for &(blk, w) in &self.blocks {
            while i < x.len() && x[i].0 < blk {
                i += 1;
            }
            while j < y.len() && y[j].0 < blk {
                j += 1;
            }
            let mut cover = 0;
            if i < x.len() && x[i].0 == blk {
                cover |= x[i].1;
            }
            if j < y.len() && y[j].0 == blk {
                cover |= y[j].1;
            }
            if w & !cover != 0 {
                return false;
            }
        }
        true
    }

    /// Replaces `id` by the members of `with`, if `id` is present.
    pub fn substitute(&mut self, id: ChunkId, with: &ChunkSet) -> bool {
        if self.remove(id) {
            self.union_with(with);
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ChunkId> + '_ {
        self.blocks.iter().flat_map(|&(blk, w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros();
                    w &= w - 1;
                    Some(blk << 6 | t)
                }
            })
        })
    }

    pub fn first(&self) -> Option<ChunkId> {
        self.blocks
            .first()
            .map(|&(blk, w)| blk << 6 | w.trailing_zeros())
    }
}

impl FromIterator<ChunkId> for ChunkSet {
    fn from_iter<I: IntoIterator<Item = ChunkId>>(iter: I) -> ChunkSet {
        let mut s = ChunkSet::new();
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Debug for ChunkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
