//! VSIDS branching with an indexed binary max-heap.
//!
//! Ties on activity go to the lower variable index, so a fresh heap yields
//! variables in index order.

use crate::lit::Var;

const RESCALE_LIMIT: f64 = 1e100;

#[derive(Clone, Debug)]
pub struct Vsids {
    activity: Vec<f64>,
    heap: Vec<Var>,
    /// Position of each variable in `heap`, `usize::MAX` if absent.
    index: Vec<usize>,
    inc: f64,
    decay: f64,
}

impl Vsids {
    pub fn new(num_vars: usize, decay: f64) -> Vsids {
        let mut v = Vsids {
            activity: vec![0.0; num_vars],
            heap: Vec::with_capacity(num_vars),
            index: vec![usize::MAX; num_vars],
            inc: 1.0,
            decay,
        };
        for i in 0..num_vars {
            v.insert(Var::from_index(i));
        }
        v
    }

    pub fn activity(&self, var: Var) -> f64 {
        self.activity[var.index()]
    }

    /// Sets an initial activity. Only meant to be used before solving.
    pub fn set_activity(&mut self, var: Var, value: f64) {
        self.activity[var.index()] = value;
        if self.contains(var) {
            let i = self.index[var.index()];
            self.sift_up(i);
            let i = self.index[var.index()];
            self.sift_down(i);
        }
    }

    #[inline]
    fn better(&self, a: Var, b: Var) -> bool {
        let (x, y) = (self.activity[a.index()], self.activity[b.index()]);
        x > y || (x == y && a < b)
    }

    pub fn contains(&self, var: Var) -> bool {
        self.index[var.index()] != usize::MAX
    }

    pub fn insert(&mut self, var: Var) {
        if self.contains(var) {
            return;
        }
        self.index[var.index()] = self.heap.len();
        self.heap.push(var);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn bump(&mut self, var: Var) {
        let a = &mut self.activity[var.index()];
        *a += self.inc;
        if *a > RESCALE_LIMIT {
            for x in &mut self.activity {
                *x *= 1.0 / RESCALE_LIMIT;
            }
            self.inc *= 1.0 / RESCALE_LIMIT;
        }
        if self.contains(var) {
            self.sift_up(self.index[var.index()]);
        }
    }

    /// Applies the per-conflict decay by growing the increment.
    pub fn decay(&mut self) {
        self.inc /= self.decay;
        if self.inc > RESCALE_LIMIT {
            for x in &mut self.activity {
                *x *= 1.0 / RESCALE_LIMIT;
            }
            self.inc *= 1.0 / RESCALE_LIMIT;
        }
    }

    pub fn peek(&self) -> Option<Var> {
        self.heap.first().copied()
    }

    pub fn pop(&mut self) -> Option<Var> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.index[top.index()] = usize::MAX;
        if !self.heap.is_empty() {
            self.index[self.heap[0].index()] = 0;
            self.sift_down(0);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !self.better(v, self.heap[p]) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.index[self.heap[i].index()] = i;
            i = p;
        }
        self.heap[i] = v;
        self.index[v.index()] = i;
    }

    fn sift_down(&mut self, mut i: usize) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && self.better(self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !self.better(self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.index[self.heap[i].index()] = i;
            i = c;
        }
        self.heap[i] = v;
        self.index[v.index()] = i;
    }
}
