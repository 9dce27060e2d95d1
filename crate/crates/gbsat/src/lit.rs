use std::fmt;
use std::ops::Not;

/// Largest variable count a solver accepts.
pub const MAX_VARS: usize = (1 << 31) - 1;

/// A propositional variable, stored 0-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    #[inline]
    pub fn from_index(index: usize) -> Var {
        debug_assert!(index < MAX_VARS);
        Var(index as u32)
    }

    /// Variable with the given 1-based DIMACS number.
    #[inline]
    pub fn from_dimacs(number: u32) -> Var {
        debug_assert!(number > 0);
        Var(number - 1)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn dimacs(self) -> u32 {
        self.0 + 1
    }

    #[inline]
    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A literal. The dense code is `2 * var + (0 if positive, 1 if negative)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | (!positive) as u32)
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    /// Parses a non-zero signed DIMACS literal.
    #[inline]
    pub fn from_dimacs(lit: i32) -> Lit {
        debug_assert!(lit != 0);
        Lit::new(Var::from_dimacs(lit.unsigned_abs()), lit > 0)
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().dimacs() as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}
