//! Exhaustive truth-table evaluation, 64 assignments per machine word.

use gbsat::Lit;
use thiserror::Error;

pub const ORACLE_MAX_VARS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    Sat(Vec<bool>),
    Unsat,
}

impl OracleResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleResult::Sat(_))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} variables exceed the oracle limit of {ORACLE_MAX_VARS}")]
    TooManyVars(usize),
    #[error("literal {0} exceeds the variable count")]
    LiteralOutOfRange(i32),
}

/// Bit patterns of the six low variables across one word.
const LOW: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

/// Word of assignments `64 * block ..` satisfying `lit`.
fn lit_word(lit: Lit, block: u64) -> u64 {
    let v = lit.var().index();
    let w = if v < 6 {
        LOW[v]
    } else if (block >> (v - 6)) & 1 == 1 {
        !0
    } else {
        0
    };
    if lit.is_positive() {
        w
    } else {
        !w
    }
}

fn check(num_vars: usize, clauses: &[Vec<Lit>]) -> Result<(), OracleError> {
    if num_vars > ORACLE_MAX_VARS {
        return Err(OracleError::TooManyVars(num_vars));
    }
    for l in clauses.iter().flatten() {
        if l.var().index() >= num_vars {
            return Err(OracleError::LiteralOutOfRange(l.to_dimacs()));
        }
    }
    Ok(())
}

/// Calls `f` with each word of satisfying assignments until it returns
/// false. Bit `j` of the word for block `b` is assignment `64 b + j`, where
/// bit `i` of an assignment is the value of variable `i`.
fn scan(num_vars: usize, clauses: &[Vec<Lit>], mut f: impl FnMut(u64, u64) -> bool) {
    let total = 1u64 << num_vars;
    let valid = if total < 64 { (1u64 << total) - 1 } else { !0 };
    for block in 0..total.div_ceil(64) {
        let mut sat = valid;
        for c in clauses {
            let mut w = 0;
            for &l in c {
                w |= lit_word(l, block);
            }
            sat &= w;
            if sat == 0 {
                break;
            }
        }
        if sat != 0 && !f(block, sat) {
            return;
        }
    }
}

/// Satisfying assignment with the smallest index, or UNSAT.
pub fn brute_force_oracle(num_vars: usize, clauses: &[Vec<Lit>]) -> Result<OracleResult, OracleError> {
    check(num_vars, clauses)?;
    let mut found = None;
    scan(num_vars, clauses, |block, word| {
        found = Some(block * 64 + word.trailing_zeros() as u64);
        false
    });
    Ok(match found {
        Some(a) => OracleResult::Sat((0..num_vars).map(|i| (a >> i) & 1 == 1).collect()),
        None => OracleResult::Unsat,
    })
}

pub fn count_models(num_vars: usize, clauses: &[Vec<Lit>]) -> Result<u64, OracleError> {
    check(num_vars, clauses)?;
    let mut n = 0;
    scan(num_vars, clauses, |_, word| {
        n += word.count_ones() as u64;
        true
    });
    Ok(n)
}

/// Whether every model of `clauses` satisfies `d`, i.e. F ∧ ¬D is UNSAT.
pub fn entails(num_vars: usize, clauses: &[Vec<Lit>], d: &[Lit]) -> Result<bool, OracleError> {
    let mut f = clauses.to_vec();
    f.extend(d.iter().map(|&l| vec![!l]));
    Ok(!brute_force_oracle(num_vars, &f)?.is_sat())
}
