use std::fmt;
use std::io::{self, BufRead};

use gbsat::{Lit, MAX_VARS};
use thiserror::Error;

/// A parsed CNF formula. Clauses are kept as written.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    /// Clause count announced by the header.
    pub declared_clauses: usize,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("read error: {0}")]
    Io(#[from] io::Error),
}

impl ParseError {
    /// Line of a syntax error, 1-based.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } => Some(*line),
            ParseError::Io(_) => None,
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_dimacs_str(text: &str) -> Result<Formula, ParseError> {
    parse_dimacs(text.as_bytes())
}

/// Parses DIMACS CNF. Comment lines start with `c`; a line starting with
/// `%` ends the input.
pub fn parse_dimacs<R: BufRead>(reader: R) -> Result<Formula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut f = Formula::default();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        last_line = no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(no, "second header line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(syntax(no, "expected `p cnf <vars> <clauses>`"));
            }
            let num = |s: &str, what: &str| {
                s.parse::<usize>()
                    .map_err(|_| syntax(no, format!("{what} count `{s}` is not a non-negative integer")))
            };
            let vars = num(parts[2], "variable")?;
            let clauses = num(parts[3], "clause")?;
            if vars > MAX_VARS {
                return Err(syntax(no, format!("{vars} variables exceed the limit of {MAX_VARS}")));
            }
            header = Some((vars, clauses));
            f.num_vars = vars;
            f.declared_clauses = clauses;
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(syntax(no, "clause before the `p cnf` header"));
        };
        for tok in trimmed.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| syntax(no, format!("`{tok}` is not an integer")))?;
            if x == 0 {
                f.clauses.push(std::mem::take(&mut current));
                continue;
            }
            if x.unsigned_abs() as usize > vars {
                return Err(syntax(no, format!("literal {x} out of range for {vars} variables")));
            }
            current.push(Lit::from_dimacs(x as i32));
        }
    }
    if header.is_none() {
        return Err(syntax(last_line.max(1), "missing `p cnf` header"));
    }
    if !current.is_empty() {
        f.warnings.push(Warning {
            line: last_line,
            message: "last clause is not terminated by 0".into(),
        });
        f.clauses.push(current);
    }
    if f.clauses.len() != f.declared_clauses {
        f.warnings.push(Warning {
            line: 0,
            message: format!(
                "header declares {} clauses, found {}",
                f.declared_clauses,
                f.clauses.len()
            ),
        });
    }
    Ok(f)
}

/// Writes `clauses` as DIMACS CNF.
pub fn write_dimacs<W: io::Write>(mut out: W, num_vars: usize, clauses: &[Vec<Lit>]) -> io::Result<()> {
    writeln!(out, "p cnf {} {}", num_vars, clauses.len())?;
    for c in clauses {
        for l in c {
            write!(out, "{} ", l.to_dimacs())?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}
