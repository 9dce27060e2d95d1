use std::fmt::Write;

use gbsat::{ClauseRef, Lit, Solver};

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    /// Variable names indexed by `Var::index`; numbers are used when empty.
    pub names: Vec<String>,
    /// Conflicting clause, drawn as an extra node.
    pub conflict: Option<ClauseRef>,
}

impl DotOptions {
    fn lit(&self, l: Lit) -> String {
        match self.names.get(l.var().index()) {
            Some(n) if l.is_positive() => n.clone(),
            Some(n) => format!("¬{n}"),
            None => l.to_dimacs().to_string(),
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Implication graph of the current trail. Clause ids are 1-based.
pub fn export_dot(solver: &Solver, opts: &DotOptions) -> String {
    let t = solver.trail();
    let mut s = String::from("digraph implication {\n  rankdir=LR;\n  node [style=filled, fillcolor=white];\n");
    for &l in t.lits() {
        let v = l.var();
        let shape = if t.is_decision(v) { "box" } else { "ellipse" };
        let chunks: Vec<String> = t.gamma(v).iter().map(|ck| format!("ck{ck}")).collect();
        let colors: Vec<&str> = t.gamma(v).iter().map(|ck| PALETTE[ck as usize % PALETTE.len()]).collect();
        let _ = write!(
            s,
            "  v{} [label={}, shape={shape}",
            v.index(),
            quote(&format!("{}@{}", opts.lit(l), t.level(v)))
        );
        if !colors.is_empty() {
            let style = if colors.len() == 1 {
                "filled"
            } else if shape == "box" {
                "striped"
            } else {
                "wedged"
            };
            let _ = write!(s, ", style={style}, fillcolor={}", quote(&colors.join(":")));
        }
        let _ = writeln!(s, ", class={}];", quote(&chunks.join(" ")));
    }
    for &l in t.lits() {
        let Some(r) = t.reason(l.var()) else { continue };
        for &q in solver.clauses().lits(r) {
            if q.var() != l.var() {
                let _ = writeln!(s, "  v{} -> v{} [label=\"C{}\"];", q.var().index(), l.var().index(), r.0 + 1);
            }
        }
    }
    if let Some(c) = opts.conflict {
        let _ = writeln!(s, "  conflict [label=\"⊥\", shape=doublecircle];");
        for &q in solver.clauses().lits(c) {
            if t.is_assigned(q.var()) {
                let _ = writeln!(s, "  v{} -> conflict [label=\"C{}\"];", q.var().index(), c.0 + 1);
            }
        }
    }
    s.push_str("}\n");
    s
}
