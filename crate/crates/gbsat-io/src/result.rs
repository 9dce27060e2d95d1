use gbsat::SolveResult;

/// Competition-style answer: `s` line, and for SAT one `v` line ending in 0.
pub fn emit_result(result: &SolveResult) -> String {
    match result {
        SolveResult::Sat(model) => {
            let mut s = String::from("s SATISFIABLE\nv");
            for (i, &b) in model.iter().enumerate() {
                let v = i as i64 + 1;
                s.push(' ');
                s.push_str(&(if b { v } else { -v }).to_string());
            }
            s.push_str(" 0\n");
            s
        }
        SolveResult::Unsat => "s UNSATISFIABLE\n".to_string(),
        SolveResult::Unknown => "s UNKNOWN\n".to_string(),
    }
}

/// 10 for SAT, 20 for UNSAT, 0 otherwise.
pub fn exit_code(result: &SolveResult) -> i32 {
    match result {
        SolveResult::Sat(_) => 10,
        SolveResult::Unsat => 20,
        SolveResult::Unknown => 0,
    }
}
