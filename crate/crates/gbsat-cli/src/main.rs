use std::fs::{self, OpenOptions};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use gbsat::{Lit, Merge, Mode, Solver, SolverConfig, WeightProfile, WeightTable};
use gbsat_io::{emit_result, exit_code, export_dot, parse_dimacs, write_stats_csv, DotOptions, StatsRow};

/// Conflicts dumped with `--dot` before only the final state is written.
const DOT_CONFLICT_CAP: usize = 64;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Ncb,
    Cb,
    Gb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MergeArg {
    None,
    Eager,
    Lazy,
}

/// CDCL SAT solver with graph backtracking.
#[derive(Debug, Parser)]
#[command(name = "gbsat", version)]
struct Args {
    /// DIMACS CNF file, `-` for stdin.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "gb")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "none")]
    merge: MergeArg,
    /// Best-chunk backtracking.
    #[arg(long)]
    bb: bool,
    /// Luby restarts.
    #[arg(long)]
    restarts: bool,
    /// Literal weights: const, prop, cb, ncb or file:<path>.
    #[arg(long, default_value = "prop")]
    weights: String,
    /// File of DIMACS literals decided first, in order.
    #[arg(long)]
    decisions: Option<PathBuf>,
    /// Write the implication graph: one file per conflict (up to 64) and the
    /// final state at <path>.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Append a statistics row to this CSV file.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check engine invariants after every step.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    conflict_limit: Option<u64>,
}

fn parse_weights(spec: &str) -> Result<WeightProfile> {
    Ok(match spec {
        "const" => WeightProfile::Constant,
        "prop" => WeightProfile::prop_min(),
        "cb" => WeightProfile::CbSim,
        "ncb" => WeightProfile::NcbSim,
        s => match s.strip_prefix("file:") {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading weight file {path}"))?;
                WeightProfile::UserTable(WeightTable::parse(&text).with_context(|| format!("in weight file {path}"))?)
            }
            None => bail!("unknown weight profile `{s}`"),
        },
    })
}

fn parse_decisions(path: &Path, num_vars: usize) -> Result<Vec<Lit>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('c') || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i32 = tok
                .parse()
                .with_context(|| format!("{}:{}: `{tok}` is not a literal", path.display(), i + 1))?;
            if x == 0 {
                continue;
            }
            if x.unsigned_abs() as usize > num_vars {
                bail!("{}:{}: literal {x} out of range", path.display(), i + 1);
            }
            out.push(Lit::from_dimacs(x));
        }
    }
    Ok(out)
}

fn dot_path(base: &Path, n: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
    base.with_file_name(format!("{stem}-conflict{n}.dot"))
}

fn append_stats(path: &Path, row: &StatsRow) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut buf = Vec::new();
    write_stats_csv(&mut buf, std::slice::from_ref(row), fresh)?;
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&buf)?;
    Ok(())
}

fn run(args: Args) -> Result<i32> {
    let formula = if args.input.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        gbsat_io::parse_dimacs_str(&text)
    } else {
        let f = fs::File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
        parse_dimacs(BufReader::new(f))
    }
    .with_context(|| format!("parsing {}", args.input.display()))?;
    for w in &formula.warnings {
        eprintln!("c warning: {w}");
    }
    let cfg = SolverConfig {
        mode: match args.mode {
            ModeArg::Ncb => Mode::Ncb,
            ModeArg::Cb => Mode::Cb,
            ModeArg::Gb => Mode::Gb,
        },
        merge: match args.merge {
            MergeArg::None => Merge::None,
            MergeArg::Eager => Merge::Eager,
            MergeArg::Lazy => Merge::Lazy,
        },
        bb: args.bb,
        restarts: args.restarts,
        weights: parse_weights(&args.weights)?,
        seed: args.seed,
        check: args.check,
        conflict_limit: args.conflict_limit,
        decisions: match &args.decisions {
            Some(p) => parse_decisions(p, formula.num_vars)?,
            None => Vec::new(),
        },
        ..SolverConfig::default()
    };
    let mut solver = Solver::new(formula.num_vars, &formula.clauses, cfg.clone())?;
    let report = solver.ingest_report();
    if report.tautologies > 0 || report.duplicate_literals > 0 {
        eprintln!(
            "c dropped {} tautologies and {} duplicate literals",
            report.tautologies, report.duplicate_literals
        );
    }
    let start = Instant::now();
    let mut dumped = 0usize;
    let mut dot_error: Option<io::Error> = None;
    let result = solver.solve_observed(|s, conflict| {
        let Some(base) = &args.dot else { return };
        if dumped >= DOT_CONFLICT_CAP || dot_error.is_some() {
            return;
        }
        dumped += 1;
        let text = export_dot(s, &DotOptions { names: Vec::new(), conflict: Some(conflict) });
        if let Err(e) = fs::write(dot_path(base, dumped), text) {
            dot_error = Some(e);
        }
    });
    let time = start.elapsed().as_secs_f64();
    if let Some(e) = dot_error {
        return Err(e).context("writing DOT file");
    }
    if let Some(base) = &args.dot {
        fs::write(base, export_dot(&solver, &DotOptions::default())).context("writing DOT file")?;
    }
    print!("{}", emit_result(&result));
    let st = solver.stats();
    eprintln!(
        "c conflicts {} decisions {} propagations {} unassigned {} learned {} time {:.3}s",
        st.conflicts, st.decisions, st.propagations, st.unassigned_literals, st.learned_clauses, time
    );
    if let Some(path) = &args.stats {
        let name = args.input.display().to_string();
        append_stats(path, &StatsRow::new(&name, &cfg, &result, time, st))?;
    }
    if !solver.violations().is_empty() {
        for v in solver.violations().iter().take(20) {
            eprintln!("c violation {v}");
        }
        bail!("{} invariant violations", solver.violations().len());
    }
    Ok(exit_code(&result))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
