use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use gbsat::{Lit, Solver, SolverConfig};
use gbsat_io::{parse_dimacs, StatsRow};
use rayon::prelude::*;

/// A benchmark instance, on disk or in memory.
#[derive(Clone, Debug)]
pub enum Instance {
    File(PathBuf),
    Memory {
        name: String,
        num_vars: usize,
        clauses: Vec<Vec<Lit>>,
    },
}

impl Instance {
    pub fn name(&self) -> String {
        match self {
            Instance::File(p) => p.display().to_string(),
            Instance::Memory { name, .. } => name.clone(),
        }
    }

    fn load(&self) -> Option<(usize, Vec<Vec<Lit>>)> {
        match self {
            Instance::File(p) => {
                let f = fs::File::open(p).ok()?;
                let formula = parse_dimacs(BufReader::new(f)).ok()?;
                Some((formula.num_vars, formula.clauses))
            }
            Instance::Memory { num_vars, clauses, .. } => Some((*num_vars, clauses.clone())),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Worker threads, 0 for the rayon default.
    pub threads: usize,
    /// Overrides the conflict limit of every configuration.
    pub conflict_limit: Option<u64>,
}

/// Runs every (instance, configuration) pair in its own solver. Rows are
/// sorted by instance, then configuration label. Instances that cannot be
/// read or parsed give `ERROR` rows.
pub fn run_suite(instances: &[Instance], configs: &[SolverConfig], opts: &SuiteOptions) -> Vec<StatsRow> {
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).map(move |c| (i, c)))
        .collect();
    let run = || -> Vec<StatsRow> {
        jobs.par_iter()
            .map(|&(i, c)| {
                let inst = &instances[i];
                let mut cfg = configs[c].clone();
                if opts.conflict_limit.is_some() {
                    cfg.conflict_limit = opts.conflict_limit;
                }
                run_one(inst, &cfg)
            })
            .collect()
    };
    let mut rows = if opts.threads == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    };
    rows.sort_by(|a, b| {
        (&a.instance, a.config_label()).cmp(&(&b.instance, b.config_label()))
    });
    rows
}

fn run_one(inst: &Instance, cfg: &SolverConfig) -> StatsRow {
    let name = inst.name();
    let Some((n, clauses)) = inst.load() else {
        return StatsRow::error(&name, cfg);
    };
    let Ok(mut s) = Solver::new(n, &clauses, cfg.clone()) else {
        return StatsRow::error(&name, cfg);
    };
    let (r, t) = s.solve_timed();
    StatsRow::new(&name, cfg, &r, t, s.stats())
}

/// Instance paths, one per line. Relative paths are taken relative to the
/// manifest; blank lines and `#` comments are skipped.
pub fn load_manifest(path: &Path) -> io::Result<Vec<Instance>> {
    let dir = path.parent().unwrap_or(Path::new("."));
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = Path::new(l);
            Instance::File(if p.is_absolute() { p.to_path_buf() } else { dir.join(p) })
        })
        .collect())
}
