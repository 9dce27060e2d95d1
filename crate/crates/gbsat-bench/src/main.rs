use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gbsat::{Merge, Mode, SolverConfig, WeightProfile};
use gbsat_bench::{gen_kcolor, load_manifest, random_ksat, run_suite, Instance, KColorSpec, SuiteOptions};
use gbsat_io::{write_dimacs, write_stats_csv};

#[derive(Debug, Parser)]
#[command(name = "gbsat-bench", version, about = "Instance generation and benchmark runs for gbsat")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Write k-coloring instances of random G(n, m) graphs and a manifest.
    GenKcolor {
        #[arg(long, default_value_t = 200)]
        vertices: usize,
        #[arg(long, default_value_t = 452)]
        edges: usize,
        #[arg(long, default_value_t = 3)]
        colors: usize,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Seed of the first instance; instance i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write uniform random 3-CNF instances and a manifest.
    Gen3cnf {
        #[arg(long, default_value_t = 20)]
        vars: usize,
        #[arg(long, default_value_t = 4.2)]
        ratio: f64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run configurations over the instances of a manifest or directory.
    Run {
        /// Manifest file or directory of `.cnf` files.
        instances: PathBuf,
        /// Comma-separated labels such as `ncb,cb,gb,gb+ecm,gb+lcm+bb`.
        #[arg(long, default_value = "ncb,gb+ecm")]
        configs: String,
        /// Literal weights of the GB configurations: const or prop.
        #[arg(long, default_value = "prop")]
        weights: String,
        #[arg(long)]
        restarts: bool,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        conflict_limit: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output, stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_config(label: &str, restarts: bool, weights: &WeightProfile, seed: u64) -> Result<SolverConfig> {
    let mut parts = label.split('+');
    let mode = match parts.next() {
        Some("ncb") => Mode::Ncb,
        Some("cb") => Mode::Cb,
        Some("gb") => Mode::Gb,
        _ => bail!("unknown configuration `{label}`"),
    };
    let mut cfg = SolverConfig {
        restarts,
        weights: weights.clone(),
        seed,
        ..SolverConfig::new(mode)
    };
    for p in parts {
        match p {
            "ecm" => cfg.merge = Merge::Eager,
            "lcm" => cfg.merge = Merge::Lazy,
            "bb" => cfg.bb = true,
            _ => bail!("unknown option `{p}` in `{label}`"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_instances(out: &PathBuf, items: impl Iterator<Item = (String, usize, Vec<Vec<gbsat::Lit>>)>) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut manifest = String::new();
    for (name, n, clauses) in items {
        let f = fs::File::create(out.join(&name)).with_context(|| format!("creating {name}"))?;
        write_dimacs(io::BufWriter::new(f), n, &clauses)?;
        manifest.push_str(&name);
        manifest.push('\n');
    }
    fs::write(out.join("manifest.txt"), manifest)?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::GenKcolor {
            vertices,
            edges,
            colors,
            count,
            seed,
            out,
        } => {
            let mut items = Vec::new();
            for i in 0..count {
                let spec = KColorSpec {
                    vertices,
                    edges,
                    colors,
                    seed: seed + i,
                };
                let clauses = gen_kcolor(&spec)?;
                items.push((format!("kcolor-{colors}-{vertices}-{edges}-{:04}.cnf", seed + i), spec.num_vars(), clauses));
            }
            write_instances(&out, items.into_iter())
        }
        Cmd::Gen3cnf {
            vars,
            ratio,
            count,
            seed,
            out,
        } => {
            let m = (vars as f64 * ratio).round() as usize;
            let items = (0..count).map(|i| (format!("3cnf-{vars}-{:04}.cnf", seed + i), vars, random_ksat(vars, m, 3, seed + i)));
            write_instances(&out, items)
        }
        Cmd::Run {
            instances,
            configs,
            weights,
            restarts,
            threads,
            conflict_limit,
            seed,
            out,
        } => {
            let weights = match weights.as_str() {
                "const" => WeightProfile::Constant,
                "prop" => WeightProfile::prop_min(),
                w => bail!("unknown weights `{w}`"),
            };
            let configs: Vec<SolverConfig> = configs
                .split(',')
                .map(|l| parse_config(l.trim(), restarts, &weights, seed))
                .collect::<Result<_>>()?;
            let list = if instances.is_dir() {
                let mut v: Vec<PathBuf> = fs::read_dir(&instances)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
                    .collect();
                v.sort();
                v.into_iter().map(Instance::File).collect()
            } else {
                load_manifest(&instances).with_context(|| format!("reading {}", instances.display()))?
            };
            let rows = run_suite(&list, &configs, &SuiteOptions { threads, conflict_limit });
            match out {
                Some(p) => write_stats_csv(fs::File::create(p)?, &rows, true)?,
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    write_stats_csv(&mut lock, &rows, true)?;
                    lock.flush()?;
                }
            }
            Ok(())
        }
    }
}
