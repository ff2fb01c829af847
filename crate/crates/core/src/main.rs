use clap::{Parser, Subcommand};
use dmab::harness::{bounds_only, emit_bound_csv, emit_csv, run_batch, SimConfig};
use dmab::matching::{brute_force_matching, run_auction, ValueMatrix};
use dmab::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dmab", version, about = "Bandit simulations with costly index computation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a config and write the aggregate CSV.
    Run {
        config: PathBuf,
        /// Output CSV (overrides `output` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (overrides the config and DMAB_WORKERS).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Write only the regret bound curve of a config.
    Bounds {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the auction on a value matrix and compare with exhaustive search.
    Match {
        /// Text file with one row of values per line.
        matrix: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn default_out(config: &Path, suffix: &str) -> PathBuf {
    let stem = config.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from(format!("{stem}{suffix}.csv"))
}

fn read_matrix(path: &Path) -> Result<ValueMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Config { field: format!("line {}", k + 1), message: e.to_string() })?;
        rows.push(row);
    }
    ValueMatrix::new(rows)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out, workers } => {
            let mut cfg = SimConfig::load(&config)?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            let path = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| default_out(&config, ""));
            let result = run_batch(&cfg)?;
            emit_csv(&result, &path)?;
            let last = result.rows.last();
            println!("seeds: {}", result.seeds.len());
            println!("rows: {}", result.rows.len());
            if let Some(r) = last {
                println!("final t: {}", r.t);
                println!("final mean regret: {}", r.regret_mean);
                println!("bound ({}): {}", result.bound_name, r.bound);
            }
            if let Some(note) = &result.bound_note {
                println!("bound note: {note}");
            }
            println!("wrote {}", path.display());
        }
        Command::Bounds { config, out } => {
            let cfg = SimConfig::load(&config)?;
            let path = out.unwrap_or_else(|| default_out(&config, "_bounds"));
            let curve = bounds_only(&cfg)?;
            emit_bound_csv(&curve, &path)?;
            println!("bound: {}", curve.name);
            if let Some(note) = &curve.note {
                println!("note: {note}");
            }
            println!("wrote {}", path.display());
        }
        Command::Match { matrix, eps } => {
            let values = read_matrix(&matrix)?;
            let (m, state) = run_auction(&values, eps)?;
            let surplus = m.surplus(&values);
            println!("matching: {m}");
            println!("surplus: {surplus}");
            println!("rounds: {}", state.rounds);
            match brute_force_matching(&values) {
                Ok((best, opt)) => {
                    println!("optimal: {best} surplus {opt}");
                    if opt - surplus <= eps {
                        println!("oracle check: ok (gap {} <= eps {eps})", opt - surplus);
                    } else {
                        return Err(Error::Check(format!("auction surplus is {} below the optimum", opt - surplus)));
                    }
                }
                Err(e) => println!("oracle check: skipped ({e})"),
            }
        }
        Command::Validate { config } => {
            let cfg = SimConfig::load(&config)?;
            cfg.validate()?;
            println!("ok: {} seeds, horizon {}", cfg.seed_list().len(), cfg.horizon);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
