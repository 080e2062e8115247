//! Command-line interface for the TU-game laboratory.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or data error,
//! 3 numeric failure. Each failure prints a one-line diagnostic to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

use shapaudit_cli::experiments::{self, markov1_table, markov2_table, secret_table, taxicab_table};
use shapaudit_cli::grid::SweepConfig;
use shapaudit_cli::report::Table;
use shapaudit_core::pathology::{self, SelectionRule};
use shapaudit_core::shapley::exact_shapley;
use shapaudit_core::{axioms, gamefile, Error};

#[derive(Parser)]
#[command(
    name = "shapaudit",
    version,
    about = "Exact Shapley values, axiom audits and feature-selection pathology detectors over coalition games"
)]
struct Cli {
    /// Master random seed for experiments and sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Tolerance for audits and detectors.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute exact Shapley values for a game file.
    Shapley {
        /// Game file (JSON coalition table).
        #[arg(long)]
        game: PathBuf,
    },
    /// Audit the Shapley axioms on a game file (additivity needs a second
    /// game).
    Axioms {
        #[arg(long)]
        game: PathBuf,
        /// Second game for the additivity check.
        #[arg(long = "with")]
        with: Option<PathBuf>,
    },
    /// Select players from the Shapley ranking.
    Select(SelectArgs),
    /// Run the selection-pathology detectors on a game file.
    Pathology {
        #[arg(long)]
        game: PathBuf,
        /// Coalition size for the fixed-size detectors (default: d−1).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run a built-in simulation experiment and write a report table.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        /// Sample count (defaults: markov1/markov2 1000000, secret 1000,
        /// taxicab 100000).
        #[arg(long)]
        n: Option<usize>,
        /// Experiment parameters, e.g. `ell=0.05`, `t1=2,t2=2.2` or
        /// `a=5:10:20`.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Sweep a parameter grid and write one CSV row per cell and
    /// formulation.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        /// Grid axes, e.g. `ell=0.05:0.95:20` or `t1=-2:2:81,t2=-2:2:81`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: SHAPAUDIT_JOBS or all cores). The output
        /// does not depend on the worker count.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SelectGroup {
    /// Keep the k highest-ranked players.
    #[arg(long = "top-k")]
    top_k: Option<usize>,
    /// Keep players with value strictly above the threshold.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    game: PathBuf,
    #[command(flatten)]
    rule: SelectGroup,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Markov1,
    Markov2,
    Secret,
    Taxicab,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Markov2,
    Secret,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::Numeric(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            let line = e
                .to_string()
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("bad usage")
                .to_string();
            eprintln!("{line}");
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(f) => {
            eprintln!("{}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Shapley { game } => {
            let game = gamefile::load_game_from_path(&game)?;
            let attribution = exact_shapley(&game)?;
            let sum: f64 = attribution.phi.iter().sum();
            let grand = game.grand_value();
            println!("game: {} ({} players)", game.tag(), game.player_count());
            println!("offset: {}", game.offset());
            for (label, phi) in game.labels().iter().zip(&attribution.phi) {
                println!("phi[{label}] = {phi}");
            }
            println!("sum(phi) = {sum}");
            println!("C(F) = {grand}");
            let residual = (sum - grand).abs();
            let ok = residual <= cli.tol * grand.abs().max(1.0);
            println!(
                "efficiency_residual = {residual} ({})",
                if ok { "ok" } else { "VIOLATED" }
            );
            Ok(())
        }
        Command::Axioms { game, with } => {
            let game = gamefile::load_game_from_path(&game)?;
            let other = with.map(gamefile::load_game_from_path).transpose()?;
            let report = axioms::audit_all(&game, other.as_ref(), cli.tol)?;
            let out = serde_json::json!({
                "game": game.tag(),
                "labels": game.labels(),
                "with": other.as_ref().map(|g| g.tag().to_string()),
                "report": report,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).map_err(Error::Json)?
            );
            Ok(())
        }
        Command::Select(args) => {
            let game = gamefile::load_game_from_path(&args.game)?;
            let attribution = exact_shapley(&game)?;
            let mut result = match (args.rule.top_k, args.rule.threshold) {
                (Some(k), None) => pathology::top_k(&attribution, k)?,
                (None, Some(tau)) => pathology::threshold(&attribution, tau)?,
                _ => unreachable!("clap group enforces exactly one rule"),
            };
            if let SelectionRule::TopK { k } = result.rule {
                result.regret = Some(pathology::selection_regret(&game, k)?);
            }
            let labels: Vec<&str> = result
                .selected
                .members()
                .into_iter()
                .map(|i| game.label(i))
                .collect();
            let out = serde_json::json!({
                "game": game.tag(),
                "labels": game.labels(),
                "selection": result,
                "selected_labels": labels,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).map_err(Error::Json)?
            );
            Ok(())
        }
        Command::Pathology { game, k } => {
            let game = gamefile::load_game_from_path(&game)?;
            let k = k.unwrap_or_else(|| (game.player_count() - 1).max(1));
            let attribution = exact_shapley(&game)?;
            let report = pathology::pathology_report(&game, &attribution, k, cli.tol, None)?;
            let out = serde_json::json!({
                "game": game.tag(),
                "labels": game.labels(),
                "report": report,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).map_err(Error::Json)?
            );
            Ok(())
        }
        Command::Experiment {
            kind,
            n,
            params,
            out,
            format,
        } => {
            let table = run_experiment(kind, n, params.as_deref(), cli.seed, cli.tol)?;
            write_table(&table, &out, format)?;
            println!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(())
        }
        Command::Sweep {
            kind,
            grid,
            out,
            jobs,
        } => {
            configure_workers(jobs)?;
            let axes = SweepConfig::parse_axes(&grid).map_err(|e| Failure::usage(e.to_string()))?;
            let table = match kind {
                SweepKind::Markov2 => {
                    let cfg = SweepConfig {
                        axes,
                        n: experiments::DEFAULT_N_MARKOV,
                        base_seed: cli.seed,
                    };
                    markov2_table(&experiments::sweep_markov2(&cfg)?)
                }
                SweepKind::Secret => {
                    let cfg = SweepConfig {
                        axes,
                        n: experiments::DEFAULT_N_SECRET,
                        base_seed: cli.seed,
                    };
                    secret_table(&experiments::sweep_secret(&cfg)?)
                }
            };
            write_table(&table, &out, OutputFormat::Csv)?;
            println!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(())
        }
    }
}

fn run_experiment(
    kind: ExperimentKind,
    n: Option<usize>,
    params: Option<&str>,
    seed: u64,
    tol: f64,
) -> Result<Table, Failure> {
    match kind {
        ExperimentKind::Markov1 => {
            if params.is_some() {
                return Err(Failure::usage("markov1 takes no --params"));
            }
            let n = n.unwrap_or(experiments::DEFAULT_N_MARKOV);
            Ok(markov1_table(&experiments::run_markov1(n, seed)?))
        }
        ExperimentKind::Markov2 => {
            let kv = parse_params(params, &["ell"])?;
            let ell = kv[0].unwrap_or(0.05);
            let n = n.unwrap_or(experiments::DEFAULT_N_MARKOV);
            Ok(markov2_table(&experiments::run_markov2(ell, n, seed)?))
        }
        ExperimentKind::Secret => {
            let kv = parse_params(params, &["t1", "t2"])?;
            let t1 = kv[0].unwrap_or(2.0);
            let t2 = kv[1].unwrap_or(2.2);
            let n = n.unwrap_or(experiments::DEFAULT_N_SECRET);
            Ok(secret_table(&experiments::run_secret(t1, t2, n, seed)?))
        }
        ExperimentKind::Taxicab => {
            let a = parse_taxicab_params(params)?;
            let n = n.unwrap_or(experiments::DEFAULT_N_TAXICAB);
            Ok(taxicab_table(&experiments::run_taxicab(&a, n, seed, tol)?))
        }
    }
}

/// Parse `k=v,k=v` against an expected key list; missing keys yield `None`.
fn parse_params(params: Option<&str>, keys: &[&str]) -> Result<Vec<Option<f64>>, Failure> {
    let mut out = vec![None; keys.len()];
    let Some(params) = params else {
        return Ok(out);
    };
    for entry in params.split(',') {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            Failure::usage(format!("bad parameter {entry:?}: expected key=value"))
        })?;
        let slot = keys.iter().position(|k| *k == key).ok_or_else(|| {
            Failure::usage(format!("unknown parameter {key:?} (expected {keys:?})"))
        })?;
        let parsed: f64 = value
            .parse()
            .map_err(|_| Failure::usage(format!("bad value for {key}: {value:?}")))?;
        out[slot] = Some(parsed);
    }
    Ok(out)
}

/// Parse `a=v1:v2:...` into the location vector.
fn parse_taxicab_params(params: Option<&str>) -> Result<Vec<f64>, Failure> {
    let Some(params) = params else {
        return Ok(vec![5.0, 10.0, 20.0]);
    };
    let Some(list) = params.strip_prefix("a=") else {
        return Err(Failure::usage(format!(
            "taxicab takes --params a=v1:v2:... , got {params:?}"
        )));
    };
    list.split(':')
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Failure::usage(format!("bad location value {v:?}")))
        })
        .collect()
}

fn write_table(table: &Table, path: &Path, format: OutputFormat) -> Result<(), Failure> {
    let file = std::fs::File::create(path).map_err(|e| Failure::from(Error::Io(e)))?;
    let writer = std::io::BufWriter::new(file);
    match format {
        OutputFormat::Csv => table.write_csv(writer)?,
        OutputFormat::Json => table.write_json(writer)?,
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn configure_workers(jobs: Option<usize>) -> Result<(), Failure> {
    let jobs = match jobs {
        Some(j) => Some(j),
        None => match std::env::var("SHAPAUDIT_JOBS") {
            Ok(v) => Some(v.parse().map_err(|_| {
                Failure::usage(format!("SHAPAUDIT_JOBS must be a worker count, got {v:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(Failure::usage("worker count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::usage(format!("could not configure workers: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(_jobs: Option<usize>) -> Result<(), Failure> {
    Ok(())
}
