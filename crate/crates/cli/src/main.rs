use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use mcftree::baseline::{build_edge_lp, build_source_lp, export_lp_text};
use mcftree::lp::BackendChoice;
use mcftree::{Formulation, HeuristicScope, PricingStrategy, SolverConfig, Status, Strategy};
use mcftree_cli::{append_record, load_instance, run, write_bench_outputs, Manifest, RunRecord};

const EXIT_OPTIMAL: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

/// Minimum-cost multi-commodity flow by column generation over trees or paths.
#[derive(Parser)]
#[command(name = "mcftree", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance. Exit code 0 optimal, 3 timeout, 4 infeasible,
    /// 2 usage or input error, 1 solver failure.
    Solve(SolveArgs),
    /// Run every instance of a manifest under every listed formulation, one
    /// process per run, and write the suite CSVs.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Tree,
    Path,
    SourceLp,
    EdgeLp,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    MasterEasy,
    PricingEasy,
}

#[derive(Clone, Copy, ValueEnum)]
enum PricingArg {
    Full,
    Bounded,
    Astar,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Global,
    PerSource,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Builtin,
    Clarabel,
}

#[derive(Args)]
struct SolveArgs {
    /// `.mcf` file, `X_net.tntp` (with `X_trips.tntp` beside it) or
    /// `random:nodes=N,edges=M,commodities=K[,sources=S][,seed=X][,capacity=mixed|none|tight:P]`
    instance: String,
    #[arg(long, value_enum, default_value = "tree")]
    formulation: FormulationArg,
    /// Relative optimality gap.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 7200.0)]
    timeout: f64,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "full")]
    pricing: PricingArg,
    /// Distance bounds for A*: one global table or exact per-source tables.
    #[arg(long, value_enum, default_value = "global")]
    heuristic: HeuristicArg,
    /// TNTP demand divisor; defaults to the bundled value for known networks.
    #[arg(long)]
    coefficient: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the path decomposition of the final flow here.
    #[arg(long, value_name = "FILE")]
    decompose_flows: Option<PathBuf>,
    /// Write the run record as JSON (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Append the run record to a CSV file.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Pricing threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendArg,
    /// Write the direct LP (source-lp / edge-lp) in LP text format and exit.
    #[arg(long, value_name = "FILE")]
    export_lp: Option<PathBuf>,
    /// Iteration cap for column generation.
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML manifest listing instances and formulations.
    manifest: PathBuf,
    /// Output directory for runs.csv and the derived CSVs.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

fn config(args: &SolveArgs) -> SolverConfig {
    let formulation = match args.formulation {
        FormulationArg::Tree => Formulation::Tree,
        FormulationArg::Path => Formulation::Path,
        FormulationArg::SourceLp => Formulation::SourceLp,
        FormulationArg::EdgeLp => Formulation::EdgeLp,
    };
    SolverConfig {
        rel_tol: args.tol,
        timeout: (args.timeout > 0.0).then(|| Duration::from_secs_f64(args.timeout)),
        strategy: match args.strategy {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::MasterEasy => Strategy::MasterEasy,
            StrategyArg::PricingEasy => Strategy::PricingEasy,
        },
        pricing: match args.pricing {
            PricingArg::Full => PricingStrategy::Full,
            PricingArg::Bounded => PricingStrategy::Bounded,
            PricingArg::Astar => PricingStrategy::AStar,
        },
        heuristic_scope: match args.heuristic {
            HeuristicArg::Global => HeuristicScope::Global,
            HeuristicArg::PerSource => HeuristicScope::PerSource,
        },
        seed: args.seed,
        threads: args.threads,
        backend: match args.backend {
            BackendArg::Auto => BackendChoice::Auto,
            BackendArg::Builtin => BackendChoice::Builtin,
            BackendArg::Clarabel => BackendChoice::Clarabel,
        },
        max_iterations: args.max_iterations,
        ..SolverConfig::new(formulation)
    }
}

fn write_json(target: &Path, record: &RunRecord) -> Result<()> {
    let text = serde_json::to_string_pretty(record)?;
    if target == Path::new("-") {
        println!("{text}");
    } else {
        std::fs::write(target, text + "\n").with_context(|| format!("writing {}", target.display()))?;
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    if !(args.tol > 0.0 && args.tol.is_finite()) || !(args.timeout >= 0.0) {
        eprintln!("error: --tol must be positive and --timeout non-negative");
        return Ok(EXIT_USAGE);
    }
    let instance = match load_instance(&args.instance, args.coefficient) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_USAGE);
        }
    };
    let cfg = config(&args);
    if let Some(path) = &args.export_lp {
        let lp = match cfg.formulation {
            Formulation::SourceLp => build_source_lp(&instance),
            Formulation::EdgeLp => build_edge_lp(&instance),
            _ => {
                eprintln!("error: --export-lp needs --formulation source-lp or edge-lp");
                return Ok(EXIT_USAGE);
            }
        };
        std::fs::write(path, export_lp_text(&lp))?;
        return Ok(EXIT_OPTIMAL);
    }
    let (record, report) = run(&instance, &cfg, args.decompose_flows.as_deref())?;
    println!("{}", record.summary());
    if !report.infeasible_commodities.is_empty() {
        let shown: Vec<String> = report
            .infeasible_commodities
            .iter()
            .take(10)
            .map(|&k| {
                let c = &instance.commodities[k];
                format!("{}->{}", c.source + 1, c.sink + 1)
            })
            .collect();
        println!(
            "  {} commodities cannot be routed, e.g. {}",
            report.infeasible_commodities.len(),
            shown.join(", ")
        );
    }
    if let Some(path) = &args.json {
        write_json(path, &record)?;
    }
    if let Some(path) = &args.csv {
        append_record(path, &record)?;
    }
    Ok(match report.status {
        Status::Optimal => EXIT_OPTIMAL,
        Status::Timeout => EXIT_TIMEOUT,
        Status::Infeasible => EXIT_INFEASIBLE,
    })
}

fn cmd_bench(args: BenchArgs) -> Result<u8> {
    let manifest = Manifest::load(&args.manifest)?;
    std::fs::create_dir_all(&args.out)?;
    let exe = std::env::current_exe()?;
    let cap = manifest.timeout.unwrap_or(7200.0);
    let scratch = args.out.join(".record.json");
    let mut records = Vec::new();
    for entry in &manifest.instances {
        let instance = manifest.resolve(&args.manifest, entry);
        if !instance.starts_with("random:") && !Path::new(&instance).exists() {
            warn!("skipping missing instance {instance}");
            eprintln!("warning: skipping missing instance {instance}");
            continue;
        }
        for formulation in &manifest.formulations {
            let _ = std::fs::remove_file(&scratch);
            let mut cmd = Command::new(&exe);
            cmd.arg("solve")
                .arg(&instance)
                .args(["--formulation", formulation])
                .arg("--json")
                .arg(&scratch)
                .args(["--timeout", &cap.to_string()]);
            if let Some(tol) = manifest.tol {
                cmd.args(["--tol", &tol.to_string()]);
            }
            if let Some(c) = entry.coefficient {
                cmd.args(["--coefficient", &c.to_string()]);
            }
            cmd.args(&manifest.args).args(&entry.args);
            let out = cmd.output().with_context(|| format!("running {}", exe.display()))?;
            let code = out.status.code();
            if !matches!(code, Some(0) | Some(3) | Some(4)) {
                eprintln!(
                    "warning: {instance} [{formulation}] failed ({:?}): {}",
                    code,
                    String::from_utf8_lossy(&out.stderr).trim()
                );
                continue;
            }
            let record: RunRecord = serde_json::from_str(&std::fs::read_to_string(&scratch)?)?;
            println!(
                "{} [{}] {} {:.3}s",
                record.instance, record.formulation, record.status, record.wall_time_s
            );
            records.push(record);
        }
    }
    let _ = std::fs::remove_file(&scratch);
    if records.is_empty() {
        bail!("no runs completed");
    }
    write_bench_outputs(&args.out, &records, cap)?;
    println!("{} runs written to {}", records.len(), args.out.display());
    Ok(EXIT_OPTIMAL)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OPTIMAL });
        }
    };
    let result = match cli.command {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
