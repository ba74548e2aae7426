use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harnack_lab::config::{DomainSpec, ExperimentConfig, Operation};
use harnack_lab::report::{to_json_text, EXIT_PRECONDITION};
use harnack_lab::runner::{output_dir, run, RunOutput, OUT_DIR_ENV};
use harnack_lab::verify::{verify_suite, Tolerances, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "harnack-lab",
    version,
    about = "Harnack constants, conductances and coupled walks on weighted graphs"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// lattice:<d>:<w>, three-rail:<n>, lamplighter:<R> or a TSV file.
    #[arg(long)]
    graph: String,
    /// Centre label (default: the generator's origin).
    #[arg(long)]
    center: Option<String>,
    /// Radii, comma separated; one report per radius.
    #[arg(long = "R", value_delimiter = ',', required = true)]
    radii: Vec<u32>,
    /// Output directory (overridden by HARNACK_OUT_DIR); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Sim {
    #[arg(long = "R", value_delimiter = ',', required = true)]
    radii: Vec<u32>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as TSV plus a JSON label sidecar.
    Gen {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elliptic Harnack constant of B(x0, R) in B(x0, 2R).
    Ehi(Common),
    /// Green-function Harnack constant on D = B(x0, 2R) or B(x0, 4R).
    Hg {
        #[command(flatten)]
        common: Common,
        #[arg(long = "D")]
        domain: Option<String>,
    },
    /// Annulus ratio of g_D(x0, ·) on the sphere of radius R.
    Annulus {
        #[command(flatten)]
        common: Common,
        #[arg(long = "D")]
        domain: Option<String>,
    },
    /// Oscillation-decay factor from the closed ball of radius ⌈KR⌉ to B(x0, R).
    Oi {
        #[command(flatten)]
        common: Common,
        #[arg(long = "K")]
        k: Option<f64>,
    },
    /// Hitting-probability lower bounds via chained balls.
    Thm1(Common),
    /// Dumbbell conductance ratio over B(x0, R).
    Db {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cap: Option<usize>,
        /// Also write the per-pair CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Coupling success probability on the lamplighter group.
    Couple {
        #[command(flatten)]
        sim: Sim,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Oscillation failure experiment on the lamplighter group.
    OscFail {
        #[command(flatten)]
        sim: Sim,
        /// Add the exact value (R ≤ 4).
        #[arg(long)]
        exact: bool,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Criteria to run, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// TOML file overriding individual tolerances.
        #[arg(long)]
        tolerances: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn graph_config(op: Operation, c: Common) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(op);
    cfg.graph = Some(c.graph);
    cfg.center = c.center;
    cfg.radii = c.radii;
    cfg.output.dir = c.out;
    cfg
}

fn sim_config(op: Operation, s: Sim) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(op);
    cfg.radii = s.radii;
    cfg.k = s.k;
    cfg.trials = s.trials;
    cfg.seed = s.seed;
    cfg.output.dir = s.out;
    cfg
}

fn parse_domain(d: Option<String>) -> Result<Option<DomainSpec>, String> {
    d.map(|s| s.parse::<DomainSpec>().map_err(|e| e.to_string())).transpose()
}

fn emit(cfg: &ExperimentConfig, out: &RunOutput) -> i32 {
    match output_dir(cfg) {
        Some(dir) => match out.write_to(&dir) {
            Ok(paths) => {
                for p in paths {
                    println!("{}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: cannot write to {}: {e}", dir.display());
                return EXIT_PRECONDITION;
            }
        },
        None => {
            for a in &out.artifacts {
                let report = a.file_name.ends_with(".json") && !a.file_name.ends_with(".labels.json");
                if report || a.file_name.ends_with(".tsv") {
                    print!("{}", a.contents);
                }
            }
        }
    }
    for r in &out.reports {
        if let Some(msg) = r["error"]["message"].as_str() {
            eprintln!("error: {msg}");
        }
    }
    out.exit_code
}

fn verify(seed: u64, only: Vec<u8>, tolerances: Option<PathBuf>, out: Option<PathBuf>) -> Result<i32, String> {
    let tolerances = match tolerances {
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            toml::from_str::<Tolerances>(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => Tolerances::default(),
    };
    let only = (!only.is_empty()).then(|| only.into_iter().collect::<BTreeSet<u8>>());
    let summary = verify_suite(&VerifyOptions { seed, tolerances, only, rerun_threads: None });
    for line in summary.lines() {
        println!("{line}");
    }
    let dir = match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => out,
    };
    if let Some(dir) = dir {
        fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        for (name, v) in [("verify-summary.json", summary.to_json()), ("verify-timings.json", summary.timings_json())] {
            let path = dir.join(name);
            fs::write(&path, to_json_text(&v)).map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }
    Ok(summary.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    let cfg = match cli.command {
        Command::Gen { graph, out } => {
            let mut cfg = ExperimentConfig::new(Operation::Gen);
            cfg.graph = Some(graph);
            cfg.output.dir = out;
            cfg
        }
        Command::Ehi(c) => graph_config(Operation::Ehi, c),
        Command::Hg { common, domain } => {
            let mut cfg = graph_config(Operation::Hg, common);
            cfg.domain = parse_domain(domain)?;
            cfg
        }
        Command::Annulus { common, domain } => {
            let mut cfg = graph_config(Operation::Annulus, common);
            cfg.domain = parse_domain(domain)?;
            cfg
        }
        Command::Oi { common, k } => {
            let mut cfg = graph_config(Operation::Oi, common);
            cfg.k = k;
            cfg
        }
        Command::Thm1(c) => graph_config(Operation::Thm1, c),
        Command::Db { common, cap, csv } => {
            let mut cfg = graph_config(Operation::Db, common);
            cfg.cap = cap;
            cfg.output.csv = csv;
            cfg
        }
        Command::Couple { sim, eps } => {
            let mut cfg = sim_config(Operation::Couple, sim);
            cfg.eps = eps;
            cfg
        }
        Command::OscFail { sim, exact } => {
            let mut cfg = sim_config(Operation::OscFail, sim);
            cfg.exact = exact;
            cfg
        }
        Command::Verify { seed, only, tolerances, out } => return verify(seed, only, tolerances, out),
        Command::Run { config } => {
            let text = fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            ExperimentConfig::from_toml(&text).map_err(|e| format!("{}: {e}", config.display()))?
        }
    };
    let out = run(&cfg);
    Ok(emit(&cfg, &out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PRECONDITION as u8);
        }
    }
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PRECONDITION as u8)
        }
    }
}
