mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hwlab::suite::{emit_tables, exit_code, render, run, Command, Format, RunConfig};
use hwlab::{Error, Exec};

use settings::{FamilyName, Settings};

const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "hwlab", version, about = "Verification suites for Heisenberg-Weyl representations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Root system of type C, closed subsets and the wide criterion
    Roots,
    /// Matrix model of hw_n and its embedding into sp_{2n+2}
    Embed,
    /// One Schrödinger oscillator in the Hermite basis
    Oscillator,
    /// Intertwiners of tensor products, including the zero-sum case
    Intertwine,
    /// Lowest-weight states and their closed forms
    LowestWeights,
    /// Indecomposability of restricted symplectic irreducibles
    Indecomp,
    /// Every suite above
    All,
    /// Write table1.csv and table2_check.csv into --output (default `.`)
    Tables,
}

#[derive(Debug, Args)]
struct Opts {
    /// Flat key = value settings file; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Hermite basis size N
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Quadrature nodes per axis m
    #[arg(long, global = true)]
    quad_nodes: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// defining, sym or primitive-wedge2
    #[arg(long, global = true)]
    family: Option<FamilyName>,
    /// Symmetric power for --family sym
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override NAME=VALUE for every check whose name contains NAME
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    /// json, csv or text
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Report file (directory for `tables`)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Omit the wall-clock duration so reports are byte-reproducible
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Run every loop on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|_| format!("invalid tolerance `{v}`"))?;
    Ok((k.to_string(), v))
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Opts {
    fn settings(&self) -> Settings {
        Settings {
            n: self.n,
            lambda: self.lambda,
            mu: self.mu,
            truncation: self.truncation,
            quad_nodes: self.quad_nodes,
            k_max: self.k_max,
            family: self.family,
            k: self.k,
            seed: self.seed,
            format: self.format,
            output: self.output.clone(),
            tolerances: self.tolerances.clone(),
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("hwlab: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn build_config(cli: &Cli, command: Command) -> Result<RunConfig, String> {
    let file = match &cli.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Settings::from_config_text(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Settings::default(),
    };
    let mut config = RunConfig {
        command,
        ..RunConfig::default()
    };
    cli.opts.settings().over(file).apply(&mut config);
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let exec = if cli.opts.sequential { Exec::Sequential } else { Exec::default() };
    let (command, tables) = match cli.command {
        Cmd::Roots => (Command::Roots, false),
        Cmd::Embed => (Command::Embed, false),
        Cmd::Oscillator => (Command::Oscillator, false),
        Cmd::Intertwine => (Command::Intertwine, false),
        Cmd::LowestWeights => (Command::LowestWeights, false),
        Cmd::Indecomp => (Command::Indecomp, false),
        Cmd::All => (Command::All, false),
        Cmd::Tables => (Command::LowestWeights, true),
    };
    let config = match build_config(&cli, command) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Err(e) = config.validate() {
        return usage(e);
    }

    if tables {
        let dir = config.output_path.clone().unwrap_or_else(|| PathBuf::from("."));
        return match emit_tables(&dir, &config) {
            Ok(paths) => {
                for p in paths {
                    println!("{}", p.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("hwlab: {e}");
                ExitCode::FAILURE
            }
        };
    }

    let mut report = match run(&config, exec) {
        Ok(r) => r,
        Err(Error::Inconclusive(why)) => {
            eprintln!("hwlab: inconclusive: {why}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("hwlab: {e}");
            return ExitCode::FAILURE;
        }
    };
    if cli.opts.no_timestamp {
        report.duration_ms = None;
    }
    let out = match render(&config, &report) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("hwlab: {e}");
            return ExitCode::FAILURE;
        }
    };
    match &config.output_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("hwlab: {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{out}"),
    }
    ExitCode::from(exit_code(&report) as u8)
}
