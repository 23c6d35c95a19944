//! Run configuration and the named verification suites.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::indecomp::indecomp_report;
use crate::intertwine::{
    closed_form_check, intertwiner_report, lowest_weight_report, table1_csv, table2_csv, zero_case_operators,
    IntertwinerSpec, SampleGrid,
};
use crate::irreps::{build, defining_rep, representation_check, restrict_to_hw, Family};
use crate::oscillator::{oscillator_report, HermiteBasisSpec};
use crate::report::VerificationReport;
use crate::rootsys::roots_report;
use crate::sympembed::{cartan_eigen_check, commutation_table, embedding_check};

/// `(λ, μ)` pairs always covered by the intertwiner suite.
pub const INTERTWINER_PAIRS: [(f64, f64); 5] = [(1.0, 2.0), (2.0, 1.0), (0.5, 3.7), (-1.0, 3.0), (5.0, -2.0)];
/// `(λ, μ)` pairs always covered by the lowest-weight suite.
pub const LOWEST_WEIGHT_PAIRS: [(f64, f64); 3] = [(0.5, 1.0), (1.0, 2.0), (3.7, 0.2)];
/// Random closed subsets sampled by the roots suite.
pub const ROOT_SAMPLES: usize = 64;
/// Side of the square grid used for closed-form comparisons.
pub const GRID_POINTS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Roots,
    Embed,
    Oscillator,
    Intertwine,
    LowestWeights,
    Indecomp,
    All,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Roots,
        Command::Embed,
        Command::Oscillator,
        Command::Intertwine,
        Command::LowestWeights,
        Command::Indecomp,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Roots => "roots",
            Command::Embed => "embed",
            Command::Oscillator => "oscillator",
            Command::Intertwine => "intertwine",
            Command::LowestWeights => "lowest-weights",
            Command::Indecomp => "indecomp",
            Command::All => "all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub truncation: usize,
    pub quad_nodes: usize,
    pub k_max: usize,
    pub family: Family,
    pub seed: u64,
    /// Check-name substring to replacement tolerance.
    pub tolerances: BTreeMap<String, f64>,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::All,
            n: 1,
            lambda: 1.0,
            mu: 2.0,
            truncation: 12,
            quad_nodes: 64,
            k_max: 5,
            family: Family::Sym { k: 2 },
            seed: 42,
            tolerances: BTreeMap::new(),
            format: Format::Text,
            output_path: None,
        }
    }
}

impl RunConfig {
    /// Rejects parameter combinations no suite can run with.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.truncation < 4 {
            return bad(format!("truncation must be at least 4, got {}", self.truncation));
        }
        if self.quad_nodes < 2 * self.truncation {
            return bad(format!(
                "quadrature needs at least 2N = {} nodes, got {}",
                2 * self.truncation,
                self.quad_nodes
            ));
        }
        if self.lambda == 0.0 || !self.lambda.is_finite() || !self.mu.is_finite() || self.mu == 0.0 {
            return bad(format!("λ and μ must be finite and nonzero, got ({}, {})", self.lambda, self.mu));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
            return bad(format!("tolerance `{k}` must be positive, got {v}"));
        }
        let uses_pair = matches!(self.command, Command::Intertwine | Command::All);
        if uses_pair && self.lambda + self.mu == 0.0 {
            return Err(Error::WrongPath(format!(
                "λ + μ = 0 for ({}, {}); the intertwiner needs a nonzero sum",
                self.lambda, self.mu
            )));
        }
        if matches!(self.command, Command::LowestWeights | Command::All) && !(self.lambda > 0.0 && self.mu > 0.0) {
            return bad("lowest weights need λ, μ > 0".into());
        }
        if let Family::Sym { k } = self.family {
            if k == 0 {
                return bad("symmetric power must be at least 1".into());
            }
        }
        Ok(())
    }
}

fn push_unique(list: &mut Vec<(f64, f64)>, pair: (f64, f64)) {
    if !list.contains(&pair) {
        list.push(pair);
    }
}

fn roots_suite(c: &RunConfig) -> Result<VerificationReport> {
    roots_report(c.n, ROOT_SAMPLES, c.seed)
}

fn embed_suite(c: &RunConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("embed");
    r.absorb(commutation_table(c.n)?);
    r.absorb(embedding_check(c.n)?);
    r.absorb(cartan_eigen_check(c.n)?);
    Ok(r)
}

fn oscillator_suite(c: &RunConfig) -> Result<VerificationReport> {
    let spec = HermiteBasisSpec::new(c.lambda.abs(), c.truncation, c.quad_nodes)?;
    oscillator_report(&spec)
}

fn intertwine_suite(c: &RunConfig, exec: Exec) -> Result<VerificationReport> {
    let mut pairs = vec![(c.lambda, c.mu)];
    for p in INTERTWINER_PAIRS {
        push_unique(&mut pairs, p);
    }
    let reports = exec.map(&pairs, |&(l, m)| {
        intertwiner_report(IntertwinerSpec::new(l, m, c.truncation, c.quad_nodes)?, exec)
    });
    let mut r = VerificationReport::new("intertwine");
    for rep in reports {
        r.absorb(rep?);
    }
    let (_, _, zero) = zero_case_operators(c.lambda, c.truncation, c.quad_nodes, exec)?;
    r.absorb(zero);
    Ok(r)
}

fn lowest_weight_pairs(c: &RunConfig) -> Vec<(f64, f64)> {
    let mut pairs = vec![(c.lambda, c.mu)];
    for p in LOWEST_WEIGHT_PAIRS {
        push_unique(&mut pairs, p);
    }
    push_unique(&mut pairs, (c.lambda, c.lambda));
    pairs
}

fn lowest_weight_suite(c: &RunConfig) -> Result<VerificationReport> {
    lowest_weight_report(c.k_max.max(10), &lowest_weight_pairs(c), c.truncation, GRID_POINTS)
}

fn indecomp_cases(c: &RunConfig) -> Vec<(Family, bool)> {
    match c.command {
        Command::All => vec![
            (Family::Defining, false),
            (Family::Sym { k: 2 }, false),
            (Family::PrimitiveWedge2, false),
            (Family::Defining, true),
        ],
        _ => vec![(c.family, false)],
    }
}

/// One irreducible family restricted to hw_n, or (when `doubled`) the
/// direct sum of the defining module with itself.
fn indecomp_case(family: Family, doubled: bool, c: &RunConfig) -> Result<VerificationReport> {
    if doubled {
        let v = restrict_to_hw(&defining_rep(c.n)?)?;
        return indecomp_report(&format!("defining⊕defining-n{}", c.n), &v.direct_sum(&v)?, false, c.seed);
    }
    let rep = build(family, c.n)?;
    let mut r = VerificationReport::new(format!("{family}-n{}", c.n));
    r.absorb(representation_check(&rep)?);
    r.absorb(indecomp_report(&format!("{family}-n{}", c.n), &restrict_to_hw(&rep)?, true, c.seed)?);
    Ok(r)
}

fn indecomp_suite(c: &RunConfig, exec: Exec) -> Result<VerificationReport> {
    let cases = indecomp_cases(c);
    let mut r = VerificationReport::new("indecomp");
    for rep in exec.map(&cases, |&(f, d)| indecomp_case(f, d, c)) {
        r.absorb(rep?);
    }
    Ok(r)
}

fn single(command: Command, c: &RunConfig, exec: Exec) -> Result<VerificationReport> {
    match command {
        Command::Roots => roots_suite(c),
        Command::Embed => embed_suite(c),
        Command::Oscillator => oscillator_suite(c),
        Command::Intertwine => intertwine_suite(c, exec),
        Command::LowestWeights => lowest_weight_suite(c),
        Command::Indecomp => indecomp_suite(c, exec),
        Command::All => unreachable!("`all` is expanded by the caller"),
    }
}

/// Runs the configured command. Suites of `all` run concurrently under a
/// parallel `exec` and are merged in a fixed order.
pub fn run(config: &RunConfig, exec: Exec) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let mut report = match config.command {
        Command::All => {
            let parts = [
                Command::Roots,
                Command::Embed,
                Command::Oscillator,
                Command::Intertwine,
                Command::LowestWeights,
                Command::Indecomp,
            ];
            let mut all = VerificationReport::new("all");
            for r in exec.map(&parts, |&cmd| single(cmd, config, exec)) {
                all.absorb(r?);
            }
            all
        }
        cmd => {
            let mut r = single(cmd, config, exec)?;
            r.suite = cmd.name().to_string();
            r
        }
    };
    report.apply_overrides(&config.tolerances);
    report.config = serde_json::to_value(config).expect("config serializes");
    report.set_duration(start.elapsed());
    Ok(report)
}

/// Closed-form fits for `k ≤ 2` over the lowest-weight pairs.
pub fn table2_fits(config: &RunConfig) -> Result<Vec<crate::intertwine::ClosedFormFit>> {
    let mut fits = Vec::new();
    for (l, m) in lowest_weight_pairs(config) {
        let grid = SampleGrid::uniform(l, m, GRID_POINTS);
        for k in 0..=2 {
            fits.push(closed_form_check(k, l, m, config.truncation, &grid)?);
        }
    }
    Ok(fits)
}

/// Writes `table1.csv` and `table2_check.csv` into `dir`.
pub fn emit_tables(dir: &Path, config: &RunConfig) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let t1 = dir.join("table1.csv");
    std::fs::write(&t1, table1_csv(config.k_max.max(2))?)?;
    let t2 = dir.join("table2_check.csv");
    std::fs::write(&t2, table2_csv(&table2_fits(config)?))?;
    Ok(vec![t1, t2])
}

/// Process exit status for a finished report: 0 pass, 1 failure,
/// 2 inconclusive.
pub fn exit_code(report: &VerificationReport) -> i32 {
    if report.inconclusive {
        2
    } else if report.passed() {
        0
    } else {
        1
    }
}

/// Report in the requested format. For `lowest-weights` the CSV form is
/// the coefficient table itself.
pub fn render(config: &RunConfig, report: &VerificationReport) -> Result<String> {
    Ok(match config.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
        Format::Csv if config.command == Command::LowestWeights => table1_csv(config.k_max)?,
        Format::Csv => report.to_csv(),
    })
}
