//! Command-line front end. Every command writes one JSON document (or a graph
//! export) to stdout or `--out`; progress and timings go to stderr.

mod campaigns;
mod subsets;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classes::{enumerate_class, validate_cubic};
use crate::error::{bad_input, Error, Result};
use crate::field::{irreducible_cubics, FieldSpec, UPoly};
use crate::graph::{build_gamma, export_graph, summarize, ExportFormat};
use crate::linalg::FMat;
use crate::matpoly::is_core;

pub use campaigns::{run_campaign, Campaign, Claim};
pub use subsets::{sample_subsets, SizeRow, SubsetReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NON_CORE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const BUDGET_ENV: &str = "NULLCORE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "nullcore", version, about = "Core sets of 3x3 matrices over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct FieldArgs {
    /// Field order (prime or prime power).
    #[arg(long)]
    pub q: Option<u32>,
    /// Irreducible cubic as ascending coefficient codes, e.g. 1,1,0,1.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Complexity budget for exhaustive mode (elementary checks).
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphOutput {
    Summary,
    EdgeCsv,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the matrix set in a set file is core.
    CoreCheck {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification campaign.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum)]
        campaign: Campaign,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the core fraction of subsets of C(m) by size.
    SampleSubsets {
        #[command(flatten)]
        field: FieldArgs,
        /// Subset sizes, e.g. 1,2,3,4,5.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the conjugacy class C(m).
    Class {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the invertible-difference graph and summarize or export it.
    Graph {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = GraphOutput::Summary)]
        format: GraphOutput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the monic irreducible cubics over F_q.
    Cubics {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Field and cubic resolved from the flags.
#[derive(Debug, Clone)]
pub struct Setup {
    pub field: FieldSpec,
    pub m: UPoly,
}

impl FieldArgs {
    pub fn resolve(&self) -> Result<Setup> {
        let q = self.q.ok_or_else(|| bad_input("--q is required"))?;
        resolve_setup(q, self.m.as_deref())
    }
}

pub fn resolve_setup(q: u32, m: Option<&[u32]>) -> Result<Setup> {
    let field = FieldSpec::gf(q)?;
    let m = match m {
        Some(codes) => UPoly::from_codes(&field, codes)?,
        None => irreducible_cubics(&field)
            .into_iter()
            .next()
            .ok_or_else(|| bad_input(format!("no irreducible cubic over F_{q}")))?,
    };
    validate_cubic(&m)?;
    Ok(Setup { field, m })
}

impl RunArgs {
    pub fn budget(&self) -> Result<u64> {
        if let Some(b) = self.budget {
            return Ok(b);
        }
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| bad_input(format!("{BUDGET_ENV} is not an integer"))),
            Err(_) => Ok(DEFAULT_BUDGET),
        }
    }

    /// Seed and sample count for randomized mode.
    pub fn randomized(&self, default_samples: u64) -> Result<(u64, u64)> {
        let seed = self.seed.ok_or_else(|| bad_input("randomized mode requires --seed"))?;
        Ok((seed, self.samples.unwrap_or(default_samples)))
    }
}

/// Header shared by every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub field: FieldSpec,
    pub q: u32,
    pub m: UPoly,
}

impl ReportHeader {
    pub fn new(command: &'static str, setup: &Setup) -> Self {
        ReportHeader {
            tool: "nullcore",
            version: env!("CARGO_PKG_VERSION"),
            command,
            field: setup.field.clone(),
            q: setup.field.order(),
            m: setup.m.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Document<'a, C: Serialize, B: Serialize> {
    #[serde(flatten)]
    header: ReportHeader,
    config: &'a C,
    #[serde(flatten)]
    body: B,
}

/// The set file format `{"q": 2, "m": [1,1,0,1], "set": [[9 codes], ...]}`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub q: u32,
    #[serde(default)]
    pub m: Option<Vec<u32>>,
    pub set: Vec<Vec<u32>>,
}

impl SetFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad_input(format!("set file: {e}")))
    }

    pub fn matrices(&self, field: &FieldSpec) -> Result<Vec<FMat>> {
        if self.set.is_empty() {
            return Err(bad_input("set file lists no matrices"));
        }
        self.set.iter().map(|codes| FMat::new(field, 3, 3, codes.clone())).collect()
    }
}

pub fn load_set(path: &Path, field: &FieldArgs) -> Result<(Setup, Vec<FMat>)> {
    let text = std::fs::read_to_string(path).map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
    let file = SetFile::parse(&text)?;
    if let Some(q) = field.q {
        if q != file.q {
            return Err(bad_input(format!("--q {q} disagrees with the set file field F_{}", file.q)));
        }
    }
    let m = match (&field.m, &file.m) {
        (Some(a), Some(b)) if a != b => return Err(bad_input("--m disagrees with the set file")),
        (Some(a), _) | (None, Some(a)) => Some(a.as_slice()),
        (None, None) => None,
    };
    let setup = resolve_setup(file.q, m)?;
    let set = file.matrices(&setup.field)?;
    Ok((setup, set))
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| bad_input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| bad_input(format!("stdout: {e}")))
        }
    }
}

fn write_json<C: Serialize, B: Serialize>(out: Option<&Path>, header: ReportHeader, config: &C, body: B) -> Result<()> {
    let doc = Document { header, config, body };
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    write_output(out, text.as_bytes())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SizeGuard(_) => EXIT_BUDGET,
        Error::Violation(_) | Error::DivZero => EXIT_CLAIM_FAILED,
        Error::SpecMismatch | Error::DimensionMismatch(_) | Error::BadInput(_) | Error::Unsupported(_) => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::SizeGuard(_)) {
                eprintln!("advisory: use --mode randomized --seed N --samples K, or raise --budget / {BUDGET_ENV}");
            }
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct CoreCheckConfig<'a> {
    set: &'a Path,
}

#[derive(Serialize)]
struct VerifyConfig<'a> {
    campaign: Campaign,
    #[serde(flatten)]
    run: &'a RunArgs,
    budget: u64,
}

#[derive(Serialize)]
struct SubsetConfig<'a> {
    sizes: &'a [usize],
    #[serde(flatten)]
    run: &'a RunArgs,
    budget: u64,
}

#[derive(Serialize)]
struct Empty {}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::CoreCheck { field, set, out } => {
            let (setup, matrices) = load_set(&set, &field)?;
            let report = is_core(&matrices)?;
            let code = if report.is_core() { EXIT_OK } else { EXIT_NON_CORE };
            write_json(out.as_deref(), ReportHeader::new("core-check", &setup), &CoreCheckConfig { set: &set }, &report)?;
            Ok(code)
        }
        Command::Verify { field, campaign, run, out } => {
            let setup = field.resolve()?;
            let budget = run.budget()?;
            let inventory = enumerate_class(&setup.m)?;
            let claims = run_campaign(&inventory, campaign, &run, budget)?;
            let all_pass = claims.iter().all(|c| c.pass);
            #[derive(Serialize)]
            struct Body<'a> {
                claims: &'a [Claim],
                all_pass: bool,
            }
            let config = VerifyConfig { campaign, run: &run, budget };
            write_json(out.as_deref(), ReportHeader::new("verify", &setup), &config, Body { claims: &claims, all_pass })?;
            Ok(if all_pass { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
        Command::SampleSubsets { field, sizes, run, out } => {
            let setup = field.resolve()?;
            let budget = run.budget()?;
            let inventory = enumerate_class(&setup.m)?;
            let report = sample_subsets(&inventory, &sizes, &run, budget)?;
            let code = if report.assertions_pass { EXIT_OK } else { EXIT_CLAIM_FAILED };
            let config = SubsetConfig { sizes: &sizes, run: &run, budget };
            write_json(out.as_deref(), ReportHeader::new("sample-subsets", &setup), &config, &report)?;
            Ok(code)
        }
        Command::Class { field, out } => {
            let setup = field.resolve()?;
            let inventory = enumerate_class(&setup.m)?;
            #[derive(Serialize)]
            struct Body<'a> {
                size: usize,
                members: &'a [FMat],
            }
            let body = Body { size: inventory.len(), members: inventory.members() };
            write_json(out.as_deref(), ReportHeader::new("class", &setup), &Empty {}, body)?;
            Ok(EXIT_OK)
        }
        Command::Graph { field, format, out } => {
            let setup = field.resolve()?;
            let g = build_gamma(&setup.m)?;
            match format {
                GraphOutput::Summary => {
                    let summary = summarize(&g, &g.inventory().companion())?;
                    write_json(out.as_deref(), ReportHeader::new("graph", &setup), &Empty {}, &summary)?;
                }
                GraphOutput::EdgeCsv => write_output(out.as_deref(), &export_graph(&g, ExportFormat::EdgeCsv))?,
                GraphOutput::Dot => write_output(out.as_deref(), &export_graph(&g, ExportFormat::Dot))?,
            }
            Ok(EXIT_OK)
        }
        Command::Cubics { q, out } => {
            let field = FieldSpec::gf(q)?;
            let cubics = irreducible_cubics(&field);
            let setup = Setup { m: cubics.first().cloned().ok_or_else(|| bad_input("no cubics"))?, field };
            #[derive(Serialize)]
            struct Body {
                cubics: Vec<UPoly>,
            }
            write_json(out.as_deref(), ReportHeader::new("cubics", &setup), &Empty {}, Body { cubics })?;
            Ok(EXIT_OK)
        }
    }
}
