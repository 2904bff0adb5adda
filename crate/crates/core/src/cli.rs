//! Command-line front end: argument parsing and the four subcommands.
//!
//! Exit codes: 0 success, 1 a theorem-level verification failed, 2 usage or
//! configuration error, 3 non-generic parameters.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::eigen::{eigenfunction, eigenfunction_resampled};
use crate::error::{Error, Result};
use crate::qkernel::{format_fraction, sample_generic_point_with, ParamPoint, SampleConfig};
use crate::series::{Exponent, Truncation};
use crate::verify::{run_suite, suite_exit_failed, summary_table, to_jsonl, CheckName, SuiteConfig};
use crate::xform::operator_matrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NON_GENERIC: i32 = 3;

/// Eigen-solving retries on sampled points before giving up.
const EIGEN_RETRIES: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "qcommute", version, about = "Exact checks for a commuting family of q-integral transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the operator matrix on the truncated monomial basis.
    Matrix(MatrixArgs),
    /// Solve for one eigenfunction.
    Eigen(EigenArgs),
    /// Run verification checks and write JSON-lines reports.
    Verify(VerifyArgs),
    /// Sample or inspect a parameter point.
    #[command(subcommand)]
    Point(PointCommand),
}

#[derive(Debug, Args)]
pub struct TruncArgs {
    /// Total-degree truncation bound.
    #[arg(long, conflicts_with = "box_bounds")]
    pub deg: Option<u32>,
    /// Box truncation, comma-separated per-coordinate bounds.
    #[arg(long = "box", value_delimiter = ',')]
    pub box_bounds: Option<Vec<u32>>,
}

impl TruncArgs {
    fn resolve(&self, default: Option<Truncation>) -> Result<Option<Truncation>> {
        Ok(match (&self.deg, &self.box_bounds) {
            (Some(d), _) => Some(Truncation::TotalDegree(*d)),
            (None, Some(b)) => Some(Truncation::Box(b.clone())),
            (None, None) => default,
        })
    }
}

#[derive(Debug, Args)]
pub struct PointSource {
    /// Seed for sampling the parameter point.
    #[arg(long, env = "QCOMMUTE_SEED", default_value_t = 1)]
    pub seed: u64,
    /// JSON parameter point; overrides the seed.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub source: PointSource,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long)]
    pub n: usize,
    /// Index vector, comma-separated (`1,0`).
    #[arg(long, value_delimiter = ',', required = true)]
    pub index: Vec<u32>,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub source: PointSource,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check to run; repeatable.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    /// Run every exact check (plus the approximate one with --approx).
    #[arg(long, conflicts_with = "checks")]
    pub all: bool,
    /// Suite configuration file (JSON).
    #[arg(long, conflicts_with_all = ["checks", "all"])]
    pub config: Option<PathBuf>,
    /// Restrict the commutator check to this variable count.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// First seed.
    #[arg(long, env = "QCOMMUTE_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Number of consecutive seeds.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Enable the approximate check.
    #[arg(long, conflicts_with = "no_approx")]
    pub approx: bool,
    /// Disable the approximate check (the default).
    #[arg(long)]
    pub no_approx: bool,
    /// Tolerance for the approximate check.
    #[arg(long)]
    pub tol: Option<String>,
    /// JSON-lines report file; without it reports go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PointCommand {
    /// Sample a generic point for a truncation.
    Sample {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        trunc: TruncArgs,
        #[arg(long, env = "QCOMMUTE_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report derived quantities and the genericity verdict for a point file.
    Inspect {
        file: PathBuf,
        #[command(flatten)]
        trunc: TruncArgs,
    },
}

/// Exit code for an error escaping a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonGeneric(_) | Error::DivisionByZero(_) | Error::EigenvalueCollision { .. } | Error::ExhaustedRetries(_) => {
            EXIT_NON_GENERIC
        }
        Error::TriangularityViolation { .. } | Error::NotTerminating(_) => EXIT_FAIL,
        Error::InvalidInput(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::ShapeMismatch(_)
        | Error::NotASquare(_)
        | Error::BudgetExceeded(_) => EXIT_USAGE,
    }
}

/// Writes through a temporary sibling file and renames into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidInput(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(e)
    })
}

fn emit(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Reads a parameter point; malformed files are usage errors.
pub fn read_point(path: &Path) -> Result<ParamPoint> {
    let text = std::fs::read_to_string(path)?;
    let pt: ParamPoint = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if pt.n() < 2 {
        return Err(Error::InvalidInput(format!("{}: need at least two s values", path.display())));
    }
    Ok(pt)
}

fn point_for(n: usize, trunc: &Truncation, src: &PointSource) -> Result<ParamPoint> {
    match &src.params {
        Some(p) => {
            let pt = read_point(p)?;
            if pt.n() != n {
                return Err(Error::InvalidInput(format!("params file has n = {}, expected {n}", pt.n())));
            }
            pt.check_generic(trunc)?;
            Ok(pt)
        }
        None => sample_generic_point_with(n, trunc, src.seed, &SampleConfig::default()),
    }
}

fn need_trunc(t: &TruncArgs, n: usize) -> Result<Truncation> {
    let tr = t.resolve(None)?.ok_or_else(|| Error::InvalidInput("one of --deg or --box is required".into()))?;
    tr.check_dim(n)?;
    Ok(tr)
}

fn cmd_matrix(a: &MatrixArgs) -> Result<i32> {
    let tr = need_trunc(&a.trunc, a.n)?;
    let pt = point_for(a.n, &tr, &a.source)?;
    let m = operator_matrix(&pt, &tr)?;
    emit(&a.out, &serde_json::to_value(&m)?)?;
    Ok(EXIT_OK)
}

fn cmd_eigen(a: &EigenArgs) -> Result<i32> {
    let tr = need_trunc(&a.trunc, a.n)?;
    let j = Exponent::new(a.index.clone());
    if j.dim() + 1 != a.n {
        return Err(Error::InvalidInput(format!("index {j} needs {} entries for n = {}", a.n - 1, a.n)));
    }
    if !tr.admits(&j) {
        return Err(Error::InvalidInput(format!("index {j} lies outside {tr}")));
    }
    let (pt, eig) = match &a.source.params {
        Some(_) => {
            let pt = point_for(a.n, &tr, &a.source)?;
            let e = eigenfunction(&pt, &tr, &j)?;
            (pt, e)
        }
        None => eigenfunction_resampled(a.n, &tr, &j, a.source.seed, EIGEN_RETRIES)?,
    };
    emit(&a.out, &json!({ "point": pt, "trunc": tr, "eigen": eig }))?;
    Ok(EXIT_OK)
}

fn suite_from_args(a: &VerifyArgs) -> Result<SuiteConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?
        }
        None if a.all => SuiteConfig::all(a.approx),
        None => {
            if a.checks.is_empty() {
                return Err(Error::InvalidInput("give --check NAME, --all or --config FILE".into()));
            }
            let checks = a.checks.iter().map(|c| c.parse()).collect::<Result<Vec<CheckName>>>()?;
            SuiteConfig { checks, ..SuiteConfig::default() }
        }
    };
    if a.config.is_none() || a.seeds.is_some() || a.seed != 1 {
        let count = a.seeds.unwrap_or(if a.config.is_some() { cfg.seeds.len() as u64 } else { 3 });
        if count == 0 {
            return Err(Error::InvalidInput("--seeds must be positive".into()));
        }
        cfg.seeds = (0..count).map(|k| a.seed.wrapping_add(k)).collect();
    }
    if let Some(n) = a.n {
        cfg.n_values = vec![n];
    }
    if let Some(tr) = a.trunc.resolve(None)? {
        let n = a.n.ok_or_else(|| Error::InvalidInput("--deg/--box needs --n".into()))?;
        cfg.trunc.insert(n, tr);
    }
    if a.approx {
        cfg.approx_enabled = true;
    }
    if a.no_approx {
        cfg.approx_enabled = false;
        cfg.checks.retain(|c| c.is_exact());
    }
    if let Some(t) = &a.tol {
        cfg.tol = t.clone();
    }
    if a.out.is_some() {
        cfg.output = a.out.clone();
    }
    if cfg.checks.contains(&CheckName::Ramanujan) && !cfg.approx_enabled {
        return Err(Error::InvalidInput("the ramanujan check is approximate; pass --approx".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let cfg = suite_from_args(a)?;
    let reports = run_suite(&cfg)?;
    let jsonl = to_jsonl(&reports)?;
    let table = summary_table(&reports);
    match &cfg.output {
        Some(p) => {
            write_atomic(p, jsonl.as_bytes())?;
            print!("{table}");
        }
        None => {
            print!("{jsonl}");
            eprint!("{table}");
        }
    }
    Ok(if suite_exit_failed(&reports) { EXIT_FAIL } else { EXIT_OK })
}

fn cmd_point(c: &PointCommand) -> Result<i32> {
    match c {
        PointCommand::Sample { n, trunc, seed, out } => {
            let tr = trunc.resolve(Some(Truncation::TotalDegree(6)))?.expect("default present");
            tr.check_dim(*n)?;
            let pt = sample_generic_point_with(*n, &tr, *seed, &SampleConfig::default())?;
            emit(out, &serde_json::to_value(&pt)?)?;
            Ok(EXIT_OK)
        }
        PointCommand::Inspect { file, trunc } => {
            let pt = read_point(file)?;
            let tr = trunc.resolve(Some(Truncation::TotalDegree(6)))?.expect("default present");
            tr.check_dim(pt.n())?;
            let verdict = pt.check_generic(&tr);
            emit(
                &None,
                &json!({
                    "point": pt,
                    "n": pt.n(),
                    "q": format_fraction(&pt.q()),
                    "t": format_fraction(&pt.t()),
                    "trunc": tr,
                    "generic": verdict.is_ok(),
                    "reason": verdict.as_ref().err().map(|e| e.to_string()),
                }),
            )?;
            Ok(if verdict.is_ok() { EXIT_OK } else { EXIT_NON_GENERIC })
        }
    }
}

/// Parses arguments and runs; clap handles `--help` and usage errors itself
/// (exit code 2).
pub fn run<I, T>(args: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return Ok(code);
        }
    };
    match &cli.command {
        Command::Matrix(a) => cmd_matrix(a),
        Command::Eigen(a) => cmd_eigen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Point(c) => cmd_point(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qcommute").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn verify_flags_build_config() {
        let Command::Verify(a) = parse(&["verify", "--check", "commutator", "--n", "2", "--deg", "8", "--seeds", "3"]).command
        else {
            panic!()
        };
        let cfg = suite_from_args(&a).unwrap();
        assert_eq!(cfg.checks, vec![CheckName::Commutator]);
        assert_eq!(cfg.seeds.len(), 3);
        assert_eq!(cfg.n_values, vec![2]);
        assert_eq!(cfg.trunc[&2], Truncation::TotalDegree(8));
    }

    #[test]
    fn approx_is_opt_in() {
        let Command::Verify(a) = parse(&["verify", "--check", "ramanujan"]).command else { panic!() };
        assert!(suite_from_args(&a).is_err());
        let Command::Verify(a) = parse(&["verify", "--all", "--no-approx"]).command else { panic!() };
        let cfg = suite_from_args(&a).unwrap();
        assert!(!cfg.checks.contains(&CheckName::Ramanujan));
        assert_eq!(cfg.checks.len(), CheckName::ALL.len() - 1);
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::NonGeneric("x".into())), EXIT_NON_GENERIC);
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), EXIT_USAGE);
    }
}
