//! The verification suite. Each check evaluates an identity exactly at a
//! seeded parameter point and produces a [`VerificationReport`].

mod checks;
mod ramanujan;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::qkernel::{format_fraction, sample_generic_point_with, ParamPoint, SampleConfig, Scalar};
use crate::series::Truncation;

pub use checks::{
    check_alpha_independence, check_commutator, check_eigen2, check_lemma1, check_lemma3, check_n3_conjecture,
    check_n4_partial, check_quasi_eigen, check_shift, check_theorem2, lemma1_sides, lemma3_sides, N4Outcome,
};
pub use ramanujan::{check_ramanujan, ramanujan_point, RamanujanConfig, RamanujanOutcome};

/// What kind of statement a check probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Theorem,
    Conjecture,
    Approximate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ConjectureEvidence,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ConjectureEvidence => "EVIDENCE",
        })
    }
}

/// First place where two sides of a checked identity differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub location: String,
    pub lhs: String,
    pub rhs: String,
}

impl Discrepancy {
    pub fn new(location: impl Into<String>, lhs: &Scalar, rhs: &Scalar) -> Self {
        Discrepancy { location: location.into(), lhs: format_fraction(lhs), rhs: format_fraction(rhs) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub claim: Claim,
    pub point: ParamPoint,
    pub trunc: Truncation,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_discrepancy: Option<Discrepancy>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub details: Option<Value>,
    /// Wall time; kept out of the serialized form so reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
    pub seed: u64,
}

impl VerificationReport {
    /// Status from the claim and the first discrepancy, if any.
    pub fn from_outcome(
        check_name: &str,
        claim: Claim,
        point: ParamPoint,
        trunc: Truncation,
        seed: u64,
        first_discrepancy: Option<Discrepancy>,
    ) -> Self {
        let status = match (&first_discrepancy, claim) {
            (Some(_), _) => Status::Fail,
            (None, Claim::Conjecture) => Status::ConjectureEvidence,
            (None, _) => Status::Pass,
        };
        VerificationReport {
            check_name: check_name.to_string(),
            claim,
            point,
            trunc,
            status,
            first_discrepancy,
            details: None,
            elapsed: Duration::ZERO,
            seed,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn is_success(&self) -> bool {
        self.status != Status::Fail
    }

    /// Counts toward the exit status: only failed theorem-level checks do.
    pub fn is_theorem_failure(&self) -> bool {
        self.status == Status::Fail && self.claim == Claim::Theorem
    }
}

/// Named checks runnable from a suite configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Commutator,
    Theorem2,
    Eigen2,
    Lemma1,
    Lemma3,
    N3,
    AlphaIndependence,
    N4,
    Shift,
    Quasi,
    Ramanujan,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::Commutator,
        CheckName::Theorem2,
        CheckName::Eigen2,
        CheckName::Lemma1,
        CheckName::Lemma3,
        CheckName::N3,
        CheckName::AlphaIndependence,
        CheckName::N4,
        CheckName::Shift,
        CheckName::Quasi,
        CheckName::Ramanujan,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Commutator => "commutator",
            CheckName::Theorem2 => "theorem2",
            CheckName::Eigen2 => "eigen2",
            CheckName::Lemma1 => "lemma1",
            CheckName::Lemma3 => "lemma3",
            CheckName::N3 => "n3",
            CheckName::AlphaIndependence => "alpha_independence",
            CheckName::N4 => "n4",
            CheckName::Shift => "shift",
            CheckName::Quasi => "quasi",
            CheckName::Ramanujan => "ramanujan",
        }
    }

    pub fn is_exact(&self) -> bool {
        *self != CheckName::Ramanujan
    }
}

impl std::str::FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .iter()
            .find(|c| c.as_str() == s)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown check '{s}'")))
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

fn default_n_values() -> Vec<usize> {
    vec![2, 3, 4]
}

fn default_pairs() -> usize {
    3
}

fn default_size() -> usize {
    12
}

fn default_order() -> usize {
    12
}

fn default_tol() -> String {
    "1e-25".into()
}

/// Suite configuration; every field has a default so `{}` is a valid file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub checks: Vec<CheckName>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Variable counts for the commutator check.
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    /// Truncation overrides keyed by `n` for the n-generic checks.
    #[serde(default)]
    pub trunc: BTreeMap<usize, Truncation>,
    #[serde(default)]
    pub approx_enabled: bool,
    #[serde(default = "default_tol")]
    pub tol: String,
    /// `(alpha, beta)` pairs per seed in the commutator check.
    #[serde(default = "default_pairs")]
    pub alpha_pairs: usize,
    #[serde(default = "default_size")]
    pub theorem2_size: usize,
    #[serde(default = "default_order")]
    pub lemma_order: usize,
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl SuiteConfig {
    /// Every exact check, plus the approximate one when enabled.
    pub fn all(approx: bool) -> Self {
        SuiteConfig {
            checks: CheckName::ALL.iter().copied().filter(|c| approx || c.is_exact()).collect(),
            approx_enabled: approx,
            ..SuiteConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidInput("at least one seed is required".into()));
        }
        if self.n_values.iter().any(|&n| n < 2) {
            return Err(Error::InvalidInput("n values must be at least 2".into()));
        }
        for (n, t) in &self.trunc {
            t.check_dim(*n)?;
            let zero_bound = match t {
                Truncation::TotalDegree(d) => *d == 0,
                Truncation::Box(b) => b.contains(&0),
            };
            if zero_bound {
                return Err(Error::InvalidInput(format!("truncation bounds for n = {n} must be positive")));
            }
        }
        if self.theorem2_size == 0 || self.lemma_order == 0 || self.alpha_pairs == 0 {
            return Err(Error::InvalidInput("sizes and counts must be positive".into()));
        }
        if self.checks.contains(&CheckName::Ramanujan) {
            crate::qkernel::parse_decimal(&self.tol)?;
        }
        Ok(())
    }

    /// Truncation for an n-generic check: the override if present, else the default.
    pub fn trunc_for(&self, n: usize, default: Truncation) -> Truncation {
        self.trunc.get(&n).cloned().unwrap_or(default)
    }
}

/// Default commutator truncation: `D = 8` for two variables, `D = 5` for
/// three, the unit box beyond.
pub fn default_commutator_trunc(n: usize) -> Truncation {
    match n {
        2 => Truncation::TotalDegree(8),
        3 => Truncation::TotalDegree(5),
        _ => Truncation::Box(vec![1; n - 1]),
    }
}

/// Samples a generic point for `seed`, stepping to derived seeds while the
/// work closure reports a non-generic failure.
pub(crate) fn with_generic_point<T>(
    n: usize,
    trunc: &Truncation,
    seed: u64,
    mut work: impl FnMut(&ParamPoint) -> Result<T>,
) -> Result<T> {
    const ATTEMPTS: u64 = 5;
    let cfg = SampleConfig::default();
    let mut last = None;
    for attempt in 0..ATTEMPTS {
        let pt = sample_generic_point_with(n, trunc, seed ^ (attempt << 40), &cfg)?;
        match work(&pt) {
            Err(e) if e.is_non_generic() => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or(Error::ExhaustedRetries(ATTEMPTS as usize)))
}

fn timed(f: impl FnOnce() -> Result<VerificationReport>) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let mut r = f()?;
    r.elapsed = start.elapsed();
    Ok(r)
}

/// Reports for one check at one seed.
pub fn run_check(cfg: &SuiteConfig, check: CheckName, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    match check {
        CheckName::Commutator => {
            for &n in &cfg.n_values {
                let tr = cfg.trunc_for(n, default_commutator_trunc(n));
                out.push(timed(|| check_commutator(n, &tr, seed, cfg.alpha_pairs))?);
            }
        }
        CheckName::Theorem2 => out.push(timed(|| check_theorem2(cfg.theorem2_size, seed))?),
        CheckName::Eigen2 => {
            let tr = cfg.trunc_for(2, Truncation::TotalDegree(8));
            out.push(timed(|| check_eigen2(&tr, 6, seed))?)
        }
        CheckName::Lemma1 => out.push(timed(|| check_lemma1(cfg.lemma_order, seed))?),
        CheckName::Lemma3 => out.push(timed(|| check_lemma3(cfg.lemma_order, seed))?),
        CheckName::N3 => {
            let tr = cfg.trunc_for(3, Truncation::TotalDegree(6));
            out.push(timed(|| check_n3_conjecture(&tr, seed))?)
        }
        CheckName::AlphaIndependence => {
            let tr = cfg.trunc_for(3, Truncation::TotalDegree(5));
            out.push(timed(|| check_alpha_independence(&tr, seed))?)
        }
        CheckName::N4 => out.push(timed(|| check_n4_partial(seed).map(|o| o.report))?),
        CheckName::Shift => {
            for n in [2usize, 3] {
                let tr = cfg.trunc_for(n, Truncation::TotalDegree(5));
                out.push(timed(|| check_shift(n, &tr, seed))?);
            }
        }
        CheckName::Quasi => {
            for n in [2usize, 3] {
                out.push(timed(|| {
                    check_quasi_eigen(n, &Truncation::TotalDegree(5), &Truncation::TotalDegree(4), seed)
                })?);
            }
        }
        CheckName::Ramanujan => {
            if cfg.approx_enabled {
                let rc = RamanujanConfig { tol: cfg.tol.clone(), ..RamanujanConfig::default() };
                out.push(timed(|| check_ramanujan(&rc, seed).map(|o| o.report))?);
            }
        }
    }
    Ok(out)
}

/// Runs every configured check at every seed. Checks run concurrently;
/// the returned order is `(check order, seed order)` regardless.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let jobs: Vec<(CheckName, u64)> =
        cfg.checks.iter().flat_map(|&c| cfg.seeds.iter().map(move |&s| (c, s))).collect();
    let nested: Vec<Vec<VerificationReport>> =
        jobs.par_iter().map(|&(c, s)| run_check(cfg, c, s)).collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Exit-status rule: nonzero iff a theorem-level check failed.
pub fn suite_exit_failed(reports: &[VerificationReport]) -> bool {
    reports.iter().any(VerificationReport::is_theorem_failure)
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(mut w: W, reports: &[VerificationReport]) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl(reports: &[VerificationReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, reports)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Human-readable table.
pub fn summary_table(reports: &[VerificationReport]) -> String {
    let mut s = format!("{:<20} {:>6} {:<16} {:<9} {:>9}  {}\n", "check", "seed", "trunc", "status", "ms", "note");
    for r in reports {
        let note = r
            .first_discrepancy
            .as_ref()
            .map(|d| format!("{}: {} != {}", d.location, d.lhs, d.rhs))
            .unwrap_or_default();
        s.push_str(&format!(
            "{:<20} {:>6} {:<16} {:<9} {:>9}  {}\n",
            r.check_name,
            r.seed,
            r.trunc.to_string(),
            r.status.to_string(),
            r.elapsed.as_millis(),
            note
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_no_reports() {
        let cfg = SuiteConfig::default();
        assert!(run_suite(&cfg).unwrap().is_empty());
    }

    #[test]
    fn config_parsing() {
        let cfg: SuiteConfig = serde_json::from_str(r#"{"checks":["commutator","n3"],"seeds":[7]}"#).unwrap();
        assert_eq!(cfg.checks, vec![CheckName::Commutator, CheckName::N3]);
        assert_eq!(cfg.alpha_pairs, 3);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"checks":["nope"]}"#).is_err());
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"bogus":1}"#).is_err());
        let bad = SuiteConfig { seeds: vec![], ..SuiteConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn status_follows_claim() {
        let pt = crate::qkernel::sample_generic_point(2, 2, 1).unwrap();
        let tr = Truncation::TotalDegree(2);
        let r = VerificationReport::from_outcome("x", Claim::Conjecture, pt.clone(), tr.clone(), 1, None);
        assert_eq!(r.status, Status::ConjectureEvidence);
        let d = Discrepancy::new("here", &Scalar::from_integer(1.into()), &Scalar::from_integer(2.into()));
        let r = VerificationReport::from_outcome("x", Claim::Conjecture, pt, tr, 1, Some(d));
        assert_eq!(r.status, Status::Fail);
        assert!(!r.is_theorem_failure());
    }

    #[test]
    fn check_names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
            assert_eq!(serde_json::to_value(c).unwrap(), c.as_str());
        }
    }
}
