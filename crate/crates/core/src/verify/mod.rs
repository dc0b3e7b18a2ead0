//! Seeded verification harness: one checker per inequality, run over random
//! matrix ensembles, aggregated into CSV rows and per-check reports.

mod checks;

pub use checks::*;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dets::DetError;
use crate::matmodel::{ginibre, hermitian_gaussian, MatError, MatrixOperator};
use crate::stepfn::StepError;
use crate::traces::TraceError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error("report output: {0}")]
    Output(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    MainProduct,
    PointwiseProduct,
    Majorization,
    SumPos,
    TpmVanishing,
    SumComposite,
    Commutator,
    StandardInequalities,
    LogClosure,
    DetMultiplicativity,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::MainProduct,
        CheckKind::PointwiseProduct,
        CheckKind::Majorization,
        CheckKind::SumPos,
        CheckKind::TpmVanishing,
        CheckKind::SumComposite,
        CheckKind::Commutator,
        CheckKind::StandardInequalities,
        CheckKind::LogClosure,
        CheckKind::DetMultiplicativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::MainProduct => "main-product",
            CheckKind::PointwiseProduct => "pointwise-product",
            CheckKind::Majorization => "majorization",
            CheckKind::SumPos => "sum-pos",
            CheckKind::TpmVanishing => "tpm-vanishing",
            CheckKind::SumComposite => "sum-composite",
            CheckKind::Commutator => "commutator",
            CheckKind::StandardInequalities => "standard-inequalities",
            CheckKind::LogClosure => "log-closure",
            CheckKind::DetMultiplicativity => "det-multiplicativity",
        }
    }

    /// Comma-separated list of every suite name.
    pub fn menu() -> String {
        CheckKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
    }

    /// Parses `all` or a comma-separated list of names; duplicates are dropped.
    pub fn parse_list(s: &str) -> Result<Vec<CheckKind>, VerifyError> {
        if s.trim() == "all" {
            return Ok(CheckKind::ALL.to_vec());
        }
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            let k: CheckKind = part.parse()?;
            if !out.contains(&k) {
                out.push(k);
            }
        }
        Ok(out)
    }

    fn run(self, rng: &mut ChaCha8Rng, n: usize, scale: f64, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
        let herm = |rng: &mut ChaCha8Rng| hermitian_gaussian(n, scale, rng);
        let psd = |rng: &mut ChaCha8Rng| ginibre(n, scale, rng).and_then(|g| g.gram());
        let gin = |rng: &mut ChaCha8Rng| ginibre(n, scale, rng);
        match self {
            CheckKind::MainProduct => {
                let (t, s) = (herm(rng)?, herm(rng)?);
                check_main_product_lemma(&t, &s, tol)
            }
            CheckKind::PointwiseProduct => {
                let (t, s) = (herm(rng)?, herm(rng)?);
                check_pointwise_product_bounds(&t, &s, tol)
            }
            CheckKind::Majorization => {
                let (t, s) = (psd(rng)?, psd(rng)?);
                check_majorization(&t, &s, tol)
            }
            CheckKind::SumPos => {
                let (t, s) = (psd(rng)?, psd(rng)?);
                check_sum_pos_bound(&t, &s, tol)
            }
            CheckKind::TpmVanishing => check_tpm_vanishing(&herm(rng)?, tol),
            CheckKind::SumComposite => {
                let (t, s) = (herm(rng)?, herm(rng)?);
                check_sum_lemma_composite(&t, &s, tol)
            }
            CheckKind::Commutator => check_commutator_criterion(&herm(rng)?, tol),
            CheckKind::StandardInequalities => {
                let (a, b) = (gin(rng)?, gin(rng)?);
                check_standard_inequalities(&a, &b, tol)
            }
            CheckKind::LogClosure => {
                let (a, b) = (gin(rng)?, gin(rng)?);
                check_log_closure(&a, &b, tol)
            }
            CheckKind::DetMultiplicativity => {
                let (a, b) = (gin(rng)?, gin(rng)?);
                check_det_multiplicativity(&a, &b)
            }
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| VerifyError::Config(format!("unknown suite `{s}`; available: all, {}", CheckKind::menu())))
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial; depends only on its arguments.
pub fn trial_seed(master: u64, check: &str, trial: usize) -> u64 {
    let name_hash = check.bytes().fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME));
    splitmix64(splitmix64(master ^ name_hash) ^ trial as u64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub checks: Vec<CheckKind>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Replaces every tolerance of [`Tolerance::default`] when set.
    pub tol: Option<f64>,
    /// Ensemble scale.
    pub scale: f64,
    pub execution: Execution,
    /// Thread cap for the parallel path.
    pub threads: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            checks: CheckKind::ALL.to_vec(),
            n: 64,
            trials: 100,
            seed: 42,
            tol: None,
            scale: 1.0,
            execution: Execution::Parallel,
            threads: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if !(2..=512).contains(&self.n) {
            return Err(VerifyError::Config(format!("n must lie in [2, 512], got {}", self.n)));
        }
        if self.checks.is_empty() {
            return Err(VerifyError::Config("no suite selected".into()));
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(VerifyError::Config(format!("tolerance must be finite and ≥ 0, got {t}")));
            }
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(VerifyError::Config(format!("scale must be positive, got {}", self.scale)));
        }
        if self.threads == Some(0) {
            return Err(VerifyError::Config("thread cap must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol.map(Tolerance::uniform).unwrap_or_default()
    }
}

/// One sampled inequality; a CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    /// `<suite>:<part>`
    pub check_name: String,
    pub seed: u64,
    pub trial: usize,
    pub n: usize,
    pub t_or_r: String,
    pub quantity: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub seed: u64,
    pub trials: usize,
    pub n: usize,
    /// Smallest `bound - quantity` seen; `None` when nothing was sampled.
    pub worst_margin: Option<f64>,
    pub violations: usize,
    pub pass: bool,
    pub runtime_ms: u64,
    /// Trials that could not be evaluated, as `trial <i>: <reason>`.
    #[serde(default)]
    pub errors: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteStatus {
    Pass,
    Fail,
    NoData,
}

impl SuiteStatus {
    pub fn success(self) -> bool {
        self != SuiteStatus::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub status: SuiteStatus,
    pub reports: Vec<CheckReport>,
    #[serde(skip)]
    pub rows: Vec<CheckRow>,
}

struct TrialResult {
    rows: Vec<CheckRow>,
    error: Option<String>,
    elapsed_ms: u64,
}

fn run_trial(kind: CheckKind, trial: usize, cfg: &SuiteConfig, tol: &Tolerance) -> TrialResult {
    let start = Instant::now();
    let seed = trial_seed(cfg.seed, kind.name(), trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut error = None;
    match kind.run(&mut rng, cfg.n, cfg.scale, tol) {
        Ok(outcome) => {
            for s in outcome.samples {
                if !(s.quantity.is_finite() && s.bound.is_finite()) {
                    error.get_or_insert_with(|| {
                        format!("trial {trial}: non-finite sample {}={} at {}", s.part, s.quantity, s.point)
                    });
                }
                rows.push(CheckRow {
                    check_name: format!("{}:{}", kind.name(), s.part),
                    seed,
                    trial,
                    n: cfg.n,
                    t_or_r: s.point.clone(),
                    quantity: s.quantity,
                    bound: s.bound,
                    margin: s.margin(),
                    pass: s.pass(),
                });
            }
        }
        Err(e) => error = Some(format!("trial {trial}: {e}")),
    }
    TrialResult { rows, error, elapsed_ms: start.elapsed().as_millis() as u64 }
}

fn run_tasks(tasks: &[(CheckKind, usize)], cfg: &SuiteConfig, tol: &Tolerance) -> Result<Vec<TrialResult>, VerifyError> {
    let sequential = || tasks.iter().map(|&(k, i)| run_trial(k, i, cfg, tol)).collect();
    match cfg.execution {
        Execution::Sequential => Ok(sequential()),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let par = || tasks.par_iter().map(|&(k, i)| run_trial(k, i, cfg, tol)).collect();
            match cfg.threads {
                Some(threads) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .map_err(|e| VerifyError::Config(format!("thread pool: {e}")))?;
                    Ok(pool.install(par))
                }
                None => Ok(par()),
            }
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => Ok(sequential()),
    }
}

/// Runs every selected check over `trials` seeded draws. Results are merged
/// in (check, trial) order, so the rows do not depend on scheduling.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutcome, VerifyError> {
    cfg.validate()?;
    let tol = cfg.tolerance();
    let tasks: Vec<(CheckKind, usize)> =
        cfg.checks.iter().flat_map(|&k| (0..cfg.trials).map(move |i| (k, i))).collect();
    let results = run_tasks(&tasks, cfg, &tol)?;

    let mut reports = Vec::with_capacity(cfg.checks.len());
    let mut rows = Vec::new();
    let mut results = results.into_iter();
    for &kind in &cfg.checks {
        let mut report = CheckReport {
            check_name: kind.name().to_string(),
            seed: cfg.seed,
            trials: cfg.trials,
            n: cfg.n,
            worst_margin: None,
            violations: 0,
            pass: true,
            runtime_ms: 0,
            errors: Vec::new(),
        };
        for r in results.by_ref().take(cfg.trials) {
            report.runtime_ms += r.elapsed_ms;
            report.errors.extend(r.error);
            for row in &r.rows {
                report.worst_margin = Some(report.worst_margin.map_or(row.margin, |w: f64| w.min(row.margin)));
                report.violations += usize::from(!row.pass);
            }
            rows.extend(r.rows);
        }
        report.pass = report.violations == 0 && report.errors.is_empty();
        reports.push(report);
    }
    let status = if cfg.trials == 0 {
        SuiteStatus::NoData
    } else if reports.iter().all(|r| r.pass) {
        SuiteStatus::Pass
    } else {
        SuiteStatus::Fail
    };
    Ok(SuiteOutcome { status, reports, rows })
}

/// Writes the rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[CheckRow], out: W) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| VerifyError::Output(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["check_name", "seed", "trial", "n", "t_or_r", "quantity", "bound", "margin", "pass"])
            .map_err(|e| VerifyError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| VerifyError::Output(e.to_string()))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CheckRow>, VerifyError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| VerifyError::Output(e.to_string()))
}

/// JSON aggregate: the status and one report per check.
pub fn to_json(outcome: &SuiteOutcome) -> Result<String, VerifyError> {
    serde_json::to_string_pretty(outcome).map_err(|e| VerifyError::Output(e.to_string()))
}

/// Convenience for callers holding matrices: a single check on given inputs.
pub fn check_pair(kind: CheckKind, a: &MatrixOperator, b: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    match kind {
        CheckKind::MainProduct => check_main_product_lemma(a, b, tol),
        CheckKind::PointwiseProduct => check_pointwise_product_bounds(a, b, tol),
        CheckKind::Majorization => check_majorization(a, b, tol),
        CheckKind::SumPos => check_sum_pos_bound(a, b, tol),
        CheckKind::TpmVanishing => check_tpm_vanishing(a, tol),
        CheckKind::SumComposite => check_sum_lemma_composite(a, b, tol),
        CheckKind::Commutator => check_commutator_criterion(a, tol),
        CheckKind::StandardInequalities => check_standard_inequalities(a, b, tol),
        CheckKind::LogClosure => check_log_closure(a, b, tol),
        CheckKind::DetMultiplicativity => check_det_multiplicativity(a, b),
    }
}
