//! Randomized self-check suites over every identity the crate computes.
//!
//! Each suite draws seeded ensembles, measures the residual of one family of
//! claims, and reports the worst case against a named tolerance. Identical
//! configurations produce identical reports — timing is the only
//! non-deterministic field, and it can be disabled.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channels::{kraus_from_dilation, random_channel, stinespring_dilate};
use crate::error::{Error, Result};
use crate::fidelity::{
    classical_fidelity, fidelity, pure_overlap, random_purification_sweep, seeded_pair,
    test_pass_probability, uhlmann_optimal_purifications, uhlmann_variational,
    VARIATIONAL_MAX_ITERS, VARIATIONAL_RESTARTS,
};
use crate::eig::psd_sqrt;
use crate::rng::{derive_seed, Rng};
use crate::states::{random_density, random_pure, DensityMatrix};
use crate::svd::trace_norm;
use crate::tol::{self, SuiteTolerances};
use crate::witness::{
    construct_witness, monotonicity_check, overlap_upper_bound_check, verify_witness,
};
use crate::channels::choi_distance;

/// The families of checks the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    /// Closed-form fidelity identities (cross form, symmetry, classical and
    /// pure reductions, pass probability).
    Fidelity,
    /// Purification-overlap characterization: optimal pair, random sweep,
    /// variational ascent.
    Uhlmann,
    /// Dilation round trips and unitarity.
    Dilation,
    /// Witness construction and verification.
    Witness,
    /// Pure-input overlap bound under channels.
    Bound,
    /// Fidelity under post-processing.
    Monotonicity,
}

impl SuiteKind {
    /// Stable lowercase name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Fidelity => "fidelity",
            SuiteKind::Uhlmann => "uhlmann",
            SuiteKind::Dilation => "dilation",
            SuiteKind::Witness => "witness",
            SuiteKind::Bound => "bound",
            SuiteKind::Monotonicity => "monotonicity",
        }
    }

    /// Every suite, in execution order.
    pub fn all() -> [SuiteKind; 6] {
        [
            SuiteKind::Fidelity,
            SuiteKind::Uhlmann,
            SuiteKind::Dilation,
            SuiteKind::Witness,
            SuiteKind::Bound,
            SuiteKind::Monotonicity,
        ]
    }

    fn tag(self) -> u64 {
        match self {
            SuiteKind::Fidelity => 0x01,
            SuiteKind::Uhlmann => 0x02,
            SuiteKind::Dilation => 0x03,
            SuiteKind::Witness => 0x04,
            SuiteKind::Bound => 0x05,
            SuiteKind::Monotonicity => 0x06,
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::dims(format!("unknown suite `{s}`")))
    }
}

/// Everything the suite runner needs: seeding, sample counts, dimensions,
/// tolerances, and which suites to run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Master seed; every drawn sample derives from it.
    pub seed: u64,
    /// Samples per suite and dimension.
    pub trials: usize,
    /// State dimensions to exercise.
    pub dims: Vec<usize>,
    /// Named thresholds, one per check.
    pub tolerances: SuiteTolerances,
    /// Suites to run, in order; empty means all.
    pub suites: Vec<SuiteKind>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 25,
            dims: vec![2, 3, 4],
            tolerances: SuiteTolerances::default(),
            suites: SuiteKind::all().to_vec(),
        }
    }
}

impl SuiteConfig {
    /// Reject configurations the runner cannot honor.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::dims("trials must be at least 1"));
        }
        if self.dims.is_empty() {
            return Err(Error::dims("at least one dimension is required"));
        }
        if let Some(&bad) = self.dims.iter().find(|&&d| !(2..=16).contains(&d)) {
            return Err(Error::dims(format!("dimension {bad} outside supported range 2..=16")));
        }
        Ok(())
    }

    fn effective_suites(&self) -> Vec<SuiteKind> {
        if self.suites.is_empty() {
            SuiteKind::all().to_vec()
        } else {
            self.suites.clone()
        }
    }
}

/// Worst-case result of one named check across all samples of a suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    /// Check name; matches the tolerance field it is judged against.
    pub name: String,
    /// Threshold the worst residual must not exceed.
    pub tolerance: f64,
    /// Largest residual observed (floor checks store the negated slack, so
    /// larger is always worse).
    pub worst: f64,
    /// Number of samples beyond tolerance.
    pub failures: usize,
    /// Derived seeds of the first few failing samples.
    pub failing_seeds: Vec<u64>,
}

impl CheckOutcome {
    /// No sample exceeded the tolerance.
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// All checks of one suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOutcome {
    /// Suite name.
    pub suite: String,
    /// Samples per dimension.
    pub trials: usize,
    /// Per-check worst cases.
    pub checks: Vec<CheckOutcome>,
    /// Every check passed.
    pub pass: bool,
    /// Wall time, when timing is enabled.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

/// Full run: configuration echo, per-suite outcomes, overall verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    /// Master seed the run derived everything from.
    pub seed: u64,
    /// Samples per suite and dimension.
    pub trials: usize,
    /// Dimensions exercised.
    pub dims: Vec<usize>,
    /// Outcomes in execution order.
    pub suites: Vec<SuiteOutcome>,
    /// Every suite passed.
    pub overall_pass: bool,
    /// Wall time, when timing is enabled.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total_ms: Option<f64>,
}

const MAX_FAILING_SEEDS: usize = 8;

struct CheckAccumulator {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    failures: usize,
    failing_seeds: Vec<u64>,
}

impl CheckAccumulator {
    fn new(name: &'static str, tolerance: f64) -> Self {
        CheckAccumulator {
            name,
            tolerance,
            worst: f64::NEG_INFINITY,
            failures: 0,
            failing_seeds: Vec::new(),
        }
    }

    fn record(&mut self, residual: f64, seed: u64) {
        self.worst = self.worst.max(residual);
        if !(residual <= self.tolerance) {
            self.failures += 1;
            if self.failing_seeds.len() < MAX_FAILING_SEEDS {
                self.failing_seeds.push(seed);
            }
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name.to_string(),
            tolerance: self.tolerance,
            worst: self.worst,
            failures: self.failures,
            failing_seeds: self.failing_seeds,
        }
    }
}

fn finish_suite(
    kind: SuiteKind,
    trials: usize,
    accumulators: Vec<CheckAccumulator>,
    started: Option<Instant>,
) -> SuiteOutcome {
    let checks: Vec<CheckOutcome> = accumulators.into_iter().map(CheckAccumulator::finish).collect();
    let pass = checks.iter().all(CheckOutcome::pass);
    SuiteOutcome {
        suite: kind.name().to_string(),
        trials,
        checks,
        pass,
        elapsed_ms: started.map(|t| t.elapsed().as_secs_f64() * 1e3),
    }
}

fn random_distribution(dim: usize, rng: &mut Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| rng.next_f64()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn run_fidelity_suite(cfg: &SuiteConfig, timing: bool) -> Result<SuiteOutcome> {
    let started = timing.then(Instant::now);
    let t = &cfg.tolerances;
    let mut cross = CheckAccumulator::new("cross_form", t.cross_form);
    let mut classical = CheckAccumulator::new("classical_match", t.classical_match);
    let mut symmetry = CheckAccumulator::new("symmetry", t.symmetry);
    let mut self_f = CheckAccumulator::new("self_fidelity", t.self_fidelity);
    let mut pure_red = CheckAccumulator::new("pure_reduction", t.pure_reduction);
    let mut pass_prob = CheckAccumulator::new("pass_probability", t.pass_probability);

    let suite_seed = derive_seed(cfg.seed, SuiteKind::Fidelity.tag());
    for &dim in &cfg.dims {
        let dim_seed = derive_seed(suite_seed, dim as u64);
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(dim_seed, trial as u64);
            let (rho, sigma) = seeded_pair(dim, trial as u64, dim_seed)?;
            let f = fidelity(&rho, &sigma)?;

            let product = psd_sqrt(sigma.matrix(), tol::SPECTRAL_FLOOR)?
                .mul(&psd_sqrt(rho.matrix(), tol::SPECTRAL_FLOOR)?);
            cross.record((f - trace_norm(&product)?).abs(), trial_seed);
            symmetry.record((f - fidelity(&sigma, &rho)?).abs(), trial_seed);
            self_f.record(1.0 - fidelity(&rho, &rho)?, trial_seed);

            let mut rng = Rng::new(derive_seed(trial_seed, 1));
            let p = random_distribution(dim, &mut rng);
            let q = random_distribution(dim, &mut rng);
            let diag_f = fidelity(
                &DensityMatrix::from_distribution(&p)?,
                &DensityMatrix::from_distribution(&q)?,
            )?;
            classical.record((diag_f - classical_fidelity(&p, &q)?).abs(), trial_seed);

            let psi = random_pure(dim, derive_seed(trial_seed, 2));
            let phi = random_pure(dim, derive_seed(trial_seed, 3));
            let overlap = pure_overlap(&psi, &phi)?;
            let projector_f = fidelity(
                &DensityMatrix::from_pure(&psi),
                &DensityMatrix::from_pure(&phi),
            )?;
            pure_red.record((projector_f - overlap).abs(), trial_seed);
            pass_prob.record(
                (test_pass_probability(&psi, &phi)? - overlap * overlap).abs(),
                trial_seed,
            );
        }
    }
    Ok(finish_suite(
        SuiteKind::Fidelity,
        cfg.trials,
        vec![cross, classical, symmetry, self_f, pure_red, pass_prob],
        started,
    ))
}

fn run_uhlmann_suite(cfg: &SuiteConfig, timing: bool) -> Result<SuiteOutcome> {
    let started = timing.then(Instant::now);
    let t = &cfg.tolerances;
    let mut overlap = CheckAccumulator::new("uhlmann_overlap", t.uhlmann_overlap);
    let mut sweep = CheckAccumulator::new("sweep_margin", t.sweep_margin);
    let mut variational = CheckAccumulator::new("variational", t.variational);

    const SWEEP_SAMPLES: usize = 10;
    let variational_stride = (cfg.trials / 5).max(1);

    let suite_seed = derive_seed(cfg.seed, SuiteKind::Uhlmann.tag());
    for &dim in &cfg.dims {
        let dim_seed = derive_seed(suite_seed, dim as u64);
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(dim_seed, trial as u64);
            let (rho, sigma) = seeded_pair(dim, trial as u64, dim_seed)?;
            let f = fidelity(&rho, &sigma)?;

            let pair = uhlmann_optimal_purifications(&rho, &sigma, dim)?;
            overlap.record((pair.fidelity - f).abs(), trial_seed);

            let best = random_purification_sweep(
                &rho,
                &sigma,
                dim,
                SWEEP_SAMPLES,
                derive_seed(trial_seed, 4),
            )?;
            sweep.record(best - f, trial_seed);

            if trial % variational_stride == 0 {
                let trace = uhlmann_variational(
                    &rho,
                    &sigma,
                    dim,
                    VARIATIONAL_RESTARTS,
                    VARIATIONAL_MAX_ITERS,
                    tol::VARIATIONAL_STEP,
                    derive_seed(trial_seed, 5),
                )?;
                variational.record((trace.final_overlap - f).abs(), trial_seed);
            }
        }
    }
    Ok(finish_suite(
        SuiteKind::Uhlmann,
        cfg.trials,
        vec![overlap, sweep, variational],
        started,
    ))
}

fn run_dilation_suite(cfg: &SuiteConfig, timing: bool) -> Result<SuiteOutcome> {
    let started = timing.then(Instant::now);
    let t = &cfg.tolerances;
    let mut choi = CheckAccumulator::new("dilation_choi", t.dilation_choi);
    let mut unitarity = CheckAccumulator::new("dilation_unitarity", t.dilation_unitarity);

    let suite_seed = derive_seed(cfg.seed, SuiteKind::Dilation.tag());
    for &dim in &cfg.dims {
        let dim_seed = derive_seed(suite_seed, dim as u64);
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(dim_seed, trial as u64);
            let rank = 1 + trial % (dim * dim);
            let channel = random_channel(dim, rank, trial_seed)?;
            let dilation = stinespring_dilate(&channel)?;
            unitarity.record(dilation.unitary.unitarity_deviation(), trial_seed);
            let extracted = kraus_from_dilation(&dilation);
            choi.record(choi_distance(&channel, &extracted)?, trial_seed);
        }
    }
    Ok(finish_suite(SuiteKind::Dilation, cfg.trials, vec![choi, unitarity], started))
}

/// Degenerate pairs every witness run must survive: identical states and
/// states with disjoint supports.
fn witness_pair(dim: usize, trial: usize, dim_seed: u64) -> Result<(DensityMatrix, DensityMatrix)> {
    match trial {
        0 => {
            let rho = random_density(dim, 1 + dim / 2, derive_seed(dim_seed, 0xEE))?;
            Ok((rho.clone(), rho))
        }
        1 => {
            let mut p = vec![0.0; dim];
            p[0] = 1.0;
            let mut q = vec![0.0; dim];
            for x in q.iter_mut().skip(1) {
                *x = 1.0 / (dim - 1) as f64;
            }
            Ok((DensityMatrix::from_distribution(&p)?, DensityMatrix::from_distribution(&q)?))
        }
        _ => seeded_pair(dim, trial as u64, dim_seed),
    }
}

fn run_witness_suite(cfg: &SuiteConfig, timing: bool) -> Result<SuiteOutcome> {
    let started = timing.then(Instant::now);
    let t = &cfg.tolerances;
    let mut residual = CheckAccumulator::new("witness_residual", t.witness_residual);

    let suite_seed = derive_seed(cfg.seed, SuiteKind::Witness.tag());
    for &dim in &cfg.dims {
        let dim_seed = derive_seed(suite_seed, dim as u64);
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(dim_seed, trial as u64);
            let (rho, sigma) = witness_pair(dim, trial, dim_seed)?;
            let witness = construct_witness(&rho, &sigma)?;
            let report = verify_witness(&witness, &rho, &sigma, t.witness_residual)?;
            let worst = report
                .rho_residual
                .max(report.sigma_residual)
                .max(report.overlap_residual);
            residual.record(worst, trial_seed);
        }
    }
    Ok(finish_suite(SuiteKind::Witness, cfg.trials, vec![residual], started))
}

fn run_bound_suite(cfg: &SuiteConfig, timing: bool) -> Result<SuiteOutcome> {
    let started = timing.then(Instant::now);
    let t = &cfg.tolerances;
    let mut floor = CheckAccumulator::new("bound_floor", t.bound_floor);

    let suite_seed = derive_seed(cfg.seed, SuiteKind::Bound.tag());
    for &dim in &cfg.dims {
        let dim_seed = derive_seed(suite_seed, dim as u64);
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(dim_seed, trial as u64);
            let rank = 1 + trial % (dim * dim);
            let channel = random_channel(dim, rank, derive_seed(trial_seed, 0))?;
            let psi = random_pure(dim, derive_seed(trial_seed, 1));
            let phi = random_pure(dim, derive_seed(trial_seed, 2));
            let slack = overlap_upper_bound_check(&channel, &psi, &phi)?;
            // negated: a positive record means the bound was violated
            floor.record(-slack, trial_seed);
        }
    }
    Ok(finish_suite(SuiteKind::Bound, cfg.trials, vec![floor], started))
}

fn run_monotonicity_suite(cfg: &SuiteConfig, timing: bool) -> Result<SuiteOutcome> {
    let started = timing.then(Instant::now);
    let t = &cfg.tolerances;
    let mut floor = CheckAccumulator::new("monotonicity_floor", t.monotonicity_floor);

    let suite_seed = derive_seed(cfg.seed, SuiteKind::Monotonicity.tag());
    for &dim in &cfg.dims {
        let dim_seed = derive_seed(suite_seed, dim as u64);
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(dim_seed, trial as u64);
            let (rho, sigma) = seeded_pair(dim, trial as u64, dim_seed)?;
            let rank = 1 + trial % (dim * dim);
            let channel = random_channel(dim, rank, derive_seed(trial_seed, 6))?;
            let slack = monotonicity_check(&channel, &rho, &sigma)?;
            floor.record(-slack, trial_seed);
        }
    }
    Ok(finish_suite(SuiteKind::Monotonicity, cfg.trials, vec![floor], started))
}

/// Run the configured suites and collect a report.
///
/// `with_timing` controls whether wall-clock fields are filled in; leaving
/// it off makes the report a pure function of the configuration.
pub fn run_suites(cfg: &SuiteConfig, with_timing: bool) -> Result<Report> {
    cfg.validate()?;
    let started = with_timing.then(Instant::now);
    let mut suites = Vec::new();
    for kind in cfg.effective_suites() {
        let outcome = match kind {
            SuiteKind::Fidelity => run_fidelity_suite(cfg, with_timing)?,
            SuiteKind::Uhlmann => run_uhlmann_suite(cfg, with_timing)?,
            SuiteKind::Dilation => run_dilation_suite(cfg, with_timing)?,
            SuiteKind::Witness => run_witness_suite(cfg, with_timing)?,
            SuiteKind::Bound => run_bound_suite(cfg, with_timing)?,
            SuiteKind::Monotonicity => run_monotonicity_suite(cfg, with_timing)?,
        };
        suites.push(outcome);
    }
    let overall_pass = suites.iter().all(|s| s.pass);
    Ok(Report {
        seed: cfg.seed,
        trials: cfg.trials,
        dims: cfg.dims.clone(),
        suites,
        overall_pass,
        total_ms: started.map(|t| t.elapsed().as_secs_f64() * 1e3),
    })
}
