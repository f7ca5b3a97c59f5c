//! Argument parsing, dispatch, and rendering for the `uhlmann` binary.
//!
//! Every command loads its inputs from the JSON file format in [`crate::io`],
//! computes through `uhlmann-core`, and reports either human-readable text or
//! deterministic JSON (`--json`). Exit codes are part of the contract:
//! `0` success / check passed, `1` a well-posed check failed, `2` bad usage,
//! unreadable or invalid input files, or an unsupported computation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use uhlmann_core::{
    choi_distance, construct_witness, fidelity, kraus_from_dilation, monotonicity_via_witness,
    pure_overlap, random_channel, random_density, reduce, run_suites, standard_purification,
    stinespring_dilate, verify_witness, Report, SuiteConfig, SuiteKind, SuiteTolerances,
};

use crate::io::{
    self, channel_payload, density_payload, load_channel, load_density, load_pure, pure_payload,
    save_payload, unitary_payload, CliError, FilePayload,
};

#[derive(Debug, Parser)]
#[command(
    name = "uhlmann",
    version,
    about = "Fidelity, purification overlaps, channel dilations, and operational witnesses",
    propagate_version = true
)]
struct Cli {
    /// Emit deterministic JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Master seed for every randomized draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Residual tolerance for pass/fail checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Leave wall-clock timing out of reports, making them byte-deterministic.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fidelity of two density-matrix files.
    Fidelity {
        /// First state file.
        rho: PathBuf,
        /// Second state file.
        sigma: PathBuf,
    },
    /// Canonical purification of a density matrix.
    Purify {
        /// State file.
        state: PathBuf,
        /// Environment dimension (defaults to the state dimension).
        #[arg(long)]
        env_dim: Option<usize>,
        /// Write the purification as a pure-state file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct and verify the operational witness of a state pair.
    Witness {
        /// First state file.
        rho: PathBuf,
        /// Second state file.
        sigma: PathBuf,
    },
    /// Unitary dilation of a channel.
    Dilate {
        /// Channel file.
        channel: PathBuf,
        /// Write the dilation unitary as a single-Kraus channel file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a channel cannot push two pure states below their overlap.
    CheckBound {
        /// Channel file.
        channel: PathBuf,
        /// First pure-state file.
        psi: PathBuf,
        /// Second pure-state file.
        phi: PathBuf,
    },
    /// Check that post-processing does not lower fidelity.
    CheckMonotonicity {
        /// Channel file.
        channel: PathBuf,
        /// First state file.
        rho: PathBuf,
        /// Second state file.
        sigma: PathBuf,
        /// Also prove the bound by composing through a witness.
        #[arg(long)]
        via_witness: bool,
    },
    /// Run the randomized self-check suites.
    Suite {
        /// Samples per suite and dimension.
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// State dimensions to exercise.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        dims: Vec<usize>,
        /// Subset of suites to run (default: all).
        #[arg(long, value_delimiter = ',')]
        suites: Vec<SuiteKind>,
        /// JSON file overriding any subset of the named tolerances.
        #[arg(long)]
        tolerances: Option<PathBuf>,
    },
    /// Draw a seeded random density matrix.
    RandomState {
        /// State dimension.
        #[arg(long)]
        dim: usize,
        /// Rank (defaults to full).
        #[arg(long)]
        rank: Option<usize>,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a seeded random channel.
    RandomChannel {
        /// System dimension.
        #[arg(long)]
        dim: usize,
        /// Number of Kraus operators (defaults to the dimension).
        #[arg(long)]
        kraus: Option<usize>,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse and execute one invocation.
///
/// Returns `(exit code, stdout, stderr)` without printing or exiting, so the
/// whole surface is testable in-process.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    (0, e.to_string(), String::new())
                }
                _ => (2, String::new(), e.to_string()),
            };
        }
    };
    match execute(&cli) {
        Ok((stdout, pass)) => (if pass { 0 } else { 1 }, stdout, String::new()),
        Err(err) => (2, String::new(), format!("error: {err}\n")),
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn execute(cli: &Cli) -> Result<(String, bool), CliError> {
    match &cli.command {
        Command::Fidelity { rho, sigma } => cmd_fidelity(cli, rho, sigma),
        Command::Purify { state, env_dim, out } => {
            cmd_purify(cli, state, *env_dim, out.as_deref())
        }
        Command::Witness { rho, sigma } => cmd_witness(cli, rho, sigma),
        Command::Dilate { channel, out } => cmd_dilate(cli, channel, out.as_deref()),
        Command::CheckBound { channel, psi, phi } => cmd_check_bound(cli, channel, psi, phi),
        Command::CheckMonotonicity { channel, rho, sigma, via_witness } => {
            cmd_check_monotonicity(cli, channel, rho, sigma, *via_witness)
        }
        Command::Suite { trials, dims, suites, tolerances } => {
            cmd_suite(cli, *trials, dims, suites, tolerances.as_deref())
        }
        Command::RandomState { dim, rank, out } => {
            cmd_random_state(cli, *dim, *rank, out.as_deref())
        }
        Command::RandomChannel { dim, kraus, out } => {
            cmd_random_channel(cli, *dim, *kraus, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct FidelityOutput {
    fidelity: f64,
}

fn cmd_fidelity(cli: &Cli, rho: &Path, sigma: &Path) -> Result<(String, bool), CliError> {
    let rho = load_density(rho)?;
    let sigma = load_density(sigma)?;
    let value = fidelity(&rho, &sigma)?;
    let text = if cli.json {
        format!("{}\n", io::to_json(&FidelityOutput { fidelity: value }))
    } else {
        format!("fidelity: {value:.16e}\n")
    };
    Ok((text, true))
}

#[derive(Serialize)]
struct PurifyOutput {
    dim_e: usize,
    dim_q: usize,
    roundtrip_residual: f64,
    amplitudes: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    written: Option<String>,
}

fn cmd_purify(
    cli: &Cli,
    state: &Path,
    env_dim: Option<usize>,
    out: Option<&Path>,
) -> Result<(String, bool), CliError> {
    let rho = load_density(state)?;
    let dim_e = env_dim.unwrap_or(rho.dim());
    let purification = standard_purification(&rho, dim_e)?;
    let roundtrip = reduce(&purification).matrix().sub(rho.matrix()).fro_norm();
    let written = match out {
        Some(path) => {
            save_payload(path, &pure_payload(purification.vector()))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let output = PurifyOutput {
        dim_e,
        dim_q: rho.dim(),
        roundtrip_residual: roundtrip,
        amplitudes: purification.vector().amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        written: written.clone(),
    };
    let text = if cli.json {
        format!("{}\n", io::to_json(&output))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "environment dimension: {dim_e}");
        let _ = writeln!(s, "system dimension: {}", rho.dim());
        let _ = writeln!(s, "roundtrip residual: {roundtrip:.2e}");
        if let Some(path) = &written {
            let _ = writeln!(s, "written: {path}");
        }
        s
    };
    Ok((text, true))
}

#[derive(Serialize)]
struct WitnessOutput {
    fidelity: f64,
    overlap: [f64; 2],
    rho_residual: f64,
    sigma_residual: f64,
    overlap_residual: f64,
    pass: bool,
}

fn cmd_witness(cli: &Cli, rho: &Path, sigma: &Path) -> Result<(String, bool), CliError> {
    let rho = load_density(rho)?;
    let sigma = load_density(sigma)?;
    let witness = construct_witness(&rho, &sigma)?;
    let report = verify_witness(&witness, &rho, &sigma, cli.tol)?;
    let output = WitnessOutput {
        fidelity: witness.fidelity_target,
        overlap: [witness.overlap.re, witness.overlap.im],
        rho_residual: report.rho_residual,
        sigma_residual: report.sigma_residual,
        overlap_residual: report.overlap_residual,
        pass: report.pass,
    };
    let text = if cli.json {
        format!("{}\n", io::to_json(&output))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "fidelity: {:.16e}", output.fidelity);
        let _ = writeln!(s, "overlap: {:.16e} + {:.16e}i", output.overlap[0], output.overlap[1]);
        let _ = writeln!(s, "rho residual: {:.2e}", output.rho_residual);
        let _ = writeln!(s, "sigma residual: {:.2e}", output.sigma_residual);
        let _ = writeln!(s, "overlap residual: {:.2e}", output.overlap_residual);
        let _ = writeln!(s, "witness: {}", verdict(output.pass));
        s
    };
    Ok((text, report.pass))
}

#[derive(Serialize)]
struct DilateOutput {
    dim_q: usize,
    dim_e: usize,
    unitarity_deviation: f64,
    choi_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    written: Option<String>,
}

fn cmd_dilate(cli: &Cli, channel: &Path, out: Option<&Path>) -> Result<(String, bool), CliError> {
    let channel = load_channel(channel)?;
    let dilation = stinespring_dilate(&channel)?;
    let extracted = kraus_from_dilation(&dilation);
    let choi_residual = choi_distance(&channel, &extracted)?;
    let written = match out {
        Some(path) => {
            save_payload(path, &unitary_payload(&dilation.unitary))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let output = DilateOutput {
        dim_q: dilation.dim_q,
        dim_e: dilation.dim_e,
        unitarity_deviation: dilation.unitary.unitarity_deviation(),
        choi_residual,
        written: written.clone(),
    };
    let text = if cli.json {
        format!("{}\n", io::to_json(&output))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "system dimension: {}", output.dim_q);
        let _ = writeln!(s, "environment dimension: {}", output.dim_e);
        let _ = writeln!(s, "unitarity deviation: {:.2e}", output.unitarity_deviation);
        let _ = writeln!(s, "choi roundtrip residual: {:.2e}", output.choi_residual);
        if let Some(path) = &written {
            let _ = writeln!(s, "written: {path}");
        }
        s
    };
    Ok((text, true))
}

#[derive(Serialize)]
struct BoundOutput {
    input_overlap: f64,
    output_fidelity: f64,
    slack: f64,
    pass: bool,
}

fn cmd_check_bound(
    cli: &Cli,
    channel: &Path,
    psi: &Path,
    phi: &Path,
) -> Result<(String, bool), CliError> {
    let channel = load_channel(channel)?;
    let psi = load_pure(psi)?;
    let phi = load_pure(phi)?;
    let input_overlap = pure_overlap(&psi, &phi)?;
    let output_fidelity = fidelity(&channel.apply_pure(&psi)?, &channel.apply_pure(&phi)?)?;
    let slack = output_fidelity - input_overlap;
    let pass = slack >= -cli.tol;
    let output = BoundOutput { input_overlap, output_fidelity, slack, pass };
    let text = if cli.json {
        format!("{}\n", io::to_json(&output))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "input overlap: {input_overlap:.16e}");
        let _ = writeln!(s, "output fidelity: {output_fidelity:.16e}");
        let _ = writeln!(s, "slack: {slack:.2e}");
        let _ = writeln!(s, "bound: {}", verdict(pass));
        s
    };
    Ok((text, pass))
}

#[derive(Serialize)]
struct MonotonicityOutput {
    input_fidelity: f64,
    output_fidelity: f64,
    slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_residual: Option<f64>,
    pass: bool,
}

fn cmd_check_monotonicity(
    cli: &Cli,
    channel: &Path,
    rho: &Path,
    sigma: &Path,
    via_witness: bool,
) -> Result<(String, bool), CliError> {
    let channel = load_channel(channel)?;
    let rho = load_density(rho)?;
    let sigma = load_density(sigma)?;
    let input_fidelity = fidelity(&rho, &sigma)?;
    let output_fidelity = fidelity(&channel.apply(&rho)?, &channel.apply(&sigma)?)?;
    let slack = output_fidelity - input_fidelity;
    let mut pass = slack >= -cli.tol;

    let witness_report = if via_witness {
        let report = monotonicity_via_witness(&channel, &rho, &sigma, cli.tol)?;
        pass = pass && report.pass;
        Some(report)
    } else {
        None
    };

    let output = MonotonicityOutput {
        input_fidelity,
        output_fidelity,
        slack,
        psi_residual: witness_report.as_ref().map(|r| r.psi_residual),
        phi_residual: witness_report.as_ref().map(|r| r.phi_residual),
        bound_residual: witness_report.as_ref().map(|r| r.bound_residual),
        pass,
    };
    let text = if cli.json {
        format!("{}\n", io::to_json(&output))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "input fidelity: {input_fidelity:.16e}");
        let _ = writeln!(s, "output fidelity: {output_fidelity:.16e}");
        let _ = writeln!(s, "slack: {slack:.2e}");
        if let Some(report) = &witness_report {
            let _ = writeln!(s, "witness psi residual: {:.2e}", report.psi_residual);
            let _ = writeln!(s, "witness phi residual: {:.2e}", report.phi_residual);
            let _ = writeln!(s, "witness bound residual: {:.2e}", report.bound_residual);
        }
        let _ = writeln!(s, "monotonicity: {}", verdict(pass));
        s
    };
    Ok((text, pass))
}

fn render_suite_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed: {}", report.seed);
    let _ = writeln!(s, "trials: {}", report.trials);
    let _ = writeln!(
        s,
        "dims: {}",
        report.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
    );
    for suite in &report.suites {
        match suite.elapsed_ms {
            Some(ms) => {
                let _ = writeln!(s, "{}: {} ({ms:.1} ms)", suite.suite, verdict(suite.pass));
            }
            None => {
                let _ = writeln!(s, "{}: {}", suite.suite, verdict(suite.pass));
            }
        }
        for check in &suite.checks {
            let _ = writeln!(
                s,
                "  {}: worst {:.2e}, tolerance {:.2e}, failures {}",
                check.name, check.worst, check.tolerance, check.failures
            );
        }
    }
    let _ = writeln!(s, "overall: {}", verdict(report.overall_pass));
    s
}

fn cmd_suite(
    cli: &Cli,
    trials: usize,
    dims: &[usize],
    suites: &[SuiteKind],
    tolerances: Option<&Path>,
) -> Result<(String, bool), CliError> {
    let tolerances = match tolerances {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::from_str::<SuiteTolerances>(&text).map_err(|e| CliError::Parse {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?
        }
        None => SuiteTolerances::default(),
    };
    let config = SuiteConfig {
        seed: cli.seed,
        trials,
        dims: dims.to_vec(),
        tolerances,
        suites: suites.to_vec(),
    };
    let report = run_suites(&config, !cli.no_timing)?;
    let text = if cli.json {
        format!("{}\n", io::to_json(&report))
    } else {
        render_suite_text(&report)
    };
    Ok((text, report.overall_pass))
}

fn emit_payload(
    cli: &Cli,
    payload: &FilePayload,
    out: Option<&Path>,
) -> Result<(String, bool), CliError> {
    match out {
        Some(path) => {
            save_payload(path, payload)?;
            let text = if cli.json {
                format!("{}\n", io::to_json(&serde_json::json!({"written": path.display().to_string()})))
            } else {
                format!("written: {}\n", path.display())
            };
            Ok((text, true))
        }
        None => Ok((format!("{}\n", io::to_json(payload)), true)),
    }
}

fn cmd_random_state(
    cli: &Cli,
    dim: usize,
    rank: Option<usize>,
    out: Option<&Path>,
) -> Result<(String, bool), CliError> {
    let state = random_density(dim, rank.unwrap_or(dim), cli.seed)?;
    emit_payload(cli, &density_payload(&state), out)
}

fn cmd_random_channel(
    cli: &Cli,
    dim: usize,
    kraus: Option<usize>,
    out: Option<&Path>,
) -> Result<(String, bool), CliError> {
    let channel = random_channel(dim, kraus.unwrap_or(dim), cli.seed)?;
    emit_payload(cli, &channel_payload(&channel), out)
}
