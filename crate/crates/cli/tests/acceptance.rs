//! Acceptance gate: one test per shipped guarantee, each printing a single
//! verdict line. Trial counts, dimensions, and tolerances are the contract;
//! do not reduce them to make a failure go away.

use std::process::Command;

use uhlmann_core::{
    apply_dilation, choi_distance, classical_fidelity, construct_witness, derive_seed, fidelity,
    kraus_from_dilation, monotonicity_check, monotonicity_via_witness, overlap_upper_bound_check,
    psd_sqrt, pure_overlap, random_channel, random_density, random_pure,
    random_purification_sweep, stinespring_dilate, test_pass_probability, tol, trace_norm,
    uhlmann_optimal_purifications, uhlmann_variational, verify_witness, DensityMatrix, Rng,
    seeded_pair,
};

fn normalized_distribution(rng: &mut Rng, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| 1e-3 + rng.next_f64()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

#[test]
fn criterion_1_closed_form_identities() {
    const SEED: u64 = 0xAC01;
    let mut worst_cross = 0.0f64;
    let mut worst_symmetry = 0.0f64;
    let mut worst_self = 0.0f64;
    for trial in 0..200u64 {
        let dim = [2, 3, 4, 5][(trial % 4) as usize];
        let (rho, sigma) = seeded_pair(dim, trial, SEED).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let product = psd_sqrt(sigma.matrix(), tol::SPECTRAL_FLOOR)
            .unwrap()
            .mul(&psd_sqrt(rho.matrix(), tol::SPECTRAL_FLOOR).unwrap());
        let cross = (f - trace_norm(&product).unwrap()).abs();
        assert!(cross <= 1e-9, "trial {trial}: cross-form gap {cross}");
        worst_cross = worst_cross.max(cross);

        let symmetry = (f - fidelity(&sigma, &rho).unwrap()).abs();
        assert!(symmetry <= 1e-10, "trial {trial}: asymmetry {symmetry}");
        worst_symmetry = worst_symmetry.max(symmetry);

        let this = 1.0 - fidelity(&rho, &rho).unwrap();
        assert!(this <= 1e-10, "trial {trial}: self-fidelity deficit {this}");
        worst_self = worst_self.max(this);
    }
    let mut worst_classical = 0.0f64;
    for trial in 0..50u64 {
        let dim = [2, 3, 4, 5][(trial % 4) as usize];
        let mut rng = Rng::new(derive_seed(SEED, 0x1000 + trial));
        let p = normalized_distribution(&mut rng, dim);
        let q = normalized_distribution(&mut rng, dim);
        let f = fidelity(
            &DensityMatrix::from_distribution(&p).unwrap(),
            &DensityMatrix::from_distribution(&q).unwrap(),
        )
        .unwrap();
        let gap = (f - classical_fidelity(&p, &q).unwrap()).abs();
        assert!(gap <= 1e-10, "trial {trial}: classical gap {gap}");
        worst_classical = worst_classical.max(gap);
    }
    println!(
        "criterion 1 (closed-form identities): PASS — worst cross-form {worst_cross:.2e}, \
         symmetry {worst_symmetry:.2e}, self deficit {worst_self:.2e}, classical {worst_classical:.2e}"
    );
}

#[test]
fn criterion_2_pure_state_reduction() {
    const SEED: u64 = 0xAC02;
    let mut worst_overlap = 0.0f64;
    let mut worst_square = 0.0f64;
    for trial in 0..200u64 {
        let dim = [2, 3, 4, 5][(trial % 4) as usize];
        let seed = derive_seed(SEED, trial);
        let psi = random_pure(dim, seed);
        let phi = random_pure(dim, derive_seed(seed, 1));
        let overlap = pure_overlap(&psi, &phi).unwrap();
        let f = fidelity(
            &DensityMatrix::from_pure(&psi),
            &DensityMatrix::from_pure(&phi),
        )
        .unwrap();
        let gap = (f - overlap).abs();
        assert!(gap <= 1e-9, "trial {trial}: projector gap {gap}");
        worst_overlap = worst_overlap.max(gap);

        let square = (test_pass_probability(&psi, &phi).unwrap() - overlap * overlap).abs();
        assert!(square <= 1e-12, "trial {trial}: pass-probability gap {square}");
        worst_square = worst_square.max(square);
    }
    println!(
        "criterion 2 (pure-state reduction): PASS — worst overlap gap {worst_overlap:.2e}, \
         square gap {worst_square:.2e}"
    );
}

#[test]
fn criterion_3_purification_overlap_characterization() {
    const SEED: u64 = 0xAC03;
    let mut worst_optimal = 0.0f64;
    for trial in 0..60u64 {
        let dim = 2 + (trial % 3) as usize;
        let (rho, sigma) = seeded_pair(dim, trial, SEED).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let pair = uhlmann_optimal_purifications(&rho, &sigma, dim).unwrap();
        let gap = (pair.psi0.inner(&pair.phi0).norm() - f).abs();
        assert!(gap <= 1e-8, "trial {trial}: optimal-overlap gap {gap}");
        worst_optimal = worst_optimal.max(gap);
    }

    // 25 pairs × 20 samples = 500 random purification draws; none may beat
    // the fidelity.
    let mut worst_margin = f64::NEG_INFINITY;
    for trial in 0..25u64 {
        let dim = 2 + (trial % 3) as usize;
        let (rho, sigma) = seeded_pair(dim, trial, derive_seed(SEED, 0x2000)).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let best = random_purification_sweep(&rho, &sigma, dim, 20, derive_seed(SEED, trial))
            .unwrap();
        let margin = best - f;
        assert!(margin <= 1e-9, "trial {trial}: sample beat fidelity by {margin}");
        worst_margin = worst_margin.max(margin);
    }

    let mut worst_ascent = 0.0f64;
    for trial in 0..50u64 {
        let dim = 2 + (trial % 3) as usize;
        let (rho, sigma) = seeded_pair(dim, trial, derive_seed(SEED, 0x3000)).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let trace =
            uhlmann_variational(&rho, &sigma, dim, 6, 400, 1e-10, derive_seed(SEED, 0x4000 + trial))
                .unwrap();
        let gap = (trace.final_overlap - f).abs();
        assert!(gap <= 1e-5, "trial {trial}: ascent gap {gap}");
        worst_ascent = worst_ascent.max(gap);
    }
    println!(
        "criterion 3 (purification overlaps): PASS — worst optimal gap {worst_optimal:.2e}, \
         sweep margin {worst_margin:.2e}, ascent gap {worst_ascent:.2e}"
    );
}

#[test]
fn criterion_4_dilation_roundtrips() {
    const SEED: u64 = 0xAC04;
    let mut worst_choi = 0.0f64;
    let mut worst_unitarity = 0.0f64;
    let mut worst_action = 0.0f64;
    for dim in 2..=4usize {
        for rank in 1..=dim * dim {
            for rep in 0..2u64 {
                let seed = derive_seed(SEED, (dim * 100 + rank) as u64 + 0x500 * rep);
                let channel = random_channel(dim, rank, seed).unwrap();
                let dilation = stinespring_dilate(&channel).unwrap();
                assert_eq!(
                    dilation.dim_e,
                    dim * dim,
                    "dim {dim} rank {rank}: environment is not dim²"
                );
                let unitarity = dilation.unitary.unitarity_deviation();
                assert!(unitarity <= 1e-9, "dim {dim} rank {rank}: unitarity {unitarity}");
                worst_unitarity = worst_unitarity.max(unitarity);

                let choi = choi_distance(&channel, &kraus_from_dilation(&dilation)).unwrap();
                assert!(choi <= 1e-8, "dim {dim} rank {rank}: Choi gap {choi}");
                worst_choi = worst_choi.max(choi);

                let probe = random_density(dim, dim, derive_seed(seed, 7)).unwrap();
                let action = apply_dilation(&dilation, &probe)
                    .unwrap()
                    .matrix()
                    .sub(channel.apply(&probe).unwrap().matrix())
                    .fro_norm();
                assert!(action <= 1e-8, "dim {dim} rank {rank}: action gap {action}");
                worst_action = worst_action.max(action);
            }
        }
    }
    println!(
        "criterion 4 (dilation roundtrips): PASS — worst Choi {worst_choi:.2e}, \
         unitarity {worst_unitarity:.2e}, action {worst_action:.2e}"
    );
}

#[test]
fn criterion_5_witness_construction() {
    const SEED: u64 = 0xAC05;
    let mut passes = 0usize;
    let mut worst = 0.0f64;
    for trial in 0..200u64 {
        let dim = 2 + (trial % 3) as usize;
        let seed = derive_seed(SEED, trial);
        let (rho, sigma) = match trial % 10 {
            // Degenerate corner: identical states.
            0 => {
                let rho = random_density(dim, 1 + (trial as usize / 10) % dim, seed).unwrap();
                (rho.clone(), rho)
            }
            // Degenerate corner: orthogonal supports, fidelity zero.
            1 => {
                let split = 1 + (trial as usize / 10) % (dim - 1);
                let p: Vec<f64> = (0..dim)
                    .map(|i| if i < split { 1.0 / split as f64 } else { 0.0 })
                    .collect();
                let q: Vec<f64> = (0..dim)
                    .map(|i| if i >= split { 1.0 / (dim - split) as f64 } else { 0.0 })
                    .collect();
                (
                    DensityMatrix::from_distribution(&p).unwrap(),
                    DensityMatrix::from_distribution(&q).unwrap(),
                )
            }
            // Mixed ranks via the cycling generator.
            _ => seeded_pair(dim, trial, SEED).unwrap(),
        };
        let witness = construct_witness(&rho, &sigma).unwrap();
        let report = verify_witness(&witness, &rho, &sigma, 1e-8).unwrap();
        assert!(
            report.pass,
            "trial {trial} (dim {dim}): residuals {} {} {}",
            report.rho_residual, report.sigma_residual, report.overlap_residual
        );
        passes += 1;
        worst = worst
            .max(report.rho_residual)
            .max(report.sigma_residual)
            .max(report.overlap_residual);
    }
    assert_eq!(passes, 200);
    println!("criterion 5 (witness construction): PASS — 200/200, worst residual {worst:.2e}");
}

#[test]
fn criterion_6_overlap_bound() {
    const SEED: u64 = 0xAC06;
    let mut min_slack = f64::INFINITY;
    for trial in 0..500u64 {
        let dim = 2 + (trial % 3) as usize;
        let seed = derive_seed(SEED, trial);
        let rank = 1 + (trial as usize) % (dim * dim);
        let channel = random_channel(dim, rank, seed).unwrap();
        let psi = random_pure(dim, derive_seed(seed, 1));
        let phi = random_pure(dim, derive_seed(seed, 2));
        let slack = overlap_upper_bound_check(&channel, &psi, &phi).unwrap();
        assert!(slack >= -1e-8, "trial {trial}: bound violated by {slack}");
        min_slack = min_slack.min(slack);
    }
    println!("criterion 6 (overlap bound): PASS — min slack {min_slack:.2e}");
}

#[test]
fn criterion_7_monotonicity() {
    const SEED: u64 = 0xAC07;
    let mut min_slack = f64::INFINITY;
    for trial in 0..500u64 {
        let dim = 2 + (trial % 3) as usize;
        let seed = derive_seed(SEED, trial);
        let (rho, sigma) = seeded_pair(dim, trial, SEED).unwrap();
        let channel = random_channel(dim, 1 + (trial as usize) % dim, seed).unwrap();
        let slack = monotonicity_check(&channel, &rho, &sigma).unwrap();
        assert!(slack >= -1e-8, "trial {trial}: monotonicity violated by {slack}");
        min_slack = min_slack.min(slack);
    }
    let mut passes = 0usize;
    for trial in 0..100u64 {
        let dim = 2 + (trial % 3) as usize;
        let seed = derive_seed(SEED, 0x9000 + trial);
        let (rho, sigma) = seeded_pair(dim, trial, derive_seed(SEED, 0x9999)).unwrap();
        let channel = random_channel(dim, 1 + (trial as usize) % (dim * dim), seed).unwrap();
        let report = monotonicity_via_witness(&channel, &rho, &sigma, 1e-8).unwrap();
        assert!(report.pass, "trial {trial}: {report:?}");
        passes += 1;
    }
    assert_eq!(passes, 100);
    println!("criterion 7 (monotonicity): PASS — min slack {min_slack:.2e}, via witness 100/100");
}

#[test]
fn criterion_8_cli_determinism() {
    let exe = env!("CARGO_BIN_EXE_uhlmann");
    let invoke = || {
        Command::new(exe)
            .args(["suite", "--seed", "42", "--trials", "100", "--json", "--no-timing"])
            .output()
            .expect("failed to spawn the CLI")
    };
    let first = invoke();
    let second = invoke();
    assert!(
        first.status.success(),
        "first run failed: {}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert!(second.status.success());
    assert!(first.stderr.is_empty() && second.stderr.is_empty());
    assert_eq!(first.stdout, second.stdout, "suite output is not byte-deterministic");

    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["overall_pass"], true);
    assert_eq!(report["seed"], 42);
    assert_eq!(report["trials"], 100);
    println!("criterion 8 (CLI determinism): PASS — byte-identical suite output, exit 0");
}
