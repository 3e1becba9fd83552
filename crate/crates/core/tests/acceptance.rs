//! Acceptance checks: statistical end-to-end behavior of the simulator.
//!
//! Each test prints a single PASS/FAIL line for its criterion. The
//! heavier checks run hundreds of thousands of simulated training
//! episodes and take a few minutes altogether.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beamtrain::analysis::{
    exponent_adaptive_bound, exponent_exhaustive, gap_profile, hardness,
};
use beamtrain::array_channel::{dft_codebook, effective_channels, effective_gains};
use beamtrain::cli_io::{parse_config, run_experiment, write_csv};
use beamtrain::montecarlo::{
    derive_seed, estimate_misalignment, fit_exponent, ks_distance, sweep, Algorithm,
    MisalignmentEstimate, Scenario,
};
use beamtrain::statistic::{noncentrality, sample_ncx2_2dof, BeamAccumulator, NoiseModel};
use beamtrain::training::{phase_schedule, run_adaptive, run_exhaustive, TrainingEnvironment};

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {name} failed: {detail}");
}

fn reference_scenario(algorithm: Algorithm, snr_db: f64, budget: u64) -> Scenario {
    Scenario {
        l_beams: 64,
        alpha: Complex64::new(1.0, 0.0),
        phi: 0.47,
        snr_db,
        budget,
        algorithm,
    }
}

/// 1. The adaptive allocation never spends more symbols than its
///    budget, for random problem sizes.
#[test]
fn adaptive_budget_is_never_exceeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let noise = NoiseModel::from_snr_db(0.0).unwrap();
    let mut worst_slack = u64::MAX;
    for case in 0..500u64 {
        let l_beams: usize = rng.random_range(2..=128);
        let upper = (10.0 * l_beams as f64 * (l_beams as f64).ln()).ceil() as u64;
        let budget = rng.random_range(l_beams as u64..=upper.max(l_beams as u64));
        let gains: Vec<f64> = (0..l_beams).map(|_| rng.random_range(0.01..4.0)).collect();

        let schedule = phase_schedule(budget, l_beams).unwrap();
        let mut env = TrainingEnvironment::from_gains(
            &gains,
            noise,
            budget,
            ChaCha8Rng::seed_from_u64(derive_seed(2002, case)),
        )
        .unwrap();
        let result = run_adaptive(&mut env, &schedule).unwrap();
        let spent: u64 = result.symbols_used.iter().sum();
        assert_eq!(spent, env.symbols_spent());
        assert!(
            spent <= budget,
            "case {case}: spent {spent} of {budget} with {l_beams} beams"
        );
        worst_slack = worst_slack.min(budget - spent);
    }
    verdict(
        "adaptive_budget_is_never_exceeded",
        true,
        &format!("500 random sizes, worst slack {worst_slack} symbols"),
    );
}

/// 2. The accumulator-backed statistic follows the same noncentral
///    chi-square law as the direct sampler, in distribution and moments.
#[test]
fn accumulator_statistic_matches_the_reference_law() {
    let trials = 100_000usize;
    let noise = NoiseModel::new(2.0, 1.0).unwrap();
    let k_symbols = 4u64;
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut details = Vec::new();
    let mut all_pass = true;

    for lambda in [0.0f64, 1.0, 10.0, 100.0] {
        // lambda = 2 k p_t g / sigma2, so g = lambda sigma2 / (2 k p_t).
        let gain = lambda * noise.sigma2() / (2.0 * k_symbols as f64 * noise.p_t());
        assert!((noncentrality(k_symbols, &noise, gain) - lambda).abs() < 1e-12);

        let mut via_acc = Vec::with_capacity(trials);
        let mut direct = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut acc = BeamAccumulator::new(Complex64::new(gain.sqrt(), 0.0));
            acc.absorb_symbols(k_symbols, &noise, &mut rng);
            via_acc.push(acc.statistic(&noise).unwrap().value);
            direct.push(sample_ncx2_2dof(lambda, &mut rng).unwrap());
        }

        let d = ks_distance(via_acc.clone(), direct).unwrap();
        // Two-sample KS critical value at the 1% level.
        let crit = 1.628 * (2.0 / trials as f64).sqrt();

        let n = trials as f64;
        let mean: f64 = via_acc.iter().sum::<f64>() / n;
        let var: f64 = via_acc.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        // Cumulants of the law: k2 = 4 + 4 lambda, k4 = 48 (2 + 4 lambda).
        let k2 = 4.0 + 4.0 * lambda;
        let k4 = 48.0 * (2.0 + 4.0 * lambda);
        let se_mean = (k2 / n).sqrt();
        let se_var = ((k4 + 2.0 * k2 * k2) / n).sqrt();

        let ok = d < crit
            && (mean - (2.0 + lambda)).abs() < 5.0 * se_mean
            && (var - k2).abs() < 5.0 * se_var;
        all_pass &= ok;
        details.push(format!(
            "lambda {lambda}: KS {d:.5} (crit {crit:.5}), mean {mean:.3}, var {var:.1}"
        ));
    }
    verdict(
        "accumulator_statistic_matches_the_reference_law",
        all_pass,
        &details.join("; "),
    );
}

/// 3. Head-to-head error exponent at a deep budget: for two beams with
///    unit square-root gap, the empirical exponent (1/k) log p at k = 200
///    symbols per side over one million trials must sit within 15% of
///    -1/4.
#[test]
fn pairwise_error_exponent_at_deep_budget() {
    let xi = [4.0f64, 1.0];
    let profile = gap_profile(&xi).unwrap();
    assert_eq!(profile.delta_min(), 1.0);

    let k_symbols = 200u64;
    let trials = 1_000_000u64;
    let lambda_opt = k_symbols as f64 * xi[0];
    let lambda_weak = k_symbols as f64 * xi[1];

    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let mut wins = 0u64;
    for _ in 0..trials {
        let t_opt = sample_ncx2_2dof(lambda_opt, &mut rng).unwrap();
        let t_weak = sample_ncx2_2dof(lambda_weak, &mut rng).unwrap();
        if t_weak > t_opt {
            wins += 1;
        }
    }
    let p_hat = wins as f64 / trials as f64;
    let empirical = p_hat.ln() / k_symbols as f64;
    let target = -0.25f64;
    let in_band = empirical.is_finite() && (empirical - target).abs() <= 0.15 * target.abs();

    // The band corresponds to rates between exp(-57.5) ~ 1.1e-25 and
    // exp(-42.5) ~ 3.4e-19. The true rate of this profile (~8e-24) is
    // inside the band, but resolving any rate that small needs on the
    // order of 1e20 or more trials; at 1e6 trials the expected win
    // count is ~1e-17, so the estimate is zero and the check cannot
    // pass at this trial count. Left as stated deliberately; see the
    // README's known-limitations note.
    verdict(
        "pairwise_error_exponent_at_deep_budget",
        in_band,
        &format!(
            "{wins} wins in {trials} trials at k = {k_symbols}; empirical exponent {empirical}, \
             required within 15% of {target}; smallest observable nonzero rate 1e-6 maps to {:.4}",
            (1e-6f64).ln() / k_symbols as f64
        ),
    );
}

/// 4. Across an SNR grid spanning exhaustive misalignment from ~0.37
///    down to ~0.01 at a fixed budget, adaptive training is strictly
///    better at every point, with non-overlapping 95% intervals on at
///    least 4 of 5 points.
#[test]
fn adaptive_beats_exhaustive_across_snr() {
    let snr_grid = [-6.0f64, -2.0, 2.0, 6.0, 10.0];
    let trials = 10_000u64;
    let master = 90210u64;

    let scenarios: Vec<Scenario> = snr_grid
        .iter()
        .flat_map(|&snr| {
            [
                reference_scenario(Algorithm::Exhaustive, snr, 1280),
                reference_scenario(Algorithm::Adaptive, snr, 1280),
            ]
        })
        .collect();
    let outcomes = sweep(&scenarios, trials, master).unwrap();
    let estimates: Vec<MisalignmentEstimate> =
        outcomes.into_iter().map(|o| o.unwrap()).collect();

    let mut strictly_below = 0;
    let mut disjoint = 0;
    let mut lines = Vec::new();
    for (i, &snr) in snr_grid.iter().enumerate() {
        let ex = estimates[2 * i];
        let ad = estimates[2 * i + 1];
        if ad.p_hat < ex.p_hat {
            strictly_below += 1;
        }
        if ad.ci_high < ex.ci_low {
            disjoint += 1;
        }
        lines.push(format!("{snr} dB: ex {} ad {}", ex.p_hat, ad.p_hat));
    }
    let spans_regime = estimates[0].p_hat >= 0.2 && estimates[8].p_hat <= 0.05;

    verdict(
        "adaptive_beats_exhaustive_across_snr",
        spans_regime && strictly_below == 5 && disjoint >= 4,
        &format!(
            "{}; adaptive below at {strictly_below}/5, disjoint CIs at {disjoint}/5",
            lines.join("; ")
        ),
    );
}

/// 5. Fitted decay slopes of ln p against the budget match the
///    theoretical exponents within 30%, and are at least as fast.
#[test]
fn decay_slopes_match_theoretical_exponents() {
    let trials = 100_000u64;
    let noise = NoiseModel::from_snr_db(-2.0).unwrap();
    let cb = dft_codebook(64).unwrap();
    let gains = effective_gains(&cb, Complex64::new(1.0, 0.0), 0.47).unwrap();
    let xi: Vec<f64> = gains
        .gains()
        .iter()
        .map(|g| 2.0 * noise.p_t() * g / noise.sigma2())
        .collect();
    let profile = gap_profile(&xi).unwrap();
    let theory_ex = exponent_exhaustive(&profile).unwrap();
    let theory_ad = exponent_adaptive_bound(&hardness(&profile).unwrap());

    let mut details = Vec::new();
    let mut all_pass = true;
    let cases: [(Algorithm, &[u64], f64, f64); 2] = [
        (
            Algorithm::Exhaustive,
            &[9600, 16000, 22400, 28800, 35200],
            -1.2e-4,
            theory_ex,
        ),
        (
            Algorithm::Adaptive,
            &[1280, 2240, 3200, 4160],
            -9.0e-4,
            theory_ad,
        ),
    ];
    for (algorithm, budgets, nominal, theory) in cases {
        let mut points = Vec::new();
        let mut in_range = true;
        for &budget in budgets {
            let sc = reference_scenario(algorithm, -2.0, budget);
            let est =
                estimate_misalignment(&sc, trials, derive_seed(777, sc.fingerprint())).unwrap();
            in_range &= (1e-3..=1e-1).contains(&est.p_hat);
            points.push((budget, est));
        }
        let fit = fit_exponent(&points).unwrap();
        let within_band = (fit.slope / nominal - 1.0).abs() <= 0.30;
        let fast_enough = fit.slope <= theory + 0.05 * theory.abs();
        all_pass &= in_range && within_band && fast_enough;
        details.push(format!(
            "{algorithm}: slope {:.4e} vs nominal {nominal:.1e} and theory {theory:.4e}, \
             p range [{:.2e}, {:.2e}]",
            fit.slope,
            points.iter().map(|(_, e)| e.p_hat).fold(f64::INFINITY, f64::min),
            points.iter().map(|(_, e)| e.p_hat).fold(0.0, f64::max),
        ));
    }
    verdict(
        "decay_slopes_match_theoretical_exponents",
        all_pass,
        &details.join("; "),
    );
}

/// 6. With two beams the adaptive schedule is a single even split, so
///    both algorithms must agree: per-beam symbol counts within 1, and
///    misalignment estimates within overlapping 95% intervals.
#[test]
fn two_beam_adaptive_reduces_to_exhaustive() {
    let budget = 2000u64;
    let phi = 0.55f64;
    let cb = dft_codebook(2).unwrap();
    let channels = effective_channels(&cb, Complex64::new(1.0, 0.0), phi).unwrap();
    let noise = NoiseModel::from_snr_db(-8.0).unwrap();

    let schedule = phase_schedule(budget, 2).unwrap();
    let mut env = TrainingEnvironment::new(
        &channels,
        noise,
        budget,
        ChaCha8Rng::seed_from_u64(42),
    )
    .unwrap();
    let adaptive_counts = run_adaptive(&mut env, &schedule).unwrap().symbols_used;
    let mut env = TrainingEnvironment::new(
        &channels,
        noise,
        budget,
        ChaCha8Rng::seed_from_u64(42),
    )
    .unwrap();
    let exhaustive_counts = run_exhaustive(&mut env).unwrap().symbols_used;
    let counts_close = adaptive_counts
        .iter()
        .zip(&exhaustive_counts)
        .all(|(a, e)| a.abs_diff(*e) <= 1);

    let trials = 100_000u64;
    let sc_ad = Scenario {
        l_beams: 2,
        alpha: Complex64::new(1.0, 0.0),
        phi,
        snr_db: -8.0,
        budget,
        algorithm: Algorithm::Adaptive,
    };
    let sc_ex = Scenario {
        algorithm: Algorithm::Exhaustive,
        ..sc_ad
    };
    let ad = estimate_misalignment(&sc_ad, trials, 606).unwrap();
    let ex = estimate_misalignment(&sc_ex, trials, 607).unwrap();
    let overlap = ad.ci_low <= ex.ci_high && ex.ci_low <= ad.ci_high;

    verdict(
        "two_beam_adaptive_reduces_to_exhaustive",
        counts_close && overlap,
        &format!(
            "counts {adaptive_counts:?} vs {exhaustive_counts:?}; \
             p_hat {} [{}, {}] vs {} [{}, {}]",
            ad.p_hat, ad.ci_low, ad.ci_high, ex.p_hat, ex.ci_low, ex.ci_high
        ),
    );
}

/// 7. With noise disabled and distinct gains, both algorithms are
///    always correct and the adaptive elimination follows ascending gain.
#[test]
fn noiseless_training_is_always_correct() {
    let cb = dft_codebook(8).unwrap();
    let alpha = Complex64::new(1.0, 0.0);
    let channels = effective_channels(&cb, alpha, 0.3).unwrap();
    let gains = effective_gains(&cb, alpha, 0.3).unwrap();
    let opt = gains.opt_index();

    let mut ascending: Vec<usize> = (0..8).collect();
    ascending.sort_by(|&a, &b| gains.gains()[a].partial_cmp(&gains.gains()[b]).unwrap());
    let expected_discards: Vec<usize> = ascending[..7].to_vec();

    let noise = NoiseModel::from_snr_db(-4.0).unwrap();
    let budget = 160u64;
    let schedule = phase_schedule(budget, 8).unwrap();
    let runs = 1000u64;
    for seed in 0..runs {
        let mut env = TrainingEnvironment::new(
            &channels,
            noise,
            budget,
            ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        env.disable_noise();
        let r = run_exhaustive(&mut env).unwrap();
        assert_eq!(r.selected, opt, "exhaustive picked {} at seed {seed}", r.selected);

        let mut env = TrainingEnvironment::new(
            &channels,
            noise,
            budget,
            ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        env.disable_noise();
        let r = run_adaptive(&mut env, &schedule).unwrap();
        assert_eq!(r.selected, opt, "adaptive picked {} at seed {seed}", r.selected);
        assert_eq!(r.discard_order, expected_discards, "seed {seed}");
    }
    verdict(
        "noiseless_training_is_always_correct",
        true,
        &format!("{runs} runs per algorithm, optimum {opt} every time"),
    );
}

/// 8. The full SNR-sweep preset produces byte-identical CSV under the
///    same master seed regardless of worker thread count.
#[test]
fn csv_output_is_identical_across_thread_counts() {
    let preset = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/snr_sweep.toml");
    let text = std::fs::read_to_string(preset).unwrap();
    let config = parse_config(&text).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for threads in [1usize, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let rows = pool.install(|| run_experiment(&config)).unwrap();
        let path = dir.path().join(format!("{threads}.csv"));
        write_csv(&rows, &path).unwrap();
        paths.push(path);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    verdict(
        "csv_output_is_identical_across_thread_counts",
        a == b,
        &format!("{} bytes with 1 thread, {} bytes with 4", a.len(), b.len()),
    );
}
