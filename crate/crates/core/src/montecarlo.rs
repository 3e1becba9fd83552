//! Monte Carlo estimation of misalignment probabilities, with
//! reproducible counter-based seeding, Wilson confidence intervals, and
//! an exponent fit over budget sweeps.

use num_complex::Complex64;
use rayon::prelude::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::array_channel::{dft_codebook, effective_channels, effective_gains, GainProfile};
use crate::error::{Result, SimError};
use crate::statistic::{normalized_gain, NoiseModel};
use crate::training::{phase_schedule, run_adaptive, run_exhaustive, TrainingEnvironment};

/// Training policy under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Exhaustive,
    Adaptive,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Adaptive => "adaptive",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Algorithm::Exhaustive),
            "adaptive" => Ok(Algorithm::Adaptive),
            other => Err(SimError::InvalidArgument(format!(
                "unknown algorithm {other:?}, expected \"exhaustive\" or \"adaptive\""
            ))),
        }
    }
}

/// One simulated operating point: array geometry, channel, SNR, budget
/// and the algorithm under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub l_beams: usize,
    pub alpha: Complex64,
    pub phi: f64,
    pub snr_db: f64,
    pub budget: u64,
    pub algorithm: Algorithm,
}

impl Scenario {
    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::from_snr_db(self.snr_db)
    }

    pub fn gain_profile(&self) -> Result<GainProfile> {
        let cb = dft_codebook(self.l_beams)?;
        effective_gains(&cb, self.alpha, self.phi)
    }

    pub fn effective_channels(&self) -> Result<Vec<Complex64>> {
        let cb = dft_codebook(self.l_beams)?;
        effective_channels(&cb, self.alpha, self.phi)
    }

    /// Per-symbol noncentralities of every beam at this SNR.
    pub fn normalized_gains(&self) -> Result<Vec<f64>> {
        let noise = self.noise()?;
        Ok(self
            .gain_profile()?
            .gains()
            .iter()
            .map(|g| normalized_gain(&noise, *g))
            .collect())
    }

    /// Stable 64-bit fingerprint of the operating point, used to derive
    /// per-scenario seeds that survive reordering of a sweep.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xB7E1_5162_8AED_2A6Au64;
        for word in [
            self.l_beams as u64,
            self.alpha.re.to_bits(),
            self.alpha.im.to_bits(),
            self.phi.to_bits(),
            self.snr_db.to_bits(),
            self.budget,
            match self.algorithm {
                Algorithm::Exhaustive => 0,
                Algorithm::Adaptive => 1,
            },
        ] {
            h = splitmix64(h ^ word);
        }
        h
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a tag (trial index, scenario fingerprint)
/// into an independent stream seed. Pure counter-based derivation, so
/// results do not depend on how trials are scheduled across threads.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(master) ^ tag)
}

/// Wilson 95% score interval for `misaligned` successes in `trials`.
pub fn wilson_interval(misaligned: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && misaligned <= trials);
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = misaligned as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The score endpoints are exactly 0 and 1 at the boundary counts;
    // pin them so rounding noise cannot leak past.
    let lo = if misaligned == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if misaligned == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Estimated misalignment probability with its exact trial counts and a
/// Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisalignmentEstimate {
    pub p_hat: f64,
    pub misaligned: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Runs `trials` independent training episodes of the scenario and
/// counts how often the selected beam differs from the true optimum.
///
/// Trial `t` uses a generator seeded by `derive_seed(seed, t)`, so the
/// estimate is reproducible bit for bit regardless of thread count.
pub fn estimate_misalignment(
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<MisalignmentEstimate> {
    if trials == 0 {
        return Err(SimError::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let noise = scenario.noise()?;
    let channels = scenario.effective_channels()?;
    let profile = GainProfile::from_gains(channels.iter().map(|h| h.norm_sqr()).collect())?;
    let xi: Vec<f64> = profile
        .gains()
        .iter()
        .map(|g| normalized_gain(&noise, *g))
        .collect();
    let gaps = crate::analysis::gap_profile(&xi)?;
    if gaps.is_degenerate() {
        return Err(SimError::Degenerate);
    }
    let opt = profile.opt_index();

    let schedule = match scenario.algorithm {
        Algorithm::Adaptive => Some(phase_schedule(scenario.budget, scenario.l_beams)?),
        Algorithm::Exhaustive => {
            if scenario.budget < scenario.l_beams as u64 {
                return Err(SimError::InsufficientBudget {
                    budget: scenario.budget,
                    l_beams: scenario.l_beams,
                });
            }
            None
        }
    };

    let misaligned: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t));
            let mut env = TrainingEnvironment::new(&channels, noise, scenario.budget, rng)
                .expect("validated above");
            let result = match &schedule {
                Some(s) => run_adaptive(&mut env, s),
                None => run_exhaustive(&mut env),
            }
            .expect("validated above");
            u64::from(result.selected != opt)
        })
        .sum();

    let p_hat = misaligned as f64 / trials as f64;
    let (ci_low, ci_high) = wilson_interval(misaligned, trials);
    Ok(MisalignmentEstimate {
        p_hat,
        misaligned,
        trials,
        ci_low,
        ci_high,
        seed,
    })
}

/// Estimates a batch of scenarios. Each scenario's sub-seed is derived
/// from the master seed and the scenario's own fingerprint, so permuting
/// the batch permutes the outcomes and nothing else.
pub fn sweep(
    scenarios: &[Scenario],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<Result<MisalignmentEstimate>>> {
    if scenarios.is_empty() {
        return Err(SimError::InvalidArgument("empty scenario batch".into()));
    }
    Ok(scenarios
        .iter()
        .map(|sc| estimate_misalignment(sc, trials, derive_seed(master_seed, sc.fingerprint())))
        .collect())
}

/// Least-squares slope of `ln p_hat` against the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// `(budget, ln p_hat)` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Budgets dropped because their estimate had no misalignments.
    pub excluded: Vec<u64>,
}

/// Fits `ln p_hat = slope * budget + intercept` over a budget sweep.
/// Points with zero estimated probability carry no log information and
/// are excluded; at least two usable points must remain.
pub fn fit_exponent(points: &[(u64, MisalignmentEstimate)]) -> Result<SlopeFit> {
    let mut usable: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    let mut excluded = Vec::new();
    for (budget, est) in points {
        if est.misaligned == 0 {
            excluded.push(*budget);
        } else {
            usable.push((*budget as f64, est.p_hat.ln()));
        }
    }
    if usable.len() < 2 {
        return Err(SimError::InsufficientData(format!(
            "{} usable points after excluding zero estimates, need at least 2",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = usable.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &usable {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(SimError::InsufficientData(
            "all usable points share one budget".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (usable
        .iter()
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        points: usable,
        slope,
        intercept,
        residual,
        excluded,
    })
}

/// Two-sample Kolmogorov-Smirnov distance between empirical
/// distributions.
pub fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(SimError::InsufficientData(
            "KS distance needs two non-empty samples".into(),
        ));
    }
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        // Step past ties on both sides before comparing the CDFs.
        if a[i] < b[j] {
            i += 1;
        } else if b[j] < a[i] {
            j += 1;
        } else {
            let v = a[i];
            while i < n && a[i] == v {
                i += 1;
            }
            while j < m && b[j] == v {
                j += 1;
            }
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(d)
}
