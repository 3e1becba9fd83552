//! TOML experiment configuration, the experiment driver, and CSV output.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{exponent_adaptive_bound, exponent_exhaustive, gap_profile, hardness};
use crate::error::{Result, SimError};
use crate::montecarlo::{derive_seed, sweep, Algorithm, Scenario};

/// Largest accepted codebook; a dense codebook of this size already
/// needs hundreds of megabytes.
pub const MAX_L_BEAMS: usize = 4096;

/// Arrival angle specification: a fixed value or one drawn uniformly
/// from `[-pi/2, pi/2)` under a reproducible seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSpec {
    Fixed(f64),
    Random,
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub l_beams: usize,
    pub phi: PhiSpec,
    pub phi_seed: Option<u64>,
    pub alpha: Complex64,
    pub snr_db: Vec<f64>,
    pub budget: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: u64,
    pub master_seed: u64,
    pub output_path: PathBuf,
}

/// All configuration violations found in one pass, each naming the key
/// it belongs to.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration")?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn float_like(value: &toml::Value) -> Option<f64> {
    match value {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

/// Parses and validates a TOML experiment description.
///
/// `trials` and `master_seed` are required; everything else has a
/// default. All violations are collected before reporting, so one bad
/// file yields its full diagnosis in a single pass.
pub fn parse_config(text: &str) -> std::result::Result<ExperimentConfig, ConfigError> {
    let mut table: toml::Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            return Err(ConfigError {
                violations: vec![format!("toml syntax: {e}")],
            })
        }
    };
    let mut violations: Vec<String> = Vec::new();

    let l_beams = match table.remove("l_beams") {
        None => 64,
        Some(toml::Value::Integer(i)) if (2..=MAX_L_BEAMS as i64).contains(&i) => i as usize,
        Some(toml::Value::Integer(i)) => {
            violations.push(format!("l_beams: {i} outside 2..={MAX_L_BEAMS}"));
            64
        }
        Some(v) => {
            violations.push(format!("l_beams: expected integer, found {}", v.type_str()));
            64
        }
    };

    let phi = match table.remove("phi") {
        None => PhiSpec::Fixed(0.47),
        Some(toml::Value::String(s)) if s == "random" => PhiSpec::Random,
        Some(toml::Value::String(s)) => {
            violations.push(format!(
                "phi: unknown keyword {s:?}, expected \"random\" or an angle"
            ));
            PhiSpec::Fixed(0.47)
        }
        Some(v) => match float_like(&v) {
            Some(x) if x.is_finite() && x.abs() <= FRAC_PI_2 => PhiSpec::Fixed(x),
            Some(x) => {
                violations.push(format!("phi: {x} outside [-pi/2, pi/2]"));
                PhiSpec::Fixed(0.47)
            }
            None => {
                violations.push(format!(
                    "phi: expected float or \"random\", found {}",
                    v.type_str()
                ));
                PhiSpec::Fixed(0.47)
            }
        },
    };

    let phi_seed = match table.remove("phi_seed") {
        None => None,
        Some(toml::Value::Integer(i)) if i >= 0 => Some(i as u64),
        Some(toml::Value::Integer(i)) => {
            violations.push(format!("phi_seed: {i} must be nonnegative"));
            None
        }
        Some(v) => {
            violations.push(format!(
                "phi_seed: expected integer, found {}",
                v.type_str()
            ));
            None
        }
    };
    if phi_seed.is_some() && phi != PhiSpec::Random {
        violations.push("phi_seed: set, but phi is not \"random\"".into());
    }

    let alpha = match table.remove("alpha") {
        None => Complex64::new(1.0, 0.0),
        Some(toml::Value::Array(parts)) => {
            let comps: Vec<Option<f64>> = parts.iter().map(float_like).collect();
            match comps.as_slice() {
                [Some(re), Some(im)] if re.is_finite() && im.is_finite() => {
                    Complex64::new(*re, *im)
                }
                _ => {
                    violations.push(
                        "alpha: expected a float or a [re, im] pair of finite floats".into(),
                    );
                    Complex64::new(1.0, 0.0)
                }
            }
        }
        Some(v) => match float_like(&v) {
            Some(x) if x.is_finite() => Complex64::new(x, 0.0),
            _ => {
                violations.push(format!(
                    "alpha: expected float or [re, im], found {}",
                    v.type_str()
                ));
                Complex64::new(1.0, 0.0)
            }
        },
    };

    let snr_db = match table.remove("snr_db") {
        None => vec![-2.0],
        Some(toml::Value::Array(parts)) => {
            let mut out = Vec::with_capacity(parts.len());
            let mut ok = true;
            for (i, p) in parts.iter().enumerate() {
                match float_like(p) {
                    Some(x) if x.is_finite() => out.push(x),
                    _ => {
                        violations.push(format!("snr_db[{i}]: expected finite float"));
                        ok = false;
                    }
                }
            }
            if parts.is_empty() {
                violations.push("snr_db: must not be empty".into());
                ok = false;
            }
            if ok {
                out
            } else {
                vec![-2.0]
            }
        }
        Some(v) => {
            violations.push(format!(
                "snr_db: expected array of floats, found {}",
                v.type_str()
            ));
            vec![-2.0]
        }
    };

    let budget = match table.remove("budget") {
        None => vec![1280],
        Some(toml::Value::Array(parts)) => {
            let mut out = Vec::with_capacity(parts.len());
            let mut ok = true;
            for (i, p) in parts.iter().enumerate() {
                match p {
                    toml::Value::Integer(b) if *b >= 1 => out.push(*b as u64),
                    _ => {
                        violations.push(format!("budget[{i}]: expected positive integer"));
                        ok = false;
                    }
                }
            }
            if parts.is_empty() {
                violations.push("budget: must not be empty".into());
                ok = false;
            }
            if ok {
                out
            } else {
                vec![1280]
            }
        }
        Some(v) => {
            violations.push(format!(
                "budget: expected array of integers, found {}",
                v.type_str()
            ));
            vec![1280]
        }
    };

    let algorithms = match table.remove("algorithms") {
        None => vec![Algorithm::Exhaustive, Algorithm::Adaptive],
        Some(toml::Value::Array(parts)) => {
            let mut out = Vec::with_capacity(parts.len());
            let mut ok = true;
            for (i, p) in parts.iter().enumerate() {
                match p {
                    toml::Value::String(s) => match s.parse::<Algorithm>() {
                        Ok(a) => out.push(a),
                        Err(e) => {
                            violations.push(format!("algorithms[{i}]: {e}"));
                            ok = false;
                        }
                    },
                    _ => {
                        violations.push(format!("algorithms[{i}]: expected string"));
                        ok = false;
                    }
                }
            }
            if parts.is_empty() {
                violations.push("algorithms: must not be empty".into());
                ok = false;
            }
            if ok {
                out
            } else {
                vec![Algorithm::Exhaustive, Algorithm::Adaptive]
            }
        }
        Some(v) => {
            violations.push(format!(
                "algorithms: expected array of strings, found {}",
                v.type_str()
            ));
            vec![Algorithm::Exhaustive, Algorithm::Adaptive]
        }
    };

    let trials = match table.remove("trials") {
        None => {
            violations.push("trials: required key is missing".into());
            1
        }
        Some(toml::Value::Integer(i)) if i >= 1 => i as u64,
        Some(toml::Value::Integer(i)) => {
            violations.push(format!("trials: {i} must be at least 1"));
            1
        }
        Some(v) => {
            violations.push(format!("trials: expected integer, found {}", v.type_str()));
            1
        }
    };

    let master_seed = match table.remove("master_seed") {
        None => {
            violations.push("master_seed: required key is missing".into());
            0
        }
        Some(toml::Value::Integer(i)) if i >= 0 => i as u64,
        Some(toml::Value::Integer(i)) => {
            violations.push(format!("master_seed: {i} must be nonnegative"));
            0
        }
        Some(v) => {
            violations.push(format!(
                "master_seed: expected integer, found {}",
                v.type_str()
            ));
            0
        }
    };

    let output_path = match table.remove("output_path") {
        None => PathBuf::from("results.csv"),
        Some(toml::Value::String(s)) if !s.is_empty() => PathBuf::from(s),
        Some(toml::Value::String(_)) => {
            violations.push("output_path: must not be empty".into());
            PathBuf::from("results.csv")
        }
        Some(v) => {
            violations.push(format!(
                "output_path: expected string, found {}",
                v.type_str()
            ));
            PathBuf::from("results.csv")
        }
    };

    for key in table.keys() {
        violations.push(format!("unknown key `{key}`"));
    }

    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    Ok(ExperimentConfig {
        l_beams,
        phi,
        phi_seed,
        alpha,
        snr_db,
        budget,
        algorithms,
        trials,
        master_seed,
        output_path,
    })
}

const PHI_TAG: u64 = 0x5048_495f_414e_474c; // "PHI_ANGL"

impl ExperimentConfig {
    /// The concrete arrival angle of this experiment. A random angle is
    /// drawn from its own derived stream, so it does not perturb the
    /// trial noise and is identical on every run of the same config.
    pub fn resolve_phi(&self) -> f64 {
        match self.phi {
            PhiSpec::Fixed(x) => x,
            PhiSpec::Random => {
                let seed = self.phi_seed.unwrap_or(self.master_seed);
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, PHI_TAG));
                rng.random_range(-FRAC_PI_2..FRAC_PI_2)
            }
        }
    }

    /// Cartesian product of algorithms, SNRs and budgets in canonical
    /// order: algorithm name, then SNR, then budget, all ascending.
    pub fn scenarios(&self, phi: f64) -> Vec<Scenario> {
        let mut algorithms = self.algorithms.clone();
        algorithms.sort_by_key(Algorithm::name);
        algorithms.dedup();
        let mut snrs = self.snr_db.clone();
        snrs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut budgets = self.budget.clone();
        budgets.sort_unstable();

        let mut out = Vec::with_capacity(algorithms.len() * snrs.len() * budgets.len());
        for &algorithm in &algorithms {
            for &snr_db in &snrs {
                for &budget in &budgets {
                    out.push(Scenario {
                        l_beams: self.l_beams,
                        alpha: self.alpha,
                        phi,
                        snr_db,
                        budget,
                        algorithm,
                    });
                }
            }
        }
        out
    }
}

/// Theoretical budget exponent for a scenario: the exhaustive rate for
/// exhaustive training, the guaranteed bound for adaptive training.
pub fn theory_exponent(scenario: &Scenario) -> Result<f64> {
    let xi = scenario.normalized_gains()?;
    let profile = gap_profile(&xi)?;
    match scenario.algorithm {
        Algorithm::Exhaustive => exponent_exhaustive(&profile),
        Algorithm::Adaptive => Ok(exponent_adaptive_bound(&hardness(&profile)?)),
    }
}

/// One output row of an experiment. Failed scenarios keep their
/// identifying columns and carry the failure text in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub snr_db: f64,
    pub budget: u64,
    pub p_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: u64,
    pub theory_exponent: Option<f64>,
    pub error: Option<String>,
}

impl ResultRow {
    fn record(&self) -> [String; 9] {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.algorithm.to_string(),
            self.snr_db.to_string(),
            self.budget.to_string(),
            opt(self.p_hat),
            opt(self.ci_low),
            opt(self.ci_high),
            self.trials.to_string(),
            opt(self.theory_exponent),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Runs the full experiment described by a config: every scenario in
/// canonical order, estimated with seeds derived from the master seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let phi = config.resolve_phi();
    let scenarios = config.scenarios(phi);
    let outcomes = sweep(&scenarios, config.trials, config.master_seed)?;
    Ok(scenarios
        .iter()
        .zip(outcomes)
        .map(|(sc, outcome)| {
            let theory = theory_exponent(sc).ok();
            match outcome {
                Ok(est) => ResultRow {
                    algorithm: sc.algorithm,
                    snr_db: sc.snr_db,
                    budget: sc.budget,
                    p_hat: Some(est.p_hat),
                    ci_low: Some(est.ci_low),
                    ci_high: Some(est.ci_high),
                    trials: est.trials,
                    theory_exponent: theory,
                    error: None,
                },
                Err(e) => ResultRow {
                    algorithm: sc.algorithm,
                    snr_db: sc.snr_db,
                    budget: sc.budget,
                    p_hat: None,
                    ci_low: None,
                    ci_high: None,
                    trials: config.trials,
                    theory_exponent: theory,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

pub const CSV_HEADER: [&str; 9] = [
    "algorithm",
    "snr_db",
    "budget",
    "p_hat",
    "ci_low",
    "ci_high",
    "trials",
    "theory_exponent",
    "error",
];

/// Writes rows as CSV under the fixed header. Floats use the shortest
/// representation that parses back to the identical value.
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let io_err = |e: std::io::Error| SimError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(CSV_HEADER)
        .map_err(|e| io_err(std::io::Error::other(e)))?;
    for row in rows {
        w.write_record(row.record())
            .map_err(|e| io_err(std::io::Error::other(e)))?;
    }
    w.flush().map_err(io_err)
}
