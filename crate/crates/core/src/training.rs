//! Beam training under a hard budget of pilot symbols: uniform
//! exhaustive measurement of every beam, and an adaptive allocation that
//! discards the weakest beam after each of `L - 1` phases.

use num_complex::Complex64;
use rand::Rng;

use crate::analysis::logbar;
use crate::error::{Result, SimError};
use crate::statistic::{BeamAccumulator, NoiseModel};

/// Cumulative per-beam symbol counts of the successive-rejects schedule.
///
/// `n()[k-1]` is the total number of symbols each still-active beam has
/// received by the end of phase `k`. Every discarded beam therefore
/// stops at `n()[k-1]` where `k` is its elimination phase, and the two
/// finalists both reach `n()[phases - 1]`.
#[derive(Debug, Clone)]
pub struct PhaseSchedule {
    n: Vec<u64>,
    l_beams: usize,
    budget: u64,
}

/// Builds the schedule for `l_beams >= 2` and a budget of at least one
/// symbol per beam:
/// `n_k = ceil((budget - L) / (logbar(L) * (L + 1 - k)))`.
pub fn phase_schedule(budget: u64, l_beams: usize) -> Result<PhaseSchedule> {
    if l_beams < 2 {
        return Err(SimError::InvalidArgument(format!(
            "schedule needs at least two beams, got {l_beams}"
        )));
    }
    if budget < l_beams as u64 {
        return Err(SimError::InsufficientBudget { budget, l_beams });
    }
    let l = l_beams as f64;
    let norm = logbar(l_beams)?;
    let headroom = (budget - l_beams as u64) as f64;
    let n: Vec<u64> = (1..l_beams)
        .map(|k| (headroom / (norm * (l + 1.0 - k as f64))).ceil() as u64)
        .collect();

    // Total consumption is sum(n_k) + n_last: each eliminated beam stops
    // at its phase's cumulative count and both finalists reach the end.
    let total: u64 = n.iter().sum::<u64>() + n.last().copied().unwrap();
    assert!(
        total <= budget,
        "schedule spends {total} of {budget} symbols"
    );

    Ok(PhaseSchedule { n, l_beams, budget })
}

impl PhaseSchedule {
    pub fn n(&self) -> &[u64] {
        &self.n
    }

    pub fn l_beams(&self) -> usize {
        self.l_beams
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn phases(&self) -> usize {
        self.n.len()
    }

    /// Symbols a full run consumes: every eliminated beam stops at its
    /// phase's cumulative count, both finalists reach the last.
    pub fn total_spent(&self) -> u64 {
        self.n.iter().sum::<u64>() + self.n.last().copied().unwrap()
    }
}

/// Measurement state for one training run: a matched-filter accumulator
/// per beam, a shared noise model, and a hard symbol budget.
#[derive(Debug)]
pub struct TrainingEnvironment<R: Rng> {
    accumulators: Vec<BeamAccumulator>,
    noise: NoiseModel,
    budget: u64,
    spent: u64,
    noise_enabled: bool,
    rng: R,
}

impl<R: Rng> TrainingEnvironment<R> {
    pub fn new(
        channels: &[Complex64],
        noise: NoiseModel,
        budget: u64,
        rng: R,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(SimError::InvalidArgument(
                "environment needs at least one beam".into(),
            ));
        }
        Ok(TrainingEnvironment {
            accumulators: channels.iter().map(|h| BeamAccumulator::new(*h)).collect(),
            noise,
            budget,
            spent: 0,
            noise_enabled: true,
            rng,
        })
    }

    /// Environment over real effective channels `sqrt(gain)` per beam.
    /// The statistic's law only depends on the gains, so this loses no
    /// generality.
    pub fn from_gains(gains: &[f64], noise: NoiseModel, budget: u64, rng: R) -> Result<Self> {
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(SimError::InvalidArgument(
                "gains must be finite and nonnegative".into(),
            ));
        }
        let channels: Vec<Complex64> = gains
            .iter()
            .map(|g| Complex64::new(g.sqrt(), 0.0))
            .collect();
        Self::new(&channels, noise, budget, rng)
    }

    /// Suppresses measurement noise; subsequent absorbs add only the
    /// deterministic signal term.
    pub fn disable_noise(&mut self) {
        self.noise_enabled = false;
    }

    pub fn l_beams(&self) -> usize {
        self.accumulators.len()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn symbols_spent(&self) -> u64 {
        self.spent
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn symbols_used(&self) -> Vec<u64> {
        self.accumulators.iter().map(|a| a.k_symbols()).collect()
    }

    fn absorb(&mut self, beam: usize, n_new: u64) {
        if self.noise_enabled {
            self.accumulators[beam].absorb_symbols(n_new, &self.noise, &mut self.rng);
        } else {
            self.accumulators[beam].absorb_symbols_noiseless(n_new, &self.noise);
        }
        self.spent += n_new;
        assert!(
            self.spent <= self.budget,
            "spent {} of {} symbols",
            self.spent,
            self.budget
        );
    }

    /// Statistic value per beam; `None` for beams that have absorbed no
    /// symbols yet.
    fn statistic_values(&self) -> Vec<Option<f64>> {
        self.accumulators
            .iter()
            .map(|a| a.statistic(&self.noise).ok().map(|t| t.value))
            .collect()
    }

    fn pick_uniform(&mut self, candidates: &[usize]) -> usize {
        debug_assert!(!candidates.is_empty());
        candidates[self.rng.random_range(0..candidates.len())]
    }
}

/// Outcome of one training run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingResult {
    /// Beam reported as optimal.
    pub selected: usize,
    /// Beams in elimination order; empty for exhaustive training.
    pub discard_order: Vec<usize>,
    /// Symbols each beam absorbed over the run.
    pub symbols_used: Vec<u64>,
}

fn require_fresh<R: Rng>(env: &TrainingEnvironment<R>) -> Result<()> {
    if env.symbols_spent() != 0 {
        return Err(SimError::InvalidState(
            "training environment was already used".into(),
        ));
    }
    if env.l_beams() < 2 {
        return Err(SimError::InvalidArgument(
            "training needs at least two beams".into(),
        ));
    }
    Ok(())
}

/// Uniform exhaustive training: `floor(budget / L)` symbols per beam,
/// then the beam with the largest statistic wins. Ties are broken
/// uniformly at random.
pub fn run_exhaustive<R: Rng>(env: &mut TrainingEnvironment<R>) -> Result<TrainingResult> {
    require_fresh(env)?;
    let l_beams = env.l_beams();
    if env.budget() < l_beams as u64 {
        return Err(SimError::InsufficientBudget {
            budget: env.budget(),
            l_beams,
        });
    }
    let per_beam = env.budget() / l_beams as u64;
    for beam in 0..l_beams {
        env.absorb(beam, per_beam);
    }
    let values = env.statistic_values();
    let best = values
        .iter()
        .map(|v| v.expect("every beam was measured"))
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..l_beams)
        .filter(|&l| values[l] == Some(best))
        .collect();
    let selected = env.pick_uniform(&tied);
    Ok(TrainingResult {
        selected,
        discard_order: Vec::new(),
        symbols_used: env.symbols_used(),
    })
}

/// Successive-rejects training: after each phase the active beam with
/// the smallest cumulative statistic is eliminated. Beams that have
/// received no symbols rank below all measured beams; ties are broken
/// uniformly at random.
pub fn run_adaptive<R: Rng>(
    env: &mut TrainingEnvironment<R>,
    schedule: &PhaseSchedule,
) -> Result<TrainingResult> {
    require_fresh(env)?;
    if schedule.l_beams() != env.l_beams() || schedule.budget() != env.budget() {
        return Err(SimError::InvalidArgument(format!(
            "schedule built for {} beams / budget {}, environment has {} / {}",
            schedule.l_beams(),
            schedule.budget(),
            env.l_beams(),
            env.budget()
        )));
    }

    let l_beams = env.l_beams();
    let mut active: Vec<usize> = (0..l_beams).collect();
    let mut discard_order = Vec::with_capacity(l_beams - 1);
    let mut prev = 0u64;
    for &n_k in schedule.n() {
        let add = n_k - prev;
        prev = n_k;
        for &beam in &active {
            env.absorb(beam, add);
        }
        let values = env.statistic_values();
        // None (no symbols absorbed yet) sorts below every measurement.
        let worst = active
            .iter()
            .map(|&l| values[l])
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .unwrap();
        let tied: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&l| values[l] == worst)
            .collect();
        let out = env.pick_uniform(&tied);
        active.retain(|&l| l != out);
        discard_order.push(out);
    }

    debug_assert_eq!(active.len(), 1);
    Ok(TrainingResult {
        selected: active[0],
        discard_order,
        symbols_used: env.symbols_used(),
    })
}
