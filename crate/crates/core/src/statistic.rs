//! Energy test statistic for pilot-based beam measurements.
//!
//! With constant-power pilots, the matched-filter output for a beam after
//! `k` symbols is a complex Gaussian whose mean grows linearly in `k`, so
//! the normalized statistic `2|y s*|^2 / (sigma2 ||s||^2)` follows a
//! noncentral chi-square law with two degrees of freedom and
//! noncentrality `2 k p_t g / sigma2`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SimError};

/// Noise variance and per-symbol transmit power for a measurement run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
    p_t: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64, p_t: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(SimError::InvalidArgument(format!(
                "noise variance {sigma2} must be positive"
            )));
        }
        if !p_t.is_finite() || p_t <= 0.0 {
            return Err(SimError::InvalidArgument(format!(
                "transmit power {p_t} must be positive"
            )));
        }
        Ok(NoiseModel { sigma2, p_t })
    }

    /// Unit noise variance with transmit power set so that `p_t / sigma2`
    /// equals the given SNR in dB.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(SimError::InvalidArgument(format!(
                "snr {snr_db} dB must be finite"
            )));
        }
        NoiseModel::new(1.0, 10f64.powf(snr_db / 10.0))
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn p_t(&self) -> f64 {
        self.p_t
    }
}

/// Noncentrality parameter `2 k p_t g / sigma2` of the statistic after
/// `k_symbols` pilots on a beam with effective gain `gain`.
pub fn noncentrality(k_symbols: u64, noise: &NoiseModel, gain: f64) -> f64 {
    debug_assert!(gain >= 0.0);
    2.0 * k_symbols as f64 * noise.p_t * gain / noise.sigma2
}

/// Per-symbol SNR contribution `2 p_t g / sigma2` of a beam, i.e. the
/// noncentrality accrued by each pilot.
pub fn normalized_gain(noise: &NoiseModel, gain: f64) -> f64 {
    debug_assert!(gain >= 0.0);
    2.0 * noise.p_t * gain / noise.sigma2
}

/// Draws from a noncentral chi-square law with two degrees of freedom:
/// `(G1 + sqrt(lambda))^2 + G2^2` with independent standard normals.
pub fn sample_ncx2_2dof<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(SimError::InvalidArgument(format!(
            "noncentrality {lambda} must be nonnegative"
        )));
    }
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    let shifted = g1 + lambda.sqrt();
    Ok(shifted * shifted + g2 * g2)
}

/// Value of the energy statistic together with the symbol count that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestStatistic {
    pub value: f64,
    pub k_symbols: u64,
}

/// Running matched-filter state for one beam.
///
/// Symbols can be absorbed in any grouping: by linearity the accumulated
/// output after `k` symbols of power `p_t` is
/// `h_eff * k * p_t + CN(0, sigma2 * k * p_t)`, so absorbing a batch
/// draws one aggregated Gaussian rather than looping per symbol.
#[derive(Debug, Clone)]
pub struct BeamAccumulator {
    h_eff: Complex64,
    m: Complex64,
    k_symbols: u64,
}

impl BeamAccumulator {
    pub fn new(h_eff: Complex64) -> Self {
        BeamAccumulator {
            h_eff,
            m: Complex64::new(0.0, 0.0),
            k_symbols: 0,
        }
    }

    pub fn h_eff(&self) -> Complex64 {
        self.h_eff
    }

    pub fn k_symbols(&self) -> u64 {
        self.k_symbols
    }

    /// Absorbs `n_new` pilot symbols with measurement noise.
    pub fn absorb_symbols<R: Rng + ?Sized>(&mut self, n_new: u64, noise: &NoiseModel, rng: &mut R) {
        if n_new == 0 {
            return;
        }
        let energy = n_new as f64 * noise.p_t;
        self.m += self.h_eff * energy;
        // Aggregated noise is CN(0, sigma2 * energy): variance split
        // evenly across the real and imaginary parts.
        let std = (noise.sigma2 * energy / 2.0).sqrt();
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        self.m += Complex64::new(std * g1, std * g2);
        self.k_symbols += n_new;
    }

    /// Absorbs `n_new` pilot symbols with the noise draw suppressed,
    /// leaving only the deterministic signal term.
    pub fn absorb_symbols_noiseless(&mut self, n_new: u64, noise: &NoiseModel) {
        if n_new == 0 {
            return;
        }
        self.m += self.h_eff * (n_new as f64 * noise.p_t);
        self.k_symbols += n_new;
    }

    /// Normalized energy statistic for the symbols absorbed so far.
    pub fn statistic(&self, noise: &NoiseModel) -> Result<TestStatistic> {
        if self.k_symbols == 0 {
            return Err(SimError::InvalidState(
                "statistic requested before any symbol was absorbed".into(),
            ));
        }
        let s_norm2 = self.k_symbols as f64 * noise.p_t;
        let value = 2.0 * self.m.norm_sqr() / (noise.sigma2 * s_norm2);
        Ok(TestStatistic {
            value,
            k_symbols: self.k_symbols,
        })
    }
}
