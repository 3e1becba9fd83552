//! Gap structure of a normalized gain profile and the large-deviation
//! error exponents it implies for uniform and adaptive training.

use crate::error::{Result, SimError};

/// Square-root gaps of a normalized gain profile.
///
/// `xi` holds the per-symbol noncentrality of each beam. Gaps are
/// measured on the square-root scale: `delta[l] = sqrt(xi_opt) -
/// sqrt(xi_l)`.
#[derive(Debug, Clone)]
pub struct GapProfile {
    xi: Vec<f64>,
    opt_index: usize,
    delta: Vec<f64>,
    order: Vec<usize>,
    delta_min: f64,
    second_best: usize,
}

/// Computes the gap structure of `xi` (at least two beams, all entries
/// finite and nonnegative). Ties at the maximum are allowed here and
/// reported through [`GapProfile::is_degenerate`].
pub fn gap_profile(xi: &[f64]) -> Result<GapProfile> {
    if xi.len() < 2 {
        return Err(SimError::InvalidArgument(format!(
            "gap profile needs at least two beams, got {}",
            xi.len()
        )));
    }
    if xi.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(SimError::InvalidArgument(
            "normalized gains must be finite and nonnegative".into(),
        ));
    }
    let mut opt_index = 0;
    for (l, x) in xi.iter().enumerate() {
        if *x > xi[opt_index] {
            opt_index = l;
        }
    }
    let s_opt = xi[opt_index].sqrt();
    let delta: Vec<f64> = xi.iter().map(|x| s_opt - x.sqrt()).collect();

    let mut order: Vec<usize> = (0..xi.len()).collect();
    order.sort_by(|&a, &b| xi[b].partial_cmp(&xi[a]).unwrap().then(a.cmp(&b)));

    let second_best = order[1];
    let delta_min = delta[second_best];
    Ok(GapProfile {
        xi: xi.to_vec(),
        opt_index,
        delta,
        order,
        delta_min,
        second_best,
    })
}

impl GapProfile {
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn opt_index(&self) -> usize {
        self.opt_index
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Beam indices sorted by descending normalized gain, ties by
    /// ascending index.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    /// Index of the strongest competitor of the optimum.
    pub fn second_best(&self) -> usize {
        self.second_best
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// True when the maximal normalized gain is tied, which leaves every
    /// gap-based quantity undefined.
    pub fn is_degenerate(&self) -> bool {
        self.delta_min == 0.0
    }

    /// Gaps by rank: entry `l-1` is the gap of the `l`-th best beam,
    /// with the rank-1 entry set equal to the rank-2 gap.
    pub fn ranked_gaps(&self) -> Vec<f64> {
        let mut ranked: Vec<f64> = self.order.iter().map(|&l| self.delta[l]).collect();
        ranked[0] = ranked[1];
        ranked
    }
}

/// `1/2 + sum_{i=2}^{l} 1/i`, the normalizer of the successive-rejects
/// phase schedule. Requires at least two beams.
pub fn logbar(l_beams: usize) -> Result<f64> {
    if l_beams < 2 {
        return Err(SimError::InvalidArgument(format!(
            "schedule normalizer needs at least two beams, got {l_beams}"
        )));
    }
    let mut acc = 0.5;
    for i in 2..=l_beams {
        acc += 1.0 / i as f64;
    }
    Ok(acc)
}

/// Worst-case rank/gap trade-off of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardnessSummary {
    /// `max_l l * delta_(l)^-2` over ranks `l = 1..=L`.
    pub h_value: f64,
    /// Smallest rank attaining the maximum (1-based).
    pub l_h: usize,
    /// Schedule normalizer for the same number of beams.
    pub logbar: f64,
    pub l_beams: usize,
}

/// Computes the hardness summary of a non-degenerate profile.
pub fn hardness(profile: &GapProfile) -> Result<HardnessSummary> {
    if profile.is_degenerate() {
        return Err(SimError::Degenerate);
    }
    let ranked = profile.ranked_gaps();
    let mut h_value = f64::NEG_INFINITY;
    let mut l_h = 1;
    for (i, d) in ranked.iter().enumerate() {
        let term = (i + 1) as f64 / (d * d);
        if term > h_value {
            h_value = term;
            l_h = i + 1;
        }
    }
    Ok(HardnessSummary {
        h_value,
        l_h,
        logbar: logbar(profile.len())?,
        l_beams: profile.len(),
    })
}

/// Exponent of the misalignment probability of uniform exhaustive
/// training in the total budget: `-delta_min^2 / (4 L)`.
pub fn exponent_exhaustive(profile: &GapProfile) -> Result<f64> {
    if profile.is_degenerate() {
        return Err(SimError::Degenerate);
    }
    let d = profile.delta_min();
    Ok(-d * d / (4.0 * profile.len() as f64))
}

/// Exponent, per symbol on each side, of the probability that the weaker
/// of two beams wins a head-to-head comparison: `-delta^2 / 4`.
pub fn exponent_pairwise(delta: f64) -> Result<f64> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(SimError::InvalidArgument(format!(
            "pairwise gap {delta} must be positive"
        )));
    }
    Ok(-delta * delta / 4.0)
}

/// Exponent guaranteed by the successive-rejects allocation:
/// `-1 / (4 * logbar(L) * H)`.
pub fn exponent_adaptive_bound(summary: &HardnessSummary) -> f64 {
    -1.0 / (4.0 * summary.logbar * summary.h_value)
}
