//! Half-wavelength uniform linear array, single-path channel, and the
//! DFT receive codebook together with the per-beam effective gains it
//! induces.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, SimError};

fn check_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || !(-PI / 2.0..=PI / 2.0).contains(&phi) {
        return Err(SimError::InvalidArgument(format!(
            "angle of arrival {phi} outside [-pi/2, pi/2]"
        )));
    }
    Ok(())
}

/// Array response of an `n_antennas`-element half-wavelength ULA for a
/// planar wavefront arriving at angle `phi`.
///
/// Entry `k` is `exp(j * pi * k * sin(phi))` for `k = 0..n_antennas`.
#[derive(Debug, Clone)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    phi: f64,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Builds the ULA steering vector for arrival angle `phi` in
/// `[-pi/2, pi/2]` and a positive antenna count.
pub fn steering_vector(phi: f64, n_antennas: usize) -> Result<SteeringVector> {
    check_phi(phi)?;
    if n_antennas == 0 {
        return Err(SimError::InvalidArgument(
            "antenna count must be positive".into(),
        ));
    }
    let step = PI * phi.sin();
    let entries = (0..n_antennas)
        .map(|k| Complex64::from_polar(1.0, step * k as f64))
        .collect();
    Ok(SteeringVector { entries, phi })
}

/// Single-path narrowband channel: complex path gain `alpha` times the
/// conjugated steering vector at arrival angle `phi`.
#[derive(Debug, Clone)]
pub struct ChannelVector {
    entries: Vec<Complex64>,
    alpha: Complex64,
    phi: f64,
}

impl ChannelVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn channel_vector(alpha: Complex64, phi: f64, n_antennas: usize) -> Result<ChannelVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(SimError::InvalidArgument("path gain must be finite".into()));
    }
    let steering = steering_vector(phi, n_antennas)?;
    let entries = steering.entries().iter().map(|u| alpha * u.conj()).collect();
    Ok(ChannelVector { entries, alpha, phi })
}

/// A receive beamforming codebook: unit-norm, constant-modulus weight
/// vectors, one per beam, over a common antenna count.
#[derive(Debug, Clone)]
pub struct BeamCodebook {
    beams: Vec<Vec<Complex64>>,
    theta: Vec<f64>,
}

impl BeamCodebook {
    /// Wraps explicit beam vectors, checking that all beams share one
    /// antenna count, have unit norm, and have constant-modulus entries.
    pub fn from_beams(beams: Vec<Vec<Complex64>>, theta: Vec<f64>) -> Result<Self> {
        if beams.is_empty() {
            return Err(SimError::InvalidArgument("codebook has no beams".into()));
        }
        if theta.len() != beams.len() {
            return Err(SimError::InvalidArgument(format!(
                "{} grid parameters for {} beams",
                theta.len(),
                beams.len()
            )));
        }
        let n = beams[0].len();
        if n == 0 {
            return Err(SimError::InvalidArgument("beams have no entries".into()));
        }
        for (l, beam) in beams.iter().enumerate() {
            if beam.len() != n {
                return Err(SimError::InvalidArgument(format!(
                    "beam {l} has {} entries, expected {n}",
                    beam.len()
                )));
            }
            let norm2: f64 = beam.iter().map(|w| w.norm_sqr()).sum();
            if (norm2 - 1.0).abs() > 1e-9 {
                return Err(SimError::InvalidArgument(format!(
                    "beam {l} has squared norm {norm2}, expected 1"
                )));
            }
            let modulus = beam[0].norm();
            if beam.iter().any(|w| (w.norm() - modulus).abs() > 1e-9) {
                return Err(SimError::InvalidArgument(format!(
                    "beam {l} is not constant-modulus"
                )));
            }
        }
        Ok(BeamCodebook { beams, theta })
    }

    pub fn beams(&self) -> &[Vec<Complex64>] {
        &self.beams
    }

    pub fn beam(&self, l: usize) -> &[Complex64] {
        &self.beams[l]
    }

    /// Spatial-frequency grid point of each beam.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn n_antennas(&self) -> usize {
        self.beams[0].len()
    }
}

/// DFT codebook with as many beams as antennas.
///
/// Beam `l` (zero-based) has entries
/// `(1/sqrt(L)) * exp(-j * 2 * pi * k * theta_l)` with
/// `theta_l = -1/2 + l / L`, so the beams tile the spatial-frequency
/// interval `[-1/2, 1/2)` and form an orthonormal basis.
pub fn dft_codebook(l_beams: usize) -> Result<BeamCodebook> {
    if l_beams == 0 {
        return Err(SimError::InvalidArgument(
            "codebook size must be positive".into(),
        ));
    }
    let scale = 1.0 / (l_beams as f64).sqrt();
    let mut beams = Vec::with_capacity(l_beams);
    let mut theta = Vec::with_capacity(l_beams);
    for l in 0..l_beams {
        let theta_l = -0.5 + l as f64 / l_beams as f64;
        let beam = (0..l_beams)
            .map(|k| Complex64::from_polar(scale, -2.0 * PI * k as f64 * theta_l))
            .collect();
        beams.push(beam);
        theta.push(theta_l);
    }
    Ok(BeamCodebook { beams, theta })
}

/// Effective scalar channel seen through each beam: the inner product of
/// the beam weights with the channel vector.
pub fn effective_channels(
    codebook: &BeamCodebook,
    alpha: Complex64,
    phi: f64,
) -> Result<Vec<Complex64>> {
    let channel = channel_vector(alpha, phi, codebook.n_antennas())?;
    Ok(codebook
        .beams()
        .iter()
        .map(|beam| {
            beam.iter()
                .zip(channel.entries())
                .map(|(w, h)| w * h)
                .sum()
        })
        .collect())
}

/// Squared magnitudes of the effective channels, with the argmax
/// precomputed.
#[derive(Debug, Clone)]
pub struct GainProfile {
    gains: Vec<f64>,
    opt_index: usize,
}

impl GainProfile {
    /// Wraps an explicit gain vector. Entries must be finite and
    /// nonnegative; ties at the maximum resolve to the lowest index.
    pub fn from_gains(gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() {
            return Err(SimError::InvalidArgument("gain profile is empty".into()));
        }
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(SimError::InvalidArgument(
                "gains must be finite and nonnegative".into(),
            ));
        }
        let mut opt_index = 0;
        for (l, g) in gains.iter().enumerate() {
            if *g > gains[opt_index] {
                opt_index = l;
            }
        }
        Ok(GainProfile { gains, opt_index })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn opt_index(&self) -> usize {
        self.opt_index
    }

    pub fn opt_gain(&self) -> f64 {
        self.gains[self.opt_index]
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Per-beam effective gains `|f_l . h|^2` for the given codebook and
/// single-path channel.
pub fn effective_gains(codebook: &BeamCodebook, alpha: Complex64, phi: f64) -> Result<GainProfile> {
    let channels = effective_channels(codebook, alpha, phi)?;
    GainProfile::from_gains(channels.iter().map(|h| h.norm_sqr()).collect())
}
