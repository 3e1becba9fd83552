//! C ABI for the beamtrain simulation library.
//!
//! Every fallible call returns a [`BtStatus`] and writes its result
//! through an out pointer. Heap-allocated results are opaque handles
//! released with their matching `_free` function. No function ever
//! unwinds across the boundary; a Rust panic is reported as
//! [`BtStatus::BtPanic`].

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use beamtrain::analysis::{exponent_adaptive_bound, exponent_exhaustive, gap_profile, hardness};
use beamtrain::array_channel::{dft_codebook, effective_gains};
use beamtrain::montecarlo::{estimate_misalignment, Algorithm, Scenario};
use beamtrain::num_complex::Complex64;
use beamtrain::statistic::normalized_gain;
use beamtrain::training::phase_schedule;
use beamtrain::SimError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BtStatus {
    BtOk = 0,
    BtNullPointer = 1,
    BtInvalidArgument = 2,
    BtDegenerate = 3,
    BtInsufficientBudget = 4,
    BtInvalidState = 5,
    BtInsufficientData = 6,
    BtIo = 7,
    BtPanic = 8,
}

fn status_of(e: &SimError) -> BtStatus {
    match e {
        SimError::InvalidArgument(_) => BtStatus::BtInvalidArgument,
        SimError::Degenerate => BtStatus::BtDegenerate,
        SimError::InsufficientBudget { .. } => BtStatus::BtInsufficientBudget,
        SimError::InvalidState(_) => BtStatus::BtInvalidState,
        SimError::InsufficientData(_) => BtStatus::BtInsufficientData,
        SimError::Io { .. } => BtStatus::BtIo,
    }
}

fn catching(f: impl FnOnce() -> BtStatus) -> BtStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(BtStatus::BtPanic)
}

/// Training policy selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BtAlgorithm {
    BtExhaustive = 0,
    BtAdaptive = 1,
}

/// Per-beam effective gains of a codebook/channel pair.
pub struct BtGainProfile {
    gains: Vec<f64>,
    opt_index: usize,
}

/// Gap structure and error exponents of one operating point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtExponents {
    /// Index of the strongest beam.
    pub opt_index: usize,
    /// Index of its strongest competitor.
    pub second_best: usize,
    /// Square-root gap between them.
    pub delta_min: f64,
    /// Worst-case rank/gap trade-off `max_l l * delta_(l)^-2`.
    pub hardness: f64,
    /// Rank attaining the hardness maximum (1-based).
    pub hard_rank: usize,
    /// Schedule normalizer `1/2 + sum_{i=2..L} 1/i`.
    pub logbar: f64,
    /// Budget exponent of uniform exhaustive training.
    pub exhaustive: f64,
    /// Guaranteed budget exponent of the adaptive allocation.
    pub adaptive_bound: f64,
}

/// Monte Carlo misalignment estimate with a 95% Wilson interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub misaligned: u64,
    pub trials: u64,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn bt_status_name(status: BtStatus) -> *const c_char {
    let name: &'static str = match status {
        BtStatus::BtOk => "ok\0",
        BtStatus::BtNullPointer => "null pointer\0",
        BtStatus::BtInvalidArgument => "invalid argument\0",
        BtStatus::BtDegenerate => "degenerate gain profile\0",
        BtStatus::BtInsufficientBudget => "insufficient budget\0",
        BtStatus::BtInvalidState => "invalid state\0",
        BtStatus::BtInsufficientData => "insufficient data\0",
        BtStatus::BtIo => "i/o error\0",
        BtStatus::BtPanic => "internal panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Computes the per-beam gain profile of an `l_beams` DFT codebook for
/// a single-path channel with complex gain `alpha_re + i alpha_im`
/// arriving at `phi` radians. On success `*out` owns the new handle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bt_gain_profile_new(
    l_beams: usize,
    alpha_re: f64,
    alpha_im: f64,
    phi: f64,
    out: *mut *mut BtGainProfile,
) -> BtStatus {
    if out.is_null() {
        return BtStatus::BtNullPointer;
    }
    catching(|| {
        let cb = match dft_codebook(l_beams) {
            Ok(cb) => cb,
            Err(e) => return status_of(&e),
        };
        match effective_gains(&cb, Complex64::new(alpha_re, alpha_im), phi) {
            Ok(p) => {
                let handle = Box::new(BtGainProfile {
                    gains: p.gains().to_vec(),
                    opt_index: p.opt_index(),
                });
                unsafe { *out = Box::into_raw(handle) };
                BtStatus::BtOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Number of beams in a gain profile; 0 for a null handle.
///
/// # Safety
/// `profile` must be null or a live handle from [`bt_gain_profile_new`].
#[no_mangle]
pub unsafe extern "C" fn bt_gain_profile_len(profile: *const BtGainProfile) -> usize {
    if profile.is_null() {
        return 0;
    }
    unsafe { (*profile).gains.len() }
}

/// Index of the strongest beam.
///
/// # Safety
/// `profile` must be null or a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bt_gain_profile_opt_index(
    profile: *const BtGainProfile,
    out: *mut usize,
) -> BtStatus {
    if profile.is_null() || out.is_null() {
        return BtStatus::BtNullPointer;
    }
    unsafe { *out = (*profile).opt_index };
    BtStatus::BtOk
}

/// Copies all per-beam gains into `buf`, which must hold exactly
/// `bt_gain_profile_len` values.
///
/// # Safety
/// `profile` must be null or a live handle; `buf` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bt_gain_profile_gains(
    profile: *const BtGainProfile,
    buf: *mut f64,
    len: usize,
) -> BtStatus {
    if profile.is_null() || buf.is_null() {
        return BtStatus::BtNullPointer;
    }
    let gains = unsafe { &(*profile).gains };
    if len != gains.len() {
        return BtStatus::BtInvalidArgument;
    }
    unsafe { std::ptr::copy_nonoverlapping(gains.as_ptr(), buf, len) };
    BtStatus::BtOk
}

/// Releases a gain profile handle. Null is a no-op.
///
/// # Safety
/// `profile` must be null or a live handle, and must not be used again.
#[no_mangle]
pub unsafe extern "C" fn bt_gain_profile_free(profile: *mut BtGainProfile) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Gap structure and theoretical exponents for one operating point.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bt_exponents(
    l_beams: usize,
    alpha_re: f64,
    alpha_im: f64,
    phi: f64,
    snr_db: f64,
    out: *mut BtExponents,
) -> BtStatus {
    if out.is_null() {
        return BtStatus::BtNullPointer;
    }
    catching(|| {
        let result = (|| {
            let cb = dft_codebook(l_beams)?;
            let gains = effective_gains(&cb, Complex64::new(alpha_re, alpha_im), phi)?;
            let noise = beamtrain::statistic::NoiseModel::from_snr_db(snr_db)?;
            let xi: Vec<f64> = gains
                .gains()
                .iter()
                .map(|g| normalized_gain(&noise, *g))
                .collect();
            let profile = gap_profile(&xi)?;
            let summary = hardness(&profile)?;
            Ok::<BtExponents, SimError>(BtExponents {
                opt_index: profile.opt_index(),
                second_best: profile.second_best(),
                delta_min: profile.delta_min(),
                hardness: summary.h_value,
                hard_rank: summary.l_h,
                logbar: summary.logbar,
                exhaustive: exponent_exhaustive(&profile)?,
                adaptive_bound: exponent_adaptive_bound(&summary),
            })
        })();
        match result {
            Ok(e) => {
                unsafe { *out = e };
                BtStatus::BtOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Cumulative per-phase symbol counts of the adaptive schedule.
/// `out_counts` must hold exactly `l_beams - 1` values.
///
/// # Safety
/// `out_counts` must point to `len` writable 64-bit integers.
#[no_mangle]
pub unsafe extern "C" fn bt_phase_schedule(
    budget: u64,
    l_beams: usize,
    out_counts: *mut u64,
    len: usize,
) -> BtStatus {
    if out_counts.is_null() {
        return BtStatus::BtNullPointer;
    }
    catching(|| match phase_schedule(budget, l_beams) {
        Ok(s) => {
            if len != s.n().len() {
                return BtStatus::BtInvalidArgument;
            }
            unsafe { std::ptr::copy_nonoverlapping(s.n().as_ptr(), out_counts, len) };
            BtStatus::BtOk
        }
        Err(e) => status_of(&e),
    })
}

/// Monte Carlo misalignment estimate of one operating point. Identical
/// `seed` always reproduces the identical estimate.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bt_estimate_misalignment(
    l_beams: usize,
    alpha_re: f64,
    alpha_im: f64,
    phi: f64,
    snr_db: f64,
    budget: u64,
    algorithm: BtAlgorithm,
    trials: u64,
    seed: u64,
    out: *mut BtEstimate,
) -> BtStatus {
    if out.is_null() {
        return BtStatus::BtNullPointer;
    }
    catching(|| {
        let scenario = Scenario {
            l_beams,
            alpha: Complex64::new(alpha_re, alpha_im),
            phi,
            snr_db,
            budget,
            algorithm: match algorithm {
                BtAlgorithm::BtExhaustive => Algorithm::Exhaustive,
                BtAlgorithm::BtAdaptive => Algorithm::Adaptive,
            },
        };
        match estimate_misalignment(&scenario, trials, seed) {
            Ok(e) => {
                unsafe {
                    *out = BtEstimate {
                        p_hat: e.p_hat,
                        ci_low: e.ci_low,
                        ci_high: e.ci_high,
                        misaligned: e.misaligned,
                        trials: e.trials,
                    }
                };
                BtStatus::BtOk
            }
            Err(e) => status_of(&e),
        }
    })
}
