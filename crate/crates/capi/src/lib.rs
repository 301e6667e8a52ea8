//! C ABI for the sampling-timing estimator core.
//!
//! The surface is deliberately small: create a system handle once, feed it
//! received frequency-domain frames (row-major, re/im interleaved), and get
//! joint (xi, eta) estimates back, plus the closed-form predictions and the
//! feasibility check. All functions return a [`PlcsyncStatus`] code; outputs
//! are written through pointers only on `Ok`.

use num_complex::Complex64;

use plcsync::analytics;
use plcsync::error::Error;
use plcsync::estimator::{practical_scheme, Scheme};
use plcsync::system::{
    build_index_sets, BlockGrid, GridDomain, IndexSets, Modulation, SystemConfig, TimingParams,
};

/// Status codes returned by every entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlcsyncStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    BadDimensions = 3,
    /// Estimation impossible on this input (all-null frame, Q < 2, ...).
    Degenerate = 4,
}

fn status_of(err: &Error) -> PlcsyncStatus {
    match err {
        Error::Config(_) => PlcsyncStatus::InvalidConfig,
        Error::Dimension(_) => PlcsyncStatus::BadDimensions,
        Error::Degenerate(_) => PlcsyncStatus::Degenerate,
        Error::Io(_) => PlcsyncStatus::InvalidConfig,
    }
}

/// Opaque system handle: validated OFDM parameters plus the derived
/// subcarrier index sets.
pub struct PlcsyncSystem {
    cfg: SystemConfig,
    sets: IndexSets,
}

/// One joint timing estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PlcsyncEstimate {
    /// Fractional sampling phase offset, in samples.
    pub xi_hat: f64,
    /// Sampling clock offset (dimensionless).
    pub eta_hat: f64,
    /// Blind linear SNR estimate used by the bias erasure.
    pub snr_hat: f64,
}

/// Closed-form performance prediction.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PlcsyncPrediction {
    pub var_xi: f64,
    pub var_eta: f64,
    pub bias_xi: f64,
    pub bias_eta: f64,
    pub mse_xi: f64,
    pub mse_eta: f64,
}

/// Creates a system handle. `n_fft` must be a power of two >= 4, `n_null`
/// even with n_null < n_fft - 2, `n_blocks` >= 2 for estimation.
///
/// # Safety
/// `out` must be a valid pointer. The returned handle must be released with
/// [`plcsync_system_free`].
#[no_mangle]
pub unsafe extern "C" fn plcsync_system_new(
    n_fft: u32,
    n_cp: u32,
    n_blocks: u32,
    n_null: u32,
    t_sam: f64,
    out: *mut *mut PlcsyncSystem,
) -> PlcsyncStatus {
    if out.is_null() {
        return PlcsyncStatus::NullPointer;
    }
    // The constellation never matters for estimation from a received grid.
    match SystemConfig::new(
        n_fft as usize,
        n_cp as usize,
        n_blocks as usize,
        n_null as usize,
        t_sam,
        Modulation::Psk(16),
        1.0,
    ) {
        Ok(cfg) => {
            let sets = build_index_sets(&cfg);
            unsafe { *out = Box::into_raw(Box::new(PlcsyncSystem { cfg, sets })) };
            PlcsyncStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a handle created by [`plcsync_system_new`]. A null pointer is
/// ignored.
///
/// # Safety
/// `sys` must come from [`plcsync_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn plcsync_system_free(sys: *mut PlcsyncSystem) {
    if !sys.is_null() {
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// Joint non-data-aided estimation from a received frequency-domain frame.
///
/// `grid` holds Q x N complex subcarrier values, row-major, interleaved as
/// re0, im0, re1, im1, ...; `len` must equal 2 * n_blocks * n_fft. `phi` is
/// the phase-unwrapping tolerance in [0, 2] (1.0 is the standard choice).
///
/// # Safety
/// `grid` must point to `len` readable doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plcsync_estimate(
    sys: *const PlcsyncSystem,
    grid: *const f64,
    len: usize,
    phi: f64,
    out: *mut PlcsyncEstimate,
) -> PlcsyncStatus {
    if sys.is_null() || grid.is_null() || out.is_null() {
        return PlcsyncStatus::NullPointer;
    }
    let sys = unsafe { &*sys };
    let expect = 2 * sys.cfg.n_blocks * sys.cfg.n_fft;
    if len != expect {
        return PlcsyncStatus::BadDimensions;
    }
    let raw = unsafe { std::slice::from_raw_parts(grid, len) };
    let mut block = BlockGrid::zeros(sys.cfg.n_blocks, sys.cfg.n_fft, GridDomain::Frequency);
    for q in 0..sys.cfg.n_blocks {
        let row = block.row_mut(q);
        for (k, dst) in row.iter_mut().enumerate() {
            let base = 2 * (q * sys.cfg.n_fft + k);
            *dst = Complex64::new(raw[base], raw[base + 1]);
        }
    }
    match practical_scheme(&block, &sys.cfg, &sys.sets, Scheme::Nda, phi, None) {
        Ok(est) => {
            unsafe {
                *out = PlcsyncEstimate {
                    xi_hat: est.xi_hat,
                    eta_hat: est.eta_hat,
                    snr_hat: est.snr_used.unwrap_or(f64::NAN),
                }
            };
            PlcsyncStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Checks the noiseless phase-unwrapping feasibility conditions; writes 1
/// into `inside` when (xi, eta) lies in the feasible hexagon.
///
/// # Safety
/// `sys` and `inside` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn plcsync_feasibility(
    sys: *const PlcsyncSystem,
    xi: f64,
    eta: f64,
    inside: *mut i32,
) -> PlcsyncStatus {
    if sys.is_null() || inside.is_null() {
        return PlcsyncStatus::NullPointer;
    }
    let sys = unsafe { &*sys };
    let timing = TimingParams { xi, eta, int_offset: 0 };
    let f = analytics::feasibility(&timing, &sys.cfg);
    unsafe { *inside = f.inside as i32 };
    PlcsyncStatus::Ok
}

/// Closed-form variance/bias/MSE prediction at a timing point and linear
/// SNR (per-subcarrier signal-to-noise power ratio).
///
/// # Safety
/// `sys` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn plcsync_predict(
    sys: *const PlcsyncSystem,
    xi: f64,
    eta: f64,
    snr_linear: f64,
    out: *mut PlcsyncPrediction,
) -> PlcsyncStatus {
    if sys.is_null() || out.is_null() {
        return PlcsyncStatus::NullPointer;
    }
    let sys = unsafe { &*sys };
    let timing = TimingParams { xi, eta, int_offset: 0 };
    match analytics::predict(&sys.cfg, &timing, snr_linear) {
        Ok(p) => {
            unsafe {
                *out = PlcsyncPrediction {
                    var_xi: p.var_xi,
                    var_eta: p.var_eta,
                    bias_xi: p.bias_xi,
                    bias_eta: p.bias_eta,
                    mse_xi: p.mse_xi,
                    mse_eta: p.mse_eta,
                }
            };
            PlcsyncStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Library version as a static, NUL-terminated string.
#[no_mangle]
pub extern "C" fn plcsync_version() -> *const std::os::raw::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const std::os::raw::c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use plcsync::channel::{apply_phase_model, ChannelRealization};
    use plcsync::ofdm::{assemble_block, map_symbols};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn make_handle() -> *mut PlcsyncSystem {
        let mut sys: *mut PlcsyncSystem = std::ptr::null_mut();
        let st = unsafe { plcsync_system_new(512, 64, 10, 64, 1e-8, &mut sys) };
        assert_eq!(st, PlcsyncStatus::Ok);
        sys
    }

    fn random_tx(seed: u64) -> (SystemConfig, BlockGrid) {
        let cfg = SystemConfig::new(512, 64, 10, 64, 1e-8, Modulation::Psk(16), 1.0).unwrap();
        let sets = build_index_sets(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..10)
            .map(|_| {
                let idx: Vec<u32> =
                    (0..sets.i2_plus.len()).map(|_| rng.random_range(0..16)).collect();
                assemble_block(&map_symbols(&idx, cfg.modulation).unwrap(), &sets).unwrap()
            })
            .collect();
        (cfg, BlockGrid::from_rows(rows, GridDomain::Frequency).unwrap())
    }

    fn interleave(grid: &BlockGrid) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * grid.n_rows() * grid.n_cols());
        for q in 0..grid.n_rows() {
            for &v in grid.row(q) {
                out.push(v.re);
                out.push(v.im);
            }
        }
        out
    }

    #[test]
    fn rejects_invalid_config_and_null() {
        let mut sys: *mut PlcsyncSystem = std::ptr::null_mut();
        let st = unsafe { plcsync_system_new(500, 64, 10, 64, 1e-8, &mut sys) };
        assert_eq!(st, PlcsyncStatus::InvalidConfig);
        let st = unsafe { plcsync_system_new(512, 64, 10, 64, 1e-8, std::ptr::null_mut()) };
        assert_eq!(st, PlcsyncStatus::NullPointer);
        unsafe { plcsync_system_free(std::ptr::null_mut()) };
    }

    #[test]
    fn estimates_noiseless_frame_through_the_abi() {
        let sys = make_handle();
        let (cfg, tx) = random_tx(9);
        let timing = TimingParams::offsets(0.1, 1e-5).unwrap();
        let rx =
            apply_phase_model(&tx, &ChannelRealization::unit(512), &timing, &cfg, false).unwrap();
        let raw = interleave(&rx);

        let mut est = PlcsyncEstimate {
            xi_hat: 0.0,
            eta_hat: 0.0,
            snr_hat: 0.0,
        };
        let st = unsafe { plcsync_estimate(sys, raw.as_ptr(), raw.len(), 1.0, &mut est) };
        assert_eq!(st, PlcsyncStatus::Ok);
        assert!((est.xi_hat - 0.1).abs() < 1e-9);
        assert!((est.eta_hat - 1e-5).abs() < 1e-12);

        // Wrong length is rejected.
        let st = unsafe { plcsync_estimate(sys, raw.as_ptr(), raw.len() - 2, 1.0, &mut est) };
        assert_eq!(st, PlcsyncStatus::BadDimensions);
        // All-zero frame is degenerate.
        let zeros = vec![0.0; raw.len()];
        let st = unsafe { plcsync_estimate(sys, zeros.as_ptr(), zeros.len(), 1.0, &mut est) };
        assert_eq!(st, PlcsyncStatus::Degenerate);

        unsafe { plcsync_system_free(sys) };
    }

    #[test]
    fn feasibility_and_prediction_through_the_abi() {
        let sys = make_handle();
        let mut inside = -1i32;
        let st = unsafe { plcsync_feasibility(sys, 0.1, 1e-5, &mut inside) };
        assert_eq!(st, PlcsyncStatus::Ok);
        assert_eq!(inside, 1);
        let st = unsafe { plcsync_feasibility(sys, 0.49, 2e-3, &mut inside) };
        assert_eq!(st, PlcsyncStatus::Ok);
        assert_eq!(inside, 0);

        let mut pred = PlcsyncPrediction {
            var_xi: 0.0,
            var_eta: 0.0,
            bias_xi: 0.0,
            bias_eta: 0.0,
            mse_xi: 0.0,
            mse_eta: 0.0,
        };
        let st = unsafe { plcsync_predict(sys, 0.1, 1e-5, 100.0, &mut pred) };
        assert_eq!(st, PlcsyncStatus::Ok);
        assert!(pred.var_eta > 0.0);
        assert!((pred.mse_xi - (pred.var_xi + pred.bias_xi * pred.bias_xi)).abs() < 1e-30);
        let st = unsafe { plcsync_predict(sys, 0.1, 1e-5, -1.0, &mut pred) };
        assert_eq!(st, PlcsyncStatus::InvalidConfig);
        unsafe { plcsync_system_free(sys) };
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = plcsync_version();
        let s = unsafe { std::ffi::CStr::from_ptr(v) };
        assert_eq!(s.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn estimate_tracks_injected_offsets_through_the_abi() {
        let sys = make_handle();
        let (cfg, tx) = random_tx(10);
        for &xi in &[-0.3, 0.0, 0.25] {
            let timing = TimingParams::offsets(xi, 5e-6).unwrap();
            let rx = apply_phase_model(&tx, &ChannelRealization::unit(512), &timing, &cfg, false)
                .unwrap();
            let raw = interleave(&rx);
            let mut est = PlcsyncEstimate {
                xi_hat: 0.0,
                eta_hat: 0.0,
                snr_hat: 0.0,
            };
            let st = unsafe { plcsync_estimate(sys, raw.as_ptr(), raw.len(), 1.0, &mut est) };
            assert_eq!(st, PlcsyncStatus::Ok);
            assert!((est.xi_hat - xi).abs() < 1e-9, "xi={xi}: {}", est.xi_hat);
            assert!((est.eta_hat - 5e-6).abs() < 1e-12);
        }
        unsafe { plcsync_system_free(sys) };
    }
}
