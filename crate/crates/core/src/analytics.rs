//! Closed-form performance predictions for the joint estimator before bias
//! erasure: variances, biases, MSE, the block-count selection rule, and the
//! noiseless feasibility region of sequential phase unwrapping.
//!
//! All block sums are evaluated exactly (no large-Q asymptotics), so this
//! module doubles as an oracle for the least-squares error propagation.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::system::{block_phase, SystemConfig, TimingParams};

/// Predicted estimator statistics at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfPrediction {
    pub var_xi: f64,
    pub var_eta: f64,
    pub bias_xi: f64,
    pub bias_eta: f64,
    pub mse_xi: f64,
    pub mse_eta: f64,
}

/// First (phase-independent) variance terms; their doubles bound the full
/// variances over all timing offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceFirstTerms {
    pub var_xi_1: f64,
    pub var_eta_1: f64,
}

pub fn variance_first_terms(cfg: &SystemConfig, snr: f64) -> Result<VarianceFirstTerms> {
    if cfg.n_blocks < 2 {
        return Err(Error::degenerate("predictions need Q >= 2"));
    }
    if !(snr > 0.0) {
        return Err(Error::config("snr must be positive"));
    }
    let q = cfg.n_blocks as f64;
    let n = cfg.n_fft as f64;
    let g = cfg.g();
    let xi_ratio = cfg.pair_ratio();
    let var_xi_1 = (2.0 * g * g * (2.0 * q + 1.0) * (q + 1.0)
        + 2.0 * g * (q + 1.0) * (4.0 * q - 1.0)
        + (2.0 * q + 1.0) * (2.0 * q - 1.0))
        / (4.0 * PI * PI * n * (1.0 + g).powi(2) * q * (q * q - 1.0) * xi_ratio * snr);
    let var_eta_1 =
        3.0 / (PI * PI * n.powi(3) * (1.0 + g).powi(2) * q * (q * q - 1.0) * xi_ratio * snr);
    Ok(VarianceFirstTerms { var_xi_1, var_eta_1 })
}

/// Evaluates the closed-form variance/bias/MSE expressions at the true
/// timing offsets and SNR.
pub fn predict(cfg: &SystemConfig, timing: &TimingParams, snr: f64) -> Result<PerfPrediction> {
    let first = variance_first_terms(cfg, snr)?;
    let q_blocks = cfg.n_blocks;
    let q = q_blocks as f64;
    let n = cfg.n_fft as f64;
    let g = cfg.g();
    let xi_ratio = cfg.pair_ratio();

    let mut var_xi_2 = 0.0;
    let mut var_eta_2 = 0.0;
    let mut bias_xi = 0.0;
    let mut bias_eta = 0.0;
    for qi in 0..q_blocks {
        let theta = block_phase(qi, timing, cfg);
        let (sin_t, cos_t) = theta.sin_cos();
        let qf = qi as f64;

        let bracket_xi = (q - 1.0) * (1.0 + 4.0 * g + 4.0 * q * (1.0 + g))
            - 6.0 * qf * (g + q * (1.0 + g));
        var_xi_2 += cos_t * bracket_xi * bracket_xi;

        var_eta_2 += 9.0 * cos_t * (2.0 * qf - q + 1.0).powi(2);

        let ratio = sin_t / (cos_t + snr);
        bias_xi -= ratio
            * ((q - 1.0) * (3.0 + 6.0 * g + 2.0 * (1.0 + g) * (2.0 * q - 1.0))
                - 6.0 * qf * (1.0 + 2.0 * g + (1.0 + g) * (q - 1.0)))
            / (2.0 * PI * (1.0 + g) * q * (q + 1.0) * (q - 1.0));
        bias_eta += ratio * (3.0 * (q - 1.0) - 6.0 * qf)
            / (PI * (1.0 + g) * n * q * (q + 1.0) * (q - 1.0));
    }
    let var_xi = first.var_xi_1
        - var_xi_2
            / (4.0 * PI * PI * (1.0 + g).powi(2) * n * q * q * (q + 1.0).powi(2) * (q - 1.0).powi(2)
                * xi_ratio
                * snr);
    let var_eta = first.var_eta_1
        - var_eta_2
            / (PI * PI * (1.0 + g).powi(2) * n.powi(3) * q * q * (q + 1.0).powi(2)
                * (q - 1.0).powi(2)
                * xi_ratio
                * snr);
    Ok(PerfPrediction {
        var_xi,
        var_eta,
        bias_xi,
        bias_eta,
        mse_xi: var_xi + bias_xi * bias_xi,
        mse_eta: var_eta + bias_eta * bias_eta,
    })
}

/// Smallest block count meeting both MSE targets (assuming perfect bias
/// erasure), from the doubled first-term bounds; never below 2.
pub fn choose_q(
    cfg: &SystemConfig,
    mse_xi_target: f64,
    mse_eta_target: f64,
    snr: f64,
    omega_gap: f64,
) -> Result<usize> {
    if !(mse_xi_target > 0.0 && mse_eta_target > 0.0) {
        return Err(Error::config("MSE targets must be positive"));
    }
    if !(snr + omega_gap > 0.0) {
        return Err(Error::config("snr + omega_gap must be positive"));
    }
    let n = cfg.n_fft as f64;
    let g = cfg.g();
    let xi_ratio = cfg.pair_ratio();
    let q_xi = 2.0 / n / (mse_xi_target * PI * PI * xi_ratio * (snr + omega_gap));
    let q_eta = 6.0f64.cbrt() / n
        * (mse_eta_target * PI * PI * (1.0 + g).powi(2) * xi_ratio * (snr + omega_gap))
            .powf(-1.0 / 3.0);
    Ok((q_xi.max(q_eta).ceil() as usize).max(2))
}

/// Feasibility verdict for sequential unwrapping in the noiseless case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub inside: bool,
    /// 2 pi xi + pi eta N + 2 pi N_g eta, bounded by +-pi (C1).
    pub c1_value: f64,
    /// 2 pi N_s eta, bounded by +-2 pi (C2).
    pub c2_value: f64,
    /// Hexagon vertices in caption order A1..A6.
    pub vertices: [[f64; 2]; 6],
}

/// Vertices of the feasibility hexagon for a config, in order A1..A6.
pub fn hexagon_vertices(cfg: &SystemConfig) -> [[f64; 2]; 6] {
    let h = 1.0 / cfg.n_s() as f64;
    let gp = cfg.n_cp as f64 / (2.0 * cfg.n_s() as f64);
    [
        [-0.5, h],
        [-gp, h],
        [0.5, 0.0],
        [0.5, -h],
        [gp, -h],
        [-0.5, 0.0],
    ]
}

/// Checks the two noiseless unwrapping conditions:
/// C1: |2 pi xi + pi eta N + 2 pi N_g eta| <= pi,
/// C2: |2 pi N_s eta| <= 2 pi.
pub fn feasibility(timing: &TimingParams, cfg: &SystemConfig) -> Feasibility {
    let c1_value = TAU * timing.xi
        + PI * timing.eta * cfg.n_fft as f64
        + TAU * cfg.n_cp as f64 * timing.eta;
    let c2_value = TAU * cfg.n_s() as f64 * timing.eta;
    Feasibility {
        inside: c1_value.abs() <= PI && c2_value.abs() <= TAU,
        c1_value,
        c2_value,
        vertices: hexagon_vertices(cfg),
    }
}

/// Shoelace area of the hexagon.
pub fn hexagon_area(cfg: &SystemConfig) -> f64 {
    let v = hexagon_vertices(cfg);
    let mut acc = 0.0;
    for i in 0..6 {
        let j = (i + 1) % 6;
        acc += v[i][0] * v[j][1] - v[j][0] * v[i][1];
    }
    acc.abs() / 2.0
}
