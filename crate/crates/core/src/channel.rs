//! Multipath channel generation and application of sampling offsets.
//!
//! Two receive models are provided. `apply_phase_model` rotates each
//! subcarrier by the closed-form phase (no ICI); `apply_resample_model`
//! evaluates the analytic transmit waveform at the receiver's offset sample
//! instants and therefore reproduces ICI exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::ofdm::TimeSignal;
use crate::system::{block_phase, BlockGrid, GridDomain, SystemConfig, TimingParams};

/// How a tap set is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelProfile {
    /// Single real gain +-sqrt(sigma_h2): zero mean, variance sigma_h2, and
    /// a deterministic |H| so per-trial SNR is well defined.
    Flat { sigma_h2: f64 },
    /// 1 + Poisson(rate) real Gaussian taps at consecutive integer delays
    /// with an exponentially decaying power profile, truncated to N_g/2
    /// taps and normalized so the expected total tap power is sigma_h2.
    Multipath {
        rate: f64,
        decay: f64,
        sigma_h2: f64,
    },
}

/// Which receive model a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    PhaseModel,
    Resample,
}

/// One channel draw: real taps at integer sample delays and the derived CTF.
/// The channel is quasi-static across the blocks of one frame.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    taps: Vec<(f64, usize)>,
    ctf: Vec<Complex64>,
}

impl ChannelRealization {
    /// Builds a realization from (gain, delay-in-samples) taps.
    pub fn from_taps(taps: Vec<(f64, usize)>, n_fft: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::config("channel needs at least one tap"));
        }
        if taps.iter().any(|&(_, d)| d >= n_fft) {
            return Err(Error::config("tap delay must be below n_fft"));
        }
        let ctf = (0..n_fft)
            .map(|k| {
                taps.iter()
                    .map(|&(h, d)| {
                        Complex64::from_polar(h, -2.0 * PI * (k * d) as f64 / n_fft as f64)
                    })
                    .sum()
            })
            .collect();
        Ok(ChannelRealization { taps, ctf })
    }

    /// Unit flat channel (h = 1 at delay 0).
    pub fn unit(n_fft: usize) -> Self {
        ChannelRealization::from_taps(vec![(1.0, 0)], n_fft).unwrap()
    }

    pub fn taps(&self) -> &[(f64, usize)] {
        &self.taps
    }

    /// CTF H_k = sum_l h_l exp(-j 2 pi k d_l / N); identical for every block.
    pub fn ctf(&self) -> &[Complex64] {
        &self.ctf
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }

    /// CTF replicated over `q_blocks` rows (quasi-static frame).
    pub fn ctf_grid(&self, q_blocks: usize) -> BlockGrid {
        let mut grid = BlockGrid::zeros(q_blocks, self.ctf.len(), GridDomain::Frequency);
        for q in 0..q_blocks {
            grid.row_mut(q).copy_from_slice(&self.ctf);
        }
        grid
    }
}

/// Draws one channel realization for the frame.
pub fn generate_channel<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SystemConfig,
    profile: ChannelProfile,
) -> Result<ChannelRealization> {
    match profile {
        ChannelProfile::Flat { sigma_h2 } => {
            if !(sigma_h2 > 0.0) {
                return Err(Error::config("sigma_h2 must be positive"));
            }
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            ChannelRealization::from_taps(vec![(sign * sigma_h2.sqrt(), 0)], cfg.n_fft)
        }
        ChannelProfile::Multipath {
            rate,
            decay,
            sigma_h2,
        } => {
            if !(rate > 0.0) {
                return Err(Error::config("multipath rate must be positive"));
            }
            if !(sigma_h2 > 0.0) {
                return Err(Error::config("sigma_h2 must be positive"));
            }
            let max_len = (cfg.n_cp / 2).max(1); // L <= N_g / 2
            let poisson = Poisson::new(rate)
                .map_err(|e| Error::config(format!("bad poisson rate: {e}")))?;
            let l = (1 + poisson.sample(rng) as usize).min(max_len);
            // Exponential power profile, normalized to sigma_h2 in expectation.
            let weights: Vec<f64> = (0..l).map(|i| (-decay * i as f64).exp()).collect();
            let wsum: f64 = weights.iter().sum();
            let taps = weights
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    let std = (sigma_h2 * w / wsum).sqrt();
                    let g: f64 = rng.sample(rand_distr::StandardNormal);
                    (std * g, i)
                })
                .collect();
            ChannelRealization::from_taps(taps, cfg.n_fft)
        }
    }
}

/// Amplitude attenuation Pi(x) = sin(pi x) / (N sin(pi x / N)).
pub fn attenuation(x: f64, n_fft: usize) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    (PI * x).sin() / (n_fft as f64 * (PI * x / n_fft as f64).sin())
}

/// ICI-free receive model: R_{q,k} = X_{q,k} H_k exp(j k Theta_q / N), with
/// the optional Pi(eta k) amplitude attenuation.
///
/// The per-subcarrier rotation is k/N times the block total, so mirror pairs
/// satisfy R_{q,N-k} = conj(R_{q,k}) exp(j Theta_q) exactly; that rotation of
/// the mirror relation is the statistic the estimator reads. Int{xi} never
/// enters.
pub fn apply_phase_model(
    grid_tx: &BlockGrid,
    chan: &ChannelRealization,
    timing: &TimingParams,
    cfg: &SystemConfig,
    include_attenuation: bool,
) -> Result<BlockGrid> {
    if grid_tx.domain() != GridDomain::Frequency || grid_tx.n_cols() != cfg.n_fft {
        return Err(Error::dimension("phase model expects a FREQUENCY grid of width n_fft"));
    }
    let n = cfg.n_fft;
    let mut out = BlockGrid::zeros(grid_tx.n_rows(), n, GridDomain::Frequency);
    for q in 0..grid_tx.n_rows() {
        let theta_q = block_phase(q, timing, cfg);
        let per_k = theta_q / n as f64;
        let (tx, ctf) = (grid_tx.row(q), chan.ctf());
        let row = out.row_mut(q);
        for k in 0..n {
            let mut v = tx[k] * ctf[k] * Complex64::from_polar(1.0, k as f64 * per_k);
            if include_attenuation {
                v *= attenuation(timing.eta * k as f64, n);
            }
            row[k] = v;
        }
    }
    Ok(out)
}

/// Exact receive model: evaluates the transmit waveform
/// s(t) = sum_q sum_k X_{q,k} Psi_{q,k}(t), convolved with the taps, at the
/// receiver instants t = (m + Int{xi} + Frac{xi}) (1+eta) T_sam.
///
/// Direct summation over subcarriers; no interpolation filters, so the
/// output is an ICI ground truth. Feed the result to [`crate::ofdm::demodulate`]
/// with `window_start = 0`.
pub fn apply_resample_model(
    grid_tx: &BlockGrid,
    chan: &ChannelRealization,
    timing: &TimingParams,
    cfg: &SystemConfig,
) -> Result<TimeSignal> {
    if grid_tx.domain() != GridDomain::Frequency || grid_tx.n_cols() != cfg.n_fft {
        return Err(Error::dimension("resample model expects a FREQUENCY grid of width n_fft"));
    }
    let l = chan.n_taps() as i64;
    if timing.int_offset < -(l - 1) || timing.int_offset > 0 {
        return Err(Error::config(format!(
            "int_offset {} outside the left-shift window [-(L-1), 0] for L={l}",
            timing.int_offset
        )));
    }
    let n = cfg.n_fft;
    let n_s = cfg.n_s() as f64;
    let q_blocks = grid_tx.n_rows();
    let total = q_blocks * cfg.n_s();
    let scale = 1.0 / (n as f64).sqrt();
    let stretch = 1.0 + timing.eta;
    let shift = timing.int_offset as f64 + timing.xi;

    // One block's waveform at fractional position u (sample units):
    // s(u) = scale * sum_k X_{q,k} w^k with w = exp(j 2 pi (u - q N_s - N_g) / N),
    // supported on u in [q N_s, (q+1) N_s).
    let eval = |u: f64| -> Complex64 {
        let qf = (u / n_s).floor();
        if qf < 0.0 || qf >= q_blocks as f64 {
            return Complex64::ZERO;
        }
        let q = qf as usize;
        let local = u - qf * n_s - cfg.n_cp as f64;
        let w = Complex64::from_polar(1.0, 2.0 * PI * local / n as f64);
        let mut acc = Complex64::ZERO;
        let mut cur = Complex64::new(1.0, 0.0);
        for &x in grid_tx.row(q) {
            if x != Complex64::ZERO {
                acc += x * cur;
            }
            cur *= w;
        }
        acc * scale
    };

    let samples = (0..total)
        .map(|m| {
            let t = (m as f64 + shift) * stretch;
            chan.taps()
                .iter()
                .map(|&(h, d)| eval(t - d as f64) * h)
                .sum()
        })
        .collect();
    Ok(TimeSignal {
        samples,
        rate: 1.0 / cfg.t_sam,
    })
}
