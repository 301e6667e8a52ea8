//! Joint acquisition of the sampling phase offset and sampling clock offset.
//!
//! The received grid's mirror-subcarrier products lambda1(q,k) =
//! R_{q,k} R_{q,N-k} share one phase Theta_q per block. The five-step
//! pipeline estimates those ancillary phases (non-data-aided or
//! data-aided), unwraps them, fits the linear model
//! Theta_q = 2 pi xi + D_q eta by least squares, erases the analytic
//! self-noise bias, and re-fits. A brute-force likelihood grid search is
//! provided as an oracle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::system::{
    block_phase, eta_coefficient, BlockGrid, IndexSets, SystemConfig, TimingParams,
};

/// Ancillary-phase scheme: plain accumulation or SNR-weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Nda,
    Da,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Nda => "nda",
            Scheme::Da => "da",
        })
    }
}

/// Estimator variant along the five-step pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Ols,
    WlsBe,
    OlsBe,
    Ps,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Ols => "ols",
            Variant::WlsBe => "wls_be",
            Variant::OlsBe => "ols_be",
            Variant::Ps => "ps",
        })
    }
}

/// Wrapped and unwrapped per-block ancillary phases.
#[derive(Debug, Clone)]
pub struct AncillaryPhases {
    pub raw: Vec<f64>,
    pub unwrapped: Vec<f64>,
    pub scheme: Scheme,
}

/// Blind noise/signal power estimates from the guard band.
#[derive(Debug, Clone, Copy)]
pub struct SnrEstimate {
    /// Frequency-domain noise power from null mirror pairs.
    pub sigma_w2_hat: f64,
    /// Signal power sigma_X^2 sigma_H^2 (total minus noise).
    pub sigma_x2h2_hat: f64,
    /// nu-compensated linear SNR, clamped to [1e-6, 1e9].
    pub snr_hat: f64,
}

/// One joint estimate with its pipeline diagnostics.
#[derive(Debug, Clone)]
pub struct TimingEstimate {
    pub xi_hat: f64,
    pub eta_hat: f64,
    pub variant: Variant,
    pub scheme: Scheme,
    /// SNR the bias-erasure step used, if any.
    pub snr_used: Option<f64>,
    /// Bias vector subtracted before re-estimation, if any.
    pub bias_used: Option<Vec<f64>>,
    pub phases: AncillaryPhases,
}

/// Per-(q, k) data-aided weights aligned with `sets.i2_plus`.
pub type DaWeights = Vec<Vec<f64>>;

/// Mirror-pair product lambda1(q, k) = R_{q,k} R_{q,N-k}.
pub fn lambda1(grid: &BlockGrid, q: usize, k: usize) -> Complex64 {
    grid.at(q, k) * grid.at(q, grid.n_cols() - k)
}

/// Data-aided weight lambda2 = 1 / (2 + 1/snr); snr is the per-subcarrier
/// |X|^2 |H|^2 / sigma_W^2. Tends to 0.5 at high SNR and to snr at low SNR.
pub fn lambda2(snr: f64) -> f64 {
    1.0 / (2.0 + 1.0 / snr)
}

/// Practical lambda2 weights from decided/known symbols, a CTF estimate,
/// and the blind noise power. A zero CTF entry yields weight 0, excluding
/// that subcarrier from the data-aided sum.
pub fn estimate_lambda2(
    symbols: &BlockGrid,
    ctf: &BlockGrid,
    sigma_w2_hat: f64,
    sets: &IndexSets,
) -> Result<DaWeights> {
    if symbols.n_rows() != ctf.n_rows() || symbols.n_cols() != ctf.n_cols() {
        return Err(Error::dimension("symbols and CTF grids must have equal shape"));
    }
    if !(sigma_w2_hat > 0.0) {
        return Err(Error::config("sigma_w2_hat must be positive for DA weights"));
    }
    let weights = (0..symbols.n_rows())
        .map(|q| {
            sets.i2_plus
                .iter()
                .map(|&k| {
                    let p = symbols.at(q, k).norm_sqr() * ctf.at(q, k).norm_sqr();
                    if p > 0.0 {
                        lambda2(p / sigma_w2_hat)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(weights)
}

/// Ancillary phase of block q: arg of the (optionally weighted) lambda1 sum
/// over the lower data subcarriers. Result lies in (-pi, pi].
pub fn ancillary_phase(
    grid: &BlockGrid,
    q: usize,
    sets: &IndexSets,
    scheme: Scheme,
    weights: Option<&DaWeights>,
) -> Result<f64> {
    let acc: Complex64 = match scheme {
        Scheme::Nda => sets.i2_plus.iter().map(|&k| lambda1(grid, q, k)).sum(),
        Scheme::Da => {
            let w = weights
                .ok_or_else(|| Error::config("DA ancillary phase requires lambda2 weights"))?;
            sets.i2_plus
                .iter()
                .zip(&w[q])
                .map(|(&k, &wk)| lambda1(grid, q, k) * wk)
                .sum()
        }
    };
    if acc == Complex64::ZERO {
        return Err(Error::degenerate(format!("all-null accumulator in block {q}")));
    }
    Ok(acc.arg())
}

/// Sequential phase unwrapping with tolerance `phi` in [0, 2].
///
/// Scans adjacent raw phases; when |diff| >= phi*pi, a 2 pi correction with
/// the opposite sign is added to every subsequent phase, cumulatively.
pub fn unwrap_phases(raw: &[f64], phi: f64) -> Result<Vec<f64>> {
    if !(0.0..=2.0).contains(&phi) {
        return Err(Error::config(format!("phi must be in [0, 2], got {phi}")));
    }
    if raw.len() < 2 {
        return Err(Error::config("unwrapping needs at least two phases"));
    }
    let mut out = Vec::with_capacity(raw.len());
    out.push(raw[0]);
    let mut corr = 0.0;
    for q in 1..raw.len() {
        let d = raw[q] - raw[q - 1];
        if d.abs() >= phi * PI {
            corr -= TAU * d.signum();
        }
        out.push(raw[q] + corr);
    }
    Ok(out)
}

/// Observation matrix rows [2 pi, D_q] with D_q = pi N + 2 pi N_g + 2 pi q N_s.
pub fn build_e(q_blocks: usize, cfg: &SystemConfig) -> Result<Vec<[f64; 2]>> {
    if q_blocks < 2 {
        return Err(Error::degenerate("joint estimation needs Q >= 2 blocks"));
    }
    Ok((0..q_blocks)
        .map(|q| [TAU, eta_coefficient(q, cfg)])
        .collect())
}

/// Stable weighted least squares for Theta = 2 pi xi + D_q eta.
///
/// Solved in centered form (orthogonalized against the intercept), which is
/// the QR factorization of the two-column model; the normal equations are
/// never formed. Returns (xi, eta).
fn solve_weighted(phases: &[f64], e: &[[f64; 2]], weights: Option<&[f64]>) -> Result<(f64, f64)> {
    if phases.len() != e.len() {
        return Err(Error::dimension("phase vector and observation matrix disagree"));
    }
    let q = e.len();
    let w_at = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut sw = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for i in 0..q {
        sw += w_at(i);
        sx += w_at(i) * e[i][1];
        sy += w_at(i) * phases[i];
    }
    if !(sw > 0.0) {
        return Err(Error::degenerate("nonpositive total weight"));
    }
    let (xbar, ybar) = (sx / sw, sy / sw);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..q {
        let dx = e[i][1] - xbar;
        sxx += w_at(i) * dx * dx;
        sxy += w_at(i) * dx * (phases[i] - ybar);
    }
    if sxx == 0.0 {
        return Err(Error::degenerate("rank-deficient observation matrix"));
    }
    let eta = sxy / sxx;
    let xi = (ybar - eta * xbar) / TAU;
    Ok((xi, eta))
}

fn estimate_from(
    xi: f64,
    eta: f64,
    variant: Variant,
    scheme: Scheme,
    snr_used: Option<f64>,
    bias_used: Option<Vec<f64>>,
    phases: AncillaryPhases,
) -> TimingEstimate {
    TimingEstimate {
        xi_hat: xi,
        eta_hat: eta,
        variant,
        scheme,
        snr_used,
        bias_used,
        phases,
    }
}

/// Ordinary least squares on unwrapped phases.
pub fn ols(phases: &AncillaryPhases, e: &[[f64; 2]]) -> Result<TimingEstimate> {
    let (xi, eta) = solve_weighted(&phases.unwrapped, e, None)?;
    Ok(estimate_from(xi, eta, Variant::Ols, phases.scheme, None, None, phases.clone()))
}

/// Self-noise mean mu_q = -sin(Theta_q) / (cos(Theta_q) + snr) at the
/// working point (xi_hat, eta_hat).
pub fn bias_vector(
    xi_hat: f64,
    eta_hat: f64,
    snr: f64,
    q_blocks: usize,
    cfg: &SystemConfig,
) -> Vec<f64> {
    let t = TimingParams {
        xi: xi_hat,
        eta: eta_hat,
        int_offset: 0,
    };
    (0..q_blocks)
        .map(|q| {
            let theta = block_phase(q, &t, cfg);
            -theta.sin() / (theta.cos() + snr)
        })
        .collect()
}

/// Self-noise variance diagonal (1 - cos(Theta_q)) / (Xi N snr).
pub fn cov_diag(
    xi_hat: f64,
    eta_hat: f64,
    snr: f64,
    q_blocks: usize,
    cfg: &SystemConfig,
) -> Vec<f64> {
    let t = TimingParams {
        xi: xi_hat,
        eta: eta_hat,
        int_offset: 0,
    };
    let denom = cfg.pair_ratio() * cfg.n_fft as f64 * snr;
    (0..q_blocks)
        .map(|q| (1.0 - block_phase(q, &t, cfg).cos()) / denom)
        .collect()
}

// Weight cap for near-zero covariance entries (Theta_q near 0, where the
// bias also vanishes).
const WLS_WEIGHT_CAP: f64 = 1e15;

fn bias_erased(
    phases: &AncillaryPhases,
    e: &[[f64; 2]],
    init: (f64, f64),
    snr: f64,
    cfg: &SystemConfig,
    weighted: bool,
) -> Result<(f64, f64, Vec<f64>)> {
    let q = phases.unwrapped.len();
    let mu = bias_vector(init.0, init.1, snr, q, cfg);
    let corrected: Vec<f64> = phases
        .unwrapped
        .iter()
        .zip(&mu)
        .map(|(&p, &m)| p - m)
        .collect();
    let weights: Option<Vec<f64>> = weighted.then(|| {
        cov_diag(init.0, init.1, snr, q, cfg)
            .iter()
            .map(|&v| if v < 1e-15 { WLS_WEIGHT_CAP } else { 1.0 / v })
            .collect()
    });
    let (xi, eta) = solve_weighted(&corrected, e, weights.as_deref())?;
    Ok((xi, eta, mu))
}

/// Weighted least squares after bias erasure, weights from [`cov_diag`].
pub fn wls_be(
    phases: &AncillaryPhases,
    e: &[[f64; 2]],
    init: &TimingEstimate,
    snr: f64,
    cfg: &SystemConfig,
) -> Result<TimingEstimate> {
    let (xi, eta, mu) = bias_erased(phases, e, (init.xi_hat, init.eta_hat), snr, cfg, true)?;
    Ok(estimate_from(xi, eta, Variant::WlsBe, phases.scheme, Some(snr), Some(mu), phases.clone()))
}

/// Ordinary least squares after bias erasure.
pub fn ols_be(
    phases: &AncillaryPhases,
    e: &[[f64; 2]],
    init: &TimingEstimate,
    snr: f64,
    cfg: &SystemConfig,
) -> Result<TimingEstimate> {
    let (xi, eta, mu) = bias_erased(phases, e, (init.xi_hat, init.eta_hat), snr, cfg, false)?;
    Ok(estimate_from(xi, eta, Variant::OlsBe, phases.scheme, Some(snr), Some(mu), phases.clone()))
}

/// Blind noise and SNR estimation from the guard band:
/// sigma_W^2 from lambda1 on null mirror pairs, total power from |R|^2 on
/// data subcarriers, SNR = nu (total/noise - 1) clamped to [1e-6, 1e9].
pub fn estimate_snr(grid: &BlockGrid, sets: &IndexSets, cfg: &SystemConfig) -> Result<SnrEstimate> {
    if sets.i1_plus.is_empty() {
        return Err(Error::config(
            "noise estimation needs null subcarriers (n_null > 0)",
        ));
    }
    let q_blocks = grid.n_rows();
    let mut noise_acc = 0.0;
    let mut total_acc = 0.0;
    for q in 0..q_blocks {
        for &k in &sets.i1_plus {
            noise_acc += lambda1(grid, q, k).re;
        }
        for &k in &sets.i2_plus {
            total_acc += grid.at(q, k).norm_sqr();
        }
    }
    let sigma_w2_hat = 2.0 * noise_acc / (q_blocks * cfg.n_null) as f64;
    let sigma_x2_tot = 2.0 * total_acc / (q_blocks * cfg.n_usable()) as f64;
    let snr_raw = if sigma_w2_hat > f64::MIN_POSITIVE {
        cfg.nu() * (sigma_x2_tot / sigma_w2_hat - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(SnrEstimate {
        sigma_w2_hat,
        sigma_x2h2_hat: sigma_x2_tot - sigma_w2_hat,
        snr_hat: snr_raw.clamp(1e-6, 1e9),
    })
}

/// Genie inputs for the data-aided scheme: known/decided symbols and a CTF
/// estimate (possibly imperfect).
#[derive(Debug, Clone, Copy)]
pub struct DaInputs<'a> {
    pub symbols: &'a BlockGrid,
    pub ctf: &'a BlockGrid,
}

/// Raw-to-unwrapped ancillary phases for a whole grid.
pub fn ancillary_phases(
    grid: &BlockGrid,
    sets: &IndexSets,
    scheme: Scheme,
    weights: Option<&DaWeights>,
    phi: f64,
) -> Result<AncillaryPhases> {
    let raw: Vec<f64> = (0..grid.n_rows())
        .map(|q| ancillary_phase(grid, q, sets, scheme, weights))
        .collect::<Result<_>>()?;
    let unwrapped = unwrap_phases(&raw, phi)?;
    Ok(AncillaryPhases {
        raw,
        unwrapped,
        scheme,
    })
}

/// The full practical scheme: blind SNR, ancillary phases, unwrapping,
/// OLS, bias erasure with the estimated SNR, and a final OLS.
pub fn practical_scheme(
    grid: &BlockGrid,
    cfg: &SystemConfig,
    sets: &IndexSets,
    scheme: Scheme,
    phi: f64,
    da: Option<DaInputs<'_>>,
) -> Result<TimingEstimate> {
    let snr_est = estimate_snr(grid, sets, cfg)?;
    let weights = match (scheme, da) {
        (Scheme::Nda, _) => None,
        (Scheme::Da, Some(inputs)) => Some(estimate_lambda2(
            inputs.symbols,
            inputs.ctf,
            snr_est.sigma_w2_hat.max(f64::MIN_POSITIVE),
            sets,
        )?),
        (Scheme::Da, None) => {
            return Err(Error::config("DA practical scheme requires symbol and CTF inputs"))
        }
    };
    let phases = ancillary_phases(grid, sets, scheme, weights.as_ref(), phi)?;
    let e = build_e(grid.n_rows(), cfg)?;
    let init = ols(&phases, &e)?;
    let (xi, eta, mu) = bias_erased(
        &phases,
        &e,
        (init.xi_hat, init.eta_hat),
        snr_est.snr_hat,
        cfg,
        false,
    )?;
    Ok(TimingEstimate {
        xi_hat: xi,
        eta_hat: eta,
        variant: Variant::Ps,
        scheme,
        snr_used: Some(snr_est.snr_hat),
        bias_used: Some(mu),
        phases,
    })
}

/// Likelihood form evaluated by the grid-search oracle.
#[derive(Debug, Clone, Copy)]
pub enum LlfForm {
    /// Coherent accumulation sum_{q,k} Re{lambda1 e^{-j Theta_q}}.
    Approximated,
    /// Complete pairwise log-density; needs the true powers.
    Complete { sigma_x2h2: f64, sigma_w2: f64 },
}

/// Brute-force likelihood surface over a (xi, eta) lattice.
#[derive(Debug, Clone)]
pub struct LlfSurface {
    pub xi_grid: Vec<f64>,
    pub eta_grid: Vec<f64>,
    /// Row-major values[e * xi_grid.len() + x].
    pub values: Vec<f64>,
    pub best_xi: f64,
    pub best_eta: f64,
    pub best_value: f64,
}

/// Evaluates the likelihood at a single point.
pub fn llf_at(
    grid: &BlockGrid,
    sets: &IndexSets,
    cfg: &SystemConfig,
    xi: f64,
    eta: f64,
    form: LlfForm,
) -> f64 {
    let t = TimingParams {
        xi,
        eta,
        int_offset: 0,
    };
    match form {
        LlfForm::Approximated => {
            // sum_q Re{S_q e^{-j Theta_q}} with S_q precomputable; done
            // inline here, cached in llf_bruteforce.
            (0..grid.n_rows())
                .map(|q| {
                    let s: Complex64 = sets.i2_plus.iter().map(|&k| lambda1(grid, q, k)).sum();
                    (s * Complex64::from_polar(1.0, -block_phase(q, &t, cfg))).re
                })
                .sum()
        }
        LlfForm::Complete { sigma_x2h2, sigma_w2 } => {
            let total = sigma_x2h2 + sigma_w2;
            (0..grid.n_rows())
                .map(|q| {
                    let theta = block_phase(q, &t, cfg);
                    let denom = 2.0 * sigma_x2h2 * sigma_w2 * (1.0 - theta.cos());
                    sets.i2_plus
                        .iter()
                        .map(|&k| {
                            let l1 = lambda1(grid, q, k);
                            let power = grid.at(q, k).norm_sqr()
                                + grid.at(q, grid.n_cols() - k).norm_sqr();
                            let num = -total * power
                                + 2.0 * (l1 * Complex64::from_polar(1.0, -theta)).re * sigma_x2h2;
                            num / denom - (PI * PI * denom).ln()
                        })
                        .sum::<f64>()
                })
                .sum()
        }
    }
}

/// 2-D grid search over all lattice points; returns the surface and argmax.
pub fn llf_bruteforce(
    grid: &BlockGrid,
    sets: &IndexSets,
    cfg: &SystemConfig,
    xi_grid: &[f64],
    eta_grid: &[f64],
    form: LlfForm,
) -> Result<LlfSurface> {
    if xi_grid.is_empty() || eta_grid.is_empty() {
        return Err(Error::config("empty likelihood lattice"));
    }
    // Per-block lambda1 sums make the approximated form O(Q) per point.
    let block_sums: Vec<Complex64> = (0..grid.n_rows())
        .map(|q| sets.i2_plus.iter().map(|&k| lambda1(grid, q, k)).sum())
        .collect();
    let mut values = Vec::with_capacity(xi_grid.len() * eta_grid.len());
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &eta in eta_grid {
        for &xi in xi_grid {
            let v = match form {
                LlfForm::Approximated => {
                    let t = TimingParams {
                        xi,
                        eta,
                        int_offset: 0,
                    };
                    block_sums
                        .iter()
                        .enumerate()
                        .map(|(q, s)| {
                            (s * Complex64::from_polar(1.0, -block_phase(q, &t, cfg))).re
                        })
                        .sum()
                }
                LlfForm::Complete { .. } => llf_at(grid, sets, cfg, xi, eta, form),
            };
            if v > best.0 {
                best = (v, xi, eta);
            }
            values.push(v);
        }
    }
    Ok(LlfSurface {
        xi_grid: xi_grid.to_vec(),
        eta_grid: eta_grid.to_vec(),
        values,
        best_xi: best.1,
        best_eta: best.2,
        best_value: best.0,
    })
}
