//! Reproducible Monte Carlo experiment runner.
//!
//! A [`Scenario`] fixes the system, timing, channel, noise model, SNR
//! sweep, and seed. Trials draw from per-trial RNG streams derived from
//! (seed, snr index, trial index), so results are bit-identical for any
//! worker count and invariant under trial-order permutation.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytics;
use crate::channel::{
    apply_phase_model, apply_resample_model, generate_channel, ChannelMode, ChannelProfile,
    ChannelRealization,
};
use crate::error::{Error, Result};
use crate::estimator::{
    ancillary_phases, build_e, estimate_lambda2, estimate_snr, ols, ols_be, wls_be, Scheme,
    Variant,
};
use crate::noise::{self, NoiseSpec};
use crate::ofdm::{assemble_block, demodulate, map_symbols};
use crate::system::{build_index_sets, BlockGrid, GridDomain, Modulation, SystemConfig, TimingParams};

/// Noise model without its power parameter; the harness sets the power per
/// SNR point (background power for Class-A, omega for Nakagami).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Awgn,
    ClassA { a: f64, t: f64 },
    Nakagami { m: f64 },
    Cyclo { t_ac: f64 },
    Colored { beta: f64 },
}

impl NoiseKind {
    /// Concrete spec at a target background power, with the frame's block
    /// length for cyclo-stationary renormalization.
    fn spec(&self, power: f64, block_len: usize, n0: u64) -> NoiseSpec {
        match *self {
            NoiseKind::Awgn => NoiseSpec::Awgn { sigma_w2: power },
            NoiseKind::ClassA { a, t } => NoiseSpec::ClassA { a, t, sigma_g2: power },
            NoiseKind::Nakagami { m } => NoiseSpec::Nakagami { m, omega: power },
            NoiseKind::Cyclo { t_ac } => NoiseSpec::Cyclo {
                sigma_w2: power,
                t_ac,
                n0,
                block_len,
            },
            NoiseKind::Colored { beta } => NoiseSpec::Colored { beta, sigma_w2: power },
        }
    }

    /// Total frequency-domain noise power at background power `p` (Class-A
    /// inflates the background by (1+T)/T).
    pub fn total_power(&self, p: f64) -> f64 {
        match *self {
            NoiseKind::ClassA { t, .. } => p * (t + 1.0) / t,
            _ => p,
        }
    }
}

/// One full experiment description.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: SystemConfig,
    pub timing: TimingParams,
    pub channel_profile: ChannelProfile,
    pub channel_mode: ChannelMode,
    pub noise: NoiseKind,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub variants: Vec<Variant>,
    pub scheme: Scheme,
    /// CTF estimation accuracy for the data-aided weights; 0 = perfect CSI.
    pub csi_kappa: f64,
    /// Phase-unwrapping tolerance.
    pub phi: f64,
    pub seed: u64,
}

impl Default for Scenario {
    /// Broadband defaults: N=512, N_g=64, Q=10, N_n=64, 16-PSK, T_sam=10ns,
    /// xi=0.1, eta=1e-5, flat channel, AWGN, NDA.
    fn default() -> Self {
        Scenario {
            cfg: SystemConfig::new(512, 64, 10, 64, 1e-8, Modulation::Psk(16), 1.0).unwrap(),
            timing: TimingParams::offsets(0.1, 1e-5).unwrap(),
            channel_profile: ChannelProfile::Flat { sigma_h2: 1.0 },
            channel_mode: ChannelMode::PhaseModel,
            noise: NoiseKind::Awgn,
            snr_db: vec![10.0, 15.0, 20.0, 25.0],
            trials: 2000,
            variants: vec![Variant::Ols, Variant::OlsBe, Variant::WlsBe, Variant::Ps],
            scheme: Scheme::Nda,
            csi_kappa: 0.0,
            phi: 1.0,
            seed: 1,
        }
    }
}

/// Aggregated result for one (SNR, variant) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub variant: Variant,
    pub scheme: Scheme,
    pub mse_xi: f64,
    pub mse_eta: f64,
    pub bias_xi: f64,
    pub bias_eta: f64,
    pub pred_var_xi: f64,
    pub pred_var_eta: f64,
    pub trials: usize,
    pub failures: usize,
}

pub const CSV_HEADER: &str =
    "snr_db,variant,scheme,mse_xi,mse_eta,bias_xi,bias_eta,pred_var_xi,pred_var_eta,trials,failures";

fn sigma_h2_of(profile: &ChannelProfile) -> f64 {
    match *profile {
        ChannelProfile::Flat { sigma_h2 } => sigma_h2,
        ChannelProfile::Multipath { sigma_h2, .. } => sigma_h2,
    }
}

/// Imperfect CTF: sqrt(1-kappa^2) H + kappa J with J an HSP complex
/// Gaussian vector of per-entry variance mean_k |H_k|^2, drawn per block.
fn imperfect_ctf<R: Rng + ?Sized>(
    chan: &ChannelRealization,
    kappa: f64,
    q_blocks: usize,
    rng: &mut R,
) -> BlockGrid {
    let n = chan.ctf().len();
    let var = chan.ctf().iter().map(|h| h.norm_sqr()).sum::<f64>() / n as f64;
    let mut grid = BlockGrid::zeros(q_blocks, n, GridDomain::Frequency);
    let a = (1.0 - kappa * kappa).sqrt();
    for q in 0..q_blocks {
        let mut j = vec![Complex64::ZERO; n];
        j[0] = Complex64::new(var.sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
        j[n / 2] = Complex64::new(var.sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
        let std = (var / 2.0).sqrt();
        for k in 1..n / 2 {
            let z = Complex64::new(
                std * rng.sample::<f64, _>(StandardNormal),
                std * rng.sample::<f64, _>(StandardNormal),
            );
            j[k] = z;
            j[n - k] = z.conj();
        }
        for k in 0..n {
            grid.set(q, k, a * chan.ctf()[k] + kappa * j[k]);
        }
    }
    grid
}

struct TrialOutcome {
    /// Per requested variant: (xi error, eta error); None if the trial failed.
    errors: Option<Vec<(f64, f64)>>,
}

fn run_trial(s: &Scenario, sets: &crate::system::IndexSets, snr_idx: usize, trial: usize) -> TrialOutcome {
    let cfg = &s.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(((snr_idx as u64) << 40) | trial as u64);

    let m = cfg.modulation.order();
    let rows: Vec<Vec<Complex64>> = (0..cfg.n_blocks)
        .map(|_| {
            let idx: Vec<u32> = (0..sets.i2_plus.len()).map(|_| rng.random_range(0..m)).collect();
            assemble_block(&map_symbols(&idx, cfg.modulation).unwrap(), sets).unwrap()
        })
        .collect();
    let tx = BlockGrid::from_rows(rows, GridDomain::Frequency).unwrap();

    let chan = match generate_channel(&mut rng, cfg, s.channel_profile) {
        Ok(c) => c,
        Err(_) => return TrialOutcome { errors: None },
    };

    // Background noise power realizing the target SNR = nu sX2 sH2 / power.
    let snr_lin = 10f64.powf(s.snr_db[snr_idx] / 10.0);
    let power = cfg.nu() * cfg.sigma_x2 * sigma_h2_of(&s.channel_profile) / snr_lin;
    let n0: u64 = rng.random_range(0..1 << 30);
    let spec = s.noise.spec(power, cfg.n_s(), n0);
    let total_samples = cfg.n_blocks * cfg.n_s();
    let w = match noise::generate(&spec, &mut rng, total_samples, cfg.t_sam) {
        Ok(w) => w,
        Err(_) => return TrialOutcome { errors: None },
    };

    let rx = match s.channel_mode {
        ChannelMode::PhaseModel => {
            let mut grid = match apply_phase_model(&tx, &chan, &s.timing, cfg, true) {
                Ok(g) => g,
                Err(_) => return TrialOutcome { errors: None },
            };
            // Noise enters in the time domain; demodulating it alone adds
            // the exact frequency-domain noise (the path is linear).
            let noise_sig = crate::ofdm::TimeSignal {
                samples: w.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                rate: 1.0 / cfg.t_sam,
            };
            let w_grid = match demodulate(&noise_sig, cfg, 0) {
                Ok(g) => g,
                Err(_) => return TrialOutcome { errors: None },
            };
            for q in 0..cfg.n_blocks {
                let dst = grid.row_mut(q);
                for (d, &v) in dst.iter_mut().zip(w_grid.row(q)) {
                    *d += v;
                }
            }
            grid
        }
        ChannelMode::Resample => {
            let mut sig = match apply_resample_model(&tx, &chan, &s.timing, cfg) {
                Ok(sig) => sig,
                Err(_) => return TrialOutcome { errors: None },
            };
            for (smp, &v) in sig.samples.iter_mut().zip(&w) {
                *smp += Complex64::new(v, 0.0);
            }
            match demodulate(&sig, cfg, 0) {
                Ok(g) => g,
                Err(_) => return TrialOutcome { errors: None },
            }
        }
    };

    // Shared pipeline: blind SNR, ancillary phases, unwrapping, OLS.
    let snr_est = match estimate_snr(&rx, sets, cfg) {
        Ok(e) => e,
        Err(_) => return TrialOutcome { errors: None },
    };
    let weights = match s.scheme {
        Scheme::Nda => None,
        Scheme::Da => {
            let ctf = if s.csi_kappa > 0.0 {
                imperfect_ctf(&chan, s.csi_kappa, cfg.n_blocks, &mut rng)
            } else {
                chan.ctf_grid(cfg.n_blocks)
            };
            match estimate_lambda2(&tx, &ctf, snr_est.sigma_w2_hat.max(f64::MIN_POSITIVE), sets) {
                Ok(w) => Some(w),
                Err(_) => return TrialOutcome { errors: None },
            }
        }
    };
    let phases = match ancillary_phases(&rx, sets, s.scheme, weights.as_ref(), s.phi) {
        Ok(p) => p,
        Err(_) => return TrialOutcome { errors: None },
    };
    let e = match build_e(cfg.n_blocks, cfg) {
        Ok(e) => e,
        Err(_) => return TrialOutcome { errors: None },
    };
    let init = match ols(&phases, &e) {
        Ok(est) => est,
        Err(_) => return TrialOutcome { errors: None },
    };
    // Genie SNR for the BE variants: true per-subcarrier signal-to-noise
    // power ratio (total noise power for mixtures).
    let genie_snr =
        cfg.sigma_x2 * sigma_h2_of(&s.channel_profile) / s.noise.total_power(power);

    let mut errors = Vec::with_capacity(s.variants.len());
    for &variant in &s.variants {
        let est = match variant {
            Variant::Ols => Ok(init.clone()),
            Variant::OlsBe => ols_be(&phases, &e, &init, genie_snr, cfg),
            Variant::WlsBe => wls_be(&phases, &e, &init, genie_snr, cfg),
            // The practical scheme is OLS-BE driven by the blind SNR.
            Variant::Ps => ols_be(&phases, &e, &init, snr_est.snr_hat, cfg),
        };
        match est {
            Ok(est) => errors.push((est.xi_hat - s.timing.xi, est.eta_hat - s.timing.eta)),
            Err(_) => return TrialOutcome { errors: None },
        }
    }
    TrialOutcome { errors: Some(errors) }
}

/// Runs all SNR points and variants of a scenario.
pub fn run_scenario(s: &Scenario) -> Result<Vec<ResultRow>> {
    if s.trials == 0 {
        return Err(Error::config("trials must be >= 1"));
    }
    if s.snr_db.is_empty() {
        return Err(Error::config("snr_db list must be nonempty"));
    }
    if s.variants.is_empty() {
        return Err(Error::config("variants list must be nonempty"));
    }
    if !(0.0..1.0).contains(&s.csi_kappa) {
        return Err(Error::config("csi_kappa must be in [0, 1)"));
    }
    let sets = build_index_sets(&s.cfg);
    let feasible = analytics::feasibility(&s.timing, &s.cfg).inside;
    if !feasible {
        eprintln!(
            "warning: timing (xi={}, eta={}) is outside the unwrapping feasibility region; \
             running anyway",
            s.timing.xi, s.timing.eta
        );
    }
    let mut rows = Vec::with_capacity(s.snr_db.len() * s.variants.len());
    for (snr_idx, &snr_db) in s.snr_db.iter().enumerate() {
        let outcomes: Vec<TrialOutcome> = (0..s.trials)
            .into_par_iter()
            .map(|trial| run_trial(s, &sets, snr_idx, trial))
            .collect();
        // Sequential fold in trial order keeps aggregation deterministic.
        let nv = s.variants.len();
        let mut sum_sq = vec![(0.0f64, 0.0f64); nv];
        let mut sum = vec![(0.0f64, 0.0f64); nv];
        let mut ok = 0usize;
        for o in &outcomes {
            if let Some(errs) = &o.errors {
                ok += 1;
                for (v, &(dx, de)) in errs.iter().enumerate() {
                    sum_sq[v].0 += dx * dx;
                    sum_sq[v].1 += de * de;
                    sum[v].0 += dx;
                    sum[v].1 += de;
                }
            }
        }
        let errored = s.trials - ok;
        let failures = if feasible { errored } else { s.trials };
        let snr_lin = 10f64.powf(snr_db / 10.0);
        // Predictions at the per-subcarrier SNR the self-noise moments use.
        let pred = analytics::predict(&s.cfg, &s.timing, snr_lin / s.cfg.nu())?;
        for (v, &variant) in s.variants.iter().enumerate() {
            let denom = ok.max(1) as f64;
            rows.push(ResultRow {
                snr_db,
                variant,
                scheme: s.scheme,
                mse_xi: sum_sq[v].0 / denom,
                mse_eta: sum_sq[v].1 / denom,
                bias_xi: sum[v].0 / denom,
                bias_eta: sum[v].1 / denom,
                pred_var_xi: pred.var_xi,
                pred_var_eta: pred.var_eta,
                trials: s.trials,
                failures,
            });
        }
    }
    Ok(rows)
}

/// Renders rows as CSV (shortest round-trip float formatting).
pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::config("no rows to emit"));
    }
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.variant,
            r.scheme,
            r.mse_xi,
            r.mse_eta,
            r.bias_xi,
            r.bias_eta,
            r.pred_var_xi,
            r.pred_var_eta,
            r.trials,
            r.failures
        )
        .expect("string write");
    }
    Ok(out)
}

/// Writes rows to a CSV file.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let s = csv_string(rows)?;
    std::fs::write(path, s)?;
    Ok(())
}

/// Parses a `key = value` scenario file ('#' starts a comment). Unknown keys
/// are rejected. Missing keys keep the broadband defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut s = Scenario::default();
    let (mut n_fft, mut n_cp, mut n_blocks, mut n_null) = (512usize, 64usize, 10usize, 64usize);
    let (mut t_sam, mut sigma_x2) = (1e-8, 1.0);
    let mut modulation = Modulation::Psk(16);
    let (mut xi, mut eta, mut int_offset) = (0.1, 1e-5, 0i64);
    let (mut channel, mut sigma_h2) = ("flat".to_string(), 1.0);
    let (mut mp_rate, mut mp_decay) = (5.0, 0.5);
    let mut mode = "phase".to_string();
    let mut noise = "awgn".to_string();
    let (mut a, mut t_ratio, mut m_fig, mut beta) = (1.0, 1.0, 1.0, 0.72);
    let mut t_ac = 1.0 / 60.0;

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::config(format!("line {}: bad {what}: {value}", lineno + 1));
        macro_rules! num {
            ($ty:ty, $what:expr) => {
                value.parse::<$ty>().map_err(|_| bad($what))?
            };
        }
        match key {
            "n_fft" => n_fft = num!(usize, "n_fft"),
            "n_cp" => n_cp = num!(usize, "n_cp"),
            "n_blocks" => n_blocks = num!(usize, "n_blocks"),
            "n_null" => n_null = num!(usize, "n_null"),
            "t_sam" => t_sam = num!(f64, "t_sam"),
            "sigma_x2" => sigma_x2 = num!(f64, "sigma_x2"),
            "modulation" => {
                modulation = parse_modulation(value)
                    .ok_or_else(|| bad("modulation (psk<M> or qam<M>)"))?
            }
            "xi" => xi = num!(f64, "xi"),
            "eta" => eta = num!(f64, "eta"),
            "int_offset" => int_offset = num!(i64, "int_offset"),
            "channel" => channel = value.to_string(),
            "sigma_h2" => sigma_h2 = num!(f64, "sigma_h2"),
            "multipath_rate" => mp_rate = num!(f64, "multipath_rate"),
            "multipath_decay" => mp_decay = num!(f64, "multipath_decay"),
            "channel_mode" => mode = value.to_string(),
            "noise" => noise = value.to_string(),
            "noise_a" => a = num!(f64, "noise_a"),
            "noise_t" => t_ratio = num!(f64, "noise_t"),
            "noise_m" => m_fig = num!(f64, "noise_m"),
            "noise_beta" => beta = num!(f64, "noise_beta"),
            "noise_t_ac" => t_ac = num!(f64, "noise_t_ac"),
            "snr_db" => {
                s.snr_db = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("snr_db list"))?
            }
            "trials" => s.trials = num!(usize, "trials"),
            "variants" => {
                s.variants = value
                    .split(',')
                    .map(|v| parse_variant(v.trim()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad("variants (ols, ols_be, wls_be, ps)"))?
            }
            "scheme" => {
                s.scheme = match value {
                    "nda" => Scheme::Nda,
                    "da" => Scheme::Da,
                    _ => return Err(bad("scheme (nda or da)")),
                }
            }
            "csi_kappa" => s.csi_kappa = num!(f64, "csi_kappa"),
            "phi" => s.phi = num!(f64, "phi"),
            "seed" => s.seed = num!(u64, "seed"),
            _ => return Err(Error::config(format!("line {}: unknown key '{key}'", lineno + 1))),
        }
    }

    s.cfg = SystemConfig::new(n_fft, n_cp, n_blocks, n_null, t_sam, modulation, sigma_x2)?;
    s.timing = TimingParams::new(xi, eta, int_offset)?;
    s.channel_profile = match channel.as_str() {
        "flat" => ChannelProfile::Flat { sigma_h2 },
        "multipath" => ChannelProfile::Multipath {
            rate: mp_rate,
            decay: mp_decay,
            sigma_h2,
        },
        other => return Err(Error::config(format!("unknown channel '{other}'"))),
    };
    s.channel_mode = match mode.as_str() {
        "phase" => ChannelMode::PhaseModel,
        "resample" => ChannelMode::Resample,
        other => return Err(Error::config(format!("unknown channel_mode '{other}'"))),
    };
    s.noise = match noise.as_str() {
        "awgn" => NoiseKind::Awgn,
        "class_a" => NoiseKind::ClassA { a, t: t_ratio },
        "nakagami" => NoiseKind::Nakagami { m: m_fig },
        "cyclo" => NoiseKind::Cyclo { t_ac },
        "colored" => NoiseKind::Colored { beta },
        other => return Err(Error::config(format!("unknown noise '{other}'"))),
    };
    Ok(s)
}

pub fn parse_modulation(v: &str) -> Option<Modulation> {
    if let Some(m) = v.strip_prefix("psk") {
        return m.parse().ok().map(Modulation::Psk);
    }
    if let Some(m) = v.strip_prefix("qam") {
        return m.parse().ok().map(Modulation::Qam);
    }
    None
}

pub fn parse_variant(v: &str) -> Option<Variant> {
    match v {
        "ols" => Some(Variant::Ols),
        "ols_be" => Some(Variant::OlsBe),
        "wls_be" => Some(Variant::WlsBe),
        "ps" => Some(Variant::Ps),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_single_trial_is_exact() {
        let s = Scenario {
            snr_db: vec![2000.0],
            trials: 1,
            ..Scenario::default()
        };
        let rows = run_scenario(&s).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.mse_xi < 1e-18, "{:?}", r);
            assert!(r.mse_eta < 1e-24, "{:?}", r);
            assert_eq!(r.failures, 0);
        }
    }

    #[test]
    fn same_seed_gives_identical_csv() {
        let s = Scenario {
            snr_db: vec![15.0],
            trials: 40,
            ..Scenario::default()
        };
        let a = csv_string(&run_scenario(&s).unwrap()).unwrap();
        let b = csv_string(&run_scenario(&s).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = Scenario {
            snr_db: vec![12.0],
            trials: 64,
            ..Scenario::default()
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_scenario(&s))
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_scenario(&s))
            .unwrap();
        assert_eq!(csv_string(&one).unwrap(), csv_string(&four).unwrap());
    }

    #[test]
    fn csv_header_is_byte_exact() {
        assert_eq!(
            CSV_HEADER,
            "snr_db,variant,scheme,mse_xi,mse_eta,bias_xi,bias_eta,pred_var_xi,pred_var_eta,trials,failures"
        );
        let s = Scenario {
            snr_db: vec![20.0],
            trials: 2,
            variants: vec![Variant::Ps],
            ..Scenario::default()
        };
        let csv = csv_string(&run_scenario(&s).unwrap()).unwrap();
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv_string(&[]).is_err());
    }

    #[test]
    fn mse_dominates_bias_squared() {
        let s = Scenario {
            snr_db: vec![10.0],
            trials: 200,
            ..Scenario::default()
        };
        for r in run_scenario(&s).unwrap() {
            assert!(r.mse_xi + 1e-15 >= r.bias_xi * r.bias_xi);
            assert!(r.mse_eta + 1e-21 >= r.bias_eta * r.bias_eta);
        }
    }

    #[test]
    fn scenario_parsing_round_trip() {
        let text = "
            # comment
            n_fft = 256
            n_cp = 32
            n_blocks = 8
            n_null = 32
            modulation = qam16
            xi = 0.2            # inline comment
            eta = 2e-5
            channel = multipath
            multipath_rate = 4.0
            channel_mode = resample
            noise = class_a
            noise_a = 0.1
            noise_t = 0.1
            snr_db = 10, 20
            trials = 7
            variants = ols, ps
            scheme = nda
            seed = 9
        ";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.cfg.n_fft, 256);
        assert_eq!(s.cfg.modulation, Modulation::Qam(16));
        assert_eq!(s.timing.xi, 0.2);
        assert!(matches!(s.channel_profile, ChannelProfile::Multipath { .. }));
        assert_eq!(s.channel_mode, ChannelMode::Resample);
        assert!(matches!(s.noise, NoiseKind::ClassA { .. }));
        assert_eq!(s.snr_db, vec![10.0, 20.0]);
        assert_eq!(s.trials, 7);
        assert_eq!(s.variants, vec![Variant::Ols, Variant::Ps]);
        assert_eq!(s.seed, 9);
    }

    #[test]
    fn scenario_parsing_rejects_junk() {
        assert!(parse_scenario("nonsense = 1").is_err());
        assert!(parse_scenario("n_fft 512").is_err());
        assert!(parse_scenario("modulation = fsk2").is_err());
        assert!(parse_scenario("xi = 0.7").is_err());
    }
}
