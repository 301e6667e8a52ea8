//! Baseband OFDM modulation and demodulation.
//!
//! Frequency-domain grids carry Hermitian symmetry (HSP) so the transmit
//! waveform is real. Both transform directions are scaled by 1/sqrt(N):
//! the round trip is the identity, per-sample transmit power equals
//! nu * sigma_X^2, and frequency-domain noise variance equals the
//! time-domain noise variance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::system::{BlockGrid, GridDomain, IndexSets, Modulation, SystemConfig};

/// Sampled baseband signal.
#[derive(Debug, Clone)]
pub struct TimeSignal {
    pub samples: Vec<Complex64>,
    /// Samples per second.
    pub rate: f64,
}

fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

/// Full constellation alphabet for a modulation, indexed by symbol index.
///
/// PSK points sit at phases 2*pi*(gray(i)+0.5)/M; square QAM uses per-axis
/// Gray coding with odd levels scaled to unit average power. The estimator
/// never decodes data, so the only requirements are a deterministic map and
/// unit average energy.
pub fn constellation(modulation: Modulation) -> Vec<Complex64> {
    match modulation {
        Modulation::Psk(m) => (0..m)
            .map(|i| {
                let phase =
                    2.0 * std::f64::consts::PI * (gray(i) as f64 + 0.5) / m as f64;
                Complex64::from_polar(1.0, phase)
            })
            .collect(),
        Modulation::Qam(m) => {
            let side = (m as f64).sqrt().round() as u32;
            // Average energy of odd levels {+-1, +-3, ...} on both axes.
            let scale = 1.0 / ((2.0 * (side as f64 * side as f64 - 1.0) / 3.0)).sqrt();
            (0..m)
                .map(|i| {
                    let re = (2 * gray(i % side) as i64 - (side as i64 - 1)) as f64;
                    let im = (2 * gray(i / side) as i64 - (side as i64 - 1)) as f64;
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        }
    }
}

/// Maps symbol indices onto constellation points.
pub fn map_symbols(indices: &[u32], modulation: Modulation) -> Result<Vec<Complex64>> {
    let m = modulation.order();
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::config(format!("invalid modulation order {m}")));
    }
    let alphabet = constellation(modulation);
    indices
        .iter()
        .map(|&i| {
            alphabet
                .get(i as usize)
                .copied()
                .ok_or_else(|| Error::config(format!("symbol index {i} out of range for M={m}")))
        })
        .collect()
}

/// Lays one block's data symbols onto the N subcarriers with HSP mirroring.
///
/// `data_symbols[j]` lands on `sets.i2_plus[j]`, its conjugate on the mirror,
/// and DC, Nyquist, and the guard band stay zero.
pub fn assemble_block(data_symbols: &[Complex64], sets: &IndexSets) -> Result<Vec<Complex64>> {
    if data_symbols.len() != sets.i2_plus.len() {
        return Err(Error::dimension(format!(
            "expected {} data symbols, got {}",
            sets.i2_plus.len(),
            data_symbols.len()
        )));
    }
    let n = sets.n_fft();
    let mut row = vec![Complex64::ZERO; n];
    for (&k, &s) in sets.i2_plus.iter().zip(data_symbols) {
        row[k] = s;
        row[n - k] = s.conj();
    }
    Ok(row)
}

/// Inverse-transforms each block (scaled 1/sqrt(N)) and prepends the CP.
/// Output length is Q * N_s.
pub fn modulate(grid: &BlockGrid, cfg: &SystemConfig) -> Result<TimeSignal> {
    if grid.domain() != GridDomain::Frequency {
        return Err(Error::dimension("modulate expects a FREQUENCY grid"));
    }
    if grid.n_cols() != cfg.n_fft {
        return Err(Error::dimension(format!(
            "grid has {} columns, config expects {}",
            grid.n_cols(),
            cfg.n_fft
        )));
    }
    let n = cfg.n_fft;
    let scale = 1.0 / (n as f64).sqrt();
    let mut samples = Vec::with_capacity(grid.n_rows() * cfg.n_s());
    let mut body = vec![Complex64::ZERO; n];
    for q in 0..grid.n_rows() {
        body.copy_from_slice(grid.row(q));
        fft::inverse(&mut body);
        for v in body.iter_mut() {
            *v *= scale;
        }
        samples.extend_from_slice(&body[n - cfg.n_cp..]);
        samples.extend_from_slice(&body);
    }
    Ok(TimeSignal {
        samples,
        rate: 1.0 / cfg.t_sam,
    })
}

/// Forward-transforms Q windows of N samples, skipping the CP of each block.
///
/// Block q is read from `window_start + q*N_s + N_g`; `window_start` may be
/// negative as long as every window stays inside the signal.
pub fn demodulate(signal: &TimeSignal, cfg: &SystemConfig, window_start: i64) -> Result<BlockGrid> {
    let n = cfg.n_fft;
    let q_blocks = cfg.n_blocks;
    let first = window_start + cfg.n_cp as i64;
    if first < 0 {
        return Err(Error::dimension(format!(
            "window_start {window_start} reaches before the signal"
        )));
    }
    let last = window_start + ((q_blocks - 1) * cfg.n_s() + cfg.n_cp + n) as i64;
    if last > signal.samples.len() as i64 {
        return Err(Error::dimension(format!(
            "signal too short: need {last} samples, have {}",
            signal.samples.len()
        )));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut grid = BlockGrid::zeros(q_blocks, n, GridDomain::Frequency);
    let mut buf = vec![Complex64::ZERO; n];
    for q in 0..q_blocks {
        let start = (window_start + (q * cfg.n_s() + cfg.n_cp) as i64) as usize;
        buf.copy_from_slice(&signal.samples[start..start + n]);
        fft::forward(&mut buf);
        for (dst, &v) in grid.row_mut(q).iter_mut().zip(buf.iter()) {
            *dst = v * scale;
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{build_index_sets, SystemConfig};
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n_fft: usize, n_cp: usize, n_blocks: usize, n_null: usize) -> SystemConfig {
        SystemConfig::new(n_fft, n_cp, n_blocks, n_null, 1e-8, Modulation::Psk(16), 1.0).unwrap()
    }

    fn random_grid(cfg: &SystemConfig, seed: u64) -> BlockGrid {
        let sets = build_index_sets(cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = cfg.modulation.order();
        let rows = (0..cfg.n_blocks)
            .map(|_| {
                let idx: Vec<u32> =
                    (0..sets.i2_plus.len()).map(|_| rng.random_range(0..m)).collect();
                let syms = map_symbols(&idx, cfg.modulation).unwrap();
                assemble_block(&syms, &sets).unwrap()
            })
            .collect();
        BlockGrid::from_rows(rows, GridDomain::Frequency).unwrap()
    }

    #[test]
    fn qpsk_gray_reference_point() {
        let pts = constellation(Modulation::Psk(4));
        let want = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((pts[0] - want).norm() < 1e-15);
        for p in &pts {
            assert!((p.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qam16_unit_average_power() {
        // Exhaustive average over the alphabet.
        let pts = constellation(Modulation::Qam(16));
        let avg = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / 16.0;
        assert!((avg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psk16_distinct_min_distance() {
        let pts = constellation(Modulation::Psk(16));
        let mut min_d = f64::INFINITY;
        for i in 0..16 {
            for j in 0..i {
                min_d = min_d.min((pts[i] - pts[j]).norm());
            }
        }
        // Exhaustive pairwise check: closest points are adjacent on the circle.
        assert!((min_d - 2.0 * (std::f64::consts::PI / 16.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn map_symbols_rejects_bad_input() {
        assert!(map_symbols(&[0, 4], Modulation::Psk(4)).is_err());
    }

    #[test]
    fn assemble_block_tiny() {
        let c = cfg(4, 1, 1, 0);
        let sets = build_index_sets(&c);
        let s = Complex64::new(0.3, -0.7);
        let row = assemble_block(&[s], &sets).unwrap();
        assert_eq!(row, vec![Complex64::ZERO, s, Complex64::ZERO, s.conj()]);
        assert!(assemble_block(&[s, s], &sets).is_err());
    }

    #[test]
    fn assemble_block_nonzero_count() {
        let c = cfg(512, 64, 1, 64);
        let sets = build_index_sets(&c);
        let syms = vec![Complex64::new(1.0, 0.0); sets.i2_plus.len()];
        let row = assemble_block(&syms, &sets).unwrap();
        assert_eq!(row.iter().filter(|v| v.norm() > 0.0).count(), 446);
    }

    #[test]
    fn single_tone_matches_cosine() {
        // X_{0,1} = 1 with HSP mirror -> (2/sqrt(N)) cos(2 pi n / N).
        let c = cfg(64, 16, 1, 0);
        let mut grid = BlockGrid::zeros(1, 64, GridDomain::Frequency);
        grid.set(0, 1, Complex64::new(1.0, 0.0));
        grid.set(0, 63, Complex64::new(1.0, 0.0));
        let sig = modulate(&grid, &c).unwrap();
        assert_eq!(sig.samples.len(), c.n_s());
        let amp = 2.0 / (64.0f64).sqrt();
        for n in 0..64 {
            let want = amp * (2.0 * std::f64::consts::PI * n as f64 / 64.0).cos();
            let got = sig.samples[c.n_cp + n];
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
        // CP consistency: sample[-m] equals sample[N-m].
        for m in 1..=c.n_cp {
            let cp = sig.samples[c.n_cp - m];
            let tail = sig.samples[c.n_cp + 64 - m];
            assert!((cp - tail).norm() < 1e-12);
        }
    }

    #[test]
    fn all_zero_grid_gives_silence() {
        let c = cfg(32, 8, 3, 0);
        let grid = BlockGrid::zeros(3, 32, GridDomain::Frequency);
        let sig = modulate(&grid, &c).unwrap();
        assert!(sig.samples.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn parseval_per_block() {
        let c = cfg(64, 16, 4, 12);
        let grid = random_grid(&c, 7);
        let sig = modulate(&grid, &c).unwrap();
        for q in 0..4 {
            let body = &sig.samples[q * c.n_s() + c.n_cp..(q + 1) * c.n_s()];
            let time_energy: f64 = body.iter().map(|v| v.norm_sqr()).sum();
            let freq_energy: f64 = grid.row(q).iter().map(|v| v.norm_sqr()).sum();
            assert!((time_energy - freq_energy).abs() < 1e-10 * freq_energy.max(1.0));
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let c = cfg(512, 64, 10, 64);
        let grid = random_grid(&c, 21);
        let back = demodulate(&modulate(&grid, &c).unwrap(), &c, 0).unwrap();
        let mut worst: f64 = 0.0;
        for q in 0..c.n_blocks {
            for k in 0..c.n_fft {
                worst = worst.max((back.at(q, k) - grid.at(q, k)).norm());
            }
        }
        assert!(worst < 1e-10, "round-trip error {worst}");
    }

    #[test]
    fn window_shift_theorem() {
        // Starting d samples early inside the CP multiplies bin k by
        // exp(-j 2 pi k d / N).
        let c = cfg(64, 16, 2, 12);
        let grid = random_grid(&c, 3);
        let sig = modulate(&grid, &c).unwrap();
        let d = 5i64;
        let shifted = demodulate(&sig, &c, -d).unwrap();
        for q in 0..2 {
            for k in 0..64 {
                let rot = Complex64::from_polar(
                    1.0,
                    -2.0 * std::f64::consts::PI * (k as i64 * d) as f64 / 64.0,
                );
                let want = grid.at(q, k) * rot;
                assert!((shifted.at(q, k) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn demodulate_window_out_of_range() {
        let c = cfg(64, 16, 2, 12);
        let sig = modulate(&random_grid(&c, 1), &c).unwrap();
        assert!(demodulate(&sig, &c, 1).is_err());
        assert!(demodulate(&sig, &c, -(c.n_cp as i64) - 1).is_err());
        assert!(demodulate(&sig, &c, -(c.n_cp as i64)).is_ok());
    }

    #[test]
    fn transmit_power_matches_nu_sigma_x2() {
        // >= 1e5 samples of random 16-PSK frames.
        let c = cfg(512, 64, 200, 64);
        let sig = modulate(&random_grid(&c, 11), &c).unwrap();
        assert!(sig.samples.len() >= 100_000);
        let p: f64 =
            sig.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / sig.samples.len() as f64;
        let want = c.nu() * c.sigma_x2;
        assert!((p / want - 1.0).abs() < 0.02, "power {p} vs {want}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn hsp_grid_has_real_waveform(seed in 0u64..1000) {
            let c = cfg(64, 16, 2, 12);
            let sig = modulate(&random_grid(&c, seed), &c).unwrap();
            let rms = (sig.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
                / sig.samples.len() as f64)
                .sqrt();
            let worst_im = sig.samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            prop_assert!(worst_im < 1e-12 * rms.max(1.0));
        }

        #[test]
        fn real_signal_demodulates_to_hsp_grid(seed in 0u64..1000) {
            // Any real time-domain signal keeps W_{q,k} = conj(W_{q,N-k}).
            let c = cfg(64, 16, 3, 12);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Complex64> = (0..c.n_blocks * c.n_s())
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, 0.0))
                .collect();
            let sig = TimeSignal { samples, rate: 1.0 / c.t_sam };
            let grid = demodulate(&sig, &c, 0).unwrap();
            prop_assert!(grid.max_hsp_violation() < 1e-12);
        }
    }
}
