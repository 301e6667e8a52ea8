//! System configuration, subcarrier index-set algebra, and grid containers.
//!
//! Everything here is immutable after construction and shared freely across
//! trial workers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Constellation family and order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Psk(u32),
    Qam(u32),
}

impl Modulation {
    pub fn order(self) -> u32 {
        match self {
            Modulation::Psk(m) | Modulation::Qam(m) => m,
        }
    }
}

/// Static OFDM system parameters.
///
/// `n_fft` is the number of subcarriers N, `n_cp` the cyclic-prefix length
/// N_g in samples, `n_blocks` the number of OFDM blocks Q per frame, and
/// `n_null` the total number N_n of guard-band null subcarriers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_fft: usize,
    pub n_cp: usize,
    pub n_blocks: usize,
    pub n_null: usize,
    /// Transmitter sampling interval in seconds.
    pub t_sam: f64,
    pub modulation: Modulation,
    /// Signal power sigma_X^2 (1 for unit-power constellations).
    pub sigma_x2: f64,
}

impl SystemConfig {
    pub fn new(
        n_fft: usize,
        n_cp: usize,
        n_blocks: usize,
        n_null: usize,
        t_sam: f64,
        modulation: Modulation,
        sigma_x2: f64,
    ) -> Result<Self> {
        if n_fft < 4 || !n_fft.is_power_of_two() {
            return Err(Error::config(format!(
                "n_fft must be a power of two >= 4, got {n_fft}"
            )));
        }
        if n_null % 2 != 0 {
            return Err(Error::config(format!("n_null must be even, got {n_null}")));
        }
        if n_null + 2 >= n_fft {
            return Err(Error::config(format!(
                "n_null must satisfy n_null < n_fft - 2 ({n_null} vs {n_fft})"
            )));
        }
        if n_blocks == 0 {
            return Err(Error::config("n_blocks must be positive"));
        }
        if !(t_sam > 0.0) {
            return Err(Error::config(format!("t_sam must be positive, got {t_sam}")));
        }
        if !(sigma_x2 > 0.0) {
            return Err(Error::config("sigma_x2 must be positive"));
        }
        let m = modulation.order();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::config(format!(
                "modulation order must be a power of two >= 2, got {m}"
            )));
        }
        if let Modulation::Qam(m) = modulation {
            let side = (m as f64).sqrt().round() as u32;
            if side * side != m || !side.is_power_of_two() {
                return Err(Error::config(format!(
                    "QAM order must be an even power of two (square constellation), got {m}"
                )));
            }
        }
        Ok(SystemConfig {
            n_fft,
            n_cp,
            n_blocks,
            n_null,
            t_sam,
            modulation,
            sigma_x2,
        })
    }

    /// Block length N_s = N + N_g in samples.
    pub fn n_s(&self) -> usize {
        self.n_fft + self.n_cp
    }

    /// Number of data subcarriers N_u = N - N_n - 2 (always even).
    pub fn n_usable(&self) -> usize {
        self.n_fft - self.n_null - 2
    }

    /// CP ratio g = N_g / N.
    pub fn g(&self) -> f64 {
        self.n_cp as f64 / self.n_fft as f64
    }

    /// Usable-subcarrier ratio nu = N_u / N.
    pub fn nu(&self) -> f64 {
        self.n_usable() as f64 / self.n_fft as f64
    }

    /// Pairwise-correlation ratio Xi = N_u / (2 N).
    pub fn pair_ratio(&self) -> f64 {
        self.n_usable() as f64 / (2.0 * self.n_fft as f64)
    }
}

/// Decomposition of {0..N-1} into DC/Nyquist, null, and data subcarriers.
///
/// Layout is symmetric around N/2: `i2_plus` holds the lower data half,
/// `i1_plus` the lower null half, and the `*_minus` sets are their mirrors
/// under k <-> N-k. The three groups partition the full index range with
/// cardinalities 2, N_n, and N_u.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    pub i0: [usize; 2],
    pub i1_plus: Vec<usize>,
    pub i1_minus: Vec<usize>,
    pub i2_plus: Vec<usize>,
    pub i2_minus: Vec<usize>,
}

impl IndexSets {
    pub fn n_fft(&self) -> usize {
        self.i0[1] * 2
    }
}

/// Builds the index sets for a validated config.
pub fn build_index_sets(cfg: &SystemConfig) -> IndexSets {
    let n = cfg.n_fft;
    let half = n / 2;
    let data_hi = (n - cfg.n_null) / 2; // first null index on the lower side
    let i2_plus: Vec<usize> = (1..data_hi).collect();
    let i1_plus: Vec<usize> = (data_hi..half).collect();
    let i1_minus: Vec<usize> = i1_plus.iter().rev().map(|&k| n - k).collect();
    let i2_minus: Vec<usize> = i2_plus.iter().rev().map(|&k| n - k).collect();
    IndexSets {
        i0: [0, half],
        i1_plus,
        i1_minus,
        i2_plus,
        i2_minus,
    }
}

/// Sampling timing offsets: fractional phase `xi`, clock offset `eta`, and
/// the integer FFT-window shift.
///
/// Only the fractional part of the timing offset enters phase rotations;
/// `int_offset` matters solely for waveform-level resampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams {
    /// Fractional sampling phase offset in samples.
    pub xi: f64,
    /// Sampling clock offset (T'_sam - T_sam) / T_sam.
    pub eta: f64,
    /// Integer window shift Int{xi}, a left shift in [-(L-1), 0].
    pub int_offset: i64,
}

impl TimingParams {
    /// Validating constructor; `xi` must lie in [-0.5, 0.5].
    pub fn new(xi: f64, eta: f64, int_offset: i64) -> Result<Self> {
        if !(-0.5..=0.5).contains(&xi) {
            return Err(Error::config(format!("xi must be in [-0.5, 0.5], got {xi}")));
        }
        if !eta.is_finite() {
            return Err(Error::config("eta must be finite"));
        }
        if int_offset > 0 {
            return Err(Error::config(format!(
                "int_offset must be a left shift (<= 0), got {int_offset}"
            )));
        }
        Ok(TimingParams { xi, eta, int_offset })
    }

    pub fn offsets(xi: f64, eta: f64) -> Result<Self> {
        TimingParams::new(xi, eta, 0)
    }
}

/// Coefficient of eta in the per-block phase: D_q = pi N + 2 pi N_g + 2 pi q N_s.
pub fn eta_coefficient(q: usize, cfg: &SystemConfig) -> f64 {
    PI * cfg.n_fft as f64
        + 2.0 * PI * cfg.n_cp as f64
        + 2.0 * PI * (q * cfg.n_s()) as f64
}

/// Per-block increment of the mirror-pair phase, 2 pi N_s eta.
pub fn block_phase_step(eta: f64, cfg: &SystemConfig) -> f64 {
    2.0 * PI * cfg.n_s() as f64 * eta
}

/// Total mirror-pair phase of block q:
/// Theta_q = 2 pi xi + eta (pi N + 2 pi N_g + 2 pi q N_s).
///
/// Evaluated as base + q * step so the per-block increment stays constant to
/// the last bit across q instead of re-associating the polynomial per block.
pub fn block_phase(q: usize, timing: &TimingParams, cfg: &SystemConfig) -> f64 {
    let base = 2.0 * PI * timing.xi
        + timing.eta * (PI * cfg.n_fft as f64 + 2.0 * PI * cfg.n_cp as f64);
    (q as f64).mul_add(block_phase_step(timing.eta, cfg), base)
}

/// Frequency- vs time-domain tag for a [`BlockGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDomain {
    Frequency,
    Time,
}

/// Row-major complex matrix of `n_rows` OFDM blocks by `n_cols` subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    n_rows: usize,
    n_cols: usize,
    domain: GridDomain,
    data: Vec<Complex64>,
}

impl BlockGrid {
    pub fn zeros(n_rows: usize, n_cols: usize, domain: GridDomain) -> Self {
        BlockGrid {
            n_rows,
            n_cols,
            domain,
            data: vec![Complex64::ZERO; n_rows * n_cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>, domain: GridDomain) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(Error::dimension("grid needs at least one row"));
        }
        let n_cols = rows[0].len();
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::dimension("grid rows have unequal lengths"));
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            data.extend(r);
        }
        Ok(BlockGrid {
            n_rows,
            n_cols,
            domain,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn row(&self, q: usize) -> &[Complex64] {
        &self.data[q * self.n_cols..(q + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, q: usize) -> &mut [Complex64] {
        &mut self.data[q * self.n_cols..(q + 1) * self.n_cols]
    }

    pub fn at(&self, q: usize, k: usize) -> Complex64 {
        self.data[q * self.n_cols + k]
    }

    pub fn set(&mut self, q: usize, k: usize, v: Complex64) {
        self.data[q * self.n_cols + k] = v;
    }

    /// Largest |X_{q,k} - conj(X_{q,N-k})| over all rows and k in 1..N.
    pub fn max_hsp_violation(&self) -> f64 {
        let n = self.n_cols;
        let mut worst: f64 = 0.0;
        for q in 0..self.n_rows {
            let row = self.row(q);
            worst = worst.max(row[0].im.abs());
            if n % 2 == 0 {
                worst = worst.max(row[n / 2].im.abs());
            }
            for k in 1..n / 2 {
                worst = worst.max((row[k] - row[n - k].conj()).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n_fft: usize, n_cp: usize, n_blocks: usize, n_null: usize) -> SystemConfig {
        SystemConfig::new(n_fft, n_cp, n_blocks, n_null, 1e-8, Modulation::Psk(16), 1.0).unwrap()
    }

    /// Independent set-partition checker: every index in {0..N-1} appears in
    /// exactly one set, mirror sets pair under k <-> N-k, and cardinalities
    /// are 2 / N_n / N_u.
    fn check_partition(sets: &IndexSets, n: usize, n_null: usize) {
        let mut seen = vec![0usize; n];
        for &k in sets
            .i0
            .iter()
            .chain(sets.i1_plus.iter())
            .chain(sets.i1_minus.iter())
            .chain(sets.i2_plus.iter())
            .chain(sets.i2_minus.iter())
        {
            seen[k] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1), "not a partition: {seen:?}");
        assert_eq!(sets.i1_plus.len() + sets.i1_minus.len(), n_null);
        assert_eq!(
            sets.i2_plus.len() + sets.i2_minus.len(),
            n - n_null - 2,
            "Card{{I2}} must be N_u"
        );
        for (&k, &m) in sets.i1_plus.iter().zip(sets.i1_minus.iter().rev()) {
            assert_eq!(m, n - k);
        }
        for (&k, &m) in sets.i2_plus.iter().zip(sets.i2_minus.iter().rev()) {
            assert_eq!(m, n - k);
        }
    }

    #[test]
    fn index_sets_512_64() {
        let sets = build_index_sets(&cfg(512, 64, 10, 64));
        assert_eq!(sets.i2_plus, (1..=223).collect::<Vec<_>>());
        assert_eq!(sets.i1_plus, (224..=255).collect::<Vec<_>>());
        assert_eq!(sets.i0, [0, 256]);
        assert_eq!(sets.i2_plus.len() * 2, 446); // Card{I2} = N - N_n - 2
        check_partition(&sets, 512, 64);
    }

    #[test]
    fn index_sets_no_guard_band() {
        let sets = build_index_sets(&cfg(8, 2, 1, 0));
        assert_eq!(sets.i2_plus, vec![1, 2, 3]);
        assert!(sets.i1_plus.is_empty() && sets.i1_minus.is_empty());
        assert_eq!(sets.i0, [0, 4]);
        check_partition(&sets, 8, 0);
    }

    #[test]
    fn index_sets_16_4_exhaustive() {
        let sets = build_index_sets(&cfg(16, 4, 2, 4));
        assert_eq!(sets.i2_plus, vec![1, 2, 3, 4, 5]);
        assert_eq!(sets.i1_plus, vec![6, 7]);
        check_partition(&sets, 16, 4);
    }

    #[test]
    fn config_rejections() {
        assert!(SystemConfig::new(500, 64, 10, 64, 1e-8, Modulation::Psk(16), 1.0).is_err());
        assert!(SystemConfig::new(512, 64, 10, 63, 1e-8, Modulation::Psk(16), 1.0).is_err());
        assert!(SystemConfig::new(512, 64, 10, 510, 1e-8, Modulation::Psk(16), 1.0).is_err());
        assert!(SystemConfig::new(512, 64, 0, 64, 1e-8, Modulation::Psk(16), 1.0).is_err());
        assert!(SystemConfig::new(512, 64, 10, 64, 1e-8, Modulation::Psk(3), 1.0).is_err());
        assert!(SystemConfig::new(512, 64, 10, 64, 1e-8, Modulation::Qam(8), 1.0).is_err());
    }

    #[test]
    fn derived_ratios() {
        let c = cfg(512, 64, 10, 64);
        assert_eq!(c.n_s(), 576);
        assert_eq!(c.n_usable(), 446);
        assert!((c.g() - 0.125).abs() < 1e-15);
        assert!((c.nu() - 446.0 / 512.0).abs() < 1e-15);
        assert!((c.pair_ratio() - 223.0 / 512.0).abs() < 1e-15);
    }

    #[test]
    fn timing_params_bounds() {
        assert!(TimingParams::new(0.5, 0.0, 0).is_ok());
        assert!(TimingParams::new(0.51, 0.0, 0).is_err());
        assert!(TimingParams::new(0.0, 0.0, 1).is_err());
        assert!(TimingParams::new(0.0, f64::NAN, 0).is_err());
    }

    #[test]
    fn block_phase_zero_offsets() {
        let c = cfg(512, 64, 10, 64);
        let t = TimingParams::offsets(0.0, 0.0).unwrap();
        for q in 0..10 {
            assert_eq!(block_phase(q, &t, &c), 0.0);
        }
    }

    #[test]
    fn block_phase_reference_value() {
        // Direct high-precision evaluation of
        // 2*pi*0.1 + 1e-5 * (pi*512 + 2*pi*64) = 0.6484247237009334 rad.
        let c = cfg(512, 64, 10, 64);
        let t = TimingParams::offsets(0.1, 1e-5).unwrap();
        assert!((block_phase(0, &t, &c) - 0.648_424_723_700_933_4).abs() < 1e-12);
    }

    #[test]
    fn block_phase_step_is_constant_in_q() {
        let c = cfg(512, 64, 10, 64);
        let t = TimingParams::offsets(0.1, 1e-5).unwrap();
        let step = block_phase_step(1e-5, &c);
        assert!((step - 0.036_191_147_369_995_46).abs() < 1e-12);
        for q in 0..32 {
            let d = block_phase(q + 1, &t, &c) - block_phase(q, &t, &c);
            assert!(
                (d - step).abs() <= 4.0 * f64::EPSILON * block_phase(q + 1, &t, &c).abs().max(1.0),
                "q={q}: got {d}, want {step}"
            );
        }
    }

    #[test]
    fn eta_coefficient_reference_value() {
        let c = cfg(512, 64, 10, 64);
        assert!((eta_coefficient(0, &c) - 2010.619_298_297_467_6).abs() < 1e-9);
        let two_pi_ns = 2.0 * std::f64::consts::PI * 576.0;
        assert!((eta_coefficient(5, &c) - eta_coefficient(4, &c) - two_pi_ns).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn index_sets_partition_random_configs(exp in 3usize..11, null_frac in 0.0f64..0.9) {
            let n = 1usize << exp;
            let max_null = (n - 4) / 2 * 2;
            let n_null = ((max_null as f64 * null_frac) as usize) / 2 * 2;
            let c = cfg(n, n / 8, 2, n_null);
            let sets = build_index_sets(&c);
            check_partition(&sets, n, n_null);
            prop_assert_eq!(sets.i2_plus.len(), c.n_usable() / 2);
        }

        #[test]
        fn block_phase_difference_constancy(xi in -0.5f64..0.5, eta in -1e-3f64..1e-3) {
            let c = cfg(512, 64, 10, 64);
            let t = TimingParams::offsets(xi, eta).unwrap();
            let step = block_phase_step(eta, &c);
            for q in 0..16 {
                let d = block_phase(q + 1, &t, &c) - block_phase(q, &t, &c);
                let scale = block_phase(q + 1, &t, &c).abs().max(1.0);
                prop_assert!((d - step).abs() <= 8.0 * f64::EPSILON * scale);
            }
        }
    }
}
