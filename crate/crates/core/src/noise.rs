//! Time-domain noise generators for power-line links and frequency-domain
//! Gaussianity diagnostics.
//!
//! All generators draw from an explicit RNG stream and are normalized so
//! their stated total power is exact in expectation. The diagnostics work on
//! per-frame FFT outputs: skewness, kurtosis, and the D'Agostino K^2 omnibus
//! test are computed over the usable subcarriers of each frame and averaged
//! across frames.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::fft;
use crate::system::{BlockGrid, GridDomain};

/// Tagged description of one noise model. Power parameters are the model's
/// natural ones; the harness rescales them to hit a target SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    Awgn {
        sigma_w2: f64,
    },
    /// Poisson-Gaussian mixture: impulsive index `a`, background-to-impulse
    /// power ratio `t`, background variance `sigma_g2`.
    ClassA {
        a: f64,
        t: f64,
        sigma_g2: f64,
    },
    /// Envelope-Nakagami background noise with fading figure `m` and second
    /// moment `omega`.
    Nakagami {
        m: f64,
        omega: f64,
    },
    /// Gaussian noise whose instantaneous variance follows sin^2 at the
    /// mains period `t_ac`, renormalized per block of `block_len` samples.
    Cyclo {
        sigma_w2: f64,
        t_ac: f64,
        n0: u64,
        block_len: usize,
    },
    /// 1/f^beta spectrally shaped Gaussian noise.
    Colored {
        beta: f64,
        sigma_w2: f64,
    },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Awgn { sigma_w2 } => {
                if sigma_w2 < 0.0 {
                    return Err(Error::config("sigma_w2 must be nonnegative"));
                }
            }
            NoiseSpec::ClassA { a, t, sigma_g2 } => {
                if !(a > 0.0 && t > 0.0 && sigma_g2 > 0.0) {
                    return Err(Error::config("Class-A needs a, t, sigma_g2 > 0"));
                }
            }
            NoiseSpec::Nakagami { m, omega } => {
                if m < 0.5 {
                    return Err(Error::config(format!("Nakagami m must be >= 0.5, got {m}")));
                }
                if !(omega > 0.0) {
                    return Err(Error::config("Nakagami omega must be positive"));
                }
            }
            NoiseSpec::Cyclo {
                sigma_w2,
                t_ac,
                block_len,
                ..
            } => {
                if sigma_w2 < 0.0 || !(t_ac > 0.0) || block_len == 0 {
                    return Err(Error::config("cyclo needs sigma_w2 >= 0, t_ac > 0, block_len > 0"));
                }
            }
            NoiseSpec::Colored { beta, sigma_w2 } => {
                if !(beta > 0.0 && beta < 2.0) {
                    return Err(Error::config(format!("beta must be in (0, 2), got {beta}")));
                }
                if sigma_w2 < 0.0 {
                    return Err(Error::config("sigma_w2 must be nonnegative"));
                }
            }
        }
        Ok(())
    }
}

/// I.i.d. zero-mean Gaussian samples with variance `sigma_w2`.
pub fn gen_awgn<R: Rng + ?Sized>(rng: &mut R, n: usize, sigma_w2: f64) -> Vec<f64> {
    let std = sigma_w2.sqrt();
    (0..n)
        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Middleton Class-A samples: per sample draw p ~ Poisson(a), then a
/// Gaussian with variance sigma_p^2 = sigma_g2 (p/a + t)/t. Total mean power
/// is sigma_g2 (1 + t)/t.
pub fn gen_class_a<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    a: f64,
    t: f64,
    sigma_g2: f64,
) -> Vec<f64> {
    let poisson = Poisson::new(a).expect("validated a > 0");
    (0..n)
        .map(|_| {
            let p = poisson.sample(rng);
            let var = sigma_g2 * (p / a + t) / t;
            var.sqrt() * rng.sample::<f64, _>(StandardNormal)
        })
        .collect()
}

/// Complex Class-A noise: independent in-phase and quadrature mixtures with
/// background power sigma_g2 split across the rails, so the total mean power
/// is sigma_g2 (1 + t)/t and the spectrum is CN(0, (t+1)/t sigma_g2).
///
/// This is the process the frequency-domain diagnostics transform directly
/// (the background-noise models transform only the real part instead).
pub fn gen_class_a_complex<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    a: f64,
    t: f64,
    sigma_g2: f64,
) -> Vec<Complex64> {
    let re = gen_class_a(rng, n, a, t, sigma_g2 / 2.0);
    let im = gen_class_a(rng, n, a, t, sigma_g2 / 2.0);
    re.into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect()
}

/// Complex Nakagami-m background noise: envelope u = sqrt(Gamma(m, omega/m)),
/// uniform phase, so E{|w|^2} = omega. The real-part process used on a
/// baseband link is sqrt(2) Re{w} (see [`generate`]).
pub fn gen_nakagami<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: f64,
    omega: f64,
) -> Result<Vec<Complex64>> {
    if m < 0.5 {
        return Err(Error::config(format!("Nakagami m must be >= 0.5, got {m}")));
    }
    if !(omega > 0.0) {
        return Err(Error::config("Nakagami omega must be positive"));
    }
    let gamma = Gamma::new(m, omega / m).map_err(|e| Error::config(format!("gamma: {e}")))?;
    Ok((0..n)
        .map(|_| {
            let u = gamma.sample(rng).sqrt();
            let zeta = rng.random_range(-PI..PI);
            Complex64::from_polar(u, zeta)
        })
        .collect())
}

/// Cyclo-stationary Gaussian noise: variance A_q^2 sin^2(2 pi t / t_ac),
/// with A_q per block of `block_len` samples chosen so each block's average
/// power is exactly `sigma_w2`. Sample i sits at t = (n0 + i) t_sam.
pub fn gen_cyclostationary<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    sigma_w2: f64,
    t_ac: f64,
    t_sam: f64,
    n0: u64,
    block_len: usize,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut i = 0usize;
    while i < n {
        let len = block_len.min(n - i);
        let sin2: Vec<f64> = (0..len)
            .map(|j| {
                let t = (n0 + (i + j) as u64) as f64 * t_sam;
                (2.0 * PI * t / t_ac).sin().powi(2)
            })
            .collect();
        let sum: f64 = sin2.iter().sum();
        // A_q^2 normalizes the block's average energy to sigma_w2.
        let aq2 = if sum > 0.0 {
            len as f64 * sigma_w2 / sum
        } else {
            0.0
        };
        for s2 in sin2 {
            let var = aq2 * s2;
            out.push(var.sqrt() * rng.sample::<f64, _>(StandardNormal));
        }
        i += len;
    }
    out
}

/// 1/f^beta colored Gaussian noise with total power `sigma_w2`.
///
/// White Gaussian spectral coefficients are shaped by f^(-beta/2) (the DC
/// bin reuses the first nonzero frequency's weight) and scaled analytically
/// so the per-sample variance is sigma_w2 in expectation.
pub fn gen_colored<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    beta: f64,
    sigma_w2: f64,
) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::config(format!("beta must be in (0, 2), got {beta}")));
    }
    if n < 2 {
        return Err(Error::config("colored noise needs n >= 2"));
    }
    let shape2 = |f: usize| -> f64 {
        let eff = f.min(n - f).max(1) as f64;
        eff.powf(-beta)
    };
    let total_shape: f64 = (0..n).map(shape2).sum();
    // Var(x_m) = (1/n^2) sum_f E|Z_f|^2 with E|Z_f|^2 = c * shape2(f).
    let c = sigma_w2 * n as f64 * n as f64 / total_shape;
    let mut spec = vec![Complex64::ZERO; n];
    spec[0] = Complex64::new((c * shape2(0)).sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
    let half = n / 2;
    if n % 2 == 0 {
        spec[half] =
            Complex64::new((c * shape2(half)).sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
    }
    for f in 1..(n + 1) / 2 {
        let std = (c * shape2(f) / 2.0).sqrt();
        let z = Complex64::new(
            std * rng.sample::<f64, _>(StandardNormal),
            std * rng.sample::<f64, _>(StandardNormal),
        );
        spec[f] = z;
        spec[n - f] = z.conj();
    }
    fft::inverse(&mut spec);
    Ok(spec.iter().map(|v| v.re / n as f64).collect())
}

/// Draws `n` real time-domain samples for any [`NoiseSpec`].
pub fn generate<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    rng: &mut R,
    n: usize,
    t_sam: f64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    match *spec {
        NoiseSpec::Awgn { sigma_w2 } => Ok(gen_awgn(rng, n, sigma_w2)),
        NoiseSpec::ClassA { a, t, sigma_g2 } => Ok(gen_class_a(rng, n, a, t, sigma_g2)),
        NoiseSpec::Nakagami { m, omega } => {
            // sqrt(2) Re{w}: compensates for dropping the quadrature part,
            // keeping E{sample^2} = omega.
            let w = gen_nakagami(rng, n, m, omega)?;
            Ok(w.iter().map(|v| std::f64::consts::SQRT_2 * v.re).collect())
        }
        NoiseSpec::Cyclo {
            sigma_w2,
            t_ac,
            n0,
            block_len,
        } => Ok(gen_cyclostationary(rng, n, sigma_w2, t_ac, t_sam, n0, block_len)),
        NoiseSpec::Colored { beta, sigma_w2 } => gen_colored(rng, n, beta, sigma_w2),
    }
}

/// Frequency-domain Gaussianity summary, averaged over frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianityReport {
    /// Mean in-phase sample kurtosis per frame (3 for Gaussian).
    pub kurtosis: f64,
    /// Mean in-phase sample skewness per frame.
    pub skewness: f64,
    /// Mean D'Agostino K^2 p-value per frame.
    pub p_value: f64,
    /// Fraction of frames whose K^2 test keeps the Gaussian hypothesis at
    /// significance 0.05.
    pub accept_rate: f64,
    /// Total in-phase samples used across all frames.
    pub n_samples: usize,
}

fn sample_moments(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    (m3 / m2.powf(1.5), m4 / (m2 * m2))
}

/// D'Agostino K^2 omnibus statistic: skewness and kurtosis transformed to
/// approximately standard-normal Z-scores; K^2 = Z1^2 + Z2^2 ~ chi^2(2), so
/// the p-value is exp(-K^2 / 2).
pub fn dagostino_k2(x: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 20 {
        return Err(Error::config(format!("K^2 test needs n >= 20, got {n}")));
    }
    let nf = n as f64;
    let (skew, kurt) = sample_moments(x);

    // Skewness transform (D'Agostino 1970).
    let y = skew * ((nf + 1.0) * (nf + 3.0) / (6.0 * (nf - 2.0))).sqrt();
    let beta2 = 3.0 * (nf * nf + 27.0 * nf - 70.0) * (nf + 1.0) * (nf + 3.0)
        / ((nf - 2.0) * (nf + 5.0) * (nf + 7.0) * (nf + 9.0));
    let w2 = (2.0 * (beta2 - 1.0)).sqrt() - 1.0;
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    let ya = y / alpha;
    let z1 = delta * (ya + (ya * ya + 1.0).sqrt()).ln();

    // Kurtosis transform (Anscombe-Glynn 1983).
    let e = 3.0 * (nf - 1.0) / (nf + 1.0);
    let var = 24.0 * nf * (nf - 2.0) * (nf - 3.0) / ((nf + 1.0).powi(2) * (nf + 3.0) * (nf + 5.0));
    let x_std = (kurt - e) / var.sqrt();
    let root_b1 = 6.0 * (nf * nf - 5.0 * nf + 2.0) / ((nf + 7.0) * (nf + 9.0))
        * (6.0 * (nf + 3.0) * (nf + 5.0) / (nf * (nf - 2.0) * (nf - 3.0))).sqrt();
    let a = 6.0 + 8.0 / root_b1 * (2.0 / root_b1 + (1.0 + 4.0 / (root_b1 * root_b1)).sqrt());
    let denom = 1.0 + x_std * (2.0 / (a - 4.0)).sqrt();
    let z2 = ((1.0 - 2.0 / (9.0 * a)) - ((1.0 - 2.0 / a) / denom).cbrt())
        / (2.0 / (9.0 * a)).sqrt();

    let k2 = z1 * z1 + z2 * z2;
    Ok((k2, (-k2 / 2.0).exp()))
}

/// FFTs consecutive N-sample frames of a real sequence (1/sqrt(N) scaling).
pub fn spectrum_frames(samples: &[f64], n_fft: usize) -> Result<BlockGrid> {
    let complex: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    spectrum_frames_complex(&complex, n_fft)
}

/// FFTs consecutive N-sample frames of a complex sequence.
pub fn spectrum_frames_complex(samples: &[Complex64], n_fft: usize) -> Result<BlockGrid> {
    let frames = samples.len() / n_fft;
    if frames == 0 {
        return Err(Error::dimension("need at least one full frame"));
    }
    let scale = 1.0 / (n_fft as f64).sqrt();
    let mut grid = BlockGrid::zeros(frames, n_fft, GridDomain::Frequency);
    let mut buf = vec![Complex64::ZERO; n_fft];
    for f in 0..frames {
        buf.copy_from_slice(&samples[f * n_fft..(f + 1) * n_fft]);
        fft::forward(&mut buf);
        for (dst, &v) in grid.row_mut(f).iter_mut().zip(buf.iter()) {
            *dst = v * scale;
        }
    }
    Ok(grid)
}

/// Gaussianity diagnostics over a frequency-domain grid (rows = frames).
///
/// Per frame, the in-phase values Re{W_k} on the usable subcarriers
/// k in 1..N/2 (DC and Nyquist excluded; mirrors duplicate the in-phase
/// part) form one test sample. Statistics are averaged over frames.
pub fn gaussianity_report(grid: &BlockGrid) -> Result<GaussianityReport> {
    let n = grid.n_cols();
    if n < 44 {
        return Err(Error::dimension("need n_fft >= 44 for the K^2 test"));
    }
    if grid.n_rows() < 100 {
        return Err(Error::config(format!(
            "need at least 100 frames (100 samples per subcarrier), got {}",
            grid.n_rows()
        )));
    }
    let (mut kurt_sum, mut skew_sum, mut p_sum, mut accepted) = (0.0, 0.0, 0.0, 0usize);
    let mut used = 0usize;
    for q in 0..grid.n_rows() {
        let row = grid.row(q);
        let sample: Vec<f64> = (1..n / 2).map(|k| row[k].re).collect();
        let (skew, kurt) = sample_moments(&sample);
        let (_, p) = dagostino_k2(&sample)?;
        kurt_sum += kurt;
        skew_sum += skew;
        p_sum += p;
        if p > 0.05 {
            accepted += 1;
        }
        used += sample.len();
    }
    let frames = grid.n_rows() as f64;
    Ok(GaussianityReport {
        kurtosis: kurt_sum / frames,
        skewness: skew_sum / frames,
        p_value: p_sum / frames,
        accept_rate: accepted as f64 / frames,
        n_samples: used,
    })
}
