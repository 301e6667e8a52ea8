//! Command-line front end: Monte Carlo runs, closed-form SNR sweeps,
//! noise Gaussianity fitting, and feasibility checks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use plcsync::analytics;
use plcsync::error::Error;
use plcsync::harness::{self, parse_scenario};
use plcsync::noise::{self, NoiseSpec};
use plcsync::system::{Modulation, SystemConfig, TimingParams};

#[derive(Parser)]
#[command(name = "plcsync", version, about = "Baseband OFDM sampling-timing simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// Subcarriers N (power of two).
    #[arg(long, default_value_t = 512)]
    n_fft: usize,
    /// Cyclic prefix length N_g in samples.
    #[arg(long, default_value_t = 64)]
    n_cp: usize,
    /// OFDM blocks Q per frame.
    #[arg(long, default_value_t = 10)]
    n_blocks: usize,
    /// Total null subcarriers N_n.
    #[arg(long, default_value_t = 64)]
    n_null: usize,
    /// Sampling interval in seconds.
    #[arg(long, default_value_t = 1e-8)]
    t_sam: f64,
}

impl SystemArgs {
    fn config(&self) -> Result<SystemConfig, Error> {
        SystemConfig::new(
            self.n_fft,
            self.n_cp,
            self.n_blocks,
            self.n_null,
            self.t_sam,
            Modulation::Psk(16),
            1.0,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo scenario file and emit result CSV.
    Simulate {
        /// Scenario file (key = value lines).
        scenario: PathBuf,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed-form variance/bias predictions over an SNR sweep.
    Analyze {
        /// Sweep as start:end:step in dB.
        #[arg(long, value_name = "A:B:STEP")]
        snr_sweep: String,
        #[command(flatten)]
        sys: SystemArgs,
        /// Sampling phase offset.
        #[arg(long, default_value_t = 0.1)]
        xi: f64,
        /// Sampling clock offset.
        #[arg(long, default_value_t = 1e-5)]
        eta: f64,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency-domain Gaussianity report for a noise model.
    NoiseFit {
        /// Noise model: awgn | class_a | nakagami | cyclo | colored.
        #[arg(long)]
        variant: String,
        /// Comma-separated model parameters, e.g. "a=1,t=0.1".
        #[arg(long, default_value = "")]
        params: String,
        /// Number of FFT frames.
        #[arg(long, default_value_t = 500)]
        frames: usize,
        #[arg(long, default_value_t = 512)]
        n_fft: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a timing point against the unwrapping feasibility hexagon.
    Feasibility {
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        eta: f64,
        #[command(flatten)]
        sys: SystemArgs,
    },
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("bad sweep '{spec}', expected a:b:step")));
    }
    let a: f64 = parts[0].parse().map_err(|_| Error::config("bad sweep start"))?;
    let b: f64 = parts[1].parse().map_err(|_| Error::config("bad sweep end"))?;
    let step: f64 = parts[2].parse().map_err(|_| Error::config("bad sweep step"))?;
    if !(step > 0.0) || b < a {
        return Err(Error::config("sweep needs step > 0 and end >= start"));
    }
    let mut out = Vec::new();
    let mut v = a;
    while v <= b + 1e-9 {
        out.push(v);
        v += step;
    }
    Ok(out)
}

fn parse_params(spec: &str) -> Result<Vec<(String, f64)>, Error> {
    let mut out = Vec::new();
    for chunk in spec.split(',') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (k, v) = chunk
            .split_once('=')
            .ok_or_else(|| Error::config(format!("bad parameter '{chunk}', expected k=v")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad parameter value in '{chunk}'")))?;
        out.push((k.trim().to_string(), v));
    }
    Ok(out)
}

fn lookup(params: &[(String, f64)], key: &str, default: f64) -> f64 {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|&(_, v)| v)
        .unwrap_or(default)
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            workers,
            seed,
        } => {
            let text = std::fs::read_to_string(&scenario)?;
            let mut s = parse_scenario(&text)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let rows = match workers {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::config(format!("worker pool: {e}")))?
                    .install(|| harness::run_scenario(&s)),
                None => harness::run_scenario(&s),
            }?;
            write_or_print(&out, &harness::csv_string(&rows)?)
        }
        Command::Analyze {
            snr_sweep,
            sys,
            xi,
            eta,
            out,
        } => {
            let cfg = sys.config()?;
            let timing = TimingParams::new(xi, eta, 0)?;
            let mut csv = String::from("snr_db,var_xi,var_eta,bias_xi,bias_eta,mse_xi,mse_eta\n");
            for snr_db in parse_sweep(&snr_sweep)? {
                let p = analytics::predict(&cfg, &timing, 10f64.powf(snr_db / 10.0))?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    snr_db, p.var_xi, p.var_eta, p.bias_xi, p.bias_eta, p.mse_xi, p.mse_eta
                ));
            }
            write_or_print(&out, &csv)
        }
        Command::NoiseFit {
            variant,
            params,
            frames,
            n_fft,
            seed,
            out,
        } => {
            let p = parse_params(&params)?;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = frames * n_fft;
            // Class-A is transformed as a complex process; the background
            // models transform the real part.
            let grid = if variant == "class_a" {
                let samples = noise::gen_class_a_complex(
                    &mut rng,
                    n,
                    lookup(&p, "a", 1.0),
                    lookup(&p, "t", 1.0),
                    lookup(&p, "sigma_g2", 1.0),
                );
                noise::spectrum_frames_complex(&samples, n_fft)?
            } else {
                let spec = match variant.as_str() {
                    "awgn" => NoiseSpec::Awgn {
                        sigma_w2: lookup(&p, "sigma_w2", 1.0),
                    },
                    "nakagami" => NoiseSpec::Nakagami {
                        m: lookup(&p, "m", 1.0),
                        omega: lookup(&p, "omega", 1.0),
                    },
                    "cyclo" => NoiseSpec::Cyclo {
                        sigma_w2: lookup(&p, "sigma_w2", 1.0),
                        t_ac: lookup(&p, "t_ac", 1.0 / 60.0),
                        n0: lookup(&p, "n0", 0.0) as u64,
                        block_len: n_fft,
                    },
                    "colored" => NoiseSpec::Colored {
                        beta: lookup(&p, "beta", 0.72),
                        sigma_w2: lookup(&p, "sigma_w2", 1.0),
                    },
                    other => {
                        return Err(Error::config(format!("unknown noise variant '{other}'")))
                    }
                };
                let samples = noise::generate(&spec, &mut rng, n, 1e-8)?;
                noise::spectrum_frames(&samples, n_fft)?
            };
            let report = noise::gaussianity_report(&grid)?;
            let csv = format!(
                "variant,params,kurtosis,skewness,p_value,accept_rate\n{},{},{},{},{},{}\n",
                variant,
                if params.is_empty() { "-" } else { &params },
                report.kurtosis,
                report.skewness,
                report.p_value,
                report.accept_rate
            );
            write_or_print(&out, &csv)
        }
        Command::Feasibility { xi, eta, sys } => {
            let cfg = sys.config()?;
            let timing = TimingParams {
                xi,
                eta,
                int_offset: 0,
            };
            let f = analytics::feasibility(&timing, &cfg);
            println!("{}", if f.inside { "inside" } else { "outside" });
            println!("c1 = {} (|c1| <= pi required)", f.c1_value);
            println!("c2 = {} (|c2| <= 2 pi required)", f.c2_value);
            for (i, v) in f.vertices.iter().enumerate() {
                println!("A{} = ({}, {})", i + 1, v[0], v[1]);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) => {
            eprintln!("error: io: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
