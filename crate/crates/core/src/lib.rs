//! Baseband OFDM sampling-timing toolkit.
//!
//! Simulates a baseband (Hermitian-symmetric) OFDM link over multipath
//! channels with power-line noise models, and estimates the sampling phase
//! offset (SPO) and sampling clock offset (SCO) jointly from the phase
//! rotation of mirror-subcarrier products across consecutive blocks.
//! Closed-form variance/bias predictions and a Monte Carlo harness
//! reproduce the estimator's behaviour at desk scale.

pub mod analytics;
pub mod channel;
pub mod error;
mod fft;
pub mod estimator;
pub mod harness;
pub mod noise;
pub mod ofdm;
pub mod system;

pub use error::{Error, Result};
