//! Shared FFT plumbing: thread-local planner so hot loops reuse plans.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// In-place unnormalized forward DFT.
pub(crate) fn forward(buf: &mut [Complex64]) {
    forward_plan(buf.len()).process(buf);
}

/// In-place unnormalized inverse DFT.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}
