//! Small shared helpers for FFT-based spectral steps.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Signed frequency index in standard FFT bin order; for even n the
/// Nyquist bin n/2 is reported as -n/2.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT-ordered conjugate-variable values for n samples with spacing
/// `delta`: value_k = 2 pi k_signed / (n delta).
pub fn conjugate_axis(n: usize, delta: f64) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / (n as f64 * delta);
    (0..n).map(|i| signed_index(i, n) as f64 * step).collect()
}

/// Forward/inverse FFT pair of a fixed length with the 1/n factor applied
/// on the inverse, so `inverse(forward(x)) == x` up to roundoff.
pub struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            len,
        }
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
        let scale = 1.0 / self.len as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }

    /// Unnormalized inverse; callers fold the 1/n factor into their own
    /// scaling.
    pub fn inverse_unnormalized(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
    }
}

/// exp(-i phi) for each phase, used to bake diagonal propagator factors.
pub fn phase_factors(phases: impl Iterator<Item = f64>) -> Vec<Complex64> {
    phases.map(|phi| Complex64::from_polar(1.0, -phi)).collect()
}

/// Discrete L2 norm of a complex vector (no measure factor).
pub fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_indices_standard_order() {
        assert_eq!(
            (0..8).map(|i| signed_index(i, 8)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -4, -3, -2, -1]
        );
        assert_eq!(
            (0..5).map(|i| signed_index(i, 5)).collect::<Vec<_>>(),
            vec![0, 1, 2, -2, -1]
        );
    }

    #[test]
    fn round_trip_is_identity() {
        let pair = FftPair::new(16);
        let mut buf: Vec<Complex64> =
            (0..16).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let original = buf.clone();
        pair.forward(&mut buf);
        pair.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&original) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
