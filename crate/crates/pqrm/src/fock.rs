//! Standard quantum Rabi model in a truncated Fock space, evolved by
//! exact eigendecomposition.
//!
//! Qubit basis: index 0 is the upper state (sigma_z = +1), index 1 the
//! lower. The momentum-branch states map onto sigma_x eigenstates:
//! branch n_b = 0 (p = -2 hbar k at q = 0) is sigma_x = +1.
//!
//! The coupling i g sigma_x (a+ - a) has imaginary matrix elements; the
//! basis rotation |n> -> i^n |n> turns it into g sigma_x (real symmetric
//! ladder), so the full Hamiltonian becomes real symmetric and a single
//! real eigendecomposition drives the evolution exactly.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::InitialState;
use crate::params::PhysicalParams;
use crate::spectral;

/// Default Fock-space truncation; ample margin above the deep strong
/// coupling peak excitation 4 (g/omega)^2 at the experiment's parameters.
pub const DEFAULT_N_MAX: usize = 600;
/// Tolerated population in the top 10% of Fock levels.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

/// Complex amplitudes over (qubit x truncated Fock space), unit norm.
#[derive(Debug, Clone)]
pub struct FockState {
    n_max: usize,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl FockState {
    pub fn new(n_max: usize, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != 2 * (n_max + 1) {
            return Err(Error::Validation(format!(
                "amplitude vector length {} does not match 2 (n_max+1) = {}",
                amplitudes.len(),
                2 * (n_max + 1)
            )));
        }
        let mut state = Self { n_max, amplitudes, time };
        let n = spectral::norm(&state.amplitudes);
        if n > 0.0 {
            let inv = 1.0 / n;
            for z in state.amplitudes.iter_mut() {
                *z *= inv;
            }
        }
        Ok(state)
    }

    /// Oscillator vacuum with the qubit state matching the given
    /// initial-state family.
    pub fn vacuum(kind: InitialState, n_max: usize) -> Result<Self> {
        let dim = n_max + 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * dim];
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        match kind {
            // (|e> + |g>)/sqrt2 = sigma_x +1: the -2 hbar k branch.
            InitialState::MomentumKick => {
                amps[0] = Complex64::new(inv_sqrt2, 0.0);
                amps[dim] = Complex64::new(inv_sqrt2, 0.0);
            }
            InitialState::QubitG => amps[dim] = Complex64::new(1.0, 0.0),
            InitialState::QubitE => amps[0] = Complex64::new(1.0, 0.0),
            // (|x+> + e^{i phi} |x->)/sqrt2 with |x-> = (|g> - |e>)/sqrt2,
            // matching the grid construction: phase 0 is qubit g.
            InitialState::Superposition { phase } => {
                let half = Complex64::new(0.5, 0.0);
                let rot = Complex64::from_polar(0.5, phase);
                amps[0] = half - rot;
                amps[dim] = half + rot;
            }
        }
        Self::new(n_max, amps, 0.0)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn norm(&self) -> f64 {
        spectral::norm(&self.amplitudes)
    }

    fn amp(&self, s: usize, n: usize) -> Complex64 {
        self.amplitudes[s * (self.n_max + 1) + n]
    }

    /// <a+ a>.
    pub fn mean_n(&self) -> f64 {
        let dim = self.n_max + 1;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| (i % dim) as f64 * z.norm_sqr())
            .sum()
    }

    /// Qubit <sigma_x>: the momentum-branch occupation difference.
    pub fn sigma_x(&self) -> f64 {
        (0..=self.n_max)
            .map(|n| 2.0 * (self.amp(0, n).conj() * self.amp(1, n)).re)
            .sum()
    }

    /// (<a>, <a^2>) for quadrature observables.
    pub fn ladder_moments(&self) -> (Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        for s in 0..2 {
            for n in 0..self.n_max {
                a += self.amp(s, n).conj() * ((n + 1) as f64).sqrt() * self.amp(s, n + 1);
            }
            for n in 0..self.n_max.saturating_sub(1) {
                let w = (((n + 1) * (n + 2)) as f64).sqrt();
                a2 += self.amp(s, n).conj() * w * self.amp(s, n + 2);
            }
        }
        (a, a2)
    }

    /// Population in the top 10% of Fock levels (both qubit branches).
    pub fn top_level_population(&self) -> f64 {
        let dim = self.n_max + 1;
        let cut = dim - dim / 10;
        let mut total = 0.0;
        for s in 0..2 {
            for n in cut..dim {
                total += self.amp(s, n).norm_sqr();
            }
        }
        total
    }
}

/// |<a|b>|^2; truncations must match.
pub fn qrm_overlap(a: &FockState, b: &FockState) -> Result<f64> {
    if a.n_max != b.n_max {
        return Err(Error::MismatchedTruncation { a: a.n_max, b: b.n_max });
    }
    let dot: Complex64 =
        a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    Ok(dot.norm_sqr())
}

/// Exact propagator for the truncated Rabi Hamiltonian.
pub struct QrmPropagator {
    n_max: usize,
    eigenvalues: Vec<f64>,
    /// Column-orthonormal eigenvector matrix of the rotated Hamiltonian.
    eigenvectors: DMatrix<f64>,
}

impl QrmPropagator {
    pub fn new(params: &PhysicalParams, n_max: usize) -> Result<Self> {
        Self::from_frequencies(
            params.trap_freq(),
            params.qubit_split(),
            params.derive().coupling,
            n_max,
        )
    }

    /// Build directly from the mode triple (rad/s).
    pub fn from_frequencies(omega: f64, omega_q: f64, g: f64, n_max: usize) -> Result<Self> {
        if n_max < 10 {
            return Err(Error::Validation(format!("n_max too small: {n_max}")));
        }
        let dim = n_max + 1;
        let size = 2 * dim;
        let mut h = DMatrix::<f64>::zeros(size, size);
        for s in 0..2 {
            let sz = if s == 0 { 1.0 } else { -1.0 };
            for n in 0..dim {
                h[(s * dim + n, s * dim + n)] = omega * n as f64 + 0.5 * omega_q * sz;
            }
        }
        // Rotated coupling: g sigma_x (ladder + ladder^T).
        for n in 0..n_max {
            let w = g * ((n + 1) as f64).sqrt();
            for (s, sp) in [(0, 1), (1, 0)] {
                h[(s * dim + n + 1, sp * dim + n)] += w;
                h[(s * dim + n, sp * dim + n + 1)] += w;
            }
        }
        debug_assert!(is_symmetric(&h));
        let eig = SymmetricEigen::new(h);
        Ok(Self {
            n_max,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Advance the state by `duration` seconds (exact for any duration)
    /// and enforce the truncation-adequacy invariant.
    pub fn propagate(&self, state: &mut FockState, duration: f64) -> Result<()> {
        if state.n_max != self.n_max {
            return Err(Error::MismatchedTruncation { a: state.n_max, b: self.n_max });
        }
        let size = 2 * (self.n_max + 1);
        // Into the rotated basis: c_rot(n) = i^{-n} c(n).
        let mut re = nalgebra::DVector::<f64>::zeros(size);
        let mut im = nalgebra::DVector::<f64>::zeros(size);
        let dim = self.n_max + 1;
        for (i, z) in state.amplitudes.iter().enumerate() {
            let rotated = z * inv_i_power(i % dim);
            re[i] = rotated.re;
            im[i] = rotated.im;
        }
        let mut ye = self.eigenvectors.tr_mul(&re);
        let mut yi = self.eigenvectors.tr_mul(&im);
        for m in 0..size {
            let phi = self.eigenvalues[m] * duration;
            let (sin, cos) = (-phi).sin_cos();
            let (a, b) = (ye[m], yi[m]);
            ye[m] = a * cos - b * sin;
            yi[m] = a * sin + b * cos;
        }
        let ce = &self.eigenvectors * ye;
        let ci = &self.eigenvectors * yi;
        for i in 0..size {
            state.amplitudes[i] = Complex64::new(ce[i], ci[i]) * i_power(i % dim);
        }
        state.time += duration;

        let top = state.top_level_population();
        if top > TRUNCATION_TOLERANCE {
            return Err(Error::Truncation { n_max: self.n_max, population: top });
        }
        let drift = (state.norm() - 1.0).abs();
        if drift > crate::grid::NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { time: state.time, drift });
        }
        Ok(())
    }
}

fn i_power(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn inv_i_power(n: usize) -> Complex64 {
    i_power(n).conj()
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    for r in 0..m.nrows() {
        for c in 0..r {
            if m[(r, c)] != m[(c, r)] {
                return false;
            }
        }
    }
    true
}
