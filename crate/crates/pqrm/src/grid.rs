//! Exact single-particle reference solver on a uniform position grid:
//! symmetric split-step spectral propagation of the trap + lattice
//! Hamiltonian, initial-state preparation, and the instantaneous Raman
//! readout pulse.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, ScaledParams};
use crate::spectral::{self, FftPair};

/// Edge-cell amplitude above which a run is considered corrupted by the
/// periodic wrap of the spectral method.
pub const BOUNDARY_AMPLITUDE_LIMIT: f64 = 1e-8;
/// Norm drift treated as a numerical fault.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Uniform position grid, centered on x = 0.
///
/// The domain length is snapped to an integer number of lambda/2 so that
/// the lattice recoil 4 hbar k and the band momenta +-2 hbar k land on
/// exact FFT bins; `bragg_offset` is the bin distance corresponding to a
/// 4 hbar k momentum transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_points: usize,
    length: f64,
    dx: f64,
    wavelength: f64,
    bragg_offset: usize,
}

impl Grid {
    /// Build a grid with `n_points` samples over roughly `length` meters.
    pub fn new(params: &PhysicalParams, n_points: usize, length: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid size must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Validation(format!("grid length must be positive, got {length}")));
        }
        let lambda = params.wavelength();
        let half_waves = (length / (lambda / 2.0)).round().max(1.0);
        let snapped = half_waves * lambda / 2.0;
        let dx = snapped / n_points as f64;
        if dx >= lambda / 16.0 {
            return Err(Error::Validation(format!(
                "dx = {dx:.3e} m does not resolve the lambda/4 lattice (need dx < lambda/16 = {:.3e} m)",
                lambda / 16.0
            )));
        }
        Ok(Self {
            n_points,
            length: snapped,
            dx,
            wavelength: lambda,
            bragg_offset: 2 * half_waves as usize,
        })
    }

    /// Spec defaults: 4096 points over 40 um.
    pub fn with_defaults(params: &PhysicalParams) -> Result<Self> {
        Self::new(params, 4096, 40e-6)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Domain size in meters (after snapping).
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// FFT bin distance of a 4 hbar k momentum transfer.
    pub fn bragg_offset(&self) -> usize {
        self.bragg_offset
    }

    /// Position samples in meters, x_j = (j - n/2) dx.
    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        let half = self.n_points as f64 / 2.0;
        (0..self.n_points).map(move |j| (j as f64 - half) * self.dx)
    }

    /// Spectral wavenumbers p/hbar in 1/m, standard FFT bin order.
    pub fn momentum_axis(&self) -> Vec<f64> {
        spectral::conjugate_axis(self.n_points, self.dx)
    }

    /// Position samples in internal length units (1/(2k)).
    pub(crate) fn scaled_positions(&self) -> Vec<f64> {
        let scale = 2.0 * std::f64::consts::PI * 2.0 / self.wavelength; // 2k
        self.positions().map(|x| x * scale).collect()
    }

    /// Momentum samples in internal units (2 hbar k), FFT bin order.
    pub(crate) fn scaled_momenta(&self) -> Vec<f64> {
        // p_scaled = k_signed * 2 / bragg_offset; exact rationals keep the
        // band edges on representable values.
        let step = 2.0 / self.bragg_offset as f64;
        (0..self.n_points)
            .map(|i| spectral::signed_index(i, self.n_points) as f64 * step)
            .collect()
    }
}

/// Complex wavefunction over a position grid. Amplitudes are stored with
/// unit discrete L2 norm.
#[derive(Debug, Clone)]
pub struct GridState {
    grid: Arc<Grid>,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl GridState {
    pub fn new(grid: Arc<Grid>, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::Validation(format!(
                "amplitude vector length {} does not match grid size {}",
                amplitudes.len(),
                grid.n_points()
            )));
        }
        let mut state = Self { grid, amplitudes, time };
        state.normalize();
        Ok(state)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
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

    fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for z in self.amplitudes.iter_mut() {
                *z *= inv;
            }
        }
    }

    /// Fidelity |<self|other>|^2.
    pub fn overlap(&self, other: &GridState) -> f64 {
        let dot: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        dot.norm_sqr()
    }

    /// Momentum-space amplitudes (unit norm, FFT bin order) with the
    /// physical phase convention for the centered position axis.
    pub fn momentum_representation(&self) -> Vec<Complex64> {
        let n = self.grid.n_points();
        let fft = FftPair::new(n);
        let mut buf = self.amplitudes.clone();
        fft.forward(&mut buf);
        let scale = 1.0 / (n as f64).sqrt();
        // x_j = (j - n/2) dx offsets every bin phase by exp(i pi k); the
        // signed index keeps the factor at +-1 exactly.
        for (i, z) in buf.iter_mut().enumerate() {
            let parity = if spectral::signed_index(i, n) % 2 == 0 { 1.0 } else { -1.0 };
            *z *= parity * scale;
        }
        buf
    }
}

/// Initial-state families used by the scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Trap ground state kicked to p = -2 hbar k (plus offset).
    MomentumKick,
    /// Envelope x (e^{-i2kx} + e^{+i2kx}) / sqrt(2).
    QubitG,
    /// Envelope x (e^{-i2kx} - e^{+i2kx}) / sqrt(2).
    QubitE,
    /// Envelope x (e^{-i2kx} + e^{i phi} e^{+i2kx}) / sqrt(2).
    Superposition { phase: f64 },
}

/// Prepare an initial state at t = 0. `momentum_offset` is added to the
/// nominal momentum in SI units (kg m/s); the envelope is the trap ground
/// state of frequency omega.
pub fn initial_state(
    kind: InitialState,
    params: &PhysicalParams,
    grid: &Arc<Grid>,
    momentum_offset: f64,
) -> Result<GridState> {
    let scaled = params.scaled();
    let units = params.units();
    let offset = units.momentum_to_scaled(momentum_offset);
    let xs = grid.scaled_positions();
    let gauss_coeff = 0.25 * scaled.omega;
    let amps: Vec<Complex64> = xs
        .iter()
        .map(|&x| {
            let envelope = (-gauss_coeff * x * x).exp();
            let carrier = match kind {
                InitialState::MomentumKick => Complex64::from_polar(1.0, (offset - 1.0) * x),
                InitialState::QubitG => {
                    Complex64::from_polar(1.0, offset * x)
                        * (Complex64::from_polar(1.0, -x) + Complex64::from_polar(1.0, x))
                }
                InitialState::QubitE => {
                    Complex64::from_polar(1.0, offset * x)
                        * (Complex64::from_polar(1.0, -x) - Complex64::from_polar(1.0, x))
                }
                InitialState::Superposition { phase } => {
                    Complex64::from_polar(1.0, offset * x)
                        * (Complex64::from_polar(1.0, -x)
                            + Complex64::from_polar(1.0, phase) * Complex64::from_polar(1.0, x))
                }
            };
            envelope * carrier
        })
        .collect();
    GridState::new(Arc::clone(grid), amps, 0.0)
}

/// Instantaneous momentum-space beamsplitter pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    area: f64,
    phase: f64,
}

impl PulseSpec {
    pub fn new(area: f64, phase: f64) -> Result<Self> {
        if !(0.0..=2.0 * std::f64::consts::PI).contains(&area) {
            return Err(Error::Validation(format!(
                "pulse area must lie in [0, 2 pi], got {area}"
            )));
        }
        Ok(Self { area, phase })
    }

    /// pi/2 pulse at phase 0: the readout convention.
    pub fn readout() -> Self {
        Self { area: std::f64::consts::FRAC_PI_2, phase: 0.0 }
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Apply the four-photon Raman pulse: each momentum amplitude at p in
/// (0, 4 hbar k] mixes with its partner at p - 4 hbar k.
///
/// Phase convention: at area pi/2 and phase 0 a fresh qubit-g state is
/// sent entirely to p < 0.
pub fn apply_raman_pulse(state: &GridState, pulse: &PulseSpec) -> GridState {
    let grid = Arc::clone(state.grid());
    let n = grid.n_points();
    let delta = grid.bragg_offset();
    // Snapping to lambda/2 makes the pair distance even, so the
    // centered-axis parity phases cancel between partners.
    debug_assert!(delta % 2 == 0);
    let fft = FftPair::new(n);
    let mut buf = state.amplitudes().to_vec();
    fft.forward(&mut buf);

    let c = (pulse.area / 2.0).cos();
    let s = (pulse.area / 2.0).sin();
    let e_pos = Complex64::from_polar(1.0, pulse.phase);
    let e_neg = Complex64::from_polar(1.0, -pulse.phase);
    // Signed bins 1..=delta are p in (0, 4 hbar k]; partner sits delta
    // bins below. Bin k >= 0 lives at index k, bin k < 0 at n + k.
    for upper in 1..=delta {
        let lower = {
            let signed = upper as i64 - delta as i64;
            if signed >= 0 { signed as usize } else { (n as i64 + signed) as usize }
        };
        let plus = buf[upper];
        let minus = buf[lower];
        buf[upper] = c * plus - e_pos * s * minus;
        buf[lower] = e_neg * s * plus + c * minus;
    }

    fft.inverse(&mut buf);
    GridState { grid, amplitudes: buf, time: state.time() }
}

/// Split-step spectral propagator for the trap + lattice Hamiltonian.
///
/// Strang ordering: half-step potential, full-step kinetic, half-step
/// potential; the diagonal factors are precomputed for a fixed dt.
pub struct GridPropagator {
    grid: Arc<Grid>,
    dt: f64,
    half_potential: Vec<Complex64>,
    full_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    fft: FftPair,
}

impl GridPropagator {
    pub fn new(params: &PhysicalParams, grid: &Arc<Grid>, dt: f64) -> Result<Self> {
        let (scaled, units) = crate::params::nondimensionalize(params);
        Self::from_scaled(&scaled, grid, dt / units.time, dt)
    }

    /// Construct directly from scaled parameters with dt in internal time
    /// units; `dt_si` only stamps the state clock.
    pub fn from_scaled(
        scaled: &ScaledParams,
        grid: &Arc<Grid>,
        dt_scaled: f64,
        dt_si: f64,
    ) -> Result<Self> {
        if !(dt_scaled > 0.0 && dt_scaled.is_finite()) {
            return Err(Error::Validation(format!("dt must be positive, got {dt_scaled}")));
        }
        let potential: Vec<f64> = grid
            .scaled_positions()
            .iter()
            .map(|&x| 0.25 * scaled.omega * scaled.omega * x * x + 0.5 * scaled.v * (2.0 * x).cos())
            .collect();
        let half_potential =
            spectral::phase_factors(potential.iter().map(|&v| 0.5 * v * dt_scaled));
        let full_potential = spectral::phase_factors(potential.iter().map(|&v| v * dt_scaled));
        let kinetic =
            spectral::phase_factors(grid.scaled_momenta().iter().map(|&p| p * p * dt_scaled));
        Ok(Self {
            grid: Arc::clone(grid),
            dt: dt_si,
            half_potential,
            full_potential,
            kinetic,
            fft: FftPair::new(grid.n_points()),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn check_boundary(amps: &[Complex64], time: f64) -> Result<()> {
        let edge = amps[0].norm().max(amps[amps.len() - 1].norm());
        if edge > BOUNDARY_AMPLITUDE_LIMIT {
            return Err(Error::Boundary { time, amplitude: edge });
        }
        Ok(())
    }

    /// Advance the state by `n_steps` of the configured time step.
    pub fn propagate(&self, state: &mut GridState, n_steps: usize) -> Result<()> {
        assert!(
            Arc::ptr_eq(&self.grid, state.grid()) || *self.grid == **state.grid(),
            "state grid does not match propagator grid"
        );
        if n_steps == 0 {
            return Ok(());
        }
        Self::check_boundary(&state.amplitudes, state.time)?;
        let amps = &mut state.amplitudes;
        apply_diagonal(amps, &self.half_potential);
        for step in 0..n_steps {
            self.fft.forward(amps);
            apply_diagonal(amps, &self.kinetic);
            self.fft.inverse(amps);
            if step + 1 == n_steps {
                apply_diagonal(amps, &self.half_potential);
            } else {
                apply_diagonal(amps, &self.full_potential);
            }
            state.time += self.dt;
            Self::check_boundary(amps, state.time)?;
        }
        let drift = (spectral::norm(&state.amplitudes) - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { time: state.time, drift });
        }
        Ok(())
    }
}

fn apply_diagonal(amps: &mut [Complex64], factors: &[Complex64]) {
    for (z, f) in amps.iter_mut().zip(factors) {
        *z *= f;
    }
}

/// Energy expectation <H> in recoil units for the given scaled parameters.
pub fn energy_expectation(state: &GridState, scaled: &ScaledParams) -> f64 {
    let xs = state.grid().scaled_positions();
    let potential: f64 = state
        .amplitudes()
        .iter()
        .zip(&xs)
        .map(|(z, &x)| {
            z.norm_sqr()
                * (0.25 * scaled.omega * scaled.omega * x * x + 0.5 * scaled.v * (2.0 * x).cos())
        })
        .sum();
    let momentum = state.momentum_representation();
    let kinetic: f64 = momentum
        .iter()
        .zip(&state.grid().scaled_momenta())
        .map(|(z, &p)| z.norm_sqr() * p * p)
        .sum();
    kinetic + potential
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables;
    use approx::assert_relative_eq;

    fn fig2_params() -> PhysicalParams {
        PhysicalParams::rb87(346.0, 0.0).unwrap()
    }

    #[test]
    fn default_grid_resolves_lattice() {
        let params = fig2_params();
        let grid = Grid::with_defaults(&params).unwrap();
        assert_relative_eq!(grid.dx(), 9.755e-9, max_relative = 1e-3);
        let samples_per_period = params.wavelength() / 4.0 / grid.dx();
        assert!(samples_per_period > 19.0 && samples_per_period < 21.0);
    }

    #[test]
    fn grid_rejects_bad_input() {
        let params = fig2_params();
        assert!(Grid::new(&params, 4095, 40e-6).is_err());
        // Too few points over too long a window: dx above lambda/16.
        assert!(Grid::new(&params, 64, 40e-6).is_err());
    }

    #[test]
    fn small_toy_grid_is_valid() {
        let params = fig2_params();
        let grid = Grid::new(&params, 64, 64.0 * 20e-9).unwrap();
        assert_eq!(grid.n_points(), 64);
    }

    #[test]
    fn momentum_kick_expectations() {
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        let state = initial_state(InitialState::MomentumKick, &params, &grid, 0.0).unwrap();
        let two_hbar_k = 2.0 * crate::params::HBAR * params.wavevector();
        let rec = observables::observe_grid(&state, &params);
        assert_relative_eq!(rec.mean_p.unwrap(), -two_hbar_k, max_relative = 1e-10);
        assert!(rec.mean_x.abs() < 1e-12);
        assert!(rec.mean_q.abs() < 1e-9 * two_hbar_k);
        assert!(rec.excitation_number.abs() < 1e-6);
    }

    #[test]
    fn qubit_g_is_balanced() {
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        let state = initial_state(InitialState::QubitG, &params, &grid, 0.0).unwrap();
        let rec = observables::observe_grid(&state, &params);
        assert!(rec.band_occupation.abs() < 1e-10);
    }

    #[test]
    fn zero_steps_is_identity() {
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        let mut state = initial_state(InitialState::MomentumKick, &params, &grid, 0.0).unwrap();
        let reference = state.clone();
        let prop = GridPropagator::new(&params, &grid, 100e-9).unwrap();
        prop.propagate(&mut state, 0).unwrap();
        assert!(state.overlap(&reference) > 1.0 - 1e-15);
        assert_eq!(state.time(), 0.0);
    }

    #[test]
    fn coherent_oscillation_matches_analytic() {
        // V = 0: Ehrenfest dynamics of the kicked ground state.
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        let mut state = initial_state(InitialState::MomentumKick, &params, &grid, 0.0).unwrap();
        let prop = GridPropagator::new(&params, &grid, 100e-9).unwrap();
        let two_hbar_k = 2.0 * crate::params::HBAR * params.wavevector();
        let omega = params.trap_freq();
        let amp_x = two_hbar_k / (params.mass() * omega);
        let period = params.derive().trap_period;
        let steps_per_sample = ((period / 8.0) / 100e-9).round() as usize;
        for _ in 0..8 {
            prop.propagate(&mut state, steps_per_sample).unwrap();
            let t = state.time();
            let rec = observables::observe_grid(&state, &params);
            let x_ref = -amp_x * (omega * t).sin();
            let p_ref = -two_hbar_k * (omega * t).cos();
            assert!((rec.mean_x - x_ref).abs() <= 1e-4 * amp_x, "x at t={t}");
            assert!((rec.mean_p.unwrap() - p_ref).abs() <= 1e-4 * two_hbar_k, "p at t={t}");
        }
    }

    #[test]
    fn boundary_violation_detected() {
        let params = fig2_params();
        // 1 um window cannot contain the 5.4 um excursion; the ground
        // state barely fits, and propagation runs into the edge.
        let grid = Arc::new(Grid::new(&params, 1024, 3e-6).unwrap());
        let mut state = initial_state(InitialState::MomentumKick, &params, &grid, 0.0).unwrap();
        let prop = GridPropagator::new(&params, &grid, 100e-9).unwrap();
        let steps = (params.derive().trap_period / 100e-9) as usize;
        let err = prop.propagate(&mut state, steps).unwrap_err();
        assert!(matches!(err, Error::Boundary { .. }), "got {err:?}");
    }

    #[test]
    fn pulse_identity_at_zero_area() {
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        let state = initial_state(InitialState::QubitG, &params, &grid, 0.0).unwrap();
        let pulsed = apply_raman_pulse(&state, &PulseSpec::new(0.0, 0.0).unwrap());
        assert!(pulsed.overlap(&state) > 1.0 - 1e-12);
    }

    #[test]
    fn pi_pulse_transfers_momentum_state() {
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        // Pure +2 hbar k wavepacket.
        let plus = initial_state(InitialState::MomentumKick, &params, &grid, 0.0).unwrap();
        let amps: Vec<Complex64> = grid
            .scaled_positions()
            .iter()
            .zip(plus.amplitudes())
            .map(|(&x, z)| z * Complex64::from_polar(1.0, 2.0 * x))
            .collect();
        let plus = GridState::new(Arc::clone(&grid), amps, 0.0).unwrap();
        let rec = observables::observe_grid(&plus, &params);
        let two_hbar_k = 2.0 * crate::params::HBAR * params.wavevector();
        assert_relative_eq!(rec.mean_p.unwrap(), two_hbar_k, max_relative = 1e-9);

        let pulsed =
            apply_raman_pulse(&plus, &PulseSpec::new(std::f64::consts::PI, 0.3).unwrap());
        let rec = observables::observe_grid(&pulsed, &params);
        assert_relative_eq!(rec.mean_p.unwrap(), -two_hbar_k, max_relative = 1e-9);
        assert_relative_eq!(pulsed.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn readout_pulse_convention() {
        let params = fig2_params();
        let grid = Arc::new(Grid::with_defaults(&params).unwrap());
        let state = initial_state(InitialState::QubitG, &params, &grid, 0.0).unwrap();
        let readout = observables::sigma_z_readout(&state, &PulseSpec::readout());
        assert!((readout - 1.0).abs() < 1e-6, "qubit_g readout = {readout}");
        let state = initial_state(InitialState::QubitE, &params, &grid, 0.0).unwrap();
        let readout = observables::sigma_z_readout(&state, &PulseSpec::readout());
        assert!((readout + 1.0).abs() < 1e-6, "qubit_e readout = {readout}");
    }

    #[test]
    fn time_reversal_on_toy_grid() {
        let params = fig2_params();
        let grid = Arc::new(Grid::new(&params, 64, 64.0 * 20e-9).unwrap());
        let scaled = ScaledParams { omega: 1.0, v: 1.0 };
        let prop = GridPropagator::from_scaled(&scaled, &grid, 1e-4, 1e-9).unwrap();
        let xs = grid.scaled_positions();
        let amps: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::from_polar((-0.5 * x * x).exp(), 0.4 * x))
            .collect();
        let initial = GridState::new(Arc::clone(&grid), amps, 0.0).unwrap();
        let mut state = initial.clone();
        prop.propagate(&mut state, 100).unwrap();
        let conjugated: Vec<Complex64> =
            state.amplitudes().iter().map(|z| z.conj()).collect();
        let mut state = GridState::new(Arc::clone(&grid), conjugated, 0.0).unwrap();
        prop.propagate(&mut state, 100).unwrap();
        let back: Vec<Complex64> = state.amplitudes().iter().map(|z| z.conj()).collect();
        let back = GridState::new(Arc::clone(&grid), back, 0.0).unwrap();
        assert!(back.overlap(&initial) >= 1.0 - 1e-8);
    }
}
