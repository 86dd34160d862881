//! Reduced band-space propagators: the two-band periodic Rabi model with
//! Brillouin-zone folding, its N-band generalization, and the projection
//! of grid states into the Bloch basis.
//!
//! Band states are stored on the concatenated momentum axis. Band b at
//! quasimomentum q corresponds to physical momentum p = q + (2b - 1) in
//! internal units (2 hbar k), so an even number of bands covers the
//! half-open window p in (-n_bands, n_bands]. The harmonic term acts as
//! x^2 with x = i d/dp on this axis treated as continuous across p = 0
//! and periodic at the window ends; the continuity across p = 0 realizes
//! the Umklapp boundary coupling exactly, while the wrap at the window
//! ends is the truncation artifact monitored by the edge diagnostic.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::params::{PhysicalParams, ScaledParams};
use crate::spectral::{self, FftPair};

pub use crate::grid::{BOUNDARY_AMPLITUDE_LIMIT, NORM_DRIFT_LIMIT};

/// Default discarded-weight threshold for the grid-to-band projection.
pub const DEFAULT_PROJECTION_THRESHOLD: f64 = 1e-3;

/// Quasimomentum discretization shared by all bands.
///
/// The q grid is q_j = -1 + (j + 1) * 2/n_q in units of 2 hbar k: the
/// zone edge +1 is included, -1 excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandGrid {
    n_bands: usize,
    n_q: usize,
}

impl BandGrid {
    pub fn new(n_bands: usize, n_q: usize) -> Result<Self> {
        if n_bands < 2 || n_bands % 2 != 0 {
            return Err(Error::Validation(format!(
                "band count must be even and >= 2, got {n_bands}"
            )));
        }
        if n_q < 4 {
            return Err(Error::Validation(format!(
                "quasimomentum grid needs at least 4 points, got {n_q}"
            )));
        }
        Ok(Self { n_bands, n_q })
    }

    pub fn two_band(n_q: usize) -> Result<Self> {
        Self::new(2, n_q)
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_total(&self) -> usize {
        self.n_bands * self.n_q
    }

    /// Lowest band index kept; bands run b_lo .. b_lo + n_bands.
    pub fn band_lo(&self) -> i64 {
        1 - (self.n_bands / 2) as i64
    }

    /// q spacing in units of 2 hbar k.
    pub fn dq(&self) -> f64 {
        2.0 / self.n_q as f64
    }

    /// Quasimomentum of column j, in (-1, 1].
    pub fn q_value(&self, j: usize) -> f64 {
        -1.0 + (j as f64 + 1.0) * self.dq()
    }

    /// Physical momentum of slot (band row r, column j) in 2 hbar k.
    pub fn p_value(&self, r: usize, j: usize) -> f64 {
        self.q_value(j) + (2 * (self.band_lo() + r as i64) - 1) as f64
    }

    /// Concatenated momentum axis, slot-ordered.
    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_bands)
            .flat_map(|r| (0..self.n_q).map(move |j| (r, j)))
            .map(|(r, j)| self.p_value(r, j))
            .collect()
    }

    /// Conjugate position lattice of the periodic momentum axis, FFT bin
    /// order, units 1/(2k).
    pub fn position_axis(&self) -> Vec<f64> {
        spectral::conjugate_axis(self.n_total(), self.dq())
    }
}

/// Spinor over the quasimomentum grid, stored band-major on the
/// concatenated momentum axis with unit discrete norm.
#[derive(Debug, Clone)]
pub struct BandState {
    grid: BandGrid,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl BandState {
    pub fn new(grid: BandGrid, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_total() {
            return Err(Error::Validation(format!(
                "amplitude vector length {} does not match band grid size {}",
                amplitudes.len(),
                grid.n_total()
            )));
        }
        let mut state = Self { grid, amplitudes, time };
        let n = spectral::norm(&state.amplitudes);
        if n > 0.0 {
            let inv = 1.0 / n;
            for z in state.amplitudes.iter_mut() {
                *z *= inv;
            }
        }
        Ok(state)
    }

    pub fn grid(&self) -> BandGrid {
        self.grid
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

    /// Amplitude at (band row, q column).
    pub fn amp(&self, r: usize, j: usize) -> Complex64 {
        self.amplitudes[r * self.grid.n_q + j]
    }

    /// Population per band row.
    pub fn band_populations(&self) -> Vec<f64> {
        (0..self.grid.n_bands)
            .map(|r| {
                self.amplitudes[r * self.grid.n_q..(r + 1) * self.grid.n_q]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Unit-norm amplitudes on the conjugate position lattice, FFT order.
    pub fn position_representation(&self) -> Vec<Complex64> {
        let n = self.grid.n_total();
        let fft = FftPair::new(n);
        let mut buf = self.amplitudes.clone();
        fft.inverse_unnormalized(&mut buf);
        let scale = 1.0 / (n as f64).sqrt();
        for z in buf.iter_mut() {
            *z *= scale;
        }
        buf
    }

    pub fn overlap(&self, other: &BandState) -> f64 {
        let dot: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        dot.norm_sqr()
    }
}

/// Analytic initial band state matching [`crate::grid::initial_state`]:
/// a momentum-space Gaussian of the trap ground-state width, placed on
/// the band structure.
pub fn initial_band_state(
    kind: crate::grid::InitialState,
    params: &PhysicalParams,
    grid: BandGrid,
    momentum_offset: f64,
) -> Result<BandState> {
    let scaled = params.scaled();
    let units = params.units();
    let offset = units.momentum_to_scaled(momentum_offset);
    gaussian_band_state(kind, &scaled, grid, offset)
}

/// Scaled-parameter variant; `offset` in units of 2 hbar k.
pub fn gaussian_band_state(
    kind: crate::grid::InitialState,
    scaled: &ScaledParams,
    grid: BandGrid,
    offset: f64,
) -> Result<BandState> {
    if !(scaled.omega > 0.0) {
        return Err(Error::Validation(
            "initial band state needs a confining trap (omega > 0)".into(),
        ));
    }
    use crate::grid::InitialState::*;
    let sigma = scaled.sigma_p();
    let gauss = |p: f64, center: f64| {
        let d = (p - center) / sigma;
        (-0.25 * d * d).exp()
    };
    let amps: Vec<Complex64> = grid
        .momenta()
        .iter()
        .map(|&p| match kind {
            MomentumKick => Complex64::new(gauss(p, -1.0 + offset), 0.0),
            QubitG => Complex64::new(gauss(p, -1.0 + offset) + gauss(p, 1.0 + offset), 0.0),
            QubitE => Complex64::new(gauss(p, -1.0 + offset) - gauss(p, 1.0 + offset), 0.0),
            Superposition { phase } => {
                Complex64::new(gauss(p, -1.0 + offset), 0.0)
                    + Complex64::from_polar(gauss(p, 1.0 + offset), phase)
            }
        })
        .collect();
    BandState::new(grid, amps, 0.0)
}

/// Split-step propagator for the N-band model. The momentum-diagonal
/// part (band kinetic energies plus the V/4 adjacent-band coupling) is
/// applied as an exact per-column unitary; the harmonic term is applied
/// spectrally on the concatenated axis.
pub struct BandPropagator {
    grid: BandGrid,
    dt: f64,
    half_column: Vec<Complex64>,
    full_column: Vec<Complex64>,
    trap_phase: Vec<Complex64>,
    has_trap: bool,
    fft: FftPair,
}

impl BandPropagator {
    pub fn new(params: &PhysicalParams, grid: BandGrid, dt: f64) -> Result<Self> {
        let (scaled, units) = crate::params::nondimensionalize(params);
        Self::from_scaled(&scaled, grid, dt / units.time, dt)
    }

    pub fn from_scaled(
        scaled: &ScaledParams,
        grid: BandGrid,
        dt_scaled: f64,
        dt_si: f64,
    ) -> Result<Self> {
        if !(dt_scaled > 0.0 && dt_scaled.is_finite()) {
            return Err(Error::Validation(format!("dt must be positive, got {dt_scaled}")));
        }
        let nb = grid.n_bands();
        let mut half_column = Vec::with_capacity(grid.n_q() * nb * nb);
        let mut full_column = Vec::with_capacity(grid.n_q() * nb * nb);
        for j in 0..grid.n_q() {
            let h = DMatrix::<f64>::from_fn(nb, nb, |r, c| {
                if r == c {
                    let p = grid.p_value(r, j);
                    p * p
                } else if r.abs_diff(c) == 1 {
                    0.25 * scaled.v
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(h);
            for factor in [0.5 * dt_scaled, dt_scaled] {
                let dest = if factor < dt_scaled { &mut half_column } else { &mut full_column };
                for r in 0..nb {
                    for c in 0..nb {
                        let mut u = Complex64::new(0.0, 0.0);
                        for m in 0..nb {
                            u += Complex64::from_polar(1.0, -eig.eigenvalues[m] * factor)
                                * (eig.eigenvectors[(r, m)] * eig.eigenvectors[(c, m)]);
                        }
                        dest.push(u);
                    }
                }
            }
        }
        let trap_phase = spectral::phase_factors(
            grid.position_axis()
                .iter()
                .map(|&x| 0.25 * scaled.omega * scaled.omega * x * x * dt_scaled),
        );
        Ok(Self { grid, dt: dt_si, half_column, full_column, trap_phase, fft: FftPair::new(grid.n_total()) })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn apply_columns(&self, amps: &mut [Complex64], table: &[Complex64], scratch: &mut [Complex64]) {
        let nb = self.grid.n_bands();
        let n_q = self.grid.n_q();
        for j in 0..n_q {
            for (r, slot) in scratch.iter_mut().enumerate() {
                *slot = amps[r * n_q + j];
            }
            let block = &table[j * nb * nb..(j + 1) * nb * nb];
            for r in 0..nb {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, value) in scratch.iter().enumerate() {
                    acc += block[r * nb + c] * value;
                }
                amps[r * n_q + j] = acc;
            }
        }
    }

    fn apply_trap(&self, amps: &mut [Complex64]) {
        self.fft.inverse_unnormalized(amps);
        let scale = 1.0 / self.grid.n_total() as f64;
        for (z, f) in amps.iter_mut().zip(&self.trap_phase) {
            *z *= f * scale;
        }
        self.fft.forward(amps);
    }

    /// Advance the state by `n_steps`; errors on norm drift or on weight
    /// reaching the momentum-window or position-window edges.
    pub fn propagate(&self, state: &mut BandState, n_steps: usize) -> Result<()> {
        assert_eq!(self.grid, state.grid, "state grid does not match propagator grid");
        if n_steps == 0 {
            return Ok(());
        }
        let nb = self.grid.n_bands();
        let mut scratch = vec![Complex64::new(0.0, 0.0); nb];
        let amps = &mut state.amplitudes;
        self.apply_columns(amps, &self.half_column, &mut scratch);
        for step in 0..n_steps {
            self.apply_trap(amps);
            if step + 1 == n_steps {
                self.apply_columns(amps, &self.half_column, &mut scratch);
            } else {
                self.apply_columns(amps, &self.full_column, &mut scratch);
            }
        }
        state.time += n_steps as f64 * self.dt;

        let edge = amps[0].norm().max(amps[amps.len() - 1].norm());
        if edge > BOUNDARY_AMPLITUDE_LIMIT {
            return Err(Error::Boundary { time: state.time, amplitude: edge });
        }
        let pos = state.position_representation();
        let half = pos.len() / 2;
        // FFT bin order: the largest |x| values sit around the middle.
        let pos_edge = pos[half].norm().max(pos[half - 1].norm()).max(pos[half + 1].norm());
        if pos_edge > BOUNDARY_AMPLITUDE_LIMIT {
            return Err(Error::Boundary { time: state.time, amplitude: pos_edge });
        }
        let drift = (state.norm() - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { time: state.time, drift });
        }
        Ok(())
    }
}

/// Raman readout pulse on a band state: the beamsplitter couples band 1
/// with band 0 pointwise per quasimomentum (momenta p and p - 4 hbar k);
/// bands outside the lowest pair are untouched.
pub fn apply_raman_pulse(state: &BandState, pulse: &crate::grid::PulseSpec) -> BandState {
    let grid = state.grid();
    let n_q = grid.n_q();
    let r0 = (-grid.band_lo()) as usize; // row of band 0
    let r1 = r0 + 1;
    let c = (pulse.area() / 2.0).cos();
    let s = (pulse.area() / 2.0).sin();
    let e_pos = Complex64::from_polar(1.0, pulse.phase());
    let e_neg = Complex64::from_polar(1.0, -pulse.phase());
    let mut amps = state.amplitudes.clone();
    for j in 0..n_q {
        let minus = amps[r0 * n_q + j];
        let plus = amps[r1 * n_q + j];
        amps[r1 * n_q + j] = c * plus - e_pos * s * minus;
        amps[r0 * n_q + j] = e_neg * s * plus + c * minus;
    }
    BandState { grid, amplitudes: amps, time: state.time }
}

/// Result of projecting a grid state onto the kept bands.
#[derive(Debug, Clone)]
pub struct BandProjection {
    pub state: BandState,
    /// Population found outside the kept bands (before renormalization).
    pub discarded_weight: f64,
}

/// Bin a grid state's momentum amplitudes into the Bloch basis by the
/// exact p -> (q, band) relabeling. Errors when the discarded weight
/// exceeds `threshold` (two-band-approximation breakdown).
pub fn project_grid_to_bands(
    state: &GridState,
    n_bands: usize,
    threshold: f64,
) -> Result<BandProjection> {
    let ggrid = state.grid();
    let n_q = ggrid.bragg_offset();
    let bgrid = BandGrid::new(n_bands, n_q)?;
    let band_lo = bgrid.band_lo();
    let band_hi = band_lo + n_bands as i64;
    let momentum = state.momentum_representation();
    let n = ggrid.n_points();

    let mut amps = vec![Complex64::new(0.0, 0.0); bgrid.n_total()];
    let mut kept = 0.0;
    let mut discarded = 0.0;
    for (i, &amp) in momentum.iter().enumerate() {
        let k = spectral::signed_index(i, n);
        // p_scaled = 2 k / n_q; band = ceil(p/2), computed exactly in
        // integer arithmetic: ceil(k / n_q).
        let band = k.div_euclid(n_q as i64) + i64::from(k.rem_euclid(n_q as i64) != 0);
        if band >= band_lo && band < band_hi {
            let r = (band - band_lo) as usize;
            let j = (k - (band - 1) * n_q as i64 - 1) as usize;
            amps[r * n_q + j] = amp;
            kept += amp.norm_sqr();
        } else {
            discarded += amp.norm_sqr();
        }
    }
    let total = kept + discarded;
    let discarded_weight = if total > 0.0 { discarded / total } else { 0.0 };
    if discarded_weight > threshold {
        return Err(Error::BandLeak { weight: discarded_weight, threshold });
    }
    Ok(BandProjection {
        state: BandState::new(bgrid, amps, state.time())?,
        discarded_weight,
    })
}
