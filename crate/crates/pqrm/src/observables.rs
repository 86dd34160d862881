//! Every measured quantity of the experiment, computed from any of the
//! three state representations.
//!
//! Conventions fixed here for reproducibility: <q^2> in the excitation
//! number always uses the folded quasimomentum, including for grid
//! states; the p = 0 bin belongs to band 0 (q = +2 hbar k) for folding
//! and is split evenly between the two sides of the readout integral;
//! the zone-edge sample is q = +2 hbar k, never -2 hbar k.

use serde::Serialize;

use crate::bands::BandState;
use crate::fock::FockState;
use crate::grid::{apply_raman_pulse, GridState, PulseSpec};
use crate::params::{PhysicalParams, HBAR};
use crate::spectral;

/// Which propagator produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Grid,
    Pqrm,
    Multiband,
    Qrm,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::Grid => "grid",
            ModelTag::Pqrm => "pqrm",
            ModelTag::Multiband => "multiband",
            ModelTag::Qrm => "qrm",
        }
    }
}

impl std::str::FromStr for ModelTag {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(ModelTag::Grid),
            "pqrm" => Ok(ModelTag::Pqrm),
            "multiband" => Ok(ModelTag::Multiband),
            "qrm" => Ok(ModelTag::Qrm),
            other => Err(crate::error::Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// Time-stamped observables of one state, SI units.
#[derive(Debug, Clone, Copy)]
pub struct ObservableRecord {
    pub model: ModelTag,
    /// s
    pub time: f64,
    /// <N>, dimensionless
    pub excitation_number: f64,
    /// m
    pub mean_x: f64,
    /// kg m/s; absent for Fock states (no unfolded momentum there)
    pub mean_p: Option<f64>,
    /// kg m/s, folded
    pub mean_q: f64,
    /// m^2
    pub var_x: f64,
    /// (kg m/s)^2
    pub var_q: f64,
    /// <sigma_x> in [-1, 1]
    pub band_occupation: f64,
    /// n_{p<0} in [-1, 1]
    pub readout: Option<f64>,
    /// |<psi_0|psi>|^2, Fock model only
    pub overlap: Option<f64>,
}

/// Fold a physical momentum onto the first Brillouin zone:
/// q in (-2 hbar k, 2 hbar k], band index so that p = q + (2 n_b - 1) *
/// 2 hbar k. Idempotent on already-folded values.
pub fn fold_momentum(p: f64, params: &PhysicalParams) -> (f64, i64) {
    let scale = params.units().momentum;
    let (q, band) = fold_scaled(p / scale);
    (q * scale, band)
}

/// Folding in internal units (momentum in 2 hbar k): band = ceil(p / 2).
pub fn fold_scaled(p: f64) -> (f64, i64) {
    let band = (p / 2.0).ceil() as i64;
    (p - (2 * band - 1) as f64, band)
}

/// Exact integer folding for a bin-aligned momentum axis with n_q bins
/// per band (bin k holds p = 2 k / n_q in internal units).
pub fn fold_bin(k: i64, n_q: usize) -> (f64, i64) {
    let n = n_q as i64;
    let band = k.div_euclid(n) + i64::from(k.rem_euclid(n) != 0);
    let q = (k - (band - 1) * n) as f64 * (2.0 / n_q as f64) - 1.0;
    (q, band)
}

/// All observables of a grid state.
pub fn observe_grid(state: &GridState, params: &PhysicalParams) -> ObservableRecord {
    let units = params.units();
    let scaled = params.scaled();
    let grid = state.grid();

    let mut mean_x = 0.0;
    let mut mean_x2 = 0.0;
    for (z, x) in state.amplitudes().iter().zip(grid.scaled_positions()) {
        let w = z.norm_sqr();
        mean_x += w * x;
        mean_x2 += w * x * x;
    }

    let momentum = state.momentum_representation();
    let n_q = grid.bragg_offset();
    let mut mean_p = 0.0;
    let mut mean_q = 0.0;
    let mut mean_q2 = 0.0;
    let mut pop = [0.0_f64; 2];
    let step = 2.0 / n_q as f64;
    for (i, z) in momentum.iter().enumerate() {
        let w = z.norm_sqr();
        let k = spectral::signed_index(i, grid.n_points());
        let (q, band) = fold_bin(k, n_q);
        mean_p += w * k as f64 * step;
        mean_q += w * q;
        mean_q2 += w * q * q;
        if band == 0 || band == 1 {
            pop[band as usize] += w;
        }
    }

    let excitation =
        (mean_q2 + 0.25 * scaled.omega * scaled.omega * mean_x2) / scaled.omega - 0.5;
    ObservableRecord {
        model: ModelTag::Grid,
        time: state.time(),
        excitation_number: excitation,
        mean_x: units.length_from_scaled(mean_x),
        mean_p: Some(units.momentum_from_scaled(mean_p)),
        mean_q: units.momentum_from_scaled(mean_q),
        var_x: (mean_x2 - mean_x * mean_x) * units.length * units.length,
        var_q: (mean_q2 - mean_q * mean_q) * units.momentum * units.momentum,
        band_occupation: pop[0] - pop[1],
        readout: None,
        overlap: None,
    }
}

/// All observables of a band state. The position moments come from the
/// spectral representation of x = i d/dp on the concatenated axis.
pub fn observe_band(state: &BandState, params: &PhysicalParams) -> ObservableRecord {
    let units = params.units();
    let scaled = params.scaled();
    let bgrid = state.grid();
    let n_q = bgrid.n_q();

    let mut mean_p = 0.0;
    let mut mean_q = 0.0;
    let mut mean_q2 = 0.0;
    let mut pop = [0.0_f64; 2];
    for r in 0..bgrid.n_bands() {
        let band = bgrid.band_lo() + r as i64;
        for j in 0..n_q {
            let w = state.amp(r, j).norm_sqr();
            let q = bgrid.q_value(j);
            mean_p += w * bgrid.p_value(r, j);
            mean_q += w * q;
            mean_q2 += w * q * q;
            if band == 0 || band == 1 {
                pop[band as usize] += w;
            }
        }
    }

    let position = state.position_representation();
    let axis = bgrid.position_axis();
    let mut mean_x = 0.0;
    let mut mean_x2 = 0.0;
    for (z, &x) in position.iter().zip(&axis) {
        let w = z.norm_sqr();
        mean_x += w * x;
        mean_x2 += w * x * x;
    }

    let excitation =
        (mean_q2 + 0.25 * scaled.omega * scaled.omega * mean_x2) / scaled.omega - 0.5;
    ObservableRecord {
        model: if bgrid.n_bands() == 2 { ModelTag::Pqrm } else { ModelTag::Multiband },
        time: state.time(),
        excitation_number: excitation,
        mean_x: units.length_from_scaled(mean_x),
        mean_p: Some(units.momentum_from_scaled(mean_p)),
        mean_q: units.momentum_from_scaled(mean_q),
        var_x: (mean_x2 - mean_x * mean_x) * units.length * units.length,
        var_q: (mean_q2 - mean_q * mean_q) * units.momentum * units.momentum,
        band_occupation: pop[0] - pop[1],
        readout: None,
        overlap: None,
    }
}

/// All observables of a Fock state; the oscillator quadratures supply
/// <x> and <q>, and <N> = <a+ a> directly.
pub fn observe_fock(state: &FockState, params: &PhysicalParams) -> ObservableRecord {
    let omega = params.trap_freq();
    let x_zpf = (HBAR / (2.0 * params.mass() * omega)).sqrt();
    let q_zpf = (params.mass() * HBAR * omega / 2.0).sqrt();
    let (a, a2) = state.ladder_moments();
    let mean_n = state.mean_n();
    let mean_x = 2.0 * x_zpf * a.re;
    let mean_q = 2.0 * q_zpf * a.im;
    let mean_x2 = x_zpf * x_zpf * (2.0 * a2.re + 2.0 * mean_n + 1.0);
    let mean_q2 = q_zpf * q_zpf * (-2.0 * a2.re + 2.0 * mean_n + 1.0);
    ObservableRecord {
        model: ModelTag::Qrm,
        time: state.time(),
        excitation_number: mean_n,
        mean_x,
        mean_p: None,
        mean_q,
        var_x: mean_x2 - mean_x * mean_x,
        var_q: mean_q2 - mean_q * mean_q,
        band_occupation: state.sigma_x(),
        readout: None,
        overlap: None,
    }
}

/// Apply the readout pulse to a copy of the state and integrate the
/// momentum populations: n_{p<0} = (N_- - N_+) / (N_- + N_+), with the
/// p = 0 bin split evenly.
pub fn sigma_z_readout(state: &GridState, pulse: &PulseSpec) -> f64 {
    let pulsed = apply_raman_pulse(state, pulse);
    let momentum = pulsed.momentum_representation();
    let n = state.grid().n_points();
    let mut negative = 0.0;
    let mut positive = 0.0;
    for (i, z) in momentum.iter().enumerate() {
        let w = z.norm_sqr();
        match spectral::signed_index(i, n) {
            k if k < 0 => negative += w,
            0 => {
                negative += 0.5 * w;
                positive += 0.5 * w;
            }
            _ => positive += w,
        }
    }
    (negative - positive) / (negative + positive)
}

/// Readout of a band state through the pointwise band beamsplitter.
pub fn sigma_z_readout_band(state: &BandState, pulse: &PulseSpec) -> f64 {
    let pulsed = crate::bands::apply_raman_pulse(state, pulse);
    let bgrid = pulsed.grid();
    let mut negative = 0.0;
    let mut positive = 0.0;
    for r in 0..bgrid.n_bands() {
        for j in 0..bgrid.n_q() {
            let w = pulsed.amp(r, j).norm_sqr();
            let p = bgrid.p_value(r, j);
            if p < 0.0 {
                negative += w;
            } else if p == 0.0 {
                negative += 0.5 * w;
                positive += 0.5 * w;
            } else {
                positive += w;
            }
        }
    }
    (negative - positive) / (negative + positive)
}

/// Phase-space aggregation: ordered (<x>, <p>) and (<x>, <q>) pairs.
pub fn phase_space_trajectory(
    records: &[ObservableRecord],
) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let xp = records
        .iter()
        .filter_map(|r| r.mean_p.map(|p| (r.mean_x, p)))
        .collect();
    let xq = records.iter().map(|r| (r.mean_x, r.mean_q)).collect();
    (xp, xq)
}
