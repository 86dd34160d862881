//! Physical parameters, unit normalization, derived couplings, and the
//! fluxonium parameter dictionary. Everything downstream consumes the
//! scaled parameter set produced here.
//!
//! Internal unit system: hbar = 1, momentum unit 2*hbar*k, length unit
//! 1/(2k), energy unit E_r = (2*hbar*k)^2 / 2m, time unit hbar/E_r. With
//! this choice the lattice band crossing sits at scaled p = -1/+1 and the
//! Brillouin-zone edge at scaled q = -1/+1, so the folding arithmetic is
//! exact integer bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA).
pub const HBAR: f64 = 1.054571817e-34;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_KG: f64 = 1.66053907e-27;
/// Mass of 87Rb in atomic mass units.
pub const RB87_MASS_U: f64 = 86.909180;

/// Mass of 87Rb in kg.
pub fn rb87_mass() -> f64 {
    RB87_MASS_U * ATOMIC_MASS_KG
}

/// Laboratory-frame system parameters.
///
/// The lattice depth and qubit splitting are locked together by
/// V = 2 hbar omega_q; only the splitting is stored and the depth is
/// derived, so the invariant cannot be broken by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    mass: f64,
    wavelength: f64,
    trap_freq: f64,
    qubit_split: f64,
}

impl PhysicalParams {
    /// Build from mass (kg), driving-laser wavelength (m), trap angular
    /// frequency (rad/s) and qubit splitting (rad/s).
    pub fn new(mass: f64, wavelength: f64, trap_freq: f64, qubit_split: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Validation(format!("mass must be positive, got {mass}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::Validation(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        if !(trap_freq > 0.0 && trap_freq.is_finite()) {
            return Err(Error::Validation(format!(
                "trap frequency must be positive, got {trap_freq}"
            )));
        }
        if !(qubit_split >= 0.0 && qubit_split.is_finite()) {
            return Err(Error::Validation(format!(
                "qubit splitting must be non-negative, got {qubit_split}"
            )));
        }
        Ok(Self { mass, wavelength, trap_freq, qubit_split })
    }

    /// Same, but specified through the lattice depth V (J) instead of the
    /// qubit splitting; the splitting is derived from V = 2 hbar omega_q.
    pub fn with_lattice_depth(
        mass: f64,
        wavelength: f64,
        trap_freq: f64,
        lattice_depth: f64,
    ) -> Result<Self> {
        if !(lattice_depth >= 0.0 && lattice_depth.is_finite()) {
            return Err(Error::Validation(format!(
                "lattice depth must be non-negative, got {lattice_depth}"
            )));
        }
        Self::new(mass, wavelength, trap_freq, lattice_depth / (2.0 * HBAR))
    }

    /// 87Rb at the experiment's lattice wavelength; trap frequency and
    /// qubit splitting in Hz.
    pub fn rb87(trap_freq_hz: f64, qubit_split_hz: f64) -> Result<Self> {
        Self::new(
            rb87_mass(),
            783.5e-9,
            2.0 * std::f64::consts::PI * trap_freq_hz,
            2.0 * std::f64::consts::PI * qubit_split_hz,
        )
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Trap angular frequency omega, rad/s.
    pub fn trap_freq(&self) -> f64 {
        self.trap_freq
    }

    /// Qubit splitting omega_q, rad/s.
    pub fn qubit_split(&self) -> f64 {
        self.qubit_split
    }

    /// Lattice depth V = 2 hbar omega_q, J.
    pub fn lattice_depth(&self) -> f64 {
        2.0 * HBAR * self.qubit_split
    }

    /// Driving-field wavevector k = 2 pi / lambda, 1/m.
    pub fn wavevector(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Copy with a different qubit splitting (rad/s); used by sweeps.
    pub fn with_qubit_split(&self, qubit_split: f64) -> Result<Self> {
        Self::new(self.mass, self.wavelength, self.trap_freq, qubit_split)
    }

    pub fn derive(&self) -> DerivedParams {
        let k = self.wavevector();
        let coupling = k * (2.0 * HBAR * self.trap_freq / self.mass).sqrt();
        let two_hbar_k = 2.0 * HBAR * k;
        DerivedParams {
            coupling,
            coupling_ratio: coupling / self.trap_freq,
            qubit_ratio: self.qubit_split / self.trap_freq,
            trap_period: 2.0 * std::f64::consts::PI / self.trap_freq,
            recoil_energy: two_hbar_k * two_hbar_k / (2.0 * self.mass),
        }
    }

    /// Scale factors connecting SI quantities to the internal unit system.
    pub fn units(&self) -> Units {
        let k = self.wavevector();
        let momentum = 2.0 * HBAR * k;
        let energy = momentum * momentum / (2.0 * self.mass);
        Units { momentum, length: 1.0 / (2.0 * k), energy, time: HBAR / energy }
    }

    /// Dimensionless parameter set used by every propagator.
    pub fn scaled(&self) -> ScaledParams {
        let units = self.units();
        ScaledParams {
            omega: HBAR * self.trap_freq / units.energy,
            v: self.lattice_depth() / units.energy,
        }
    }
}

/// Quantities derived from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Qubit-mode coupling g = k sqrt(2 hbar omega / m), rad/s.
    pub coupling: f64,
    /// g / omega.
    pub coupling_ratio: f64,
    /// omega_q / omega.
    pub qubit_ratio: f64,
    /// Trap period T = 2 pi / omega, s.
    pub trap_period: f64,
    /// Four-photon recoil energy E_r = (2 hbar k)^2 / 2m, J.
    pub recoil_energy: f64,
}

/// Dimensionless Hamiltonian parameters in internal units.
///
/// The scaled single-particle Hamiltonian reads
/// `H = p^2 + (omega^2/4) x^2 + (v/2) cos(2x)` with time measured in
/// hbar/E_r. Constructible directly so toy problems (omega = 0 or v = 0)
/// can bypass the laboratory-parameter invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    /// hbar omega / E_r.
    pub omega: f64,
    /// V / E_r.
    pub v: f64,
}

impl ScaledParams {
    /// Scaled trap period 2 pi / omega.
    pub fn trap_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    /// Momentum width of the trap ground state in units of 2 hbar k.
    pub fn sigma_p(&self) -> f64 {
        0.5 * self.omega.sqrt()
    }

    /// Position width of the trap ground state in units of 1/(2k).
    pub fn sigma_x(&self) -> f64 {
        1.0 / self.omega.sqrt()
    }
}

/// SI value of one internal unit, per dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    /// kg m/s per unit momentum (= 2 hbar k).
    pub momentum: f64,
    /// m per unit length (= 1/(2k)).
    pub length: f64,
    /// J per unit energy (= E_r).
    pub energy: f64,
    /// s per unit time (= hbar / E_r).
    pub time: f64,
}

impl Units {
    pub fn momentum_to_scaled(&self, p: f64) -> f64 {
        p / self.momentum
    }

    pub fn momentum_from_scaled(&self, p: f64) -> f64 {
        p * self.momentum
    }

    pub fn length_to_scaled(&self, x: f64) -> f64 {
        x / self.length
    }

    pub fn length_from_scaled(&self, x: f64) -> f64 {
        x * self.length
    }

    pub fn time_to_scaled(&self, t: f64) -> f64 {
        t / self.time
    }

    pub fn time_from_scaled(&self, t: f64) -> f64 {
        t * self.time
    }
}

/// Nondimensionalize laboratory parameters.
pub fn nondimensionalize(params: &PhysicalParams) -> (ScaledParams, Units) {
    (params.scaled(), params.units())
}

/// Reconstruct laboratory parameters from the scaled set and unit scales.
pub fn redimensionalize(scaled: &ScaledParams, units: &Units) -> Result<PhysicalParams> {
    let mass = units.momentum * units.momentum / (2.0 * units.energy);
    let wavelength = 4.0 * std::f64::consts::PI * units.length;
    let trap_freq = scaled.omega * units.energy / HBAR;
    let qubit_split = scaled.v * units.energy / (2.0 * HBAR);
    PhysicalParams::new(mass, wavelength, trap_freq, qubit_split)
}

/// Superconducting-circuit energies, rad/s in the hbar = 1 convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumParams {
    /// Charging energy E_C.
    pub e_c: f64,
    /// Josephson energy E_J.
    pub e_j: f64,
    /// Inductive energy E_L.
    pub e_l: f64,
    /// External flux in units of Phi_0 / 2 pi.
    pub ext_flux: f64,
}

impl FluxoniumParams {
    pub fn new(e_c: f64, e_j: f64, e_l: f64, ext_flux: f64) -> Result<Self> {
        for (name, value) in [("E_C", e_c), ("E_J", e_j), ("E_L", e_l)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Validation(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(Self { e_c, e_j, e_l, ext_flux })
    }
}

/// Mode triple shared by the atomic and circuit descriptions, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequencies {
    pub omega: f64,
    pub omega_q: f64,
    pub coupling: f64,
}

/// Map circuit energies onto the atomic mode triple.
///
/// Substitutions (hbar = 1): omega_q = E_J, omega = sqrt(8 E_L E_C),
/// g = (8 E_L E_C^3)^(1/4). The external flux must sit at pi for the
/// cosine potentials of the two models to line up sign-for-sign.
pub fn fluxonium_map(f: &FluxoniumParams) -> Result<ModeFrequencies> {
    let tol = 1e-9 * std::f64::consts::PI;
    if (f.ext_flux - std::f64::consts::PI).abs() > tol {
        return Err(Error::Validation(format!(
            "exact mapping requires ext_flux = pi, got {}",
            f.ext_flux
        )));
    }
    Ok(ModeFrequencies {
        omega: (8.0 * f.e_l * f.e_c).sqrt(),
        omega_q: f.e_j,
        coupling: (8.0 * f.e_l * f.e_c.powi(3)).powf(0.25),
    })
}

/// Inverse dictionary: atomic parameters to circuit energies.
///
/// E_C = 2 hbar k^2 / m, E_J = omega_q, E_L = m omega^2 / (16 hbar k^2),
/// all expressed in rad/s.
pub fn atomic_to_fluxonium(params: &PhysicalParams) -> Result<FluxoniumParams> {
    let k = params.wavevector();
    let e_c = 2.0 * HBAR * k * k / params.mass();
    let e_l = params.mass() * params.trap_freq() * params.trap_freq() / (16.0 * HBAR * k * k);
    FluxoniumParams::new(e_c, params.qubit_split().max(f64::MIN_POSITIVE), e_l, std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn coupling_ratio_matches_reported_values() {
        let p = PhysicalParams::rb87(346.0, 0.0).unwrap();
        let d = p.derive();
        assert!((d.coupling_ratio - 6.53).abs() / 6.53 < 0.02, "g/omega = {}", d.coupling_ratio);

        let p = PhysicalParams::rb87(650.0, 0.0).unwrap();
        let d = p.derive();
        assert!((d.coupling_ratio - 4.8).abs() / 4.8 < 0.03, "g/omega = {}", d.coupling_ratio);
    }

    #[test]
    fn coupling_ratio_halves_when_trap_freq_quadruples() {
        let p = PhysicalParams::rb87(346.0, 0.0).unwrap();
        let p4 = PhysicalParams::new(p.mass(), p.wavelength(), 4.0 * p.trap_freq(), 0.0).unwrap();
        assert_relative_eq!(
            p4.derive().coupling_ratio,
            0.5 * p.derive().coupling_ratio,
            max_relative = 1e-12
        );
    }

    #[test]
    fn trap_period_inverse_of_frequency() {
        let p = PhysicalParams::rb87(346.0, 800.0).unwrap();
        let d = p.derive();
        assert_relative_eq!(d.trap_period * p.trap_freq(), 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn lattice_depth_locked_to_qubit_split() {
        let p = PhysicalParams::rb87(346.0, 800.0).unwrap();
        assert_relative_eq!(p.lattice_depth(), 2.0 * HBAR * p.qubit_split());
        let v = p.lattice_depth();
        let q = PhysicalParams::with_lattice_depth(p.mass(), p.wavelength(), p.trap_freq(), v)
            .unwrap();
        assert_relative_eq!(q.qubit_split(), p.qubit_split(), max_relative = 1e-14);
    }

    #[test]
    fn scaled_momentum_units() {
        let p = PhysicalParams::rb87(346.0, 0.0).unwrap();
        let units = p.units();
        let two_hbar_k = 2.0 * HBAR * p.wavevector();
        assert_relative_eq!(units.momentum_to_scaled(-two_hbar_k), -1.0, max_relative = 1e-14);
        assert_relative_eq!(units.momentum_to_scaled(two_hbar_k), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn scaled_trap_term_coefficient() {
        // m omega^2 x^2 / 2 becomes (omega_scaled^2 / 4) x_scaled^2.
        let p = PhysicalParams::rb87(346.0, 0.0).unwrap();
        let (scaled, units) = nondimensionalize(&p);
        let x = 1.3e-6;
        let si = 0.5 * p.mass() * p.trap_freq().powi(2) * x * x;
        let xs = units.length_to_scaled(x);
        let scaled_energy = 0.25 * scaled.omega * scaled.omega * xs * xs;
        assert_relative_eq!(si / units.energy, scaled_energy, max_relative = 1e-12);
    }

    #[test]
    fn round_trip_reproduces_params() {
        let p = PhysicalParams::rb87(346.0, 1280.0).unwrap();
        let (scaled, units) = nondimensionalize(&p);
        let q = redimensionalize(&scaled, &units).unwrap();
        assert_relative_eq!(q.mass(), p.mass(), max_relative = 1e-12);
        assert_relative_eq!(q.wavelength(), p.wavelength(), max_relative = 1e-12);
        assert_relative_eq!(q.trap_freq(), p.trap_freq(), max_relative = 1e-12);
        assert_relative_eq!(q.qubit_split(), p.qubit_split(), max_relative = 1e-12);
        assert_relative_eq!(
            q.derive().coupling_ratio,
            p.derive().coupling_ratio,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fluxonium_inverse_pair() {
        let p = PhysicalParams::rb87(346.0, 800.0).unwrap();
        let f = atomic_to_fluxonium(&p).unwrap();
        let m = fluxonium_map(&f).unwrap();
        assert_relative_eq!(m.omega, p.trap_freq(), max_relative = 1e-12);
        assert_relative_eq!(m.omega_q, p.qubit_split(), max_relative = 1e-12);
        assert_relative_eq!(m.coupling, p.derive().coupling, max_relative = 1e-12);
    }

    #[test]
    fn fluxonium_coupling_identity() {
        // (8 E_L E_C^3)^(1/4) equals k sqrt(2 hbar omega / m) after the
        // atomic substitutions.
        let p = PhysicalParams::rb87(529.0, 300.0).unwrap();
        let f = atomic_to_fluxonium(&p).unwrap();
        let g = (8.0 * f.e_l * f.e_c.powi(3)).powf(0.25);
        assert_relative_eq!(g, p.derive().coupling, max_relative = 1e-12);
    }

    #[test]
    fn fluxonium_requires_pi_flux() {
        let f = FluxoniumParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(fluxonium_map(&f).is_err());
        assert!(FluxoniumParams::new(-1.0, 1.0, 1.0, std::f64::consts::PI).is_err());
    }

    #[test]
    fn rejects_nonpositive_trap_freq() {
        assert!(PhysicalParams::new(rb87_mass(), 783.5e-9, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(rb87_mass(), 783.5e-9, -1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_property(freq in 10.0f64..5000.0, split in 0.0f64..10_000.0) {
            let p = PhysicalParams::rb87(freq, split).unwrap();
            let (scaled, units) = nondimensionalize(&p);
            let q = redimensionalize(&scaled, &units).unwrap();
            prop_assert!((q.trap_freq() - p.trap_freq()).abs() <= 1e-12 * p.trap_freq());
            prop_assert!((q.qubit_split() - p.qubit_split()).abs() <= 1e-12 * p.qubit_split().max(1.0));
            let (r0, r1) = (p.derive().coupling_ratio, q.derive().coupling_ratio);
            prop_assert!((r0 - r1).abs() <= 1e-12 * r0);
        }

        #[test]
        fn coupling_monotone(f0 in 10.0f64..2000.0, scale in 1.001f64..4.0) {
            let p = PhysicalParams::rb87(f0, 0.0).unwrap();
            let higher = PhysicalParams::new(p.mass(), p.wavelength(), p.trap_freq() * scale, 0.0).unwrap();
            prop_assert!(higher.derive().coupling > p.derive().coupling);
            let shorter = PhysicalParams::new(p.mass(), p.wavelength() / scale, p.trap_freq(), 0.0).unwrap();
            prop_assert!(shorter.derive().coupling > p.derive().coupling);
        }
    }

    #[test]
    fn coupling_value_at_fig2_settings() {
        // Spot check of the absolute coupling, rad/s.
        let p = PhysicalParams::rb87(346.0, 0.0).unwrap();
        let d = p.derive();
        assert_abs_diff_eq!(d.coupling / (2.0 * std::f64::consts::PI), 2274.9, epsilon = 2.0);
    }
}
