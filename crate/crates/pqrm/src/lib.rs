//! Desk-scale simulator for periodic quantum Rabi dynamics of cold atoms
//! in a harmonic trap superimposed with a lambda/4-period lattice.
//!
//! Three cross-validating propagators share one parameter engine:
//!
//! - [`grid`]: exact split-step spectral solver on a position grid;
//! - [`bands`]: the two-band periodic Rabi model with Brillouin-zone
//!   folding (plus an N-band generalization) on the quasimomentum grid;
//! - [`fock`]: the standard quantum Rabi model in truncated Fock space,
//!   evolved by exact eigendecomposition.
//!
//! [`observables`] computes excitation numbers, band occupations,
//! phase-space means and the Raman-pulse readout from any representation;
//! [`scenario`] reproduces the experiment's measurement protocols as
//! deterministic, config-driven sweeps.
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example excitation_number      # <N>(t) per model
//! cargo run --release --example band_occupation        # <sigma_x>(t)
//! cargo run --release --example phase_space            # (x, p) and (x, q) orbits
//! cargo run --release --example collapse_revival       # readout revivals
//! cargo run --release --example excitation_difference  # qubit-state sweep
//! cargo run --release --example fluxonium_mapping      # circuit dictionary
//! cargo run --release --example model_comparison       # grid vs band models
//! ```
//!
//! The `pqrm` binary exposes the same machinery through config files:
//! `pqrm run --config fixtures/fig2a.toml`.

pub mod bands;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod fock;
pub mod grid;
pub mod observables;
pub mod params;
pub mod plot;
pub mod scenario;
pub(crate) mod spectral;

pub use error::{Error, Result};
pub use params::{DerivedParams, FluxoniumParams, PhysicalParams, ScaledParams, Units};
