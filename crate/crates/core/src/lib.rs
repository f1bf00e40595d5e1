//! Maxwell-Bloch simulation of phase-controlled photoabsorption.
//!
//! A fundamental field and its third harmonic co-propagate through a gas of
//! effective two-level atoms. The upper level is reached both by one
//! harmonic photon and by three fundamental photons, and is ionized by two
//! more fundamental photons. The relative phase of the two fields sets
//! whether the pathways interfere constructively or cancel.
//!
//! Modules, bottom up:
//!
//! * [`units`]: internal units and the parameter set,
//! * [`pulse`]: Gaussian envelopes and the retarded-time grid,
//! * [`bloch`]: single-atom density-matrix integration,
//! * [`medium`]: polarizations that source the fields,
//! * [`propagate`]: the z march,
//! * [`observables`]: yields, energies, phases and scan drivers,
//! * [`config`] and [`output`]: run configuration, CSV/SVG and manifests.

pub mod bloch;
pub mod config;
pub mod error;
pub mod medium;
pub mod observables;
pub mod output;
pub mod propagate;
pub mod pulse;
pub mod units;

pub use bloch::{integrate_atom, ion_yield, AtomState, AtomTrajectory, IonYield};
pub use config::{
    parse_config, parse_config_with, ConfigError, ConfigErrors, Preset, RunConfig, RunMode,
};
pub use error::{Error, Result};
pub use observables::{
    phase_axis, pulse_energy, relative_phase, scan_phase, scan_z, single_atom_yield, snapshot,
    snapshot_envelopes, wrap_phase, Observables, ScanKind, ScanResult, Snapshot,
};
pub use output::{emit_csv, emit_plot, RunManifest};
pub use propagate::{
    propagate, rhs_z, step_z, Diagnostics, PropagationState, RunOutput, Simulation, ZGrid, ZScheme,
};
pub use pulse::{gaussian_envelope, initial_fields, FieldSlice, PulseSpec, TimeGrid};
pub use units::{gamma_ion_rate, matched_harmonic, stark_detuning, PhysParams, UnitSystem};
