//! Observables (ion yield, pulse energies, relative phase) and the drivers
//! for phase scans, z scans and envelope snapshots.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{integrate_atom, ion_yield, AtomState};
use crate::error::{Error, Result};
use crate::propagate::{propagate, Diagnostics, MediumResponse, Simulation};
use crate::pulse::{initial_fields, FieldSlice, TimeGrid};
use crate::units::PhysParams;

/// Smallest amplitude at which a phase is considered defined.
pub const PHASE_AMPLITUDE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    pub z: f64,
    /// Relative phase at the pulse center, unwrapped along z.
    pub theta: f64,
    pub s_f: f64,
    pub s_h: f64,
    pub q: f64,
}

/// Trapezoid integral of `|a|^2` over the grid.
pub fn pulse_energy(a: &[Complex64], grid: &TimeGrid) -> f64 {
    let v: Vec<f64> = a.iter().map(|x| x.norm_sqr()).collect();
    crate::bloch::trapezoid(&v, grid.dt())
}

/// `theta = phi_h - 3 phi_f - dk z` with `phi_j = -arg a_j`, sampled at
/// retarded time `t_eval` and put on the branch nearest `previous`.
pub fn relative_phase(
    fields: &FieldSlice,
    t_eval: f64,
    p: &PhysParams,
    previous: Option<f64>,
) -> Result<f64> {
    let k = fields.grid.nearest_index(t_eval);
    let (af, ah) = (fields.a_f[k], fields.a_h[k]);
    let amplitude = af.norm().min(ah.norm());
    if !(amplitude > PHASE_AMPLITUDE_FLOOR) {
        return Err(Error::UndefinedPhase { amplitude });
    }
    let raw = 3.0 * af.arg() - ah.arg() - p.delta_k() * fields.z;
    let reference = previous.unwrap_or(0.0);
    Ok(raw + 2.0 * PI * ((reference - raw) / (2.0 * PI)).round())
}

/// Reduce an angle to `[0, 2 pi)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let w = theta.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Observables of one slice. Where the phase is undefined (harmonic passing
/// through zero at the sample) the previous value is held.
pub(crate) fn observe(
    fields: &FieldSlice,
    resp: &MediumResponse,
    sim: &Simulation,
    previous: Option<f64>,
) -> Result<Observables> {
    let theta = match relative_phase(
        fields,
        sim.pulse_f.t_center,
        &sim.params,
        previous.or(Some(sim.theta0)),
    ) {
        Ok(t) => t,
        Err(Error::UndefinedPhase { .. }) if previous.is_some() => previous.unwrap_or_default(),
        Err(Error::UndefinedPhase { .. }) => sim.theta0,
        Err(e) => return Err(e),
    };
    Ok(Observables {
        z: fields.z,
        theta,
        s_f: pulse_energy(&fields.a_f, &fields.grid),
        s_h: pulse_energy(&fields.a_h, &fields.grid),
        q: resp.yield_.q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    Phase,
    Z,
    Snapshots,
}

/// Envelope magnitudes at one distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub z: f64,
    pub tau: Vec<f64>,
    pub abs_ah: Vec<f64>,
    pub abs_af: Vec<f64>,
    /// Energy-weighted mean retarded time of the harmonic.
    pub centroid_h: f64,
    /// Fraction of harmonic energy behind `t_center + tau_f`.
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_digest: String,
    pub code_version: String,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            config_digest: String::new(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub kind: ScanKind,
    /// Curve label, e.g. the intensity preset.
    pub label: String,
    pub axis: Vec<f64>,
    pub points: Vec<Observables>,
    pub snapshots: Vec<Snapshot>,
    #[serde(skip)]
    pub diagnostics: Option<Diagnostics>,
    pub provenance: Provenance,
}

impl ScanResult {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.snapshots.is_empty()
    }

    /// `S_h(z) / S_h(0)` along a z scan.
    pub fn sh_norm(&self) -> Vec<f64> {
        let s0 = self.points.first().map_or(1.0, |o| o.s_h);
        self.points.iter().map(|o| o.s_h / s0).collect()
    }

    pub fn sf_norm(&self) -> Vec<f64> {
        let s0 = self.points.first().map_or(1.0, |o| o.s_f);
        self.points.iter().map(|o| o.s_f / s0).collect()
    }
}

/// Single-atom ion yield at the medium entrance for one launch phase.
pub fn single_atom_yield(sim: &Simulation, theta0: f64) -> Result<f64> {
    let fields = initial_fields(&sim.pulse_f, &sim.pulse_h, theta0, sim.grid)?;
    let traj = integrate_atom(&fields, &sim.params, AtomState::GROUND)?;
    Ok(ion_yield(&traj)?.q)
}

/// Ion yield versus launch phase, no propagation. Points run in parallel
/// and are returned in `thetas` order.
pub fn scan_phase(sim: &Simulation, thetas: &[f64], label: &str) -> Result<ScanResult> {
    if thetas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "phase axis must be strictly increasing".into(),
        ));
    }
    let qs: Vec<f64> = thetas
        .par_iter()
        .map(|&th| single_atom_yield(sim, th))
        .collect::<Result<_>>()?;
    let points = thetas
        .iter()
        .zip(qs)
        .map(|(&theta, q)| Observables {
            z: 0.0,
            theta,
            s_f: 0.0,
            s_h: 0.0,
            q,
        })
        .collect();
    Ok(ScanResult {
        kind: ScanKind::Phase,
        label: label.to_string(),
        axis: thetas.to_vec(),
        points,
        snapshots: Vec::new(),
        diagnostics: None,
        provenance: Provenance::default(),
    })
}

/// `n` evenly spaced phases covering `[0, 2 pi]`.
pub fn phase_axis(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| 2.0 * PI * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn scan_z(sim: &Simulation, label: &str) -> Result<ScanResult> {
    let out = propagate(sim)?;
    Ok(ScanResult {
        kind: ScanKind::Z,
        label: label.to_string(),
        axis: out.series.iter().map(|o| o.z).collect(),
        points: out.series,
        snapshots: Vec::new(),
        diagnostics: Some(out.diagnostics),
        provenance: Provenance::default(),
    })
}

pub fn snapshot(fields: &FieldSlice, sim: &Simulation) -> Snapshot {
    let tau: Vec<f64> = fields.grid.times().collect();
    let e: Vec<f64> = fields.a_h.iter().map(|a| a.norm_sqr()).collect();
    let dt = fields.grid.dt();
    let total = crate::bloch::trapezoid(&e, dt);
    let weighted: Vec<f64> = e.iter().zip(&tau).map(|(v, t)| v * t).collect();
    let cut = sim.pulse_f.t_center + sim.pulse_f.tau;
    let tail: Vec<f64> = e
        .iter()
        .zip(&tau)
        .map(|(v, &t)| if t > cut { *v } else { 0.0 })
        .collect();
    let (centroid_h, tail_fraction) = if total > 0.0 {
        (
            crate::bloch::trapezoid(&weighted, dt) / total,
            crate::bloch::trapezoid(&tail, dt) / total,
        )
    } else {
        (sim.pulse_f.t_center, 0.0)
    };
    Snapshot {
        z: fields.z,
        abs_ah: fields.a_h.iter().map(|a| a.norm()).collect(),
        abs_af: fields.a_f.iter().map(|a| a.norm()).collect(),
        tau,
        centroid_h,
        tail_fraction,
    }
}

pub fn snapshot_envelopes(sim: &Simulation, label: &str) -> Result<ScanResult> {
    if sim.zgrid.snapshot_zs.is_empty() {
        return Err(Error::InvalidInput(
            "no snapshot distances requested".into(),
        ));
    }
    let out = propagate(sim)?;
    let snapshots: Vec<Snapshot> = out.snapshots.iter().map(|f| snapshot(f, sim)).collect();
    Ok(ScanResult {
        kind: ScanKind::Snapshots,
        label: label.to_string(),
        axis: snapshots.iter().map(|s| s.z).collect(),
        points: out.series,
        snapshots,
        diagnostics: Some(out.diagnostics),
        provenance: Provenance::default(),
    })
}
