//! Marching the field envelopes through the medium in the retarded frame.
//!
//! With `tau = t - z n / c` the advection term drops out and each envelope
//! obeys `da_j/dz = N g_j (i omega_j/2 p_j - dp_j/dt)`. The density enters
//! only through the product `N dz`, so a run at `(c N, z / c)` with matched
//! steps reproduces every observable. Group walk-off between the carriers
//! is not modelled; a refractive-index difference only shows up as the
//! phase mismatch `dk z`.

use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::{integrate_atom, ion_yield, AtomState, AtomTrajectory, IonYield};
use crate::error::{Error, Result};
use crate::medium::PolarizationSlice;
use crate::observables::{observe, Observables};
use crate::pulse::{initial_fields, FieldSlice, PulseSpec, TimeGrid};
use crate::units::PhysParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZScheme {
    Midpoint,
    Rk4,
}

impl ZScheme {
    pub fn order(self) -> i32 {
        match self {
            ZScheme::Midpoint => 2,
            ZScheme::Rk4 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZGrid {
    pub z_max: f64,
    pub dz_init: f64,
    pub adaptive: bool,
    /// Per-step error target, relative to each field's launch peak.
    pub tol_z: f64,
    pub snapshot_zs: Vec<f64>,
    pub scheme: ZScheme,
    /// Drop the `dP/dt` source term.
    pub drop_dpdt: bool,
}

impl ZGrid {
    pub fn fixed(z_max: f64, dz: f64) -> Self {
        Self {
            z_max,
            dz_init: dz,
            adaptive: false,
            tol_z: 1e-6,
            snapshot_zs: Vec::new(),
            scheme: ZScheme::Midpoint,
            drop_dpdt: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_max > 0.0 && self.z_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "z_max must be > 0, got {}",
                self.z_max
            )));
        }
        if !(self.dz_init > 0.0 && self.dz_init.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dz_init must be > 0, got {}",
                self.dz_init
            )));
        }
        if !(self.tol_z > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tol_z must be > 0, got {}",
                self.tol_z
            )));
        }
        if let Some(z) = self
            .snapshot_zs
            .iter()
            .find(|z| !(**z >= 0.0 && **z <= self.z_max))
        {
            return Err(Error::InvalidInput(format!(
                "snapshot z = {z} outside [0, z_max]"
            )));
        }
        Ok(())
    }
}

/// Everything a single run needs, already validated and resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    pub params: PhysParams,
    pub pulse_f: PulseSpec,
    pub pulse_h: PulseSpec,
    pub theta0: f64,
    pub grid: TimeGrid,
    pub zgrid: ZGrid,
}

impl Simulation {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.pulse_f.validate()?;
        self.pulse_h.validate()?;
        self.grid.validate()?;
        self.zgrid.validate()
    }

    pub fn launch(&self) -> Result<FieldSlice> {
        initial_fields(&self.pulse_f, &self.pulse_h, self.theta0, self.grid)
    }
}

/// Medium response of one slice and the resulting z-derivative.
#[derive(Debug, Clone)]
pub struct MediumResponse {
    pub da_f: Vec<Complex64>,
    pub da_h: Vec<Complex64>,
    pub trajectory: AtomTrajectory,
    pub yield_: IonYield,
    pub svea_ratio: f64,
}

pub fn rhs_z(fields: &FieldSlice, p: &PhysParams, drop_dpdt: bool) -> Result<MediumResponse> {
    let trajectory = integrate_atom(fields, p, AtomState::GROUND)?;
    let yield_ = ion_yield(&trajectory)?;
    let pol = PolarizationSlice::from_trajectory(&trajectory, fields, p)?;
    let source = |pj: &[Complex64], dpj: &[Complex64], omega: f64, g: f64| -> Vec<Complex64> {
        let scale = p.density * g;
        if scale == 0.0 {
            return vec![Complex64::default(); pj.len()];
        }
        pj.iter()
            .zip(dpj)
            .map(|(&v, &dv)| {
                let s = I * (0.5 * omega) * v;
                scale * if drop_dpdt { s } else { s - dv }
            })
            .collect()
    };
    let da_f = source(&pol.p_f, &pol.dp_f, p.omega_f, p.g_f());
    let da_h = source(&pol.p_h, &pol.dp_h, p.omega_h(), p.g_h());
    Ok(MediumResponse {
        da_f,
        da_h,
        svea_ratio: pol.svea_ratio(p.omega_f),
        trajectory,
        yield_,
    })
}

fn axpy(fields: &FieldSlice, dz: f64, da_f: &[Complex64], da_h: &[Complex64]) -> FieldSlice {
    FieldSlice {
        grid: fields.grid,
        z: fields.z + dz,
        a_f: fields
            .a_f
            .iter()
            .zip(da_f)
            .map(|(a, d)| a + d * dz)
            .collect(),
        a_h: fields
            .a_h
            .iter()
            .zip(da_h)
            .map(|(a, d)| a + d * dz)
            .collect(),
    }
}

/// One explicit step given the derivative `k1` at the start point.
fn advance(
    fields: &FieldSlice,
    k1: &MediumResponse,
    dz: f64,
    p: &PhysParams,
    zgrid: &ZGrid,
    evals: &mut usize,
) -> Result<FieldSlice> {
    let rhs = |f: &FieldSlice, evals: &mut usize| {
        *evals += 1;
        rhs_z(f, p, zgrid.drop_dpdt)
    };
    match zgrid.scheme {
        ZScheme::Midpoint => {
            let mid = axpy(fields, 0.5 * dz, &k1.da_f, &k1.da_h);
            let k2 = rhs(&mid, evals)?;
            Ok(axpy(fields, dz, &k2.da_f, &k2.da_h))
        }
        ZScheme::Rk4 => {
            let k2 = rhs(&axpy(fields, 0.5 * dz, &k1.da_f, &k1.da_h), evals)?;
            let k3 = rhs(&axpy(fields, 0.5 * dz, &k2.da_f, &k2.da_h), evals)?;
            let k4 = rhs(&axpy(fields, dz, &k3.da_f, &k3.da_h), evals)?;
            let combine = |a: &[Complex64],
                           b: &[Complex64],
                           c: &[Complex64],
                           d: &[Complex64]|
             -> Vec<Complex64> {
                (0..a.len())
                    .map(|i| (a[i] + 2.0 * (b[i] + c[i]) + d[i]) / 6.0)
                    .collect()
            };
            let df = combine(&k1.da_f, &k2.da_f, &k3.da_f, &k4.da_f);
            let dh = combine(&k1.da_h, &k2.da_h, &k3.da_h, &k4.da_h);
            Ok(axpy(fields, dz, &df, &dh))
        }
    }
}

/// A point of the z march: the fields plus the observables recorded there.
#[derive(Debug, Clone)]
pub struct PropagationState {
    pub z: f64,
    pub fields: FieldSlice,
    pub observables: Observables,
}

/// A single non-adaptive step of size `dz` from `state`.
pub fn step_z(state: &PropagationState, dz: f64, sim: &Simulation) -> Result<PropagationState> {
    if !(dz > 0.0) {
        return Err(Error::InvalidInput(format!("dz must be > 0, got {dz}")));
    }
    let p = &sim.params;
    let mut evals = 0;
    let k1 = rhs_z(&state.fields, p, sim.zgrid.drop_dpdt)?;
    let fields = advance(&state.fields, &k1, dz, p, &sim.zgrid, &mut evals)?;
    let resp = rhs_z(&fields, p, sim.zgrid.drop_dpdt)?;
    let observables = observe(&fields, &resp, sim, Some(state.observables.theta))?;
    Ok(PropagationState {
        z: fields.z,
        fields,
        observables,
    })
}

/// Convergence and bookkeeping figures gathered over a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub max_svea_ratio: f64,
    pub max_yield_disagreement: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub min_dz: f64,
    pub max_dz: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: Vec<Observables>,
    pub snapshots: Vec<FieldSlice>,
    pub diagnostics: Diagnostics,
}

fn max_rel_diff(a: &FieldSlice, b: &FieldSlice, scale_f: f64, scale_h: f64) -> f64 {
    let diff = |x: &[Complex64], y: &[Complex64], s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        x.iter()
            .zip(y)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max)
            / s
    };
    diff(&a.a_f, &b.a_f, scale_f).max(diff(&a.a_h, &b.a_h, scale_h))
}

fn peak(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// March from z = 0 to `z_max`, recording observables at every accepted
/// step and field snapshots at the requested distances.
///
/// With adaptivity on, each step is checked by step doubling: the half-step
/// pair is kept if it agrees with the full step to `tol_z`, otherwise the
/// step is halved. Steps grow by 1.5x when the estimate is under `tol_z/10`.
pub fn propagate(sim: &Simulation) -> Result<RunOutput> {
    sim.validate()?;
    let p = &sim.params;
    let zg = &sim.zgrid;
    let mut fields = sim.launch()?;
    let (scale_f, scale_h) = (peak(&fields.a_f), peak(&fields.a_h));

    let mut diag = Diagnostics {
        min_dz: f64::INFINITY,
        ..Default::default()
    };
    let mut evals = 1usize;
    let mut resp = rhs_z(&fields, p, zg.drop_dpdt)?;
    let mut obs = observe(&fields, &resp, sim, None)?;
    let mut series = vec![obs.clone()];
    let mut snapshots = Vec::new();
    let note = |diag: &mut Diagnostics, r: &MediumResponse| {
        diag.max_svea_ratio = diag.max_svea_ratio.max(r.svea_ratio);
        diag.max_yield_disagreement = diag.max_yield_disagreement.max(r.yield_.disagreement());
    };
    note(&mut diag, &resp);

    let mut targets: Vec<f64> = zg.snapshot_zs.clone();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let mut pending = targets.into_iter().peekable();
    while let Some(&zs) = pending.peek() {
        if zs <= 1e-12 * zg.z_max {
            snapshots.push(fields.clone());
            pending.next();
        } else {
            break;
        }
    }

    let mut dz = zg.dz_init;
    let dz_floor = zg.dz_init * 1e-6;
    let mut z = 0.0;
    // stop a whisker short of the target instead of taking a sliver step
    let close = 1e-9 * zg.z_max;
    while z < zg.z_max - close {
        let target = pending.peek().copied().unwrap_or(zg.z_max).min(zg.z_max);
        let (h, hits_target) = if z + dz >= target - close {
            (target - z, true)
        } else {
            (dz, false)
        };

        let next = if zg.adaptive {
            let full = advance(&fields, &resp, h, p, zg, &mut evals)?;
            let half = advance(&fields, &resp, 0.5 * h, p, zg, &mut evals)?;
            evals += 1;
            let k_half = rhs_z(&half, p, zg.drop_dpdt)?;
            let two = advance(&half, &k_half, 0.5 * h, p, zg, &mut evals)?;
            let est = max_rel_diff(&full, &two, scale_f, scale_h);
            if !(est < zg.tol_z) {
                diag.rejected_steps += 1;
                dz = 0.5 * h;
                if dz < dz_floor {
                    return Err(Error::Stiffness { z, dz });
                }
                continue;
            }
            if est < 0.1 * zg.tol_z && !hits_target {
                dz = (1.5 * dz).min(zg.z_max);
            }
            two
        } else {
            advance(&fields, &resp, h, p, zg, &mut evals)?
        };

        diag.accepted_steps += 1;
        diag.min_dz = diag.min_dz.min(h);
        diag.max_dz = diag.max_dz.max(h);
        z = if hits_target { target } else { z + h };
        fields = FieldSlice { z, ..next };
        evals += 1;
        resp = rhs_z(&fields, p, zg.drop_dpdt).map_err(|e| locate(e, z))?;
        note(&mut diag, &resp);
        obs = observe(&fields, &resp, sim, Some(obs.theta))?;
        series.push(obs.clone());
        if hits_target && pending.peek().is_some_and(|&t| (t - z).abs() <= close) {
            snapshots.push(fields.clone());
            pending.next();
        }
    }
    for _ in pending {
        snapshots.push(fields.clone());
    }
    if !diag.min_dz.is_finite() {
        diag.min_dz = 0.0;
    }
    diag.rhs_evaluations = evals;
    Ok(RunOutput {
        series,
        snapshots,
        diagnostics: diag,
    })
}

fn locate(e: Error, z: f64) -> Error {
    match e {
        Error::InvariantBreach { step, t, what, .. } => Error::InvariantBreach { step, t, z, what },
        other => other,
    }
}
