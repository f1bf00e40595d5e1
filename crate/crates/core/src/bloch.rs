//! Single-atom density-matrix dynamics of the effective two-level atom.
//!
//! The coherence `s21` lives in the frame of the complex field envelopes,
//! i.e. the explicit phase of the fundamental is folded into the drive
//!
//! ```text
//! Omega = (b3 a_f^3 + b1 a_h exp(i dk z)) / 2
//! ```
//!
//! and the equations read
//!
//! ```text
//! ds11/dt = gamma s22 - 2 Im(conj(Omega) s21)
//! ds22/dt = -(gamma + gamma_ion) s22 + 2 Im(conj(Omega) s21)
//! ds21/dt = -[(gamma + gamma_ion)/2 + i(delta - 3 dphi_f/dt) + i s_rel |a_f|^2] s21
//!           + i Omega (s11 - s22)
//! ```
//!
//! In the envelope frame the `3 dphi_f/dt` term is absorbed exactly, so
//! [`integrate_atom`] passes zero for it. [`integrate_atom_polar`] keeps the
//! amplitude/phase form with an explicit `dphi_f/dt` and serves as a
//! cross-check.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::{FieldSlice, TimeGrid};
use crate::units::{gamma_ion_rate, PhysParams};

/// Tolerance on populations and positivity at each accepted step.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Tolerance on growth of `s11 + s22` across one step.
pub const TRACE_TOL: f64 = 1e-12;
/// Estimator disagreement that turns into an error.
pub const YIELD_ERROR_TOL: f64 = 1e-4;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    pub s11: f64,
    pub s22: f64,
    pub s21: Complex64,
}

impl AtomState {
    pub const GROUND: AtomState = AtomState {
        s11: 1.0,
        s22: 0.0,
        s21: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn trace(&self) -> f64 {
        self.s11 + self.s22
    }

    /// Name of the first violated invariant, if any.
    pub fn check(&self, tol: f64) -> Option<String> {
        let finite = self.s11.is_finite()
            && self.s22.is_finite()
            && self.s21.re.is_finite()
            && self.s21.im.is_finite();
        if !finite {
            return Some("non-finite density matrix".into());
        }
        if self.s11 < -tol || self.s11 > 1.0 + tol {
            return Some(format!("s11 = {:.3e} outside [0, 1]", self.s11));
        }
        if self.s22 < -tol || self.s22 > 1.0 + tol {
            return Some(format!("s22 = {:.3e} outside [0, 1]", self.s22));
        }
        if self.trace() > 1.0 + tol {
            return Some(format!("s11 + s22 = {:.12} exceeds 1", self.trace()));
        }
        let excess = self.s21.norm_sqr() - self.s11 * self.s22;
        if excess > tol {
            return Some(format!("|s21|^2 exceeds s11 s22 by {excess:.3e}"));
        }
        None
    }
}

impl Add for AtomState {
    type Output = AtomState;
    fn add(self, o: AtomState) -> AtomState {
        AtomState {
            s11: self.s11 + o.s11,
            s22: self.s22 + o.s22,
            s21: self.s21 + o.s21,
        }
    }
}

impl Mul<f64> for AtomState {
    type Output = AtomState;
    fn mul(self, k: f64) -> AtomState {
        AtomState {
            s11: self.s11 * k,
            s22: self.s22 * k,
            s21: self.s21 * k,
        }
    }
}

/// Per-atom history over the time grid.
#[derive(Debug, Clone)]
pub struct AtomTrajectory {
    pub grid: TimeGrid,
    pub states: Vec<AtomState>,
    /// Ionization rate at each grid point.
    pub gamma_ion: Vec<f64>,
    /// Instantaneous detuning `delta + s_rel |a_f|^2` at each grid point.
    pub detuning: Vec<f64>,
    /// Drive at each grid point.
    pub drive: Vec<Complex64>,
}

impl AtomTrajectory {
    pub fn last(&self) -> AtomState {
        *self.states.last().expect("trajectory is never empty")
    }
}

/// Half-Rabi drive of the two interfering pathways.
pub fn rabi_drive(a_f: Complex64, a_h: Complex64, p: &PhysParams, dk_z: f64) -> Complex64 {
    let three = a_f * a_f * a_f * p.b3;
    let one = if dk_z == 0.0 {
        a_h * p.b1
    } else {
        a_h * Complex64::from_polar(p.b1, dk_z)
    };
    (three + one) * 0.5
}

pub fn bloch_rhs(
    state: &AtomState,
    drive: Complex64,
    u_f: f64,
    p: &PhysParams,
    dphif_dt: f64,
) -> AtomState {
    let u2 = u_f * u_f;
    let g_ion = gamma_ion_rate(u_f, p);
    let pump = 2.0 * (drive.conj() * state.s21).im;
    let decay = p.gamma * state.s22;
    let ds11 = decay - pump;
    let ds22 = -decay - g_ion * state.s22 + pump;
    let damping = Complex64::new(
        0.5 * (p.gamma + g_ion),
        p.delta - 3.0 * dphif_dt + p.s_rel() * u2,
    );
    let ds21 = -damping * state.s21 + I * drive * (state.s11 - state.s22);
    AtomState {
        s11: ds11,
        s22: ds22,
        s21: ds21,
    }
}

/// Values at interval midpoints by four-point cubic interpolation.
pub(crate) fn midpoints<T>(v: &[T]) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    if n < 2 {
        return Vec::new();
    }
    if n < 4 {
        return v.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    let mut out = Vec::with_capacity(n - 1);
    out.push((v[0] * 5.0 + v[1] * 15.0 - v[2] * 5.0 + v[3]) * (1.0 / 16.0));
    for i in 1..n - 2 {
        out.push(((v[i] + v[i + 1]) * 9.0 - v[i - 1] - v[i + 2]) * (1.0 / 16.0));
    }
    out.push((v[n - 4] - v[n - 3] * 5.0 + v[n - 2] * 15.0 + v[n - 1] * 5.0) * (1.0 / 16.0));
    out
}

/// Samples of everything the RK4 stages need on one slice.
struct DriveTable {
    drive: Vec<Complex64>,
    u_f: Vec<f64>,
    dphi: Vec<f64>,
    drive_mid: Vec<Complex64>,
    u_mid: Vec<f64>,
    dphi_mid: Vec<f64>,
}

fn run_rk4(
    grid: TimeGrid,
    z: f64,
    table: DriveTable,
    p: &PhysParams,
    initial: AtomState,
) -> Result<AtomTrajectory> {
    let n = grid.n_points;
    let dt = grid.dt();
    let mut states = Vec::with_capacity(n);
    let mut y = initial;
    if let Some(what) = y.check(POSITIVITY_TOL) {
        return Err(Error::InvariantBreach {
            step: 0,
            t: grid.t_start,
            z,
            what,
        });
    }
    states.push(y);
    for i in 0..n - 1 {
        let (d0, d1, dm) = (table.drive[i], table.drive[i + 1], table.drive_mid[i]);
        let (u0, u1, um) = (table.u_f[i], table.u_f[i + 1], table.u_mid[i]);
        let (f0, f1, fm) = (table.dphi[i], table.dphi[i + 1], table.dphi_mid[i]);
        let k1 = bloch_rhs(&y, d0, u0, p, f0);
        let k2 = bloch_rhs(&(y + k1 * (0.5 * dt)), dm, um, p, fm);
        let k3 = bloch_rhs(&(y + k2 * (0.5 * dt)), dm, um, p, fm);
        let k4 = bloch_rhs(&(y + k3 * dt), d1, u1, p, f1);
        let next = y + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        if let Some(what) = next.check(POSITIVITY_TOL) {
            return Err(Error::InvariantBreach {
                step: i + 1,
                t: grid.time(i + 1),
                z,
                what,
            });
        }
        if next.trace() > y.trace() + TRACE_TOL {
            return Err(Error::InvariantBreach {
                step: i + 1,
                t: grid.time(i + 1),
                z,
                what: format!("trace grew by {:.3e}", next.trace() - y.trace()),
            });
        }
        y = next;
        states.push(y);
    }
    let gamma_ion = table.u_f.iter().map(|&u| gamma_ion_rate(u, p)).collect();
    let s_rel = p.s_rel();
    let detuning = table
        .u_f
        .iter()
        .zip(&table.dphi)
        .map(|(&u, &f)| p.delta - 3.0 * f + s_rel * u * u)
        .collect();
    Ok(AtomTrajectory {
        grid,
        states,
        gamma_ion,
        detuning,
        drive: table.drive,
    })
}

/// Fixed-step classical RK4 over the slice's time grid.
///
/// Drive values between grid points come from cubic interpolation, which
/// keeps the scheme fourth order. Every step is checked against the
/// density-matrix invariants; a breach usually means `dt` is too large.
pub fn integrate_atom(
    fields: &FieldSlice,
    p: &PhysParams,
    initial: AtomState,
) -> Result<AtomTrajectory> {
    fields.validate()?;
    let dk_z = p.delta_k() * fields.z;
    let drive: Vec<Complex64> = fields
        .a_f
        .iter()
        .zip(&fields.a_h)
        .map(|(&f, &h)| rabi_drive(f, h, p, dk_z))
        .collect();
    let u_f: Vec<f64> = fields.a_f.iter().map(|a| a.norm()).collect();
    let n = u_f.len();
    let table = DriveTable {
        drive_mid: midpoints(&drive),
        u_mid: midpoints(&u_f),
        drive,
        u_f,
        dphi: vec![0.0; n],
        dphi_mid: vec![0.0; n - 1],
    };
    run_rk4(fields.grid, fields.z, table, p, initial)
}

/// Continuity-unwrapped phase of a complex series.
pub(crate) fn unwrapped_phase(series: &[Complex64], sign: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(series.len());
    let mut prev: Option<f64> = None;
    for a in series {
        let raw = sign * a.arg();
        let v = match prev {
            None => raw,
            Some(q) => {
                raw + (2.0 * std::f64::consts::PI)
                    * ((q - raw) / (2.0 * std::f64::consts::PI)).round()
            }
        };
        out.push(v);
        prev = Some(v);
    }
    out
}

/// Amplitude/phase form of [`integrate_atom`].
///
/// Works with real amplitudes `E_j = |a_j|`, phases `phi_j = -arg a_j`, the
/// relative phase `theta = phi_h - 3 phi_f - dk z` and an explicit
/// `dphi_f/dt` from central differences. The returned coherence is in the
/// frame co-rotating with `phi_f`; multiply by `exp(-3 i phi_f)` to compare
/// with [`integrate_atom`].
pub fn integrate_atom_polar(
    fields: &FieldSlice,
    p: &PhysParams,
    initial: AtomState,
) -> Result<AtomTrajectory> {
    fields.validate()?;
    let dk_z = p.delta_k() * fields.z;
    let e_f: Vec<f64> = fields.a_f.iter().map(|a| a.norm()).collect();
    let e_h: Vec<f64> = fields.a_h.iter().map(|a| a.norm()).collect();
    let phi_f = unwrapped_phase(&fields.a_f, -1.0);
    let phi_h = unwrapped_phase(&fields.a_h, -1.0);
    let drive: Vec<Complex64> = (0..e_f.len())
        .map(|i| {
            let theta = phi_h[i] - 3.0 * phi_f[i] - dk_z;
            (Complex64::from(p.b3 * e_f[i].powi(3)) + Complex64::from_polar(p.b1 * e_h[i], -theta))
                * 0.5
        })
        .collect();
    let dt = fields.grid.dt();
    let n = e_f.len();
    let dphi: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => (-3.0 * phi_f[0] + 4.0 * phi_f[1] - phi_f[2]) / (2.0 * dt),
            i if i == n - 1 => (3.0 * phi_f[i] - 4.0 * phi_f[i - 1] + phi_f[i - 2]) / (2.0 * dt),
            i => (phi_f[i + 1] - phi_f[i - 1]) / (2.0 * dt),
        })
        .collect();
    let table = DriveTable {
        drive_mid: midpoints(&drive),
        u_mid: midpoints(&e_f),
        dphi_mid: midpoints(&dphi),
        drive,
        u_f: e_f,
        dphi,
    };
    run_rk4(fields.grid, fields.z, table, p, initial)
}

/// Ion yield from the final populations, with the flux cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonYield {
    /// `1 - s11 - s22` at the end of the window.
    pub q: f64,
    /// Trapezoid integral of `gamma_ion(t) s22(t)`.
    pub q_flux: f64,
}

impl IonYield {
    pub fn disagreement(&self) -> f64 {
        (self.q - self.q_flux).abs()
    }
}

pub fn ion_yield(traj: &AtomTrajectory) -> Result<IonYield> {
    let end = traj.last();
    let q = (1.0 - end.s11 - end.s22).max(0.0);
    let dt = traj.grid.dt();
    let flux: Vec<f64> = traj
        .gamma_ion
        .iter()
        .zip(&traj.states)
        .map(|(g, s)| g * s.s22)
        .collect();
    let q_flux = trapezoid(&flux, dt);
    let y = IonYield { q, q_flux };
    if y.disagreement() > YIELD_ERROR_TOL {
        return Err(Error::YieldMismatch {
            population: q,
            flux: q_flux,
        });
    }
    Ok(y)
}

pub(crate) fn trapezoid(v: &[f64], dt: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => dt * (v[1..n - 1].iter().sum::<f64>() + 0.5 * (v[0] + v[n - 1])),
    }
}
