//! Slowly varying medium polarizations at the two carriers.
//!
//! Per-atom polarizations, in the same rate units as the drive:
//!
//! ```text
//! p_f = 4 a_f (s1c s11 + s2c s22) + 6 b3 conj(a_f)^2 s21 + 4 i kappa_ion |a_f|^2 a_f s22
//! p_h = 2 b1 s21 exp(-i dk z)
//! ```
//!
//! The three-photon term pairs `s21` (oscillating at 3 omega_f) with two
//! conjugated fundamental envelopes, which is the only ordering that lands
//! on omega_f. With the propagation law `da_j/dz = N g_j (i omega_j/2 p_j -
//! dp_j/dt)` these coefficients make the field lose `hbar omega_h` per
//! excitation and `2 hbar omega_f` per ionization; the Stark term only
//! shifts the phase.

use num_complex::Complex64;

use crate::bloch::AtomTrajectory;
use crate::error::{Error, Result};
use crate::pulse::{FieldSlice, TimeGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct PolarizationSlice {
    pub grid: TimeGrid,
    pub p_f: Vec<Complex64>,
    pub p_h: Vec<Complex64>,
    pub dp_f: Vec<Complex64>,
    pub dp_h: Vec<Complex64>,
}

impl PolarizationSlice {
    pub fn from_trajectory(
        traj: &AtomTrajectory,
        fields: &FieldSlice,
        p: &crate::PhysParams,
    ) -> Result<Self> {
        let p_f = polarization_f(traj, fields, p)?;
        let p_h = polarization_h(traj, fields.z, p);
        let dp_f = time_derivative(&p_f, &fields.grid);
        let dp_h = time_derivative(&p_h, &fields.grid);
        Ok(Self {
            grid: fields.grid,
            p_f,
            p_h,
            dp_f,
            dp_h,
        })
    }

    /// Largest `|dP/dt| / (omega |P| / 2)` over both carriers, a measure of
    /// how well the slowly varying envelope assumption holds.
    pub fn svea_ratio(&self, omega_f: f64) -> f64 {
        let ratio = |p: &[Complex64], dp: &[Complex64], omega: f64| {
            let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if scale == 0.0 {
                return 0.0;
            }
            let d = dp.iter().map(|v| v.norm()).fold(0.0, f64::max);
            d / (0.5 * omega * scale)
        };
        ratio(&self.p_f, &self.dp_f, omega_f).max(ratio(&self.p_h, &self.dp_h, 3.0 * omega_f))
    }
}

pub fn polarization_f(
    traj: &AtomTrajectory,
    fields: &FieldSlice,
    p: &crate::PhysParams,
) -> Result<Vec<Complex64>> {
    if traj.grid != fields.grid || traj.states.len() != fields.a_f.len() {
        return Err(Error::GridMismatch(
            "trajectory and fields are on different grids".into(),
        ));
    }
    Ok(traj
        .states
        .iter()
        .zip(&fields.a_f)
        .map(|(s, &a)| {
            let stark = a * (4.0 * (p.s1c * s.s11 + p.s2c * s.s22));
            let ac = a.conj();
            let three_photon = ac * ac * s.s21 * (6.0 * p.b3);
            let ion = I * a * (4.0 * p.kappa_ion * a.norm_sqr() * s.s22);
            stark + three_photon + ion
        })
        .collect())
}

pub fn polarization_h(traj: &AtomTrajectory, z: f64, p: &crate::PhysParams) -> Vec<Complex64> {
    let dk_z = p.delta_k() * z;
    let k = if dk_z == 0.0 {
        Complex64::from(2.0 * p.b1)
    } else {
        Complex64::from_polar(2.0 * p.b1, -dk_z)
    };
    traj.states.iter().map(|s| s.s21 * k).collect()
}

/// Second-order finite-difference derivative on the grid.
pub fn time_derivative(series: &[Complex64], grid: &TimeGrid) -> Vec<Complex64> {
    let n = series.len();
    if n < 3 {
        let d = if n == 2 {
            (series[1] - series[0]) / grid.dt()
        } else {
            Complex64::default()
        };
        return vec![d; n];
    }
    let h2 = 2.0 * grid.dt();
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * series[0] + 4.0 * series[1] - series[2]) / h2);
    for i in 1..n - 1 {
        out.push((series[i + 1] - series[i - 1]) / h2);
    }
    out.push((3.0 * series[n - 1] - 4.0 * series[n - 2] + series[n - 3]) / h2);
    out
}
