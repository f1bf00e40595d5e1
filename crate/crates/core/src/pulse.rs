//! Gaussian envelopes, the retarded-time grid and the launch fields.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Gaussian envelope of one carrier.
///
/// `tau` is the 1/e half-width of the amplitude, so the cube of an envelope
/// of width `tau` is an envelope of width `tau / sqrt(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSpec {
    pub peak: f64,
    pub t_center: f64,
    pub tau: f64,
    pub phase0: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pulse width must be > 0, got {}",
                self.tau
            )));
        }
        if !(self.peak >= 0.0 && self.peak.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pulse peak must be >= 0, got {}",
                self.peak
            )));
        }
        if !self.t_center.is_finite() || !self.phase0.is_finite() {
            return Err(Error::InvalidInput(
                "pulse center and phase must be finite".into(),
            ));
        }
        Ok(())
    }
}

pub fn gaussian_envelope(t: f64, spec: &PulseSpec) -> f64 {
    let x = (t - spec.t_center) / spec.tau;
    spec.peak * (-x * x).exp()
}

/// Uniform grid in retarded time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        let grid = Self {
            t_start,
            t_end,
            n_points,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid spanning `[t_start, t_end]` with spacing no larger than `dt`.
    pub fn with_spacing(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be > 0, got {dt}")));
        }
        let intervals = ((t_end - t_start) / dt - 1e-9).ceil().max(1.0) as usize;
        Self::new(t_start, t_end, intervals + 1)
    }

    /// The standard window for a pulse pair: five widths of the fundamental
    /// before the peak and `max(5 tau_f, 5 / gamma)` after it, so that the
    /// coherence ringing behind the pulse stays on the grid.
    ///
    /// The pulse center falls exactly on a grid point.
    pub fn standard_window(fundamental: &PulseSpec, gamma: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be > 0, got {dt}")));
        }
        let (lo, hi) = required_window(fundamental, gamma);
        let tc = fundamental.t_center;
        let before = ((tc - lo) / dt - 1e-9).ceil().max(1.0);
        let after = ((hi - tc) / dt - 1e-9).ceil().max(1.0);
        Self::new(
            tc - before * dt,
            tc + after * dt,
            (before + after) as usize + 1,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::InvalidInput(format!(
                "time grid needs >= 2 points, got {}",
                self.n_points
            )));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(Error::InvalidInput(format!(
                "time grid needs t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.t_end
        } else {
            self.t_start + i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.time(i))
    }

    /// Index of the grid point closest to `t` (clamped to the window).
    pub fn nearest_index(&self, t: f64) -> usize {
        let x = ((t - self.t_start) / self.dt()).round();
        x.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Grid with each interval split in two; every old point is kept.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.t_start <= lo + 1e-9 && self.t_end >= hi - 1e-9
    }
}

/// Window `[t_c - 5 tau, t_c + max(5 tau, 5/gamma)]` required around a pulse.
pub fn required_window(spec: &PulseSpec, gamma: f64) -> (f64, f64) {
    let after = (5.0 * spec.tau).max(5.0 / gamma);
    (spec.t_center - 5.0 * spec.tau, spec.t_center + after)
}

/// Complex envelopes of both carriers at one propagation distance.
///
/// `a_j = E_j exp(-i phi_j)` on the retarded-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    pub grid: TimeGrid,
    pub z: f64,
    pub a_f: Vec<Complex64>,
    pub a_h: Vec<Complex64>,
}

impl FieldSlice {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.a_f.len() != self.grid.n_points || self.a_h.len() != self.grid.n_points {
            return Err(Error::GridMismatch(format!(
                "field arrays have lengths {}/{} but the grid has {} points",
                self.a_f.len(),
                self.a_h.len(),
                self.grid.n_points
            )));
        }
        if self
            .a_f
            .iter()
            .chain(&self.a_h)
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::InvalidInput(format!(
                "non-finite field value at z = {}",
                self.z
            )));
        }
        Ok(())
    }
}

/// Launch fields at the medium entrance.
///
/// The fundamental carries the constant phase `spec_f.phase0` (0 in the
/// usual gauge) and the harmonic phase is set so the relative phase at the
/// pulse center equals `theta0`. `spec_h.phase0` is ignored.
pub fn initial_fields(
    spec_f: &PulseSpec,
    spec_h: &PulseSpec,
    theta0: f64,
    grid: TimeGrid,
) -> Result<FieldSlice> {
    spec_f.validate()?;
    spec_h.validate()?;
    grid.validate()?;
    if !theta0.is_finite() {
        return Err(Error::InvalidInput("theta0 must be finite".into()));
    }
    for spec in [spec_f, spec_h] {
        let (lo, hi) = (
            spec.t_center - 5.0 * spec.tau,
            spec.t_center + 5.0 * spec.tau,
        );
        if !grid.covers(lo, hi) {
            return Err(Error::GridMismatch(format!(
                "grid [{}, {}] does not cover pulse window [{lo}, {hi}]",
                grid.t_start, grid.t_end
            )));
        }
    }
    let phi_f = spec_f.phase0;
    let phi_h = theta0 + 3.0 * phi_f;
    let rot_f = Complex64::from_polar(1.0, -phi_f);
    let rot_h = Complex64::from_polar(1.0, -phi_h);
    let a_f = grid
        .times()
        .map(|t| rot_f * gaussian_envelope(t, spec_f))
        .collect();
    let a_h = grid
        .times()
        .map(|t| rot_h * gaussian_envelope(t, spec_h))
        .collect();
    Ok(FieldSlice {
        grid,
        z: 0.0,
        a_f,
        a_h,
    })
}
