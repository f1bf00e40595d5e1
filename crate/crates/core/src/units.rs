//! Internal unit system and the physical parameter set.
//!
//! Internally time is in ns, length in cm, and rates in rad/ns. Field
//! envelopes are dimensionless: a fundamental amplitude of 1 corresponds to
//! the reference intensity `i_ref` of the [`UnitSystem`]. All atomic
//! constants enter as effective rate coefficients for that reference field:
//!
//! * three-photon drive `b3 * u_f^3`, one-photon drive `b1 * u_h`,
//! * relative Stark shift `s_rel * u_f^2` with `s_rel = s1c - s2c`,
//! * ionization rate of the upper level `kappa_ion * u_f^4`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Reduced Planck constant [J s].
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light [m/s].
pub const C_SI: f64 = 299_792_458.0;
/// Vacuum permittivity [F/m].
pub const EPS0_SI: f64 = 8.854_187_812_8e-12;
/// Speed of light [cm/ns].
pub const C_CM_PER_NS: f64 = 29.979_245_8;

/// Physical constants of the medium and the atom, in internal units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysParams {
    /// Radiative decay rate of the upper level [rad/ns].
    pub gamma: f64,
    /// Ionization coefficient: rate = `kappa_ion * u_f^4` [rad/ns].
    pub kappa_ion: f64,
    /// Effective three-photon Rabi coefficient [rad/ns].
    pub b3: f64,
    /// One-photon Rabi coefficient of the harmonic [rad/ns].
    pub b1: f64,
    /// Ground-level Stark coefficient [rad/ns].
    pub s1c: f64,
    /// Upper-level Stark coefficient [rad/ns].
    pub s2c: f64,
    /// Detuning of both pathways from the two-level resonance [rad/ns].
    pub delta: f64,
    /// Atomic density [cm^-3].
    pub density: f64,
    /// Field-polarization coupling `hbar / (2 I_ref)` [cm^2 ns^2].
    pub coupling: f64,
    pub n_f: f64,
    pub n_h: f64,
    /// Fundamental carrier angular frequency [rad/ns].
    pub omega_f: f64,
    /// Beam cross-section [cm^2]; only rescales reported pulse energies.
    pub sigma_beam: f64,
}

impl PhysParams {
    pub fn s_rel(&self) -> f64 {
        self.s1c - self.s2c
    }

    pub fn omega_h(&self) -> f64 {
        3.0 * self.omega_f
    }

    /// Propagation coupling of the fundamental, `coupling / n_f`.
    pub fn g_f(&self) -> f64 {
        self.coupling / self.n_f
    }

    /// Propagation coupling of the harmonic, `coupling / n_h`.
    pub fn g_h(&self) -> f64 {
        self.coupling / self.n_h
    }

    /// Phase mismatch `k_h - 3 k_f` [rad/cm].
    pub fn delta_k(&self) -> f64 {
        3.0 * self.omega_f * (self.n_h - self.n_f) / C_CM_PER_NS
    }

    /// Amplitude absorption coefficient [1/cm] of a weak, long, resonant
    /// harmonic pulse in ground-state atoms.
    pub fn linear_absorption(&self) -> f64 {
        self.omega_h() * self.density * self.g_h() * self.b1 * self.b1 / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("gamma", self.gamma),
            ("kappa_ion", self.kappa_ion),
            ("b3", self.b3),
            ("b1", self.b1),
            ("s1c", self.s1c),
            ("s2c", self.s2c),
            ("delta", self.delta),
            ("density", self.density),
            ("coupling", self.coupling),
            ("n_f", self.n_f),
            ("n_h", self.n_h),
            ("omega_f", self.omega_f),
            ("sigma_beam", self.sigma_beam),
        ];
        if let Some((name, _)) = all.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} is not finite")));
        }
        let positive = [
            ("gamma", self.gamma),
            ("n_f", self.n_f),
            ("n_h", self.n_h),
            ("omega_f", self.omega_f),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| *v <= 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")));
        }
        let non_negative = [
            ("kappa_ion", self.kappa_ion),
            ("density", self.density),
            ("coupling", self.coupling),
            ("sigma_beam", self.sigma_beam),
        ];
        if let Some((name, v)) = non_negative.iter().find(|(_, v)| *v < 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}")));
        }
        Ok(())
    }
}

/// Conversion between SI and the internal ns/cm/scaled-amplitude system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSystem {
    /// Intensity [W/cm^2] that maps to a scaled fundamental amplitude of 1.
    pub i_ref: f64,
}

impl UnitSystem {
    pub fn new(i_ref: f64) -> Result<Self> {
        if !(i_ref.is_finite() && i_ref > 0.0) {
            return Err(Error::InvalidInput(format!(
                "reference intensity must be > 0, got {i_ref}"
            )));
        }
        Ok(Self { i_ref })
    }

    /// Field amplitude [V/m] of the reference intensity.
    pub fn e_ref_si(&self) -> f64 {
        (2.0 * self.i_ref * 1e4 / (C_SI * EPS0_SI)).sqrt()
    }

    /// `hbar / (c eps0 E_ref^2)` in cm^2 ns^2.
    pub fn coupling(&self) -> f64 {
        let si = HBAR_SI / (C_SI * EPS0_SI * self.e_ref_si().powi(2));
        self.coupling_from_si(si)
    }

    pub fn intensity_to_amplitude(&self, intensity: f64) -> f64 {
        (intensity / self.i_ref).sqrt()
    }

    pub fn amplitude_to_intensity(&self, u: f64) -> f64 {
        u * u * self.i_ref
    }

    pub fn amplitude_to_si(&self, u: f64) -> f64 {
        u * self.e_ref_si()
    }

    pub fn amplitude_from_si(&self, e: f64) -> f64 {
        e / self.e_ref_si()
    }

    pub fn rate_to_si(&self, r: f64) -> f64 {
        r * 1e9
    }

    pub fn rate_from_si(&self, r: f64) -> f64 {
        r * 1e-9
    }

    pub fn time_to_si(&self, t: f64) -> f64 {
        t * 1e-9
    }

    pub fn time_from_si(&self, t: f64) -> f64 {
        t * 1e9
    }

    pub fn length_to_si(&self, x: f64) -> f64 {
        x * 1e-2
    }

    pub fn length_from_si(&self, x: f64) -> f64 {
        x * 1e2
    }

    pub fn density_to_si(&self, n: f64) -> f64 {
        n * 1e6
    }

    pub fn density_from_si(&self, n: f64) -> f64 {
        n * 1e-6
    }

    pub fn area_to_si(&self, a: f64) -> f64 {
        a * 1e-4
    }

    pub fn area_from_si(&self, a: f64) -> f64 {
        a * 1e4
    }

    /// cm^2 ns^2 -> m^2 s^2.
    pub fn coupling_to_si(&self, k: f64) -> f64 {
        k * 1e-22
    }

    pub fn coupling_from_si(&self, k: f64) -> f64 {
        k * 1e22
    }

    /// Echo of a parameter set in SI units, keyed by parameter name.
    pub fn params_to_si(&self, p: &PhysParams) -> Vec<(&'static str, f64, &'static str)> {
        vec![
            ("gamma", self.rate_to_si(p.gamma), "rad/s"),
            ("kappa_ion", self.rate_to_si(p.kappa_ion), "rad/s"),
            ("b3", self.rate_to_si(p.b3), "rad/s"),
            ("b1", self.rate_to_si(p.b1), "rad/s"),
            ("s1c", self.rate_to_si(p.s1c), "rad/s"),
            ("s2c", self.rate_to_si(p.s2c), "rad/s"),
            ("delta", self.rate_to_si(p.delta), "rad/s"),
            ("density", self.density_to_si(p.density), "m^-3"),
            ("coupling", self.coupling_to_si(p.coupling), "m^2 s^2"),
            ("n_f", p.n_f, "1"),
            ("n_h", p.n_h, "1"),
            ("omega_f", self.rate_to_si(p.omega_f), "rad/s"),
            ("sigma_beam", self.area_to_si(p.sigma_beam), "m^2"),
            ("e_ref", self.e_ref_si(), "V/m"),
        ]
    }

    pub fn params_from_si(&self, si: &PhysParams) -> PhysParams {
        PhysParams {
            gamma: self.rate_from_si(si.gamma),
            kappa_ion: self.rate_from_si(si.kappa_ion),
            b3: self.rate_from_si(si.b3),
            b1: self.rate_from_si(si.b1),
            s1c: self.rate_from_si(si.s1c),
            s2c: self.rate_from_si(si.s2c),
            delta: self.rate_from_si(si.delta),
            density: self.density_from_si(si.density),
            coupling: self.coupling_from_si(si.coupling),
            n_f: si.n_f,
            n_h: si.n_h,
            omega_f: self.rate_from_si(si.omega_f),
            sigma_beam: self.area_from_si(si.sigma_beam),
        }
    }

    /// Same parameter set with every field expressed in SI.
    pub fn params_into_si(&self, p: &PhysParams) -> PhysParams {
        PhysParams {
            gamma: self.rate_to_si(p.gamma),
            kappa_ion: self.rate_to_si(p.kappa_ion),
            b3: self.rate_to_si(p.b3),
            b1: self.rate_to_si(p.b1),
            s1c: self.rate_to_si(p.s1c),
            s2c: self.rate_to_si(p.s2c),
            delta: self.rate_to_si(p.delta),
            density: self.density_to_si(p.density),
            coupling: self.coupling_to_si(p.coupling),
            n_f: p.n_f,
            n_h: p.n_h,
            omega_f: self.rate_to_si(p.omega_f),
            sigma_beam: self.area_to_si(p.sigma_beam),
        }
    }
}

/// Harmonic peak and width that make the one-photon drive track the
/// three-photon drive exactly: `b1 u_h(t) = b3 u_f(t)^3`.
pub fn matched_harmonic(ef_max: f64, tau_f: f64, p: &PhysParams) -> Result<(f64, f64)> {
    if !(tau_f > 0.0) || !tau_f.is_finite() {
        return Err(Error::InvalidInput(format!(
            "tau_f must be > 0, got {tau_f}"
        )));
    }
    if !(ef_max >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "ef_max must be >= 0, got {ef_max}"
        )));
    }
    if p.b1 == 0.0 {
        return Err(Error::InvalidInput(
            "b1 must be nonzero to match a harmonic".into(),
        ));
    }
    Ok((p.b3 / p.b1 * ef_max.powi(3), tau_f / 3f64.sqrt()))
}

/// Detuning that cancels the relative Stark shift at the fundamental's peak.
pub fn stark_detuning(ef_max: f64, p: &PhysParams) -> f64 {
    -p.s_rel() * ef_max * ef_max
}

/// Two-photon ionization rate of the upper level at scaled amplitude `u_f`.
pub fn gamma_ion_rate(u_f: f64, p: &PhysParams) -> f64 {
    let u2 = u_f * u_f;
    p.kappa_ion * u2 * u2
}

#[cfg(test)]
pub(crate) fn test_params() -> PhysParams {
    PhysParams {
        gamma: 0.5,
        kappa_ion: 0.1,
        b3: 2.0,
        b1: 40.0,
        s1c: 3.0,
        s2c: 1.0,
        delta: 0.0,
        density: 1e13,
        coupling: 6.59e-28,
        n_f: 1.0,
        n_h: 1.0,
        omega_f: 4.27e6,
        sigma_beam: 1e-4,
    }
}
