//! Run configuration: a sectioned `key = value` format.
//!
//! ```text
//! # comment
//! [physics]
//! gamma = 0.5 /ns
//! density = 1e13 cm^-3
//! [pulses]
//! theta0 = 1.0 pi
//! ```
//!
//! Numbers take an optional unit suffix; bare numbers are read in internal
//! units (ns, cm, rad/ns, W/cm^2, cm^-3, cm^2, rad). Every problem found is
//! reported with its line and column, and unknown sections or keys are
//! errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::propagate::{Simulation, ZGrid, ZScheme};
use crate::pulse::{required_window, PulseSpec, TimeGrid};
use crate::units::{matched_harmonic, stark_detuning, PhysParams, UnitSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line, or 0 for a command-line override.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            if e.line == 0 {
                write!(f, "--set: {}", e.message)?;
            } else {
                write!(f, "line {}:{}: {}", e.line, e.column, e.message)?;
            }
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// The three peak intensities of the standard phase scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    I1e10,
    I3e10,
    I8e10,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::I1e10, Preset::I3e10, Preset::I8e10];

    /// Peak fundamental intensity [W/cm^2].
    pub fn intensity(self) -> f64 {
        match self {
            Preset::I1e10 => 1e10,
            Preset::I3e10 => 3e10,
            Preset::I8e10 => 8e10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::I1e10 => "I1e10",
            Preset::I3e10 => "I3e10",
            Preset::I8e10 => "I8e10",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset '{s}' (expected I1e10, I3e10 or I8e10)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    ScanPhase,
    Propagate,
    Snapshots,
    SingleAtom,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::ScanPhase => "scan-phase",
            RunMode::Propagate => "propagate",
            RunMode::Snapshots => "snapshots",
            RunMode::SingleAtom => "single-atom",
        }
    }
}

impl FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            RunMode::ScanPhase,
            RunMode::Propagate,
            RunMode::Snapshots,
            RunMode::SingleAtom,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| {
            format!("unknown mode '{s}' (expected scan-phase, propagate, snapshots or single-atom)")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseConfig {
    /// Peak fundamental intensity [W/cm^2].
    pub intensity_f: f64,
    pub tau_f: f64,
    pub tau_h: f64,
    pub t_center: f64,
    pub theta0: f64,
    /// Derive the harmonic peak and width from the fundamental so the two
    /// pathways cancel exactly at `theta0 = pi`.
    pub match_harmonic: bool,
    /// Peak harmonic intensity [W/cm^2], only without matching.
    pub intensity_h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub dt: f64,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub theta_points: usize,
}

/// A fully parsed and validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: RunMode,
    pub units: UnitSystem,
    /// Physical parameters; `delta` is a placeholder when `delta_auto` is set.
    pub params: PhysParams,
    /// Choose the detuning that cancels the relative Stark shift at the
    /// fundamental peak.
    pub delta_auto: bool,
    pub pulses: PulseConfig,
    pub grid: GridConfig,
    pub zgrid: ZGrid,
    pub outputs: OutputConfig,
}

impl RunConfig {
    /// Resolve amplitudes, detuning, harmonic matching and the time window.
    pub fn simulation(&self) -> Result<Simulation> {
        let u = self.units.intensity_to_amplitude(self.pulses.intensity_f);
        let mut params = self.params.clone();
        params.coupling = self.units.coupling();
        if self.delta_auto {
            params.delta = stark_detuning(u, &params);
        }
        let pc = &self.pulses;
        let pulse_f = PulseSpec {
            peak: u,
            t_center: pc.t_center,
            tau: pc.tau_f,
            phase0: 0.0,
        };
        let pulse_h = if pc.match_harmonic {
            let (peak, tau) = matched_harmonic(u, pc.tau_f, &params)?;
            PulseSpec {
                peak,
                t_center: pc.t_center,
                tau,
                phase0: 0.0,
            }
        } else {
            let ih = pc
                .intensity_h
                .ok_or_else(|| Error::InvalidInput("intensity_h is required".into()))?;
            PulseSpec {
                peak: self.units.intensity_to_amplitude(ih),
                t_center: pc.t_center,
                tau: pc.tau_h,
                phase0: 0.0,
            }
        };
        let grid = match (self.grid.t_start, self.grid.t_end) {
            (Some(lo), Some(hi)) => {
                let g = TimeGrid::with_spacing(lo, hi, self.grid.dt)?;
                for spec in [&pulse_f, &pulse_h] {
                    let (a, b) = required_window(spec, params.gamma);
                    if !g.covers(a, b) {
                        return Err(Error::GridMismatch(format!(
                            "time window [{lo}, {hi}] ns must cover [{a:.4}, {b:.4}] ns"
                        )));
                    }
                }
                g
            }
            _ => TimeGrid::standard_window(&pulse_f, params.gamma, self.grid.dt)?,
        };
        let sim = Simulation {
            params,
            pulse_f,
            pulse_h,
            theta0: pc.theta0,
            grid,
            zgrid: self.zgrid.clone(),
        };
        sim.validate()?;
        Ok(sim)
    }

    pub fn with_preset(&self, preset: Preset) -> Self {
        let mut c = self.clone();
        c.pulses.intensity_f = preset.intensity();
        c
    }

    /// SHA-256 of the canonical JSON form of the validated configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigErrors> {
    parse_config_with(text, &[])
}

/// Parse `text` with `section.key=value` overrides applied on top, exactly
/// as if the file had been edited.
pub fn parse_config_with(
    text: &str,
    overrides: &[String],
) -> std::result::Result<RunConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut doc = scan(text, &mut errors);
    for o in overrides {
        apply_override(&mut doc, o, &mut errors);
    }
    let cfg = build(&doc, &mut errors);
    if !errors.is_empty() {
        errors.sort_by_key(|e| (e.line, e.column));
        return Err(ConfigErrors(errors));
    }
    let cfg = cfg.expect("no errors implies a config");
    if let Err(e) = cfg.simulation() {
        let at = doc.sections.get("grid").map_or(1, |s| s.line);
        return Err(ConfigErrors(vec![ConfigError {
            line: at,
            column: 1,
            message: format!("inconsistent configuration: {e}"),
        }]));
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Time,
    Length,
    Rate,
    Intensity,
    Density,
    Area,
    Angle,
    Scalar,
}

impl Kind {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Time => &[
                ("ns", 1.0),
                ("ps", 1e-3),
                ("fs", 1e-6),
                ("us", 1e3),
                ("ms", 1e6),
                ("s", 1e9),
            ],
            Kind::Length => &[("cm", 1.0), ("mm", 0.1), ("um", 1e-4), ("m", 100.0)],
            Kind::Rate => &[
                ("/ns", 1.0),
                ("rad/ns", 1.0),
                ("/ps", 1e3),
                ("rad/ps", 1e3),
                ("/us", 1e-3),
                ("rad/us", 1e-3),
                ("/s", 1e-9),
                ("rad/s", 1e-9),
            ],
            Kind::Intensity => &[
                ("W/cm^2", 1.0),
                ("kW/cm^2", 1e3),
                ("MW/cm^2", 1e6),
                ("GW/cm^2", 1e9),
                ("TW/cm^2", 1e12),
                ("W/m^2", 1e-4),
            ],
            Kind::Density => &[("cm^-3", 1.0), ("m^-3", 1e-6)],
            Kind::Area => &[("cm^2", 1.0), ("mm^2", 1e-2), ("um^2", 1e-8), ("m^2", 1e4)],
            Kind::Angle => &[("rad", 1.0), ("pi", PI), ("deg", PI / 180.0)],
            Kind::Scalar => &[],
        }
    }

    fn what(self) -> &'static str {
        match self {
            Kind::Time => "a time",
            Kind::Length => "a length",
            Kind::Rate => "a rate",
            Kind::Intensity => "an intensity",
            Kind::Density => "a density",
            Kind::Area => "an area",
            Kind::Angle => "an angle",
            Kind::Scalar => "a plain number",
        }
    }
}

/// Split a leading decimal number from `s`.
fn split_number(s: &str) -> Option<(f64, &str)> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    let mut any = digits(&mut i);
    if i < b.len() && b[i] == b'.' {
        i += 1;
        any |= digits(&mut i);
    }
    if !any {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if digits(&mut j) {
            i = j;
        }
    }
    s[..i].parse().ok().map(|v| (v, &s[i..]))
}

fn parse_quantity(text: &str, kind: Kind) -> std::result::Result<f64, String> {
    let text = text.trim();
    if kind == Kind::Angle && text == "pi" {
        return Ok(PI);
    }
    let (v, rest) =
        split_number(text).ok_or_else(|| format!("expected {}, got '{text}'", kind.what()))?;
    let unit = rest.trim();
    if unit.is_empty() {
        return Ok(v);
    }
    match kind.units().iter().find(|(u, _)| *u == unit) {
        Some((_, f)) => Ok(v * f),
        None if kind == Kind::Scalar => Err(format!("unexpected unit '{unit}' on a plain number")),
        None => {
            let known: Vec<&str> = kind.units().iter().map(|(u, _)| *u).collect();
            Err(format!(
                "unknown unit '{unit}' for {} (expected one of {})",
                kind.what(),
                known.join(", ")
            ))
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    value_col: usize,
}

#[derive(Debug, Clone)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

#[derive(Debug, Default)]
struct Document {
    sections: BTreeMap<String, Section>,
}

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "physics",
        &[
            "gamma",
            "kappa_ion",
            "b3",
            "b1",
            "s1c",
            "s2c",
            "delta",
            "density",
            "n_f",
            "n_h",
            "omega_f",
            "sigma_beam",
            "i_ref",
        ],
    ),
    (
        "pulses",
        &[
            "intensity_f",
            "tau_f",
            "tau_h",
            "t_center",
            "theta0",
            "match_harmonic",
            "intensity_h",
        ],
    ),
    ("grid", &["dt", "t_start", "t_end"]),
    (
        "propagation",
        &[
            "z_max",
            "dz_init",
            "adaptive",
            "tol_z",
            "z_scheme",
            "drop_dPdt",
        ],
    ),
    ("outputs", &["dir", "snapshots", "theta_points"]),
    ("run", &["mode"]),
];

const REQUIRED_SECTIONS: &[&str] = &["physics", "pulses", "grid", "propagation"];

fn known_key(section: &str, key: &str) -> Option<bool> {
    SCHEMA
        .iter()
        .find(|(s, _)| *s == section)
        .map(|(_, keys)| keys.contains(&key))
}

fn err(errors: &mut Vec<ConfigError>, line: usize, column: usize, message: impl Into<String>) {
    errors.push(ConfigError {
        line,
        column,
        message: message.into(),
    });
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn scan(text: &str, errors: &mut Vec<ConfigError>) -> Document {
    let mut doc = Document::default();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let indent = line.len() - line.trim_start().len();
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        let col = indent + 1;
        if let Some(rest) = body.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                err(errors, line_no, col, "unterminated section header");
                current = None;
                continue;
            };
            let name = name.trim();
            if known_key(name, "").is_none() {
                err(
                    errors,
                    line_no,
                    col + 1,
                    format!("unknown section [{name}]"),
                );
                current = None;
                continue;
            }
            if doc.sections.contains_key(name) {
                err(errors, line_no, col, format!("duplicate section [{name}]"));
            } else {
                doc.sections.insert(
                    name.to_string(),
                    Section {
                        line: line_no,
                        entries: BTreeMap::new(),
                    },
                );
            }
            current = Some(name.to_string());
            continue;
        }
        let Some(eq) = body.find('=') else {
            err(
                errors,
                line_no,
                col,
                "expected 'key = value' or '[section]'",
            );
            continue;
        };
        let key = body[..eq].trim();
        let after = &body[eq + 1..];
        let value = after.trim();
        let value_col = col + eq + 1 + (after.len() - after.trim_start().len());
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            err(errors, line_no, col, format!("invalid key '{key}'"));
            continue;
        }
        let Some(section) = current.clone() else {
            err(
                errors,
                line_no,
                col,
                format!("key '{key}' outside of any section"),
            );
            continue;
        };
        insert(
            &mut doc, &section, key, value, line_no, col, value_col, errors,
        );
    }
    doc
}

#[allow(clippy::too_many_arguments)]
fn insert(
    doc: &mut Document,
    section: &str,
    key: &str,
    value: &str,
    line: usize,
    key_col: usize,
    value_col: usize,
    errors: &mut Vec<ConfigError>,
) {
    if known_key(section, key) != Some(true) {
        err(
            errors,
            line,
            key_col,
            format!("unknown key '{key}' in [{section}]"),
        );
        return;
    }
    let Some(sec) = doc.sections.get_mut(section) else {
        return;
    };
    let entry = Entry {
        value: value.to_string(),
        line,
        value_col,
    };
    if line > 0 && sec.entries.contains_key(key) {
        err(
            errors,
            line,
            key_col,
            format!("duplicate key '{key}' in [{section}]"),
        );
        return;
    }
    sec.entries.insert(key.to_string(), entry);
}

fn apply_override(doc: &mut Document, spec: &str, errors: &mut Vec<ConfigError>) {
    let Some((path, value)) = spec.split_once('=') else {
        err(
            errors,
            0,
            0,
            format!("'{spec}' is not of the form section.key=value"),
        );
        return;
    };
    let Some((section, key)) = path.trim().split_once('.') else {
        err(
            errors,
            0,
            0,
            format!("'{path}' is not of the form section.key"),
        );
        return;
    };
    if known_key(section, "").is_none() {
        err(errors, 0, 0, format!("unknown section [{section}]"));
        return;
    }
    doc.sections.entry(section.to_string()).or_insert(Section {
        line: 0,
        entries: BTreeMap::new(),
    });
    insert(doc, section, key, value.trim(), 0, 0, 0, errors);
}

/// Typed access to one section, collecting errors as it goes.
struct Reader<'a> {
    name: &'static str,
    section: Option<&'a Section>,
    errors: &'a mut Vec<ConfigError>,
}

impl Reader<'_> {
    fn entry(&self, key: &str) -> Option<&Entry> {
        self.section.and_then(|s| s.entries.get(key))
    }

    fn missing(&mut self, key: &str) {
        if let Some(s) = self.section {
            let message = format!("missing key '{key}' in [{}]", self.name);
            self.errors.push(ConfigError {
                line: s.line,
                column: 1,
                message,
            });
        }
    }

    fn bad(&mut self, e: &Entry, key: &str, message: String) {
        let message = format!("{key}: {message}");
        let (line, column) = (e.line, e.value_col);
        self.errors.push(ConfigError {
            line,
            column,
            message,
        });
    }

    fn opt_num(&mut self, key: &str, kind: Kind) -> Option<f64> {
        let e = self.entry(key)?.clone();
        match parse_quantity(&e.value, kind) {
            Ok(v) if v.is_finite() => Some(v),
            Ok(_) => {
                self.bad(&e, key, "value must be finite".into());
                None
            }
            Err(m) => {
                self.bad(&e, key, m);
                None
            }
        }
    }

    fn num(&mut self, key: &str, kind: Kind) -> Option<f64> {
        if self.entry(key).is_none() {
            self.missing(key);
            return None;
        }
        self.opt_num(key, kind)
    }

    fn check(
        &mut self,
        key: &str,
        v: Option<f64>,
        ok: impl Fn(f64) -> bool,
        what: &str,
    ) -> Option<f64> {
        let v = v?;
        if ok(v) {
            return Some(v);
        }
        let e = self.entry(key).cloned();
        match e {
            Some(e) => self.bad(&e, key, format!("must be {what}, got {v}")),
            None => self.missing(key),
        }
        None
    }

    fn positive(&mut self, key: &str, kind: Kind) -> Option<f64> {
        let v = self.num(key, kind);
        self.check(key, v, |x| x > 0.0, "> 0")
    }

    fn non_negative(&mut self, key: &str, kind: Kind, default: Option<f64>) -> Option<f64> {
        let v = match default {
            Some(d) if self.entry(key).is_none() => Some(d),
            _ => self.num(key, kind),
        };
        self.check(key, v, |x| x >= 0.0, ">= 0")
    }

    fn text(&mut self, key: &str) -> Option<String> {
        let e = self.entry(key)?;
        let v = e.value.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(v);
        Some(v.to_string())
    }

    fn flag(&mut self, key: &str, default: bool) -> Option<bool> {
        let Some(e) = self.entry(key).cloned() else {
            return Some(default);
        };
        match e.value.as_str() {
            "true" => Some(true),
            "false" => Some(false),
            other => {
                self.bad(&e, key, format!("expected true or false, got '{other}'"));
                None
            }
        }
    }

    fn parsed<T: FromStr<Err = String>>(&mut self, key: &str, default: T) -> Option<T> {
        let Some(e) = self.entry(key).cloned() else {
            return Some(default);
        };
        match self.text(key).unwrap_or_default().parse() {
            Ok(v) => Some(v),
            Err(m) => {
                self.bad(&e, key, m);
                None
            }
        }
    }

    fn list(&mut self, key: &str, kind: Kind) -> Option<Vec<f64>> {
        let Some(e) = self.entry(key).cloned() else {
            return Some(Vec::new());
        };
        if e.value.trim().is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        for item in e.value.split(',') {
            match parse_quantity(item, kind) {
                Ok(v) => out.push(v),
                Err(m) => {
                    self.bad(&e, key, m);
                    return None;
                }
            }
        }
        Some(out)
    }
}

fn build(doc: &Document, errors: &mut Vec<ConfigError>) -> Option<RunConfig> {
    for name in REQUIRED_SECTIONS {
        if !doc.sections.contains_key(*name) {
            let line = doc.sections.values().map(|s| s.line).max().unwrap_or(0) + 1;
            err(errors, line, 1, format!("missing section [{name}]"));
        }
    }
    let physics = {
        let mut rd = Reader {
            name: "physics",
            section: doc.sections.get("physics"),
            errors,
        };
        let gamma = rd.positive("gamma", Kind::Rate);
        let kappa_ion = rd.non_negative("kappa_ion", Kind::Rate, None);
        let b3 = rd.num("b3", Kind::Rate);
        let b1 = rd.num("b1", Kind::Rate);
        let b1 = rd.check("b1", b1, |x| x != 0.0, "nonzero");
        let s1c = rd.num("s1c", Kind::Rate);
        let s2c = rd.num("s2c", Kind::Rate);
        let (delta, delta_auto) = match rd.text("delta").as_deref() {
            None | Some("auto") => (Some(0.0), true),
            Some(_) => (rd.opt_num("delta", Kind::Rate), false),
        };
        let density = rd.non_negative("density", Kind::Density, None);
        let n_f = rd.opt_num("n_f", Kind::Scalar).or(Some(1.0));
        let n_f = rd.check("n_f", n_f, |x| x > 0.0, "> 0");
        let n_h = rd.opt_num("n_h", Kind::Scalar).or(Some(1.0));
        let n_h = rd.check("n_h", n_h, |x| x > 0.0, "> 0");
        let omega_f = rd.positive("omega_f", Kind::Rate);
        let sigma_beam = rd.non_negative("sigma_beam", Kind::Area, Some(1e-4));
        let i_ref = rd.positive("i_ref", Kind::Intensity);
        (|| {
            let units = UnitSystem { i_ref: i_ref? };
            let params = PhysParams {
                gamma: gamma?,
                kappa_ion: kappa_ion?,
                b3: b3?,
                b1: b1?,
                s1c: s1c?,
                s2c: s2c?,
                delta: delta?,
                density: density?,
                coupling: units.coupling(),
                n_f: n_f?,
                n_h: n_h?,
                omega_f: omega_f?,
                sigma_beam: sigma_beam?,
            };
            Some((units, params, delta_auto))
        })()
    };

    let pulses = {
        let mut rd = Reader {
            name: "pulses",
            section: doc.sections.get("pulses"),
            errors,
        };
        let intensity_f = rd.positive("intensity_f", Kind::Intensity);
        let match_harmonic = rd.flag("match_harmonic", true);
        let tau_f = rd.opt_num("tau_f", Kind::Time);
        let tau_f = rd.check("tau_f", tau_f, |x| x > 0.0, "> 0");
        let tau_h = rd.opt_num("tau_h", Kind::Time);
        let tau_h = rd.check("tau_h", tau_h, |x| x > 0.0, "> 0");
        let t_center = rd.opt_num("t_center", Kind::Time).or(Some(0.0));
        let theta0 = rd.opt_num("theta0", Kind::Angle).or(Some(0.0));
        let intensity_h = rd.opt_num("intensity_h", Kind::Intensity);
        let intensity_h = rd.check("intensity_h", intensity_h, |x| x >= 0.0, ">= 0");
        let has = |k: &str| rd.entry(k).is_some();
        let (has_f, has_h, has_ih) = (has("tau_f"), has("tau_h"), has("intensity_h"));
        let widths = match match_harmonic {
            Some(true) => {
                if has_ih {
                    let e = rd.entry("intensity_h").cloned().unwrap();
                    rd.bad(
                        &e,
                        "intensity_h",
                        "conflicts with match_harmonic = true".into(),
                    );
                }
                match (tau_f, tau_h) {
                    (Some(f), Some(h)) if ((f / 3f64.sqrt()) / h - 1.0).abs() > 1e-6 => {
                        let e = rd.entry("tau_h").cloned().unwrap();
                        rd.bad(
                            &e,
                            "tau_h",
                            format!(
                                "matching requires tau_h = tau_f / sqrt(3) = {}",
                                f / 3f64.sqrt()
                            ),
                        );
                        None
                    }
                    (Some(f), _) => Some((f, f / 3f64.sqrt())),
                    (None, Some(h)) => Some((h * 3f64.sqrt(), h)),
                    (None, None) => {
                        if !has_f && !has_h {
                            rd.missing("tau_h");
                        }
                        None
                    }
                }
            }
            Some(false) => {
                if !has_f {
                    rd.missing("tau_f");
                }
                if !has_h {
                    rd.missing("tau_h");
                }
                if !has_ih {
                    rd.missing("intensity_h");
                }
                tau_f.zip(tau_h)
            }
            None => None,
        };
        (|| {
            let (tau_f, tau_h) = widths?;
            Some(PulseConfig {
                intensity_f: intensity_f?,
                tau_f,
                tau_h,
                t_center: t_center?,
                theta0: theta0?,
                match_harmonic: match_harmonic?,
                intensity_h,
            })
        })()
    };

    let grid = {
        let mut rd = Reader {
            name: "grid",
            section: doc.sections.get("grid"),
            errors,
        };
        let dt = rd.positive("dt", Kind::Time);
        let t_start = rd.opt_num("t_start", Kind::Time);
        let t_end = rd.opt_num("t_end", Kind::Time);
        let (s, e) = (rd.entry("t_start").is_some(), rd.entry("t_end").is_some());
        if s != e {
            rd.missing(if s { "t_end" } else { "t_start" });
        }
        if let (Some(a), Some(b)) = (t_start, t_end) {
            if b <= a {
                let en = rd.entry("t_end").cloned().unwrap();
                rd.bad(&en, "t_end", format!("must exceed t_start = {a}"));
            }
        }
        dt.map(|dt| GridConfig { dt, t_start, t_end })
    };

    let zgrid = {
        let mut rd = Reader {
            name: "propagation",
            section: doc.sections.get("propagation"),
            errors,
        };
        let z_max = rd.positive("z_max", Kind::Length);
        let dz_init = rd.positive("dz_init", Kind::Length);
        let adaptive = rd.flag("adaptive", true);
        let tol_z = rd.opt_num("tol_z", Kind::Scalar).or(Some(1e-5));
        let tol_z = rd.check("tol_z", tol_z, |x| x > 0.0, "> 0");
        let scheme = rd.parsed("z_scheme", ZScheme::Midpoint);
        let drop_dpdt = rd.flag("drop_dPdt", false);
        (|| {
            Some(ZGrid {
                z_max: z_max?,
                dz_init: dz_init?,
                adaptive: adaptive?,
                tol_z: tol_z?,
                snapshot_zs: Vec::new(),
                scheme: scheme?,
                drop_dpdt: drop_dpdt?,
            })
        })()
    };

    let outputs = {
        let mut rd = Reader {
            name: "outputs",
            section: doc.sections.get("outputs"),
            errors,
        };
        let dir = rd.text("dir").unwrap_or_else(|| "out".into());
        let snapshots = rd.list("snapshots", Kind::Length);
        let theta_points = rd.opt_num("theta_points", Kind::Scalar).or(Some(65.0));
        let theta_points = rd.check(
            "theta_points",
            theta_points,
            |x| x >= 2.0 && x.fract() == 0.0,
            "an integer >= 2",
        );
        (|| Some((PathBuf::from(dir), snapshots?, theta_points? as usize)))()
    };

    let mode = {
        let mut rd = Reader {
            name: "run",
            section: doc.sections.get("run"),
            errors,
        };
        rd.parsed("mode", RunMode::Propagate)
    };

    let (units, params, delta_auto) = physics?;
    let mut zgrid = zgrid?;
    let (dir, snapshots, theta_points) = outputs?;
    if let Some(z) = snapshots
        .iter()
        .find(|z| !(**z >= 0.0 && **z <= zgrid.z_max))
    {
        let sec = doc.sections.get("outputs");
        let at = sec
            .and_then(|s| s.entries.get("snapshots"))
            .map_or((0, 0), |e| (e.line, e.value_col));
        err(
            errors,
            at.0,
            at.1,
            format!(
                "snapshots: z = {z} cm lies outside [0, z_max = {}]",
                zgrid.z_max
            ),
        );
        return None;
    }
    zgrid.snapshot_zs = snapshots;
    Some(RunConfig {
        mode: mode?,
        units,
        params,
        delta_auto,
        pulses: pulses?,
        grid: grid?,
        zgrid,
        outputs: OutputConfig { dir, theta_points },
    })
}

impl FromStr for ZScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "midpoint" => Ok(ZScheme::Midpoint),
            "rk4" => Ok(ZScheme::Rk4),
            _ => Err(format!("unknown z scheme '{s}' (expected midpoint or rk4)")),
        }
    }
}
