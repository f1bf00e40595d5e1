//! CSV tables, SVG figures and the per-run manifest.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::observables::{wrap_phase, ScanKind, ScanResult};
use crate::propagate::{Diagnostics, Simulation};
use crate::pulse::PulseSpec;
use crate::units::PhysParams;

pub const PHASE_HEADER: &str = "theta_over_pi,Q";
pub const Z_HEADER: &str = "z_cm,theta_over_pi,Sh_norm,Q,Sf_norm";
pub const SNAPSHOT_HEADER: &str = "tau_ns,abs_Ah,abs_Af,z_cm";

/// Twelve significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// CSV text for one result; rows follow the result's axis order.
pub fn csv_string(result: &ScanResult) -> Result<String> {
    if result.is_empty() {
        return Err(Error::EmptyResult(format!(
            "'{}' has no data",
            result.label
        )));
    }
    let mut out = String::new();
    let row = |out: &mut String, vals: &[f64]| {
        let cells: Vec<String> = vals.iter().map(|&v| fmt12(v)).collect();
        out.push_str(&cells.join(","));
        out.push_str("\r\n");
    };
    match result.kind {
        ScanKind::Phase => {
            out.push_str(PHASE_HEADER);
            out.push_str("\r\n");
            for (th, o) in result.axis.iter().zip(&result.points) {
                row(&mut out, &[th / PI, o.q]);
            }
        }
        ScanKind::Z => {
            out.push_str(Z_HEADER);
            out.push_str("\r\n");
            for ((o, sh), sf) in result
                .points
                .iter()
                .zip(result.sh_norm())
                .zip(result.sf_norm())
            {
                row(&mut out, &[o.z, wrap_phase(o.theta) / PI, sh, o.q, sf]);
            }
        }
        ScanKind::Snapshots => {
            if result.snapshots.is_empty() {
                return Err(Error::EmptyResult(format!(
                    "'{}' has no snapshots",
                    result.label
                )));
            }
            out.push_str(SNAPSHOT_HEADER);
            out.push_str("\r\n");
            for s in &result.snapshots {
                for i in 0..s.tau.len() {
                    row(&mut out, &[s.tau[i], s.abs_ah[i], s.abs_af[i], s.z]);
                }
            }
        }
    }
    Ok(out)
}

pub fn emit_csv(result: &ScanResult, path: &Path) -> Result<()> {
    let text = csv_string(result)?;
    fs::write(path, text)?;
    Ok(())
}

/// Render a figure for a set of results of the same kind: one curve per
/// result for phase scans, three stacked panels for a z scan, one curve
/// per distance for snapshots.
pub fn plot_string(results: &[ScanResult]) -> Result<String> {
    let first = results
        .first()
        .ok_or_else(|| Error::EmptyResult("nothing to plot".into()))?;
    if results.iter().any(|r| r.is_empty()) {
        return Err(Error::EmptyResult("cannot plot an empty result".into()));
    }
    if results.iter().any(|r| r.kind != first.kind) {
        return Err(Error::InvalidInput(
            "results of different kinds in one plot".into(),
        ));
    }
    Ok(match first.kind {
        ScanKind::Phase => {
            let series: Vec<Series> = results
                .iter()
                .map(|r| Series {
                    label: r.label.clone(),
                    x: r.axis.iter().map(|t| t / PI).collect(),
                    y: r.points.iter().map(|o| o.q).collect(),
                })
                .collect();
            let mut fig = Figure::new(640.0, 420.0);
            fig.panel(0.0, 420.0, &series, "theta / pi", "ion yield Q", true);
            fig.finish()
        }
        ScanKind::Z => {
            let r = first;
            let z: Vec<f64> = r.points.iter().map(|o| o.z).collect();
            let theta = Series {
                label: "theta".into(),
                x: z.clone(),
                y: r.points.iter().map(|o| o.theta / PI).collect(),
            };
            let sh = Series {
                label: "S_h / S_h(0)".into(),
                x: z.clone(),
                y: r.sh_norm(),
            };
            let q = Series {
                label: "Q".into(),
                x: z,
                y: r.points.iter().map(|o| o.q).collect(),
            };
            let mut fig = Figure::new(640.0, 780.0);
            fig.panel(0.0, 260.0, &[theta], "", "theta / pi", false);
            fig.panel(260.0, 260.0, &[sh], "", "S_h / S_h(0)", false);
            fig.panel(520.0, 260.0, &[q], "z [cm]", "Q", false);
            fig.finish()
        }
        ScanKind::Snapshots => {
            let series: Vec<Series> = results
                .iter()
                .flat_map(|r| &r.snapshots)
                .map(|s| Series {
                    label: format!("z = {} cm", trim_num(s.z)),
                    x: s.tau.clone(),
                    y: s.abs_ah.clone(),
                })
                .collect();
            if series.is_empty() {
                return Err(Error::EmptyResult("no snapshots to plot".into()));
            }
            let mut fig = Figure::new(640.0, 420.0);
            fig.panel(0.0, 420.0, &series, "retarded time [ns]", "|A_h|", true);
            fig.finish()
        }
    })
}

pub fn emit_plot(results: &[ScanResult], path: &Path) -> Result<()> {
    let text = plot_string(results)?;
    fs::write(path, text)?;
    Ok(())
}

struct Series {
    label: String,
    x: Vec<f64>,
    y: Vec<f64>,
}

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Figure {
    width: f64,
    height: f64,
    body: String,
}

fn trim_num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// About five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * hi.abs().max(1e-300) {
        let pad = if hi == 0.0 { 1.0 } else { 0.05 * hi.abs() };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

impl Figure {
    fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    fn panel(
        &mut self,
        top: f64,
        height: f64,
        series: &[Series],
        xlabel: &str,
        ylabel: &str,
        legend: bool,
    ) {
        let (left, right, pad_top, pad_bottom) = (80.0, 20.0, 20.0, 50.0);
        let (x0, x1) = (left, self.width - right);
        let (y0, y1) = (top + height - pad_bottom, top + pad_top);
        let (xlo, xhi) = range(series.iter().flat_map(|s| s.x.iter().copied()));
        let (ylo, yhi) = range(series.iter().flat_map(|s| s.y.iter().copied()));
        let sx = |x: f64| x0 + (x - xlo) / (xhi - xlo) * (x1 - x0);
        let sy = |y: f64| y0 - (y - ylo) / (yhi - ylo) * (y0 - y1);
        let b = &mut self.body;
        let _ = writeln!(
            b,
            r##"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#000"/>"##,
            x1 - x0,
            y0 - y1
        );
        for t in ticks(xlo, xhi) {
            let x = sx(t);
            let _ = writeln!(
                b,
                r##"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="#000"/>"##,
                y0 + 5.0
            );
            let _ = writeln!(
                b,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                trim_num(t)
            );
        }
        for t in ticks(ylo, yhi) {
            let y = sy(t);
            let _ = writeln!(
                b,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="#000"/>"##,
                x0 - 5.0
            );
            let label = if t != 0.0 && (t.abs() < 1e-3 || t.abs() >= 1e4) {
                format!("{t:.1e}")
            } else {
                trim_num(t)
            };
            let _ = writeln!(
                b,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
                x0 - 8.0,
                y + 4.0
            );
        }
        if !xlabel.is_empty() {
            let _ = writeln!(
                b,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                0.5 * (x0 + x1),
                y0 + 40.0,
                escape(xlabel)
            );
        }
        let ym = 0.5 * (y0 + y1);
        let _ = writeln!(
            b,
            r#"<text x="18" y="{ym:.1}" text-anchor="middle" transform="rotate(-90 18 {ym:.1})">{}</text>"#,
            escape(ylabel)
        );
        for (i, s) in series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> =
                s.x.iter()
                    .zip(&s.y)
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                    .collect();
            let _ = writeln!(
                b,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
                pts.join(" "),
                escape(&s.label)
            );
            if legend {
                let ly = y1 + 16.0 + 16.0 * i as f64;
                let lx = x1 - 150.0;
                let _ = writeln!(
                    b,
                    r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
                    lx + 24.0
                );
                let _ = writeln!(
                    b,
                    r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
                    lx + 30.0,
                    ly + 4.0,
                    escape(&s.label)
                );
            }
        }
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SiValue {
    pub name: &'static str,
    pub value: f64,
    pub unit: &'static str,
}

/// Record of one run: what was asked for, what was resolved, how it went.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: String,
    pub preset: Option<String>,
    pub config_digest: String,
    pub config: RunConfig,
    pub params_internal: PhysParams,
    pub params_si: Vec<SiValue>,
    pub pulse_f: PulseSpec,
    pub pulse_h: PulseSpec,
    /// `N z Sigma` at `z_max`, the quantity that fixes the propagation.
    pub propagation_constant: f64,
    pub linear_absorption_per_cm: f64,
    pub wall_clock_s: f64,
    pub diagnostics: Option<Diagnostics>,
    pub max_yield_disagreement: Option<f64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &RunConfig, sim: &Simulation, mode: &str, preset: Option<&str>) -> Self {
        let p = &sim.params;
        let params_si = config
            .units
            .params_to_si(p)
            .into_iter()
            .map(|(name, value, unit)| SiValue { name, value, unit })
            .collect();
        Self {
            tool: "phasectl",
            version: env!("CARGO_PKG_VERSION"),
            mode: mode.to_string(),
            preset: preset.map(str::to_string),
            config_digest: config.digest(),
            config: config.clone(),
            params_internal: p.clone(),
            params_si,
            pulse_f: sim.pulse_f,
            pulse_h: sim.pulse_h,
            propagation_constant: p.density * sim.zgrid.z_max * p.sigma_beam,
            linear_absorption_per_cm: p.linear_absorption(),
            wall_clock_s: 0.0,
            diagnostics: None,
            max_yield_disagreement: None,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{Observables, Provenance, Snapshot};

    fn phase_result(label: &str, n: usize) -> ScanResult {
        let axis: Vec<f64> = (0..n)
            .map(|i| 2.0 * PI * i as f64 / (n.max(2) - 1) as f64)
            .collect();
        let points = axis
            .iter()
            .map(|&t| Observables {
                z: 0.0,
                theta: t,
                s_f: 0.0,
                s_h: 0.0,
                q: (t / 2.0).cos().powi(2) / 3.0,
            })
            .collect();
        ScanResult {
            kind: ScanKind::Phase,
            label: label.into(),
            axis,
            points,
            snapshots: vec![],
            diagnostics: None,
            provenance: Provenance::default(),
        }
    }

    fn parse_rows(text: &str) -> Vec<Vec<f64>> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn phase_csv_shape_and_round_trip() {
        let r = phase_result("I8e10", 3);
        let text = csv_string(&r).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), PHASE_HEADER);
        let rows = parse_rows(&text);
        for (row, (th, o)) in rows.iter().zip(r.axis.iter().zip(&r.points)) {
            assert_eq!(row[0], fmt12(th / PI).parse::<f64>().unwrap());
            assert_eq!(row[1], fmt12(o.q).parse::<f64>().unwrap());
            assert!((row[1] - o.q).abs() <= 5e-12 * o.q.abs());
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(PI), "3.14159265359e0");
        assert_eq!(fmt12(-1.0 / 3.0e5), "-3.33333333333e-6");
    }

    #[test]
    fn z_csv_wraps_theta() {
        let mut r = phase_result("z", 4);
        r.kind = ScanKind::Z;
        for (i, o) in r.points.iter_mut().enumerate() {
            o.z = i as f64;
            o.theta = -0.5 * PI + 3.0 * PI * i as f64;
            o.s_h = 2.0 + i as f64;
            o.s_f = 1.0;
        }
        let text = csv_string(&r).unwrap();
        assert_eq!(text.lines().next().unwrap(), Z_HEADER);
        let rows = parse_rows(&text);
        assert!(rows.iter().all(|r| r[1] >= 0.0 && r[1] < 2.0));
        assert!((rows[0][1] - 1.5).abs() < 1e-11);
        assert!((rows[1][1] - 0.5).abs() < 1e-11);
        assert_eq!(rows[0][2], 1.0);
        assert_eq!(rows[3][2], 2.5);
        assert!(rows.iter().all(|r| r[4] == 1.0));
    }

    #[test]
    fn snapshot_csv_rows() {
        let s = |z: f64| Snapshot {
            z,
            tau: vec![-1.0, 0.0, 1.0],
            abs_ah: vec![0.1, 0.2, 0.1],
            abs_af: vec![1.0; 3],
            centroid_h: 0.0,
            tail_fraction: 0.0,
        };
        let r = ScanResult {
            kind: ScanKind::Snapshots,
            label: "s".into(),
            axis: vec![0.0, 1.0],
            points: vec![],
            snapshots: vec![s(0.0), s(1.0)],
            diagnostics: None,
            provenance: Provenance::default(),
        };
        let text = csv_string(&r).unwrap();
        assert_eq!(text.lines().next().unwrap(), SNAPSHOT_HEADER);
        let rows = parse_rows(&text);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[4], vec![0.0, 0.2, 1.0, 1.0]);
    }

    #[test]
    fn empty_result_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.svg");
        let r = phase_result("empty", 0);
        assert!(matches!(
            emit_plot(std::slice::from_ref(&r), &path),
            Err(Error::EmptyResult(_))
        ));
        assert!(matches!(
            emit_csv(&r, &dir.path().join("x.csv")),
            Err(Error::EmptyResult(_))
        ));
        assert!(matches!(emit_plot(&[], &path), Err(Error::EmptyResult(_))));
        assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
    }

    #[test]
    fn phase_plot_has_three_labeled_curves() {
        let rs: Vec<ScanResult> = ["I1e10", "I3e10", "I8e10"]
            .iter()
            .map(|l| phase_result(l, 9))
            .collect();
        let svg = plot_string(&rs).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        for l in ["I1e10", "I3e10", "I8e10"] {
            assert!(svg.contains(&format!(">{l}</text>")), "legend entry {l}");
        }
    }

    #[test]
    fn z_plot_has_three_panels() {
        let mut r = phase_result("z", 5);
        r.kind = ScanKind::Z;
        for o in r.points.iter_mut() {
            o.s_h = 1.0;
        }
        let svg = plot_string(&[r]).unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("S_h / S_h(0)"));
    }

    #[test]
    fn tick_values_are_round() {
        assert_eq!(ticks(0.0, 2.0), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let t = ticks(0.013, 0.087);
        assert!(t.len() >= 3 && t.iter().all(|v| *v >= 0.013 && *v <= 0.087));
    }
}
