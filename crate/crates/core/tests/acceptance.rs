//! Acceptance checks on the shipped Xe-like configuration.
//!
//! Runs every criterion, prints one PASS/FAIL line each and exits non-zero
//! if any failed.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use phasectl_core::{
    initial_fields, integrate_atom, ion_yield, parse_config, propagate, AtomState, Error,
    FieldSlice, IonYield, Observables, Preset, PulseSpec, RunConfig, RunOutput, Simulation,
    TimeGrid, ZGrid,
};

const CONFIG: &str = include_str!("../../../configs/xe_like.cfg");

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

/// Bookkeeping shared by every run of the suite.
#[derive(Default)]
struct Ledger {
    runs: usize,
    max_disagreement: f64,
    breaches: Vec<String>,
    scans: Option<Vec<PresetScan>>,
}

impl Ledger {
    fn note<T>(&mut self, r: Result<T, Error>) -> Result<T, Error> {
        if let Err(e @ Error::InvariantBreach { .. }) = &r {
            self.breaches.push(e.to_string());
        }
        r
    }

    fn yields(&mut self, ys: &[IonYield]) {
        for y in ys {
            self.runs += 1;
            self.max_disagreement = self.max_disagreement.max(y.disagreement());
        }
    }

    fn run(&mut self, sim: &Simulation) -> Result<RunOutput, Error> {
        let out = self.note(propagate(sim))?;
        self.runs += out.diagnostics.accepted_steps + 1;
        self.max_disagreement = self
            .max_disagreement
            .max(out.diagnostics.max_yield_disagreement);
        Ok(out)
    }

    /// Single-atom yields at z = 0 for each launch phase.
    fn atoms(&mut self, sim: &Simulation, thetas: &[f64]) -> Result<Vec<f64>, Error> {
        let ys: Vec<Result<IonYield, Error>> = thetas
            .par_iter()
            .map(|&th| {
                let fields = initial_fields(&sim.pulse_f, &sim.pulse_h, th, sim.grid)?;
                ion_yield(&integrate_atom(&fields, &sim.params, AtomState::GROUND)?)
            })
            .collect();
        let ys = ys
            .into_iter()
            .map(|y| self.note(y))
            .collect::<Result<Vec<_>, _>>()?;
        self.yields(&ys);
        Ok(ys.iter().map(|y| y.q).collect())
    }

    fn scans(&mut self) -> Result<Vec<PresetScan>, Error> {
        if let Some(s) = &self.scans {
            return Ok(s.clone());
        }
        let thetas: Vec<f64> = (0..=SCAN_POINTS)
            .map(|i| 2.0 * PI * i as f64 / SCAN_POINTS as f64)
            .collect();
        let mut out = Vec::new();
        for p in Preset::ALL {
            let q = self.atoms(&preset(p)?, &thetas)?;
            out.push(PresetScan {
                preset: p,
                thetas: thetas.clone(),
                q,
            });
        }
        self.scans = Some(out.clone());
        Ok(out)
    }
}

/// Points per full turn of the phase scans; a multiple of 4 so that pi
/// and the quarter turns fall on the grid.
const SCAN_POINTS: usize = 720;

#[derive(Clone)]
struct PresetScan {
    preset: Preset,
    thetas: Vec<f64>,
    q: Vec<f64>,
}

impl PresetScan {
    fn pi_index(&self) -> usize {
        SCAN_POINTS / 2
    }

    /// Index and parabola-refined position of the largest Q on `lo..=hi`.
    fn max_on(&self, lo: usize, hi: usize) -> (usize, f64) {
        let k = (lo..=hi)
            .max_by(|&a, &b| self.q[a].total_cmp(&self.q[b]))
            .unwrap_or(lo);
        if k == 0 || k + 1 >= self.q.len() {
            return (k, self.thetas[k]);
        }
        let (a, b, c) = (self.q[k - 1], self.q[k], self.q[k + 1]);
        let curv = a - 2.0 * b + c;
        let shift = if curv < 0.0 {
            0.5 * (a - c) / curv
        } else {
            0.0
        };
        let h = self.thetas[1] - self.thetas[0];
        (k, self.thetas[k] + shift * h)
    }

    /// Full width of the dip at pi, measured at half its depth below the
    /// global maximum.
    fn dip_width(&self) -> f64 {
        let m = self.pi_index();
        let top = self.q.iter().copied().fold(f64::MIN, f64::max);
        let half = self.q[m] + 0.5 * (top - self.q[m]);
        let mut k = m;
        while k > 0 && self.q[k] < half {
            k -= 1;
        }
        let (t0, t1, q0, q1) = (self.thetas[k], self.thetas[k + 1], self.q[k], self.q[k + 1]);
        let cross = t1 + (half - q1) * (t0 - t1) / (q0 - q1);
        2.0 * (PI - cross)
    }
}

fn base() -> RunConfig {
    parse_config(CONFIG).unwrap_or_else(|e| panic!("shipped configuration does not parse:\n{e}"))
}

fn standard() -> Result<Simulation, Error> {
    base().simulation()
}

fn preset(p: Preset) -> Result<Simulation, Error> {
    base().with_preset(p).simulation()
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn sh_norm(series: &[Observables]) -> Vec<f64> {
    let s0 = series[0].s_h;
    series.iter().map(|o| o.s_h / s0).collect()
}

fn trapping(l: &mut Ledger) -> Result<Outcome, Error> {
    let started = Instant::now();
    let mut sim = standard()?;
    sim.theta0 = PI;
    sim.zgrid.z_max = 50.0;
    sim.zgrid.snapshot_zs.clear();
    let out = l.run(&sim)?;
    let q0 = out.series[0].q;
    let qmax = out.series.iter().map(|o| o.q).fold(0.0, f64::max);
    let sh = sh_norm(&out.series);
    let (lo, hi) = sh
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let drift = out
        .series
        .iter()
        .map(|o| (o.theta - PI).abs())
        .fold(0.0, f64::max);
    let secs = started.elapsed().as_secs_f64();
    let pass = q0 < 1e-10
        && qmax < 1e-9
        && lo >= 0.995
        && hi <= 1.005
        && drift <= 5e-3 * PI
        && secs < 60.0;
    Ok(Outcome::new(
        pass,
        format!(
            "Q(0) = {q0:.2e}, max Q = {qmax:.2e}, S_h/S_h(0) in [{lo:.6}, {hi:.6}], max |theta - pi| = {:.2e} pi over 50 cm, {secs:.1} s",
            drift / PI
        ),
    ))
}

fn symmetry(l: &mut Ledger) -> Result<Outcome, Error> {
    let thetas = [0.13, 0.41, 0.77, 1.05, 1.62, 2.2, 2.63, 3.02];
    let mirrored: Vec<f64> = thetas.iter().map(|t| 2.0 * PI - t).collect();
    let mut worst: f64 = 0.0;
    for p in Preset::ALL {
        let sim = preset(p)?;
        let a = l.atoms(&sim, &thetas)?;
        let b = l.atoms(&sim, &mirrored)?;
        worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(worst, f64::max);
    }
    Ok(Outcome::new(
        worst <= 1e-10,
        format!("max |Q(theta) - Q(2 pi - theta)| = {worst:.2e} over 8 phases x 3 presets"),
    ))
}

fn peaks(l: &mut Ledger) -> Result<Outcome, Error> {
    let started = Instant::now();
    let scans = l.scans()?;
    let mut pass = true;
    let mut parts = Vec::new();
    for s in &scans {
        let m = s.pi_index();
        let last = s.q.len() - 1;
        match s.preset {
            Preset::I8e10 => {
                let (kl, left) = s.max_on(1, m - 1);
                let (kr, right) = s.max_on(m + 1, last - 1);
                let interior = kl > 1 && kl + 1 < m && kr > m + 1 && kr + 1 < last;
                let offs = ((PI - left) / PI, (right - PI) / PI);
                let symmetric = (offs.0 - offs.1).abs() <= 1e-3;
                let placed = [offs.0, offs.1].iter().all(|o| (0.20..=0.36).contains(o));
                pass &= interior && symmetric && placed;
                parts.push(format!(
                    "{}: maxima at pi -{:.4} pi / +{:.4} pi",
                    s.preset.name(),
                    offs.0,
                    offs.1
                ));
            }
            _ => {
                let top = s.q.iter().copied().fold(f64::MIN, f64::max);
                let at_edges = s.q[0] >= top && s.q[last] >= top * (1.0 - 1e-12);
                pass &= at_edges;
                let (k, _) = s.max_on(0, last);
                parts.push(format!(
                    "{}: argmax theta = {:.4} pi",
                    s.preset.name(),
                    s.thetas[k] / PI
                ));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    Ok(Outcome::new(
        pass,
        format!("{}, {secs:.1} s", parts.join("; ")),
    ))
}

fn dip_trend(l: &mut Ledger) -> Result<Outcome, Error> {
    let scans = l.scans()?;
    let w: Vec<f64> = scans.iter().map(PresetScan::dip_width).collect();
    let pass = w.windows(2).all(|p| p[1] < p[0]);
    let shown: Vec<String> = scans
        .iter()
        .zip(&w)
        .map(|(s, w)| format!("{} {:.4} pi", s.preset.name(), w / PI))
        .collect();
    Ok(Outcome::new(
        pass,
        format!("dip widths {}", shown.join(", ")),
    ))
}

fn nz_invariance(l: &mut Ledger) -> Result<Outcome, Error> {
    let started = Instant::now();
    let mut a = standard()?;
    a.zgrid = ZGrid {
        scheme: a.zgrid.scheme,
        drop_dpdt: a.zgrid.drop_dpdt,
        ..ZGrid::fixed(3.0, 0.01)
    };
    let mut b = a.clone();
    b.params.density *= 10.0;
    b.zgrid = ZGrid {
        z_max: a.zgrid.z_max / 10.0,
        dz_init: a.zgrid.dz_init / 10.0,
        ..a.zgrid.clone()
    };
    let ra = l.run(&a)?;
    let rb = l.run(&b)?;
    if ra.series.len() != rb.series.len() {
        return Ok(Outcome::new(
            false,
            format!(
                "step counts differ: {} vs {}",
                ra.series.len(),
                rb.series.len()
            ),
        ));
    }
    let (sa, sb) = (sh_norm(&ra.series), sh_norm(&rb.series));
    let mut worst: f64 = 0.0;
    for (i, (x, y)) in ra.series.iter().zip(&rb.series).enumerate() {
        worst = worst
            .max(rel(x.theta, y.theta))
            .max(rel(sa[i], sb[i]))
            .max(rel(x.q, y.q));
    }
    let secs = started.elapsed().as_secs_f64();
    Ok(Outcome::new(
        worst <= 1e-6 && secs < 120.0,
        format!(
            "max relative difference {worst:.2e} over {} matched steps, {secs:.1} s",
            ra.series.len()
        ),
    ))
}

fn phenomenology(l: &mut Ledger) -> Result<Outcome, Error> {
    let started = Instant::now();
    let sim = standard()?;
    let out = l.run(&sim)?;
    let s = &out.series;
    let band = 0.05 * PI;

    // (a) the last excursion out of the band fixes the settling distance
    let outside = s.iter().rposition(|o| (o.theta - PI).abs() > band);
    let settle = match outside {
        Some(k) if k + 1 < s.len() => s[k + 1].z,
        Some(_) => f64::INFINITY,
        None => 0.0,
    };
    let entry = s
        .iter()
        .position(|o| (o.theta - PI).abs() <= band)
        .unwrap_or(s.len());
    let mut high = f64::MIN;
    let mut setback: f64 = 0.0;
    for o in &s[..entry] {
        high = high.max(o.theta);
        setback = setback.max(high - o.theta);
    }
    let mut swings = Vec::new();
    for w in s[entry..].windows(3) {
        let (d0, d1, d2) = (w[0].theta - PI, w[1].theta - PI, w[2].theta - PI);
        if (d1 - d0) * (d2 - d1) < 0.0 {
            swings.push(d1.abs());
        }
    }
    let damped = !swings.is_empty() && swings.windows(2).all(|p| p[1] < p[0]);
    let a_ok = (0.3..=3.0).contains(&settle) && setback < band && damped;

    // (b)
    let sh = sh_norm(s);
    let kmax = (0..sh.len())
        .max_by(|&i, &j| sh[i].total_cmp(&sh[j]))
        .unwrap_or(0);
    let kmin = (0..=kmax)
        .min_by(|&i, &j| sh[i].total_cmp(&sh[j]))
        .unwrap_or(0);
    let end = *sh.last().unwrap_or(&1.0);
    let b_ok =
        sh[kmin] < 1.0 && sh[kmax] > 1.0 && kmin < kmax && kmax + 1 < sh.len() && end < sh[kmax];

    // (c)
    let q: Vec<f64> = s.iter().map(|o| o.q).collect();
    let kq = (0..q.len())
        .max_by(|&i, &j| q[i].total_cmp(&q[j]))
        .unwrap_or(0);
    let interior = kq > 0 && kq + 1 < q.len() && q[kq] > q[0];
    let tail = &q[q.len() * 3 / 4..];
    let residual = tail.iter().sum::<f64>() / tail.len() as f64;
    let c_ok = interior && (0.05..=0.15).contains(&residual);

    // (d)
    let floor = 1e-13;
    let mut d_ok = true;
    let mut weak = Vec::new();
    for p in [Preset::I1e10, Preset::I3e10] {
        let out = l.run(&preset(p)?)?;
        let q: Vec<f64> = out.series.iter().map(|o| o.q).collect();
        let rise = q.windows(2).map(|w| w[1] - w[0]).fold(f64::MIN, f64::max);
        d_ok &= rise <= floor && q[1..].iter().all(|&v| v < q[0]);
        weak.push(format!("{} largest rise {rise:.1e}", p.name()));
    }

    let secs = started.elapsed().as_secs_f64();
    let pass = a_ok && b_ok && c_ok && d_ok && secs < 600.0;
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    Ok(Outcome::new(
        pass,
        format!(
            "(a) {}: settles at {settle:.3} cm, setback {:.4} pi, {} damped swings; \
             (b) {}: S_h dip {:.3} at {:.2} cm, max {:.3} at {:.2} cm, end {:.4}; \
             (c) {}: Q(0) {:.4}, max {:.4} at {:.3} cm, residual {residual:.2e} (want 0.10 +- 0.05); \
             (d) {}: {}; {secs:.1} s",
            flag(a_ok),
            setback / PI,
            swings.len(),
            flag(b_ok),
            sh[kmin],
            s[kmin].z,
            sh[kmax],
            s[kmax].z,
            end,
            flag(c_ok),
            q[0],
            q[kq],
            s[kq].z,
            flag(d_ok),
            weak.join(", "),
        ),
    ))
}

fn time_order(l: &mut Ledger) -> Result<(f64, String), Error> {
    let sim = standard()?;
    let span = sim.grid.t_end - sim.grid.t_start;
    let coarse = TimeGrid::new(
        sim.grid.t_start,
        sim.grid.t_end,
        (span / 0.04).ceil() as usize + 1,
    )?;
    let grids = [coarse, coarse.refined(), coarse.refined().refined()];
    let mut ends = Vec::new();
    for g in grids {
        let fields = initial_fields(&sim.pulse_f, &sim.pulse_h, 0.0, g)?;
        let traj = l.note(integrate_atom(&fields, &sim.params, AtomState::GROUND))?;
        let y = l.note(ion_yield(&traj))?;
        l.yields(&[y]);
        ends.push(traj.last());
    }
    let dist = |a: &AtomState, b: &AtomState| {
        (a.s11 - b.s11)
            .abs()
            .max((a.s22 - b.s22).abs())
            .max((a.s21 - b.s21).norm())
    };
    let (e1, e2) = (dist(&ends[0], &ends[1]), dist(&ends[1], &ends[2]));
    Ok((
        e1 / e2,
        format!(
            "dt {:.3}/{:.3}/{:.3} ns: errors {e1:.2e}, {e2:.2e}",
            grids[0].dt(),
            grids[1].dt(),
            grids[2].dt()
        ),
    ))
}

fn z_order(l: &mut Ledger) -> Result<(f64, String), Error> {
    let sim = standard()?;
    let z_max = 1.0;
    let mut finals: Vec<FieldSlice> = Vec::new();
    for dz in [0.02, 0.01, 0.005] {
        let mut s = sim.clone();
        s.zgrid = ZGrid {
            scheme: sim.zgrid.scheme,
            drop_dpdt: sim.zgrid.drop_dpdt,
            ..ZGrid::fixed(z_max, dz)
        };
        s.zgrid.snapshot_zs = vec![z_max];
        let out = l.run(&s)?;
        finals.push(
            out.snapshots
                .last()
                .cloned()
                .ok_or_else(|| Error::EmptyResult("no final slice".into()))?,
        );
    }
    let dist = |a: &FieldSlice, b: &FieldSlice| {
        let d = |x: &[Complex64], y: &[Complex64]| {
            x.iter()
                .zip(y)
                .map(|(u, v)| (u - v).norm())
                .fold(0.0, f64::max)
        };
        d(&a.a_f, &b.a_f).max(d(&a.a_h, &b.a_h))
    };
    let (e1, e2) = (dist(&finals[0], &finals[1]), dist(&finals[1], &finals[2]));
    Ok((
        e1 / e2,
        format!("dz 0.02/0.01/0.005 cm to {z_max} cm: errors {e1:.2e}, {e2:.2e}"),
    ))
}

fn convergence(l: &mut Ledger) -> Result<Outcome, Error> {
    let (rt, dt) = time_order(l)?;
    let (rz, dz) = z_order(l)?;
    let pass = (12.0..=20.0).contains(&rt) && (3.4..=4.6).contains(&rz);
    Ok(Outcome::new(
        pass,
        format!("time ratio {rt:.2} ({dt}); z ratio {rz:.3} ({dz})"),
    ))
}

fn linear_absorption(l: &mut Ledger) -> Result<Outcome, Error> {
    let mut sim = standard()?;
    sim.params.delta = 0.0;
    let tau = 40.0;
    sim.pulse_f = PulseSpec {
        peak: 0.0,
        t_center: 0.0,
        tau,
        phase0: 0.0,
    };
    sim.pulse_h = PulseSpec {
        peak: 1e-6,
        t_center: 0.0,
        tau,
        phase0: 0.0,
    };
    sim.grid = TimeGrid::standard_window(&sim.pulse_f, sim.params.gamma, 0.05)?;
    sim.theta0 = 0.0;
    sim.zgrid = ZGrid {
        scheme: sim.zgrid.scheme,
        ..ZGrid::fixed(0.03, 0.0005)
    };
    let out = l.run(&sim)?;

    // steady state of the coherence with s11 = 1: s21 = i b1 a_h / gamma, so
    // da_h/dz = -(omega_h N g_h b1^2 / gamma) a_h and the energy decays at twice that
    let p = &sim.params;
    let g_h = p.coupling / p.n_h;
    let oracle = -2.0 * 3.0 * p.omega_f * p.density * g_h * p.b1 * p.b1 / p.gamma;

    let xs: Vec<f64> = out.series.iter().map(|o| o.z).collect();
    let ys: Vec<f64> = out
        .series
        .iter()
        .map(|o| (o.s_h / out.series[0].s_h).ln())
        .collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    let err = rel(slope, oracle);
    Ok(Outcome::new(
        err <= 0.03 && r2 > 0.9999,
        format!(
            "fitted slope {slope:.3} /cm vs steady-state {oracle:.3} /cm ({:.2}%), r^2 = {r2:.6}",
            100.0 * err
        ),
    ))
}

fn reshaping(l: &mut Ledger) -> Result<Outcome, Error> {
    let sim = standard()?;
    let out = l.run(&sim)?;
    let snaps: Vec<_> = out
        .snapshots
        .iter()
        .map(|f| phasectl_core::snapshot(f, &sim))
        .collect();
    let first = &snaps[0];
    let last = &snaps[snaps.len() - 1];
    let inner = &snaps[1..snaps.len() - 1];
    let late = inner
        .iter()
        .max_by(|a, b| a.centroid_h.total_cmp(&b.centroid_h))
        .unwrap_or(first);
    let tail_max = snaps.iter().map(|s| s.tail_fraction).fold(0.0, f64::max);
    let shift = late.centroid_h - first.centroid_h;
    let pass = shift > 0.1 * sim.pulse_h.tau && last.tail_fraction < 0.5 * tail_max;
    Ok(Outcome::new(
        pass,
        format!(
            "centroid {:+.3} ns at z = 0 -> {:+.3} ns at {} cm; tail fraction max {tail_max:.4}, {:.4} at {} cm",
            first.centroid_h, late.centroid_h, late.z, last.tail_fraction, last.z
        ),
    ))
}

fn yield_identity(l: &mut Ledger) -> Result<Outcome, Error> {
    Ok(Outcome::new(
        l.runs > 0 && l.max_disagreement < 1e-6,
        format!(
            "max |Q_population - Q_flux| = {:.2e} over {} atom integrations",
            l.max_disagreement, l.runs
        ),
    ))
}

fn invariants(l: &mut Ledger) -> Result<Outcome, Error> {
    // walk one strong-field trajectory by hand as well
    let sim = standard()?;
    let fields = initial_fields(&sim.pulse_f, &sim.pulse_h, 0.7 * PI, sim.grid)?;
    let traj = l.note(integrate_atom(&fields, &sim.params, AtomState::GROUND))?;
    let mut worst_pos: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for w in traj.states.windows(2) {
        let s = w[1];
        worst_pos = worst_pos
            .max(-s.s11)
            .max(-s.s22)
            .max(s.s21.norm_sqr() - s.s11 * s.s22);
        worst_trace = worst_trace.max(s.trace() - w[0].trace());
    }
    let pass = l.breaches.is_empty() && worst_pos <= 1e-9 && worst_trace <= 1e-12;
    let mut detail = format!(
        "{} breaches; direct walk: worst positivity excess {worst_pos:.1e}, worst trace growth {worst_trace:.1e}",
        l.breaches.len()
    );
    if let Some(b) = l.breaches.first() {
        detail.push_str(&format!("; first: {b}"));
    }
    Ok(Outcome::new(pass, detail))
}

type Check = fn(&mut Ledger) -> Result<Outcome, Error>;

fn main() -> ExitCode {
    let checks: [(usize, &str, Check); 11] = [
        (1, "trapping exactness", trapping),
        (2, "phase symmetry", symmetry),
        (3, "strong-field peak displacement", peaks),
        (4, "intensity trend of the dip", dip_trend),
        (5, "N z invariance", nz_invariance),
        (6, "propagation phenomenology", phenomenology),
        (8, "convergence orders", convergence),
        (9, "linear absorption", linear_absorption),
        (11, "harmonic reshaping", reshaping),
        (7, "yield estimator identity", yield_identity),
        (10, "positivity and trace", invariants),
    ];
    let mut ledger = Ledger::default();
    let mut lines = Vec::new();
    for (n, name, check) in checks {
        let outcome =
            check(&mut ledger).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        let line = format!("criterion {n:>2} {verdict} {name}: {}", outcome.detail);
        println!("{line}");
        lines.push((n, outcome.pass));
    }
    let failed: Vec<String> = lines
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n.to_string())
        .collect();
    if failed.is_empty() {
        println!("acceptance: all 11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of 11 failed ({})",
            failed.len(),
            failed.join(", ")
        );
        ExitCode::FAILURE
    }
}
