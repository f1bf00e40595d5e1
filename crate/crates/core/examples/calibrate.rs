//! Phase scans and the z-settling distance for the three presets under a
//! candidate parameter set.
//!
//! Usage: calibrate [section.key=value ...]
//!
//! Starts from configs/xe_like.cfg, e.g.
//! `cargo run --release --example calibrate -- physics.b3=6 physics.kappa_ion=0.5`

use std::f64::consts::PI;

use phasectl_core::{parse_config_with, propagate, single_atom_yield, Preset};

const CONFIG: &str = include_str!("../../../configs/xe_like.cfg");

fn main() {
    let overrides: Vec<String> = std::env::args().skip(1).collect();
    let cfg = parse_config_with(CONFIG, &overrides).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    for preset in Preset::ALL {
        let sim = cfg
            .with_preset(preset)
            .simulation()
            .expect("consistent configuration");
        let n = 512;
        let thetas: Vec<f64> = (0..=n).map(|i| i as f64 * 2.0 * PI / n as f64).collect();
        let qs: Vec<f64> = thetas
            .iter()
            .map(|&t| single_atom_yield(&sim, t).expect("single-atom run"))
            .collect();
        let imax = (0..=n / 2)
            .max_by(|&i, &j| qs[i].total_cmp(&qs[j]))
            .unwrap_or(0);
        let level = 0.5 * (qs[imax] + qs[n / 2]);
        let mut k = n / 2;
        while k > 0 && qs[k] < level {
            k -= 1;
        }
        let x = thetas[k] + (level - qs[k]) / (qs[k + 1] - qs[k]) * (thetas[k + 1] - thetas[k]);

        let mut run = sim.clone();
        run.theta0 = 0.0;
        run.zgrid.snapshot_zs.clear();
        let settle = match propagate(&run) {
            Ok(out) => {
                let s = &out.series;
                match s.iter().rposition(|o| (o.theta - PI).abs() > 0.05 * PI) {
                    Some(i) if i + 1 < s.len() => format!("{:.3} cm", s[i + 1].z),
                    Some(_) => "not within z_max".to_string(),
                    None => "at entrance".to_string(),
                }
            }
            Err(e) => format!("failed ({e})"),
        };
        println!(
            "{}: peak {:.3} pi, Qmax {:.4e}, Q(0) {:.4e}, Q(pi) {:.1e}, dip width {:.4} pi, settles {settle}",
            preset.name(),
            thetas[imax] / PI,
            qs[imax],
            qs[0],
            qs[n / 2],
            2.0 * (PI - x) / PI
        );
    }
}
