//! Fixtures shared by the benchmarks in `benches/`.

use phasectl_core::{parse_config, Preset, Simulation};

const CONFIG: &str = include_str!("../../../configs/xe_like.cfg");

/// The shipped configuration at one intensity preset.
pub fn simulation(preset: Preset) -> Simulation {
    parse_config(CONFIG)
        .expect("shipped configuration parses")
        .with_preset(preset)
        .simulation()
        .expect("shipped configuration is consistent")
}
