//! Bundled experiment configs, one or more per figure.

use crate::config;

const BUNDLED: &[(&str, &str)] = &[
    ("fig2_xy5", include_str!("../configs/fig2_xy5.toml")),
    ("fig3_scaling_xy", include_str!("../configs/fig3_scaling_xy.toml")),
    ("fig3_scaling_xxz", include_str!("../configs/fig3_scaling_xxz.toml")),
    ("fig4_atebx0", include_str!("../configs/fig4_atebx0.toml")),
    ("fig5_kagome", include_str!("../configs/fig5_kagome.toml")),
    ("fig7_noise", include_str!("../configs/fig7_noise.toml")),
    ("fig8_threshold", include_str!("../configs/fig8_threshold.toml")),
    ("figA1_ite_overlaps", include_str!("../configs/figA1_ite_overlaps.toml")),
    ("figA2_asp_trajectory", include_str!("../configs/figA2_asp_trajectory.toml")),
    ("figA5_xxz_gaps", include_str!("../configs/figA5_xxz_gaps.toml")),
    ("figA6_xxz5", include_str!("../configs/figA6_xxz5.toml")),
    ("figA7_kagome_gaps", include_str!("../configs/figA7_kagome_gaps.toml")),
    ("figA8_basis_overlap", include_str!("../configs/figA8_basis_overlap.toml")),
    ("figA9_measurement", include_str!("../configs/figA9_measurement.toml")),
    ("trivial", include_str!("../configs/trivial.toml")),
];

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub figure: String,
    pub description: String,
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Name, figure and description of every bundled config.
pub fn entries() -> Vec<Entry> {
    BUNDLED
        .iter()
        .map(|(name, text)| {
            let cfg = config::parse(text).unwrap_or_else(|e| panic!("bundled config {name} does not parse: {e}"));
            Entry {
                name,
                figure: cfg.figure,
                description: cfg.description,
            }
        })
        .collect()
}
