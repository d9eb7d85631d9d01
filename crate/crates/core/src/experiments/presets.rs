//! Ready-to-run configurations for each experiment kind plus the named
//! figure builds layered on top of them.

use std::collections::BTreeMap;

use crate::analysis::BoundConvention;
use crate::optics::NetworkSpec;
use crate::temporal::detuning_for_overlap_sq;
use crate::{Error, Result};

use super::networks::{bell_network, hbt_network, hom_network, CorrelationSetting};
use super::{
    AnalysisSection, ChipSection, DetectorSection, ExperimentConfig, ExperimentKind,
    OutputSection, RoutingSection, SourceSection, TransitSection,
};
use crate::optics::cnot_network;

pub const PACKET_DURATION_NS: f64 = 400.0;
pub const PACKET_DT_NS: f64 = 2.0;
/// Squared spectral overlap between the delayed and direct packets.
pub const PAIR_OVERLAP_SQ: f64 = 0.85;
pub const OUTPUT_LOSS_DB: f64 = 3.0;
pub const QUANTUM_EFFICIENCY: f64 = 0.7;
/// Calibrated so the intensity-correlator preset's zero-lag value
/// lands at 0.15 (see tests/calibration.rs, scan_dark_rate).
pub const DARK_RATE_HZ: f64 = 1900.0;
/// Calibrated so the loop-readout preset's correlation bound lands at
/// 0.82 (see tests/calibration.rs, scan_depolarization); equals
/// 1 - 0.82/sqrt(2) up to rounding.
pub const PAIR_DEPOLARIZATION: f64 = 0.42;

fn source_section() -> SourceSection {
    SourceSection {
        rep_period_ns: 1000.0,
        emission_efficiency: 0.6,
        atom_rate_hz: 200.0,
        transit_max_ns: 60_000.0,
        transit: TransitSection::Uniform,
        packet_duration_ns: PACKET_DURATION_NS,
        packet_dt_ns: PACKET_DT_NS,
    }
}

fn detector_section(dark_rate_hz: f64) -> DetectorSection {
    DetectorSection {
        quantum_efficiency: QUANTUM_EFFICIENCY,
        dark_rate_hz,
        resolution_ns: 0.08,
        dead_time_ns: 50.0,
    }
}

fn routing_section(detuned: bool, depolarization: f64) -> RoutingSection {
    RoutingSection {
        delay_ns: 1000.0,
        relative_detuning_rad_per_ns: if detuned { pair_detuning() } else { 0.0 },
        depolarization,
    }
}

pub fn pair_detuning() -> f64 {
    detuning_for_overlap_sq(PAIR_OVERLAP_SQ, PACKET_DURATION_NS)
        .expect("fixed overlap target is reachable")
}

fn outputs(modes: &[usize]) -> Vec<OutputSection> {
    modes
        .iter()
        .enumerate()
        .map(|(d, &m)| OutputSection {
            mode: m,
            detector: d as u8,
            loss_db: OUTPUT_LOSS_DB,
            delay_ns: 0.0,
        })
        .collect()
}

fn inputs(entries: &[(&str, usize)]) -> BTreeMap<String, usize> {
    entries.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn analysis_defaults() -> AnalysisSection {
    AnalysisSection {
        bin_width_ns: 1000.0,
        max_lag_ns: 10_000.0,
        window_half_width_ns: 150.0,
        sideband_ns: None,
        delay_centers_ns: Vec::new(),
        delay_half_width_ns: 30.0,
        convention: BoundConvention::ScaledRootTwo,
    }
}

/// Calibrated configuration for `kind`, reproducing the bench settings.
pub fn preset(kind: ExperimentKind, seed: u64) -> ExperimentConfig {
    match kind {
        ExperimentKind::Hbt => ExperimentConfig {
            kind,
            seed,
            duration_ns: 6e10,
            source: source_section(),
            detectors: detector_section(DARK_RATE_HZ),
            routing: routing_section(false, 0.0),
            chip: ChipSection {
                network: NetworkSpec::from_network(&hbt_network()),
                inputs: inputs(&[("source", 0)]),
                outputs: outputs(&[0, 1, 2]),
            },
            analysis: analysis_defaults(),
        },
        ExperimentKind::Hom => ExperimentConfig {
            kind,
            seed,
            duration_ns: 2e11,
            source: source_section(),
            detectors: detector_section(0.0),
            routing: routing_section(true, 0.0),
            chip: ChipSection {
                network: NetworkSpec::from_network(&hom_network()),
                inputs: inputs(&[("delayed", 0), ("direct", 1)]),
                outputs: outputs(&[0, 1]),
            },
            analysis: AnalysisSection {
                bin_width_ns: 25.0,
                max_lag_ns: 600.0,
                window_half_width_ns: 500.0,
                ..analysis_defaults()
            },
        },
        ExperimentKind::CnotTruthTable => ExperimentConfig {
            kind,
            seed,
            duration_ns: 2e11,
            source: source_section(),
            detectors: detector_section(0.0),
            routing: routing_section(true, 0.0),
            chip: ChipSection {
                network: NetworkSpec::from_network(&cnot_network()),
                inputs: inputs(&[
                    ("control0", 1),
                    ("control1", 2),
                    ("target0", 3),
                    ("target1", 4),
                ]),
                outputs: outputs(&[1, 2, 3, 4]),
            },
            analysis: AnalysisSection {
                window_half_width_ns: 200.0,
                sideband_ns: Some((420.0, 580.0)),
                delay_centers_ns: vec![0.0, 25.0, 50.0, 75.0, 100.0, 150.0, 200.0, 300.0],
                delay_half_width_ns: 30.0,
                ..analysis_defaults()
            },
        },
        ExperimentKind::BellZz | ExperimentKind::BellXx => {
            let setting = match kind {
                ExperimentKind::BellZz => CorrelationSetting::Zz,
                _ => CorrelationSetting::Xx,
            };
            ExperimentConfig {
                kind,
                seed,
                duration_ns: 4e11,
                source: source_section(),
                detectors: detector_section(0.0),
                // pair degradation carried entirely by the depolarizer:
                // the loop readouts are insensitive to detection delay
                routing: routing_section(false, PAIR_DEPOLARIZATION),
                chip: ChipSection {
                    network: NetworkSpec::from_network(&bell_network(setting)),
                    inputs: inputs(&[
                        ("delayed", 1),
                        ("direct", 4),
                        ("control0", 1),
                        ("control1", 2),
                        ("target0", 3),
                        ("target1", 4),
                    ]),
                    outputs: outputs(&[1, 2, 3, 4]),
                },
                analysis: AnalysisSection {
                    window_half_width_ns: 200.0,
                    delay_centers_ns: vec![0.0, 50.0, 100.0, 150.0],
                    delay_half_width_ns: 50.0,
                    ..analysis_defaults()
                },
            }
        }
    }
}

/// Strips every noise term: unit detection, no darks, no dead time, no
/// loss, no detuning, no depolarization.
pub fn noise_free(mut cfg: ExperimentConfig) -> ExperimentConfig {
    cfg.detectors.quantum_efficiency = 1.0;
    cfg.detectors.dark_rate_hz = 0.0;
    cfg.detectors.dead_time_ns = 0.0;
    for out in &mut cfg.chip.outputs {
        out.loss_db = 0.0;
    }
    cfg.routing.relative_detuning_rad_per_ns = 0.0;
    cfg.routing.depolarization = 0.0;
    cfg
}

/// Work order behind a figure id.
#[derive(Debug, Clone)]
pub enum FigurePlan {
    Single(ExperimentConfig),
    /// Interference visibility swept over squared packet overlaps.
    OverlapSweep { base: ExperimentConfig, overlaps_sq: Vec<f64> },
    BellPair { zz: ExperimentConfig, xx: ExperimentConfig },
}

fn with_duration(mut cfg: ExperimentConfig, duration_ns: f64) -> ExperimentConfig {
    cfg.duration_ns = duration_ns;
    cfg
}

pub fn figure_plan(id: &str, seed: u64) -> Result<FigurePlan> {
    match id {
        "1d" => Ok(FigurePlan::Single(with_duration(preset(ExperimentKind::Hbt, seed), 2e10))),
        "1e" => {
            let mut cfg = with_duration(preset(ExperimentKind::Hbt, seed), 2e10);
            cfg.analysis.bin_width_ns = 2000.0;
            cfg.analysis.max_lag_ns = 200_000.0;
            Ok(FigurePlan::Single(cfg))
        }
        "2b" => Ok(FigurePlan::Single(with_duration(preset(ExperimentKind::Hom, seed), 5e10))),
        "2c" => Ok(FigurePlan::OverlapSweep {
            base: with_duration(preset(ExperimentKind::Hom, seed), 1e10),
            overlaps_sq: vec![1.0, 0.95, 0.85, 0.7, 0.5, 0.25],
        }),
        "3ab" => Ok(FigurePlan::Single(with_duration(
            preset(ExperimentKind::CnotTruthTable, seed),
            5e10,
        ))),
        "3e" => Ok(FigurePlan::BellPair {
            zz: with_duration(preset(ExperimentKind::BellZz, seed), 5e10),
            xx: with_duration(preset(ExperimentKind::BellXx, seed), 5e10),
        }),
        _ => Err(Error::argument(format!("unknown figure id {id:?}"))),
    }
}
