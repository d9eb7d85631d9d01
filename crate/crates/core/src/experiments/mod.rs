//! Packaged experiments: a TOML-serializable description of one
//! acquisition (source, chip, readout wiring, analysis windows), the
//! Monte-Carlo pipeline that turns it into click logs, and the per-kind
//! analysis summarized in a report.

pub mod figures;
pub mod networks;
pub mod oracle;
pub mod presets;
mod runner;

pub use figures::{report_tables, run_figure, FigureReport, FigureTable, FIGURE_IDS};
pub use networks::{
    bell_forward_network, bell_network, bell_state_preparation, hbt_network, hom_network,
    pair_amplitudes, CorrelationSetting,
};
pub use presets::{figure_plan, noise_free, preset, FigurePlan};
pub use oracle::{permanent_cross_check, random_mesh, CrossCheck};
pub use runner::{analyze, log_labels, run, run_bell_pair, simulate, BellPairReport, RunOutput};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{BoundConvention, DelayCurve, QubitChannels, RailChannels};
use crate::optics::{ModeNetwork, NetworkSpec};
use crate::source::{
    ChannelMap, DetectorConfig, OutputChannel, SourceConfig, TransitDistribution,
};
use crate::temporal::{default_envelope, Wavepacket};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Intensity autocorrelation through the splitter tree.
    Hbt,
    /// Two-photon interference at a balanced coupler.
    Hom,
    /// Gate truth table over the four basis inputs.
    CnotTruthTable,
    /// Pair correlations, computational basis.
    BellZz,
    /// Pair correlations, superposition basis.
    BellXx,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Hbt => "hbt",
            ExperimentKind::Hom => "hom",
            ExperimentKind::CnotTruthTable => "cnot_truth_table",
            ExperimentKind::BellZz => "bell_zz",
            ExperimentKind::BellXx => "bell_xx",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hbt" => Ok(ExperimentKind::Hbt),
            "hom" => Ok(ExperimentKind::Hom),
            "cnot_truth_table" => Ok(ExperimentKind::CnotTruthTable),
            "bell_zz" => Ok(ExperimentKind::BellZz),
            "bell_xx" => Ok(ExperimentKind::BellXx),
            other => Err(Error::Config(format!("unknown experiment kind {other:?}"))),
        }
    }
}

/// Photon-stream section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSection {
    pub rep_period_ns: f64,
    pub emission_efficiency: f64,
    pub atom_rate_hz: f64,
    pub transit_max_ns: f64,
    pub transit: TransitSection,
    /// Single-photon envelope support, ns.
    pub packet_duration_ns: f64,
    /// Envelope grid step, ns.
    pub packet_dt_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransitSection {
    Uniform,
    Exponential { mean_ns: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSection {
    pub quantum_efficiency: f64,
    #[serde(default)]
    pub dark_rate_hz: f64,
    pub resolution_ns: f64,
    #[serde(default)]
    pub dead_time_ns: f64,
}

/// Delay-line pairing and pair-level imperfections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingSection {
    /// Long-arm delay, ns. Pairing needs a whole number of slots.
    pub delay_ns: f64,
    /// Frequency offset between the two photons of a pair, rad/ns.
    #[serde(default)]
    pub relative_detuning_rad_per_ns: f64,
    /// Probability that a post-selectable pair is replaced by an
    /// outcome-uniform, non-interfering one.
    #[serde(default)]
    pub depolarization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub mode: usize,
    pub detector: u8,
    #[serde(default)]
    pub loss_db: f64,
    #[serde(default)]
    pub delay_ns: f64,
}

/// Chip description plus wiring: which chip input each photon role
/// takes and which detector reads each output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipSection {
    pub network: NetworkSpec,
    pub inputs: BTreeMap<String, usize>,
    pub outputs: Vec<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSection {
    /// Correlation histogram bin, ns.
    #[serde(default = "default_bin_width")]
    pub bin_width_ns: f64,
    /// Correlation histogram reach, ns.
    #[serde(default = "default_max_lag")]
    pub max_lag_ns: f64,
    /// Coincidence acceptance half width, ns.
    #[serde(default = "default_window_half_width")]
    pub window_half_width_ns: f64,
    /// Accidentals band (|dt| low, high), ns.
    #[serde(default)]
    pub sideband_ns: Option<(f64, f64)>,
    /// Centers for sliding-window curves, ns.
    #[serde(default)]
    pub delay_centers_ns: Vec<f64>,
    #[serde(default = "default_delay_half_width")]
    pub delay_half_width_ns: f64,
    #[serde(default = "default_convention")]
    pub convention: BoundConvention,
}

fn default_bin_width() -> f64 {
    1000.0
}
fn default_max_lag() -> f64 {
    10_000.0
}
fn default_window_half_width() -> f64 {
    150.0
}
fn default_delay_half_width() -> f64 {
    30.0
}
fn default_convention() -> BoundConvention {
    BoundConvention::ScaledRootTwo
}

/// Full description of one acquisition. `duration_ns` is per acquired
/// log (the truth table acquires four).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub duration_ns: f64,
    pub source: SourceSection,
    pub detectors: DetectorSection,
    pub routing: RoutingSection,
    pub chip: ChipSection,
    pub analysis: AnalysisSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::TomlParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// Stable fingerprint of the serialized config, recorded in logs
    /// and reports.
    pub fn hash(&self) -> Result<u64> {
        Ok(crate::rng::fnv1a(self.to_toml()?.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration_ns > 0.0) {
            return Err(Error::Config(format!(
                "duration {} ns must be positive",
                self.duration_ns
            )));
        }
        if !(0.0..=1.0).contains(&self.routing.depolarization) {
            return Err(Error::Config(format!(
                "depolarization {} outside [0, 1]",
                self.routing.depolarization
            )));
        }
        if !(self.routing.delay_ns > 0.0) {
            return Err(Error::Config("delay line must be positive".into()));
        }
        self.source_config()?.validate()?;
        self.detector_config().validate()?;
        let net = self.network()?;
        let map = self.channel_map();
        map.validate()?;
        for section in &self.chip.outputs {
            if section.mode >= net.mode_count() {
                return Err(Error::Config(format!(
                    "output mode {} outside the {}-mode chip",
                    section.mode,
                    net.mode_count()
                )));
            }
        }
        for (role, &mode) in &self.chip.inputs {
            if mode >= net.mode_count() {
                return Err(Error::Config(format!(
                    "input role {role:?} points at mode {mode} outside the chip"
                )));
            }
        }
        for role in self.required_roles() {
            self.chip
                .inputs
                .get(*role)
                .ok_or_else(|| Error::Config(format!("missing chip input role {role:?}")))?;
        }
        if matches!(self.kind, ExperimentKind::CnotTruthTable | ExperimentKind::BellZz | ExperimentKind::BellXx)
        {
            self.qubit_channels()?.validate()?;
        }
        if let Some((lo, hi)) = self.analysis.sideband_ns {
            if !(0.0 <= lo && lo < hi) {
                return Err(Error::Config(format!("sideband ({lo}, {hi}) is not a |dt| band")));
            }
        }
        Ok(())
    }

    fn required_roles(&self) -> &'static [&'static str] {
        match self.kind {
            ExperimentKind::Hbt => &["source"],
            ExperimentKind::Hom => &["delayed", "direct"],
            ExperimentKind::CnotTruthTable => {
                &["control0", "control1", "target0", "target1"]
            }
            ExperimentKind::BellZz | ExperimentKind::BellXx => {
                &["delayed", "direct", "control0", "control1", "target0", "target1"]
            }
        }
    }

    pub fn source_config(&self) -> Result<SourceConfig> {
        let s = &self.source;
        Ok(SourceConfig {
            rep_period_ns: s.rep_period_ns,
            emission_efficiency: s.emission_efficiency,
            atom_rate_hz: s.atom_rate_hz,
            transit_max_ns: s.transit_max_ns,
            transit_distribution: match s.transit {
                TransitSection::Uniform => TransitDistribution::Uniform,
                TransitSection::Exponential { mean_ns } => {
                    TransitDistribution::Exponential { mean_ns }
                }
            },
            envelope: self.packet()?,
        })
    }

    pub fn detector_config(&self) -> DetectorConfig {
        DetectorConfig {
            quantum_efficiency: self.detectors.quantum_efficiency,
            dark_rate_hz: self.detectors.dark_rate_hz,
            resolution_ns: self.detectors.resolution_ns,
            dead_time_ns: self.detectors.dead_time_ns,
        }
    }

    pub fn channel_map(&self) -> ChannelMap {
        let outputs = self
            .chip
            .outputs
            .iter()
            .map(|o| {
                (
                    o.mode,
                    OutputChannel { loss_db: o.loss_db, detector: o.detector, delay_ns: o.delay_ns },
                )
            })
            .collect();
        ChannelMap { inputs: self.chip.inputs.clone(), outputs }
    }

    pub fn network(&self) -> Result<ModeNetwork> {
        self.chip.network.build()
    }

    /// Unit-norm single-photon packet on the configured grid.
    pub fn packet(&self) -> Result<Wavepacket> {
        default_envelope(self.source.packet_duration_ns, 0.0, self.source.packet_dt_ns)
    }

    /// Detector wiring of the four qubit rails.
    pub fn qubit_channels(&self) -> Result<QubitChannels> {
        let map = self.channel_map();
        let det = |role: &str| -> Result<u8> {
            let mode = map.input(role)?;
            Ok(map.output(mode)?.detector)
        };
        Ok(QubitChannels {
            control: RailChannels { zero: det("control0")?, one: det("control1")? },
            target: RailChannels { zero: det("target0")?, one: det("target1")? },
        })
    }
}

/// Sizes of the acquired click logs, in report order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSummary {
    pub label: String,
    pub clicks: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub config_hash: String,
    pub duration_ns: f64,
    pub logs: Vec<LogSummary>,
    pub body: ReportBody,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Correlation {
        g2_zero: f64,
        normalization: f64,
        /// (lag ns, normalized value) pairs.
        curve: Vec<(f64, f64)>,
    },
    Interference {
        visibility: f64,
        /// Pairs injected into the chip.
        pairs: u64,
        coincidences: u64,
        reference_coincidences: u64,
        /// (lag ns, count) histogram of the interfering run.
        dip: Vec<(f64, u64)>,
        /// Same histogram with interference switched off.
        reference_dip: Vec<(f64, u64)>,
    },
    TruthTable {
        similarity: f64,
        row_pairs: Vec<u64>,
        /// Row-major 16 cells of the normalized table.
        probabilities: Vec<f64>,
        raw_counts: Vec<f64>,
        background: Vec<f64>,
        delay_curve: DelayCurve,
    },
    Correlations {
        setting: CorrelationSetting,
        expectation: f64,
        counts: [f64; 4],
        pairs: u64,
    },
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// Headline scalar lookup for embedding layers.
    pub fn metric(&self, name: &str) -> Option<f64> {
        match (&self.body, name) {
            (ReportBody::Correlation { g2_zero, .. }, "g2_zero") => Some(*g2_zero),
            (ReportBody::Correlation { normalization, .. }, "normalization") => {
                Some(*normalization)
            }
            (ReportBody::Interference { visibility, .. }, "visibility") => Some(*visibility),
            (ReportBody::Interference { pairs, .. }, "pairs") => Some(*pairs as f64),
            (ReportBody::Interference { coincidences, .. }, "coincidences") => {
                Some(*coincidences as f64)
            }
            (ReportBody::TruthTable { similarity, .. }, "similarity") => Some(*similarity),
            (ReportBody::TruthTable { row_pairs, .. }, "pairs") => {
                Some(row_pairs.iter().sum::<u64>() as f64)
            }
            (ReportBody::Correlations { expectation, .. }, "expectation") => Some(*expectation),
            (ReportBody::Correlations { pairs, .. }, "pairs") => Some(*pairs as f64),
            (_, "clicks") => Some(self.logs.iter().map(|l| l.clicks).sum::<usize>() as f64),
            _ => None,
        }
    }
}
